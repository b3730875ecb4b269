#include <stdexcept>
#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "asgd/datagen.hpp"
#include "doctest.h"

using namespace asgd;

namespace {

MixtureSpec toy_spec() {
  MixtureSpec spec;
  spec.num_classes = 4;
  spec.components_per_class = 4;
  spec.dim = 2;
  spec.num_points = 2000;
  spec.covariance_scale = 0.05;
  spec.seed = 17;
  return spec;
}

Shard make_plain_shard(int id, long size, long consumed) {
  Shard s;
  s.id = id;
  s.points.cols = 1;
  for (long i = 0; i < size; ++i) {
    const double x = static_cast<double>(i);
    s.points.push_row(&x, 0);
  }
  s.consumed = consumed;
  return s;
}

}  // namespace

TEST_SUITE("datagen") {

TEST_CASE("zero covariance collapses points onto the means") {
  MixtureSpec spec = toy_spec();
  spec.covariance_scale = 0.0;
  spec.num_points = 200;
  const Dataset ds = generate_dataset(spec);
  const auto means = MixtureSpec::default_means(4, 4, 2);
  for (int r = 0; r < ds.batch.rows; ++r) {
    const auto& mean = means[ds.components[r]];
    CHECK(ds.batch.at(r, 0) == mean[0]);
    CHECK(ds.batch.at(r, 1) == mean[1]);
    CHECK(ds.batch.labels[r] == ds.components[r] / 4);
  }
}

TEST_CASE("generation is deterministic in the seed") {
  const Dataset a = generate_dataset(toy_spec());
  const Dataset b = generate_dataset(toy_spec());
  CHECK(a.batch.inputs == b.batch.inputs);
  CHECK(a.batch.labels == b.batch.labels);
  MixtureSpec other = toy_spec();
  other.seed = 18;
  CHECK(generate_dataset(other).batch.inputs != a.batch.inputs);
}

TEST_CASE("class counts stay within the binomial 3-sigma band") {
  MixtureSpec spec = toy_spec();
  spec.num_points = 10000;
  const Dataset ds = generate_dataset(spec);
  std::vector<long> counts(4, 0);
  for (int y : ds.batch.labels) ++counts[y];
  const double sigma = std::sqrt(10000 * 0.25 * 0.75);
  for (long c : counts) CHECK(std::abs(c - 2500.0) <= 3.0 * sigma);
}

TEST_CASE("iid split deals near-even disjoint chunks") {
  MixtureSpec spec = toy_spec();
  spec.num_points = 1000;
  const Dataset ds = generate_dataset(spec);
  const auto shards = split_shards(ds, 4, ShardMode::kIid, 5);
  REQUIRE(shards.size() == 4);
  for (const Shard& s : shards) CHECK(s.size() == 250);
}

TEST_CASE("k = 1 yields a single shard equal to the dataset") {
  MixtureSpec spec = toy_spec();
  spec.num_points = 64;
  const Dataset ds = generate_dataset(spec);
  const auto shards = split_shards(ds, 1, ShardMode::kByComponent, 5);
  REQUIRE(shards.size() == 1);
  CHECK(shards[0].size() == 64);
  // same multiset of rows (ordering within the shard may differ)
  auto key = [](const Batch& b, int r) {
    return std::make_tuple(b.at(r, 0), b.at(r, 1), b.labels[r]);
  };
  std::multiset<std::tuple<double, double, int>> lhs, rhs;
  for (int r = 0; r < 64; ++r) {
    lhs.insert(key(ds.batch, r));
    rhs.insert(key(shards[0].points, r));
  }
  CHECK(lhs == rhs);
}

TEST_CASE("splits partition the dataset exactly") {
  const Dataset ds = generate_dataset(toy_spec());
  for (ShardMode mode : {ShardMode::kIid, ShardMode::kByComponent}) {
    const auto shards = split_shards(ds, 4, mode, 23);
    long total = 0;
    std::multiset<std::tuple<double, double, int>> from_shards, from_dataset;
    for (const Shard& s : shards) {
      total += s.size();
      for (int r = 0; r < s.points.rows; ++r)
        from_shards.insert({s.points.at(r, 0), s.points.at(r, 1), s.points.labels[r]});
    }
    for (int r = 0; r < ds.batch.rows; ++r)
      from_dataset.insert({ds.batch.at(r, 0), ds.batch.at(r, 1), ds.batch.labels[r]});
    CHECK(total == ds.batch.rows);
    CHECK(from_shards == from_dataset);
  }
}

TEST_CASE("by_component shards have distinct majority components") {
  const Dataset ds = generate_dataset(toy_spec());
  const auto shards = split_shards(ds, 4, ShardMode::kByComponent, 23);
  std::set<int> majorities;
  for (const Shard& s : shards) {
    std::map<int, int> counts;
    for (int c : s.components) ++counts[c];
    int best = -1, best_count = -1;
    for (const auto& [comp, count] : counts)
      if (count > best_count) { best = comp; best_count = count; }
    majorities.insert(best);
  }
  CHECK(majorities.size() == 4);
}

TEST_CASE("split rejects more shards than rows") {
  MixtureSpec spec = toy_spec();
  spec.num_points = 3;
  const Dataset ds = generate_dataset(spec);
  CHECK_THROWS_AS(split_shards(ds, 4, ShardMode::kIid, 1), std::invalid_argument);
}

TEST_CASE("under-sampling weights match the worked examples") {
  SUBCASE("consumed skew shifts all mass to the lagging shard") {
    std::vector<Shard> shards{make_plain_shard(0, 10, 3), make_plain_shard(1, 10, 1)};
    const auto p = shard_sampling_probs(shards);
    CHECK(p[0] == doctest::Approx(0.0));
    CHECK(p[1] == doctest::Approx(1.0));
  }
  SUBCASE("untouched shards fall back to size-proportional") {
    std::vector<Shard> shards{make_plain_shard(0, 10, 0), make_plain_shard(1, 10, 0)};
    const auto p = shard_sampling_probs(shards);
    CHECK(p[0] == doctest::Approx(0.5));
    CHECK(p[1] == doctest::Approx(0.5));
  }
  SUBCASE("size skew favors the big shard") {
    std::vector<Shard> shards{make_plain_shard(0, 30, 10), make_plain_shard(1, 10, 10)};
    const auto p = shard_sampling_probs(shards);
    CHECK(p[0] == doctest::Approx(1.0));
    CHECK(p[1] == doctest::Approx(0.0));
  }
}

TEST_CASE("sampling probabilities are a distribution under fuzzing") {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(6));
    std::vector<Shard> shards;
    for (int i = 0; i < k; ++i)
      shards.push_back(make_plain_shard(i, 1 + static_cast<long>(rng.below(100)),
                                        static_cast<long>(rng.below(50))));
    const auto p = shard_sampling_probs(shards);
    double sum = 0.0;
    for (double x : p) {
      CHECK(x >= 0.0);
      sum += x;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("next_batch repeats a single-row shard and counts consumption") {
  Shard s = make_plain_shard(0, 1, 0);
  Rng rng(2);
  const Batch b = next_batch(s, 3, rng);
  CHECK(b.rows == 3);
  for (int r = 0; r < 3; ++r) CHECK(b.at(r, 0) == 0.0);
  CHECK(s.consumed == 3);

  Shard big = make_plain_shard(1, 100, 0);
  next_batch(big, 128, rng);
  CHECK(big.consumed == 128);
}

TEST_CASE("distinct rng states draw distinct batches") {
  Shard s = make_plain_shard(0, 1000, 0);
  Rng a(100), b(200);
  const Batch ba = next_batch(s, 16, a);
  const Batch bb = next_batch(s, 16, b);
  CHECK(ba.inputs != bb.inputs);
}

TEST_CASE("next_batch rejects empty shards and zero batches") {
  Shard s = make_plain_shard(0, 2, 0);
  Rng rng(1);
  CHECK_THROWS_AS(next_batch(s, 0, rng), std::invalid_argument);
  Shard empty;
  empty.points.cols = 1;
  CHECK_THROWS_AS(next_batch(empty, 4, rng), std::invalid_argument);
}

TEST_CASE("the sampling loop balances consumption toward size fractions") {
  Rng rng(7);
  const std::vector<std::vector<long>> size_sets = {
      {100, 1000}, {100, 250, 500, 1000}, {300, 300, 300, 300}, {150, 450, 900, 1500}};
  for (const auto& sizes : size_sets) {
    std::vector<Shard> shards;
    long total_size = 0;
    for (size_t i = 0; i < sizes.size(); ++i) {
      shards.push_back(make_plain_shard(static_cast<int>(i), sizes[i], 0));
      total_size += sizes[i];
    }
    for (int it = 0; it < 10000; ++it) {
      const int pick = sample_shard(shards, rng);
      shards[pick].consumed += 16;  // equal batch size per draw
    }
    long total_consumed = 0;
    for (const Shard& s : shards) total_consumed += s.consumed;
    for (const Shard& s : shards) {
      const double frac = static_cast<double>(s.consumed) / total_consumed;
      const double target = static_cast<double>(s.size()) / total_size;
      CHECK(std::abs(frac - target) < 0.02);
    }
  }
}

}  // TEST_SUITE
