#include "asgd/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace asgd {

void MixtureSpec::validate() const {
  if (num_classes < 2) throw std::invalid_argument("MixtureSpec: num_classes must be >= 2");
  if (components_per_class < 1)
    throw std::invalid_argument("MixtureSpec: components_per_class must be >= 1");
  if (dim < 1) throw std::invalid_argument("MixtureSpec: dim must be >= 1");
  if (num_points < 1) throw std::invalid_argument("MixtureSpec: num_points must be >= 1");
  if (covariance_scale < 0.0)
    throw std::invalid_argument("MixtureSpec: covariance_scale must be >= 0");
  if (!means.empty()) {
    if (means.size() != static_cast<size_t>(num_classes) * components_per_class)
      throw std::invalid_argument("MixtureSpec: means count must equal classes * components");
    for (const auto& m : means)
      if (m.size() != static_cast<size_t>(dim))
        throw std::invalid_argument("MixtureSpec: mean dimension mismatch");
  }
}

std::vector<std::vector<double>> MixtureSpec::default_means(int num_classes,
                                                            int components_per_class,
                                                            int dim) {
  const int total = num_classes * components_per_class;
  const double two_pi = 6.283185307179586476925286766559;
  std::vector<std::vector<double>> means(total, std::vector<double>(dim, 0.0));
  for (int c = 0; c < num_classes; ++c) {
    for (int j = 0; j < components_per_class; ++j) {
      const double angle = two_pi * (j * num_classes + c) / total;
      auto& m = means[static_cast<size_t>(c) * components_per_class + j];
      m[0] = 2.0 * std::cos(angle);
      if (dim > 1) m[1] = 2.0 * std::sin(angle);
    }
  }
  return means;
}

Dataset generate_dataset(const MixtureSpec& spec) {
  spec.validate();
  auto means = spec.means;
  if (means.empty())
    means = MixtureSpec::default_means(spec.num_classes, spec.components_per_class, spec.dim);

  Dataset ds;
  ds.batch.cols = spec.dim;
  ds.batch.inputs.reserve(static_cast<size_t>(spec.num_points) * spec.dim);
  ds.batch.labels.reserve(spec.num_points);
  ds.components.reserve(spec.num_points);

  Rng rng(spec.seed);
  const double sigma = std::sqrt(spec.covariance_scale);
  std::vector<double> point(spec.dim);
  for (long i = 0; i < spec.num_points; ++i) {
    const int cls = static_cast<int>(rng.below(spec.num_classes));
    const int comp = static_cast<int>(rng.below(spec.components_per_class));
    const auto& mean = means[static_cast<size_t>(cls) * spec.components_per_class + comp];
    for (int d = 0; d < spec.dim; ++d) point[d] = mean[d] + sigma * rng.normal();
    ds.batch.push_row(point.data(), cls);
    ds.components.push_back(cls * spec.components_per_class + comp);
  }
  return ds;
}

std::vector<Shard> split_shards(const Dataset& dataset, int k, ShardMode mode,
                                std::uint64_t seed) {
  const long rows = dataset.batch.rows;
  if (k < 1) throw std::invalid_argument("split_shards: k must be >= 1");
  if (rows < k) throw std::invalid_argument("split_shards: fewer rows than shards");
  if (dataset.components.size() != static_cast<size_t>(rows))
    throw std::invalid_argument("split_shards: component tags missing");

  std::vector<int> assignment(rows, 0);
  Rng rng(seed);
  if (mode == ShardMode::kIid) {
    std::vector<long> order(rows);
    std::iota(order.begin(), order.end(), 0L);
    for (long i = rows - 1; i > 0; --i) {
      const long j = static_cast<long>(rng.below(static_cast<std::uint64_t>(i) + 1));
      std::swap(order[i], order[j]);
    }
    // contiguous chunks of size rows/k, remainder spread over the first shards
    long pos = 0;
    for (int s = 0; s < k; ++s) {
      const long count = rows / k + (s < rows % k ? 1 : 0);
      for (long i = 0; i < count; ++i) assignment[order[pos++]] = s;
    }
  } else {
    int num_components = 0;
    for (int c : dataset.components) num_components = std::max(num_components, c + 1);
    const double home_bias = 0.8;
    for (long i = 0; i < rows; ++i) {
      const int home = static_cast<int>(static_cast<long>(dataset.components[i]) * k /
                                        num_components);
      if (rng.uniform() < home_bias)
        assignment[i] = std::min(home, k - 1);
      else
        assignment[i] = static_cast<int>(rng.below(k));
    }
    // degenerate draws can leave a shard empty; reassign surplus rows round-robin
    std::vector<long> counts(k, 0);
    for (int a : assignment) ++counts[a];
    for (int s = 0; s < k; ++s) {
      while (counts[s] == 0) {
        const int donor = static_cast<int>(std::max_element(counts.begin(), counts.end()) -
                                           counts.begin());
        for (long i = 0; i < rows; ++i) {
          if (assignment[i] == donor) {
            assignment[i] = s;
            --counts[donor];
            ++counts[s];
            break;
          }
        }
      }
    }
  }

  std::vector<Shard> shards(k);
  for (int s = 0; s < k; ++s) {
    shards[s].id = s;
    shards[s].points.cols = dataset.batch.cols;
  }
  for (long i = 0; i < rows; ++i) {
    Shard& shard = shards[assignment[i]];
    shard.points.push_row(dataset.batch.inputs.data() + i * dataset.batch.cols,
                          dataset.batch.labels[i]);
    shard.components.push_back(dataset.components[i]);
  }
  return shards;
}

std::vector<double> shard_sampling_probs(const std::vector<Shard>& shards) {
  if (shards.empty()) throw std::invalid_argument("shard_sampling_probs: no shards");
  double total_size = 0.0, total_consumed = 0.0;
  for (const Shard& s : shards) {
    total_size += static_cast<double>(s.size());
    total_consumed += static_cast<double>(s.consumed);
  }
  std::vector<double> probs(shards.size(), 0.0);
  double weight_sum = 0.0;
  if (total_consumed > 0.0) {
    for (size_t i = 0; i < shards.size(); ++i) {
      const double target = shards[i].size() / total_size;
      const double actual = shards[i].consumed / total_consumed;
      probs[i] = std::max(target - actual, 0.0);
      weight_sum += probs[i];
    }
  }
  if (weight_sum <= 0.0) {
    // size-proportional fallback: the fixed point of the balancing rule
    for (size_t i = 0; i < shards.size(); ++i) probs[i] = shards[i].size() / total_size;
    weight_sum = 1.0;
  }
  for (double& p : probs) p /= weight_sum;
  return probs;
}

int sample_shard(const std::vector<Shard>& shards, Rng& rng) {
  const auto probs = shard_sampling_probs(shards);
  const double u = rng.uniform();
  double cum = 0.0;
  for (size_t i = 0; i < probs.size(); ++i) {
    cum += probs[i];
    if (u < cum) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;  // guard against rounding at u ~ 1
}

Batch next_batch(Shard& shard, int batch_size, Rng& rng) {
  if (batch_size < 1) throw std::invalid_argument("next_batch: batch_size must be >= 1");
  if (shard.size() == 0) throw std::invalid_argument("next_batch: shard is empty");
  Batch batch;
  batch.cols = shard.points.cols;
  batch.inputs.reserve(static_cast<size_t>(batch_size) * batch.cols);
  batch.labels.reserve(batch_size);
  for (int i = 0; i < batch_size; ++i) {
    const long r = static_cast<long>(rng.below(static_cast<std::uint64_t>(shard.size())));
    batch.push_row(shard.points.inputs.data() + r * batch.cols, shard.points.labels[r]);
  }
  shard.consumed += batch_size;
  return batch;
}

}  // namespace asgd
