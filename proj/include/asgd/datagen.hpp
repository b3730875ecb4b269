#pragma once

#include <cstdint>
#include <vector>

#include "asgd/core.hpp"
#include "asgd/rng.hpp"

namespace asgd {

// Mixture-of-mixtures Gaussian classification task: each class owns
// components_per_class isotropic Gaussians.
struct MixtureSpec {
  int num_classes = 4;
  int components_per_class = 4;
  int dim = 2;
  long num_points = 8192;
  std::vector<std::vector<double>> means;  // num_classes * components_per_class rows
  double covariance_scale = 0.05;
  std::uint64_t seed = 1;

  void validate() const;
  // Interleaved pinwheel layout: component j of class c sits on a circle of
  // radius 2 at angle 2*pi*(j*C + c)/(C*M); extra dims are zero. Classes are
  // angularly interleaved, so no class is linearly separable from the rest.
  static std::vector<std::vector<double>> default_means(int num_classes,
                                                        int components_per_class,
                                                        int dim);
};

// Generated points plus the mixture component each point was drawn from.
struct Dataset {
  Batch batch;
  std::vector<int> components;
};

struct Shard {
  int id = 0;
  Batch points;
  std::vector<int> components;
  long consumed = 0;     // data points drawn for training so far
  long steps_taken = 0;  // local optimizer steps taken on this shard

  long size() const { return points.rows; }
};

enum class ShardMode { kIid, kByComponent };

Dataset generate_dataset(const MixtureSpec& spec);

// Partitions the dataset into k shards. Iid mode shuffles and deals near-even
// contiguous chunks. ByComponent sends each point to its component's home
// shard (components split class-major into k contiguous blocks) with
// probability 0.8, else to a uniformly random shard.
std::vector<Shard> split_shards(const Dataset& dataset, int k, ShardMode mode,
                                std::uint64_t seed);

// Under-sampling weights: p_i ~ max(|D_i|/sum|D| - n_i/sum n, 0), normalized.
// Falls back to size-proportional when sum n == 0 or all weights vanish.
std::vector<double> shard_sampling_probs(const std::vector<Shard>& shards);

int sample_shard(const std::vector<Shard>& shards, Rng& rng);

// batch_size rows drawn with replacement; bumps shard.consumed by batch_size.
Batch next_batch(Shard& shard, int batch_size, Rng& rng);

}  // namespace asgd
