// Deterministic parallel Monte Carlo.
//
// Work is split into fixed chunks of 4096 samples.  Chunk c draws from an
// independent substream derived from (seed, c) and accumulates into its own
// slot, and slots are reduced in chunk order afterwards, so the result is a
// pure function of (n, seed) regardless of worker count.  Chunks fold into
// (up to) 20 contiguous blocks for jackknife standard errors.
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "taskinfo/rng.hpp"

namespace taskinfo {

inline constexpr std::uint64_t kMcChunkSize = 4096;
inline constexpr int kMcBlocks = 20;

struct McOptions {
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  int jobs = 0;  // 0 = pick a default from the hardware

  McOptions with_seed(std::uint64_t s) const {
    McOptions o = *this;
    o.seed = s;
    return o;
  }
  /// Substream options for a named sub-estimate.
  McOptions derived(std::uint64_t stream) const {
    return with_seed(Rng::derive(seed, 0x5eedULL + stream));
  }
};

/// Per-sample kernel: fill `out` (fixed width) from the stream; return
/// false to reject the draw (rejections are counted, not resampled).
using SampleKernel = std::function<bool(Rng&, std::span<double>)>;

/// Block-level sufficient statistics of a multi-output MC run.
class BlockStats {
 public:
  BlockStats(int blocks, int width);

  int width() const { return width_; }
  int blocks() const { return static_cast<int>(block_n_.size()); }
  std::uint64_t samples() const { return total_n_; }
  std::uint64_t rejected() const { return rejected_; }

  double mean(int dim) const;
  /// Classical standard error of the mean of output `dim`.
  double se_mean(int dim) const;
  /// Statistic as a smooth function of the vector of output means.
  double statistic(const std::function<double(const Eigen::VectorXd&)>& f) const;
  /// Delete-one-block jackknife standard error of `statistic`.
  double jackknife_se(const std::function<double(const Eigen::VectorXd&)>& f) const;

  // Accumulation interface used by the runner.
  void add_block(int block, const Eigen::VectorXd& sums,
                 const Eigen::VectorXd& sums_sq, std::uint64_t n,
                 std::uint64_t rejected);

 private:
  int width_;
  Eigen::MatrixXd block_sums_;     // blocks x width
  Eigen::MatrixXd block_sums_sq_;  // blocks x width
  std::vector<std::uint64_t> block_n_;
  std::uint64_t total_n_ = 0;
  std::uint64_t rejected_ = 0;
};

/// Run the kernel for opts.samples draws; deterministic in (samples, seed).
BlockStats mc_run(const McOptions& opts, int width, const SampleKernel& kernel);

/// Default worker count when McOptions::jobs == 0.
int mc_default_jobs();

}  // namespace taskinfo
