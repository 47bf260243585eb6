#include "taskinfo/mc.hpp"

#include <atomic>
#include <cmath>
#include <thread>

namespace taskinfo {

BlockStats::BlockStats(int blocks, int width)
    : width_(width),
      block_sums_(Eigen::MatrixXd::Zero(blocks, width)),
      block_sums_sq_(Eigen::MatrixXd::Zero(blocks, width)),
      block_n_(static_cast<std::size_t>(blocks), 0) {}

void BlockStats::add_block(int block, const Eigen::VectorXd& sums,
                           const Eigen::VectorXd& sums_sq, std::uint64_t n,
                           std::uint64_t rejected) {
  block_sums_.row(block) += sums.transpose();
  block_sums_sq_.row(block) += sums_sq.transpose();
  block_n_[static_cast<std::size_t>(block)] += n;
  total_n_ += n;
  rejected_ += rejected;
}

double BlockStats::mean(int dim) const {
  if (total_n_ == 0) throw std::runtime_error("BlockStats: no samples");
  return block_sums_.col(dim).sum() / static_cast<double>(total_n_);
}

double BlockStats::se_mean(int dim) const {
  if (total_n_ < 2) return 0.0;
  const double n = static_cast<double>(total_n_);
  const double m = mean(dim);
  double var = block_sums_sq_.col(dim).sum() / n - m * m;
  if (var < 0.0) var = 0.0;
  return std::sqrt(var / n);
}

double BlockStats::statistic(
    const std::function<double(const Eigen::VectorXd&)>& f) const {
  Eigen::VectorXd means =
      block_sums_.colwise().sum().transpose() / static_cast<double>(total_n_);
  return f(means);
}

double BlockStats::jackknife_se(
    const std::function<double(const Eigen::VectorXd&)>& f) const {
  const int b = blocks();
  int used = 0;
  for (int j = 0; j < b; ++j) {
    if (block_n_[static_cast<std::size_t>(j)] > 0) ++used;
  }
  if (used < 2) return 0.0;
  Eigen::VectorXd totals = block_sums_.colwise().sum().transpose();
  std::vector<double> loo;
  loo.reserve(static_cast<std::size_t>(used));
  for (int j = 0; j < b; ++j) {
    const std::uint64_t nj = block_n_[static_cast<std::size_t>(j)];
    if (nj == 0) continue;
    Eigen::VectorXd means =
        (totals - block_sums_.row(j).transpose()) / static_cast<double>(total_n_ - nj);
    loo.push_back(f(means));
  }
  double mean_loo = 0.0;
  for (double v : loo) mean_loo += v;
  mean_loo /= static_cast<double>(loo.size());
  double ss = 0.0;
  for (double v : loo) ss += (v - mean_loo) * (v - mean_loo);
  const double m = static_cast<double>(loo.size());
  return std::sqrt((m - 1.0) / m * ss);
}

int mc_default_jobs() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  return static_cast<int>(hw > 8 ? 8 : hw);
}

BlockStats mc_run(const McOptions& opts, int width, const SampleKernel& kernel) {
  if (opts.samples == 0) throw std::invalid_argument("mc_run: samples must be positive");
  if (width < 1) throw std::invalid_argument("mc_run: width must be positive");

  const std::uint64_t n_chunks = (opts.samples + kMcChunkSize - 1) / kMcChunkSize;
  const int n_blocks =
      static_cast<int>(n_chunks < static_cast<std::uint64_t>(kMcBlocks) ? n_chunks
                                                                        : kMcBlocks);

  struct ChunkResult {
    Eigen::VectorXd sums;
    Eigen::VectorXd sums_sq;
    std::uint64_t n = 0;
    std::uint64_t rejected = 0;
  };
  std::vector<ChunkResult> results(n_chunks);

  auto run_chunk = [&](std::uint64_t c) {
    ChunkResult& r = results[c];
    r.sums = Eigen::VectorXd::Zero(width);
    r.sums_sq = Eigen::VectorXd::Zero(width);
    const std::uint64_t begin = c * kMcChunkSize;
    const std::uint64_t count =
        std::min<std::uint64_t>(kMcChunkSize, opts.samples - begin);
    Rng rng(Rng::derive(opts.seed, c));
    std::vector<double> out(static_cast<std::size_t>(width));
    for (std::uint64_t i = 0; i < count; ++i) {
      if (!kernel(rng, out)) {
        ++r.rejected;
        continue;
      }
      ++r.n;
      for (int k = 0; k < width; ++k) {
        r.sums[k] += out[static_cast<std::size_t>(k)];
        r.sums_sq[k] += out[static_cast<std::size_t>(k)] * out[static_cast<std::size_t>(k)];
      }
    }
  };

  int jobs = opts.jobs > 0 ? opts.jobs : mc_default_jobs();
  if (jobs > static_cast<int>(n_chunks)) jobs = static_cast<int>(n_chunks);
  if (jobs <= 1) {
    for (std::uint64_t c = 0; c < n_chunks; ++c) run_chunk(c);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(jobs));
    for (int w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (;;) {
          std::uint64_t c = next.fetch_add(1);
          if (c >= n_chunks) return;
          run_chunk(c);
        }
      });
    }
    for (auto& t : workers) t.join();
  }

  // Fixed reduction order: chunks in index order into contiguous blocks.
  BlockStats stats(n_blocks, width);
  for (std::uint64_t c = 0; c < n_chunks; ++c) {
    const int block = static_cast<int>(c * static_cast<std::uint64_t>(n_blocks) / n_chunks);
    stats.add_block(block, results[c].sums, results[c].sums_sq, results[c].n,
                    results[c].rejected);
  }
  return stats;
}

}  // namespace taskinfo
