#include "taskinfo/tv.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "taskinfo/quad.hpp"
#include "taskinfo/special.hpp"

namespace taskinfo::tv {

namespace {

double partial_sum(const std::vector<double>& values) {
  double sum = 0.0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    sum += std::abs(values[i] - values[i - 1]);
  }
  return sum;
}

/// Density values of exp(log_unnormalized - log_norm) on n equally spaced
/// nodes over [lo, hi].
std::vector<double> eval_density(const std::function<double(double)>& log_unnorm,
                                 double log_norm, double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    double l = log_unnorm(x);
    v[static_cast<std::size_t>(i)] = std::isfinite(l) ? std::exp(l - log_norm) : 0.0;
  }
  return v;
}

}  // namespace

TvEstimate tv_analytic(const models::PosteriorFamily& posterior) {
  TvEstimate est;
  est.method = "analytic";
  if (const auto* n = std::get_if<models::NormalPosterior>(&posterior.family)) {
    est.value = kSqrtTwoOverPi / n->sd;
    return est;
  }
  if (const auto* e = std::get_if<models::ExponentialPosterior>(&posterior.family)) {
    est.value = e->rate;
    return est;
  }
  if (std::holds_alternative<models::MvnPosterior>(posterior.family)) {
    throw std::invalid_argument(
        "tv_analytic: multivariate posterior needs a direction, use tv_directional");
  }
  throw std::invalid_argument("tv_analytic: no closed form for grid densities, use tv_grid");
}

TvEstimate tv_unimodal(const models::PosteriorFamily& posterior) {
  if (!posterior.is_scalar()) {
    throw std::invalid_argument("tv_unimodal: family is not scalar");
  }
  models::Interval sup = posterior.support();
  // Probe window for mode search and the bimodality scan.
  double lo = sup.lo, hi = sup.hi;
  if (const auto* n = std::get_if<models::NormalPosterior>(&posterior.family)) {
    lo = n->mean - 10.0 * n->sd;
    hi = n->mean + 10.0 * n->sd;
  } else if (const auto* e = std::get_if<models::ExponentialPosterior>(&posterior.family)) {
    lo = 0.0;
    hi = 20.0 / e->rate;
  }
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("tv_unimodal: unbounded support without a known family");
  }

  // 4096-node scan: find the global maximum and reject separated rivals.
  const int n_probe = 4096;
  std::vector<double> px(n_probe), pv(n_probe);
  for (int i = 0; i < n_probe; ++i) {
    px[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / (n_probe - 1);
    pv[static_cast<std::size_t>(i)] = posterior.density(px[static_cast<std::size_t>(i)]);
  }
  double peak = *std::max_element(pv.begin(), pv.end());
  int maxima = 0;
  const double prominence = 1e-6 * peak;
  for (int i = 1; i + 1 < n_probe; ++i) {
    std::size_t k = static_cast<std::size_t>(i);
    if (pv[k] > pv[k - 1] + prominence && pv[k] > pv[k + 1] + prominence &&
        pv[k] > 0.01 * peak) {
      ++maxima;
    }
  }
  bool boundary_peak = pv.front() >= peak || pv.back() >= peak;
  if (maxima + (boundary_peak ? 1 : 0) > 1) {
    throw std::invalid_argument("tv_unimodal: density has separated local maxima, use tv_grid");
  }

  double mode;
  if (posterior.mode) {
    mode = *posterior.mode;
  } else {
    std::size_t arg = static_cast<std::size_t>(
        std::max_element(pv.begin(), pv.end()) - pv.begin());
    double a = px[arg > 0 ? arg - 1 : arg];
    double b = px[arg + 1 < px.size() ? arg + 1 : arg];
    mode = golden_section_max([&posterior](double x) { return posterior.density(x); }, a,
                              b, 1e-10);
  }

  // TV of a unimodal density over [a, b]: rise from p(a) to the modal value
  // and fall to p(b).  Interior modes with vanishing tails give 2 p(mode);
  // a boundary mode keeps only its descending side.
  double p_lo = std::isfinite(sup.lo) ? posterior.density(sup.lo) : 0.0;
  double p_hi = std::isfinite(sup.hi) ? posterior.density(sup.hi) : 0.0;
  TvEstimate est;
  est.method = "unimodal";
  est.value = 2.0 * posterior.density(mode) - p_lo - p_hi;
  return est;
}

TvEstimate tv_grid(const models::PosteriorFamily& posterior) {
  const auto* grid = std::get_if<models::GridDensity>(&posterior.family);
  if (grid == nullptr) {
    throw std::invalid_argument("tv_grid: family does not carry a grid density");
  }
  if (grid->nodes.size() < 3) {
    throw std::invalid_argument("tv_grid: need at least 3 nodes");
  }

  TvEstimate est;
  est.method = "grid";
  if (!grid->log_unnormalized) {
    // Fixed tabulated density; the partial sum over the given partition is
    // all the information there is.
    est.value = partial_sum(grid->values);
    est.grid_nodes = static_cast<int>(grid->nodes.size());
    est.refinement.emplace_back(est.grid_nodes.value(), est.value);
    return est;
  }

  const double lo = grid->nodes.front();
  const double hi = grid->nodes.back();
  const int budget = 1 << 20;
  int n = static_cast<int>(grid->nodes.size());
  double prev = -1.0;
  double value = 0.0;
  bool converged = false;
  while (true) {
    std::vector<double> values =
        eval_density(grid->log_unnormalized, grid->log_norm, lo, hi, n);
    value = partial_sum(values);
    est.refinement.emplace_back(n, value);
    est.grid_nodes = n;
    if (prev >= 0.0 && std::abs(value - prev) <= 1e-6 * std::max(std::abs(value), 1e-300)) {
      converged = true;
      break;
    }
    prev = value;
    if (n >= budget) break;
    n = 2 * n - 1;  // dyadic refinement keeps existing nodes
    if (n > budget) n = budget;
  }
  est.value = value;
  est.converged = converged;
  return est;
}

TvAverage tv_average(const models::ScalarModel& model, const McOptions& opts,
                     int inner_grid_nodes) {
  TvAverage out;

  // Posterior route.
  if (model.posterior_tv) {
    // TV independent of the data: exact value, zero standard error.
    out.posterior_route.method = "analytic";
    out.posterior_route.value = *model.posterior_tv;
    out.posterior_route.std_error = 0.0;
  } else {
    BlockStats stats = mc_run(opts, 1, [&](Rng& rng, std::span<double> o) {
      double theta = model.sample_prior(rng);
      Eigen::VectorXd g = model.sample_cond(theta, rng);
      try {
        models::PosteriorFamily post =
            model.posterior ? model.posterior(g)
                            : models::posterior_density_grid(model, g, inner_grid_nodes);
        if (const auto* grid = std::get_if<models::GridDensity>(&post.family)) {
          // Single-level partition sum; the grid is already at the
          // requested resolution and refinement is tested elsewhere.
          o[0] = partial_sum(grid->values);
        } else {
          o[0] = tv_analytic(post).value;
        }
      } catch (const std::exception&) {
        return false;
      }
      return std::isfinite(o[0]);
    });
    if (static_cast<double>(stats.rejected()) >
        0.01 * static_cast<double>(stats.samples() + stats.rejected())) {
      throw std::runtime_error("tv_average: more than 1% of per-sample posteriors failed");
    }
    out.posterior_route.method = "monte_carlo";
    out.posterior_route.value = stats.mean(0);
    out.posterior_route.std_error =
        stats.jackknife_se([](const Eigen::VectorXd& m) { return m[0]; });
    out.posterior_route.grid_nodes = inner_grid_nodes;
  }

  // Score route: <<|t'|>> over theta ~ prior, g ~ cond.
  McOptions score_opts = opts.derived(1);
  BlockStats stats = mc_run(score_opts, 1, [&](Rng& rng, std::span<double> o) {
    double theta = model.sample_prior(rng);
    Eigen::VectorXd g = model.sample_cond(theta, rng);
    double t_prime = model.cond_log_deriv(g, theta) + model.prior_log_deriv(theta);
    if (!std::isfinite(t_prime)) return false;
    o[0] = std::abs(t_prime);
    return true;
  });
  out.score_route.method = "monte_carlo";
  out.score_route.value = stats.mean(0);
  out.score_route.std_error =
      stats.jackknife_se([](const Eigen::VectorXd& m) { return m[0]; });
  return out;
}

TvEstimate tv_directional(const models::MvnPosterior& posterior,
                          const Eigen::VectorXd& u) {
  if (u.size() != posterior.precision.rows()) {
    throw std::invalid_argument("tv_directional: direction dimension mismatch");
  }
  if (std::abs(u.norm() - 1.0) > 1e-10) {
    throw std::invalid_argument("tv_directional: u must be a unit vector");
  }
  TvEstimate est;
  est.method = "analytic";
  est.value = std::sqrt(2.0 / kPi * u.dot(posterior.precision * u));
  return est;
}

}  // namespace taskinfo::tv
