#include "taskinfo/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "taskinfo/quad.hpp"
#include "taskinfo/special.hpp"

namespace taskinfo::fisher {

namespace {

constexpr double kMaxRejectFraction = 0.01;

FisherResult analytic_scalar(double value) {
  FisherResult r;
  r.value = value;
  r.method = "analytic";
  return r;
}

void require_reject_fraction(const BlockStats& stats, const char* what) {
  const double total = static_cast<double>(stats.samples() + stats.rejected());
  if (total > 0.0 && static_cast<double>(stats.rejected()) > kMaxRejectFraction * total) {
    throw std::runtime_error(std::string(what) + ": more than 1% of samples rejected (" +
                             std::to_string(stats.rejected()) + " of " +
                             std::to_string(static_cast<std::uint64_t>(total)) + ")");
  }
}

FisherResult from_mean_stat(const BlockStats& stats, const McOptions& opts, int dim) {
  FisherResult r;
  r.value = stats.mean(dim);
  r.method = "monte_carlo";
  double se = stats.jackknife_se([dim](const Eigen::VectorXd& m) { return m[dim]; });
  if (se == 0.0) se = stats.se_mean(dim);
  r.std_error = se;
  r.samples = stats.samples();
  r.seed = opts.seed;
  return r;
}

/// Posterior log-density derivative in theta for a scalar family.
double family_score(const models::PosteriorFamily& family, double theta) {
  if (const auto* n = std::get_if<models::NormalPosterior>(&family.family)) {
    return -(theta - n->mean) / (n->sd * n->sd);
  }
  if (const auto* e = std::get_if<models::ExponentialPosterior>(&family.family)) {
    if (theta < 0.0) return std::numeric_limits<double>::quiet_NaN();
    return -e->rate;
  }
  if (const auto* grid = std::get_if<models::GridDensity>(&family.family)) {
    // Central difference of the tabulated log-density at the nearest node;
    // NaN near the grid boundary so callers can exclude and report.
    const auto& nodes = grid->nodes;
    const auto& values = grid->values;
    auto it = std::lower_bound(nodes.begin(), nodes.end(), theta);
    std::size_t i = static_cast<std::size_t>(it - nodes.begin());
    if (i > 0 && (i == nodes.size() || theta - nodes[i - 1] < nodes[i] - theta)) --i;
    if (i < 1 || i + 1 >= nodes.size()) return std::numeric_limits<double>::quiet_NaN();
    double v_lo = values[i - 1], v_hi = values[i + 1];
    if (!(v_lo > 0.0) || !(v_hi > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return (std::log(v_hi) - std::log(v_lo)) / (nodes[i + 1] - nodes[i - 1]);
  }
  throw std::domain_error("family_score: family is not scalar");
}

}  // namespace

double family_fisher(const models::PosteriorFamily& family) {
  if (const auto* n = std::get_if<models::NormalPosterior>(&family.family)) {
    return 1.0 / (n->sd * n->sd);
  }
  if (const auto* e = std::get_if<models::ExponentialPosterior>(&family.family)) {
    return e->rate * e->rate;
  }
  if (std::get_if<models::GridDensity>(&family.family) != nullptr) {
    const auto& grid = std::get<models::GridDensity>(family.family);
    // Quadrature of (d ln p)^2 p over the grid interior.
    const auto& nodes = grid.nodes;
    const auto& values = grid.values;
    std::vector<double> integrand(nodes.size(), 0.0);
    for (std::size_t i = 1; i + 1 < nodes.size(); ++i) {
      if (!(values[i] > 0.0) || !(values[i + 1] > 0.0) || !(values[i - 1] > 0.0)) continue;
      double score = (std::log(values[i + 1]) - std::log(values[i - 1])) /
                     (nodes[i + 1] - nodes[i - 1]);
      integrand[i] = score * score * values[i];
    }
    return trapezoid(nodes, integrand);
  }
  throw std::domain_error("family_fisher: family is not scalar");
}

FisherResult fisher_information(const models::ScalarModel& model, double theta,
                                const McOptions& opts, Method method) {
  if (!model.support.contains(theta)) {
    throw std::domain_error("fisher_information: theta outside the model support");
  }
  if (method != Method::kMonteCarlo && model.conditional_fisher) {
    return analytic_scalar(model.conditional_fisher(theta));
  }
  if (method == Method::kAnalytic) {
    throw std::invalid_argument("fisher_information: model has no analytic form");
  }
  if (opts.samples < 1) throw std::invalid_argument("fisher_information: n_samples >= 1");
  BlockStats stats = mc_run(opts, 1, [&](Rng& rng, std::span<double> out) {
    Eigen::VectorXd g = model.sample_cond(theta, rng);
    double score = model.cond_log_deriv(g, theta);
    if (!std::isfinite(score)) return false;
    out[0] = score * score;
    return true;
  });
  require_reject_fraction(stats, "fisher_information");
  return from_mean_stat(stats, opts, 0);
}

FisherResult fisher_matrix(const models::VectorModel& model,
                           const Eigen::VectorXd& theta, const McOptions& opts,
                           Method method) {
  const int p = model.param_dim;
  if (method != Method::kMonteCarlo && model.conditional_fim) {
    FisherResult r;
    r.matrix = model.conditional_fim(theta);
    r.value = r.matrix.trace();
    r.method = "analytic";
    return r;
  }
  if (method == Method::kAnalytic) {
    throw std::invalid_argument("fisher_matrix: model has no analytic form");
  }
  // Accumulate the upper triangle of the score outer product; mirroring
  // afterwards makes the estimate symmetric by construction.
  const int width = p * (p + 1) / 2;
  BlockStats stats = mc_run(opts, width, [&](Rng& rng, std::span<double> out) {
    Eigen::VectorXd g = model.sample_cond(theta, rng);
    Eigen::VectorXd score = model.cond_log_grad(g, theta);
    if (!score.allFinite()) return false;
    int k = 0;
    for (int i = 0; i < p; ++i)
      for (int j = i; j < p; ++j) out[k++] = score[i] * score[j];
    return true;
  });
  require_reject_fraction(stats, "fisher_matrix");
  FisherResult r;
  r.matrix = Eigen::MatrixXd::Zero(p, p);
  double se_max = 0.0;
  int k = 0;
  for (int i = 0; i < p; ++i) {
    for (int j = i; j < p; ++j) {
      const int dim = k++;
      r.matrix(i, j) = stats.mean(dim);
      r.matrix(j, i) = r.matrix(i, j);
      double se = stats.jackknife_se([dim](const Eigen::VectorXd& m) { return m[dim]; });
      se_max = std::max(se_max, se);
    }
  }
  r.value = r.matrix.trace();
  r.method = "monte_carlo";
  r.std_error = se_max;
  r.samples = stats.samples();
  r.seed = opts.seed;
  return r;
}

FisherResult bayesian_fi_prior_form(const models::ScalarModel& model,
                                    const McOptions& opts, Method method) {
  if (method != Method::kMonteCarlo && model.bayes_fisher) {
    return analytic_scalar(*model.bayes_fisher);
  }
  if (method == Method::kAnalytic) {
    throw std::invalid_argument("bayesian_fi_prior_form: model has no analytic form");
  }
  BlockStats stats = mc_run(opts, 1, [&](Rng& rng, std::span<double> out) {
    double theta = model.sample_prior(rng);
    double prior_score = model.prior_log_deriv(theta);
    if (!std::isfinite(prior_score)) return false;
    Eigen::VectorXd g = model.sample_cond(theta, rng);
    double cond_score = model.cond_log_deriv(g, theta);
    if (!std::isfinite(cond_score)) return false;
    out[0] = cond_score * cond_score + prior_score * prior_score;
    return true;
  });
  require_reject_fraction(stats, "bayesian_fi_prior_form");
  return from_mean_stat(stats, opts, 0);
}

FisherResult bayesian_fi_posterior_form(const models::ScalarModel& model,
                                        const McOptions& opts, Method method) {
  if (method != Method::kMonteCarlo && model.bayes_fisher) {
    return analytic_scalar(*model.bayes_fisher);
  }
  if (method == Method::kAnalytic) {
    throw std::invalid_argument("bayesian_fi_posterior_form: model has no analytic form");
  }
  std::uint64_t boundary_excluded = 0;
  BlockStats stats = mc_run(opts, 1, [&](Rng& rng, std::span<double> out) {
    double theta = model.sample_prior(rng);
    Eigen::VectorXd g = model.sample_cond(theta, rng);
    models::PosteriorFamily post = models::posterior_density(model, g);
    double score = family_score(post, theta);
    if (!std::isfinite(score)) return false;
    out[0] = score * score;
    return true;
  });
  boundary_excluded = stats.rejected();
  require_reject_fraction(stats, "bayesian_fi_posterior_form");
  FisherResult r = from_mean_stat(stats, opts, 0);
  r.boundary_prior = boundary_excluded > 0 && model.boundary_prior;
  return r;
}

FisherResult bayesian_fi_var_tprime(const models::ScalarModel& model,
                                    const McOptions& opts) {
  // Width 2: t' and t'^2.  The information value is the second moment;
  // it coincides with the variance exactly when the score mean vanishes.
  BlockStats stats = mc_run(opts, 2, [&](Rng& rng, std::span<double> out) {
    double theta = model.sample_prior(rng);
    double prior_score = model.prior_log_deriv(theta);
    Eigen::VectorXd g = model.sample_cond(theta, rng);
    double cond_score = model.cond_log_deriv(g, theta);
    double t_prime = cond_score + prior_score;
    if (!std::isfinite(t_prime)) return false;
    out[0] = t_prime;
    out[1] = t_prime * t_prime;
    return true;
  });
  require_reject_fraction(stats, "bayesian_fi_var_tprime");
  FisherResult r;
  r.value = stats.mean(1);
  r.method = "monte_carlo";
  r.std_error = stats.jackknife_se([](const Eigen::VectorXd& m) { return m[1]; });
  r.mean_tprime = stats.mean(0);
  r.mean_tprime_se = stats.se_mean(0);
  r.samples = stats.samples();
  r.seed = opts.seed;
  r.boundary_prior = model.boundary_prior;
  return r;
}

FisherResult bayesian_fim(const models::VectorModel& model, const McOptions& opts,
                          Method method) {
  const int p = model.param_dim;
  if (method != Method::kMonteCarlo && model.bayes_fim) {
    FisherResult r;
    r.matrix = *model.bayes_fim;
    r.value = r.matrix.trace();
    r.method = "analytic";
    return r;
  }
  if (method == Method::kAnalytic) {
    throw std::invalid_argument("bayesian_fim: model has no analytic form");
  }
  // Posterior log-gradient equals conditional score plus prior score.
  const int width = p * (p + 1) / 2;
  BlockStats stats = mc_run(opts, width, [&](Rng& rng, std::span<double> out) {
    Eigen::VectorXd theta = model.sample_prior(rng);
    Eigen::VectorXd g = model.sample_cond(theta, rng);
    Eigen::VectorXd score = model.cond_log_grad(g, theta) + model.prior_log_grad(theta);
    if (!score.allFinite()) return false;
    int k = 0;
    for (int i = 0; i < p; ++i)
      for (int j = i; j < p; ++j) out[k++] = score[i] * score[j];
    return true;
  });
  require_reject_fraction(stats, "bayesian_fim");
  FisherResult r;
  r.matrix = Eigen::MatrixXd::Zero(p, p);
  double se_max = 0.0;
  int k = 0;
  for (int i = 0; i < p; ++i) {
    for (int j = i; j < p; ++j) {
      const int dim = k++;
      r.matrix(i, j) = stats.mean(dim);
      r.matrix(j, i) = r.matrix(i, j);
      double se = stats.jackknife_se([dim](const Eigen::VectorXd& m) { return m[dim]; });
      se_max = std::max(se_max, se);
    }
  }
  r.value = r.matrix.trace();
  r.method = "monte_carlo";
  r.std_error = se_max;
  r.samples = stats.samples();
  r.seed = opts.seed;
  return r;
}

std::vector<ScoreSample> sample_scores(const models::ScalarModel& model,
                                       std::uint64_t n, std::uint64_t seed) {
  std::vector<ScoreSample> out;
  out.reserve(n);
  Rng rng(seed);
  for (std::uint64_t i = 0; i < n; ++i) {
    double theta = model.sample_prior(rng);
    Eigen::VectorXd g = model.sample_cond(theta, rng);
    double t_prime = model.cond_log_deriv(g, theta) + model.prior_log_deriv(theta);
    out.push_back(ScoreSample{t_prime, theta, i});
  }
  return out;
}

}  // namespace taskinfo::fisher
