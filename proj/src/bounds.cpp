#include "taskinfo/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "taskinfo/fisher.hpp"
#include "taskinfo/observer.hpp"
#include "taskinfo/quad.hpp"
#include "taskinfo/special.hpp"
#include "taskinfo/tv.hpp"

namespace taskinfo::bounds {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t hash_config(const std::string& name, const McOptions& opts) {
  return fnv1a64(name + "|" + std::to_string(opts.seed) + "|" +
                 std::to_string(opts.samples));
}

/// Two-point Gaussian MPE at log prior odds lny and separation d.
double gaussian_pair_pe(double lny, double d, double pr0, double pr1) {
  if (pr1 == 0.0 || pr0 == 0.0) return 0.0;
  if (d == 0.0) return (lny >= 0.0) ? pr1 : pr0;  // Lambda == 1, ties to H0
  double fpf = normal_sf((lny + 0.5 * d * d) / d);
  double fnf = normal_cdf((lny - 0.5 * d * d) / d);
  return pr0 * fpf + pr1 * fnf;
}

}  // namespace

double mpe_pair_analytic(const models::ScalarModel& model, double theta0,
                         double theta1) {
  observer::HypothesisPriors priors =
      observer::hypothesis_priors(model, theta0, theta1);
  if (model.gaussian) {
    double lny = model.flat_prior
                     ? 0.0
                     : model.prior_log_density(theta0) - model.prior_log_density(theta1);
    double d = std::abs(theta1 - theta0) * std::sqrt(model.gaussian->quad);
    return gaussian_pair_pe(lny, d, priors.pr0, priors.pr1);
  }
  if (model.flat_likelihood) {
    // Lambda == 1: the observer declares H1 exactly when the threshold
    // pr(theta0)/pr(theta1) is below 1, so it always picks the a-priori
    // more likely hypothesis and errs with the smaller prior; ties go to
    // H0 and err with pr1.
    return (priors.pr1 > priors.pr0) ? priors.pr0 : priors.pr1;
  }
  throw std::invalid_argument("mpe_pair_analytic: no closed form for this model");
}

Estimator make_estimator(const models::ScalarModel& model, EstimatorKind kind,
                         double constant) {
  Estimator e;
  switch (kind) {
    case EstimatorKind::kPosteriorMean: {
      e.name = "posterior_mean";
      if (model.gaussian) {
        auto core = model.gaussian;
        e.fn = [core](const Eigen::VectorXd& g) { return core->posterior_mean(g); };
      } else if (model.posterior) {
        auto post = model.posterior;
        e.fn = [post](const Eigen::VectorXd& g) { return post(g).mean(); };
      } else {
        // Grid path: build the posterior per datum.
        models::ScalarModel copy = model;
        e.fn = [copy](const Eigen::VectorXd& g) {
          return models::posterior_density_grid(copy, g, 801).mean();
        };
      }
      break;
    }
    case EstimatorKind::kMlLinear: {
      if (!model.gaussian) {
        throw std::invalid_argument("make_estimator: ml_linear needs the Gaussian model");
      }
      e.name = "ml_linear";
      auto core = model.gaussian;
      e.fn = [core](const Eigen::VectorXd& g) { return core->ml_linear(g); };
      break;
    }
    case EstimatorKind::kConstant: {
      e.name = "constant";
      e.fn = [constant](const Eigen::VectorXd&) { return constant; };
      break;
    }
  }
  return e;
}

ValueWithSe emse(const models::ScalarModel& model, const Estimator& estimator,
                 const McOptions& opts) {
  BlockStats stats = mc_run(opts, 1, [&](Rng& rng, std::span<double> out) {
    double theta = model.sample_prior(rng);
    Eigen::VectorXd g = model.sample_cond(theta, rng);
    double err = estimator.fn(g) - theta;
    if (!std::isfinite(err)) return false;
    out[0] = err * err;
    return true;
  });
  const double total = static_cast<double>(stats.samples() + stats.rejected());
  if (static_cast<double>(stats.rejected()) > 0.001 * total) {
    throw std::runtime_error("emse: estimator returned non-finite values on more than 0.1% of draws");
  }
  ValueWithSe v;
  v.value = stats.mean(0);
  v.std_error = stats.jackknife_se([](const Eigen::VectorXd& m) { return m[0]; });
  v.samples = stats.samples();
  return v;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kHolds: return "holds";
    case Verdict::kInconclusive: return "inconclusive";
    case Verdict::kViolated: return "violated";
  }
  return "unknown";
}

BoundReport make_report(std::string name, CheckKind kind, double lhs, double lhs_se,
                        double rhs, double rhs_se, bool diagnostics_ok, double tol) {
  BoundReport r;
  r.name = std::move(name);
  r.kind = kind;
  r.lhs = lhs;
  r.lhs_se = lhs_se;
  r.rhs = rhs;
  r.rhs_se = rhs_se;
  r.slack = rhs - lhs;
  const double combined = std::sqrt(lhs_se * lhs_se + rhs_se * rhs_se);
  const double scale = std::max({std::abs(lhs), std::abs(rhs), 1.0});
  const double gate = std::max(3.0 * combined, tol * scale);
  if (!diagnostics_ok) {
    r.verdict = Verdict::kInconclusive;
  } else if (kind == CheckKind::kInequality) {
    r.verdict = (r.slack >= -gate) ? Verdict::kHolds : Verdict::kViolated;
  } else {
    r.verdict = (std::abs(r.slack) <= gate) ? Verdict::kHolds : Verdict::kViolated;
  }
  return r;
}

BoundReport van_trees_check(const models::ScalarModel& model,
                            const Estimator& estimator, const McOptions& opts) {
  double f, f_se = 0.0;
  if (model.bayes_fisher) {
    f = *model.bayes_fisher;
  } else {
    fisher::FisherResult fr = fisher::bayesian_fi_prior_form(model, opts.derived(11));
    f = fr.value;
    f_se = fr.std_error.value_or(0.0);
  }
  ValueWithSe mse = emse(model, estimator, opts.derived(12));
  // lhs = 1/F, propagated SE.
  double lhs = 1.0 / f;
  double lhs_se = f_se / (f * f);
  BoundReport r = make_report("van_trees[" + estimator.name + "]",
                              CheckKind::kInequality, lhs, lhs_se, mse.value,
                              mse.std_error);
  r.config_hash = hash_config(r.name, opts);
  return r;
}

// ---------------------------------------------------------------------------
// Ziv-Zakai right side

namespace {

double zz_pass(const models::ScalarModel& model, int n_theta, int n_delta) {
  const double sp = model.posterior_sd.value_or(model.prior_scale);
  const double trunc = 8.0 * sp;
  QuadRule inner = gauss_legendre(n_delta);

  auto inner_integral = [&](double theta) {
    // int P_e(theta, t) |t - theta| dt over [theta - T, theta + T], split
    // at the kink.
    double sum = 0.0;
    for (int side = 0; side < 2; ++side) {
      double a = side == 0 ? theta - trunc : theta;
      double b = side == 0 ? theta : theta + trunc;
      double half = 0.5 * (b - a), mid = 0.5 * (a + b);
      for (int i = 0; i < n_delta; ++i) {
        double t = mid + half * inner.nodes[i];
        sum += half * inner.weights[i] *
               mpe_pair_analytic(model, theta, t) * std::abs(t - theta);
      }
    }
    return sum;
  };

  // Outer prior expectation.
  if (model.boundary_prior) {
    // Exponential prior: substitute theta = -ln(u)/beta, exact prior weight.
    const double beta = 1.0 / model.prior_scale;
    QuadRule outer = gauss_legendre(n_theta);
    double sum = 0.0;
    for (int i = 0; i < n_theta; ++i) {
      double u = 0.5 + 0.5 * outer.nodes[i];  // (0,1)
      sum += 0.5 * outer.weights[i] * inner_integral(-std::log(u) / beta);
    }
    return 0.5 * sum;
  }
  double mean = expect_normal(inner_integral, model.prior_mean, model.prior_scale,
                              n_theta);
  return 0.5 * mean;
}

}  // namespace

ZzResult ziv_zakai_rhs(const models::ScalarModel& model, int n_theta, int n_delta) {
  if (model.flat_prior) {
    throw std::invalid_argument("ziv_zakai_rhs: needs a proper prior");
  }
  ZzResult r;
  double coarse = zz_pass(model, n_theta, n_delta);
  double fine = zz_pass(model, 2 * n_theta, 2 * n_delta);
  r.value = fine;
  r.converged = std::abs(fine - coarse) <= 1e-4 * std::max(std::abs(fine), 1e-300);
  r.n_theta = 2 * n_theta;
  r.n_delta = 2 * n_delta;
  return r;
}

BoundReport ziv_zakai_check(const models::ScalarModel& model,
                            const Estimator& estimator, const McOptions& opts,
                            int n_theta, int n_delta) {
  ZzResult rhs_bound = ziv_zakai_rhs(model, n_theta, n_delta);
  ValueWithSe mse = emse(model, estimator, opts.derived(13));
  BoundReport r = make_report("ziv_zakai[" + estimator.name + "]",
                              CheckKind::kInequality, rhs_bound.value, 0.0, mse.value,
                              mse.std_error, rhs_bound.converged);
  r.config_hash = hash_config(r.name, opts);
  if (!rhs_bound.converged) r.note = "quadrature unconverged";
  return r;
}

// ---------------------------------------------------------------------------
// One-sided MPE slopes

namespace {

SlopeEstimate slope_from_stats(const BlockStats& stats, Side side,
                               const std::vector<double>& deltas) {
  const int k = static_cast<int>(deltas.size());
  const double sgn = side == Side::kPlus ? 1.0 : -1.0;
  SlopeEstimate est;
  est.side = side;
  est.step_sizes = deltas;
  for (int j = 0; j < k; ++j) {
    auto quotient = [j, sgn, &deltas](const Eigen::VectorXd& m) {
      return sgn * (m[j] - 0.5) / deltas[static_cast<std::size_t>(j)];
    };
    est.quotients.push_back(stats.statistic(quotient));
    est.quotient_ses.push_back(stats.jackknife_se(quotient));
  }
  est.value = est.quotients.back();
  if (k >= 2) {
    const double da = deltas[static_cast<std::size_t>(k - 1)];
    const double db = deltas[static_cast<std::size_t>(k - 2)];
    auto richardson = [&, da, db](const Eigen::VectorXd& m) {
      double qa = sgn * (m[k - 1] - 0.5) / da;
      double qb = sgn * (m[k - 2] - 0.5) / db;
      return (db * qa - da * qb) / (db - da);
    };
    est.extrapolated = stats.statistic(richardson);
    est.std_error = stats.jackknife_se(richardson);
  } else {
    est.extrapolated = est.value;
    est.std_error = est.quotient_ses.back();
  }
  // Non-monotone quotient ladder beyond noise -> inconclusive flag.
  bool up = false, down = false;
  for (int j = 0; j + 1 < k; ++j) {
    double diff = est.quotients[static_cast<std::size_t>(j + 1)] -
                  est.quotients[static_cast<std::size_t>(j)];
    double se = std::hypot(est.quotient_ses[static_cast<std::size_t>(j + 1)],
                           est.quotient_ses[static_cast<std::size_t>(j)]);
    if (diff > 3.0 * se) up = true;
    if (diff < -3.0 * se) down = true;
  }
  est.monotone_ok = !(up && down);
  return est;
}

}  // namespace

SlopeEstimate mpe_slope(const models::ScalarModel& model, Side side,
                        std::vector<double> steps, const McOptions& opts) {
  if (steps.empty()) steps = default_slope_steps();
  if (!std::is_sorted(steps.rbegin(), steps.rend())) {
    throw std::invalid_argument("mpe_slope: steps must be a decreasing sequence");
  }
  const double sp = model.posterior_sd.value_or(model.prior_scale);
  std::vector<double> deltas;
  deltas.reserve(steps.size());
  for (double s : steps) {
    if (!(s > 0.0)) throw std::invalid_argument("mpe_slope: steps must be positive");
    deltas.push_back(s * sp);
  }
  const double dir = side == Side::kPlus ? 1.0 : -1.0;
  const int k = static_cast<int>(deltas.size());
  const bool analytic_pairs = static_cast<bool>(model.gaussian) || model.flat_likelihood;

  BlockStats stats = mc_run(opts, k, [&](Rng& rng, std::span<double> out) {
    double theta = model.sample_prior(rng);
    if (analytic_pairs) {
      for (int j = 0; j < k; ++j) {
        out[static_cast<std::size_t>(j)] =
            mpe_pair_analytic(model, theta, theta + dir * deltas[static_cast<std::size_t>(j)]);
      }
      return true;
    }
    // Indicator backend: one draw under each hypothesis per step, with the
    // theta draw shared across steps as the common random numbers.
    for (int j = 0; j < k; ++j) {
      double theta1 = theta + dir * deltas[static_cast<std::size_t>(j)];
      observer::HypothesisPriors priors =
          observer::hypothesis_priors(model, theta, theta1);
      double lny = std::log(observer::optimal_threshold(model, theta, theta1));
      auto log_lr = [&](const Eigen::VectorXd& g) {
        return model.cond_log_density(g, theta1) - model.cond_log_density(g, theta);
      };
      Eigen::VectorXd g0 = model.sample_cond(theta, rng);
      Eigen::VectorXd g1 = model.sample_cond(theta1, rng);
      double fp = log_lr(g0) > lny ? 1.0 : 0.0;
      double fn = log_lr(g1) > lny ? 0.0 : 1.0;
      out[static_cast<std::size_t>(j)] = priors.pr0 * fp + priors.pr1 * fn;
    }
    return true;
  });
  return slope_from_stats(stats, side, deltas);
}

SlopeEstimate mpe_slope_directional(const models::VectorModel& model,
                                    const Eigen::VectorXd& u, Side side,
                                    std::vector<double> steps, const McOptions& opts) {
  if (steps.empty()) steps = default_slope_steps();
  if (std::abs(u.norm() - 1.0) > 1e-10) {
    throw std::invalid_argument("mpe_slope_directional: u must be a unit vector");
  }
  if (!model.gaussian) {
    throw std::invalid_argument(
        "mpe_slope_directional: closed-form pair MPE needs the Gaussian model");
  }
  auto core = model.gaussian;
  const double q_u = u.dot(core->cond_fim * u);
  const double sp_u = std::sqrt(u.dot(core->post_cov * u));
  std::vector<double> deltas;
  deltas.reserve(steps.size());
  for (double s : steps) deltas.push_back(s * sp_u);
  const double dir = side == Side::kPlus ? 1.0 : -1.0;
  const int k = static_cast<int>(deltas.size());

  BlockStats stats = mc_run(opts, k, [&](Rng& rng, std::span<double> out) {
    Eigen::VectorXd theta = model.sample_prior(rng);
    double lp0 = model.prior_log_density(theta);
    for (int j = 0; j < k; ++j) {
      double t = dir * deltas[static_cast<std::size_t>(j)];
      Eigen::VectorXd theta1 = theta + t * u;
      double lp1 = model.prior_log_density(theta1);
      double lny = lp0 - lp1;
      double pr0 = 1.0 / (1.0 + std::exp(-lny));
      double d = std::abs(t) * std::sqrt(q_u);
      out[static_cast<std::size_t>(j)] = gaussian_pair_pe(lny, d, pr0, 1.0 - pr0);
    }
    return true;
  });
  return slope_from_stats(stats, side, deltas);
}

BoundReport slope_tv_identity_check(const models::ScalarModel& model,
                                    const McOptions& opts) {
  SlopeEstimate slope =
      mpe_slope(model, Side::kPlus, default_slope_steps(), opts.derived(21));
  tv::TvAverage avg = tv::tv_average(model, opts.derived(22));
  double lhs = -4.0 * slope.extrapolated;
  double lhs_se = 4.0 * slope.std_error;
  BoundReport r = make_report("slope_tv_identity", CheckKind::kIdentity, lhs, lhs_se,
                              avg.posterior_route.value,
                              avg.posterior_route.std_error.value_or(0.0),
                              slope.monotone_ok);
  r.config_hash = hash_config(r.name, opts);
  return r;
}

BoundReport schwarz_bound_check(const models::ScalarModel& model,
                                const McOptions& opts, Side side) {
  SlopeEstimate slope = mpe_slope(model, side, default_slope_steps(), opts.derived(23));
  double f, f_se = 0.0;
  if (model.bayes_fisher) {
    f = *model.bayes_fisher;
  } else {
    fisher::FisherResult fr = fisher::bayesian_fi_prior_form(model, opts.derived(24));
    f = fr.value;
    f_se = fr.std_error.value_or(0.0);
  }
  double lhs = std::abs(slope.extrapolated);
  double rhs = 0.25 * std::sqrt(f);
  double rhs_se = (f > 0.0) ? 0.125 * f_se / std::sqrt(f) : 0.0;
  BoundReport r = make_report("schwarz_slope_bound", CheckKind::kInequality, lhs,
                              slope.std_error, rhs, rhs_se, slope.monotone_ok);
  r.ratio = lhs / rhs;
  r.config_hash = hash_config(r.name, opts);
  return r;
}

namespace {

BoundReport auc_slope_report(const std::string& name, double q, const std::vector<double>& steps,
                             double rel_tol, const McOptions& opts) {
  // Analytic AUC path: AUC(delta) = Phi(delta sqrt(q) / sqrt(2)).
  std::vector<double> quotients;
  for (double step : steps) {
    double auc = normal_cdf(step * std::sqrt(q) / kSqrt2);
    quotients.push_back((auc - 0.5) / step);
  }
  const std::size_t k = quotients.size();
  double extrapolated;
  if (k >= 2) {
    double da = steps[k - 1], db = steps[k - 2];
    extrapolated = (db * quotients[k - 1] - da * quotients[k - 2]) / (db - da);
  } else {
    extrapolated = quotients.back();
  }
  double rhs = std::sqrt(q) / (2.0 * kSqrtPi);
  BoundReport r = make_report(name, CheckKind::kIdentity, extrapolated, 0.0, rhs, 0.0,
                              true, rel_tol);
  r.ratio = extrapolated / rhs;
  r.config_hash = hash_config(r.name, opts);
  return r;
}

}  // namespace

BoundReport auc_fi_slope_check(const models::ScalarModel& model, double theta,
                               std::vector<double> steps, const McOptions& opts,
                               double rel_tol) {
  if (steps.empty()) steps = default_slope_steps();
  if (!model.conditional_fisher) {
    throw std::invalid_argument("auc_fi_slope_check: model lacks a conditional information form");
  }
  double q = model.conditional_fisher(theta);
  if (!model.gaussian) {
    throw std::invalid_argument("auc_fi_slope_check: analytic AUC path needs the Gaussian model");
  }
  return auc_slope_report("auc_fi_slope", q, steps, rel_tol, opts);
}

BoundReport auc_fi_slope_check_directional(const models::VectorModel& model,
                                           const Eigen::VectorXd& theta,
                                           const Eigen::VectorXd& u,
                                           std::vector<double> steps,
                                           const McOptions& opts, double rel_tol) {
  if (steps.empty()) steps = default_slope_steps();
  if (!model.conditional_fim) {
    throw std::invalid_argument(
        "auc_fi_slope_check_directional: model lacks a conditional information form");
  }
  if (std::abs(u.norm() - 1.0) > 1e-10) {
    throw std::invalid_argument("auc_fi_slope_check_directional: u must be a unit vector");
  }
  double q = u.dot(model.conditional_fim(theta) * u);
  return auc_slope_report("auc_fi_slope_directional", q, steps, rel_tol, opts);
}

BoundReport vector_slope_check(const models::VectorModel& model,
                               const Eigen::VectorXd& u, const McOptions& opts) {
  SlopeEstimate slope = mpe_slope_directional(model, u, Side::kPlus,
                                              default_slope_steps(), opts.derived(25));
  if (!model.bayes_fim) {
    throw std::invalid_argument("vector_slope_check: model lacks a Bayesian information matrix");
  }
  double rhs = 0.25 * std::sqrt(u.dot(*model.bayes_fim * u));
  double lhs = std::abs(slope.extrapolated);
  BoundReport r = make_report("vector_slope_bound", CheckKind::kInequality, lhs,
                              slope.std_error, rhs, 0.0, slope.monotone_ok);
  r.ratio = lhs / rhs;
  r.config_hash = hash_config(r.name, opts);
  return r;
}

}  // namespace taskinfo::bounds
