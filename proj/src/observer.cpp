#include "taskinfo/observer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "taskinfo/special.hpp"

namespace taskinfo::observer {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Mann-Whitney AUC with ties counted 1/2, via average ranks in the merged
/// sample.  Counting stays in half-integers, so the value is exact.
double mann_whitney_auc(std::vector<double> h0, std::vector<double> h1) {
  const std::size_t n0 = h0.size(), n1 = h1.size();
  struct Tagged {
    double v;
    bool positive;
  };
  std::vector<Tagged> all;
  all.reserve(n0 + n1);
  for (double v : h0) all.push_back({v, false});
  for (double v : h1) all.push_back({v, true});
  std::sort(all.begin(), all.end(),
            [](const Tagged& a, const Tagged& b) { return a.v < b.v; });
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j < all.size() && all[j].v == all[i].v) ++j;
    // ranks i+1 .. j, averaged over the tie group
    double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (all[k].positive) rank_sum_pos += avg_rank;
    }
    i = j;
  }
  double u = rank_sum_pos - 0.5 * static_cast<double>(n1) * static_cast<double>(n1 + 1);
  return u / (static_cast<double>(n0) * static_cast<double>(n1));
}

double hanley_mcneil_se(double auc, std::uint64_t n0, std::uint64_t n1) {
  double a = std::clamp(auc, 1e-12, 1.0 - 1e-12);
  double q1 = a / (2.0 - a);
  double q2 = 2.0 * a * a / (1.0 + a);
  double num = a * (1.0 - a) + (static_cast<double>(n1) - 1.0) * (q1 - a * a) +
               (static_cast<double>(n0) - 1.0) * (q2 - a * a);
  return std::sqrt(std::max(num, 0.0) / (static_cast<double>(n0) * static_cast<double>(n1)));
}

}  // namespace

TestStatistic make_test_statistic(const models::ScalarModel& model, double theta0,
                                  double theta1, StatisticKind kind) {
  TestStatistic t;
  t.kind = kind;
  t.theta0 = theta0;
  t.theta1 = theta1;
  double log_prior_ratio = 0.0;
  if (kind == StatisticKind::kPosteriorRatio && !model.flat_prior) {
    log_prior_ratio = model.prior_log_density(theta1) - model.prior_log_density(theta0);
  }
  auto cond = model.cond_log_density;
  t.log_evaluate = [cond, theta0, theta1, log_prior_ratio](const Eigen::VectorXd& g) {
    return cond(g, theta1) - cond(g, theta0) + log_prior_ratio;
  };
  t.evaluate = [le = t.log_evaluate](const Eigen::VectorXd& g) { return std::exp(le(g)); };
  return t;
}

HypothesisPriors hypothesis_priors(const models::ScalarModel& model, double theta0,
                                   double theta1) {
  if (model.flat_prior) return {0.5, 0.5};
  double p0 = model.prior_density(theta0);
  double p1 = model.prior_density(theta1);
  if (!std::isfinite(p0) || !std::isfinite(p1)) {
    throw std::domain_error("hypothesis_priors: prior density not finite");
  }
  if (p0 + p1 <= 0.0) {
    throw std::domain_error(
        "hypothesis_priors: both prior densities vanish, hypotheses undefined");
  }
  double pr0 = p0 / (p0 + p1);
  return {pr0, 1.0 - pr0};
}

double optimal_threshold(const models::ScalarModel& model, double theta0,
                         double theta1) {
  if (model.flat_prior) return 1.0;
  double p0 = model.prior_density(theta0);
  double p1 = model.prior_density(theta1);
  if (p0 + p1 <= 0.0) {
    throw std::domain_error(
        "optimal_threshold: both prior densities vanish, hypotheses undefined");
  }
  if (p1 <= 0.0) return kInf;  // always declare H0
  return p0 / p1;
}

RocCurve roc_and_auc(const models::ScalarModel& model, double theta0, double theta1,
                     const McOptions& opts) {
  if (opts.samples < 2) throw std::invalid_argument("roc_and_auc: n_samples >= 2");
  TestStatistic stat =
      make_test_statistic(model, theta0, theta1, StatisticKind::kLikelihoodRatio);

  const std::uint64_t n = opts.samples;
  std::vector<double> s0, s1;
  s0.reserve(n);
  s1.reserve(n);
  Rng rng0(Rng::derive(opts.seed, 0));
  Rng rng1(Rng::derive(opts.seed, 1));
  for (std::uint64_t i = 0; i < n; ++i) {
    s0.push_back(stat.log_evaluate(model.sample_cond(theta0, rng0)));
    s1.push_back(stat.log_evaluate(model.sample_cond(theta1, rng1)));
  }

  RocCurve curve;
  curve.n0 = curve.n1 = n;
  double lo = std::min(*std::min_element(s0.begin(), s0.end()),
                       *std::min_element(s1.begin(), s1.end()));
  double hi = std::max(*std::max_element(s0.begin(), s0.end()),
                       *std::max_element(s1.begin(), s1.end()));
  curve.degenerate = !(hi > lo);
  curve.auc = curve.degenerate ? 0.5 : mann_whitney_auc(s0, s1);
  curve.std_error = hanley_mcneil_se(curve.auc, n, n);

  // Reporting curve: 512 thresholds spaced uniformly in log Lambda
  // (logarithmically in Lambda).
  std::sort(s0.begin(), s0.end());
  std::sort(s1.begin(), s1.end());
  const int n_thresh = 512;
  double pad = curve.degenerate ? 1.0 : 1e-9 * (hi - lo);
  for (int k = 0; k < n_thresh; ++k) {
    double ly = (lo - pad) + (hi + pad - (lo - pad)) * static_cast<double>(k) / (n_thresh - 1);
    auto above = [ly](const std::vector<double>& s) {
      return static_cast<double>(s.end() - std::upper_bound(s.begin(), s.end(), ly));
    };
    RocPoint pt;
    pt.threshold = std::exp(ly);
    pt.fpf = above(s0) / static_cast<double>(n);
    pt.tpf = above(s1) / static_cast<double>(n);
    curve.points.push_back(pt);
  }
  return curve;
}

double auc_analytic(const models::ScalarModel& model, double theta0, double theta1) {
  if (!model.gaussian) {
    if (model.flat_likelihood) return 0.5;
    throw std::invalid_argument("auc_analytic: no closed form for this model");
  }
  double d = std::abs(theta1 - theta0) * std::sqrt(model.gaussian->quad);
  return normal_cdf(d / kSqrt2);
}

double detectability_from_auc(double auc) {
  if (auc < 0.5) {
    throw std::domain_error(
        "detectability_from_auc: AUC below 1/2 carries negative information; flip the "
        "hypothesis labels");
  }
  if (auc >= kAucSaturation) {
    throw std::domain_error(
        "detectability_from_auc: AUC saturated; values this close to 1 are not "
        "resolvable at the default sample budgets");
  }
  return 2.0 * erf_inv(2.0 * auc - 1.0);
}

MpeEstimate mpe(const models::ScalarModel& model, double theta0, double theta1,
                const McOptions& opts) {
  HypothesisPriors priors = hypothesis_priors(model, theta0, theta1);
  const double y = optimal_threshold(model, theta0, theta1);
  const double log_y = std::log(y);

  MpeEstimate est;
  est.pr0 = priors.pr0;
  est.pr1 = priors.pr1;
  est.threshold = y;
  est.n0 = static_cast<std::uint64_t>(std::llround(priors.pr0 * static_cast<double>(opts.samples)));
  est.n1 = opts.samples - est.n0;
  if (est.n0 == 0 || est.n1 == 0) {
    throw std::invalid_argument(
        "mpe: sample budget too small to populate both hypothesis strata");
  }

  TestStatistic stat =
      make_test_statistic(model, theta0, theta1, StatisticKind::kLikelihoodRatio);

  // Decide H1 iff log Lambda > log y (strict; ties -> H0).
  auto error_fraction = [&](double theta, bool h1_true, std::uint64_t n,
                            std::uint64_t stream, double* se_out) {
    McOptions sub = opts;
    sub.samples = n;
    sub.seed = Rng::derive(opts.seed, stream);
    BlockStats stats = mc_run(sub, 1, [&](Rng& rng, std::span<double> out) {
      Eigen::VectorXd g = model.sample_cond(theta, rng);
      bool declare_h1 = stat.log_evaluate(g) > log_y;
      out[0] = (declare_h1 != h1_true) ? 1.0 : 0.0;
      return true;
    });
    *se_out = stats.se_mean(0);
    return stats.mean(0);
  };

  double se0 = 0.0, se1 = 0.0;
  double fp = error_fraction(theta0, false, est.n0, 0, &se0);
  double fn = error_fraction(theta1, true, est.n1, 1, &se1);
  est.value = priors.pr0 * fp + priors.pr1 * fn;
  est.std_error = std::sqrt(priors.pr0 * priors.pr0 * se0 * se0 +
                            priors.pr1 * priors.pr1 * se1 * se1);
  return est;
}

MpeEstimate mpe_analytic_gaussian(const models::ScalarModel& model, double theta0,
                                  double theta1) {
  if (!model.gaussian) {
    throw std::invalid_argument(
        "mpe_analytic_gaussian: model is not a Gaussian-signal model");
  }
  HypothesisPriors priors = hypothesis_priors(model, theta0, theta1);
  MpeEstimate est;
  est.pr0 = priors.pr0;
  est.pr1 = priors.pr1;
  est.threshold = optimal_threshold(model, theta0, theta1);
  if (priors.pr1 == 0.0) {  // observer always declares H0; it errs only on H1
    est.value = 0.0;
    return est;
  }
  if (priors.pr0 == 0.0) {
    est.value = 0.0;
    return est;
  }
  const double d = std::abs(theta1 - theta0) * std::sqrt(model.gaussian->quad);
  const double log_y = std::log(est.threshold);
  if (d == 0.0) {
    // Lambda == 1: declare H1 iff 0 > log y.
    est.value = (log_y >= 0.0) ? priors.pr1 : priors.pr0;
    return est;
  }
  double fpf = normal_sf((log_y + 0.5 * d * d) / d);
  double fnf = normal_cdf((log_y - 0.5 * d * d) / d);
  est.value = priors.pr0 * fpf + priors.pr1 * fnf;
  return est;
}

}  // namespace taskinfo::observer
