#include "taskinfo/suite.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "taskinfo/fisher.hpp"
#include "taskinfo/observer.hpp"
#include "taskinfo/quad.hpp"
#include "taskinfo/report.hpp"
#include "taskinfo/special.hpp"
#include "taskinfo/tv.hpp"

namespace taskinfo::suite {

namespace {

using bounds::CheckKind;
using bounds::Verdict;

std::string fmt6(double v) {
  char buf[64];
  if (std::abs(v) < 1e4) {
    std::snprintf(buf, sizeof(buf), "%.6f", v);
  } else {
    std::snprintf(buf, sizeof(buf), "%.6g", v);
  }
  return buf;
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

class SuiteBuilder {
 public:
  SuiteBuilder(std::uint64_t seed, std::uint64_t samples, int jobs)
      : seed_(seed), samples_(samples), jobs_(jobs) {}

  McOptions opts_for(const std::string& name) {
    McOptions o;
    o.samples = samples_;
    o.jobs = jobs_;
    o.seed = Rng::derive(seed_, fnv1a64(name));
    registry_[name] = o.seed;
    return o;
  }

  void add(const std::string& group, const std::string& name, double value,
           double expected, Verdict verdict, std::string detail = "") {
    entries_.push_back({group, name, value, expected, verdict, std::move(detail)});
  }

  void add_report(const std::string& group, const bounds::BoundReport& r,
                  double expected_ratio = std::numeric_limits<double>::quiet_NaN()) {
    SuiteEntry e;
    e.group = group;
    e.name = r.name;
    e.value = r.ratio.value_or(r.lhs);
    e.expected = std::isnan(expected_ratio) ? r.rhs : expected_ratio;
    e.verdict = r.verdict;
    e.detail = report::bound_line(r);
    entries_.push_back(std::move(e));
  }

  /// Identity gate: |value - expected| within max(3 se, tol).
  void check_value(const std::string& group, const std::string& name, double value,
                   double expected, double se, double tol, std::string detail = "") {
    bounds::BoundReport r =
        bounds::make_report(name, CheckKind::kIdentity, value, se, expected, 0.0, true, tol);
    add(group, name, value, expected, r.verdict, std::move(detail));
  }

  SuiteReport finish(double wall_clock_s) {
    SuiteReport rep;
    rep.entries = std::move(entries_);
    rep.overall = Verdict::kHolds;
    for (const auto& e : rep.entries) {
      if (e.verdict == Verdict::kViolated) {
        rep.overall = Verdict::kViolated;
        break;
      }
      if (e.verdict == Verdict::kInconclusive) rep.overall = Verdict::kInconclusive;
    }
    rep.wall_clock_s = wall_clock_s;
    rep.seed_registry = registry_;
    rep.seed = seed_;
    rep.samples = samples_;
    return rep;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t samples_;
  int jobs_;
  json registry_ = json::object();
  std::vector<SuiteEntry> entries_;
};

}  // namespace

SuiteReport run_suite(std::uint64_t seed, std::uint64_t samples, int jobs) {
  auto t0 = std::chrono::steady_clock::now();
  SuiteBuilder b(seed, samples, jobs);

  // --- Normal posterior family: TV over sqrt(F) is sqrt(2/pi). ---
  for (double sigma : {0.5, 1.0, 3.0}) {
    auto family = models::make_normal_family(0.0, sigma);
    double ratio = tv::tv_analytic(family).value / std::sqrt(fisher::family_fisher(family));
    b.check_value("normal family", "tv_over_sqrt_fi[sigma=" + fmt6(sigma) + "]", ratio,
                  kSqrtTwoOverPi, 0.0, 1e-6);
  }

  // --- Exponential posterior family: the bound is attained. ---
  for (double beta : {0.5, 1.0, 2.0}) {
    auto family = models::make_exponential_family(beta);
    double ratio = tv::tv_analytic(family).value / std::sqrt(fisher::family_fisher(family));
    b.check_value("exponential family", "tv_over_sqrt_fi[beta=" + fmt6(beta) + "]", ratio,
                  1.0, 0.0, 1e-12);
  }

  // --- Scalar Gaussian-signal model: analytic constants and MC routes. ---
  Eigen::VectorXd s(2);
  s << 1.0, 0.0;
  models::ScalarModel scalar =
      models::make_gaussian_scalar_model(s, Eigen::MatrixXd::Identity(2, 2), 0.0, 1.0);
  b.check_value("scalar signal model", "bayes_fi_analytic", *scalar.bayes_fisher, 2.0,
                0.0, 1e-12);
  b.check_value("scalar signal model", "posterior_variance",
                scalar.gaussian->posterior_var, 0.5, 0.0, 1e-12);
  tv::TvAverage avg = tv::tv_average(scalar, b.opts_for("tv_average"));
  b.check_value("scalar signal model", "average_posterior_tv", avg.posterior_route.value,
                2.0 / kSqrtPi, 0.0, 1e-6);
  b.check_value("scalar signal model", "average_abs_tprime", avg.score_route.value,
                2.0 / kSqrtPi, avg.score_route.std_error.value_or(0.0), 1e-12);

  {
    fisher::FisherResult prior_mc = fisher::bayesian_fi_prior_form(
        scalar, b.opts_for("bayes_fi_prior_mc"), fisher::Method::kMonteCarlo);
    fisher::FisherResult post_mc = fisher::bayesian_fi_posterior_form(
        scalar, b.opts_for("bayes_fi_posterior_mc"), fisher::Method::kMonteCarlo);
    fisher::FisherResult var_mc =
        fisher::bayesian_fi_var_tprime(scalar, b.opts_for("bayes_fi_tprime_mc"));
    b.check_value("scalar signal model", "bayes_fi_prior_route_mc", prior_mc.value, 2.0,
                  prior_mc.std_error.value_or(0.0), 1e-12);
    b.check_value("scalar signal model", "bayes_fi_posterior_route_mc", post_mc.value,
                  2.0, post_mc.std_error.value_or(0.0), 1e-12);
    b.check_value("scalar signal model", "bayes_fi_score_route_mc", var_mc.value, 2.0,
                  var_mc.std_error.value_or(0.0), 1e-12);
    // Property: the joint score has mean zero for this smooth prior.
    b.check_value("property", "score_mean_zero", *var_mc.mean_tprime, 0.0,
                  *var_mc.mean_tprime_se, 1e-12);
  }

  // --- Slope identity and Schwarz bound. ---
  b.add_report("slope identity",
               bounds::slope_tv_identity_check(scalar, b.opts_for("slope_tv_identity")));
  {
    bounds::BoundReport r = bounds::schwarz_bound_check(scalar, b.opts_for("schwarz_scalar"));
    b.add_report("schwarz", r, kSqrtTwoOverPi);
    models::ScalarModel flat_normal = models::make_flat_likelihood_normal_prior(0.0, 1.0);
    bounds::BoundReport rn =
        bounds::schwarz_bound_check(flat_normal, b.opts_for("schwarz_flat_normal"));
    b.add_report("schwarz", rn, kSqrtTwoOverPi);
    models::ScalarModel flat_exp = models::make_flat_likelihood_exponential_prior(1.0);
    bounds::BoundReport re =
        bounds::schwarz_bound_check(flat_exp, b.opts_for("schwarz_exponential"));
    b.add_report("schwarz", re, 1.0);
  }

  // --- Information bound on the EMSE. ---
  {
    bounds::Estimator post_mean =
        bounds::make_estimator(scalar, bounds::EstimatorKind::kPosteriorMean);
    bounds::Estimator ml = bounds::make_estimator(scalar, bounds::EstimatorKind::kMlLinear);
    bounds::BoundReport r1 =
        bounds::van_trees_check(scalar, post_mean, b.opts_for("van_trees_posterior_mean"));
    b.add_report("information bound", r1);
    bounds::BoundReport r2 =
        bounds::van_trees_check(scalar, ml, b.opts_for("van_trees_ml"));
    b.add_report("information bound", r2);
    // The ML estimator pays exactly the prior term: EMSE - 1/F = 1/2 here.
    b.check_value("information bound", "ml_excess_over_bound", r2.slack, 0.5,
                  r2.rhs_se, 1e-12);
  }

  // --- Error-integral bound, with covariance scalings. ---
  for (double c : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    models::ScalarModel m = models::make_gaussian_scalar_model(
        s, c * Eigen::MatrixXd::Identity(2, 2), 0.0, 1.0);
    bounds::Estimator pm = bounds::make_estimator(m, bounds::EstimatorKind::kPosteriorMean);
    bounds::BoundReport r =
        bounds::ziv_zakai_check(m, pm, b.opts_for("ziv_zakai[c=" + fmt6(c) + "]"));
    r.name += "[c=" + fmt6(c) + "]";
    b.add_report("error-integral bound", r);
  }

  // --- AUC slope law on the conditional model. ---
  b.add_report("auc slope",
               bounds::auc_fi_slope_check(scalar, 0.0, bounds::default_slope_steps(),
                                          b.opts_for("auc_slope"), 0.02));

  // --- Vector imaging model. ---
  {
    Eigen::MatrixXd H(1, 2);
    H << 1.0, 0.0;
    models::VectorModel imaging = models::make_gaussian_imaging_model(
        H, Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Identity(2, 2),
        Eigen::VectorXd::Zero(2));
    Eigen::MatrixXd expected(2, 2);
    expected << 2.0, 0.0, 0.0, 1.0;
    double err = (imaging.gaussian->post_precision - expected).cwiseAbs().maxCoeff();
    b.check_value("imaging model", "posterior_precision_matches", err, 0.0, 0.0, 1e-12);

    models::PosteriorFamily post = imaging.posterior(Eigen::VectorXd::Zero(1));
    const auto& mvn = std::get<models::MvnPosterior>(post.family);
    std::vector<std::pair<std::string, Eigen::Vector2d>> dirs;
    dirs.emplace_back("e1", Eigen::Vector2d(1.0, 0.0));
    dirs.emplace_back("e2", Eigen::Vector2d(0.0, 1.0));
    dirs.emplace_back("diag", Eigen::Vector2d(1.0 / kSqrt2, 1.0 / kSqrt2));
    for (const auto& [label, u2] : dirs) {
      Eigen::VectorXd u = u2;
      double tv_dir = tv::tv_directional(mvn, u).value;
      double root_info = std::sqrt(u.dot(imaging.gaussian->post_precision * u));
      b.check_value("imaging model", "directional_tv_ratio[" + label + "]",
                    tv_dir / root_info, kSqrtTwoOverPi, 0.0, 1e-6);
    }
    Eigen::VectorXd u = dirs[0].second;
    b.add_report("imaging model",
                 bounds::vector_slope_check(imaging, u, b.opts_for("vector_slope")),
                 kSqrtTwoOverPi);
  }

  // --- Property: likelihood-ratio change of measure. ---
  {
    McOptions o = b.opts_for("change_of_measure");
    observer::TestStatistic stat = observer::make_test_statistic(
        scalar, 0.0, 1.0, observer::StatisticKind::kLikelihoodRatio);
    auto f = [](double lambda) { return lambda / (1.0 + lambda); };
    BlockStats h1 = mc_run(o.derived(1), 1, [&](Rng& rng, std::span<double> out) {
      out[0] = f(stat.evaluate(scalar.sample_cond(1.0, rng)));
      return true;
    });
    BlockStats h0 = mc_run(o.derived(2), 1, [&](Rng& rng, std::span<double> out) {
      double lambda = stat.evaluate(scalar.sample_cond(0.0, rng));
      out[0] = lambda * f(lambda);
      return true;
    });
    double lhs = h1.mean(0), rhs = h0.mean(0);
    double se = std::hypot(h1.se_mean(0), h0.se_mean(0));
    b.check_value("property", "change_of_measure", lhs, rhs, se, 1e-12);
  }

  // --- Property: MPE never beats the blind observer. ---
  {
    McOptions o = b.opts_for("mpe_ceiling");
    int idx = 0;
    for (auto [t0v, t1v] : {std::pair{0.0, 1.0}, std::pair{0.5, -0.3}}) {
      observer::MpeEstimate est = observer::mpe(scalar, t0v, t1v, o.derived(idx));
      double ceiling = std::min(est.pr0, est.pr1);
      bounds::BoundReport r =
          bounds::make_report("mpe_le_min_prior[" + std::to_string(idx) + "]",
                              CheckKind::kInequality, est.value, est.std_error, ceiling, 0.0);
      b.add_report("property", r);
      ++idx;
    }
  }

  // --- Property: grid TV refines monotonically onto the closed form. ---
  {
    auto family = models::make_normal_family(0.0, 1.0);
    auto grid = models::make_grid_family(
        [](double x) { return -0.5 * x * x - 0.5 * std::log(2.0 * kPi); }, -8.0, 8.0, 501);
    tv::TvEstimate est = tv::tv_grid(grid);
    bool monotone = true;
    for (std::size_t i = 1; i < est.refinement.size(); ++i) {
      if (est.refinement[i].second < est.refinement[i - 1].second - 1e-12) monotone = false;
    }
    double target = tv::tv_analytic(family).value;
    bounds::BoundReport r = bounds::make_report("grid_tv_agrees_with_analytic",
                                                CheckKind::kIdentity, est.value, 0.0,
                                                target, 0.0, monotone && est.converged, 1e-5);
    b.add_report("property", r);
  }

  double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return b.finish(elapsed);
}

json SuiteReport::to_json(bool include_wall_clock) const {
  json j;
  j["seed"] = seed;
  j["samples"] = samples;
  j["overall"] = bounds::verdict_name(overall);
  if (include_wall_clock) j["wall_clock_s"] = wall_clock_s;
  j["seed_registry"] = seed_registry;
  json list = json::array();
  for (const auto& e : entries) {
    json item;
    item["group"] = e.group;
    item["name"] = e.name;
    item["value"] = e.value;
    item["expected"] = e.expected;
    item["verdict"] = bounds::verdict_name(e.verdict);
    if (!e.detail.empty()) item["detail"] = e.detail;
    list.push_back(item);
  }
  j["checks"] = list;
  return j;
}

std::string SuiteReport::markdown() const {
  std::string out = "| group | check | value | expected | verdict |\n";
  out += "|---|---|---|---|---|\n";
  for (const auto& e : entries) {
    out += "| " + e.group + " | " + e.name + " | " + fmt6(e.value) + " | " +
           fmt6(e.expected) + " | " + bounds::verdict_name(e.verdict) + " |\n";
  }
  out += "\noverall: ";
  out += bounds::verdict_name(overall);
  out += "\n";
  return out;
}

int SuiteReport::exit_code() const {
  if (overall == bounds::Verdict::kViolated) return 4;
  if (overall == bounds::Verdict::kInconclusive) return 3;
  return 0;
}

}  // namespace taskinfo::suite
