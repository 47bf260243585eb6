// The ideal observer for two-point hypotheses on a parameter: likelihood
// ratio and posterior-ratio statistics, ROC/AUC, detectability, and the
// minimum probability of error at the prior-odds threshold.
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "taskinfo/mc.hpp"
#include "taskinfo/models.hpp"

namespace taskinfo::observer {

enum class StatisticKind { kLikelihoodRatio, kPosteriorRatio };

struct TestStatistic {
  StatisticKind kind = StatisticKind::kLikelihoodRatio;
  double theta0 = 0.0;
  double theta1 = 0.0;
  std::function<double(const Eigen::VectorXd&)> evaluate;      // Lambda or t
  std::function<double(const Eigen::VectorXd&)> log_evaluate;  // its log
};

TestStatistic make_test_statistic(const models::ScalarModel& model, double theta0,
                                  double theta1, StatisticKind kind);

struct HypothesisPriors {
  double pr0 = 0.5;
  double pr1 = 0.5;
};

/// Pr0 = pr(theta0) / (pr(theta0) + pr(theta1)); Pr1 = 1 - Pr0.
HypothesisPriors hypothesis_priors(const models::ScalarModel& model, double theta0,
                                   double theta1);

/// Error-minimizing threshold y = pr(theta0)/pr(theta1); +inf when the
/// alternative has zero prior density (the observer always declares H0).
double optimal_threshold(const models::ScalarModel& model, double theta0,
                         double theta1);

struct RocPoint {
  double threshold = 0.0;
  double fpf = 0.0;
  double tpf = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // 512 reporting thresholds, descending FPF
  double auc = 0.5;
  double std_error = 0.0;  // Hanley-McNeil
  bool degenerate = false;
  std::uint64_t n0 = 0, n1 = 0;
};

/// Empirical ROC from opts.samples draws under each hypothesis; AUC by the
/// Mann-Whitney rank statistic with ties counted 1/2.  theta1 == theta0 is
/// allowed as a diagnostic and comes back flagged degenerate.
RocCurve roc_and_auc(const models::ScalarModel& model, double theta0, double theta1,
                     const McOptions& opts);

/// Closed-form ideal-observer AUC for Gaussian conditional models.
double auc_analytic(const models::ScalarModel& model, double theta0, double theta1);

/// AUC values this close to 1 cannot be resolved by the rank estimator at
/// the default sample budgets; detectability_from_auc refuses them.
inline constexpr double kAucSaturation = 0.99995;

/// d = 2 erfinv(2 AUC - 1).  Throws below 1/2 (flip the labels) and at or
/// above the saturation guard.
double detectability_from_auc(double auc);

struct MpeEstimate {
  double value = 0.0;
  double std_error = 0.0;
  double pr0 = 0.5, pr1 = 0.5;
  double threshold = 1.0;
  std::uint64_t n0 = 0, n1 = 0;
};

/// Stratified Monte Carlo estimate of the minimum probability of error:
/// n0 = round(Pr0 n) draws under H0, the rest under H1, deciding H1 only
/// on a strict Lambda > y (ties go to H0).
MpeEstimate mpe(const models::ScalarModel& model, double theta0, double theta1,
                const McOptions& opts);

/// Closed-form MPE for Gaussian-signal models (prior-odds-shifted normal
/// CDF); std_error = 0.  Throws for models without the Gaussian structure.
MpeEstimate mpe_analytic_gaussian(const models::ScalarModel& model, double theta0,
                                  double theta1);

}  // namespace taskinfo::observer
