// Inequality and identity checks: ensemble MSE against the Bayesian
// information bound, the Ziv-Zakai integral bound, one-sided MPE slopes
// against the averaged posterior TV, the Schwarz slope bound, and the AUC
// slope law, in scalar and directional-vector form.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "taskinfo/mc.hpp"
#include "taskinfo/models.hpp"

namespace taskinfo::bounds {

enum class EstimatorKind { kPosteriorMean, kMlLinear, kConstant };

struct Estimator {
  std::string name;
  std::function<double(const Eigen::VectorXd&)> fn;
};

Estimator make_estimator(const models::ScalarModel& model, EstimatorKind kind,
                         double constant = 0.0);

struct ValueWithSe {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
};

/// Ensemble mean squared error of the estimator over theta ~ prior,
/// g ~ cond.  Non-finite estimates are excluded; more than 0.1% of them
/// is an error.
ValueWithSe emse(const models::ScalarModel& model, const Estimator& estimator,
                 const McOptions& opts);

enum class Verdict { kHolds, kInconclusive, kViolated };
enum class CheckKind { kInequality, kIdentity };

const char* verdict_name(Verdict v);

struct BoundReport {
  std::string name;
  CheckKind kind = CheckKind::kInequality;
  // Inequalities are oriented lhs <= rhs; identities compare lhs to rhs.
  double lhs = 0.0, lhs_se = 0.0;
  double rhs = 0.0, rhs_se = 0.0;
  double slack = 0.0;  // rhs - lhs
  Verdict verdict = Verdict::kInconclusive;
  std::optional<double> ratio;  // lhs/rhs where it is the interesting number
  std::uint64_t config_hash = 0;
  std::string note;
};

/// Three-sigma verdict rule.  `tol` guards the zero-SE analytic paths; an
/// estimator-level diagnostic failure forces an inconclusive verdict.
BoundReport make_report(std::string name, CheckKind kind, double lhs, double lhs_se,
                        double rhs, double rhs_se, bool diagnostics_ok = true,
                        double tol = 1e-9);

/// EMSE >= 1/F with F the Bayesian Fisher information.
BoundReport van_trees_check(const models::ScalarModel& model,
                            const Estimator& estimator, const McOptions& opts);

struct ZzResult {
  double value = 0.0;
  bool converged = true;
  int n_theta = 0, n_delta = 0;
};

/// Right side of the parameter-pair error bound: (1/2) <int P_e(theta,
/// theta~) |theta~ - theta| dtheta~>_theta by nested quadrature, inner
/// integral split at the kink and truncated at 8 posterior sd, refinement
/// doubling with a 1e-4 relative convergence gate.
ZzResult ziv_zakai_rhs(const models::ScalarModel& model, int n_theta = 64,
                       int n_delta = 64);

/// EMSE(estimator) >= ziv_zakai_rhs.
BoundReport ziv_zakai_check(const models::ScalarModel& model,
                            const Estimator& estimator, const McOptions& opts,
                            int n_theta = 64, int n_delta = 64);

enum class Side { kPlus, kMinus };

inline const std::vector<double>& default_slope_steps() {
  static const std::vector<double> steps{0.2, 0.1, 0.05, 0.025};
  return steps;
}

struct SlopeEstimate {
  Side side = Side::kPlus;
  double value = 0.0;  // finest-step one-sided difference quotient
  std::vector<double> step_sizes;  // absolute steps, descending
  std::vector<double> quotients;
  std::vector<double> quotient_ses;
  double extrapolated = 0.0;  // first-order Richardson from the two finest
  double std_error = 0.0;
  bool monotone_ok = true;
};

/// One-sided derivative of <P_e(theta, theta +- delta)>_theta at delta=0.
/// theta is sampled from the prior (common random numbers across steps);
/// per-pair MPE is closed-form for Gaussian and zero-information models,
/// otherwise a paired-draw Monte Carlo indicator.  Steps are in
/// posterior-sd units.
SlopeEstimate mpe_slope(const models::ScalarModel& model, Side side,
                        std::vector<double> steps, const McOptions& opts);

/// Directional version along the unit vector u.
SlopeEstimate mpe_slope_directional(const models::VectorModel& model,
                                    const Eigen::VectorXd& u, Side side,
                                    std::vector<double> steps, const McOptions& opts);

/// |4 x slope| of the averaged MPE equals the averaged posterior TV.
BoundReport slope_tv_identity_check(const models::ScalarModel& model,
                                    const McOptions& opts);

/// |slope| <= (1/4) sqrt(F); the report carries the attained ratio.
BoundReport schwarz_bound_check(const models::ScalarModel& model,
                                const McOptions& opts, Side side = Side::kPlus);

/// One-sided AUC slope against sqrt(F(theta)) / (2 sqrt(pi)) for the
/// conditional (prior-free) task.  rel_tol sets the verdict gate on the
/// analytic path.
BoundReport auc_fi_slope_check(const models::ScalarModel& model, double theta,
                               std::vector<double> steps, const McOptions& opts,
                               double rel_tol = 0.02);

/// Directional AUC slope for vector models.
BoundReport auc_fi_slope_check_directional(const models::VectorModel& model,
                                           const Eigen::VectorXd& theta,
                                           const Eigen::VectorXd& u,
                                           std::vector<double> steps,
                                           const McOptions& opts,
                                           double rel_tol = 0.02);

/// Directional MPE slope against (1/4) sqrt(u' F u) with F the Bayesian
/// information matrix.
BoundReport vector_slope_check(const models::VectorModel& model,
                               const Eigen::VectorXd& u, const McOptions& opts);

/// Closed-form per-pair minimum probability of error where the model
/// admits one (Gaussian-signal or zero-information likelihood).
double mpe_pair_analytic(const models::ScalarModel& model, double theta0,
                         double theta1);

}  // namespace taskinfo::bounds
