// Classical and Bayesian Fisher information, scalar and matrix, through
// the three equivalent routes: prior-averaged conditional information,
// expected squared posterior score, and the second moment of the joint
// score t'.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "taskinfo/mc.hpp"
#include "taskinfo/models.hpp"

namespace taskinfo::fisher {

enum class Method { kAuto, kAnalytic, kMonteCarlo };

struct FisherResult {
  double value = 0.0;      // scalar information
  Eigen::MatrixXd matrix;  // p x p when matrix-valued (0 x 0 otherwise)
  std::string method;      // "analytic" | "monte_carlo"
  std::optional<double> std_error;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  // Extras reported by the t'-route: the score mean should vanish for
  // smooth priors, and is reported rather than assumed.
  std::optional<double> mean_tprime;
  std::optional<double> mean_tprime_se;
  bool boundary_prior = false;

  bool is_matrix() const { return matrix.size() > 0; }
};

/// One draw of the joint score t' = d/dtheta ln pr(g|theta) + d/dtheta ln pr(theta).
struct ScoreSample {
  double t_prime = 0.0;
  double theta = 0.0;
  std::uint64_t g_id = 0;
};

/// Conditional Fisher information F(theta) = E[(d/dtheta ln pr(g|theta))^2].
FisherResult fisher_information(const models::ScalarModel& model, double theta,
                                const McOptions& opts, Method method = Method::kAuto);

/// Conditional Fisher information matrix from score outer products.
FisherResult fisher_matrix(const models::VectorModel& model,
                           const Eigen::VectorXd& theta, const McOptions& opts,
                           Method method = Method::kAuto);

/// F = <F(theta)>_prior + <(d/dtheta ln pr(theta))^2>_prior.
FisherResult bayesian_fi_prior_form(const models::ScalarModel& model,
                                    const McOptions& opts,
                                    Method method = Method::kAuto);

/// F = << (d/dtheta ln pr(theta|g))^2 >>, double Monte Carlo over the joint.
FisherResult bayesian_fi_posterior_form(const models::ScalarModel& model,
                                        const McOptions& opts,
                                        Method method = Method::kAuto);

/// F as the second moment of t'; also reports the sample mean of t' with
/// its standard error.  For boundary-supported priors the mean does not
/// vanish and the result is flagged.
FisherResult bayesian_fi_var_tprime(const models::ScalarModel& model,
                                    const McOptions& opts);

/// Bayesian Fisher information matrix from posterior score outer products.
FisherResult bayesian_fim(const models::VectorModel& model, const McOptions& opts,
                          Method method = Method::kAuto);

/// Expected squared posterior score of a standalone scalar family.
double family_fisher(const models::PosteriorFamily& family);

/// Joint score draws for diagnostics.
std::vector<ScoreSample> sample_scores(const models::ScalarModel& model,
                                       std::uint64_t n, std::uint64_t seed);

}  // namespace taskinfo::fisher
