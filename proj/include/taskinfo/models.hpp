// Statistical-model abstraction: prior, conditional density, samplers and
// (where the algebra allows) closed-form posteriors, plus the concrete
// Gaussian instances used across the library.
#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "taskinfo/rng.hpp"

namespace taskinfo::models {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
  double lo = -kInf;
  double hi = kInf;
  bool contains(double x) const { return x >= lo && x <= hi; }
};

// ---------------------------------------------------------------------------
// Posterior families

struct NormalPosterior {
  double mean = 0.0;
  double sd = 1.0;
};

struct ExponentialPosterior {
  double rate = 1.0;  // density rate * exp(-rate * x) on [0, inf)
};

struct MvnPosterior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;        // K_p
  Eigen::MatrixXd precision;  // K_p^{-1}
};

/// Tabulated density on strictly increasing nodes, normalized so the
/// trapezoid integral is 1.  When the source log-density is available the
/// grid can be refined; log_norm carries the (log) normalizer used.
struct GridDensity {
  std::vector<double> nodes;
  std::vector<double> values;
  std::function<double(double)> log_unnormalized;  // optional, enables refinement
  double log_norm = 0.0;
};

struct PosteriorFamily {
  std::variant<NormalPosterior, ExponentialPosterior, MvnPosterior, GridDensity>
      family;
  std::optional<double> mode;

  bool is_scalar() const { return !std::holds_alternative<MvnPosterior>(family); }
  /// Scalar density value (Normal/Exponential/Grid families).
  double density(double theta) const;
  /// Mean of a scalar family (grid mean by trapezoid).
  double mean() const;
  Interval support() const;
};

PosteriorFamily make_normal_family(double mean, double sd);
PosteriorFamily make_exponential_family(double rate);
PosteriorFamily make_mvn_family(Eigen::VectorXd mean, Eigen::MatrixXd cov);
/// Build a normalized grid family from a log-density over [lo, hi].
PosteriorFamily make_grid_family(const std::function<double(double)>& log_density,
                                 double lo, double hi, int nodes);

// ---------------------------------------------------------------------------
// Scalar model

struct GaussianScalarSignalModel {
  Eigen::VectorXd s;   // unit signal direction in data space
  Eigen::MatrixXd K;   // data covariance
  double mu = 0.0;     // prior mean
  double sigma2 = 1.0; // prior variance (ignored when flat_prior)
  bool flat_prior = false;

  // Derived quantities.
  Eigen::MatrixXd chol_k;   // lower Cholesky of K
  Eigen::VectorXd kinv_s;   // K^{-1} s
  double quad = 0.0;        // s' K^{-1} s
  double posterior_var = 0.0;
  double log_norm = 0.0;    // log of the Gaussian normalizer of pr(g|theta)

  double bayes_fisher() const { return quad + (flat_prior ? 0.0 : 1.0 / sigma2); }
  double posterior_mean(const Eigen::VectorXd& g) const;
  /// Maximum-likelihood linear estimate, the signal-space component of g.
  double ml_linear(const Eigen::VectorXd& g) const { return kinv_s.dot(g) / quad; }
};

struct ScalarModel {
  std::string name;
  int data_dim = 1;
  Interval support;

  std::function<double(double)> prior_density;
  std::function<double(double)> prior_log_density;
  std::function<double(double)> prior_log_deriv;
  std::function<double(const Eigen::VectorXd&, double)> cond_log_density;
  std::function<double(const Eigen::VectorXd&, double)> cond_density;
  std::function<double(const Eigen::VectorXd&, double)> cond_log_deriv;
  std::function<double(Rng&)> sample_prior;
  std::function<Eigen::VectorXd(double, Rng&)> sample_cond;
  /// Closed-form posterior, empty for grid-path models.
  std::function<PosteriorFamily(const Eigen::VectorXd&)> posterior;
  /// Closed-form log evidence ln pr(g), empty when only quadrature applies.
  std::function<double(const Eigen::VectorXd&)> log_evidence;

  // Analytic fast paths, set where the model's algebra provides them.
  std::function<double(double)> conditional_fisher;  // F(theta)
  std::optional<double> bayes_fisher;
  std::optional<double> posterior_sd;  // when independent of the data
  std::optional<double> posterior_tv;  // when independent of the data

  double prior_mean = 0.0;
  double prior_scale = 1.0;  // effective prior sd, used for windows
  bool flat_prior = false;
  bool boundary_prior = false;   // prior density jumps at a support endpoint
  bool flat_likelihood = false;  // pr(g|theta) does not depend on theta

  std::shared_ptr<const GaussianScalarSignalModel> gaussian;  // set for the Gaussian instance
};

/// Gaussian-signal model: g = theta * s + n with n ~ N(0, K) and a
/// N(mu, sigma2) prior on theta.  s must be unit within 1e-10; K SPD.
ScalarModel make_gaussian_scalar_model(const Eigen::VectorXd& s,
                                       const Eigen::MatrixXd& K, double mu,
                                       double sigma2);

/// Same conditional model with an (improper) flat prior on theta; Bayesian
/// quantities that need prior draws are unavailable and throw.
ScalarModel make_gaussian_scalar_model_flat_prior(const Eigen::VectorXd& s,
                                                  const Eigen::MatrixXd& K);

/// Data carries no information about theta: pr(g|theta) = N(g; 0, I_1).
/// The posterior equals the prior for every g.  Used as the
/// zero-information reference model.
ScalarModel make_flat_likelihood_normal_prior(double mu, double sigma2);

/// Zero-information model with an exponential prior (rate beta) on
/// [0, inf).  The prior score does not integrate to zero over this
/// boundary-supported prior, which the information routines must surface.
ScalarModel make_flat_likelihood_exponential_prior(double beta);

// ---------------------------------------------------------------------------
// Vector model

struct GaussianImagingModel {
  Eigen::MatrixXd H;       // M x N system matrix
  Eigen::MatrixXd Kn;      // M x M noise covariance
  Eigen::MatrixXd Ktheta;  // N x N prior covariance
  Eigen::VectorXd mu;      // prior mean

  Eigen::MatrixXd chol_kn, chol_ktheta;
  Eigen::MatrixXd cond_fim;        // H' Kn^{-1} H
  Eigen::MatrixXd post_precision;  // Ktheta^{-1} + cond_fim
  Eigen::MatrixXd post_cov;        // K_p
  Eigen::MatrixXd chol_post_cov;
  Eigen::MatrixXd pinv;            // H^+
  double smallest_sv = 0.0, largest_sv = 0.0;

  Eigen::VectorXd posterior_mean(const Eigen::VectorXd& g) const;
};

struct VectorModel {
  std::string name;
  int data_dim = 1;
  int param_dim = 1;

  std::function<double(const Eigen::VectorXd&)> prior_density;
  std::function<double(const Eigen::VectorXd&)> prior_log_density;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> prior_log_grad;
  std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)> cond_log_density;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>
      cond_log_grad;  // (g, theta)
  std::function<Eigen::VectorXd(Rng&)> sample_prior;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, Rng&)> sample_cond;
  std::function<PosteriorFamily(const Eigen::VectorXd&)> posterior;

  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> conditional_fim;
  std::optional<Eigen::MatrixXd> bayes_fim;  // K_p^{-1} for the Gaussian instance

  std::shared_ptr<const GaussianImagingModel> gaussian;
};

/// Linear-Gaussian imaging model: g = H theta + n, n ~ N(0, Kn), with a
/// N(mu, Ktheta) prior.  H must be full rank (relative tolerance 1e-10 on
/// singular values); Kn and Ktheta SPD.
VectorModel make_gaussian_imaging_model(const Eigen::MatrixXd& H,
                                        const Eigen::MatrixXd& Kn,
                                        const Eigen::MatrixXd& Ktheta,
                                        const Eigen::VectorXd& mu);

// ---------------------------------------------------------------------------
// Posterior evaluation

/// Posterior for the observed data: the model's closed form when present,
/// otherwise a normalized grid density (evidence by quadrature).
PosteriorFamily posterior_density(const ScalarModel& model, const Eigen::VectorXd& g);

/// Force the grid path regardless of closed forms (used for cross-checks).
PosteriorFamily posterior_density_grid(const ScalarModel& model,
                                       const Eigen::VectorXd& g, int nodes = 2001);

/// ln pr(g): closed form when available, else quadrature over the prior.
double log_evidence(const ScalarModel& model, const Eigen::VectorXd& g);

/// Strip closed-form hooks so every consumer exercises the grid path.
ScalarModel without_closed_forms(const ScalarModel& model);

}  // namespace taskinfo::models
