#include "taskinfo/models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "taskinfo/linalg.hpp"
#include "taskinfo/quad.hpp"
#include "taskinfo/special.hpp"

namespace taskinfo::models {

namespace {

constexpr double kLog2Pi = 1.83787706640934548356;
// pr(g) underflow floor: below this the data are declared impossible.
constexpr double kLogEvidenceFloor = -690.77552789821368;  // ln 1e-300

double interp_grid(const GridDensity& grid, double x) {
  if (grid.nodes.empty()) return 0.0;
  if (x < grid.nodes.front() || x > grid.nodes.back()) return 0.0;
  auto it = std::upper_bound(grid.nodes.begin(), grid.nodes.end(), x);
  if (it == grid.nodes.begin()) return grid.values.front();
  if (it == grid.nodes.end()) return grid.values.back();
  std::size_t hi = static_cast<std::size_t>(it - grid.nodes.begin());
  std::size_t lo = hi - 1;
  double t = (x - grid.nodes[lo]) / (grid.nodes[hi] - grid.nodes[lo]);
  return (1.0 - t) * grid.values[lo] + t * grid.values[hi];
}

}  // namespace

double PosteriorFamily::density(double theta) const {
  if (const auto* n = std::get_if<NormalPosterior>(&family)) {
    return normal_pdf((theta - n->mean) / n->sd) / n->sd;
  }
  if (const auto* e = std::get_if<ExponentialPosterior>(&family)) {
    return theta >= 0.0 ? e->rate * std::exp(-e->rate * theta) : 0.0;
  }
  if (const auto* g = std::get_if<GridDensity>(&family)) {
    return interp_grid(*g, theta);
  }
  throw std::domain_error("PosteriorFamily::density: family is not scalar");
}

double PosteriorFamily::mean() const {
  if (const auto* n = std::get_if<NormalPosterior>(&family)) return n->mean;
  if (const auto* e = std::get_if<ExponentialPosterior>(&family)) return 1.0 / e->rate;
  if (const auto* g = std::get_if<GridDensity>(&family)) {
    double num = 0.0;
    for (std::size_t i = 1; i < g->nodes.size(); ++i) {
      double h = g->nodes[i] - g->nodes[i - 1];
      num += 0.5 * h * (g->nodes[i] * g->values[i] + g->nodes[i - 1] * g->values[i - 1]);
    }
    return num;
  }
  throw std::domain_error("PosteriorFamily::mean: family is not scalar");
}

Interval PosteriorFamily::support() const {
  if (std::holds_alternative<ExponentialPosterior>(family)) return {0.0, kInf};
  if (const auto* g = std::get_if<GridDensity>(&family)) {
    return {g->nodes.front(), g->nodes.back()};
  }
  return {-kInf, kInf};
}

PosteriorFamily make_normal_family(double mean, double sd) {
  if (!(sd > 0.0)) throw std::invalid_argument("normal family: sd must be positive");
  PosteriorFamily f;
  f.family = NormalPosterior{mean, sd};
  f.mode = mean;
  return f;
}

PosteriorFamily make_exponential_family(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential family: rate must be positive");
  PosteriorFamily f;
  f.family = ExponentialPosterior{rate};
  f.mode = 0.0;
  return f;
}

PosteriorFamily make_mvn_family(Eigen::VectorXd mean, Eigen::MatrixXd cov) {
  MvnPosterior mvn;
  Eigen::MatrixXd chol = require_spd(cov, "mvn family covariance");
  mvn.precision = solve_chol_mat(chol, Eigen::MatrixXd::Identity(cov.rows(), cov.cols()));
  mvn.precision = 0.5 * (mvn.precision + mvn.precision.transpose()).eval();
  mvn.mean = std::move(mean);
  mvn.cov = std::move(cov);
  PosteriorFamily f;
  f.family = std::move(mvn);
  return f;
}

PosteriorFamily make_grid_family(const std::function<double(double)>& log_density,
                                 double lo, double hi, int nodes) {
  if (nodes < 3) throw std::invalid_argument("grid family: need at least 3 nodes");
  GridDensity grid;
  grid.nodes.resize(static_cast<std::size_t>(nodes));
  grid.values.resize(static_cast<std::size_t>(nodes));
  double max_log = -kInf;
  for (int i = 0; i < nodes; ++i) {
    double x = lo + (hi - lo) * static_cast<double>(i) / (nodes - 1);
    grid.nodes[static_cast<std::size_t>(i)] = x;
    double l = log_density(x);
    grid.values[static_cast<std::size_t>(i)] = l;
    max_log = std::max(max_log, l);
  }
  if (!std::isfinite(max_log)) {
    throw std::invalid_argument("grid family: log density has no finite values");
  }
  for (double& v : grid.values) v = std::exp(v - max_log);
  double z = trapezoid(grid.nodes, grid.values);
  for (double& v : grid.values) v /= z;
  grid.log_norm = std::log(z) + max_log;
  grid.log_unnormalized = log_density;

  std::size_t arg = static_cast<std::size_t>(
      std::max_element(grid.values.begin(), grid.values.end()) - grid.values.begin());
  double a = grid.nodes[arg > 0 ? arg - 1 : arg];
  double b = grid.nodes[arg + 1 < grid.nodes.size() ? arg + 1 : arg];
  PosteriorFamily f;
  f.mode = (a < b) ? golden_section_max(log_density, a, b, 1e-12 * (1.0 + std::abs(b)))
                   : grid.nodes[arg];
  f.family = std::move(grid);
  return f;
}

// ---------------------------------------------------------------------------
// Gaussian scalar-signal model

double GaussianScalarSignalModel::posterior_mean(const Eigen::VectorXd& g) const {
  if (flat_prior) return ml_linear(g);
  return posterior_var * (kinv_s.dot(g) + mu / sigma2);
}

namespace {

std::shared_ptr<GaussianScalarSignalModel> build_gaussian_core(
    const Eigen::VectorXd& s, const Eigen::MatrixXd& K, double mu, double sigma2,
    bool flat_prior) {
  if (s.size() != K.rows()) {
    throw std::invalid_argument("gaussian scalar model: s and K dimensions differ");
  }
  const double norm = s.norm();
  if (std::abs(norm - 1.0) > 1e-10) {
    throw std::invalid_argument(
        "gaussian scalar model: s must be a unit vector (|s| - 1 = " +
        std::to_string(norm - 1.0) + ")");
  }
  if (!flat_prior && !(sigma2 > 0.0)) {
    throw std::invalid_argument("gaussian scalar model: sigma2 must be positive");
  }
  auto core = std::make_shared<GaussianScalarSignalModel>();
  core->s = s;
  core->K = K;
  core->mu = mu;
  core->sigma2 = sigma2;
  core->flat_prior = flat_prior;
  core->chol_k = require_spd(K, "data covariance K");
  core->kinv_s = solve_chol(core->chol_k, s);
  core->quad = s.dot(core->kinv_s);
  core->posterior_var = 1.0 / (core->quad + (flat_prior ? 0.0 : 1.0 / sigma2));
  core->log_norm =
      -0.5 * (static_cast<double>(K.rows()) * kLog2Pi + logdet_chol(core->chol_k));
  return core;
}

ScalarModel wrap_gaussian(std::shared_ptr<GaussianScalarSignalModel> core) {
  ScalarModel m;
  m.name = core->flat_prior ? "gaussian_scalar_flat_prior" : "gaussian_scalar";
  m.data_dim = static_cast<int>(core->s.size());
  m.flat_prior = core->flat_prior;
  m.gaussian = core;

  const double mu = core->mu;
  const double sigma2 = core->sigma2;
  const double sigma = core->flat_prior ? 0.0 : std::sqrt(sigma2);
  if (core->flat_prior) {
    m.prior_density = [](double) { return 1.0; };
    m.prior_log_density = [](double) { return 0.0; };
    m.prior_log_deriv = [](double) { return 0.0; };
    m.sample_prior = [](Rng&) -> double {
      throw std::domain_error("flat prior cannot be sampled");
    };
    m.prior_mean = 0.0;
    m.prior_scale = std::sqrt(core->posterior_var);
  } else {
    m.prior_density = [mu, sigma](double t) { return normal_pdf((t - mu) / sigma) / sigma; };
    m.prior_log_density = [mu, sigma, sigma2](double t) {
      double z = t - mu;
      return -0.5 * z * z / sigma2 - std::log(sigma) - 0.5 * kLog2Pi;
    };
    m.prior_log_deriv = [mu, sigma2](double t) { return -(t - mu) / sigma2; };
    m.sample_prior = [mu, sigma](Rng& rng) { return mu + sigma * rng.normal(); };
    m.prior_mean = mu;
    m.prior_scale = sigma;
  }

  m.cond_log_density = [core](const Eigen::VectorXd& g, double t) {
    Eigen::VectorXd r = g - t * core->s;
    return core->log_norm - 0.5 * quad_form_inv(core->chol_k, r);
  };
  m.cond_density = [core, f = m.cond_log_density](const Eigen::VectorXd& g, double t) {
    return std::exp(f(g, t));
  };
  m.cond_log_deriv = [core](const Eigen::VectorXd& g, double t) {
    return core->kinv_s.dot(g) - t * core->quad;
  };
  m.sample_cond = [core](double t, Rng& rng) -> Eigen::VectorXd {
    return t * core->s + core->chol_k * rng.normal_vector(core->s.size());
  };

  const double post_sd = std::sqrt(core->posterior_var);
  m.posterior = [core, post_sd](const Eigen::VectorXd& g) {
    return make_normal_family(core->posterior_mean(g), post_sd);
  };
  m.posterior_sd = post_sd;
  m.posterior_tv = kSqrtTwoOverPi / post_sd;
  m.conditional_fisher = [q = core->quad](double) { return q; };
  m.bayes_fisher = core->bayes_fisher();

  if (!core->flat_prior) {
    // Marginal of g: N(mu * s, K + sigma2 * s s').
    Eigen::MatrixXd cov = core->K + sigma2 * core->s * core->s.transpose();
    Eigen::MatrixXd chol = require_spd(cov, "marginal data covariance");
    double log_norm =
        -0.5 * (static_cast<double>(core->s.size()) * kLog2Pi + logdet_chol(chol));
    Eigen::VectorXd mean = mu * core->s;
    m.log_evidence = [chol, log_norm, mean](const Eigen::VectorXd& g) {
      return log_norm - 0.5 * quad_form_inv(chol, g - mean);
    };
  }
  return m;
}

}  // namespace

ScalarModel make_gaussian_scalar_model(const Eigen::VectorXd& s,
                                       const Eigen::MatrixXd& K, double mu,
                                       double sigma2) {
  return wrap_gaussian(build_gaussian_core(s, K, mu, sigma2, false));
}

ScalarModel make_gaussian_scalar_model_flat_prior(const Eigen::VectorXd& s,
                                                  const Eigen::MatrixXd& K) {
  return wrap_gaussian(build_gaussian_core(s, K, 0.0, 1.0, true));
}

// ---------------------------------------------------------------------------
// Zero-information models

ScalarModel make_flat_likelihood_normal_prior(double mu, double sigma2) {
  if (!(sigma2 > 0.0)) {
    throw std::invalid_argument("flat-likelihood model: sigma2 must be positive");
  }
  ScalarModel m;
  m.name = "flat_likelihood_normal_prior";
  m.data_dim = 1;
  m.flat_likelihood = true;
  const double sigma = std::sqrt(sigma2);
  m.prior_density = [mu, sigma](double t) { return normal_pdf((t - mu) / sigma) / sigma; };
  m.prior_log_density = [mu, sigma, sigma2](double t) {
    double z = t - mu;
    return -0.5 * z * z / sigma2 - std::log(sigma) - 0.5 * kLog2Pi;
  };
  m.prior_log_deriv = [mu, sigma2](double t) { return -(t - mu) / sigma2; };
  m.sample_prior = [mu, sigma](Rng& rng) { return mu + sigma * rng.normal(); };
  m.cond_log_density = [](const Eigen::VectorXd& g, double) {
    return -0.5 * g[0] * g[0] - 0.5 * kLog2Pi;
  };
  m.cond_density = [](const Eigen::VectorXd& g, double) { return normal_pdf(g[0]); };
  m.cond_log_deriv = [](const Eigen::VectorXd&, double) { return 0.0; };
  m.sample_cond = [](double, Rng& rng) {
    Eigen::VectorXd g(1);
    g[0] = rng.normal();
    return g;
  };
  m.posterior = [mu, sigma](const Eigen::VectorXd&) { return make_normal_family(mu, sigma); };
  m.log_evidence = [f = m.cond_log_density](const Eigen::VectorXd& g) { return f(g, 0.0); };
  m.conditional_fisher = [](double) { return 0.0; };
  m.bayes_fisher = 1.0 / sigma2;
  m.posterior_sd = sigma;
  m.posterior_tv = kSqrtTwoOverPi / sigma;
  m.prior_mean = mu;
  m.prior_scale = sigma;
  return m;
}

ScalarModel make_flat_likelihood_exponential_prior(double beta) {
  if (!(beta > 0.0)) {
    throw std::invalid_argument("flat-likelihood model: beta must be positive");
  }
  ScalarModel m;
  m.name = "flat_likelihood_exponential_prior";
  m.data_dim = 1;
  m.flat_likelihood = true;
  m.boundary_prior = true;
  m.support = Interval{0.0, kInf};
  m.prior_density = [beta](double t) { return t >= 0.0 ? beta * std::exp(-beta * t) : 0.0; };
  m.prior_log_density = [beta](double t) {
    return t >= 0.0 ? std::log(beta) - beta * t : -kInf;
  };
  m.prior_log_deriv = [beta](double) { return -beta; };
  m.sample_prior = [beta](Rng& rng) { return rng.exponential(beta); };
  m.cond_log_density = [](const Eigen::VectorXd& g, double) {
    return -0.5 * g[0] * g[0] - 0.5 * kLog2Pi;
  };
  m.cond_density = [](const Eigen::VectorXd& g, double) { return normal_pdf(g[0]); };
  m.cond_log_deriv = [](const Eigen::VectorXd&, double) { return 0.0; };
  m.sample_cond = [](double, Rng& rng) {
    Eigen::VectorXd g(1);
    g[0] = rng.normal();
    return g;
  };
  m.posterior = [beta](const Eigen::VectorXd&) { return make_exponential_family(beta); };
  m.log_evidence = [f = m.cond_log_density](const Eigen::VectorXd& g) { return f(g, 0.0); };
  m.conditional_fisher = [](double) { return 0.0; };
  m.bayes_fisher = beta * beta;
  m.posterior_sd = 1.0 / beta;
  m.posterior_tv = beta;
  m.prior_mean = 1.0 / beta;
  m.prior_scale = 1.0 / beta;
  return m;
}

// ---------------------------------------------------------------------------
// Gaussian imaging model

Eigen::VectorXd GaussianImagingModel::posterior_mean(const Eigen::VectorXd& g) const {
  Eigen::VectorXd rhs = solve_chol(chol_ktheta, mu) +
                        H.transpose() * solve_chol(chol_kn, g);
  return post_cov * rhs;
}

VectorModel make_gaussian_imaging_model(const Eigen::MatrixXd& H,
                                        const Eigen::MatrixXd& Kn,
                                        const Eigen::MatrixXd& Ktheta,
                                        const Eigen::VectorXd& mu) {
  const Eigen::Index M = H.rows();
  const Eigen::Index N = H.cols();
  if (Kn.rows() != M || Kn.cols() != M) {
    throw std::invalid_argument("imaging model: Kn must be M x M");
  }
  if (Ktheta.rows() != N || Ktheta.cols() != N) {
    throw std::invalid_argument("imaging model: Ktheta must be N x N");
  }
  if (mu.size() != N) {
    throw std::invalid_argument("imaging model: mu_vec must have length N");
  }

  auto core = std::make_shared<GaussianImagingModel>();
  core->H = H;
  core->Kn = Kn;
  core->Ktheta = Ktheta;
  core->mu = mu;
  core->chol_kn = require_spd(Kn, "noise covariance Kn");
  core->chol_ktheta = require_spd(Ktheta, "prior covariance Ktheta");

  PinvResult pinv = pseudoinverse(H, 1e-10);
  core->pinv = pinv.pinv;
  core->smallest_sv = pinv.smallest_sv;
  core->largest_sv = pinv.largest_sv;
  const Eigen::Index full = std::min(M, N);
  if (pinv.rank < static_cast<int>(full)) {
    throw std::invalid_argument(
        "imaging model: H is rank deficient (rank " + std::to_string(pinv.rank) +
        " of " + std::to_string(full) + ", singular values " +
        std::to_string(pinv.smallest_sv) + " .. " + std::to_string(pinv.largest_sv) + ")");
  }

  Eigen::MatrixXd kninv_h = solve_chol_mat(core->chol_kn, H);
  core->cond_fim = H.transpose() * kninv_h;
  core->cond_fim = 0.5 * (core->cond_fim + core->cond_fim.transpose()).eval();
  Eigen::MatrixXd ktheta_inv =
      solve_chol_mat(core->chol_ktheta, Eigen::MatrixXd::Identity(N, N));
  core->post_precision = ktheta_inv + core->cond_fim;
  core->post_precision =
      0.5 * (core->post_precision + core->post_precision.transpose()).eval();
  Eigen::MatrixXd chol_prec = require_spd(core->post_precision, "posterior precision");
  core->post_cov = solve_chol_mat(chol_prec, Eigen::MatrixXd::Identity(N, N));
  core->post_cov = 0.5 * (core->post_cov + core->post_cov.transpose()).eval();
  core->chol_post_cov = require_spd(core->post_cov, "posterior covariance");

  VectorModel m;
  m.name = "gaussian_imaging";
  m.data_dim = static_cast<int>(M);
  m.param_dim = static_cast<int>(N);
  m.gaussian = core;

  const double prior_log_norm =
      -0.5 * (static_cast<double>(N) * kLog2Pi + logdet_chol(core->chol_ktheta));
  m.prior_log_density = [core, prior_log_norm](const Eigen::VectorXd& t) {
    return prior_log_norm - 0.5 * quad_form_inv(core->chol_ktheta, t - core->mu);
  };
  m.prior_density = [f = m.prior_log_density](const Eigen::VectorXd& t) {
    return std::exp(f(t));
  };
  m.prior_log_grad = [core](const Eigen::VectorXd& t) -> Eigen::VectorXd {
    return -solve_chol(core->chol_ktheta, Eigen::VectorXd(t - core->mu));
  };
  const double cond_log_norm =
      -0.5 * (static_cast<double>(M) * kLog2Pi + logdet_chol(core->chol_kn));
  m.cond_log_density = [core, cond_log_norm](const Eigen::VectorXd& g,
                                             const Eigen::VectorXd& t) {
    return cond_log_norm - 0.5 * quad_form_inv(core->chol_kn, g - core->H * t);
  };
  m.cond_log_grad = [core](const Eigen::VectorXd& g,
                           const Eigen::VectorXd& t) -> Eigen::VectorXd {
    return core->H.transpose() * solve_chol(core->chol_kn, Eigen::VectorXd(g - core->H * t));
  };
  m.sample_prior = [core](Rng& rng) -> Eigen::VectorXd {
    return core->mu + core->chol_ktheta * rng.normal_vector(core->mu.size());
  };
  m.sample_cond = [core](const Eigen::VectorXd& t, Rng& rng) -> Eigen::VectorXd {
    return core->H * t + core->chol_kn * rng.normal_vector(core->H.rows());
  };
  m.posterior = [core](const Eigen::VectorXd& g) {
    MvnPosterior mvn;
    mvn.mean = core->posterior_mean(g);
    mvn.cov = core->post_cov;
    mvn.precision = core->post_precision;
    PosteriorFamily f;
    f.family = std::move(mvn);
    return f;
  };
  m.conditional_fim = [core](const Eigen::VectorXd&) { return core->cond_fim; };
  m.bayes_fim = core->post_precision;
  return m;
}

// ---------------------------------------------------------------------------
// Posterior evaluation

namespace {

struct GridBuild {
  PosteriorFamily family;
  double log_evidence = 0.0;
};

GridBuild build_grid_posterior(const ScalarModel& model, const Eigen::VectorXd& g,
                               int nodes) {
  auto log_joint = [&model, &g](double t) {
    double lp = model.prior_log_density(t);
    if (!std::isfinite(lp)) return -kInf;
    return model.cond_log_density(g, t) + lp;
  };

  // Locate the posterior bulk: coarse scan, golden refinement, a local
  // curvature estimate for the window width.
  double lo = std::max(model.support.lo, model.prior_mean - 12.0 * model.prior_scale);
  double hi = std::min(model.support.hi, model.prior_mean + 12.0 * model.prior_scale);
  if (!(hi > lo)) throw std::invalid_argument("posterior grid: empty support window");
  const int scan = 512;
  double best_x = lo, best_v = -kInf;
  for (int i = 0; i <= scan; ++i) {
    double x = lo + (hi - lo) * static_cast<double>(i) / scan;
    double v = log_joint(x);
    if (v > best_v) {
      best_v = v;
      best_x = x;
    }
  }
  if (!std::isfinite(best_v)) {
    throw std::runtime_error("posterior_density: data impossible under model");
  }
  double span = (hi - lo) / scan;
  double mode = golden_section_max(log_joint, std::max(lo, best_x - span),
                                   std::min(hi, best_x + span), 1e-10);
  double h = 1e-4 * model.prior_scale;
  double inner = mode;
  if (inner - h < model.support.lo) inner = model.support.lo + h;
  if (inner + h > model.support.hi) inner = model.support.hi - h;
  double curv = (log_joint(inner + h) - 2.0 * log_joint(inner) + log_joint(inner - h)) / (h * h);
  double sd = (curv < -1e-12 && std::isfinite(curv)) ? 1.0 / std::sqrt(-curv)
                                                     : model.prior_scale;
  double a = std::max(model.support.lo, mode - 8.0 * sd);
  double b = std::min(model.support.hi, mode + 8.0 * sd);

  PosteriorFamily family = make_grid_family(log_joint, a, b, nodes);
  const auto& grid = std::get<GridDensity>(family.family);
  if (grid.log_norm < kLogEvidenceFloor) {
    throw std::runtime_error("posterior_density: data impossible under model");
  }
  return GridBuild{std::move(family), grid.log_norm};
}

}  // namespace

PosteriorFamily posterior_density(const ScalarModel& model, const Eigen::VectorXd& g) {
  if (model.posterior) return model.posterior(g);
  return build_grid_posterior(model, g, 2001).family;
}

PosteriorFamily posterior_density_grid(const ScalarModel& model,
                                       const Eigen::VectorXd& g, int nodes) {
  return build_grid_posterior(model, g, nodes).family;
}

double log_evidence(const ScalarModel& model, const Eigen::VectorXd& g) {
  if (model.log_evidence) return model.log_evidence(g);
  return build_grid_posterior(model, g, 2001).log_evidence;
}

ScalarModel without_closed_forms(const ScalarModel& model) {
  ScalarModel m = model;
  m.posterior = nullptr;
  m.log_evidence = nullptr;
  m.conditional_fisher = nullptr;
  m.bayes_fisher.reset();
  m.posterior_sd.reset();
  m.posterior_tv.reset();
  m.gaussian.reset();
  m.name += "_grid_path";
  return m;
}

}  // namespace taskinfo::models
