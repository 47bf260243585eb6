// Total variation of posterior densities: closed forms for named families,
// the unimodal shortcut through the modal density, partition partial sums
// with dyadic refinement, the data-averaged posterior TV, and directional
// TV for multivariate normal posteriors.
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "taskinfo/mc.hpp"
#include "taskinfo/models.hpp"

namespace taskinfo::tv {

struct TvEstimate {
  double value = 0.0;
  std::string method;  // "analytic" | "unimodal" | "grid" | "monte_carlo"
  std::optional<int> grid_nodes;
  std::vector<std::pair<int, double>> refinement;  // (N, partial sum)
  std::optional<double> std_error;
  bool converged = true;
};

/// Closed-form TV: Normal(m, sd) -> sqrt(2/pi)/sd; Exponential(rate) ->
/// rate.  Grid densities are rejected (use tv_grid); multivariate normals
/// need a direction (use tv_directional).
TvEstimate tv_analytic(const models::PosteriorFamily& posterior);

/// TV of a unimodal density as 2 p(mode) - p(a) - p(b); the mode is taken
/// from the family or found by golden-section search.  A probe scan
/// rejects clearly bimodal inputs.
TvEstimate tv_unimodal(const models::PosteriorFamily& posterior);

/// Partition partial sum sum_n |p(theta_n) - p(theta_{n-1})| with dyadic
/// refinement until successive sums agree to 1e-6 relative or the node
/// budget 2^20 is reached (then flagged unconverged).
TvEstimate tv_grid(const models::PosteriorFamily& posterior);

struct TvAverage {
  TvEstimate posterior_route;  // <TV of pr(.|g)>_g
  TvEstimate score_route;      // <<|t'|>> over the joint draw
};

/// Data-averaged posterior TV, computed both as the average per-data TV
/// and as the double Monte Carlo mean of |t'| (the two must agree).
TvAverage tv_average(const models::ScalarModel& model, const McOptions& opts,
                     int inner_grid_nodes = 2001);

/// Directional TV of a multivariate normal: sqrt((2/pi) u' K_p^{-1} u).
TvEstimate tv_directional(const models::MvnPosterior& posterior,
                          const Eigen::VectorXd& u);

}  // namespace taskinfo::tv
