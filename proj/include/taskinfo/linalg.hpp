// Small dense linear-algebra helpers on top of Eigen.
#pragma once

#include <Eigen/Dense>

namespace taskinfo {

/// Lower Cholesky factor of a symmetric matrix.  Returns -1 on success and
/// fills `lower`; otherwise returns the 0-based pivot index at which the
/// factorization failed.
int cholesky_lower(const Eigen::MatrixXd& a, Eigen::MatrixXd& lower);

/// Cholesky factor or throw, naming the failed pivot and the matrix role.
Eigen::MatrixXd require_spd(const Eigen::MatrixXd& a, const char* what);

/// x' A^{-1} x given the lower Cholesky factor of A.
double quad_form_inv(const Eigen::MatrixXd& chol_lower, const Eigen::VectorXd& x);

/// A^{-1} b given the lower Cholesky factor of A.
Eigen::VectorXd solve_chol(const Eigen::MatrixXd& chol_lower, const Eigen::VectorXd& b);
Eigen::MatrixXd solve_chol_mat(const Eigen::MatrixXd& chol_lower, const Eigen::MatrixXd& b);

/// log det A from its lower Cholesky factor.
double logdet_chol(const Eigen::MatrixXd& chol_lower);

struct PinvResult {
  Eigen::MatrixXd pinv;
  int rank = 0;
  double smallest_sv = 0.0;
  double largest_sv = 0.0;
};

/// Moore-Penrose pseudoinverse via SVD with a relative rank tolerance.
PinvResult pseudoinverse(const Eigen::MatrixXd& h, double rank_tol = 1e-10);

}  // namespace taskinfo
