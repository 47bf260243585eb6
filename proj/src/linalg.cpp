#include "taskinfo/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace taskinfo {

int cholesky_lower(const Eigen::MatrixXd& a, Eigen::MatrixXd& lower) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) return 0;
  lower = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = a(j, j) - lower.row(j).head(j).squaredNorm();
    if (!(d > 0.0) || !std::isfinite(d)) return static_cast<int>(j);
    lower(j, j) = std::sqrt(d);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = a(i, j) - lower.row(i).head(j).dot(lower.row(j).head(j));
      lower(i, j) = s / lower(j, j);
    }
  }
  return -1;
}

Eigen::MatrixXd require_spd(const Eigen::MatrixXd& a, const char* what) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument(std::string(what) + ": matrix must be square");
  }
  if (!a.isApprox(a.transpose(), 1e-12)) {
    throw std::invalid_argument(std::string(what) + ": matrix must be symmetric");
  }
  Eigen::MatrixXd lower;
  int pivot = cholesky_lower(a, lower);
  if (pivot >= 0) {
    throw std::invalid_argument(std::string(what) +
                                ": not positive definite, Cholesky failed at pivot " +
                                std::to_string(pivot));
  }
  return lower;
}

Eigen::VectorXd solve_chol(const Eigen::MatrixXd& chol_lower, const Eigen::VectorXd& b) {
  Eigen::VectorXd y = chol_lower.triangularView<Eigen::Lower>().solve(b);
  return chol_lower.transpose().triangularView<Eigen::Upper>().solve(y);
}

Eigen::MatrixXd solve_chol_mat(const Eigen::MatrixXd& chol_lower, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd y = chol_lower.triangularView<Eigen::Lower>().solve(b);
  return chol_lower.transpose().triangularView<Eigen::Upper>().solve(y);
}

double quad_form_inv(const Eigen::MatrixXd& chol_lower, const Eigen::VectorXd& x) {
  Eigen::VectorXd y = chol_lower.triangularView<Eigen::Lower>().solve(x);
  return y.squaredNorm();
}

double logdet_chol(const Eigen::MatrixXd& chol_lower) {
  return 2.0 * chol_lower.diagonal().array().log().sum();
}

PinvResult pseudoinverse(const Eigen::MatrixXd& h, double rank_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  PinvResult out;
  out.largest_sv = sv.size() > 0 ? sv[0] : 0.0;
  out.smallest_sv = sv.size() > 0 ? sv[sv.size() - 1] : 0.0;
  const double cut = rank_tol * out.largest_sv;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > cut) {
      inv[i] = 1.0 / sv[i];
      ++out.rank;
    }
  }
  out.pinv = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
  return out;
}

}  // namespace taskinfo
