#pragma once

// Shared internals for the closed-form estimators and the updaters: block
// factorization of the error covariance and assembly of the kernel parts.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <vector>

#include "mpl/covariance.hpp"
#include "mpl/errors.hpp"

namespace mpl::detail {

inline constexpr double kConditionWarnThreshold = 1e12;

/// Periods reordered so the base comes first; the remaining periods keep
/// their original relative order.
inline std::vector<int> base_first_order(int t, int base) {
  std::vector<int> order{base};
  for (int j = 0; j < t; ++j)
    if (j != base) order.push_back(j);
  return order;
}

/// Condition number of a symmetric matrix from its eigenvalue range.
inline double sym_condition(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

/// Factored covariance blocks in a given period order. The explicit inverse
/// entries are required by the Hadamard products in the kernel.
struct BlockSet {
  std::vector<Eigen::MatrixXd> inverses;  // one per distinct block
  std::vector<int> index_of;              // position in order -> inverse index
  double max_condition = 1.0;

  const Eigen::MatrixXd& inv(int j) const { return inverses[index_of[j]]; }
};

inline BlockSet factor_blocks(const CovarianceSpec& cov, const std::vector<int>& order) {
  BlockSet out;
  const int t = static_cast<int>(order.size());
  out.index_of.resize(t);
  if (cov.shared()) {
    Eigen::LLT<Eigen::MatrixXd> llt(cov.blocks[0]);
    if (llt.info() != Eigen::Success)
      fail(Errc::SingularBlock, "covariance block is not positive definite");
    out.max_condition = sym_condition(cov.blocks[0]);
    const auto n = cov.blocks[0].rows();
    out.inverses.push_back(llt.solve(Eigen::MatrixXd::Identity(n, n)));
    std::fill(out.index_of.begin(), out.index_of.end(), 0);
    return out;
  }
  for (int k = 0; k < t; ++k) {
    const Eigen::MatrixXd& b = cov.block(order[k]);
    Eigen::LLT<Eigen::MatrixXd> llt(b);
    if (llt.info() != Eigen::Success)
      fail(Errc::SingularBlock,
           "covariance block for period " + std::to_string(order[k]) + " is not positive definite");
    out.max_condition = std::max(out.max_condition, sym_condition(b));
    out.inverses.push_back(llt.solve(Eigen::MatrixXd::Identity(b.rows(), b.cols())));
    out.index_of[k] = k;
  }
  return out;
}

/// Kernel ingredients on base-first matrices Qb, Vb:
///   Vt      columns Omega_jj^{-1} v_j,
///   D       sum_j q_j q_j' * Omega_jj^{-1},
///   g       q_base * Vt_base,
///   M       columns q_j * Vt_j for the non-base periods,
///   a_diag  entries Vt_j . v_j for the non-base periods.
struct KernelParts {
  Eigen::MatrixXd Vt;
  Eigen::MatrixXd D;
  Eigen::VectorXd g;
  Eigen::MatrixXd M;
  Eigen::VectorXd a_diag;
};

inline KernelParts assemble_kernel(const Eigen::MatrixXd& Qb, const Eigen::MatrixXd& Vb,
                                   const BlockSet& blocks) {
  const int n = static_cast<int>(Qb.rows());
  const int t = static_cast<int>(Qb.cols());
  KernelParts parts;
  parts.Vt.resize(n, t);
  parts.D = Eigen::MatrixXd::Zero(n, n);
  parts.M.resize(n, t - 1);
  parts.a_diag.resize(t - 1);
  for (int j = 0; j < t; ++j) {
    const Eigen::MatrixXd& w = blocks.inv(j);
    parts.Vt.col(j) = w * Vb.col(j);
    parts.D.noalias() += (Qb.col(j) * Qb.col(j).transpose()).cwiseProduct(w);
    if (j > 0) {
      parts.M.col(j - 1) = Qb.col(j).cwiseProduct(parts.Vt.col(j));
      parts.a_diag(j - 1) = parts.Vt.col(j).dot(Vb.col(j));
    }
  }
  parts.g = Qb.col(0).cwiseProduct(parts.Vt.col(0));
  parts.D = ((parts.D + parts.D.transpose()) / 2.0).eval();
  return parts;
}

}  // namespace mpl::detail
