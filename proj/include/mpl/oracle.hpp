#pragma once

// Brute-force reference implementation: the model is assembled as one stacked
// regression with explicit Kronecker products and solved by generic GLS. It
// exists to validate the closed forms at desk scale and is deliberately
// insensitive to how the production path factors the problem.

#include <Eigen/Dense>

#include "mpl/covariance.hpp"
#include "mpl/estimator.hpp"
#include "mpl/panel.hpp"

namespace mpl::oracle {

/// j^2 x j matrix whose k-th column is e_k (x) e_k; its transpose converts a
/// Kronecker product into a Hadamard product: A * B = R (A (x) B) R'.
Eigen::MatrixXd transition_matrix(int j);

Eigen::MatrixXd kronecker(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Stacked regression y = X beta + mu; beta holds the T-1 non-base deflators
/// followed by the N reference prices. Periods are in base-first order.
struct StackedSystem {
  Eigen::VectorXd y;      // NT
  Eigen::MatrixXd X;      // NT x (N + T - 1)
  Eigen::MatrixXd omega;  // NT x NT block diagonal
  int n_entities = 0;
  int n_periods = 0;
};

StackedSystem build_stacked(const Panel& panel, const CovarianceSpec& cov);

struct GlsSolution {
  Eigen::VectorXd beta;
  Eigen::MatrixXd covariance;  // (X' Omega^-1 X)^-1
};

GlsSolution gls_solve(const StackedSystem& sys);

/// Full estimate through the stacked route, packaged like the closed form.
MplEstimate stacked_estimate(const Panel& panel, const CovarianceSpec& cov);

}  // namespace mpl::oracle
