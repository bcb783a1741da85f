#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "mpl/covariance.hpp"
#include "mpl/panel.hpp"

namespace mpl {

/// GLS fit of the deflator/index model: deflators delta (base entry 1),
/// indices lambda (reciprocal map of delta), reference prices, the kernel
/// kappa whose inverse scales the deflator covariance, and residuals.
///
/// kappa rows/cols follow period order with the base period removed.
struct MplEstimate {
  std::vector<std::string> entities;
  std::vector<std::string> periods;
  int base_index = 0;

  Eigen::VectorXd deflators;         // length T, base entry exactly 1
  Eigen::VectorXd indices;           // length T, reciprocal map of deflators
  Eigen::VectorXd reference_prices;  // length N
  Eigen::MatrixXd kappa;             // (T-1) x (T-1), symmetric
  double sigma2 = 0.0;
  int dof = 0;                       // NT - (N + T - 1)
  Eigen::VectorXd deflator_se;       // length T, base entry 0
  Eigen::VectorXd index_se;          // length T, base entry 0
  Eigen::MatrixXd residuals;         // N x T
  std::vector<std::string> warnings;
};

/// Closed-form GLS estimate of the deflator vector and reference prices.
/// Every linear system is solved through a Cholesky factorization; condition
/// numbers above 1e12 raise an IllConditioned warning, singular kernels throw.
MplEstimate estimate_mpl(const Panel& panel, const CovarianceSpec& cov);

/// Stationary specialization: all diagonal blocks equal, so the inner sum
/// collapses to a single Hadamard product. Same estimate as estimate_mpl
/// with a shared block; kept as a distinct algebraic route.
MplEstimate estimate_mpl_stationary(const Panel& panel, const Eigen::MatrixXd& shared_block);

struct FglsOptions {
  double shrinkage = 0.25;
  double ridge = 1e-8;
  int iterations = 1;  // 1 = classic two-step; >1 re-estimates from GLS residuals
};

/// Two-step (optionally iterated) feasible GLS for a named regime. When
/// cov_out is given it receives the covariance spec the final pass used.
MplEstimate estimate_fgls(const Panel& panel, Regime regime, const FglsOptions& opts = {},
                          CovarianceSpec* cov_out = nullptr);

struct TwoPeriodFit {
  double lambda = 0.0;
  Eigen::VectorXd weights;  // zero for commodities absent in either period
};

/// Two-period index as a ratio of weighted price averages. theta holds the
/// per-commodity error variances; commodities absent in either period get
/// zero weight and their theta entry is ignored.
TwoPeriodFit two_period_closed_form(const Eigen::VectorXd& q1, const Eigen::VectorXd& q2,
                                    const Eigen::VectorXd& v1, const Eigen::VectorXd& v2,
                                    const Eigen::VectorXd& theta);

/// Elementwise 1/x for non-null entries, 0 otherwise.
Eigen::VectorXd reciprocal_map(const Eigen::VectorXd& delta);

}  // namespace mpl
