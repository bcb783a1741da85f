#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "mpl/panel.hpp"

namespace mpl {

/// Error-term regimes: spherical (OLS), heteroskedastic-uncorrelated (GLS-d),
/// stationary shrunk full block (GLS-s), heteroskedastic-correlated (GLS-f).
enum class Regime { Ols, GlsD, GlsS, GlsF };

const char* regime_name(Regime r);
Regime parse_regime(const std::string& name);

/// Block-diagonal error covariance. One shared N x N block (stationary
/// regimes) or T distinct per-period blocks.
struct CovarianceSpec {
  Regime regime = Regime::Ols;
  std::vector<Eigen::MatrixXd> blocks;  // size 1 (shared) or T
  double shrinkage = 0.25;
  double ridge = 1e-8;

  bool shared() const { return blocks.size() == 1; }
  const Eigen::MatrixXd& block(int j) const { return shared() ? blocks[0] : blocks.at(j); }
  int block_dim() const { return blocks.empty() ? 0 : static_cast<int>(blocks[0].rows()); }

  static CovarianceSpec ols(int n);
  static CovarianceSpec shared_block(Regime regime, Eigen::MatrixXd block);
  static CovarianceSpec per_period(std::vector<Eigen::MatrixXd> blocks);

  /// Checks block count/shape/symmetry against an N x T panel.
  void validate(int n, int t) const;
};

/// Feasible-GLS covariance step: fits the spherical model first and derives
/// the regime's block from those residuals (present cells only).
CovarianceSpec estimate_omega(const Panel& panel, Regime regime, double shrinkage = 0.25,
                              double ridge = 1e-8);

/// Same recipe applied to externally supplied residuals (used for iterated
/// FGLS and for refreshing the block when a panel grows by one column).
CovarianceSpec omega_from_residuals(const Panel& panel, const Eigen::MatrixXd& residuals,
                                    Regime regime, double shrinkage = 0.25,
                                    double ridge = 1e-8);

}  // namespace mpl
