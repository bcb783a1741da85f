#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "mpl/panel.hpp"

namespace mpl {

/// Observed prices with a presence mask and per-period expenditure shares.
struct PriceTableau {
  std::vector<std::string> entities;
  std::vector<std::string> periods;
  Eigen::MatrixXd prices;  // N x T, meaningful where mask is set
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask;
  Eigen::MatrixXd shares;  // N x T, sums to 1 over present cells per period
  int base_index = 0;
};

PriceTableau tableau_from_panel(const Panel& panel);

/// Dummy-variable log-price regression fit: one effect per entity, one per
/// non-base period; index_t = exp(beta_t) with the base pinned at 1.
struct CpdFit {
  Eigen::VectorXd indices;          // length T, base entry 1
  Eigen::VectorXd se;               // length T, base entry 0 (delta method)
  Eigen::VectorXd entity_prices;    // length N, exp(alpha_i)
  double sigma2 = 0.0;
  int dof = 0;
};

CpdFit cpd_estimate(const PriceTableau& tab, bool weighted, int base);

}  // namespace mpl
