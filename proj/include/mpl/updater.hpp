#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "mpl/covariance.hpp"
#include "mpl/estimator.hpp"
#include "mpl/panel.hpp"

namespace mpl {

/// Values and quantities for one additional period/country, aligned with the
/// panel's kept basket. An optional covariance block overrides the regime
/// default for the new column.
struct NewColumn {
  std::string label;
  Eigen::VectorXd quantities;
  Eigen::VectorXd values;
  std::optional<Eigen::MatrixXd> block;

  void validate(const Panel& panel) const;
};

Panel append_column(const Panel& panel, const NewColumn& col);

/// Multilateral update: the extended kernel is assembled from the previous
/// panel's blocks plus the new column, and the whole deflator vector is
/// re-estimated jointly. Equals the fresh estimate on the appended panel;
/// existing entries generally move (no spatial fixity).
MplEstimate update_multilateral(const Panel& panel, const NewColumn& col,
                                const CovarianceSpec& cov);

struct PeriodUpdate {
  double delta_new = 0.0;
  double lambda_new = 0.0;
  double se_delta = 0.0;
  double se_lambda = 0.0;
  double sigma2 = 0.0;
  Eigen::VectorXd reference_prices;  // refreshed under the frozen deflators
};

/// Multi-period update: previous deflators are frozen (temporal fixity) and
/// only the new period's deflator is estimated. prev is never mutated.
PeriodUpdate update_multiperiod(const MplEstimate& prev, const Panel& panel, const NewColumn& col,
                                const CovarianceSpec& cov);

}  // namespace mpl
