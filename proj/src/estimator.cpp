#include "mpl/estimator.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "mpl/detail/blocks.hpp"

namespace mpl {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Reordered {
  MatrixXd Q, V;
  std::vector<int> order;  // estimation position -> original period index
};

Reordered base_first(const Panel& panel) {
  Reordered r;
  r.order = detail::base_first_order(panel.cols(), panel.base_index);
  r.Q.resize(panel.rows(), panel.cols());
  r.V.resize(panel.rows(), panel.cols());
  for (size_t k = 0; k < r.order.size(); ++k) {
    r.Q.col(k) = panel.quantities.col(r.order[k]);
    r.V.col(k) = panel.values.col(r.order[k]);
  }
  return r;
}

void warn_condition(std::vector<std::string>& warnings, const char* what, double cond) {
  if (cond > detail::kConditionWarnThreshold)
    warnings.push_back(std::string("IllConditioned: ") + what +
                       " condition number " + std::to_string(cond));
}

/// Solves the partitioned system given the kernel parts; fills everything in
/// the estimate except labels.
MplEstimate solve_from_parts(const Panel& panel, const Reordered& ro,
                             const detail::BlockSet& blocks,
                             const detail::KernelParts& parts,
                             std::vector<std::string> warnings) {
  const int n = panel.rows();
  const int t = panel.cols();

  warn_condition(warnings, "covariance block", blocks.max_condition);

  Eigen::LLT<MatrixXd> lltD(parts.D);
  if (lltD.info() != Eigen::Success)
    fail(Errc::SingularKernel, "quantity kernel D is singular; is the panel basket-filtered?");
  warn_condition(warnings, "kernel D", detail::sym_condition(parts.D));

  const MatrixXd Z = lltD.solve(parts.M);
  const VectorXd z = lltD.solve(parts.g);

  MatrixXd kappa = MatrixXd(parts.a_diag.asDiagonal()) - parts.M.transpose() * Z;
  kappa = ((kappa + kappa.transpose()) / 2.0).eval();
  Eigen::LLT<MatrixXd> lltK(kappa);
  if (lltK.info() != Eigen::Success)
    fail(Errc::SingularKernel, "deflator kernel kappa is singular");
  warn_condition(warnings, "kernel kappa", detail::sym_condition(kappa));

  const VectorXd delta_tail = lltK.solve(parts.M.transpose() * z);
  const VectorXd pref = z + Z * delta_tail;

  VectorXd delta_est(t);
  delta_est(0) = 1.0;
  delta_est.tail(t - 1) = delta_tail;

  // Residuals in estimation order, then scattered back.
  MatrixXd resid_est(n, t);
  double ssr = 0.0;
  for (int j = 0; j < t; ++j) {
    resid_est.col(j) = delta_est(j) * ro.V.col(j) - pref.cwiseProduct(ro.Q.col(j));
    ssr += resid_est.col(j).dot(blocks.inv(j) * resid_est.col(j));
  }

  MplEstimate est;
  est.entities = panel.entities;
  est.periods = panel.periods;
  est.base_index = panel.base_index;
  est.reference_prices = pref;
  est.kappa = kappa;
  est.dof = n * t - (n + t - 1);
  if (est.dof > 0) {
    est.sigma2 = ssr / est.dof;
  } else {
    est.sigma2 = 0.0;
    warnings.push_back("ZeroDegreesOfFreedom: sigma2 reported as 0");
  }

  const MatrixXd kappa_inv = lltK.solve(MatrixXd::Identity(t - 1, t - 1));

  est.deflators.resize(t);
  est.deflator_se = VectorXd::Zero(t);
  est.index_se = VectorXd::Zero(t);
  est.residuals.resize(n, t);
  for (int j = 0; j < t; ++j) {
    const int orig = ro.order[j];
    est.deflators(orig) = delta_est(j);
    est.residuals.col(orig) = resid_est.col(j);
    if (j > 0) {
      const double var_d = est.sigma2 * kappa_inv(j - 1, j - 1);
      est.deflator_se(orig) = var_d > 0 ? std::sqrt(var_d) : 0.0;
      const double d = delta_est(j);
      est.index_se(orig) = d != 0.0 ? est.deflator_se(orig) / (d * d) : 0.0;
    }
  }
  est.indices = reciprocal_map(est.deflators);

  for (int j = 0; j < t; ++j)
    if (est.deflators(j) <= 0.0 && j != panel.base_index)
      warnings.push_back("NonPositiveDeflator: period " + panel.periods[j] + " has deflator " +
                         std::to_string(est.deflators(j)));
  est.warnings = std::move(warnings);
  return est;
}

}  // namespace

MplEstimate estimate_mpl(const Panel& panel, const CovarianceSpec& cov) {
  panel.validate();
  cov.validate(panel.rows(), panel.cols());
  const Reordered ro = base_first(panel);
  const detail::BlockSet blocks = detail::factor_blocks(cov, ro.order);
  const detail::KernelParts parts = detail::assemble_kernel(ro.Q, ro.V, blocks);
  return solve_from_parts(panel, ro, blocks, parts, {});
}

MplEstimate estimate_mpl_stationary(const Panel& panel, const Eigen::MatrixXd& shared_block) {
  panel.validate();
  CovarianceSpec cov = CovarianceSpec::shared_block(Regime::GlsS, shared_block);
  cov.validate(panel.rows(), panel.cols());
  const Reordered ro = base_first(panel);
  const detail::BlockSet blocks = detail::factor_blocks(cov, ro.order);

  // Stationary collapse: the quantity outer products are summed first and
  // hit by a single Hadamard product with the shared inverse block.
  const int n = panel.rows();
  const int t = panel.cols();
  const Eigen::MatrixXd& w = blocks.inverses[0];
  detail::KernelParts parts;
  parts.Vt = w * ro.V;
  MatrixXd qsum = MatrixXd::Zero(n, n);
  for (int j = 0; j < t; ++j) qsum.noalias() += ro.Q.col(j) * ro.Q.col(j).transpose();
  parts.D = qsum.cwiseProduct(w);
  parts.D = ((parts.D + parts.D.transpose()) / 2.0).eval();
  parts.M.resize(n, t - 1);
  parts.a_diag.resize(t - 1);
  for (int j = 1; j < t; ++j) {
    parts.M.col(j - 1) = ro.Q.col(j).cwiseProduct(parts.Vt.col(j));
    parts.a_diag(j - 1) = parts.Vt.col(j).dot(ro.V.col(j));
  }
  parts.g = ro.Q.col(0).cwiseProduct(parts.Vt.col(0));
  return solve_from_parts(panel, ro, blocks, parts, {});
}

MplEstimate estimate_fgls(const Panel& panel, Regime regime, const FglsOptions& opts,
                          CovarianceSpec* cov_out) {
  CovarianceSpec cov = CovarianceSpec::ols(panel.rows());
  MplEstimate est = estimate_mpl(panel, cov);
  if (regime != Regime::Ols) {
    for (int it = 0; it < std::max(1, opts.iterations); ++it) {
      cov = omega_from_residuals(panel, est.residuals, regime, opts.shrinkage, opts.ridge);
      est = estimate_mpl(panel, cov);
    }
  }
  if (cov_out) *cov_out = cov;
  return est;
}

TwoPeriodFit two_period_closed_form(const Eigen::VectorXd& q1, const Eigen::VectorXd& q2,
                                    const Eigen::VectorXd& v1, const Eigen::VectorXd& v2,
                                    const Eigen::VectorXd& theta) {
  const auto n = q1.size();
  if (q2.size() != n || v1.size() != n || v2.size() != n || theta.size() != n)
    fail(Errc::LengthMismatch, "two-period vectors must share one length");

  TwoPeriodFit fit;
  fit.weights = VectorXd::Zero(n);
  double num = 0.0, den = 0.0;
  bool any = false;
  for (long i = 0; i < n; ++i) {
    if (!(q1(i) > 0.0) || !(q2(i) > 0.0)) continue;  // absent: null weight
    if (!(theta(i) > 0.0))
      fail(Errc::InvalidInput, "theta must be positive for commodities present in both periods");
    const double p1 = v1(i) / q1(i);
    const double p2 = v2(i) / q2(i);
    const double h = q1(i) * q1(i) * q2(i) * q2(i) / (q1(i) * q1(i) + q2(i) * q2(i));
    const double w = p2 * h / theta(i);
    fit.weights(i) = w;
    num += p2 * w;
    den += p1 * w;
    any = true;
  }
  if (!any || den == 0.0)
    fail(Errc::AllWeightsZero, "no commodity is present in both periods");
  fit.lambda = num / den;
  return fit;
}

Eigen::VectorXd reciprocal_map(const Eigen::VectorXd& delta) {
  VectorXd out(delta.size());
  for (long i = 0; i < delta.size(); ++i) out(i) = delta(i) != 0.0 ? 1.0 / delta(i) : 0.0;
  return out;
}

}  // namespace mpl
