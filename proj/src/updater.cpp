#include "mpl/updater.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "mpl/detail/blocks.hpp"

namespace mpl {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void NewColumn::validate(const Panel& panel) const {
  if (quantities.size() != panel.rows() || values.size() != panel.rows())
    fail(Errc::ShapeMismatch, "new column length does not match the panel basket");
  for (long i = 0; i < quantities.size(); ++i) {
    if ((quantities(i) == 0.0) != (values(i) == 0.0))
      fail(Errc::InvalidInput, "new column must pair zero quantity with zero value");
    if (quantities(i) < 0.0 || values(i) < 0.0)
      fail(Errc::InvalidInput, "new column cells must be non-negative");
  }
  if (block) {
    if (block->rows() != panel.rows() || block->cols() != panel.rows())
      fail(Errc::DimensionMismatch, "override block dimension mismatch");
    if (!block->isApprox(block->transpose(), 1e-10))
      fail(Errc::InvalidInput, "override block is not symmetric");
  }
}

Panel append_column(const Panel& panel, const NewColumn& col) {
  col.validate(panel);
  Panel out = panel;
  out.periods.push_back(col.label.empty() ? "t+" + std::to_string(panel.cols() + 1) : col.label);
  out.quantities.conservativeResize(Eigen::NoChange, panel.cols() + 1);
  out.values.conservativeResize(Eigen::NoChange, panel.cols() + 1);
  out.quantities.col(panel.cols()) = col.quantities;
  out.values.col(panel.cols()) = col.values;
  out.validate();
  return out;
}

namespace {

MatrixXd inverse_of_block(const MatrixXd& block, const char* what) {
  Eigen::LLT<MatrixXd> llt(block);
  if (llt.info() != Eigen::Success)
    fail(Errc::SingularBlock, std::string(what) + ": block not positive definite");
  return llt.solve(MatrixXd::Identity(block.rows(), block.cols()));
}

/// The new column's covariance block: explicit override, else the spec's
/// shared block. Per-period specs need the override.
MatrixXd new_column_block(const NewColumn& col, const CovarianceSpec& cov) {
  if (col.block) return *col.block;
  if (!cov.shared())
    fail(Errc::InvalidInput,
         "per-period covariance spec requires an explicit block for the new column");
  return cov.blocks[0];
}

}  // namespace

MplEstimate update_multilateral(const Panel& panel, const NewColumn& col,
                                const CovarianceSpec& cov) {
  panel.validate();
  cov.validate(panel.rows(), panel.cols());
  col.validate(panel);

  const int n = panel.rows();
  const int t = panel.cols();
  const auto order = detail::base_first_order(t, panel.base_index);

  MatrixXd qb(n, t), vb(n, t);
  for (int k = 0; k < t; ++k) {
    qb.col(k) = panel.quantities.col(order[k]);
    vb.col(k) = panel.values.col(order[k]);
  }
  const detail::BlockSet blocks = detail::factor_blocks(cov, order);
  const detail::KernelParts parts = detail::assemble_kernel(qb, vb, blocks);

  const MatrixXd w_new = inverse_of_block(new_column_block(col, cov), "multilateral update");
  const VectorXd vt_new = w_new * col.values;

  // Extended kernel: one extra diagonal entry, one extra column of M and the
  // rank-one-weighted increment of D.
  MatrixXd d_ext =
      parts.D + (col.quantities * col.quantities.transpose()).cwiseProduct(w_new);
  d_ext = ((d_ext + d_ext.transpose()) / 2.0).eval();
  MatrixXd m_ext(n, t);
  m_ext.leftCols(t - 1) = parts.M;
  m_ext.col(t - 1) = col.quantities.cwiseProduct(vt_new);
  VectorXd a_ext(t);
  a_ext.head(t - 1) = parts.a_diag;
  a_ext(t - 1) = vt_new.dot(col.values);

  Eigen::LLT<MatrixXd> lltD(d_ext);
  if (lltD.info() != Eigen::Success)
    fail(Errc::SingularKernel, "extended quantity kernel is singular");
  const MatrixXd z_ext = lltD.solve(m_ext);
  const VectorXd z_g = lltD.solve(parts.g);

  MatrixXd kappa = MatrixXd(a_ext.asDiagonal()) - m_ext.transpose() * z_ext;
  kappa = ((kappa + kappa.transpose()) / 2.0).eval();
  Eigen::LLT<MatrixXd> lltK(kappa);
  if (lltK.info() != Eigen::Success)
    fail(Errc::SingularKernel, "extended deflator kernel is singular");
  const VectorXd delta_tail = lltK.solve(m_ext.transpose() * z_g);
  const VectorXd pref = z_g + z_ext * delta_tail;

  MplEstimate est;
  est.entities = panel.entities;
  est.periods = panel.periods;
  est.periods.push_back(col.label.empty() ? "t+" + std::to_string(t + 1) : col.label);
  est.base_index = panel.base_index;
  est.reference_prices = pref;
  est.kappa = kappa;

  est.deflators.resize(t + 1);
  est.deflators(panel.base_index) = 1.0;
  for (int k = 1; k < t; ++k) est.deflators(order[k]) = delta_tail(k - 1);
  est.deflators(t) = delta_tail(t - 1);
  est.indices = reciprocal_map(est.deflators);

  est.residuals.resize(n, t + 1);
  double ssr = 0.0;
  for (int k = 0; k < t; ++k) {
    const VectorXd r =
        est.deflators(order[k]) * vb.col(k) - pref.cwiseProduct(qb.col(k));
    est.residuals.col(order[k]) = r;
    ssr += r.dot(blocks.inv(k) * r);
  }
  {
    const VectorXd r = est.deflators(t) * col.values - pref.cwiseProduct(col.quantities);
    est.residuals.col(t) = r;
    ssr += r.dot(w_new * r);
  }
  est.dof = n * (t + 1) - (n + t);
  est.sigma2 = est.dof > 0 ? ssr / est.dof : 0.0;

  const MatrixXd kappa_inv = lltK.solve(MatrixXd::Identity(t, t));
  est.deflator_se = VectorXd::Zero(t + 1);
  est.index_se = VectorXd::Zero(t + 1);
  auto set_se = [&](int orig, int pos) {
    const double var_d = est.sigma2 * kappa_inv(pos, pos);
    est.deflator_se(orig) = var_d > 0 ? std::sqrt(var_d) : 0.0;
    const double d = est.deflators(orig);
    est.index_se(orig) = d != 0.0 ? est.deflator_se(orig) / (d * d) : 0.0;
  };
  for (int k = 1; k < t; ++k) set_se(order[k], k - 1);
  set_se(t, t - 1);

  for (int j = 0; j <= t; ++j)
    if (est.deflators(j) <= 0.0 && j != panel.base_index)
      est.warnings.push_back("NonPositiveDeflator: period " + est.periods[j]);
  return est;
}

PeriodUpdate update_multiperiod(const MplEstimate& prev, const Panel& panel,
                                const NewColumn& col, const CovarianceSpec& cov) {
  panel.validate();
  cov.validate(panel.rows(), panel.cols());
  col.validate(panel);
  if (prev.deflators.size() != panel.cols() ||
      prev.reference_prices.size() != panel.rows() || prev.base_index != panel.base_index)
    fail(Errc::StaleEstimate, "previous estimate does not match the panel shape");

  const int n = panel.rows();
  const int t = panel.cols();
  const std::vector<int> identity_order = [&] {
    std::vector<int> o(t);
    for (int j = 0; j < t; ++j) o[j] = j;
    return o;
  }();
  const detail::BlockSet blocks = detail::factor_blocks(cov, identity_order);

  const MatrixXd w_new = inverse_of_block(new_column_block(col, cov), "multi-period update");
  const VectorXd vt_new = w_new * col.values;

  // All T existing periods enter through the frozen deflators; no reordering
  // is needed because the sums below run over the full set.
  MatrixXd d_ext = (col.quantities * col.quantities.transpose()).cwiseProduct(w_new);
  VectorXd c = VectorXd::Zero(n);
  for (int j = 0; j < t; ++j) {
    const VectorXd& q_j = panel.quantities.col(j);
    d_ext.noalias() += (q_j * q_j.transpose()).cwiseProduct(blocks.inv(j));
    c += prev.deflators(j) * q_j.cwiseProduct(blocks.inv(j) * panel.values.col(j));
  }
  d_ext = ((d_ext + d_ext.transpose()) / 2.0).eval();

  Eigen::LLT<MatrixXd> lltD(d_ext);
  if (lltD.info() != Eigen::Success)
    fail(Errc::SingularKernel, "extended quantity kernel is singular");

  const VectorXd b = col.quantities.cwiseProduct(vt_new);
  const VectorXd d_inv_b = lltD.solve(b);
  const VectorXd d_inv_c = lltD.solve(c);
  const double denom = vt_new.dot(col.values) - b.dot(d_inv_b);
  if (!(denom > 0.0))
    fail(Errc::SingularKernel, "new-period kernel is not positive");

  PeriodUpdate up;
  up.delta_new = b.dot(d_inv_c) / denom;
  up.lambda_new = up.delta_new != 0.0 ? 1.0 / up.delta_new : 0.0;
  up.reference_prices = lltD.solve(c + up.delta_new * b);

  double ssr = 0.0;
  for (int j = 0; j < t; ++j) {
    const VectorXd r = prev.deflators(j) * panel.values.col(j) -
                       up.reference_prices.cwiseProduct(panel.quantities.col(j));
    ssr += r.dot(blocks.inv(j) * r);
  }
  {
    const VectorXd r =
        up.delta_new * col.values - up.reference_prices.cwiseProduct(col.quantities);
    ssr += r.dot(w_new * r);
  }
  const int dof = n * (t + 1) - (n + 1);
  up.sigma2 = dof > 0 ? ssr / dof : 0.0;
  up.se_delta = std::sqrt(up.sigma2 / denom);
  up.se_lambda =
      up.delta_new != 0.0 ? up.se_delta / (up.delta_new * up.delta_new) : 0.0;
  return up;
}

}  // namespace mpl
