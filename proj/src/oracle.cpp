#include "mpl/oracle.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "mpl/detail/blocks.hpp"

namespace mpl::oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd transition_matrix(int j) {
  if (j < 1) fail(Errc::InvalidInput, "transition matrix needs j >= 1");
  MatrixXd rt = MatrixXd::Zero(static_cast<long>(j) * j, j);
  for (int k = 0; k < j; ++k) rt(static_cast<long>(k) * j + k, k) = 1.0;
  return rt;
}

MatrixXd kronecker(const MatrixXd& a, const MatrixXd& b) {
  MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

StackedSystem build_stacked(const Panel& panel, const CovarianceSpec& cov) {
  panel.validate();
  cov.validate(panel.rows(), panel.cols());
  const int n = panel.rows();
  const int t = panel.cols();
  const auto order = detail::base_first_order(t, panel.base_index);

  MatrixXd qb(n, t), vb(n, t);
  for (int k = 0; k < t; ++k) {
    qb.col(k) = panel.quantities.col(order[k]);
    vb.col(k) = panel.values.col(order[k]);
  }
  const MatrixXd v1 = vb.rightCols(t - 1);
  const MatrixXd q1 = qb.rightCols(t - 1);

  const MatrixXd rn_t = transition_matrix(n);       // N^2 x N
  const MatrixXd rt1_t = transition_matrix(t - 1);  // (T-1)^2 x (T-1)
  const MatrixXd eye_n = MatrixXd::Identity(n, n);

  StackedSystem sys;
  sys.n_entities = n;
  sys.n_periods = t;
  sys.X = MatrixXd::Zero(static_cast<long>(n) * t, n + t - 1);
  // top row block: [0, (q1' (x) I_N) R_N']
  sys.X.block(0, t - 1, n, n) = kronecker(qb.col(0).transpose(), eye_n) * rn_t;
  // lower blocks: [(I_{T-1} (x) (-V1)) R_{T-1}', (Q1' (x) I_N) R_N']
  sys.X.block(n, 0, static_cast<long>(n) * (t - 1), t - 1) =
      kronecker(MatrixXd::Identity(t - 1, t - 1), (-v1).eval()) * rt1_t;
  sys.X.block(n, t - 1, static_cast<long>(n) * (t - 1), n) =
      kronecker(q1.transpose(), eye_n) * rn_t;

  sys.y = VectorXd::Zero(static_cast<long>(n) * t);
  sys.y.head(n) = vb.col(0);

  sys.omega = MatrixXd::Zero(static_cast<long>(n) * t, static_cast<long>(n) * t);
  for (int k = 0; k < t; ++k)
    sys.omega.block(static_cast<long>(k) * n, static_cast<long>(k) * n, n, n) =
        cov.block(order[k]);
  return sys;
}

GlsSolution gls_solve(const StackedSystem& sys) {
  if (sys.X.rows() != sys.y.size() || sys.omega.rows() != sys.y.size())
    fail(Errc::DimensionMismatch, "stacked system shapes disagree");
  Eigen::LLT<MatrixXd> llt_omega(sys.omega);
  if (llt_omega.info() != Eigen::Success)
    fail(Errc::SingularBlock, "stacked omega is not positive definite");
  const MatrixXd oi_x = llt_omega.solve(sys.X);
  const MatrixXd gram = sys.X.transpose() * oi_x;
  Eigen::LLT<MatrixXd> llt_gram(((gram + gram.transpose()) / 2.0).eval());
  if (llt_gram.info() != Eigen::Success)
    fail(Errc::SingularNormalEquations, "X' Omega^-1 X is singular");
  GlsSolution sol;
  sol.beta = llt_gram.solve(sys.X.transpose() * llt_omega.solve(sys.y));
  sol.covariance = llt_gram.solve(MatrixXd::Identity(gram.rows(), gram.cols()));
  return sol;
}

MplEstimate stacked_estimate(const Panel& panel, const CovarianceSpec& cov) {
  const StackedSystem sys = build_stacked(panel, cov);
  const GlsSolution sol = gls_solve(sys);
  const int n = sys.n_entities;
  const int t = sys.n_periods;
  const auto order = detail::base_first_order(t, panel.base_index);

  MplEstimate est;
  est.entities = panel.entities;
  est.periods = panel.periods;
  est.base_index = panel.base_index;
  est.reference_prices = sol.beta.tail(n);

  VectorXd delta_est(t);
  delta_est(0) = 1.0;
  delta_est.tail(t - 1) = sol.beta.head(t - 1);
  est.deflators.resize(t);
  for (int k = 0; k < t; ++k) est.deflators(order[k]) = delta_est(k);
  est.indices = reciprocal_map(est.deflators);

  // kappa is the inverse of the leading covariance block.
  const MatrixXd lam11 = sol.covariance.topLeftCorner(t - 1, t - 1);
  Eigen::LLT<MatrixXd> llt_lam(((lam11 + lam11.transpose()) / 2.0).eval());
  if (llt_lam.info() != Eigen::Success)
    fail(Errc::SingularNormalEquations, "deflator covariance block is singular");
  est.kappa = llt_lam.solve(MatrixXd::Identity(t - 1, t - 1));
  est.kappa = ((est.kappa + est.kappa.transpose()) / 2.0).eval();

  const VectorXd mu = sys.y - sys.X * sol.beta;
  Eigen::LLT<MatrixXd> llt_omega(sys.omega);
  est.dof = n * t - (n + t - 1);
  est.sigma2 = est.dof > 0 ? mu.dot(llt_omega.solve(mu)) / est.dof : 0.0;
  if (est.dof <= 0) est.warnings.push_back("ZeroDegreesOfFreedom: sigma2 reported as 0");

  est.residuals.resize(n, t);
  est.deflator_se = VectorXd::Zero(t);
  est.index_se = VectorXd::Zero(t);
  for (int k = 0; k < t; ++k) {
    est.residuals.col(order[k]) = mu.segment(static_cast<long>(k) * n, n);
    if (k > 0) {
      const double var_d = est.sigma2 * lam11(k - 1, k - 1);
      est.deflator_se(order[k]) = var_d > 0 ? std::sqrt(var_d) : 0.0;
      const double d = delta_est(k);
      est.index_se(order[k]) = d != 0.0 ? est.deflator_se(order[k]) / (d * d) : 0.0;
    }
  }
  return est;
}

}  // namespace mpl::oracle
