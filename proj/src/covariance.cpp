#include "mpl/covariance.hpp"

#include <Eigen/Cholesky>

#include "mpl/estimator.hpp"

namespace mpl {

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::Ols: return "ols";
    case Regime::GlsD: return "gls-d";
    case Regime::GlsS: return "gls-s";
    case Regime::GlsF: return "gls-f";
  }
  return "?";
}

Regime parse_regime(const std::string& name) {
  if (name == "ols") return Regime::Ols;
  if (name == "gls-d" || name == "glsd") return Regime::GlsD;
  if (name == "gls-s" || name == "glss") return Regime::GlsS;
  if (name == "gls-f" || name == "glsf") return Regime::GlsF;
  fail(Errc::InvalidInput, "unknown regime '" + name + "' (ols, gls-d, gls-s, gls-f)");
}

CovarianceSpec CovarianceSpec::ols(int n) {
  CovarianceSpec spec;
  spec.regime = Regime::Ols;
  spec.blocks = {Eigen::MatrixXd::Identity(n, n)};
  return spec;
}

CovarianceSpec CovarianceSpec::shared_block(Regime regime, Eigen::MatrixXd block) {
  CovarianceSpec spec;
  spec.regime = regime;
  spec.blocks = {std::move(block)};
  return spec;
}

CovarianceSpec CovarianceSpec::per_period(std::vector<Eigen::MatrixXd> blocks) {
  CovarianceSpec spec;
  spec.regime = Regime::GlsF;
  spec.blocks = std::move(blocks);
  return spec;
}

void CovarianceSpec::validate(int n, int t) const {
  if (blocks.empty()) fail(Errc::InvalidInput, "covariance spec has no blocks");
  if (blocks.size() != 1 && blocks.size() != static_cast<size_t>(t))
    fail(Errc::DimensionMismatch, "covariance needs one shared block or one per period");
  for (const auto& b : blocks) {
    if (b.rows() != n || b.cols() != n)
      fail(Errc::DimensionMismatch, "covariance block dimension does not match basket size");
    if (!b.isApprox(b.transpose(), 1e-10))
      fail(Errc::InvalidInput, "covariance block is not symmetric");
  }
  if (shrinkage < 0.0 || shrinkage > 1.0) fail(Errc::InvalidInput, "shrinkage outside [0, 1]");
  if (ridge < 0.0) fail(Errc::InvalidInput, "ridge must be non-negative");
}

namespace {

void check_spd(const Eigen::MatrixXd& block, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(block);
  if (llt.info() != Eigen::Success)
    fail(Errc::SingularBlock, std::string(what) + " block not positive definite after ridge");
}

}  // namespace

CovarianceSpec omega_from_residuals(const Panel& panel, const Eigen::MatrixXd& residuals,
                                    Regime regime, double shrinkage, double ridge) {
  const int n = panel.rows();
  const int t = panel.cols();
  if (residuals.rows() != n || residuals.cols() != t)
    fail(Errc::DimensionMismatch, "residual matrix does not match panel shape");
  if (regime == Regime::Ols) return CovarianceSpec::ols(n);

  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);

  if (regime == Regime::GlsD) {
    Eigen::VectorXd theta(n);
    for (int i = 0; i < n; ++i) {
      double ss = 0.0;
      int count = 0;
      for (int j = 0; j < t; ++j)
        if (panel.present(i, j)) {
          ss += residuals(i, j) * residuals(i, j);
          ++count;
        }
      if (count < 1)
        fail(Errc::DegenerateResiduals,
             "entity " + panel.entities[i] + " has no present residual");
      theta(i) = ss / count;
    }
    Eigen::MatrixXd block = Eigen::MatrixXd(theta.asDiagonal()) + ridge * eye;
    check_spd(block, "gls-d");
    CovarianceSpec spec = CovarianceSpec::shared_block(Regime::GlsD, std::move(block));
    spec.shrinkage = shrinkage;
    spec.ridge = ridge;
    return spec;
  }

  // Full block from the per-period residual vectors, moments over the periods
  // where both entities are present.
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = i; k < n; ++k) {
      double sum = 0.0;
      int count = 0;
      for (int j = 0; j < t; ++j)
        if (panel.present(i, j) && panel.present(k, j)) {
          sum += residuals(i, j) * residuals(k, j);
          ++count;
        }
      s(i, k) = s(k, i) = count > 0 ? sum / count : 0.0;
    }

  Eigen::MatrixXd block;
  if (regime == Regime::GlsS) {
    block = (1.0 - shrinkage) * s + shrinkage * Eigen::MatrixXd(s.diagonal().asDiagonal()) +
            ridge * eye;
  } else {
    block = s + ridge * eye;
  }
  check_spd(block, regime == Regime::GlsS ? "gls-s" : "gls-f");
  CovarianceSpec spec = CovarianceSpec::shared_block(regime, std::move(block));
  spec.shrinkage = shrinkage;
  spec.ridge = ridge;
  return spec;
}

CovarianceSpec estimate_omega(const Panel& panel, Regime regime, double shrinkage, double ridge) {
  if (regime == Regime::Ols) return CovarianceSpec::ols(panel.rows());
  const MplEstimate ols_fit = estimate_mpl(panel, CovarianceSpec::ols(panel.rows()));
  return omega_from_residuals(panel, ols_fit.residuals, regime, shrinkage, ridge);
}

}  // namespace mpl
