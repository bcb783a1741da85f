#include "mpl/baseline.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <numeric>

namespace mpl {

using Eigen::MatrixXd;
using Eigen::VectorXd;

PriceTableau tableau_from_panel(const Panel& panel) {
  panel.validate();
  const int n = panel.rows();
  const int t = panel.cols();
  PriceTableau tab;
  tab.entities = panel.entities;
  tab.periods = panel.periods;
  tab.base_index = panel.base_index;
  tab.prices = MatrixXd::Zero(n, t);
  tab.shares = MatrixXd::Zero(n, t);
  tab.mask.resize(n, t);
  for (int j = 0; j < t; ++j) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      tab.mask(i, j) = panel.present(i, j);
      if (tab.mask(i, j)) {
        tab.prices(i, j) = panel.values(i, j) / panel.quantities(i, j);
        total += panel.values(i, j);
      }
    }
    if (total > 0.0)
      for (int i = 0; i < n; ++i)
        if (tab.mask(i, j)) tab.shares(i, j) = panel.values(i, j) / total;
  }
  return tab;
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  void join(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

CpdFit cpd_estimate(const PriceTableau& tab, bool weighted, int base) {
  const int n = static_cast<int>(tab.prices.rows());
  const int t = static_cast<int>(tab.prices.cols());
  if (base < 0 || base >= t) fail(Errc::OutOfRange, "base outside [0, T)");
  for (int j = 0; j < t; ++j) {
    bool any = false;
    for (int i = 0; i < n; ++i) any = any || tab.mask(i, j);
    if (!any)
      fail(Errc::RankDeficientDesign, "period " + tab.periods[j] + " has no price");
  }

  // The entity-period presence graph must be connected, otherwise the
  // dummies are only identified up to a shift per component.
  UnionFind uf(n + t);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < t; ++j)
      if (tab.mask(i, j)) uf.join(i, n + j);
  int root = -1;
  for (int j = 0; j < t; ++j) {
    if (root < 0) root = uf.find(n + j);
    if (uf.find(n + j) != root)
      fail(Errc::RankDeficientDesign, "disconnected entity-period presence graph");
  }
  for (int i = 0; i < n; ++i) {
    bool any = false;
    for (int j = 0; j < t; ++j) any = any || tab.mask(i, j);
    if (!any)
      fail(Errc::RankDeficientDesign, "entity " + tab.entities[i] + " has no priced cell");
    if (uf.find(i) != root)
      fail(Errc::RankDeficientDesign, "disconnected entity-period presence graph");
  }

  // Normal equations of ln p_it = alpha_i + beta_t (base beta dropped).
  const int k = n + t - 1;
  auto beta_col = [&](int j) { return j < base ? j : j - 1; };  // period -> dummy column
  MatrixXd gram = MatrixXd::Zero(k, k);
  VectorXd rhs = VectorXd::Zero(k);
  int n_obs = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < t; ++j) {
      if (!tab.mask(i, j)) continue;
      if (!(tab.prices(i, j) > 0.0)) fail(Errc::InvalidInput, "non-positive masked price");
      const double w = weighted ? tab.shares(i, j) : 1.0;
      if (w <= 0.0) continue;
      const double y = std::log(tab.prices(i, j));
      ++n_obs;
      gram(i, i) += w;
      rhs(i) += w * y;
      if (j != base) {
        const int c = n + beta_col(j);
        gram(c, c) += w;
        gram(i, c) += w;
        gram(c, i) += w;
        rhs(c) += w * y;
      }
    }

  Eigen::LDLT<MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    fail(Errc::RankDeficientDesign, "dummy design is rank deficient");
  const VectorXd coef = ldlt.solve(rhs);

  double ssr = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < t; ++j) {
      if (!tab.mask(i, j)) continue;
      const double w = weighted ? tab.shares(i, j) : 1.0;
      if (w <= 0.0) continue;
      double fit = coef(i);
      if (j != base) fit += coef(n + beta_col(j));
      const double e = std::log(tab.prices(i, j)) - fit;
      ssr += w * e * e;
    }

  CpdFit out;
  out.dof = n_obs - k;
  out.sigma2 = out.dof > 0 ? ssr / out.dof : 0.0;
  const MatrixXd cov = out.sigma2 * ldlt.solve(MatrixXd::Identity(k, k));

  out.indices = VectorXd::Ones(t);
  out.se = VectorXd::Zero(t);
  for (int j = 0; j < t; ++j) {
    if (j == base) continue;
    const int c = n + beta_col(j);
    out.indices(j) = std::exp(coef(c));
    const double var = cov(c, c);
    out.se(j) = var > 0 ? out.indices(j) * std::sqrt(var) : 0.0;
  }
  out.entity_prices = coef.head(n).array().exp();
  return out;
}

}  // namespace mpl
