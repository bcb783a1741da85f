#pragma once

// Shared test data: a 4-commodity / 6-year demo panel with known index and
// reference prices, its incomplete variant, random panel generators and a
// museum-scale wide panel for the perturbation experiments.

#include <Eigen/Dense>
#include <sstream>
#include <string>

#include "mpl/panel.hpp"
#include "mpl/rng.hpp"

namespace fixtures {

inline Eigen::MatrixXd demo_quantities() {
  Eigen::MatrixXd q(4, 6);
  q << 5, 8, 10, 10, 15, 20,
      15, 18, 20, 10, 15, 10,
      25, 27, 30, 35, 30, 20,
      5, 5, 5, 10, 15, 20;
  return q;
}

inline Eigen::MatrixXd demo_values() {
  Eigen::MatrixXd v(4, 6);
  v << 9.29, 19.10, 24.14, 23.36, 38.17, 53.59,
      22.78, 30.51, 34.40, 17.31, 28.40, 19.49,
      23.50, 26.43, 31.29, 37.17, 34.83, 22.21,
      7.15, 10.01, 10.18, 21.73, 33.28, 47.55;
  return v;
}

inline Eigen::MatrixXd demo_prices() {
  Eigen::MatrixXd p(4, 6);
  p << 1.86, 2.39, 2.41, 2.34, 2.54, 2.68,
      1.52, 1.69, 1.72, 1.73, 1.89, 1.95,
      0.94, 0.98, 1.04, 1.06, 1.16, 1.11,
      1.43, 2.00, 2.04, 2.17, 2.22, 2.38;
  return p;
}

inline Eigen::VectorXd demo_lambda() {
  Eigen::VectorXd l(6);
  l << 1.00, 1.11, 1.18, 1.15, 1.25, 1.27;
  return l;
}

inline Eigen::VectorXd demo_pref() {
  Eigen::VectorXd p(4);
  p << 2.1, 1.5, 0.9, 1.9;
  return p;
}

inline mpl::Panel make_panel(const Eigen::MatrixXd& q, const Eigen::MatrixXd& v,
                             int base = 0) {
  mpl::Panel panel;
  for (long i = 0; i < q.rows(); ++i) panel.entities.push_back("g" + std::to_string(i + 1));
  for (long t = 0; t < q.cols(); ++t) panel.periods.push_back("y" + std::to_string(2015 + t));
  panel.quantities = q;
  panel.values = v;
  panel.base_index = base;
  panel.validate();
  return panel;
}

inline mpl::Panel demo_panel() { return make_panel(demo_quantities(), demo_values()); }

/// Commodity 4 missing in the first year, commodity 2 in the second.
inline mpl::Panel demo_panel_incomplete() {
  Eigen::MatrixXd q = demo_quantities();
  Eigen::MatrixXd v = demo_values();
  q(3, 0) = v(3, 0) = 0.0;
  q(1, 1) = v(1, 1) = 0.0;
  return make_panel(q, v);
}

inline std::string panel_csv(const mpl::Panel& panel) {
  std::ostringstream out;
  out << "entity,period,quantity,value\n";
  for (int i = 0; i < panel.rows(); ++i)
    for (int t = 0; t < panel.cols(); ++t)
      if (panel.present(i, t))
        out << panel.entities[i] << ',' << panel.periods[t] << ',' << panel.quantities(i, t)
            << ',' << panel.values(i, t) << '\n';
  return out.str();
}

/// Complete random panel with multiplicative value noise.
inline mpl::Panel random_panel(mpl::CounterRng& rng, int n, int t, double noise = 0.05) {
  Eigen::MatrixXd q(n, t), v(n, t);
  Eigen::VectorXd pref(n), lambda(t);
  for (int i = 0; i < n; ++i) pref(i) = rng.uniform(0.5, 3.0);
  lambda(0) = 1.0;
  for (int j = 1; j < t; ++j) lambda(j) = lambda(j - 1) * rng.uniform(0.9, 1.15);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < t; ++j) {
      q(i, j) = rng.uniform(1.0, 5.0);
      double cell = lambda(j) * pref(i) * q(i, j) * (1.0 + noise * rng.normal(0.0, 1.0));
      if (cell <= 0.0) cell = 0.01;
      v(i, j) = cell;
    }
  return make_panel(q, v);
}

struct NoiselessPanel {
  mpl::Panel panel;
  Eigen::VectorXd lambda;
  Eigen::VectorXd pref;
};

inline NoiselessPanel random_noiseless_panel(mpl::CounterRng& rng, int n, int t) {
  NoiselessPanel out;
  out.pref.resize(n);
  out.lambda.resize(t);
  for (int i = 0; i < n; ++i) out.pref(i) = rng.uniform(0.5, 3.0);
  out.lambda(0) = 1.0;
  for (int j = 1; j < t; ++j) out.lambda(j) = out.lambda(j - 1) * rng.uniform(0.9, 1.2);
  Eigen::MatrixXd q(n, t), v(n, t);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < t; ++j) {
      q(i, j) = rng.uniform(1.0, 6.0);
      v(i, j) = out.lambda(j) * out.pref(i) * q(i, j);
    }
  out.panel = make_panel(q, v);
  return out;
}

inline Eigen::MatrixXd random_spd(mpl::CounterRng& rng, int n) {
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.normal(0.0, 1.0);
  return a * a.transpose() / n + 0.5 * Eigen::MatrixXd::Identity(n, n);
}

/// 36 x 14 panel with a wide (log-uniform) value scale: entity quantity
/// levels from 4e3 to 2e6, stable within +-12 percent across periods.
inline NoiselessPanel wide_panel(std::uint64_t seed = 42) {
  mpl::CounterRng rng = mpl::CounterRng::substream(seed, 7);
  const int n = 36, t = 14;
  NoiselessPanel out;
  Eigen::VectorXd level(n);
  out.pref.resize(n);
  for (int i = 0; i < n; ++i) {
    level(i) = std::exp(rng.uniform(std::log(4e3), std::log(2e6)));
    out.pref(i) = rng.uniform(4.0, 22.0);
  }
  out.lambda.resize(t);
  out.lambda(0) = 1.0;
  for (int j = 1; j < t; ++j)
    out.lambda(j) = out.lambda(j - 1) * (1.0 + rng.normal(0.012, 0.02));
  Eigen::MatrixXd q(n, t), v(n, t);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < t; ++j) {
      q(i, j) = std::round(level(i) * (1.0 + rng.uniform(-0.12, 0.12)));
      double cell = out.lambda(j) * out.pref(i) * q(i, j) + rng.normal(0.0, 800.0);
      if (cell <= 0.0) cell = 1.0;
      v(i, j) = cell;
    }
  out.panel = make_panel(q, v);
  return out;
}

}  // namespace fixtures
