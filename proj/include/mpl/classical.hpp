#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "mpl/estimator.hpp"

namespace mpl {

enum class IndexKind { Laspeyres, Paasche, MarshallEdgeworth, Walsh, GearyKhamis };

const char* index_kind_name(IndexKind k);

struct TwoPeriodInstance {
  Eigen::VectorXd p1, p2;  // prices, positive where the matching quantity is
  Eigen::VectorXd q1, q2;  // quantities, zero = absent

  void validate() const;
  Eigen::VectorXd values1() const { return p1.cwiseProduct(q1); }
  Eigen::VectorXd values2() const { return p2.cwiseProduct(q2); }
};

/// Textbook two-period index of the requested kind.
double classical_index(IndexKind kind, const TwoPeriodInstance& inst);

/// Per-commodity error variances that reduce the two-period GLS index to the
/// requested classical index. Geary-Khamis additionally requires replacing
/// quantities by their square roots before the closed form is applied;
/// sqrt_quantities flags that transform.
struct ThetaSpec {
  Eigen::VectorXd theta;  // zero entries mark commodities with null weight
  bool sqrt_quantities = false;
};

ThetaSpec theta_for(IndexKind kind, const TwoPeriodInstance& inst);

/// Convenience: runs the two-period closed form under theta_for(kind),
/// applying the square-root transform when the spec flags it.
double mpl_index_as(IndexKind kind, const TwoPeriodInstance& inst);

/// Minimum-norm form: p2' A p1 / p1' A p1 with A the rank-one weight outer
/// product.
double minnorm_index(const TwoPeriodInstance& inst, const Eigen::VectorXd& weights);

// ---- axiomatic property suite ------------------------------------------

enum class AxiomStatus { Pass, Fail, NotApplicable };

const char* axiom_status_name(AxiomStatus s);

struct AxiomResult {
  std::string id;    // "P.1" .. "P.12"
  std::string name;
  AxiomStatus status = AxiomStatus::Pass;
  double discrepancy = 0.0;
  std::string note;
};

struct AxiomParams {
  Eigen::VectorXd gamma;  // non-null rescaling units (P.2)
  double alpha = 2.0;     // positive scalar (P.3, P.4, P.6, P.7)
  Eigen::VectorXd k;      // entries > 1 (P.5)
  double beta = 2.0;      // positive scalar (P.12)
  Eigen::VectorXd p3;     // third price vector (P.11)
  std::vector<int> permutation;  // commodity permutation (P.8); identity if empty
};

/// How the index under test derives its weights; the conditional properties
/// (P.10 base reversibility, P.11 transitivity) are only decidable for
/// specific weightings and are reported NotApplicable otherwise.
enum class Weighting { ConstantTheta, PriceScaledTheta, GearyKhamis, Custom };

struct AxiomSubject {
  std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&, const Eigen::VectorXd&,
                       const Eigen::VectorXd&)>
      index;  // (p1, p2, q1, q2) -> lambda
  Weighting weighting = Weighting::Custom;
};

/// Two-period GLS index with constant theta (the spherical weighting).
AxiomSubject mpl_subject_constant_theta();
/// theta_i = z * p_{i2}, recomputed from the call arguments; weights carry no
/// price and the index becomes base reversible.
AxiomSubject mpl_subject_price_scaled(double z);
/// The Geary-Khamis configuration (harmonic quantity weights).
AxiomSubject mpl_subject_geary_khamis();

std::vector<AxiomResult> axiom_suite(const AxiomSubject& subject, const TwoPeriodInstance& inst,
                                     const AxiomParams& params);

}  // namespace mpl
