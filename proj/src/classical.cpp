#include "mpl/classical.hpp"

#include <cmath>

namespace mpl {

using Eigen::VectorXd;

const char* index_kind_name(IndexKind k) {
  switch (k) {
    case IndexKind::Laspeyres: return "laspeyres";
    case IndexKind::Paasche: return "paasche";
    case IndexKind::MarshallEdgeworth: return "marshall-edgeworth";
    case IndexKind::Walsh: return "walsh";
    case IndexKind::GearyKhamis: return "geary-khamis";
  }
  return "?";
}

void TwoPeriodInstance::validate() const {
  const auto n = p1.size();
  if (p2.size() != n || q1.size() != n || q2.size() != n)
    fail(Errc::LengthMismatch, "instance vectors must share one length");
  for (long i = 0; i < n; ++i) {
    if (q1(i) < 0.0 || q2(i) < 0.0) fail(Errc::InvalidInput, "negative quantity");
    if ((q1(i) > 0.0 && !(p1(i) > 0.0)) || (q2(i) > 0.0 && !(p2(i) > 0.0)))
      fail(Errc::InvalidInput, "price must be positive where the quantity is positive");
  }
}

double classical_index(IndexKind kind, const TwoPeriodInstance& inst) {
  inst.validate();
  const long n = inst.p1.size();
  double num = 0.0, den = 0.0;
  for (long i = 0; i < n; ++i) {
    const double q1 = inst.q1(i), q2 = inst.q2(i);
    double w = 0.0;
    switch (kind) {
      case IndexKind::Laspeyres: w = q1; break;
      case IndexKind::Paasche: w = q2; break;
      case IndexKind::MarshallEdgeworth: w = q1 + q2; break;
      case IndexKind::Walsh: w = std::sqrt(q1 * q2); break;
      case IndexKind::GearyKhamis: w = (q1 + q2) > 0.0 ? q1 * q2 / (q1 + q2) : 0.0; break;
    }
    num += inst.p2(i) * w;
    den += inst.p1(i) * w;
  }
  if (!(den > 0.0)) fail(Errc::ZeroDenominator, "classical index denominator is not positive");
  return num / den;
}

ThetaSpec theta_for(IndexKind kind, const TwoPeriodInstance& inst) {
  inst.validate();
  const long n = inst.p1.size();
  ThetaSpec spec;
  spec.theta = VectorXd::Zero(n);
  spec.sqrt_quantities = kind == IndexKind::GearyKhamis;
  for (long i = 0; i < n; ++i) {
    const double q1 = inst.q1(i), q2 = inst.q2(i), p2 = inst.p2(i);
    if (!(q1 > 0.0) || !(q2 > 0.0)) continue;  // null weight, theta unused
    const double s = q1 * q1 + q2 * q2;
    switch (kind) {
      case IndexKind::Laspeyres: spec.theta(i) = p2 * q1 * q2 * q2 / s; break;
      case IndexKind::Paasche: spec.theta(i) = p2 * q1 * q1 * q2 / s; break;
      case IndexKind::MarshallEdgeworth:
        spec.theta(i) = p2 * q1 * q1 * q2 * q2 / (s * (q1 + q2));
        break;
      case IndexKind::Walsh: spec.theta(i) = p2 * std::pow(q1 * q2, 1.5) / s; break;
      case IndexKind::GearyKhamis:
        // With square-rooted quantities the closed-form weight collapses to
        // the harmonic mean q1 q2 / (q1 + q2) exactly when theta = p2.
        spec.theta(i) = p2;
        break;
    }
  }
  return spec;
}

double mpl_index_as(IndexKind kind, const TwoPeriodInstance& inst) {
  const ThetaSpec spec = theta_for(kind, inst);
  VectorXd q1 = inst.q1, q2 = inst.q2;
  if (spec.sqrt_quantities) {
    q1 = q1.cwiseSqrt();
    q2 = q2.cwiseSqrt();
  }
  const VectorXd v1 = inst.p1.cwiseProduct(q1);
  const VectorXd v2 = inst.p2.cwiseProduct(q2);
  VectorXd theta = spec.theta;
  for (long i = 0; i < theta.size(); ++i)
    if (theta(i) == 0.0) theta(i) = 1.0;  // absent goods: value never used
  return two_period_closed_form(q1, q2, v1, v2, theta).lambda;
}

double minnorm_index(const TwoPeriodInstance& inst, const VectorXd& weights) {
  inst.validate();
  if (weights.size() != inst.p1.size())
    fail(Errc::LengthMismatch, "weight vector length mismatch");
  const Eigen::MatrixXd a = weights * weights.transpose();
  const double den = inst.p1.dot(a * inst.p1);
  if (!(den > 0.0)) fail(Errc::DegenerateNorm, "p1' A p1 is not positive");
  return inst.p2.dot(a * inst.p1) / den;
}

// ---- axiom suite ---------------------------------------------------------

const char* axiom_status_name(AxiomStatus s) {
  switch (s) {
    case AxiomStatus::Pass: return "pass";
    case AxiomStatus::Fail: return "fail";
    case AxiomStatus::NotApplicable: return "not-applicable";
  }
  return "?";
}

AxiomSubject mpl_subject_constant_theta() {
  AxiomSubject s;
  s.weighting = Weighting::ConstantTheta;
  s.index = [](const VectorXd& p1, const VectorXd& p2, const VectorXd& q1, const VectorXd& q2) {
    const VectorXd theta = VectorXd::Ones(p1.size());
    return two_period_closed_form(q1, q2, p1.cwiseProduct(q1), p2.cwiseProduct(q2), theta).lambda;
  };
  return s;
}

AxiomSubject mpl_subject_price_scaled(double z) {
  AxiomSubject s;
  s.weighting = Weighting::PriceScaledTheta;
  s.index = [z](const VectorXd& p1, const VectorXd& p2, const VectorXd& q1, const VectorXd& q2) {
    VectorXd theta(p1.size());
    for (long i = 0; i < p1.size(); ++i)
      theta(i) = (q1(i) > 0.0 && q2(i) > 0.0) ? z * p2(i) : 1.0;
    return two_period_closed_form(q1, q2, p1.cwiseProduct(q1), p2.cwiseProduct(q2), theta).lambda;
  };
  return s;
}

AxiomSubject mpl_subject_geary_khamis() {
  AxiomSubject s;
  s.weighting = Weighting::GearyKhamis;
  s.index = [](const VectorXd& p1, const VectorXd& p2, const VectorXd& q1, const VectorXd& q2) {
    TwoPeriodInstance inst{p1, p2, q1, q2};
    return mpl_index_as(IndexKind::GearyKhamis, inst);
  };
  return s;
}

namespace {

constexpr double kTol = 1e-12;

double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1.0});
  return std::abs(a - b) / scale;
}

AxiomResult equality(const std::string& id, const std::string& name, double got, double want,
                     const std::string& note = "") {
  AxiomResult r{id, name, AxiomStatus::Pass, rel_diff(got, want), note};
  if (r.discrepancy > kTol) r.status = AxiomStatus::Fail;
  return r;
}

VectorXd permuted(const VectorXd& v, const std::vector<int>& perm) {
  VectorXd out(v.size());
  for (size_t i = 0; i < perm.size(); ++i) out(i) = v(perm[i]);
  return out;
}

}  // namespace

std::vector<AxiomResult> axiom_suite(const AxiomSubject& subject, const TwoPeriodInstance& inst,
                                     const AxiomParams& params) {
  inst.validate();
  const long n = inst.p1.size();
  if (params.gamma.size() != n || params.k.size() != n)
    fail(Errc::LengthMismatch, "gamma and k must match the instance length");
  for (long i = 0; i < n; ++i) {
    if (params.gamma(i) == 0.0) fail(Errc::InvalidInput, "gamma entries must be non-null");
    if (!(params.k(i) > 1.0)) fail(Errc::InvalidInput, "k entries must exceed 1");
  }
  if (!(params.alpha > 0.0) || !(params.beta > 0.0))
    fail(Errc::InvalidInput, "alpha and beta must be positive");

  const auto& f = subject.index;
  const VectorXd &p1 = inst.p1, &p2 = inst.p2, &q1 = inst.q1, &q2 = inst.q2;
  const double base = f(p1, p2, q1, q2);
  std::vector<AxiomResult> out;

  out.push_back(equality("P.1", "strong identity", f(p2, p2, q1, q2), 1.0));

  {
    const VectorXd gi = params.gamma.cwiseInverse();
    const double got = f(p1.cwiseProduct(params.gamma), p2.cwiseProduct(params.gamma),
                         q1.cwiseProduct(gi), q2.cwiseProduct(gi));
    out.push_back(equality("P.2", "commensurability", got, base));
  }

  out.push_back(equality("P.3", "proportionality", f(p1, params.alpha * p2, q1, q2),
                         params.alpha * base));
  out.push_back(equality("P.4", "dimensionality",
                         f(params.alpha * p1, params.alpha * p2, q1, q2), base));

  {
    const double up = f(p1, params.k.cwiseProduct(p2), q1, q2);
    const double down = f(params.k.cwiseProduct(p1), p2, q1, q2);
    AxiomResult r{"P.5", "monotonicity", AxiomStatus::Pass, 0.0, ""};
    if (!(up > base) || !(down < base)) {
      r.status = AxiomStatus::Fail;
      r.discrepancy = std::max(base - up, down - base);
    } else {
      r.discrepancy = 0.0;
    }
    out.push_back(r);
  }

  {
    const double got = f(params.alpha * p1, p2, q1, q2);
    AxiomResult r{"P.6", "positivity", got >= 0.0 ? AxiomStatus::Pass : AxiomStatus::Fail,
                  got >= 0.0 ? 0.0 : -got, ""};
    out.push_back(r);
  }

  out.push_back(equality("P.7", "inverse proportionality in the base",
                         f(params.alpha * p1, p2, q1, q2), base / params.alpha));

  {
    std::vector<int> perm = params.permutation;
    if (perm.empty()) {
      perm.resize(n);
      for (long i = 0; i < n; ++i) perm[i] = static_cast<int>(n - 1 - i);
    }
    const double got =
        f(permuted(p1, perm), permuted(p2, perm), permuted(q1, perm), permuted(q2, perm));
    out.push_back(equality("P.8", "commodity reversal", got, base));
  }

  out.push_back(equality("P.9", "quantity reversal", f(p1, p2, q2, q1), base,
                         "read as invariance under swapping the quantity pair with prices fixed"));

  if (subject.weighting == Weighting::PriceScaledTheta) {
    const double rev = f(p2, p1, q2, q1);
    out.push_back(equality("P.10", "base reversibility", base * rev, 1.0,
                           "holds for the price-free weighting theta = z * p2"));
  } else {
    out.push_back({"P.10", "base reversibility", AxiomStatus::NotApplicable, 0.0,
                   "proved only for the weighting theta = z * p2"});
  }

  if (subject.weighting == Weighting::GearyKhamis) {
    if (params.p3.size() != n) fail(Errc::LengthMismatch, "p3 must match the instance length");
    // Bilateral chaining holds when the three comparisons share one quantity
    // profile, which is how the weights stay common.
    const double l12 = f(p1, p2, q1, q1);
    const double l23 = f(p2, params.p3, q1, q1);
    const double l13 = f(p1, params.p3, q1, q1);
    out.push_back(equality("P.11", "transitivity", l12 * l23, l13,
                           "checked on a constant quantity profile"));
  } else {
    out.push_back({"P.11", "transitivity", AxiomStatus::NotApplicable, 0.0,
                   "proved only for the Geary-Khamis configuration"});
  }

  out.push_back(equality("P.12", "proportional prices", f(p1, params.beta * p1, q1, q2),
                         params.beta));
  return out;
}

}  // namespace mpl
