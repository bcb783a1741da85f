#include "mpl/sim.hpp"

#include <cmath>
#include <limits>

#include "mpl/baseline.hpp"
#include "mpl/rng.hpp"

namespace mpl {

using Eigen::MatrixXd;
using Eigen::VectorXd;

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::GenerateFromModel: return "model";
    case Scheme::AdditiveNoise: return "additive";
    case Scheme::RandomWalkNoise: return "walk";
  }
  return "?";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "model") return Scheme::GenerateFromModel;
  if (name == "additive") return Scheme::AdditiveNoise;
  if (name == "walk") return Scheme::RandomWalkNoise;
  fail(Errc::InvalidInput, "unknown scheme '" + name + "' (model, additive, walk)");
}

std::string EstimatorSpec::label() const {
  if (kind == Kind::Tpd) return weighted ? "tpd-weighted" : "tpd";
  return std::string("mpl-") + regime_name(regime);
}

EstimatorSpec parse_estimator_spec(const std::string& label) {
  EstimatorSpec spec;
  if (label == "tpd" || label == "cpd") {
    spec.kind = EstimatorSpec::Kind::Tpd;
    return spec;
  }
  if (label == "tpd-weighted" || label == "cpd-weighted") {
    spec.kind = EstimatorSpec::Kind::Tpd;
    spec.weighted = true;
    return spec;
  }
  if (label.rfind("mpl-", 0) == 0) {
    spec.kind = EstimatorSpec::Kind::Mpl;
    spec.regime = parse_regime(label.substr(4));
    return spec;
  }
  fail(Errc::InvalidInput, "unknown estimator '" + label + "'");
}

double pairwise_sum(const double* data, std::size_t len) {
  if (len == 0) return 0.0;
  if (len <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < len; ++i) s += data[i];
    return s;
  }
  const std::size_t half = len / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, len - half);
}

namespace {

constexpr int kMaxRedraws = 100;

/// Draws one additive perturbation for a cell, retrying while the perturbed
/// value would go non-positive; clamps to the floor as a last resort.
double perturb_cell(CounterRng& rng, double value, double mean, double sd, double floor,
                    int* clamped) {
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    const double candidate = value + rng.normal(mean, sd);
    if (candidate > 0.0) return candidate;
  }
  ++*clamped;
  return floor;
}

VectorXd column_floors(const Panel& panel) {
  VectorXd floors(panel.cols());
  for (int j = 0; j < panel.cols(); ++j) {
    double total = 0.0;
    int count = 0;
    for (int i = 0; i < panel.rows(); ++i)
      if (panel.present(i, j)) {
        total += panel.values(i, j);
        ++count;
      }
    floors(j) = count > 0 ? 1e-6 * total / count : 1e-6;
  }
  return floors;
}

}  // namespace

MatrixXd generate_values(const MatrixXd& quantities, const VectorXd& pref,
                         const VectorXd& lambda, double noise_sd, std::uint64_t seed,
                         std::vector<std::string>* warnings) {
  const auto n = quantities.rows();
  const auto t = quantities.cols();
  if (pref.size() != n || lambda.size() != t)
    fail(Errc::ShapeMismatch, "reference prices / index length must match the quantity matrix");
  if (noise_sd < 0.0) fail(Errc::InvalidInput, "noise sd must be non-negative");

  CounterRng rng = CounterRng::substream(seed, 0);
  MatrixXd values = MatrixXd::Zero(n, t);
  int clamped = 0;
  for (long j = 0; j < t; ++j) {
    double col_mean = 0.0;
    int count = 0;
    for (long i = 0; i < n; ++i)
      if (quantities(i, j) > 0.0) {
        col_mean += lambda(j) * pref(i) * quantities(i, j);
        ++count;
      }
    const double floor = count > 0 ? 1e-6 * col_mean / count : 1e-6;
    for (long i = 0; i < n; ++i) {
      if (!(quantities(i, j) > 0.0)) continue;
      const double model = lambda(j) * pref(i) * quantities(i, j);
      values(i, j) = noise_sd == 0.0
                         ? model
                         : perturb_cell(rng, model, 0.0, noise_sd, floor, &clamped);
    }
  }
  if (clamped > 0 && warnings)
    warnings->push_back("ClampedValues: " + std::to_string(clamped) +
                        " cells clamped to the positivity floor");
  return values;
}

namespace {

VectorXd run_one_estimator(const Panel& panel, const EstimatorSpec& spec,
                           VectorXd* se = nullptr) {
  if (spec.kind == EstimatorSpec::Kind::Mpl) {
    const MplEstimate est = estimate_fgls(panel, spec.regime);
    if (se) *se = est.index_se;
    return est.indices;
  }
  const CpdFit fit = cpd_estimate(tableau_from_panel(panel), spec.weighted, panel.base_index);
  if (se) *se = fit.se;
  return fit.indices;
}

}  // namespace

SimReport run_perturbation(const Panel& panel, const SimConfig& cfg,
                           const std::vector<EstimatorSpec>& estimators) {
  panel.validate();
  if (estimators.empty()) fail(Errc::InvalidInput, "estimator list is empty");
  if (cfg.replications < 1) fail(Errc::InvalidInput, "replications must be >= 1");
  if (cfg.sd_low > cfg.sd_high) fail(Errc::InvalidInput, "sd_low must not exceed sd_high");
  if (cfg.scheme == Scheme::RandomWalkNoise && panel.base_index != 0)
    fail(Errc::InvalidInput, "the random-walk scheme requires the base period first");
  if (cfg.scheme == Scheme::GenerateFromModel && (!cfg.true_lambda || !cfg.true_pref))
    fail(Errc::InvalidInput, "the model scheme needs true_lambda and true_pref");

  const int n = panel.rows();
  const int t = panel.cols();
  const int e = static_cast<int>(estimators.size());
  const int r = cfg.replications;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const VectorXd floors = column_floors(panel);

  SimReport report;
  report.seed = cfg.seed;
  report.replications = r;
  report.periods = panel.periods;
  for (const auto& spec : estimators) report.labels.push_back(spec.label());
  report.per_replication.assign(e, MatrixXd::Constant(r, t, nan));
  report.dropped.assign(e, 0);
  std::vector<MatrixXd> per_rep_se(e, MatrixXd::Constant(r, t, nan));

  int clamped_total = 0;
  for (int rep = 0; rep < r; ++rep) {
    CounterRng rng = CounterRng::substream(cfg.seed, cfg.rep_offset + rep);
    const double sd = rng.uniform(cfg.sd_low, cfg.sd_high);

    Panel sim = panel;
    switch (cfg.scheme) {
      case Scheme::AdditiveNoise:
        for (int j = 0; j < t; ++j) {
          if (j == panel.base_index) continue;
          for (int i = 0; i < n; ++i)
            if (panel.present(i, j))
              sim.values(i, j) = perturb_cell(rng, panel.values(i, j), cfg.noise_mean, sd,
                                              floors(j), &clamped_total);
        }
        break;
      case Scheme::RandomWalkNoise:
        for (int j = 1; j < t; ++j)
          for (int i = 0; i < n; ++i)
            if (panel.present(i, j)) {
              const double prev =
                  panel.present(i, j - 1) ? sim.values(i, j - 1) : panel.values(i, j);
              sim.values(i, j) =
                  perturb_cell(rng, prev, cfg.noise_mean, sd, floors(j), &clamped_total);
            }
        break;
      case Scheme::GenerateFromModel: {
        for (int j = 0; j < t; ++j)
          for (int i = 0; i < n; ++i)
            if (panel.present(i, j)) {
              const double model =
                  (*cfg.true_lambda)(j) * (*cfg.true_pref)(i) * panel.quantities(i, j);
              sim.values(i, j) =
                  sd == 0.0 ? model : perturb_cell(rng, model, 0.0, sd, floors(j), &clamped_total);
            }
        break;
      }
    }

    for (int s = 0; s < e; ++s) {
      try {
        VectorXd se;
        const VectorXd indices = run_one_estimator(sim, estimators[s], &se);
        report.per_replication[s].row(rep) = indices.transpose();
        per_rep_se[s].row(rep) = se.transpose();
      } catch (const Error& err) {
        ++report.dropped[s];
        report.notes.push_back("replication " + std::to_string(cfg.rep_offset + rep) +
                               " dropped for " + report.labels[s] + ": " + err.what());
      }
    }
  }
  if (clamped_total > 0)
    report.notes.push_back("ClampedValues: " + std::to_string(clamped_total) +
                           " cells clamped to the positivity floor");

  // Aggregates via pairwise summation over the replication axis.
  report.mean_indices = MatrixXd::Zero(e, t);
  report.band_sigma = MatrixXd::Zero(e, t);
  report.mean_se = MatrixXd::Zero(e, t);
  std::vector<double> buf(static_cast<size_t>(r));
  auto column_stats = [&](const MatrixXd& m, int j, double* mean, double* sd) {
    size_t kept = 0;
    for (int rep = 0; rep < r; ++rep)
      if (!std::isnan(m(rep, j))) buf[kept++] = m(rep, j);
    if (kept == 0) {
      *mean = nan;
      if (sd) *sd = nan;
      return;
    }
    *mean = pairwise_sum(buf.data(), kept) / static_cast<double>(kept);
    if (sd) {
      for (size_t i = 0; i < kept; ++i) buf[i] = (buf[i] - *mean) * (buf[i] - *mean);
      *sd = std::sqrt(pairwise_sum(buf.data(), kept) / static_cast<double>(kept));
    }
  };
  for (int s = 0; s < e; ++s)
    for (int j = 0; j < t; ++j) {
      column_stats(report.per_replication[s], j, &report.mean_indices(s, j),
                   &report.band_sigma(s, j));
      column_stats(per_rep_se[s], j, &report.mean_se(s, j), nullptr);
    }
  // Bands follow the usual presentation: replication-averaged index plus or
  // minus twice the replication-averaged standard error of the estimator.
  report.band_low = report.mean_indices - 2.0 * report.mean_se;
  report.band_high = report.mean_indices + 2.0 * report.mean_se;

  if (cfg.true_lambda) {
    report.reference_indices = *cfg.true_lambda;
  } else {
    report.reference_indices = VectorXd::Zero(t);
  }
  for (int s = 0; s < e; ++s) {
    VectorXd ref = report.reference_indices;
    if (!cfg.true_lambda) {
      try {
        ref = run_one_estimator(panel, estimators[s]);
      } catch (const Error&) {
        report.sse_vs_reference.push_back(nan);
        continue;
      }
    }
    report.sse_vs_reference.push_back(sse(report.mean_indices.row(s).transpose(), ref));
  }
  return report;
}

double sse(const VectorXd& a, const VectorXd& b) {
  if (a.size() != b.size()) fail(Errc::LengthMismatch, "sse needs equal-length vectors");
  return (a - b).squaredNorm();
}

RecoveredPrices recover_missing_prices(const MplEstimate& est,
                                       const std::vector<std::pair<int, int>>& cells) {
  RecoveredPrices out;
  const long n = est.reference_prices.size();
  const long t = est.indices.size();
  for (const auto& [i, j] : cells) {
    if (i < 0 || i >= n || j < 0 || j >= t)
      fail(Errc::OutOfRange, "cell outside the estimate's shape");
    const double lam = est.indices(j);
    if (lam == 0.0)
      out.warnings.push_back("NullIndex: period " + est.periods[j] +
                             " has a null index, recovered price is 0");
    out.prices.push_back(est.reference_prices(i) * lam);
  }
  return out;
}

MatrixXd price_matrix_estimate(const MplEstimate& est) {
  if (est.reference_prices.size() == 0 || est.indices.size() == 0)
    fail(Errc::InvalidInput, "estimate is empty");
  return est.reference_prices * est.indices.transpose();
}

}  // namespace mpl
