#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mpl/covariance.hpp"
#include "mpl/estimator.hpp"
#include "mpl/panel.hpp"

namespace mpl {

enum class Scheme { GenerateFromModel, AdditiveNoise, RandomWalkNoise };

const char* scheme_name(Scheme s);
Scheme parse_scheme(const std::string& name);

struct SimConfig {
  Scheme scheme = Scheme::AdditiveNoise;
  double noise_mean = 0.0;
  double sd_low = 0.0;
  double sd_high = 0.0;  // per-replication sd drawn once from [sd_low, sd_high]
  int replications = 1;
  std::uint64_t seed = 0;
  std::uint64_t rep_offset = 0;  // first replication index (for split runs)
  std::optional<Eigen::VectorXd> true_lambda;  // SSE reference / model scheme
  std::optional<Eigen::VectorXd> true_pref;    // model scheme
};

/// Which estimators to run per replication.
struct EstimatorSpec {
  enum class Kind { Mpl, Tpd } kind = Kind::Mpl;
  Regime regime = Regime::Ols;  // MPL only
  bool weighted = false;        // TPD only
  std::string label() const;
};

EstimatorSpec parse_estimator_spec(const std::string& label);

struct SimReport {
  std::uint64_t seed = 0;
  int replications = 0;
  std::vector<std::string> periods;
  std::vector<std::string> labels;                // per estimator
  std::vector<Eigen::MatrixXd> per_replication;   // per estimator: R x T (NaN = dropped)
  Eigen::MatrixXd mean_indices;                   // E x T
  Eigen::MatrixXd band_sigma;                     // E x T cross-replication dispersion
  Eigen::MatrixXd mean_se;                        // E x T replication-averaged reported se
  Eigen::MatrixXd band_low, band_high;            // mean -/+ 2 mean_se (confidence bands)
  std::vector<int> dropped;                       // per estimator
  Eigen::VectorXd reference_indices;              // what sse compares against
  std::vector<double> sse_vs_reference;           // per estimator
  std::vector<std::string> notes;
};

/// Model values (pref lambda') * Q plus iid Normal(0, sd^2) noise on present
/// cells; negative draws are retried and finally clamped to a small floor.
Eigen::MatrixXd generate_values(const Eigen::MatrixXd& quantities, const Eigen::VectorXd& pref,
                                const Eigen::VectorXd& lambda, double noise_sd,
                                std::uint64_t seed, std::vector<std::string>* warnings = nullptr);

SimReport run_perturbation(const Panel& panel, const SimConfig& cfg,
                           const std::vector<EstimatorSpec>& estimators);

double sse(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

struct RecoveredPrices {
  std::vector<double> prices;
  std::vector<std::string> warnings;
};

/// Price of cell (entity, period) reconstructed as reference price times
/// index value.
RecoveredPrices recover_missing_prices(const MplEstimate& est,
                                       const std::vector<std::pair<int, int>>& cells);

/// Rank-one fitted price matrix: reference prices (outer) indices.
Eigen::MatrixXd price_matrix_estimate(const MplEstimate& est);

/// Numerically stable pairwise sum (used for replication aggregates).
double pairwise_sum(const double* data, std::size_t len);

}  // namespace mpl
