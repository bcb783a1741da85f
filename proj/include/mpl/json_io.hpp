#pragma once

#include <json.hpp>
#include <ostream>

#include "mpl/classical.hpp"
#include "mpl/estimator.hpp"
#include "mpl/sim.hpp"

namespace mpl {

/// Rounds through a 12-significant-digit decimal representation so emitted
/// numbers are stable across runs and platforms.
double round12(double x);
nlohmann::ordered_json json_num(double x);
nlohmann::ordered_json json_vec(const Eigen::VectorXd& v);

nlohmann::ordered_json estimate_to_json(const MplEstimate& est);
MplEstimate estimate_from_json(const nlohmann::json& j);

nlohmann::ordered_json sim_report_to_json(const SimReport& report);
void sim_report_to_csv(std::ostream& out, const SimReport& report);

nlohmann::ordered_json axiom_report_to_json(const std::vector<AxiomResult>& report);

}  // namespace mpl
