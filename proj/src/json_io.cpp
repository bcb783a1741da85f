#include "mpl/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace mpl {

using nlohmann::ordered_json;

double round12(double x) {
  if (!std::isfinite(x)) return x;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

ordered_json json_num(double x) {
  if (std::isnan(x)) return nullptr;
  return round12(x);
}

ordered_json json_vec(const Eigen::VectorXd& v) {
  ordered_json arr = ordered_json::array();
  for (long i = 0; i < v.size(); ++i) arr.push_back(json_num(v(i)));
  return arr;
}

ordered_json estimate_to_json(const MplEstimate& est) {
  ordered_json j;
  j["deflators"] = json_vec(est.deflators);
  j["indices"] = json_vec(est.indices);
  j["reference_prices"] = json_vec(est.reference_prices);
  j["index_se"] = json_vec(est.index_se);
  j["sigma2"] = json_num(est.sigma2);
  j["dof"] = est.dof;
  j["warnings"] = est.warnings;
  j["deflator_se"] = json_vec(est.deflator_se);
  j["periods"] = est.periods;
  j["entities"] = est.entities;
  j["base_index"] = est.base_index;
  return j;
}

namespace {

Eigen::VectorXd vec_from(const nlohmann::json& arr) {
  Eigen::VectorXd v(arr.size());
  for (size_t i = 0; i < arr.size(); ++i) v(i) = arr[i].is_null() ? 0.0 : arr[i].get<double>();
  return v;
}

}  // namespace

MplEstimate estimate_from_json(const nlohmann::json& j) {
  MplEstimate est;
  try {
    est.deflators = vec_from(j.at("deflators"));
    est.indices = vec_from(j.at("indices"));
    est.reference_prices = vec_from(j.at("reference_prices"));
    est.index_se = vec_from(j.at("index_se"));
    est.sigma2 = j.at("sigma2").get<double>();
    est.dof = j.at("dof").get<int>();
    est.warnings = j.at("warnings").get<std::vector<std::string>>();
    est.deflator_se = vec_from(j.at("deflator_se"));
    est.periods = j.at("periods").get<std::vector<std::string>>();
    est.entities = j.at("entities").get<std::vector<std::string>>();
    est.base_index = j.at("base_index").get<int>();
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::InvalidInput, std::string("malformed estimate JSON: ") + e.what());
  }
  return est;
}

ordered_json sim_report_to_json(const SimReport& report) {
  ordered_json j;
  j["seed"] = report.seed;
  j["replications"] = report.replications;
  j["periods"] = report.periods;
  ordered_json ests = ordered_json::array();
  for (size_t s = 0; s < report.labels.size(); ++s) {
    ordered_json e;
    e["label"] = report.labels[s];
    e["mean_indices"] = json_vec(report.mean_indices.row(s).transpose());
    e["band_low"] = json_vec(report.band_low.row(s).transpose());
    e["band_high"] = json_vec(report.band_high.row(s).transpose());
    e["band_sigma"] = json_vec(report.band_sigma.row(s).transpose());
    e["mean_se"] = json_vec(report.mean_se.row(s).transpose());
    e["dropped"] = report.dropped[s];
    e["sse_vs_reference"] = json_num(report.sse_vs_reference[s]);
    ests.push_back(std::move(e));
  }
  j["estimators"] = std::move(ests);
  j["reference_indices"] = json_vec(report.reference_indices);
  j["notes"] = report.notes;
  return j;
}

void sim_report_to_csv(std::ostream& out, const SimReport& report) {
  out << "replication,estimator,period,index\n";
  char buf[40];
  for (size_t s = 0; s < report.labels.size(); ++s) {
    const auto& m = report.per_replication[s];
    for (long rep = 0; rep < m.rows(); ++rep)
      for (long j = 0; j < m.cols(); ++j) {
        if (std::isnan(m(rep, j))) continue;
        std::snprintf(buf, sizeof buf, "%.12g", m(rep, j));
        out << rep << ',' << report.labels[s] << ',' << report.periods[j] << ',' << buf << '\n';
      }
  }
}

ordered_json axiom_report_to_json(const std::vector<AxiomResult>& report) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : report) {
    ordered_json row;
    row["id"] = r.id;
    row["name"] = r.name;
    row["status"] = axiom_status_name(r.status);
    row["discrepancy"] = json_num(r.discrepancy);
    row["note"] = r.note;
    arr.push_back(std::move(row));
  }
  return arr;
}

}  // namespace mpl
