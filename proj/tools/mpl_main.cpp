// Command-line front end: ingestion, estimation, updating, baseline
// comparison, perturbation simulation and the axiomatic property report.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "mpl/baseline.hpp"
#include "mpl/classical.hpp"
#include "mpl/csv.hpp"
#include "mpl/errors.hpp"
#include "mpl/json_io.hpp"
#include "mpl/oracle.hpp"
#include "mpl/rng.hpp"
#include "mpl/sim.hpp"
#include "mpl/updater.hpp"

namespace {

using mpl::Errc;
using mpl::fail;
using nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";
// Used whenever --seed is absent so repeated CI runs stay byte-identical.
constexpr std::uint64_t kDefaultSeed = 424242;

std::uint64_t fnv1a64_file(const std::string& path, std::uint64_t h) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::InvalidInput, "cannot open " + path);
  char buf[4096];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001B3ULL;
    }
  }
  return h;
}

struct Manifest {
  std::string command;
  std::vector<std::string> inputs;
  std::map<std::string, std::string> flags;
  std::uint64_t seed = kDefaultSeed;

  ordered_json to_json() const {
    std::uint64_t digest = 0xCBF29CE484222325ULL;
    for (const auto& p : inputs) digest = fnv1a64_file(p, digest);
    char hex[32];
    std::snprintf(hex, sizeof hex, "fnv1a64:%016llx", static_cast<unsigned long long>(digest));
    ordered_json j;
    j["command"] = command;
    j["inputs"] = inputs;
    j["flags"] = flags;
    j["seed"] = seed;
    j["version"] = kVersion;
    j["digest"] = hex;
    return j;
  }
};

void emit(const ordered_json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(out_path);
  if (!out) fail(Errc::InvalidInput, "cannot write " + out_path);
  out << j.dump(2) << "\n";
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

Eigen::VectorXd parse_vector(const std::string& s, const char* what) {
  const auto items = split_list(s);
  Eigen::VectorXd v(items.size());
  for (size_t i = 0; i < items.size(); ++i) {
    char* end = nullptr;
    v(i) = std::strtod(items[i].c_str(), &end);
    if (items[i].empty() || end != items[i].c_str() + items[i].size())
      fail(Errc::InvalidInput, std::string("cannot parse ") + what + " entry '" + items[i] + "'");
  }
  return v;
}

int base_index_for(const mpl::Panel& panel, const std::string& base_label) {
  if (base_label.empty()) return 0;
  for (size_t j = 0; j < panel.periods.size(); ++j)
    if (panel.periods[j] == base_label) return static_cast<int>(j);
  fail(Errc::InvalidInput, "base period '" + base_label + "' not found");
}

struct LoadOptions {
  std::string period_order;
  std::string base;
  std::string basket = "mpl";
};

mpl::Panel load_filtered_panel(const std::string& csv_path, const LoadOptions& opt,
                               mpl::BasketReport* report_out = nullptr,
                               std::vector<std::string>* dropped_labels = nullptr) {
  std::optional<std::vector<std::string>> order;
  if (!opt.period_order.empty()) order = split_list(opt.period_order);
  mpl::Panel panel = mpl::read_panel_file(csv_path, order ? &*order : nullptr);
  panel.base_index = base_index_for(panel, opt.base);
  const mpl::BasketMode mode = opt.basket == "intersection" ? mpl::BasketMode::IntersectAll
                                                            : mpl::BasketMode::UnionPairwise;
  const mpl::BasketReport report = mpl::reference_basket(panel, mode);
  if (dropped_labels)
    for (int i : report.dropped) dropped_labels->push_back(panel.entities[i]);
  if (report_out) *report_out = report;
  return mpl::filter_panel(panel, report);
}

void print_estimate_table(const mpl::MplEstimate& est) {
  std::fprintf(stderr, "%-12s %12s %12s %12s\n", "period", "index", "se", "deflator");
  for (size_t j = 0; j < est.periods.size(); ++j)
    std::fprintf(stderr, "%-12s %12.6f %12.6f %12.6f\n", est.periods[j].c_str(),
                 est.indices(j), est.index_se(j), est.deflators(j));
}

// ---- estimate -------------------------------------------------------------

struct EstimateArgs {
  std::string csv, regime = "ols", out;
  LoadOptions load;
  bool oracle = false, table = false;
  double shrinkage = 0.25, ridge = 1e-8;
  int iterations = 1;
};

int run_estimate(const EstimateArgs& a, Manifest manifest) {
  const mpl::Panel panel = load_filtered_panel(a.csv, a.load);
  mpl::FglsOptions opts{a.shrinkage, a.ridge, a.iterations};
  mpl::CovarianceSpec cov = mpl::CovarianceSpec::ols(panel.rows());
  const mpl::MplEstimate est =
      mpl::estimate_fgls(panel, mpl::parse_regime(a.regime), opts, &cov);

  ordered_json j = mpl::estimate_to_json(est);
  if (a.oracle) {
    const mpl::MplEstimate ref = mpl::oracle::stacked_estimate(panel, cov);
    double err = 0.0;
    for (long t = 0; t < est.deflators.size(); ++t)
      err = std::max(err, std::abs(est.deflators(t) - ref.deflators(t)) /
                              std::max(1.0, std::abs(ref.deflators(t))));
    for (long i = 0; i < est.reference_prices.size(); ++i)
      err = std::max(err, std::abs(est.reference_prices(i) - ref.reference_prices(i)) /
                              std::max(1.0, std::abs(ref.reference_prices(i))));
    const double kscale = std::max(1.0, ref.kappa.cwiseAbs().maxCoeff());
    err = std::max(err, (est.kappa - ref.kappa).cwiseAbs().maxCoeff() / kscale);
    ordered_json o;
    o["max_rel_err"] = mpl::json_num(err);
    o["ok"] = err <= 1e-10;
    j["oracle"] = o;
    std::fprintf(stderr, "oracle cross-check: max rel err = %.3e (%s)\n", err,
                 err <= 1e-10 ? "ok" : "MISMATCH");
  }
  j["manifest"] = manifest.to_json();
  emit(j, a.out);
  if (a.table) print_estimate_table(est);
  return 0;
}

// ---- update ---------------------------------------------------------------

struct UpdateArgs {
  std::string panel_csv, append_csv, estimate_json, mode = "period", regime = "ols", out;
  LoadOptions load;
  double shrinkage = 0.25, ridge = 1e-8;
};

mpl::NewColumn column_from_records(const mpl::Panel& panel,
                                   const std::vector<mpl::Record>& records) {
  std::string label;
  mpl::NewColumn col;
  col.quantities = Eigen::VectorXd::Zero(panel.rows());
  col.values = Eigen::VectorXd::Zero(panel.rows());
  std::map<std::string, int> entity_of;
  for (int i = 0; i < panel.rows(); ++i) entity_of[panel.entities[i]] = i;
  for (const auto& r : records) {
    if (label.empty()) label = r.period;
    if (r.period != label)
      fail(Errc::InvalidInput, "appended records must share one new period label");
    const auto it = entity_of.find(r.entity);
    if (it == entity_of.end())
      fail(Errc::InvalidInput, "appended entity '" + r.entity + "' not in the kept basket");
    if (col.quantities(it->second) != 0.0)
      fail(Errc::DuplicateCell, "duplicate appended record for " + r.entity);
    if (!(r.quantity > 0.0) || !(r.value > 0.0))
      fail(Errc::NonPositiveRecord, "appended record must be strictly positive");
    col.quantities(it->second) = r.quantity;
    col.values(it->second) = r.value;
  }
  for (const auto& p : panel.periods)
    if (p == label) fail(Errc::InvalidInput, "appended period '" + label + "' already present");
  col.label = label;
  return col;
}

int run_update(const UpdateArgs& a, Manifest manifest) {
  const mpl::Panel panel = load_filtered_panel(a.panel_csv, a.load);
  const mpl::NewColumn col = column_from_records(panel, mpl::read_records_file(a.append_csv));
  const mpl::Regime regime = mpl::parse_regime(a.regime);

  // Refresh the covariance block from the appended panel's spherical
  // residuals; the same shared block covers the new column.
  const mpl::Panel extended = mpl::append_column(panel, col);
  const mpl::CovarianceSpec cov = mpl::estimate_omega(extended, regime, a.shrinkage, a.ridge);

  ordered_json j;
  if (a.mode == "country") {
    const mpl::MplEstimate est = mpl::update_multilateral(panel, col, cov);
    j = mpl::estimate_to_json(est);
  } else if (a.mode == "period") {
    if (a.estimate_json.empty())
      fail(Errc::InvalidInput, "period mode needs --estimate with the previous fit");
    std::ifstream in(a.estimate_json);
    if (!in) fail(Errc::InvalidInput, "cannot open " + a.estimate_json);
    nlohmann::json prev_json = nlohmann::json::parse(in, nullptr, false);
    if (prev_json.is_discarded()) fail(Errc::InvalidInput, "malformed estimate JSON");
    const mpl::MplEstimate prev = mpl::estimate_from_json(prev_json);
    const mpl::PeriodUpdate up = mpl::update_multiperiod(prev, panel, col, cov);

    mpl::MplEstimate merged = prev;
    const long t = prev.deflators.size();
    merged.periods.push_back(col.label);
    merged.deflators.conservativeResize(t + 1);
    merged.deflators(t) = up.delta_new;
    merged.indices.conservativeResize(t + 1);
    merged.indices(t) = up.lambda_new;
    merged.deflator_se.conservativeResize(t + 1);
    merged.deflator_se(t) = up.se_delta;
    merged.index_se.conservativeResize(t + 1);
    merged.index_se(t) = up.se_lambda;
    merged.reference_prices = up.reference_prices;
    merged.sigma2 = up.sigma2;
    merged.residuals.resize(0, 0);
    j = mpl::estimate_to_json(merged);
  } else {
    fail(Errc::InvalidInput, "mode must be period or country");
  }
  j["manifest"] = manifest.to_json();
  emit(j, a.out);
  return 0;
}

// ---- compare ----------------------------------------------------------------

struct CompareArgs {
  std::string csv, baseline = "tpd", regime = "gls-d", out, bands_csv;
  LoadOptions load;
  bool weighted = false;
  double shrinkage = 0.25, ridge = 1e-8;
};

int run_compare(const CompareArgs& a, Manifest manifest) {
  const mpl::Panel panel = load_filtered_panel(a.csv, a.load);
  const mpl::MplEstimate est = mpl::estimate_fgls(panel, mpl::parse_regime(a.regime),
                                                  {a.shrinkage, a.ridge, 1});
  const mpl::CpdFit fit =
      mpl::cpd_estimate(mpl::tableau_from_panel(panel), a.weighted, panel.base_index);

  ordered_json j;
  j["periods"] = panel.periods;
  ordered_json m;
  m["label"] = std::string("mpl-") + a.regime;
  m["indices"] = mpl::json_vec(est.indices);
  m["se"] = mpl::json_vec(est.index_se);
  j["mpl"] = m;
  ordered_json b;
  b["label"] = a.baseline + (a.weighted ? "-weighted" : "");
  b["indices"] = mpl::json_vec(fit.indices);
  b["se"] = mpl::json_vec(fit.se);
  j["baseline"] = b;
  j["manifest"] = manifest.to_json();
  emit(j, a.out);

  if (!a.bands_csv.empty()) {
    std::ofstream out(a.bands_csv);
    if (!out) fail(Errc::InvalidInput, "cannot write " + a.bands_csv);
    out << "period,mpl_index,mpl_low,mpl_high,baseline_index,baseline_low,baseline_high\n";
    char buf[220];
    for (int t = 0; t < panel.cols(); ++t) {
      std::snprintf(buf, sizeof buf, "%s,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                    panel.periods[t].c_str(), est.indices(t),
                    est.indices(t) - 2 * est.index_se(t), est.indices(t) + 2 * est.index_se(t),
                    fit.indices(t), fit.indices(t) - 2 * fit.se(t),
                    fit.indices(t) + 2 * fit.se(t));
      out << buf;
    }
  }
  return 0;
}

// ---- simulate ---------------------------------------------------------------

struct SimulateArgs {
  std::string csv, scheme = "additive", estimators = "mpl-gls-d,tpd", out, csv_out;
  std::string true_lambda, true_pref;
  LoadOptions load;
  double mean = 0.0, sd_low = 0.0, sd_high = 0.0;
  int replications = 1;
};

int run_simulate(const SimulateArgs& a, Manifest manifest) {
  const mpl::Panel panel = load_filtered_panel(a.csv, a.load);
  mpl::SimConfig cfg;
  cfg.scheme = mpl::parse_scheme(a.scheme);
  cfg.noise_mean = a.mean;
  cfg.sd_low = a.sd_low;
  cfg.sd_high = a.sd_high;
  cfg.replications = a.replications;
  cfg.seed = manifest.seed;
  if (!a.true_lambda.empty()) cfg.true_lambda = parse_vector(a.true_lambda, "--true-lambda");
  if (!a.true_pref.empty()) cfg.true_pref = parse_vector(a.true_pref, "--true-pref");

  std::vector<mpl::EstimatorSpec> specs;
  for (const auto& label : split_list(a.estimators))
    specs.push_back(mpl::parse_estimator_spec(label));

  const mpl::SimReport report = mpl::run_perturbation(panel, cfg, specs);
  ordered_json j = mpl::sim_report_to_json(report);
  j["manifest"] = manifest.to_json();
  emit(j, a.out);
  if (!a.csv_out.empty()) {
    std::ofstream out(a.csv_out);
    if (!out) fail(Errc::InvalidInput, "cannot write " + a.csv_out);
    mpl::sim_report_to_csv(out, report);
  }
  return 0;
}

// ---- axioms -----------------------------------------------------------------

struct AxiomsArgs {
  std::string weighting = "constant", out;
  int n = 6;
  double z = 1.0;
};

int run_axioms(const AxiomsArgs& a, Manifest manifest) {
  if (a.n < 1) fail(Errc::InvalidInput, "--n must be positive");
  mpl::CounterRng rng = mpl::CounterRng::substream(manifest.seed, 0);
  auto draw = [&](double lo, double hi) {
    Eigen::VectorXd v(a.n);
    for (int i = 0; i < a.n; ++i) v(i) = rng.uniform(lo, hi);
    return v;
  };
  mpl::TwoPeriodInstance inst{draw(0.5, 3.0), draw(0.5, 3.0), draw(0.5, 3.0), draw(0.5, 3.0)};
  mpl::AxiomParams params;
  params.gamma = draw(0.5, 2.0);
  params.alpha = 2.5;
  params.k = draw(1.6, 2.5);
  params.beta = 3.0;
  params.p3 = draw(0.5, 3.0);

  mpl::AxiomSubject subject;
  if (a.weighting == "constant") subject = mpl::mpl_subject_constant_theta();
  else if (a.weighting == "price-scaled") subject = mpl::mpl_subject_price_scaled(a.z);
  else if (a.weighting == "gk") subject = mpl::mpl_subject_geary_khamis();
  else fail(Errc::InvalidInput, "weighting must be constant, price-scaled or gk");

  const auto report = mpl::axiom_suite(subject, inst, params);
  std::printf("%-5s %-34s %-15s %-12s %s\n", "id", "property", "status", "discrepancy", "note");
  for (const auto& r : report)
    std::printf("%-5s %-34s %-15s %-12.3e %s\n", r.id.c_str(), r.name.c_str(),
                mpl::axiom_status_name(r.status), r.discrepancy, r.note.c_str());

  ordered_json j;
  j["weighting"] = a.weighting;
  j["n"] = a.n;
  j["report"] = mpl::axiom_report_to_json(report);
  j["manifest"] = manifest.to_json();
  if (!a.out.empty()) emit(j, a.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-period / multilateral price index toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = kDefaultSeed;
  app.add_option("--seed", seed, "seed for any randomness (fixed default)");

  EstimateArgs ea;
  auto* est_cmd = app.add_subcommand("estimate", "fit the index on a long-format CSV panel");
  est_cmd->add_option("csv", ea.csv, "input CSV (entity,period,quantity,value)")->required();
  est_cmd->add_option("--regime", ea.regime, "ols, gls-d, gls-s or gls-f");
  est_cmd->add_option("--base", ea.load.base, "base period label (default: first)");
  est_cmd->add_option("--basket", ea.load.basket, "mpl or intersection");
  est_cmd->add_option("--period-order", ea.load.period_order, "comma-separated period order");
  est_cmd->add_flag("--oracle", ea.oracle, "cross-check against the stacked-system solver");
  est_cmd->add_flag("--table", ea.table, "print a human-readable table to stderr");
  est_cmd->add_option("--shrinkage", ea.shrinkage, "gls-s shrinkage toward the diagonal");
  est_cmd->add_option("--ridge", ea.ridge, "ridge added to estimated blocks");
  est_cmd->add_option("--fgls-iterations", ea.iterations, "covariance re-estimation passes");
  est_cmd->add_option("--out", ea.out, "write the JSON estimate here (default stdout)");

  UpdateArgs ua;
  auto* upd_cmd = app.add_subcommand("update", "append one period/country and update the index");
  upd_cmd->add_option("--panel", ua.panel_csv, "existing panel CSV")->required();
  upd_cmd->add_option("--append", ua.append_csv, "CSV with the new column's records")->required();
  upd_cmd->add_option("--mode", ua.mode, "period (temporal fixity) or country (re-estimate)");
  upd_cmd->add_option("--estimate", ua.estimate_json, "previous estimate JSON (period mode)");
  upd_cmd->add_option("--regime", ua.regime, "ols, gls-d, gls-s or gls-f");
  upd_cmd->add_option("--base", ua.load.base, "base period label");
  upd_cmd->add_option("--basket", ua.load.basket, "mpl or intersection");
  upd_cmd->add_option("--period-order", ua.load.period_order, "comma-separated period order");
  upd_cmd->add_option("--shrinkage", ua.shrinkage, "gls-s shrinkage");
  upd_cmd->add_option("--ridge", ua.ridge, "ridge added to estimated blocks");
  upd_cmd->add_option("--out", ua.out, "output path (default stdout)");

  CompareArgs ca;
  auto* cmp_cmd = app.add_subcommand("compare", "index versus the dummy-variable baseline");
  cmp_cmd->add_option("csv", ca.csv, "input CSV")->required();
  cmp_cmd->add_option("--baseline", ca.baseline, "tpd or cpd (label only)");
  cmp_cmd->add_flag("--weighted", ca.weighted, "expenditure-share weighted baseline");
  cmp_cmd->add_option("--regime", ca.regime, "MPL regime for the comparison");
  cmp_cmd->add_option("--base", ca.load.base, "base period label");
  cmp_cmd->add_option("--basket", ca.load.basket, "mpl or intersection");
  cmp_cmd->add_option("--period-order", ca.load.period_order, "comma-separated period order");
  cmp_cmd->add_option("--bands-csv", ca.bands_csv, "write plot-ready 2-sigma bands here");
  cmp_cmd->add_option("--out", ca.out, "output path (default stdout)");

  SimulateArgs sa;
  auto* sim_cmd = app.add_subcommand("simulate", "perturbation replications over a panel");
  sim_cmd->add_option("csv", sa.csv, "input CSV")->required();
  sim_cmd->add_option("--scheme", sa.scheme, "additive, walk or model");
  sim_cmd->add_option("--mean", sa.mean, "perturbation mean");
  sim_cmd->add_option("--sd-low", sa.sd_low, "lower bound of the per-replication sd");
  sim_cmd->add_option("--sd-high", sa.sd_high, "upper bound of the per-replication sd");
  sim_cmd->add_option("--replications", sa.replications, "number of replications");
  sim_cmd->add_option("--estimators", sa.estimators, "comma list: mpl-<regime>, tpd, tpd-weighted");
  sim_cmd->add_option("--true-lambda", sa.true_lambda, "reference index values (comma list)");
  sim_cmd->add_option("--true-pref", sa.true_pref, "reference prices for the model scheme");
  sim_cmd->add_option("--base", sa.load.base, "base period label");
  sim_cmd->add_option("--basket", sa.load.basket, "mpl or intersection");
  sim_cmd->add_option("--period-order", sa.load.period_order, "comma-separated period order");
  sim_cmd->add_option("--csv-out", sa.csv_out, "flat per-replication CSV for plotting");
  sim_cmd->add_option("--out", sa.out, "output path (default stdout)");

  AxiomsArgs aa;
  auto* ax_cmd = app.add_subcommand("axioms", "property report for the two-period index");
  ax_cmd->add_option("--n", aa.n, "number of commodities in the random instance");
  ax_cmd->add_option("--weighting", aa.weighting, "constant, price-scaled or gk");
  ax_cmd->add_option("--z", aa.z, "scale for the price-scaled weighting");
  ax_cmd->add_option("--out", aa.out, "also write the JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    Manifest manifest;
    manifest.seed = seed;
    std::ostringstream flat;
    for (int i = 1; i < argc; ++i) flat << (i > 1 ? " " : "") << argv[i];
    manifest.flags["argv"] = flat.str();
    if (est_cmd->parsed()) {
      manifest.command = "estimate";
      manifest.inputs = {ea.csv};
      return run_estimate(ea, manifest);
    }
    if (upd_cmd->parsed()) {
      manifest.command = "update";
      manifest.inputs = {ua.panel_csv, ua.append_csv};
      if (!ua.estimate_json.empty()) manifest.inputs.push_back(ua.estimate_json);
      return run_update(ua, manifest);
    }
    if (cmp_cmd->parsed()) {
      manifest.command = "compare";
      manifest.inputs = {ca.csv};
      return run_compare(ca, manifest);
    }
    if (sim_cmd->parsed()) {
      manifest.command = "simulate";
      manifest.inputs = {sa.csv};
      return run_simulate(sa, manifest);
    }
    if (ax_cmd->parsed()) {
      manifest.command = "axioms";
      return run_axioms(aa, manifest);
    }
    return 2;
  } catch (const mpl::Error& e) {
    std::cerr << "error (" << mpl::errc_name(e.code()) << "): " << e.what() << "\n";
    return mpl::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}
