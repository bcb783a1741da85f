#include "mpl/panel.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace mpl {

int Panel::presence_count(int i) const {
  int c = 0;
  for (int t = 0; t < cols(); ++t)
    if (present(i, t)) ++c;
  return c;
}

void Panel::validate() const {
  const auto n = quantities.rows();
  const auto t = quantities.cols();
  if (values.rows() != n || values.cols() != t)
    fail(Errc::DimensionMismatch, "quantities and values must have identical shape");
  if (n < 1) fail(Errc::InvalidInput, "panel needs at least one entity");
  if (t < 2) fail(Errc::TooFewPeriods, "panel needs at least two periods");
  if (static_cast<long>(entities.size()) != n || static_cast<long>(periods.size()) != t)
    fail(Errc::DimensionMismatch, "label count does not match matrix shape");
  if (base_index < 0 || base_index >= t) fail(Errc::OutOfRange, "base_index outside [0, T)");
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < t; ++j) {
      const double q = quantities(i, j), v = values(i, j);
      if ((q == 0.0) != (v == 0.0))
        fail(Errc::InvalidInput, "absence must be encoded as the (0, 0) pair at " +
                                     entities[i] + "/" + periods[j]);
      if (q < 0.0 || v < 0.0)
        fail(Errc::InvalidInput, "negative cell at " + entities[i] + "/" + periods[j]);
    }
}

Panel build_panel(const std::vector<Record>& records,
                  const std::vector<std::string>* period_order) {
  std::vector<std::string> entities, periods;
  std::map<std::string, int> entity_of, period_of;

  if (period_order) {
    for (const auto& p : *period_order) {
      if (period_of.count(p)) fail(Errc::InvalidInput, "duplicate period in --period-order: " + p);
      period_of[p] = static_cast<int>(periods.size());
      periods.push_back(p);
    }
  }
  for (const auto& r : records) {
    if (!entity_of.count(r.entity)) {
      entity_of[r.entity] = static_cast<int>(entities.size());
      entities.push_back(r.entity);
    }
    if (!period_of.count(r.period)) {
      if (period_order)
        fail(Errc::InvalidInput, "period not listed in --period-order: " + r.period);
      period_of[r.period] = static_cast<int>(periods.size());
      periods.push_back(r.period);
    }
  }
  const int n = static_cast<int>(entities.size());
  const int t = static_cast<int>(periods.size());
  if (records.empty()) fail(Errc::InvalidInput, "no records");
  if (t < 2) fail(Errc::TooFewPeriods, "need at least two periods, got " + std::to_string(t));

  Panel panel;
  panel.entities = std::move(entities);
  panel.periods = std::move(periods);
  panel.quantities = Eigen::MatrixXd::Zero(n, t);
  panel.values = Eigen::MatrixXd::Zero(n, t);

  std::set<std::pair<int, int>> seen;
  for (const auto& r : records) {
    const int i = entity_of[r.entity];
    const int j = period_of[r.period];
    if (!seen.insert({i, j}).second)
      fail(Errc::DuplicateCell, "two records for cell " + r.entity + "/" + r.period);
    if (!(r.quantity > 0.0) || !(r.value > 0.0))
      fail(Errc::NonPositiveRecord,
           "record " + r.entity + "/" + r.period + " must have positive quantity and value");
    panel.quantities(i, j) = r.quantity;
    panel.values(i, j) = r.value;
  }
  panel.validate();
  return panel;
}

std::vector<Record> to_records(const Panel& panel) {
  std::vector<Record> out;
  for (int i = 0; i < panel.rows(); ++i)
    for (int t = 0; t < panel.cols(); ++t)
      if (panel.present(i, t))
        out.push_back({panel.entities[i], panel.periods[t], panel.quantities(i, t),
                       panel.values(i, t)});
  return out;
}

BasketReport reference_basket(const Panel& panel, BasketMode mode) {
  panel.validate();
  BasketReport report;
  const int threshold = mode == BasketMode::UnionPairwise ? 2 : panel.cols();
  for (int i = 0; i < panel.rows(); ++i) {
    const int c = panel.presence_count(i);
    report.presence_counts.push_back(c);
    (c >= threshold ? report.kept : report.dropped).push_back(i);
  }
  if (report.kept.empty())
    fail(Errc::EmptyBasket, "no entity satisfies the reference-basket rule");
  return report;
}

Panel filter_panel(const Panel& panel, const BasketReport& report) {
  if (report.kept.empty()) fail(Errc::EmptyBasket, "basket report keeps no entity");
  if (report.kept.size() == static_cast<size_t>(panel.rows()) && report.dropped.empty()) {
    bool identity = true;
    for (size_t k = 0; k < report.kept.size(); ++k)
      if (report.kept[k] != static_cast<int>(k)) identity = false;
    if (identity) return panel;
  }
  Panel out;
  out.periods = panel.periods;
  out.base_index = panel.base_index;
  const int n = static_cast<int>(report.kept.size());
  out.quantities.resize(n, panel.cols());
  out.values.resize(n, panel.cols());
  for (int k = 0; k < n; ++k) {
    const int i = report.kept[k];
    if (i < 0 || i >= panel.rows()) fail(Errc::OutOfRange, "basket report row out of range");
    out.entities.push_back(panel.entities[i]);
    out.quantities.row(k) = panel.quantities.row(i);
    out.values.row(k) = panel.values.row(i);
  }
  out.validate();
  return out;
}

}  // namespace mpl
