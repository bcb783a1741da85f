#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "mpl/errors.hpp"

namespace mpl {

/// One long-format observation: a commodity traded in one period (or country)
/// with a strictly positive quantity and value.
struct Record {
  std::string entity;
  std::string period;
  double quantity = 0.0;
  double value = 0.0;
};

/// Aligned quantity/value panel. A (0, 0) cell means the commodity is absent
/// in that period; present cells are strictly positive in both matrices.
struct Panel {
  std::vector<std::string> entities;  // N labels, first-appearance order
  std::vector<std::string> periods;   // T labels, first-appearance order
  Eigen::MatrixXd quantities;         // N x T
  Eigen::MatrixXd values;             // N x T
  int base_index = 0;                 // reference period/country

  int rows() const { return static_cast<int>(quantities.rows()); }
  int cols() const { return static_cast<int>(quantities.cols()); }
  bool present(int i, int t) const { return quantities(i, t) > 0.0; }
  int presence_count(int i) const;

  /// Throws on any violated invariant (shape, pairing, positivity, base index).
  void validate() const;
};

/// Reference-basket membership: which entities appear often enough to carry
/// weight in the index, and which are dropped.
struct BasketReport {
  std::vector<int> kept;
  std::vector<int> dropped;
  std::vector<int> presence_counts;  // per entity
};

enum class BasketMode {
  UnionPairwise,  // present in at least two periods (default)
  IntersectAll,   // present in every period ("classical" basket)
};

Panel build_panel(const std::vector<Record>& records,
                  const std::vector<std::string>* period_order = nullptr);

std::vector<Record> to_records(const Panel& panel);

BasketReport reference_basket(const Panel& panel, BasketMode mode = BasketMode::UnionPairwise);

/// Restrict rows to report.kept; labels and base_index are preserved.
Panel filter_panel(const Panel& panel, const BasketReport& report);

}  // namespace mpl
