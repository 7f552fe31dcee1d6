#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace roughldp {

/// Discretization of the horizon [0, 1].
///
/// Node i closes the cell (t_{i-1}, t_i] with t_{-1} := 0, and weights()[i]
/// is that cell's width. Controls are piecewise constant on cells, so the
/// weights double as the quadrature rule for L2 inner products over [0, t_n].
class TimeGrid {
 public:
  TimeGrid() = default;

  /// n equal cells; first node at 1/n, last node at 1.
  static TimeGrid uniform(std::size_t n);

  /// Arbitrary strictly increasing nodes in (0, 1].
  static TimeGrid from_nodes(std::vector<double> nodes);

  [[nodiscard]] std::size_t size() const { return nodes_.size(); }
  [[nodiscard]] std::span<const double> nodes() const { return nodes_; }
  [[nodiscard]] std::span<const double> weights() const { return weights_; }
  [[nodiscard]] double node(std::size_t i) const { return nodes_[i]; }
  [[nodiscard]] double weight(std::size_t i) const { return weights_[i]; }
  /// Left edge of cell i (0 for the first cell).
  [[nodiscard]] double cell_start(std::size_t i) const { return i == 0 ? 0.0 : nodes_[i - 1]; }
  [[nodiscard]] double horizon() const { return nodes_.empty() ? 0.0 : nodes_.back(); }

  /// Index of the node equal to t within 1e-9, or throws std::invalid_argument.
  [[nodiscard]] std::size_t index_of(double t) const;

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  explicit TimeGrid(std::vector<double> nodes);

  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Throws std::invalid_argument unless `values` has one entry per node.
void require_grid_size(const TimeGrid& grid, std::size_t values, const char* what);

}  // namespace roughldp
