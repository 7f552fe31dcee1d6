#include "roughldp/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace roughldp {

TimeGrid::TimeGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw std::invalid_argument("time grid needs at least one node");
  if (!(nodes_.front() > 0.0)) throw std::invalid_argument("first grid node must be > 0");
  if (nodes_.back() > 1.0 + 1e-15) throw std::invalid_argument("last grid node must be <= 1");
  weights_.resize(nodes_.size());
  double prev = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!(nodes_[i] > prev)) throw std::invalid_argument("grid nodes must be strictly increasing");
    weights_[i] = nodes_[i] - prev;
    prev = nodes_[i];
  }
}

TimeGrid TimeGrid::uniform(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform grid needs n >= 1");
  std::vector<double> nodes(n);
  for (std::size_t i = 0; i < n; ++i) nodes[i] = static_cast<double>(i + 1) / static_cast<double>(n);
  nodes.back() = 1.0;
  return TimeGrid(std::move(nodes));
}

TimeGrid TimeGrid::from_nodes(std::vector<double> nodes) { return TimeGrid(std::move(nodes)); }

std::size_t TimeGrid::index_of(double t) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (std::abs(nodes_[i] - t) <= 1e-9) return i;
  }
  throw std::invalid_argument("time " + std::to_string(t) + " is not a grid node");
}

void require_grid_size(const TimeGrid& grid, std::size_t values, const char* what) {
  if (values != grid.size()) {
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(grid.size()) +
                                " values, got " + std::to_string(values));
  }
}

}  // namespace roughldp
