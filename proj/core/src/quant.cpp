#include "mvtraffic/quant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mvtraffic {

std::vector<std::string> QuantGrid::validate() const {
  std::vector<std::string> violations;
  for (std::size_t f = 0; f < positions.size(); ++f) {
    const BinRange& r = positions[f];
    if (r.bins < 2) {
      violations.push_back("position " + std::to_string(f) + ": bins must be >= 2");
    }
    if (!std::isfinite(r.lower) || !std::isfinite(r.upper) || !(r.upper > r.lower)) {
      violations.push_back("position " + std::to_string(f) + ": upper must exceed lower");
    }
  }
  return violations;
}

void QuantGrid::require_valid() const {
  const auto violations = validate();
  if (violations.empty()) return;
  std::ostringstream msg;
  msg << "invalid quantization grid:";
  for (const auto& v : violations) msg << "\n  - " << v;
  throw std::invalid_argument(msg.str());
}

QuantGrid grid_from_trace(const Trace& trace) {
  trace.require_valid();
  if (trace.gops.empty()) {
    throw std::invalid_argument("grid_from_trace: trace has no GOPs");
  }
  const int nf = trace.structure.frames_per_gop();
  QuantGrid grid;
  grid.positions.resize(nf);
  for (int f = 0; f < nf; ++f) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& gop : trace.gops) {
      lo = std::min(lo, gop[f]);
      hi = std::max(hi, gop[f]);
    }
    if (!(hi > lo)) hi = lo + 1.0;
    grid.positions[f] = BinRange{lo, hi, trace.structure.bin_counts[f]};
  }
  return grid;
}

namespace {

const BinRange& range_at(const QuantGrid& grid, int position) {
  if (position < 0 || static_cast<std::size_t>(position) >= grid.positions.size()) {
    throw std::out_of_range("quantization grid: position " + std::to_string(position) +
                            " out of range");
  }
  return grid.positions[position];
}

}  // namespace

int size_to_bin(double size, int position, const QuantGrid& grid) {
  const BinRange& r = range_at(grid, position);
  if (!std::isfinite(size)) {
    throw std::invalid_argument("size_to_bin: size must be finite");
  }
  if (size <= r.lower) return 0;
  if (size >= r.upper) return r.bins - 1;
  const int bin = static_cast<int>((size - r.lower) / r.width());
  return std::clamp(bin, 0, r.bins - 1);
}

double bin_to_size(int bin, int position, const QuantGrid& grid) {
  const BinRange& r = range_at(grid, position);
  if (bin < 0 || bin >= r.bins) {
    throw std::out_of_range("bin_to_size: bin " + std::to_string(bin) +
                            " out of range for position " + std::to_string(position));
  }
  return r.lower + r.width() * (bin + 0.5);
}

}  // namespace mvtraffic
