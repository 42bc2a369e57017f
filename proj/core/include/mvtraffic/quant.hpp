#pragma once

#include <string>
#include <vector>

#include "mvtraffic/gop.hpp"

namespace mvtraffic {

// Equal-width bin range for one GOP position.
struct BinRange {
  double lower = 0.0;
  double upper = 0.0;
  int bins = 0;

  double width() const { return (upper - lower) / bins; }
};

// Per-position quantization grid. Bin b of a position covers
// [lower + b*width, lower + (b+1)*width), except the last bin, which is
// closed at `upper`; sizes outside the range clamp to the nearest edge bin.
struct QuantGrid {
  std::vector<BinRange> positions;

  std::size_t num_positions() const { return positions.size(); }
  std::vector<std::string> validate() const;
  void require_valid() const;
};

// Grid spanning the observed min/max frame size at each position, with the
// structure's per-position bin counts. A position whose sizes are all equal
// gets its upper edge widened by one byte so the bins stay nonempty.
QuantGrid grid_from_trace(const Trace& trace);

int size_to_bin(double size, int position, const QuantGrid& grid);

// Midpoint of the given bin, the representative size used when synthesizing.
double bin_to_size(int bin, int position, const QuantGrid& grid);

}  // namespace mvtraffic
