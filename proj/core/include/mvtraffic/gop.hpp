#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace mvtraffic {

enum class FrameType { I, P, B };

char frame_type_char(FrameType t);
FrameType frame_type_from_char(char c);

// Static description of one multiview GOP: view count, frames per view,
// per-position frame types and histogram bin counts, and the inter-view
// prediction edges. Frame positions are indexed view-major: position
// f = view * gop_len + pos_in_view, and that order is the canonical
// transmission order used everywhere (traces, quantization grids, emission
// tables, simulator streams).
struct GopStructure {
  int num_views = 0;
  int gop_len = 0;  // frames per view per GOP
  double fps = 25.0;
  std::vector<FrameType> frame_labels;            // size num_views * gop_len
  std::vector<int> bin_counts;                    // same indexing
  std::vector<std::pair<int, int>> view_deps;     // (v, w): v is predicted from w

  int frames_per_gop() const { return num_views * gop_len; }
  int position(int view, int pos_in_view) const {
    return view * gop_len + pos_in_view;
  }

  // Every violated structural invariant, in a human-readable form; empty when
  // the structure is well formed.
  std::vector<std::string> validate() const;
  void require_valid() const;
};

// Frame sizes of one GOP in canonical position order, in bytes.
using GopVector = std::vector<double>;

struct Trace {
  GopStructure structure;
  std::vector<GopVector> gops;

  std::size_t size() const { return gops.size(); }

  std::vector<std::string> validate() const;
  void require_valid() const;

  // Frame sizes flattened across GOPs in canonical order; restricted to one
  // view's positions when view >= 0.
  std::vector<double> frame_size_series(int view = -1) const;

  double total_bytes() const;
};

}  // namespace mvtraffic
