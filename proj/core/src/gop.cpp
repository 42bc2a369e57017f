#include "mvtraffic/gop.hpp"

#include <cmath>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace mvtraffic {

char frame_type_char(FrameType t) {
  switch (t) {
    case FrameType::I: return 'I';
    case FrameType::P: return 'P';
    case FrameType::B: return 'B';
  }
  throw std::invalid_argument("frame_type_char: unknown frame type");
}

FrameType frame_type_from_char(char c) {
  switch (c) {
    case 'I': return FrameType::I;
    case 'P': return FrameType::P;
    case 'B': return FrameType::B;
    default: break;
  }
  throw std::invalid_argument(std::string("unknown frame type '") + c + "'");
}

namespace {

void require_clean(const std::vector<std::string>& violations, const char* what) {
  if (violations.empty()) return;
  std::ostringstream msg;
  msg << what << ":";
  for (const auto& v : violations) msg << "\n  - " << v;
  throw std::invalid_argument(msg.str());
}

// Kahn topological check over the view dependency edges (v depends on w).
bool deps_acyclic(int num_views, const std::vector<std::pair<int, int>>& deps) {
  std::vector<std::vector<int>> out(num_views);
  std::vector<int> indegree(num_views, 0);
  for (const auto& [v, w] : deps) {
    out[v].push_back(w);
    ++indegree[w];
  }
  std::queue<int> ready;
  for (int v = 0; v < num_views; ++v) {
    if (indegree[v] == 0) ready.push(v);
  }
  int seen = 0;
  while (!ready.empty()) {
    const int v = ready.front();
    ready.pop();
    ++seen;
    for (int w : out[v]) {
      if (--indegree[w] == 0) ready.push(w);
    }
  }
  return seen == num_views;
}

}  // namespace

std::vector<std::string> GopStructure::validate() const {
  std::vector<std::string> violations;
  if (num_views < 1) violations.push_back("num_views must be >= 1");
  if (gop_len < 1) violations.push_back("gop_len must be >= 1");
  if (!(fps > 0.0) || !std::isfinite(fps)) violations.push_back("fps must be finite and > 0");
  if (num_views < 1 || gop_len < 1) return violations;

  const std::size_t nf = static_cast<std::size_t>(frames_per_gop());
  if (frame_labels.size() != nf) {
    violations.push_back("frame_labels must have num_views * gop_len entries");
  }
  if (bin_counts.size() != nf) {
    violations.push_back("bin_counts must have num_views * gop_len entries");
  } else {
    for (std::size_t f = 0; f < nf; ++f) {
      if (bin_counts[f] < 2) {
        violations.push_back("bin_counts[" + std::to_string(f) + "] must be >= 2");
      }
    }
  }

  bool endpoints_ok = true;
  for (const auto& [v, w] : view_deps) {
    if (v < 0 || v >= num_views || w < 0 || w >= num_views) {
      violations.push_back("view_deps endpoint out of range");
      endpoints_ok = false;
    } else if (v == w) {
      violations.push_back("view_deps must not contain self dependencies");
      endpoints_ok = false;
    } else if (v == 0) {
      violations.push_back("view 0 is the reference view and cannot depend on another view");
    }
  }
  if (endpoints_ok && !deps_acyclic(num_views, view_deps)) {
    violations.push_back("view_deps contains a cycle");
  }
  return violations;
}

void GopStructure::require_valid() const {
  require_clean(validate(), "invalid GOP structure");
}

std::vector<std::string> Trace::validate() const {
  std::vector<std::string> violations = structure.validate();
  if (!violations.empty()) return violations;
  const std::size_t nf = static_cast<std::size_t>(structure.frames_per_gop());
  for (std::size_t n = 0; n < gops.size(); ++n) {
    if (gops[n].size() != nf) {
      violations.push_back("gop " + std::to_string(n) + " has " +
                           std::to_string(gops[n].size()) + " frames, expected " +
                           std::to_string(nf));
      continue;
    }
    for (std::size_t f = 0; f < nf; ++f) {
      const double s = gops[n][f];
      if (!std::isfinite(s) || s < 0.0) {
        violations.push_back("gop " + std::to_string(n) + " frame " +
                             std::to_string(f) + " has invalid size");
      }
    }
  }
  return violations;
}

void Trace::require_valid() const {
  require_clean(validate(), "invalid trace");
}

std::vector<double> Trace::frame_size_series(int view) const {
  if (view >= structure.num_views) {
    throw std::invalid_argument("frame_size_series: view out of range");
  }
  std::vector<double> series;
  if (view < 0) {
    series.reserve(gops.size() * structure.frames_per_gop());
    for (const auto& gop : gops) {
      series.insert(series.end(), gop.begin(), gop.end());
    }
  } else {
    series.reserve(gops.size() * structure.gop_len);
    for (const auto& gop : gops) {
      const int base = structure.position(view, 0);
      for (int p = 0; p < structure.gop_len; ++p) {
        series.push_back(gop[base + p]);
      }
    }
  }
  return series;
}

double Trace::total_bytes() const {
  double total = 0.0;
  for (const auto& gop : gops) {
    for (double s : gop) total += s;
  }
  return total;
}

}  // namespace mvtraffic
