#include "mvtraffic/viewswitch.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "mvtraffic/rng.hpp"

namespace mvtraffic {

namespace {

constexpr double kSumTolerance = 1e-9;

void require_clean(const std::vector<std::string>& violations, const char* what) {
  if (violations.empty()) return;
  std::ostringstream msg;
  msg << what << ":";
  for (const auto& v : violations) msg << "\n  - " << v;
  throw std::invalid_argument(msg.str());
}

}  // namespace

std::vector<std::string> VsmParams::validate() const {
  std::vector<std::string> violations;
  const int V = num_views;
  if (V < 1) {
    violations.push_back("num_views must be >= 1");
    return violations;
  }
  if (trans.size() != static_cast<std::size_t>(V)) {
    violations.push_back("trans must be " + std::to_string(V) + "x" + std::to_string(V));
  } else {
    for (int i = 0; i < V; ++i) {
      if (trans[i].size() != static_cast<std::size_t>(V)) {
        violations.push_back("trans row " + std::to_string(i) + " has wrong length");
        continue;
      }
      if (trans[i][i] != 0.0) {
        violations.push_back("trans diagonal entry " + std::to_string(i) + " must be 0");
      }
      double row_sum = 0.0;
      bool row_ok = true;
      for (int j = 0; j < V; ++j) {
        if (!(trans[i][j] >= 0.0) || !std::isfinite(trans[i][j])) {
          violations.push_back("trans[" + std::to_string(i) + "][" + std::to_string(j) +
                               "] must be finite and >= 0");
          row_ok = false;
        }
        row_sum += trans[i][j];
      }
      if (!row_ok) continue;
      if (V == 1) {
        if (row_sum != 0.0) violations.push_back("single-view trans row must be all zeros");
      } else if (std::fabs(row_sum - 1.0) > kSumTolerance) {
        violations.push_back("trans row " + std::to_string(i) + " must sum to 1");
      }
    }
  }
  if (mean_stay_s.size() != static_cast<std::size_t>(V) ||
      std_stay_s.size() != static_cast<std::size_t>(V)) {
    violations.push_back("mean_stay_s and std_stay_s must have one entry per view");
    return violations;
  }
  for (int i = 0; i < V; ++i) {
    if (!(mean_stay_s[i] > 0.0) || !std::isfinite(mean_stay_s[i])) {
      violations.push_back("mean_stay_s[" + std::to_string(i) + "] must be finite and > 0");
    }
    if (!(std_stay_s[i] > 0.0) || !std::isfinite(std_stay_s[i])) {
      violations.push_back("std_stay_s[" + std::to_string(i) + "] must be finite and > 0");
    }
  }
  return violations;
}

void VsmParams::require_valid() const {
  require_clean(validate(), "invalid view-switching parameters");
}

GammaShapeRate gamma_from_moments(double mean, double stddev) {
  if (!(mean > 0.0) || !(stddev > 0.0)) {
    throw std::invalid_argument("gamma_from_moments: mean and stddev must be > 0");
  }
  const double var = stddev * stddev;
  return GammaShapeRate{mean * mean / var, mean / var};
}

int ViewSchedule::view_at(double t) const {
  if (segments.empty()) throw std::invalid_argument("view_at: empty schedule");
  if (t < 0.0 || t >= horizon_s) {
    throw std::invalid_argument("view_at: time outside [0, horizon)");
  }
  // First segment whose end lies beyond t.
  auto it = std::upper_bound(segments.begin(), segments.end(), t,
                             [](double v, const ViewSegment& s) { return v < s.end_s; });
  if (it == segments.end()) return segments.back().view;
  return it->view;
}

std::vector<std::string> ViewSchedule::validate() const {
  std::vector<std::string> violations;
  if (!(horizon_s > 0.0)) violations.push_back("horizon must be > 0");
  if (segments.empty()) {
    violations.push_back("schedule has no segments");
    return violations;
  }
  if (segments.front().start_s != 0.0) violations.push_back("first segment must start at 0");
  if (segments.back().end_s != horizon_s) {
    violations.push_back("last segment must end at the horizon");
  }
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    if (!(s.end_s > s.start_s)) {
      violations.push_back("segment " + std::to_string(i) + " has nonpositive length");
    }
    if (i > 0) {
      if (s.start_s != segments[i - 1].end_s) {
        violations.push_back("segment " + std::to_string(i) + " is not contiguous");
      }
      if (s.view == segments[i - 1].view) {
        violations.push_back("segment " + std::to_string(i) + " repeats the previous view");
      }
    }
  }
  return violations;
}

void ViewSchedule::require_valid() const {
  require_clean(validate(), "invalid view schedule");
}

ViewSchedule generate_schedule(const VsmParams& params, double horizon_s,
                               std::uint64_t seed) {
  params.require_valid();
  if (!(horizon_s > 0.0) || !std::isfinite(horizon_s)) {
    throw std::invalid_argument("generate_schedule: horizon must be finite and > 0");
  }

  ViewSchedule schedule;
  schedule.horizon_s = horizon_s;

  if (params.num_views == 1) {
    schedule.segments.push_back(ViewSegment{0, 0.0, horizon_s});
    return schedule;
  }

  Rng rng(seed);
  int view = 0;
  double t = 0.0;
  while (t < horizon_s) {
    const GammaShapeRate g =
        gamma_from_moments(params.mean_stay_s[view], params.std_stay_s[view]);
    const double stay = rng.gamma(g.shape, g.rate);
    const double end = std::min(t + stay, horizon_s);
    schedule.segments.push_back(ViewSegment{view, t, end});
    t += stay;
    if (t >= horizon_s) break;
    view = static_cast<int>(rng.categorical(params.trans[view]));
  }
  return schedule;
}

std::vector<int> dependency_closure(const GopStructure& structure, int view) {
  structure.require_valid();
  if (view < 0 || view >= structure.num_views) {
    throw std::invalid_argument("dependency_closure: view out of range");
  }
  std::vector<char> seen(structure.num_views, 0);
  std::queue<int> frontier;
  seen[view] = 1;
  frontier.push(view);
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop();
    for (const auto& [from, to] : structure.view_deps) {
      if (from == v && !seen[to]) {
        seen[to] = 1;
        frontier.push(to);
      }
    }
  }
  std::vector<int> closure;
  for (int v = 0; v < structure.num_views; ++v) {
    if (seen[v]) closure.push_back(v);
  }
  return closure;
}

std::vector<TransmittedFrame> full_stream(const Trace& trace) {
  trace.require_valid();
  const GopStructure& st = trace.structure;
  std::vector<TransmittedFrame> frames;
  frames.reserve(trace.size() * st.frames_per_gop());
  for (long n = 0; n < static_cast<long>(trace.size()); ++n) {
    for (int v = 0; v < st.num_views; ++v) {
      for (int p = 0; p < st.gop_len; ++p) {
        frames.push_back(TransmittedFrame{n, v, p, trace.gops[n][st.position(v, p)]});
      }
    }
  }
  return frames;
}

std::vector<TransmittedFrame> compose_interactive_trace(const Trace& trace,
                                                        const ViewSchedule& schedule) {
  trace.require_valid();
  schedule.require_valid();
  const GopStructure& st = trace.structure;
  const double gop_duration = st.gop_len / st.fps;
  const double trace_duration = static_cast<double>(trace.size()) * gop_duration;
  if (schedule.horizon_s > trace_duration + 1e-9) {
    throw std::invalid_argument("compose_interactive_trace: schedule outlives the trace");
  }

  std::vector<TransmittedFrame> frames;
  for (long n = 0; n < static_cast<long>(trace.size()); ++n) {
    const double gop_start = static_cast<double>(n) * gop_duration;
    if (gop_start >= schedule.horizon_s) break;
    const int active = schedule.view_at(gop_start);
    for (int v : dependency_closure(st, active)) {
      for (int p = 0; p < st.gop_len; ++p) {
        frames.push_back(TransmittedFrame{n, v, p, trace.gops[n][st.position(v, p)]});
      }
    }
  }
  return frames;
}

}  // namespace mvtraffic
