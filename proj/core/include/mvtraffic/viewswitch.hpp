#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvtraffic/gop.hpp"

namespace mvtraffic {

// Viewer behavior: stay on a view for a Gamma-distributed time, then switch
// to a different view according to a zero-diagonal transition matrix.
struct VsmParams {
  int num_views = 0;
  std::vector<std::vector<double>> trans;  // zero diagonal, rows sum to 1
  std::vector<double> mean_stay_s;         // per-view stay mean, seconds
  std::vector<double> std_stay_s;          // per-view stay standard deviation

  std::vector<std::string> validate() const;
  void require_valid() const;
};

struct GammaShapeRate {
  double shape = 0.0;
  double rate = 0.0;
};

// Moment match: shape = mu^2/sigma^2, rate = mu/sigma^2.
GammaShapeRate gamma_from_moments(double mean, double stddev);

struct ViewSegment {
  int view = 0;
  double start_s = 0.0;
  double end_s = 0.0;
};

// Contiguous view segments covering [0, horizon_s); consecutive segments have
// distinct views and the last one is truncated at the horizon.
struct ViewSchedule {
  double horizon_s = 0.0;
  std::vector<ViewSegment> segments;

  int view_at(double t) const;
  std::vector<std::string> validate() const;
  void require_valid() const;
};

// Samples a schedule starting on view 0. Single-view models yield one segment
// spanning the whole horizon.
ViewSchedule generate_schedule(const VsmParams& params, double horizon_s,
                               std::uint64_t seed);

// Views that must be transmitted so `view` can be decoded: the view itself
// plus everything reachable through the prediction edges. Sorted ascending.
std::vector<int> dependency_closure(const GopStructure& structure, int view);

// One frame of the stream handed to the network simulator, identified by its
// source GOP and position.
struct TransmittedFrame {
  long gop = 0;
  int view = 0;
  int pos_in_view = 0;
  double bytes = 0.0;
};

// All frames of all views in canonical order, the non-interactive baseline.
std::vector<TransmittedFrame> full_stream(const Trace& trace);

// Frames actually sent during an interactive session: per GOP, only the views
// in the dependency closure of the view active at that GOP's start time.
// Switches thereby take effect at the next GOP boundary. GOPs starting at or
// beyond the schedule horizon are not transmitted.
std::vector<TransmittedFrame> compose_interactive_trace(const Trace& trace,
                                                        const ViewSchedule& schedule);

}  // namespace mvtraffic
