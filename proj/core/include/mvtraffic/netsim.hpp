#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mvtraffic/viewswitch.hpp"

namespace mvtraffic {

// Per-packet channel: a frame is split into fixed-size packets, each packet
// is dropped independently and delayed by a Gamma-distributed time, and the
// frame is lost when any of its packets is.
struct ChannelModel {
  double gamma_shape = 4.0;   // delay shape
  double gamma_rate = 80.0;   // delay rate, 1/s (mean delay = shape/rate)
  double loss_prob = 0.025;   // per-packet drop probability

  std::vector<std::string> validate() const;
};

struct SimConfig {
  // Infinite buffers mean the stage never drops.
  double sender_buffer_bits = std::numeric_limits<double>::infinity();
  double receiver_buffer_bits = std::numeric_limits<double>::infinity();
  // Channel rate: the absolute value wins when positive, otherwise the ratio
  // times the offered stream's average bit rate.
  double channel_rate_bps = 0.0;
  double channel_rate_ratio = 2.0;
  ChannelModel channel;
  double prefetch_delay_s = 2.0;   // playout waits this long after the first arrival
  double packet_size_bytes = 1500.0;
  int monte_carlo_runs = 10;
  std::uint64_t seed = 0;
  // Replace sender_buffer_bits by the smallest doubling of the largest frame
  // that keeps sender loss at or below auto_size_target.
  bool auto_size_sender = false;
  double auto_size_target = 0.05;

  std::vector<std::string> validate() const;
  void require_valid() const;
};

// A frame at one point of the pipeline. `id` is the frame's index in the
// offered stream and never changes; it drives both the offered arrival time
// id/fps and the playout deadline.
struct TimedFrame {
  double time_s = 0.0;
  double bits = 0.0;
  long id = 0;
};

struct SenderOutput {
  std::vector<TimedFrame> departed;  // time_s = instant the last bit drains
  long dropped = 0;
};

// Fluid FIFO drained at rate_bps: a frame whose whole size does not fit next
// to the current backlog at its arrival instant is dropped; an accepted
// frame departs once everything ahead of it and itself have drained.
SenderOutput sender_buffer(const std::vector<TimedFrame>& frames, double buffer_bits,
                           double rate_bps);

struct ChannelOutput {
  std::vector<TimedFrame> arrivals;  // delivered frames, nondecreasing times
  long lost = 0;
};

// Applies per-packet loss and delay; a delivered frame arrives when its last
// packet does, pushed forward so arrivals stay in sending order.
ChannelOutput channel(const std::vector<TimedFrame>& departures, const ChannelModel& model,
                      double packet_size_bytes, std::uint64_t seed);

struct PlayoutOutput {
  long played = 0;
  long late = 0;      // arrived after the decoding deadline (or never)
  long overflow = 0;  // arrived in time but did not fit the buffer
};

// Receiver with prefetch: frame id m must be present by
// first_arrival + prefetch_s + m/fps, consumed frames leave the buffer at
// their deadlines, and a frame is checked against its deadline before buffer
// admission.
PlayoutOutput playout(const std::vector<TimedFrame>& arrivals, double fps,
                      double prefetch_s, double buffer_bits);

struct RunCounters {
  long offered = 0;
  long sender_dropped = 0;
  long transmitted = 0;
  long channel_lost = 0;
  long delivered = 0;
  long played = 0;
  long late = 0;
  long overflow = 0;
  double sender_loss = 0.0;   // sender_dropped / offered
  double playout_loss = 0.0;  // (channel_lost + late + overflow) / transmitted
  double overall_loss = 0.0;  // everything lost / offered
};

struct SimReport {
  std::vector<RunCounters> runs;
  double sender_loss_mean = 0.0, sender_loss_std = 0.0;
  double playout_loss_mean = 0.0, playout_loss_std = 0.0;
  double overall_loss_mean = 0.0, overall_loss_std = 0.0;
  double avg_source_rate_bps = 0.0;
  double channel_rate_bps = 0.0;     // resolved rate actually used
  double sender_buffer_bits = 0.0;   // resolved size (after auto-sizing)
};

// Monte Carlo experiment over one offered stream: the sender stage is
// deterministic and runs once; each run redraws the channel with a child
// seed. `fps` spaces both offered arrivals and playout deadlines.
SimReport run_experiment(const std::vector<TransmittedFrame>& offered, double fps,
                         const SimConfig& config);

// Convenience wrapper: all views of the trace, or only the schedule-selected
// ones when a schedule is given.
SimReport run_experiment(const Trace& trace, const std::optional<ViewSchedule>& schedule,
                         const SimConfig& config);

}  // namespace mvtraffic
