#include "mvtraffic/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <stdexcept>

#include "mvtraffic/rng.hpp"

namespace mvtraffic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_clean(const std::vector<std::string>& violations, const char* what) {
  if (violations.empty()) return;
  std::ostringstream msg;
  msg << what << ":";
  for (const auto& v : violations) msg << "\n  - " << v;
  throw std::invalid_argument(msg.str());
}

}  // namespace

std::vector<std::string> ChannelModel::validate() const {
  std::vector<std::string> violations;
  if (!(gamma_shape > 0.0)) violations.push_back("channel gamma_shape must be > 0");
  if (!(gamma_rate > 0.0)) violations.push_back("channel gamma_rate must be > 0");
  if (!(loss_prob >= 0.0) || loss_prob > 1.0) {
    violations.push_back("channel loss_prob must be in [0, 1]");
  }
  return violations;
}

std::vector<std::string> SimConfig::validate() const {
  std::vector<std::string> violations = channel.validate();
  if (!(sender_buffer_bits > 0.0)) violations.push_back("sender_buffer_bits must be > 0");
  if (!(receiver_buffer_bits > 0.0)) {
    violations.push_back("receiver_buffer_bits must be > 0");
  }
  if (channel_rate_bps < 0.0) violations.push_back("channel_rate_bps must be >= 0");
  if (channel_rate_bps == 0.0 && !(channel_rate_ratio > 0.0)) {
    violations.push_back("channel_rate_ratio must be > 0 when no absolute rate is set");
  }
  if (!(prefetch_delay_s >= 0.0)) violations.push_back("prefetch_delay_s must be >= 0");
  if (!(packet_size_bytes > 0.0)) violations.push_back("packet_size_bytes must be > 0");
  if (monte_carlo_runs < 1) violations.push_back("monte_carlo_runs must be >= 1");
  if (auto_size_sender && !(auto_size_target > 0.0 && auto_size_target < 1.0)) {
    violations.push_back("auto_size_target must be in (0, 1)");
  }
  return violations;
}

void SimConfig::require_valid() const {
  require_clean(validate(), "invalid simulation configuration");
}

SenderOutput sender_buffer(const std::vector<TimedFrame>& frames, double buffer_bits,
                           double rate_bps) {
  if (!(buffer_bits > 0.0)) throw std::invalid_argument("sender_buffer: buffer must be > 0");
  if (!(rate_bps >= 0.0)) throw std::invalid_argument("sender_buffer: rate must be >= 0");

  SenderOutput out;
  out.departed.reserve(frames.size());
  double backlog = 0.0;       // bits still queued
  double backlog_time = 0.0;  // instant `backlog` refers to
  for (const TimedFrame& frame : frames) {
    if (frame.time_s < backlog_time) {
      throw std::invalid_argument("sender_buffer: frames must arrive in time order");
    }
    if (rate_bps == kInf) {
      backlog = 0.0;
    } else {
      backlog = std::max(0.0, backlog - rate_bps * (frame.time_s - backlog_time));
    }
    backlog_time = frame.time_s;
    if (backlog + frame.bits > buffer_bits) {
      ++out.dropped;
      continue;
    }
    backlog += frame.bits;
    double departure;
    if (rate_bps == 0.0) {
      departure = backlog > 0.0 ? kInf : frame.time_s;
    } else {
      departure = frame.time_s + backlog / rate_bps;
    }
    out.departed.push_back(TimedFrame{departure, frame.bits, frame.id});
  }
  return out;
}

ChannelOutput channel(const std::vector<TimedFrame>& departures, const ChannelModel& model,
                      double packet_size_bytes, std::uint64_t seed) {
  require_clean(model.validate(), "invalid channel model");
  if (!(packet_size_bytes > 0.0)) {
    throw std::invalid_argument("channel: packet size must be > 0");
  }

  Rng rng(seed);
  ChannelOutput out;
  out.arrivals.reserve(departures.size());
  double last_arrival = -kInf;
  for (const TimedFrame& frame : departures) {
    const double bytes = frame.bits / 8.0;
    const long packets = std::max(1L, static_cast<long>(std::ceil(bytes / packet_size_bytes)));
    bool lost = false;
    double worst_delay = 0.0;
    for (long p = 0; p < packets; ++p) {
      if (rng.bernoulli(model.loss_prob)) lost = true;
      worst_delay = std::max(worst_delay, rng.gamma(model.gamma_shape, model.gamma_rate));
    }
    if (lost) {
      ++out.lost;
      continue;
    }
    // Frames leave in order, so reordering by delay only shifts the arrival
    // to the previous frame's.
    const double arrival = std::max(frame.time_s + worst_delay, last_arrival);
    last_arrival = arrival;
    out.arrivals.push_back(TimedFrame{arrival, frame.bits, frame.id});
  }
  return out;
}

PlayoutOutput playout(const std::vector<TimedFrame>& arrivals, double fps,
                      double prefetch_s, double buffer_bits) {
  if (!(fps > 0.0)) throw std::invalid_argument("playout: fps must be > 0");
  if (!(prefetch_s >= 0.0)) throw std::invalid_argument("playout: prefetch must be >= 0");
  if (!(buffer_bits > 0.0)) throw std::invalid_argument("playout: buffer must be > 0");

  PlayoutOutput out;
  if (arrivals.empty()) return out;
  const double start = arrivals.front().time_s;
  if (start == kInf) {
    // Nothing ever arrives; every frame misses its deadline.
    out.late = static_cast<long>(arrivals.size());
    return out;
  }

  std::deque<TimedFrame> buffered;  // time_s holds the deadline once admitted
  double occupancy = 0.0;
  for (const TimedFrame& frame : arrivals) {
    // Frames scheduled before this arrival have been consumed by now.
    while (!buffered.empty() && buffered.front().time_s <= frame.time_s) {
      occupancy -= buffered.front().bits;
      buffered.pop_front();
      ++out.played;
    }
    const double deadline = start + prefetch_s + static_cast<double>(frame.id) / fps;
    if (frame.time_s > deadline) {
      ++out.late;
      continue;
    }
    if (occupancy + frame.bits > buffer_bits) {
      ++out.overflow;
      continue;
    }
    occupancy += frame.bits;
    buffered.push_back(TimedFrame{deadline, frame.bits, frame.id});
  }
  out.played += static_cast<long>(buffered.size());
  return out;
}

namespace {

double sample_std(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace

SimReport run_experiment(const std::vector<TransmittedFrame>& offered, double fps,
                         const SimConfig& config) {
  config.require_valid();
  if (!(fps > 0.0)) throw std::invalid_argument("run_experiment: fps must be > 0");
  if (offered.empty()) throw std::invalid_argument("run_experiment: no frames to send");

  std::vector<TimedFrame> timed(offered.size());
  double total_bits = 0.0;
  double max_bits = 0.0;
  for (std::size_t m = 0; m < offered.size(); ++m) {
    const double bits = offered[m].bytes * 8.0;
    timed[m] = TimedFrame{static_cast<double>(m) / fps, bits, static_cast<long>(m)};
    total_bits += bits;
    max_bits = std::max(max_bits, bits);
  }

  SimReport report;
  report.avg_source_rate_bps = total_bits * fps / static_cast<double>(offered.size());
  report.channel_rate_bps = config.channel_rate_bps > 0.0
                                ? config.channel_rate_bps
                                : config.channel_rate_ratio * report.avg_source_rate_bps;

  const long offered_count = static_cast<long>(offered.size());
  double buffer_bits = config.sender_buffer_bits;
  SenderOutput sent;
  if (config.auto_size_sender) {
    buffer_bits = std::max(max_bits, 1.0);
    for (int attempt = 0; attempt < 64; ++attempt) {
      sent = sender_buffer(timed, buffer_bits, report.channel_rate_bps);
      const double loss = static_cast<double>(sent.dropped) / offered_count;
      if (loss <= config.auto_size_target) break;
      buffer_bits *= 2.0;
    }
  } else {
    sent = sender_buffer(timed, buffer_bits, report.channel_rate_bps);
  }
  report.sender_buffer_bits = buffer_bits;

  std::vector<double> sender_losses, playout_losses, overall_losses;
  for (int r = 0; r < config.monte_carlo_runs; ++r) {
    const ChannelOutput ch = channel(sent.departed, config.channel,
                                     config.packet_size_bytes,
                                     Rng::derive_seed(config.seed, r));
    const PlayoutOutput pl = playout(ch.arrivals, fps, config.prefetch_delay_s,
                                     config.receiver_buffer_bits);
    RunCounters c;
    c.offered = offered_count;
    c.sender_dropped = sent.dropped;
    c.transmitted = static_cast<long>(sent.departed.size());
    c.channel_lost = ch.lost;
    c.delivered = static_cast<long>(ch.arrivals.size());
    c.played = pl.played;
    c.late = pl.late;
    c.overflow = pl.overflow;
    c.sender_loss = static_cast<double>(c.sender_dropped) / c.offered;
    c.playout_loss = c.transmitted > 0
                         ? static_cast<double>(c.channel_lost + c.late + c.overflow) /
                               c.transmitted
                         : 0.0;
    c.overall_loss =
        static_cast<double>(c.sender_dropped + c.channel_lost + c.late + c.overflow) /
        c.offered;
    sender_losses.push_back(c.sender_loss);
    playout_losses.push_back(c.playout_loss);
    overall_losses.push_back(c.overall_loss);
    report.runs.push_back(c);
  }

  const double n = static_cast<double>(report.runs.size());
  for (double v : sender_losses) report.sender_loss_mean += v / n;
  for (double v : playout_losses) report.playout_loss_mean += v / n;
  for (double v : overall_losses) report.overall_loss_mean += v / n;
  report.sender_loss_std = sample_std(sender_losses, report.sender_loss_mean);
  report.playout_loss_std = sample_std(playout_losses, report.playout_loss_mean);
  report.overall_loss_std = sample_std(overall_losses, report.overall_loss_mean);
  return report;
}

SimReport run_experiment(const Trace& trace, const std::optional<ViewSchedule>& schedule,
                         const SimConfig& config) {
  const std::vector<TransmittedFrame> offered =
      schedule ? compose_interactive_trace(trace, *schedule) : full_stream(trace);
  return run_experiment(offered, trace.structure.fps, config);
}

}  // namespace mvtraffic
