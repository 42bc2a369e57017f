#pragma once

#include <string>
#include <vector>

#include "mvtraffic/phmm.hpp"

namespace mvtraffic {

struct TrellisOptions {
  // Largest extra stay tracked per trellis cell; 0 disables the cap and k
  // ranges over the full window remainder. When active, the capped k absorbs
  // the duration tail, trading exactness for O(N * cap) cells.
  long max_duration = 0;
  // Keep the full per-GOP boundary posteriors (xi) instead of only their
  // aggregates. Memory grows to O(N^2 * S^2); meant for debugging.
  bool retain_xi = false;
};

// Lower-triangular (GOP, remaining-stay) array per state: at GOP n the
// remaining extra stay k runs over 0..k_top(n), which shrinks toward the end
// of the window (and is clipped by the duration cap when one is set).
class DurationTriangle {
 public:
  DurationTriangle() = default;
  DurationTriangle(long num_gops, int num_states, long max_duration);

  long num_gops() const { return num_gops_; }
  int num_states() const { return num_states_; }
  long k_top(long n) const;

  double at(int state, long n, long k) const { return data_[index(state, n, k)]; }
  double& at(int state, long n, long k) { return data_[index(state, n, k)]; }

 private:
  std::size_t index(int state, long n, long k) const {
    return static_cast<std::size_t>(state) * cells_ + offsets_[n] + k;
  }

  long num_gops_ = 0;
  int num_states_ = 0;
  long max_duration_ = 0;
  std::size_t cells_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<double> data_;
};

// Filtered and smoothed posteriors of the duration-explicit trellis, plus the
// aggregates the re-estimation step consumes. forward() fills the filtered
// half; backward() fills the rest.
struct TrellisPosteriors {
  long num_gops = 0;
  int num_states = 0;
  TrellisOptions options;

  // Filtered: P(state i, k more GOPs | data up to n).
  DurationTriangle alpha_dot;
  // alpha[n*S + i] = sum over k of alpha_dot.
  std::vector<double> alpha;
  // log_normalizers[n] = log P(x_n | x_0..x_{n-1}); their sum is the LL.
  std::vector<double> log_normalizers;
  double log_likelihood = 0.0;

  // Smoothed: P(state i at n, k more GOPs | all data).
  DurationTriangle gamma_dot;
  // state_posterior[n*S + i] = sum over k of gamma_dot.
  std::vector<double> state_posterior;

  // Boundary posterior aggregates, accumulated while sweeping backward:
  // xi_step[n*S*S + i*S + j] sums xi over k at GOP n (n >= 1);
  // xi_pair[i*S + j] additionally sums over n.
  std::vector<double> xi_step;
  std::vector<double> xi_pair;
  // Per-state duration statistics over segment starts at n >= 1, excluding
  // tail-absorbed cells: seg_weight[i] sums xi arriving in state i,
  // seg_ksum[i] sums k times the same mass.
  std::vector<double> seg_weight;
  std::vector<double> seg_ksum;

  // Full xi when options.retain_xi: xi_full[n][(i*S + j) * (k_top(n)+1) + k],
  // empty at n = 0.
  std::vector<std::vector<double>> xi_full;
};

// Log probability of one GOP's frame sizes under one state's emission tables,
// after quantizing each position with the model grid. -inf when a bin has no
// mass.
double emission_logprob(const GopVector& gop, int state, const PhmmParams& params);

// Filtered pass. Throws std::invalid_argument when trace and model disagree
// on the number of positions, std::runtime_error when some GOP has zero
// probability under every state (the model cannot explain the data).
TrellisPosteriors forward(const Trace& trace, const PhmmParams& params,
                          const TrellisOptions& options = {});

// Smoothing pass over a completed forward result.
void backward(const Trace& trace, const PhmmParams& params, TrellisPosteriors& post);

// forward + backward in one call.
TrellisPosteriors smooth(const Trace& trace, const PhmmParams& params,
                         const TrellisOptions& options = {});

double log_likelihood(const Trace& trace, const PhmmParams& params,
                      const TrellisOptions& options = {});

}  // namespace mvtraffic
