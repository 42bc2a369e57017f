#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mvtraffic/trellis.hpp"

namespace mvtraffic {

struct FitConfig {
  int num_states = 3;
  // Stop once the log likelihoods of two consecutive iterates differ by less
  // than this.
  double ll_threshold = 0.01;
  int max_iters = 200;
  // Zero-probability emission bins are raised to this after each update so a
  // bin unseen early in the fit is not locked out forever. Kept tiny so the
  // nudge stays far below the convergence threshold.
  double pmf_floor = 1e-12;
  std::uint64_t rng_seed = 0;
  TrellisOptions trellis;

  std::vector<std::string> validate() const;
  void require_valid() const;
};

struct FitReport {
  PhmmParams params;
  // Log likelihood of iterate m, observed while stepping to m+1.
  std::vector<double> log_likelihoods;
  int iterations = 0;
  bool converged = false;
};

// Normalizes nonnegative weights into a pmf, then raises exact zeros to
// `floor` and renormalizes. Returns false (leaving `weights` untouched) when
// the weights carry no mass at all.
bool normalize_with_floor(std::vector<double>& weights, double floor);

// Initial iterate: GOPs are ranked by mean frame size and split into
// equal-count classes (ties to the lower class), one per state, giving
// per-state emission histograms; duration means start at 1, the transition
// matrix is random row-normalized with a zero diagonal, and the initial
// distribution is uniform.
PhmmParams coarse_init(const Trace& trace, const FitConfig& config);

struct EmOptions {
  double pmf_floor = 1e-12;
  TrellisOptions trellis;
};

// One re-estimation sweep. Returns the updated parameters together with the
// log likelihood of the parameters passed in (a byproduct of the sweep).
// Degenerate guards keep the old value: a transition row with no outbound
// posterior mass, an emission table for a state with no posterior mass, and
// a duration mean whose segment-start mass is zero.
std::pair<PhmmParams, double> em_step(const Trace& trace, const PhmmParams& params,
                                      const EmOptions& options = {});

// Full estimation loop from coarse_init. Does not throw on non-convergence;
// the report says how far it got.
FitReport fit(const Trace& trace, const FitConfig& config);

}  // namespace mvtraffic
