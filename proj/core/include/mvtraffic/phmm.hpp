#pragma once

#include <string>
#include <vector>

#include "mvtraffic/quant.hpp"

namespace mvtraffic {

// Poisson pmf evaluated in log space, so large k never overflows k!.
double poisson_pmf(long k, double mean);

// P(K <= k). Plain sum of poisson_pmf(0..k); the duration tail below is
// computed as 1 minus this same sum so the two stay mutually consistent.
double poisson_cdf(long k, double mean);

// Parameters of the explicit-duration Poisson hidden Markov model. A hidden
// activity state is held for k+1 GOPs where k ~ Poisson(lambda[state]); the
// zero-diagonal matrix `trans` moves between states at segment boundaries,
// and each state emits one quantized size per GOP position per GOP.
struct PhmmParams {
  int num_states = 0;
  std::vector<double> pi;                   // initial state distribution
  std::vector<std::vector<double>> trans;   // zero diagonal, rows sum to 1
  std::vector<double> lambda;               // mean extra stay per state, in GOPs
  // emissions[i][f][v]: state i, GOP position f, quantized size bin v
  std::vector<std::vector<std::vector<double>>> emissions;
  QuantGrid grid;

  int num_positions() const {
    return emissions.empty() ? 0 : static_cast<int>(emissions[0].size());
  }

  std::vector<std::string> validate() const;
  void require_valid() const;
};

std::vector<std::string> validate_params(const PhmmParams& params);

// Where in a length-N observation window a duration is being evaluated.
struct DurationContext {
  long n = 0;  // GOP index the segment starts at
  long N = 0;  // total GOPs in the window
};

// Duration probability adjusted for the finite window: the largest extra stay
// still fitting the window, k = N-n-1, absorbs the whole Poisson tail
// 1 - P(k-1), so the law stays normalized over the admissible range.
double dotted_duration(long k, int state, const DurationContext& ctx,
                       const PhmmParams& params);

// Same adjustment for a single rate, used by the table below.
double dotted_duration(long k, long n, long N, double mean);

// Poisson pmf and cdf of every state, tabulated for k = 0..N-1 so the
// trellis recursions never re-evaluate them per cell.
class DurationTable {
 public:
  DurationTable(const PhmmParams& params, long num_gops);

  double pmf(int state, long k) const { return pmf_[idx(state, k)]; }
  double cdf(int state, long k) const { return cdf_[idx(state, k)]; }

  // dotted_duration with the tail placed at `tail_k`, the largest k stored
  // for the current trellis row (N-n-1, or the duration cap when active).
  double dotted(int state, long k, long tail_k) const {
    if (k < tail_k) return pmf(state, k);
    return k == 0 ? 1.0 : 1.0 - cdf(state, k - 1);
  }

 private:
  std::size_t idx(int state, long k) const {
    return static_cast<std::size_t>(state) * num_gops_ + static_cast<std::size_t>(k);
  }

  long num_gops_;
  std::vector<double> pmf_;
  std::vector<double> cdf_;
};

}  // namespace mvtraffic
