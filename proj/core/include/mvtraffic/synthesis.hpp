#pragma once

#include <cstdint>
#include <vector>

#include "mvtraffic/phmm.hpp"

namespace mvtraffic {

// Hidden state per GOP, sampled segment by segment: draw a state, hold it for
// k+1 GOPs with k Poisson-distributed (truncated to what still fits the
// horizon), then transition to a different state. The same seed always yields
// the same path, and generate_trace() below walks the identical path.
std::vector<int> generate_states(const PhmmParams& params, long num_gops,
                                 std::uint64_t seed);

// Synthetic trace: per GOP, a bin is drawn from the active state's emission
// table at every position and mapped to the bin's midpoint size. State and
// emission draws come from separate substreams of `seed`, so the state path
// matches generate_states(params, num_gops, seed).
Trace generate_trace(const PhmmParams& params, const GopStructure& structure,
                     long num_gops, std::uint64_t seed);

}  // namespace mvtraffic
