#include "mvtraffic/synthesis.hpp"

#include <stdexcept>
#include <string>

#include "mvtraffic/rng.hpp"

namespace mvtraffic {

std::vector<int> generate_states(const PhmmParams& params, long num_gops,
                                 std::uint64_t seed) {
  params.require_valid();
  if (num_gops < 1) throw std::invalid_argument("generate_states: num_gops must be >= 1");

  Rng rng(Rng::derive_seed(seed, 0));
  std::vector<int> states(num_gops);
  if (params.num_states == 1) return states;  // no successor to draw, stay in state 0

  int current = static_cast<int>(rng.categorical(params.pi));
  long n = 0;
  while (n < num_gops) {
    long extra = rng.poisson(params.lambda[current]);
    if (extra > num_gops - n - 1) extra = num_gops - n - 1;  // clip to the horizon
    for (long m = 0; m <= extra; ++m) states[n + m] = current;
    n += extra + 1;
    if (n < num_gops) {
      current = static_cast<int>(rng.categorical(params.trans[current]));
    }
  }
  return states;
}

Trace generate_trace(const PhmmParams& params, const GopStructure& structure,
                     long num_gops, std::uint64_t seed) {
  structure.require_valid();
  const int nf = structure.frames_per_gop();
  if (params.grid.num_positions() != static_cast<std::size_t>(nf)) {
    throw std::invalid_argument("generate_trace: structure and model disagree on positions");
  }
  for (int f = 0; f < nf; ++f) {
    if (params.grid.positions[f].bins != structure.bin_counts[f]) {
      throw std::invalid_argument("generate_trace: bin counts differ at position " +
                                  std::to_string(f));
    }
  }

  const std::vector<int> states = generate_states(params, num_gops, seed);
  Rng rng(Rng::derive_seed(seed, 1));

  Trace trace;
  trace.structure = structure;
  trace.gops.resize(num_gops);
  for (long n = 0; n < num_gops; ++n) {
    GopVector gop(nf);
    const auto& tables = params.emissions[states[n]];
    for (int f = 0; f < nf; ++f) {
      const int bin = static_cast<int>(rng.categorical(tables[f]));
      gop[f] = bin_to_size(bin, f, params.grid);
    }
    trace.gops[n] = std::move(gop);
  }
  return trace;
}

}  // namespace mvtraffic
