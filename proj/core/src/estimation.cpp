#include "mvtraffic/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "mvtraffic/rng.hpp"

namespace mvtraffic {

std::vector<std::string> FitConfig::validate() const {
  std::vector<std::string> violations;
  if (num_states < 1) violations.push_back("num_states must be >= 1");
  if (!(ll_threshold > 0.0)) violations.push_back("ll_threshold must be > 0");
  if (max_iters < 1) violations.push_back("max_iters must be >= 1");
  if (!(pmf_floor >= 0.0) || pmf_floor >= 0.5) {
    violations.push_back("pmf_floor must be in [0, 0.5)");
  }
  if (trellis.max_duration < 0) violations.push_back("max_duration must be >= 0");
  return violations;
}

void FitConfig::require_valid() const {
  const auto violations = validate();
  if (violations.empty()) return;
  std::ostringstream msg;
  msg << "invalid fit configuration:";
  for (const auto& v : violations) msg << "\n  - " << v;
  throw std::invalid_argument(msg.str());
}

bool normalize_with_floor(std::vector<double>& weights, double floor) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) return false;
  for (double& w : weights) w /= total;
  if (floor > 0.0) {
    bool floored = false;
    for (double& w : weights) {
      if (w == 0.0) {
        w = floor;
        floored = true;
      }
    }
    if (floored) {
      double sum = 0.0;
      for (double w : weights) sum += w;
      for (double& w : weights) w /= sum;
    }
  }
  return true;
}

PhmmParams coarse_init(const Trace& trace, const FitConfig& config) {
  config.require_valid();
  trace.require_valid();
  const long N = static_cast<long>(trace.size());
  const int S = config.num_states;
  if (N < S) {
    throw std::invalid_argument("coarse_init: trace has fewer GOPs than states");
  }

  PhmmParams params;
  params.num_states = S;
  params.grid = grid_from_trace(trace);
  const int nf = trace.structure.frames_per_gop();

  // Rank GOPs by mean frame size and cut the ranking into equal-count
  // classes, lowest class first; ties stay in the lower class via the index
  // tiebreak.
  std::vector<double> mean(N);
  for (long n = 0; n < N; ++n) {
    mean[n] = std::accumulate(trace.gops[n].begin(), trace.gops[n].end(), 0.0) / nf;
  }
  std::vector<long> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](long a, long b) {
    return mean[a] != mean[b] ? mean[a] < mean[b] : a < b;
  });

  params.emissions.resize(S);
  for (int s = 0; s < S; ++s) {
    const long lo = static_cast<long>(s) * N / S;
    const long hi = static_cast<long>(s + 1) * N / S;
    params.emissions[s].resize(nf);
    for (int f = 0; f < nf; ++f) {
      std::vector<double> hist(params.grid.positions[f].bins, 0.0);
      for (long r = lo; r < hi; ++r) {
        hist[size_to_bin(trace.gops[order[r]][f], f, params.grid)] += 1.0;
      }
      normalize_with_floor(hist, config.pmf_floor);
      params.emissions[s][f] = std::move(hist);
    }
  }

  params.lambda.assign(S, 1.0);
  params.pi.assign(S, 1.0 / S);

  Rng rng(config.rng_seed);
  params.trans.assign(S, std::vector<double>(S, 0.0));
  if (S > 1) {
    for (int i = 0; i < S; ++i) {
      double row_sum = 0.0;
      for (int j = 0; j < S; ++j) {
        if (j == i) continue;
        params.trans[i][j] = 1.0 - rng.uniform01();  // strictly positive
        row_sum += params.trans[i][j];
      }
      for (int j = 0; j < S; ++j) params.trans[i][j] /= row_sum;
      params.trans[i][i] = 0.0;
    }
  }
  return params;
}

std::pair<PhmmParams, double> em_step(const Trace& trace, const PhmmParams& params,
                                      const EmOptions& options) {
  const TrellisPosteriors post = smooth(trace, params, options.trellis);
  const long N = post.num_gops;
  const int S = post.num_states;
  const int nf = trace.structure.frames_per_gop();

  PhmmParams next = params;

  for (int i = 0; i < S; ++i) {
    next.pi[i] = post.state_posterior[i];
  }

  for (int i = 0; i < S; ++i) {
    double denom = 0.0;
    for (int j = 0; j < S; ++j) {
      if (j != i) denom += post.xi_pair[i * S + j];
    }
    if (denom > 0.0) {
      for (int j = 0; j < S; ++j) {
        next.trans[i][j] = j == i ? 0.0 : post.xi_pair[i * S + j] / denom;
      }
    }
  }

  for (int i = 0; i < S; ++i) {
    double total = 0.0;
    for (long n = 0; n < N; ++n) total += post.state_posterior[n * S + i];
    if (!(total > 0.0)) continue;
    for (int f = 0; f < nf; ++f) {
      std::vector<double> hist(params.grid.positions[f].bins, 0.0);
      for (long n = 0; n < N; ++n) {
        hist[size_to_bin(trace.gops[n][f], f, params.grid)] +=
            post.state_posterior[n * S + i];
      }
      if (normalize_with_floor(hist, options.pmf_floor)) {
        next.emissions[i][f] = std::move(hist);
      }
    }
  }

  // Mean extra stay: posterior-weighted average of k over segment starts,
  // interior ones from the boundary aggregates, the window head from the
  // smoothed duration cells at n = 0.
  const long k_top0 = post.gamma_dot.k_top(0);
  for (int i = 0; i < S; ++i) {
    double t0 = post.seg_weight[i];
    double t1 = post.seg_ksum[i];
    for (long k = 0; k <= k_top0; ++k) {
      t0 += post.gamma_dot.at(i, 0, k);
      t1 += static_cast<double>(k) * post.gamma_dot.at(i, 0, k);
    }
    if (t0 > 0.0) next.lambda[i] = t1 / t0;
  }

  return {std::move(next), post.log_likelihood};
}

FitReport fit(const Trace& trace, const FitConfig& config) {
  FitReport report;
  report.params = coarse_init(trace, config);

  EmOptions options;
  options.pmf_floor = config.pmf_floor;
  options.trellis = config.trellis;

  double prev_ll = 0.0;
  for (int iter = 1; iter <= config.max_iters; ++iter) {
    auto [next, ll] = em_step(trace, report.params, options);
    report.log_likelihoods.push_back(ll);
    report.iterations = iter;
    report.params = std::move(next);
    if (iter > 1 && std::fabs(ll - prev_ll) < config.ll_threshold) {
      report.converged = true;
      break;
    }
    prev_ll = ll;
  }
  return report;
}

}  // namespace mvtraffic
