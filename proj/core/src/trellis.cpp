#include "mvtraffic/trellis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mvtraffic {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

long capped_k_top(long n, long num_gops, long max_duration) {
  const long window = num_gops - n - 1;
  return max_duration > 0 ? std::min(window, max_duration) : window;
}

}  // namespace

DurationTriangle::DurationTriangle(long num_gops, int num_states, long max_duration)
    : num_gops_(num_gops), num_states_(num_states), max_duration_(max_duration) {
  offsets_.resize(num_gops + 1);
  std::size_t cells = 0;
  for (long n = 0; n < num_gops; ++n) {
    offsets_[n] = cells;
    cells += static_cast<std::size_t>(k_top(n) + 1);
  }
  offsets_[num_gops] = cells;
  cells_ = cells;
  data_.assign(cells * num_states, 0.0);
}

long DurationTriangle::k_top(long n) const {
  return capped_k_top(n, num_gops_, max_duration_);
}

double emission_logprob(const GopVector& gop, int state, const PhmmParams& params) {
  if (state < 0 || state >= params.num_states) {
    throw std::invalid_argument("emission_logprob: state out of range");
  }
  const std::size_t nf = params.grid.num_positions();
  if (gop.size() != nf) {
    throw std::invalid_argument("emission_logprob: GOP has " +
                                std::to_string(gop.size()) + " frames, model expects " +
                                std::to_string(nf));
  }
  double logp = 0.0;
  for (std::size_t f = 0; f < nf; ++f) {
    const int bin = size_to_bin(gop[f], static_cast<int>(f), params.grid);
    const double p = params.emissions[state][f][bin];
    if (p <= 0.0) return kNegInf;
    logp += std::log(p);
  }
  return logp;
}

TrellisPosteriors forward(const Trace& trace, const PhmmParams& params,
                          const TrellisOptions& options) {
  params.require_valid();
  trace.require_valid();
  const long N = static_cast<long>(trace.size());
  if (N < 1) throw std::invalid_argument("forward: trace has no GOPs");
  if (static_cast<std::size_t>(trace.structure.frames_per_gop()) !=
      params.grid.num_positions()) {
    throw std::invalid_argument("forward: trace and model disagree on GOP positions");
  }
  const int S = params.num_states;

  TrellisPosteriors post;
  post.num_gops = N;
  post.num_states = S;
  post.options = options;
  post.alpha_dot = DurationTriangle(N, S, options.max_duration);
  post.alpha.assign(static_cast<std::size_t>(N) * S, 0.0);
  post.log_normalizers.assign(N, 0.0);

  const DurationTable durations(params, N);
  std::vector<double> emit(S);       // scaled emission probabilities at GOP n
  std::vector<double> log_emit(S);
  std::vector<double> entry(S);      // fresh-segment inbound mass per state

  for (long n = 0; n < N; ++n) {
    double max_log = kNegInf;
    for (int i = 0; i < S; ++i) {
      log_emit[i] = emission_logprob(trace.gops[n], i, params);
      max_log = std::max(max_log, log_emit[i]);
    }
    if (max_log == kNegInf) {
      throw std::runtime_error("forward: GOP " + std::to_string(n) +
                               " has zero probability under every state");
    }
    for (int i = 0; i < S; ++i) {
      emit[i] = log_emit[i] == kNegInf ? 0.0 : std::exp(log_emit[i] - max_log);
    }

    const long k_top = post.alpha_dot.k_top(n);
    double total = 0.0;
    if (n == 0) {
      for (int i = 0; i < S; ++i) {
        for (long k = 0; k <= k_top; ++k) {
          const double v = params.pi[i] * durations.dotted(i, k, k_top) * emit[i];
          post.alpha_dot.at(i, 0, k) = v;
          total += v;
        }
      }
    } else {
      const long k_top_prev = post.alpha_dot.k_top(n - 1);
      for (int j = 0; j < S; ++j) {
        double inbound = 0.0;
        for (int i = 0; i < S; ++i) {
          if (i != j) inbound += post.alpha_dot.at(i, n - 1, 0) * params.trans[i][j];
        }
        entry[j] = inbound;
      }
      for (int i = 0; i < S; ++i) {
        for (long k = 0; k <= k_top; ++k) {
          const double stay =
              k + 1 <= k_top_prev ? post.alpha_dot.at(i, n - 1, k + 1) : 0.0;
          const double v = emit[i] * (entry[i] * durations.dotted(i, k, k_top) + stay);
          post.alpha_dot.at(i, n, k) = v;
          total += v;
        }
      }
    }
    if (!(total > 0.0)) {
      throw std::runtime_error("forward: GOP " + std::to_string(n) +
                               " has zero probability under the model");
    }
    const double inv = 1.0 / total;
    for (int i = 0; i < S; ++i) {
      double state_mass = 0.0;
      for (long k = 0; k <= k_top; ++k) {
        post.alpha_dot.at(i, n, k) *= inv;
        state_mass += post.alpha_dot.at(i, n, k);
      }
      post.alpha[n * S + i] = state_mass;
    }
    post.log_normalizers[n] = max_log + std::log(total);
    post.log_likelihood += post.log_normalizers[n];
  }
  return post;
}

void backward(const Trace& trace, const PhmmParams& params, TrellisPosteriors& post) {
  const long N = static_cast<long>(trace.size());
  const int S = params.num_states;
  if (post.num_gops != N || post.num_states != S || post.alpha.empty()) {
    throw std::invalid_argument("backward: posteriors were not produced by forward()");
  }

  post.gamma_dot = DurationTriangle(N, S, post.options.max_duration);
  post.state_posterior.assign(static_cast<std::size_t>(N) * S, 0.0);
  post.xi_step.assign(static_cast<std::size_t>(N) * S * S, 0.0);
  post.xi_pair.assign(static_cast<std::size_t>(S) * S, 0.0);
  post.seg_weight.assign(S, 0.0);
  post.seg_ksum.assign(S, 0.0);
  post.xi_full.clear();
  if (post.options.retain_xi) post.xi_full.resize(N);

  if (N == 1) {
    for (int i = 0; i < S; ++i) {
      post.gamma_dot.at(i, 0, 0) = post.alpha[i];
      post.state_posterior[i] = post.alpha[i];
    }
    return;
  }

  const DurationTable durations(params, N);

  // xi slice at one GOP: [(i*S + j) * (k_top + 1) + k]. `next` holds the
  // slice of GOP n+1 while gamma at n is assembled.
  std::vector<double> xi_next;
  std::vector<double> xi_cur;
  long k_top_next = 0;
  std::vector<double> pair_mass(static_cast<std::size_t>(S) * S);

  for (long n = N - 1; n >= 1; --n) {
    const long k_top = post.gamma_dot.k_top(n);

    // Smoothed duration cells at n. The last GOP is the base case; interior
    // GOPs pull continuation mass (same state, one fewer remaining GOP) and
    // boundary mass (all exits into any other state) from the slice at n+1.
    if (n == N - 1) {
      for (int i = 0; i < S; ++i) {
        post.gamma_dot.at(i, n, 0) = post.alpha[n * S + i];
      }
    } else {
      const long width_next = k_top_next + 1;
      for (int i = 0; i < S; ++i) {
        for (long k = 1; k <= k_top; ++k) {
          post.gamma_dot.at(i, n, k) = xi_next[(i * S + i) * width_next + (k - 1)];
        }
        double exits = 0.0;
        for (int j = 0; j < S; ++j) {
          if (j == i) continue;
          for (long k = 0; k <= k_top_next; ++k) {
            exits += xi_next[(i * S + j) * width_next + k];
          }
        }
        post.gamma_dot.at(i, n, 0) = exits;
      }
    }

    // Boundary posteriors at n, split by total probability between the
    // filtered ways of reaching each (state, remaining) cell: entering fresh
    // from any other state versus continuing the same segment.
    const long width = k_top + 1;
    xi_cur.assign(static_cast<std::size_t>(S) * S * width, 0.0);
    const long k_top_prev = post.alpha_dot.k_top(n - 1);
    for (int i = 0; i < S; ++i) {
      for (int j = 0; j < S; ++j) {
        pair_mass[i * S + j] =
            i == j ? 0.0 : post.alpha_dot.at(i, n - 1, 0) * params.trans[i][j];
      }
    }
    for (int j = 0; j < S; ++j) {
      double inbound = 0.0;
      for (int i = 0; i < S; ++i) inbound += pair_mass[i * S + j];
      for (long k = 0; k <= k_top; ++k) {
        const double smoothed = post.gamma_dot.at(j, n, k);
        const double dur = durations.dotted(j, k, k_top);
        const double stay =
            k + 1 <= k_top_prev ? post.alpha_dot.at(j, n - 1, k + 1) : 0.0;
        const double denom = inbound * dur + stay;
        if (!(denom > 0.0) || smoothed == 0.0) continue;
        const double scale = smoothed / denom;
        for (int i = 0; i < S; ++i) {
          const double num = i == j ? stay : pair_mass[i * S + j] * dur;
          if (num == 0.0) continue;
          const double xi = num * scale;
          xi_cur[(i * S + j) * width + k] = xi;
          post.xi_step[(n * S + i) * S + j] += xi;
          post.xi_pair[i * S + j] += xi;
          if (i != j && k < k_top) {
            post.seg_weight[j] += xi;
            post.seg_ksum[j] += static_cast<double>(k) * xi;
          }
        }
      }
    }
    if (post.options.retain_xi) post.xi_full[n] = xi_cur;
    xi_next.swap(xi_cur);
    k_top_next = k_top;
  }

  // Head of the window: same identities as the interior, fed by the slice at
  // n = 1.
  {
    const long k_top = post.gamma_dot.k_top(0);
    const long width_next = k_top_next + 1;
    for (int i = 0; i < S; ++i) {
      for (long k = 1; k <= k_top; ++k) {
        post.gamma_dot.at(i, 0, k) = xi_next[(i * S + i) * width_next + (k - 1)];
      }
      double exits = 0.0;
      for (int j = 0; j < S; ++j) {
        if (j == i) continue;
        for (long k = 0; k <= k_top_next; ++k) {
          exits += xi_next[(i * S + j) * width_next + k];
        }
      }
      post.gamma_dot.at(i, 0, 0) = exits;
    }
  }

  for (long n = 0; n < N; ++n) {
    for (int i = 0; i < S; ++i) {
      double mass = 0.0;
      for (long k = 0; k <= post.gamma_dot.k_top(n); ++k) {
        mass += post.gamma_dot.at(i, n, k);
      }
      post.state_posterior[n * S + i] = mass;
    }
  }
}

TrellisPosteriors smooth(const Trace& trace, const PhmmParams& params,
                         const TrellisOptions& options) {
  TrellisPosteriors post = forward(trace, params, options);
  backward(trace, params, post);
  return post;
}

double log_likelihood(const Trace& trace, const PhmmParams& params,
                      const TrellisOptions& options) {
  return forward(trace, params, options).log_likelihood;
}

}  // namespace mvtraffic
