#include "mvtraffic/phmm.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mvtraffic {

double poisson_pmf(long k, double mean) {
  if (k < 0) throw std::invalid_argument("poisson_pmf: k must be >= 0");
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw std::invalid_argument("poisson_pmf: mean must be finite and >= 0");
  }
  if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
  const double kd = static_cast<double>(k);
  return std::exp(kd * std::log(mean) - mean - std::lgamma(kd + 1.0));
}

double poisson_cdf(long k, double mean) {
  if (k < 0) throw std::invalid_argument("poisson_cdf: k must be >= 0");
  double sum = 0.0;
  for (long j = 0; j <= k; ++j) sum += poisson_pmf(j, mean);
  return sum;
}

namespace {

constexpr double kSumTolerance = 1e-9;

bool is_distribution(const std::vector<double>& p) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) return false;
    sum += v;
  }
  return std::fabs(sum - 1.0) <= kSumTolerance;
}

}  // namespace

std::vector<std::string> PhmmParams::validate() const {
  std::vector<std::string> violations;
  const int S = num_states;
  if (S < 1) {
    violations.push_back("num_states must be >= 1");
    return violations;
  }

  if (pi.size() != static_cast<std::size_t>(S) || !is_distribution(pi)) {
    violations.push_back("pi must be a length-" + std::to_string(S) +
                         " distribution summing to 1");
  }

  if (trans.size() != static_cast<std::size_t>(S)) {
    violations.push_back("trans must be " + std::to_string(S) + "x" + std::to_string(S));
  } else {
    for (int i = 0; i < S; ++i) {
      if (trans[i].size() != static_cast<std::size_t>(S)) {
        violations.push_back("trans row " + std::to_string(i) + " has wrong length");
        continue;
      }
      if (trans[i][i] != 0.0) {
        violations.push_back("trans diagonal entry " + std::to_string(i) + " must be 0");
      }
      double row_sum = 0.0;
      bool row_ok = true;
      for (int j = 0; j < S; ++j) {
        if (!(trans[i][j] >= 0.0) || !std::isfinite(trans[i][j])) {
          violations.push_back("trans[" + std::to_string(i) + "][" + std::to_string(j) +
                               "] must be finite and >= 0");
          row_ok = false;
        }
        row_sum += trans[i][j];
      }
      if (!row_ok) continue;
      if (S == 1) {
        // A single-state chain has no admissible transition, so the only
        // consistent row is all zeros.
        if (row_sum != 0.0) {
          violations.push_back("single-state trans row must be all zeros");
        }
      } else if (std::fabs(row_sum - 1.0) > kSumTolerance) {
        violations.push_back("trans row " + std::to_string(i) + " must sum to 1");
      }
    }
  }

  if (lambda.size() != static_cast<std::size_t>(S)) {
    violations.push_back("lambda must have one entry per state");
  } else {
    for (int i = 0; i < S; ++i) {
      if (!(lambda[i] >= 0.0) || !std::isfinite(lambda[i])) {
        violations.push_back("lambda[" + std::to_string(i) + "] must be finite and >= 0");
      }
    }
  }

  const auto grid_violations = grid.validate();
  violations.insert(violations.end(), grid_violations.begin(), grid_violations.end());

  if (emissions.size() != static_cast<std::size_t>(S)) {
    violations.push_back("emissions must have one table per state");
    return violations;
  }
  const std::size_t nf = grid.num_positions();
  for (int i = 0; i < S; ++i) {
    if (emissions[i].size() != nf) {
      violations.push_back("emissions[" + std::to_string(i) +
                           "] must cover every grid position");
      continue;
    }
    for (std::size_t f = 0; f < nf; ++f) {
      const std::size_t bins = static_cast<std::size_t>(grid.positions[f].bins);
      if (emissions[i][f].size() != bins) {
        violations.push_back("emissions[" + std::to_string(i) + "][" + std::to_string(f) +
                             "] must have " + std::to_string(bins) + " bins");
      } else if (!is_distribution(emissions[i][f])) {
        violations.push_back("emissions[" + std::to_string(i) + "][" + std::to_string(f) +
                             "] must be a distribution summing to 1");
      }
    }
  }
  return violations;
}

void PhmmParams::require_valid() const {
  const auto violations = validate();
  if (violations.empty()) return;
  std::ostringstream msg;
  msg << "invalid model parameters:";
  for (const auto& v : violations) msg << "\n  - " << v;
  throw std::invalid_argument(msg.str());
}

std::vector<std::string> validate_params(const PhmmParams& params) {
  return params.validate();
}

double dotted_duration(long k, long n, long N, double mean) {
  const long k_max = N - n - 1;
  if (n < 0 || n >= N) throw std::invalid_argument("dotted_duration: n out of window");
  if (k < 0 || k > k_max) {
    throw std::invalid_argument("dotted_duration: k out of [0, N-n-1]");
  }
  if (k < k_max) return poisson_pmf(k, mean);
  return k == 0 ? 1.0 : 1.0 - poisson_cdf(k - 1, mean);
}

double dotted_duration(long k, int state, const DurationContext& ctx,
                       const PhmmParams& params) {
  if (state < 0 || state >= params.num_states) {
    throw std::invalid_argument("dotted_duration: state out of range");
  }
  return dotted_duration(k, ctx.n, ctx.N, params.lambda[state]);
}

DurationTable::DurationTable(const PhmmParams& params, long num_gops)
    : num_gops_(num_gops) {
  if (num_gops < 1) throw std::invalid_argument("DurationTable: need at least one GOP");
  const int S = params.num_states;
  pmf_.resize(static_cast<std::size_t>(S) * num_gops);
  cdf_.resize(static_cast<std::size_t>(S) * num_gops);
  for (int i = 0; i < S; ++i) {
    double cum = 0.0;
    for (long k = 0; k < num_gops; ++k) {
      const double p = poisson_pmf(k, params.lambda[i]);
      cum += p;
      pmf_[idx(i, k)] = p;
      cdf_[idx(i, k)] = cum;
    }
  }
}

}  // namespace mvtraffic
