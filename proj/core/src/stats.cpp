#include "mvtraffic/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mvtraffic {

std::vector<double> acf(const std::vector<double>& series, std::size_t max_lag) {
  const std::size_t L = series.size();
  if (L <= max_lag) {
    throw std::invalid_argument("acf: series must be longer than max_lag");
  }
  double mean = 0.0;
  for (double x : series) mean += x;
  mean /= static_cast<double>(L);

  double denom = 0.0;
  for (double x : series) denom += (x - mean) * (x - mean);
  if (!(denom > 0.0)) {
    throw std::invalid_argument("acf: series is constant");
  }

  std::vector<double> out(max_lag + 1);
  for (std::size_t h = 0; h <= max_lag; ++h) {
    double num = 0.0;
    for (std::size_t t = 0; t + h < L; ++t) {
      num += (series[t] - mean) * (series[t + h] - mean);
    }
    out[h] = num / denom;
  }
  return out;
}

std::vector<double> quantiles(const std::vector<double>& series,
                              const std::vector<double>& probs) {
  if (series.empty()) throw std::invalid_argument("quantiles: empty series");
  std::vector<double> sorted = series;
  std::sort(sorted.begin(), sorted.end());

  std::vector<double> out;
  out.reserve(probs.size());
  for (double p : probs) {
    if (!(p > 0.0) || !(p < 1.0)) {
      throw std::invalid_argument("quantiles: probabilities must be in (0, 1)");
    }
    const double h = p * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - static_cast<double>(lo);
    out.push_back(sorted[lo] + frac * (sorted[hi] - sorted[lo]));
  }
  return out;
}

std::vector<std::pair<double, double>> qq_points(const std::vector<double>& a,
                                                 const std::vector<double>& b,
                                                 std::size_t num_points) {
  if (num_points < 1) throw std::invalid_argument("qq_points: need at least one point");
  std::vector<double> probs(num_points);
  for (std::size_t i = 0; i < num_points; ++i) {
    probs[i] = static_cast<double>(i + 1) / static_cast<double>(num_points + 1);
  }
  const std::vector<double> qa = quantiles(a, probs);
  const std::vector<double> qb = quantiles(b, probs);
  std::vector<std::pair<double, double>> out(num_points);
  for (std::size_t i = 0; i < num_points; ++i) out[i] = {qa[i], qb[i]};
  return out;
}

SeriesSummary summarize(const std::vector<double>& series) {
  if (series.empty()) throw std::invalid_argument("summarize: empty series");
  SeriesSummary s;
  s.min = series.front();
  s.max = series.front();
  for (double x : series) {
    s.mean += x;
    s.min = std::min(s.min, x);
    s.max = std::max(s.max, x);
  }
  s.mean /= static_cast<double>(series.size());
  if (series.size() > 1) {
    double ss = 0.0;
    for (double x : series) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(series.size() - 1));
  }
  s.peak_to_mean = s.mean != 0.0 ? s.max / s.mean
                                 : std::numeric_limits<double>::quiet_NaN();
  return s;
}

double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("tv_distance: distributions differ in support size");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::fabs(p[i] - q[i]);
  return 0.5 * sum;
}

}  // namespace mvtraffic
