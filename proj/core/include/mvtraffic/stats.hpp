#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace mvtraffic {

// Sample autocorrelation at lags 0..max_lag, normalized so lag 0 equals 1.
// The series must be longer than max_lag and must not be constant.
std::vector<double> acf(const std::vector<double>& series, std::size_t max_lag);

// Empirical quantiles by linear interpolation between order statistics
// (h = p * (L - 1)). Probabilities must lie strictly inside (0, 1).
std::vector<double> quantiles(const std::vector<double>& series,
                              const std::vector<double>& probs);

// Matched quantile pairs of two samples at p = (i+1)/(num_points+1),
// i = 0..num_points-1; a Q-Q plot when drawn against each other.
std::vector<std::pair<double, double>> qq_points(const std::vector<double>& a,
                                                 const std::vector<double>& b,
                                                 std::size_t num_points);

struct SeriesSummary {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  double min = 0.0;
  double max = 0.0;
  double peak_to_mean = 0.0;
};

SeriesSummary summarize(const std::vector<double>& series);

// Total variation distance between two distributions on a common support.
double tv_distance(const std::vector<double>& p, const std::vector<double>& q);

}  // namespace mvtraffic
