#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace relnet {

struct BootstrapConfig {
  int resamples = 1000;
  double level = 0.95;
  std::uint64_t seed = 0;
};

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

/// Linear-interpolated empirical quantile of ascending `sorted` values.
double empirical_quantile(std::span<const double> sorted, double q);

/// Percentile bootstrap interval of the mean. The interval is widened to
/// contain the sample mean when resampling noise would exclude it.
Interval bootstrap_ci(std::span<const double> values, const BootstrapConfig& config);

/// Per-column percentile intervals of the column means, resampling whole rows.
std::vector<Interval> bootstrap_ci_columns(const Eigen::MatrixXd& rows, const BootstrapConfig& config);

}  // namespace relnet
