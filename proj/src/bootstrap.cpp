#include "relnet/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "relnet/common.hpp"

namespace relnet {

namespace {

void check(std::size_t n, const BootstrapConfig& config) {
  if (n == 0) throw Error("bootstrap of an empty sample");
  if (!(config.level > 0.0 && config.level < 1.0)) throw ConfigError("bootstrap level must lie in (0, 1)");
  if (config.resamples < 1) throw ConfigError("bootstrap needs at least one resample");
}

Interval percentile_interval(std::vector<double>& means, double level, double point) {
  std::sort(means.begin(), means.end());
  const double tail = (1.0 - level) / 2.0;
  Interval ci{empirical_quantile(means, tail), empirical_quantile(means, 1.0 - tail)};
  ci.low = std::min(ci.low, point);
  ci.high = std::max(ci.high, point);
  return ci;
}

}  // namespace

double empirical_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw Error("quantile of an empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

Interval bootstrap_ci(std::span<const double> values, const BootstrapConfig& config) {
  check(values.size(), config);
  const std::size_t n = values.size();
  double point = 0.0;
  for (double v : values) point += v;
  point /= static_cast<double>(n);
  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<double> means(static_cast<std::size_t>(config.resamples));
  for (double& m : means) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += values[pick(rng)];
    m = s / static_cast<double>(n);
  }
  return percentile_interval(means, config.level, point);
}

std::vector<Interval> bootstrap_ci_columns(const Eigen::MatrixXd& rows, const BootstrapConfig& config) {
  check(static_cast<std::size_t>(rows.rows()), config);
  const Eigen::Index n = rows.rows();
  const Eigen::RowVectorXd point = rows.colwise().mean();
  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  Eigen::MatrixXd means(config.resamples, rows.cols());
  for (int b = 0; b < config.resamples; ++b) {
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(rows.cols());
    for (Eigen::Index i = 0; i < n; ++i) acc += rows.row(pick(rng));
    means.row(b) = acc / static_cast<double>(n);
  }
  std::vector<Interval> out;
  for (Eigen::Index c = 0; c < rows.cols(); ++c) {
    std::vector<double> col(means.col(c).data(), means.col(c).data() + means.rows());
    out.push_back(percentile_interval(col, config.level, point(c)));
  }
  return out;
}

}  // namespace relnet
