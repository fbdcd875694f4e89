#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "relnet/bootstrap.hpp"
#include "relnet/corpus.hpp"

namespace relnet {

using HourVector = Eigen::Matrix<double, 24, 1>;

/// Hour of day in the author's local time; nullopt without a UTC offset.
std::optional<int> local_hour(const Tweet& t);

struct HourDistribution {
  HourVector t = HourVector::Zero();
  std::size_t support_count = 0;
};

/// Normalized 24-bin histogram; nullopt with fewer than `min_activity` hours.
std::optional<HourDistribution> hour_distribution(const std::vector<int>& hours, std::size_t min_activity = 5);

/// Distribution of the directed mentions of one sender toward one partner.
/// Tweets without a UTC offset do not count toward the threshold.
std::optional<HourDistribution> dyad_hour_distribution(const std::vector<const Tweet*>& mentions,
                                                       std::size_t min_activity = 5);

struct GroupDiurnal {
  HourVector mean = HourVector::Zero();
  HourVector centered = HourVector::Zero();
  std::vector<Interval> ci;  // 24 intervals of the group mean
  std::size_t members = 0;
};

struct DiurnalAggregate {
  HourVector global_mean = HourVector::Zero();
  std::map<std::string, GroupDiurnal> groups;
};

/// Group means and their difference from the unweighted mean over every
/// distribution in scope. Throws on an empty scope or an empty group.
DiurnalAggregate aggregate_and_center(const std::map<std::string, std::vector<HourVector>>& groups,
                                      const BootstrapConfig& bootstrap);

/// Pearson product-moment correlation; nullopt when either side has zero variance.
template <typename DerivedA, typename DerivedB>
std::optional<double> pearson_corr(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  const Eigen::ArrayXd x = a.template cast<double>().array() - a.template cast<double>().mean();
  const Eigen::ArrayXd y = b.template cast<double>().array() - b.template cast<double>().mean();
  const double sxx = (x * x).sum();
  const double syy = (y * y).sum();
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return (x * y).sum() / std::sqrt(sxx * syy);
}

std::string diurnal_header();
std::vector<std::string> diurnal_rows(const DiurnalAggregate& agg);

}  // namespace relnet
