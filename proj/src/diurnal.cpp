#include "relnet/diurnal.hpp"

#include <cstdio>

#include "relnet/common.hpp"

namespace relnet {

std::optional<int> local_hour(const Tweet& t) {
  if (!t.utc_offset_minutes) return std::nullopt;
  constexpr std::int64_t kDay = 86400;
  std::int64_t local = (t.created_at + std::int64_t{*t.utc_offset_minutes} * 60) % kDay;
  if (local < 0) local += kDay;
  return static_cast<int>(local / 3600);
}

std::optional<HourDistribution> hour_distribution(const std::vector<int>& hours, std::size_t min_activity) {
  if (hours.size() < min_activity || hours.empty()) return std::nullopt;
  HourDistribution d;
  for (int h : hours) {
    if (h < 0 || h > 23) throw ValidationError("hour out of range");
    d.t(h) += 1.0;
  }
  d.support_count = hours.size();
  d.t /= static_cast<double>(hours.size());
  return d;
}

std::optional<HourDistribution> dyad_hour_distribution(const std::vector<const Tweet*>& mentions,
                                                       std::size_t min_activity) {
  std::vector<int> hours;
  for (const Tweet* t : mentions)
    if (auto h = local_hour(*t)) hours.push_back(*h);
  return hour_distribution(hours, min_activity);
}

DiurnalAggregate aggregate_and_center(const std::map<std::string, std::vector<HourVector>>& groups,
                                      const BootstrapConfig& bootstrap) {
  DiurnalAggregate out;
  std::size_t total = 0;
  for (const auto& [name, members] : groups) {
    if (members.empty()) throw Error("diurnal group '" + name + "' is empty");
    for (const auto& m : members) out.global_mean += m;
    total += members.size();
  }
  if (total == 0) throw Error("diurnal aggregation over an empty scope");
  out.global_mean /= static_cast<double>(total);
  for (const auto& [name, members] : groups) {
    GroupDiurnal g;
    Eigen::MatrixXd rows(static_cast<Eigen::Index>(members.size()), 24);
    for (std::size_t i = 0; i < members.size(); ++i) rows.row(static_cast<Eigen::Index>(i)) = members[i].transpose();
    g.mean = rows.colwise().mean().transpose();
    g.centered = g.mean - out.global_mean;
    BootstrapConfig cfg = bootstrap;
    cfg.seed = derive_seed(bootstrap.seed, name);
    g.ci = bootstrap_ci_columns(rows, cfg);
    g.members = members.size();
    out.groups[name] = std::move(g);
  }
  return out;
}

std::string diurnal_header() { return "group\thour\tmean\tcentered\tci_low\tci_high"; }

std::vector<std::string> diurnal_rows(const DiurnalAggregate& agg) {
  std::vector<std::string> rows;
  for (const auto& [name, g] : agg.groups)
    for (int h = 0; h < 24; ++h) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "\t%d\t%.6f\t%.6f\t%.6f\t%.6f", h, g.mean(h), g.centered(h),
                    g.ci[static_cast<std::size_t>(h)].low, g.ci[static_cast<std::size_t>(h)].high);
      rows.push_back(name + buf);
    }
  return rows;
}

}  // namespace relnet
