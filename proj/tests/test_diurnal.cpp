#include <doctest.h>

#include "relnet/diurnal.hpp"

using namespace relnet;

namespace {

Tweet at(std::int64_t t, std::optional<int> offset) {
  Tweet x;
  x.created_at = t;
  x.utc_offset_minutes = offset;
  return x;
}

}  // namespace

TEST_CASE("local hour") {
  CHECK(local_hour(at(12 * 3600 + 1800, -300)) == std::optional<int>(7));
  CHECK(!local_hour(at(100, std::nullopt)));
  CHECK(local_hour(at(12 * 3600, 840)) == std::optional<int>(2));
  CHECK(local_hour(at(3600, -720)) == std::optional<int>(13));
}

TEST_CASE("hour distributions") {
  auto d = hour_distribution({13, 13, 13, 13, 13});
  REQUIRE(d);
  CHECK(d->t(13) == 1.0);
  CHECK(d->t.sum() == 1.0);
  d = hour_distribution({0, 1, 2, 3, 4, 5});
  REQUIRE(d);
  for (int h = 0; h < 6; ++h) CHECK(d->t(h) == doctest::Approx(1.0 / 6));
  CHECK(!hour_distribution({1, 2, 3, 4}));

  std::vector<Tweet> tweets = {at(0, 0), at(3600, 0), at(7200, 0), at(10800, 0), at(0, std::nullopt)};
  std::vector<const Tweet*> ptrs;
  for (const auto& t : tweets) ptrs.push_back(&t);
  CHECK(!dyad_hour_distribution(ptrs));
}

TEST_CASE("centering") {
  HourVector uniform = HourVector::Constant(1.0 / 24);
  HourVector noon = HourVector::Zero();
  noon(12) = 1.0;
  auto single = aggregate_and_center({{"a", {uniform, noon}}}, {100, 0.95, 0});
  CHECK(single.groups.at("a").centered.cwiseAbs().maxCoeff() < 1e-15);

  auto two = aggregate_and_center({{"flat", {uniform, uniform}}, {"noon", {noon, noon}}}, {100, 0.95, 0});
  CHECK(two.groups.at("flat").centered(12) < 0);
  CHECK(two.groups.at("noon").centered(12) > 0);
  const HourVector weighted = 2 * two.groups.at("flat").centered + 2 * two.groups.at("noon").centered;
  CHECK(weighted.cwiseAbs().maxCoeff() < 1e-9);
  CHECK(two.groups.at("noon").ci.size() == 24);

  CHECK_THROWS_AS(aggregate_and_center({}, {}), Error);
  CHECK_THROWS_AS(aggregate_and_center({{"x", {}}}, {}), Error);
}

TEST_CASE("pearson correlation") {
  HourVector a;
  for (int h = 0; h < 24; ++h) a(h) = std::sin(h * 0.3) + h * 0.01;
  CHECK(*pearson_corr(a, a) == doctest::Approx(1.0));
  const HourVector neg = (-a).array() + 5.0;
  CHECK(*pearson_corr(a, neg) == doctest::Approx(-1.0));
  const HourVector b = a.array().square();
  CHECK(*pearson_corr(a, b) == doctest::Approx(*pearson_corr(b, a)));
  const HourVector scaled = (3.0 * b).array() + 2.0;
  CHECK(*pearson_corr(a, scaled) == doctest::Approx(*pearson_corr(a, b)));
  CHECK(!pearson_corr(a, HourVector::Constant(2.0)));
}
