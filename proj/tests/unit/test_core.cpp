#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "fisherwatch/core.hpp"

using namespace fisherwatch;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected fisherwatch::Error";
  return ErrorCode::Input;
}

}  // namespace

TEST(StateMatrix, RowOrderPreserved) {
  const auto X = build_state_matrix({{1, 2, 3}, {4, 5, 6}});
  EXPECT_EQ(X.channels(), 2u);
  EXPECT_EQ(X.samples(), 3u);
  EXPECT_EQ(X.row(0), (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(X.row(1), (std::vector<double>{4, 5, 6}));
  EXPECT_EQ(X.channel_ids(), (std::vector<std::string>{"ch1", "ch2"}));
}

TEST(StateMatrix, RoundTripIsBitExact) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> z;
  std::vector<std::vector<double>> rows(5, std::vector<double>(17));
  for (auto& r : rows)
    for (auto& x : r) x = z(rng) * 1e-3 + 1e6 * (z(rng) > 1.5);
  const auto X = build_state_matrix(rows);
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(X.row(i), rows[i]);
}

TEST(StateMatrix, FullRecordShape) {
  RowMatrix m = RowMatrix::Zero(80, 8000);
  m.setRandom();
  const StateMatrix X(m);
  EXPECT_EQ(X.channels(), 80u);
  EXPECT_EQ(X.samples(), 8000u);
}

TEST(StateMatrix, Errors) {
  EXPECT_EQ(code_of([] { build_state_matrix({{1, 2, 3}}); }), ErrorCode::Shape);
  EXPECT_EQ(code_of([] { build_state_matrix({{1, 2, 3}, {1, 2}}); }), ErrorCode::Shape);
  EXPECT_EQ(code_of([] { build_state_matrix({{1}, {2}}); }), ErrorCode::Shape);
  EXPECT_EQ(code_of([] {
              build_state_matrix({{1, std::numeric_limits<double>::quiet_NaN()}, {1, 2}});
            }),
            ErrorCode::Data);
  EXPECT_EQ(code_of([] {
              build_state_matrix({{1, 2}, {std::numeric_limits<double>::infinity(), 2}});
            }),
            ErrorCode::Data);
}

TEST(Config, DistributionDefaults) {
  const auto c = validate_config({}, 80);
  EXPECT_EQ(c.d1, 70u);
  EXPECT_EQ(c.d2, 90u);
  EXPECT_EQ(c.D, 240u);
  EXPECT_EQ(c.s, 16u);
  EXPECT_DOUBLE_EQ(c.alpha, 0.01);
  EXPECT_EQ(c.kappa, 2);
  EXPECT_EQ(c.beta1, 0.0);
  EXPECT_EQ(c.d(), 160u);
}

TEST(Config, TransmissionProfile) {
  DetectionConfig cfg;
  cfg.profile = Profile::Transmission;
  const auto c = validate_config(cfg, 34);
  EXPECT_EQ(c.D, 58u);
  EXPECT_EQ(c.s, 9u);

  DetectionConfig explicit_cfg;
  explicit_cfg.D = 58;
  explicit_cfg.s = 9;
  const auto e = validate_config(explicit_cfg, 34);
  EXPECT_EQ(e.D, 58u);
  EXPECT_EQ(e.s, 9u);
}

TEST(Config, SmallChannelCountKeepsD1Usable) {
  EXPECT_EQ(validate_config({}, 5).d1, 2u);
  EXPECT_EQ(validate_config({}, 13).d1, 3u);
}

TEST(Config, Violations) {
  DetectionConfig c;
  c.d2 = 80;
  EXPECT_EQ(code_of([&] { validate_config(c, 80); }), ErrorCode::Singular);
  c = {};
  c.D = 80;
  EXPECT_EQ(code_of([&] { validate_config(c, 80); }), ErrorCode::Singular);
  for (double a : {0.0, 1.0, -0.1, 2.0, std::nan("")}) {
    c = {};
    c.alpha = a;
    EXPECT_EQ(code_of([&] { validate_config(c, 80); }), ErrorCode::Config) << a;
  }
  c = {};
  c.d1 = 1;
  EXPECT_EQ(code_of([&] { validate_config(c, 80); }), ErrorCode::Config);
  c = {};
  c.s = 0;
  EXPECT_EQ(code_of([&] { validate_config(c, 80); }), ErrorCode::Config);
  c = {};
  c.kappa = 3;
  EXPECT_EQ(code_of([&] { validate_config(c, 80); }), ErrorCode::Config);
  c = {};
  c.beta2 = std::numeric_limits<double>::infinity();
  EXPECT_EQ(code_of([&] { validate_config(c, 80); }), ErrorCode::Config);
  EXPECT_EQ(code_of([] { validate_config({}, 1); }), ErrorCode::Config);
}

TEST(Config, Idempotent) {
  for (std::size_t p : {3u, 20u, 34u, 80u, 200u}) {
    for (Profile prof : {Profile::Distribution, Profile::Transmission}) {
      DetectionConfig cfg;
      cfg.profile = prof;
      cfg.kappa = p % 2 == 0 ? 2 : 1;
      cfg.beta1 = 0.25;
      const auto once = validate_config(cfg, p);
      const auto twice = validate_config(once.to_config(), p);
      EXPECT_EQ(once, twice);
    }
  }
}

TEST(Names, RoundTrip) {
  for (auto k : {DetectorKind::Dele, DetectorKind::Deht, DetectorKind::Mp}) {
    EXPECT_EQ(detector_from_string(to_string(k)), k);
  }
  EXPECT_EQ(detector_from_string("deht"), DetectorKind::Deht);
  EXPECT_THROW(detector_from_string("svm"), Error);
  EXPECT_EQ(profile_from_string(to_string(Profile::Transmission)), Profile::Transmission);
  EXPECT_THROW(profile_from_string("grid"), Error);
}

TEST(IntervalType, Arithmetic) {
  const Interval iv{4561, 6240};
  EXPECT_EQ(iv.width(), 1680u);
  EXPECT_TRUE(iv.contains(4561));
  EXPECT_TRUE(iv.contains(6240));
  EXPECT_FALSE(iv.contains(4560));
}
