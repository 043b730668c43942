#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "dorb/quantile_scaler.hpp"

using dorb::QuantileScaler;

namespace {

double oracle_quantile(std::vector<double> v, double level) {
  std::sort(v.begin(), v.end());
  const double h = level * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double oracle_scale(const std::vector<double>& window, double x) {
  if (window.empty()) return 0.5;
  const double qlo = oracle_quantile(window, 0.2), qhi = oracle_quantile(window, 0.8);
  if (x < qlo) return 0.0;
  if (x > qhi) return 1.0;
  if (qhi == qlo) return 0.5;
  return (x - qlo) / (qhi - qlo);
}

}  // namespace

TEST_CASE("quantile of small lists") {
  const std::vector<double> v{3.0, 1.0, 2.0, 4.0, 5.0};
  CHECK(dorb::quantile(v, 0.0) == 1.0);
  CHECK(dorb::quantile(v, 1.0) == 5.0);
  CHECK(dorb::quantile(v, 0.5) == 3.0);
  CHECK(dorb::quantile(v, 0.2) == doctest::Approx(1.8));
  const std::vector<double> one{7.0};
  CHECK(dorb::quantile(one, 0.3) == 7.0);
  CHECK_THROWS_AS(dorb::quantile(std::vector<double>{}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(dorb::quantile(v, 1.5), std::invalid_argument);
}

TEST_CASE("window {0,1}") {
  QuantileScaler s(10);
  s.observe(0.0);
  s.observe(1.0);
  CHECK(std::abs(s.scale(0.5) - 0.5) < 1e-12);
  CHECK(s.scale(0.1) == 0.0);
  CHECK(s.scale(0.9) == 1.0);
  CHECK(s.scale(0.2) == doctest::Approx(0.0));
  CHECK(s.scale(0.8) == doctest::Approx(1.0));
}

TEST_CASE("empty and degenerate windows") {
  QuantileScaler s;
  CHECK(s.scale(123.0) == 0.5);
  s.observe(2.0);
  CHECK(s.scale(2.0) == 0.5);
  CHECK(s.scale(1.0) == 0.0);
  CHECK(s.scale(3.0) == 1.0);
  for (int i = 0; i < 5; ++i) s.observe(2.0);
  CHECK(s.scale(2.0) == 0.5);
}

TEST_CASE("matches sort-based oracle") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> len(0, 120);
  std::normal_distribution<double> val(0.3, 2.0);
  for (int trial = 0; trial < 300; ++trial) {
    QuantileScaler s(100);
    std::vector<double> window;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) {
      const double x = val(rng);
      s.observe(x);
      window.push_back(x);
      if (window.size() > 100) window.erase(window.begin());
    }
    for (int probe = 0; probe < 5; ++probe) {
      const double x = val(rng);
      CHECK(std::abs(s.scale(x) - oracle_scale(window, x)) < 1e-12);
    }
  }
}

TEST_CASE("output in unit interval and monotone") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  QuantileScaler s(50);
  for (int i = 0; i < 80; ++i) s.observe(u(rng));
  double prev = -1.0;
  for (double x = -2.0; x <= 2.0; x += 0.001) {
    const double y = s.scale(x);
    REQUIRE(y >= 0.0);
    REQUIRE(y <= 1.0);
    REQUIRE(y >= prev);
    prev = y;
  }
}

TEST_CASE("affine equivariance") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  QuantileScaler a(100), b(100);
  const double mul = 3.7, add = -12.5;
  for (int i = 0; i < 60; ++i) {
    const double x = u(rng);
    a.observe(x);
    b.observe(mul * x + add);
  }
  for (int i = 0; i < 100; ++i) {
    const double x = u(rng) * 1.4 - 0.2;
    CHECK(std::abs(a.scale(x) - b.scale(mul * x + add)) < 1e-9);
  }
}

TEST_CASE("fifo eviction") {
  QuantileScaler s(3);
  for (double x : {1.0, 2.0, 3.0, 4.0}) s.observe(x);
  REQUIRE(s.window().size() == 3);
  CHECK(s.window().front() == 2.0);
  CHECK(s.window().back() == 4.0);
}

TEST_CASE("validation and snapshot") {
  CHECK_THROWS_AS(QuantileScaler(1), std::invalid_argument);
  CHECK_THROWS_AS(QuantileScaler(10, 0.8, 0.2), std::invalid_argument);
  QuantileScaler s(5);
  CHECK_THROWS_AS(s.observe(std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(s.observe(INFINITY), std::invalid_argument);
  for (double x : {0.1, 0.5, 0.3}) s.observe(x);
  auto r = QuantileScaler::restore(nlohmann::json::parse(s.snapshot().dump()));
  CHECK(r.capacity() == 5);
  CHECK(std::vector<double>(r.window().begin(), r.window().end()) ==
        std::vector<double>(s.window().begin(), s.window().end()));
  CHECK(r.scale(0.35) == s.scale(0.35));
}
