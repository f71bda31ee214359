/*
Copyright 2026 The Howl Lab Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "howl/common.hpp"
#include "howl/kalman/fdkf.hpp"
#include "oracles.hpp"

using namespace howl;
using howl::testing::DirectConvolve;
using howl::testing::WhiteNoise;

namespace {

constexpr std::size_t kBlock = 64;

std::span<const double> Block(const std::vector<double>& v, std::size_t i) {
  return std::span(v).subspan(i * kBlock, kBlock);
}

KalmanConfig SmallConfig() {
  KalmanConfig cfg;
  cfg.partitions = 4;
  return cfg;
}

}  // namespace

TEST_CASE("fresh filter predicts nothing", "[kalman]") {
  FrequencyDomainKalman f(SmallConfig());
  const auto y = WhiteNoise(kBlock, 1), x = WhiteNoise(kBlock, 2);
  const auto& out = f.Step(y, x);
  REQUIRE(out.accepted);
  for (std::size_t k = 0; k < f.bins(); ++k) {
    CHECK(out.playback_estimate.bins[k] == Complex{});
    CHECK(out.error.bins[k] == out.mic.bins[k]);
  }
  for (std::size_t i = 0; i < kBlock; ++i) CHECK(out.error_time[i] == y[i]);
}

TEST_CASE("no excitation leaves the weights alone", "[kalman]") {
  FrequencyDomainKalman f(SmallConfig());
  const auto y = WhiteNoise(kBlock * 50, 3);
  const std::vector<double> x(kBlock, 0.0);
  for (std::size_t m = 0; m < 50; ++m) {
    const auto& out = f.Step(Block(y, m), x);
    for (std::size_t k = 0; k < f.bins(); ++k) CHECK(out.error.bins[k] == out.mic.bins[k]);
  }
  for (const auto& w : f.weights()) {
    for (const auto& v : w) CHECK(v == Complex{});
  }
}

TEST_CASE("open-loop identification of a 64-tap path", "[kalman]") {
  const std::size_t n = 5 * 16000;
  const auto x = WhiteNoise(n, 4);
  auto h = WhiteNoise(64, 5);
  for (std::size_t i = 0; i < h.size(); ++i) h[i] *= std::exp(-0.05 * static_cast<double>(i));
  const auto y = DirectConvolve(x, h);

  FrequencyDomainKalman f(SmallConfig());
  CHECK(f.Misalignment(h) == Catch::Approx(0.0).margin(1e-12));
  for (std::size_t m = 0; m < n / kBlock; ++m) {
    const auto& out = f.Step(Block(y, m), Block(x, m));
    REQUIRE(out.accepted);
    for (std::size_t k = 0; k < f.bins(); ++k) {
      CHECK(out.error.bins[k] == out.mic.bins[k] - out.playback_estimate.bins[k]);
      CHECK(std::abs(out.error.bins[k] + out.playback_estimate.bins[k] - out.mic.bins[k]) <=
            1e-12 * (std::abs(out.mic.bins[k]) + 1.0));
    }
    for (const auto& cov : f.covariance()) {
      for (double c : cov) REQUIRE(c >= 0.0);
    }
  }
  CHECK(f.Misalignment(h) < -10.0);
}

TEST_CASE("misalignment endpoints", "[kalman]") {
  FrequencyDomainKalman f(SmallConfig());
  const auto h = WhiteNoise(100, 6);
  CHECK(f.Misalignment(h) == Catch::Approx(0.0).margin(1e-12));
  f.SetImpulseResponse(h);
  CHECK(f.Misalignment(h) <= -80.0);
  const auto back = f.ImpulseResponse();
  CHECK(howl::testing::MaxAbsDiff(std::span(back).first(100), h) < 1e-12);
  CHECK_THROWS_AS(f.Misalignment(std::vector<double>(10, 0.0)), Error);
}

TEST_CASE("covariance shrinks without process noise", "[kalman]") {
  KalmanConfig cfg = SmallConfig();
  cfg.enable_process_noise = false;
  FrequencyDomainKalman f(cfg);
  const auto x = WhiteNoise(kBlock * 100, 7), y = WhiteNoise(kBlock * 100, 8);
  auto prev = f.covariance();
  for (std::size_t m = 0; m < 100; ++m) {
    f.Step(Block(y, m), Block(x, m));
    const auto& cov = f.covariance();
    for (std::size_t p = 0; p < cov.size(); ++p) {
      for (std::size_t k = 0; k < cov[p].size(); ++k) CHECK(cov[p][k] <= prev[p][k]);
    }
    prev = cov;
  }
}

TEST_CASE("scaling both streams scales the outputs", "[kalman]") {
  const double alpha = 4.0;
  const auto x = WhiteNoise(kBlock * 80, 9);
  const auto h = WhiteNoise(32, 10, 0.2);
  const auto y = DirectConvolve(x, h);
  std::vector<double> xs(x), ys(y);
  for (double& v : xs) v *= alpha;
  for (double& v : ys) v *= alpha;
  FrequencyDomainKalman a(SmallConfig()), b(SmallConfig());
  for (std::size_t m = 0; m < 80; ++m) {
    const auto& oa = a.Step(Block(y, m), Block(x, m));
    const auto& ob = b.Step(Block(ys, m), Block(xs, m));
    for (std::size_t k = 0; k < a.bins(); ++k) {
      CHECK(std::abs(ob.playback_estimate.bins[k] - alpha * oa.playback_estimate.bins[k]) <=
            1e-9 * (1.0 + std::abs(ob.playback_estimate.bins[k])));
    }
  }
  for (std::size_t p = 0; p < a.weights().size(); ++p) {
    for (std::size_t k = 0; k < a.bins(); ++k) {
      CHECK(std::abs(a.weights()[p][k] - b.weights()[p][k]) <= 1e-9);
    }
  }
}

TEST_CASE("identical streams give identical trajectories", "[kalman]") {
  const auto x = WhiteNoise(kBlock * 40, 11), y = WhiteNoise(kBlock * 40, 12);
  FrequencyDomainKalman a(SmallConfig()), b(SmallConfig());
  for (std::size_t m = 0; m < 40; ++m) {
    a.Step(Block(y, m), Block(x, m));
    b.Step(Block(y, m), Block(x, m));
    REQUIRE(a.weights() == b.weights());
    REQUIRE(a.covariance() == b.covariance());
  }
}

TEST_CASE("non-finite input is refused", "[kalman]") {
  FrequencyDomainKalman f(SmallConfig());
  const auto x = WhiteNoise(kBlock, 13), y = WhiteNoise(kBlock, 14);
  f.Step(y, x);
  const auto weights = f.weights();
  auto bad = y;
  bad[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_FALSE(f.Step(bad, x).accepted);
  CHECK(f.weights() == weights);
  CHECK(f.steps() == 1);
  CHECK_THROWS_AS(f.Step(std::vector<double>(10), x), Error);
}

TEST_CASE("bad configurations throw", "[kalman]") {
  KalmanConfig cfg;
  cfg.transition = 1.5;
  CHECK_THROWS_AS(FrequencyDomainKalman(cfg), Error);
  cfg = KalmanConfig{};
  cfg.partitions = 0;
  CHECK_THROWS_AS(FrequencyDomainKalman(cfg), Error);
}
