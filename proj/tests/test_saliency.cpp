#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "gazerl/saliency.hpp"

using namespace gazerl;

namespace {

EpisodeLog log_with_gaze(const std::vector<GazeSample>& gaze, int w = 160,
                         int h = 210) {
  EpisodeLog log;
  log.frame_width = w;
  log.frame_height = h;
  FrameRecord fr;
  fr.gaze = gaze;
  log.frames.push_back(fr);
  return log;
}

double map_sum(const SaliencyMap& m) {
  double s = 0;
  for (double v : m.values) s += v;
  return s;
}

// Direct 2-D Gaussian with the same truncation radius, for cross-checking
// the separable implementation.
SaliencyMap blur2d(const SaliencyMap& in, double sigma) {
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * r + 1);
  double norm = 0;
  for (int i = -r; i <= r; ++i) {
    k[i + r] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    norm += k[i + r];
  }
  for (double& v : k) v /= norm;
  SaliencyMap out(in.width, in.height);
  for (int y = 0; y < in.height; ++y)
    for (int x = 0; x < in.width; ++x) {
      double acc = 0;
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
          int sx = x + dx, sy = y + dy;
          if (sx < 0 || sx >= in.width || sy < 0 || sy >= in.height) continue;
          acc += in.at(sx, sy) * k[dx + r] * k[dy + r];
        }
      out.at(x, y) = acc;
    }
  return out;
}

}  // namespace

TEST_CASE("fixation map counts gaze per cell") {
  SUBCASE("no gaze") {
    auto m = fixation_map(log_with_gaze({}));
    CHECK(map_sum(m) == 0.0);
  }
  SUBCASE("three samples on one cell") {
    auto m = fixation_map(
        log_with_gaze({{0, 10.2, 10.9}, {1, 10.5, 10.1}, {2, 10, 10}}));
    CHECK(m.at(10, 10) == 3.0);
    CHECK(map_sum(m) == 3.0);
  }
  SUBCASE("two distinct cells") {
    auto m = fixation_map(log_with_gaze({{0, 10, 10}, {1, 20, 20}}));
    CHECK(m.at(10, 10) == 1.0);
    CHECK(m.at(20, 20) == 1.0);
    CHECK(map_sum(m) == 2.0);
  }
}

TEST_CASE("gaussian blur of an impulse matches the sampled gaussian") {
  SaliencyMap in(101, 101);
  in.at(50, 50) = 1.0;
  const double sigma = 4.0;
  auto out = gaussian_blur(in, sigma);
  CHECK(map_sum(out) == doctest::Approx(1.0).epsilon(1e-6));

  auto ref = blur2d(in, sigma);
  double max_err = 0;
  for (std::size_t i = 0; i < out.values.size(); ++i)
    max_err = std::max(max_err, std::abs(out.values[i] - ref.values[i]));
  CHECK(max_err < 1e-9);
}

TEST_CASE("blur of an all-zero map is all-zero") {
  SaliencyMap in(30, 30);
  auto out = gaussian_blur(in, 3.0);
  CHECK(map_sum(out) == 0.0);
}

TEST_CASE("blur superposition for far-apart impulses") {
  const double sigma = 3.0;
  SaliencyMap a(120, 60), b(120, 60), both(120, 60);
  a.at(20, 30) = 1.0;
  b.at(100, 30) = 1.0;  // 80 px apart > 8 sigma
  both.at(20, 30) = 1.0;
  both.at(100, 30) = 1.0;
  auto ba = gaussian_blur(a, sigma);
  auto bb = gaussian_blur(b, sigma);
  auto bboth = gaussian_blur(both, sigma);
  for (std::size_t i = 0; i < bboth.values.size(); ++i)
    CHECK(std::abs(bboth.values[i] - ba.values[i] - bb.values[i]) < 1e-9);
}

TEST_CASE("blur linearity") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> val(0, 5);
  SaliencyMap a(40, 40), b(40, 40);
  for (auto& v : a.values) v = val(rng);
  for (auto& v : b.values) v = val(rng);
  SaliencyMap mix(40, 40);
  const double ca = 2.5, cb = -0.75;
  for (std::size_t i = 0; i < mix.values.size(); ++i)
    mix.values[i] = ca * a.values[i] + cb * b.values[i];
  auto lhs = gaussian_blur(mix, 2.0);
  auto ra = gaussian_blur(a, 2.0);
  auto rb = gaussian_blur(b, 2.0);
  for (std::size_t i = 0; i < lhs.values.size(); ++i)
    CHECK(std::abs(lhs.values[i] - ca * ra.values[i] - cb * rb.values[i]) <
          1e-9);
}

TEST_CASE("blur translation equivariance away from borders") {
  const double sigma = 2.0;
  SaliencyMap a(80, 80), b(80, 80);
  a.at(30, 40) = 1.0;
  b.at(35, 40) = 1.0;
  auto ba = gaussian_blur(a, sigma);
  auto bb = gaussian_blur(b, sigma);
  for (int y = 10; y < 70; ++y)
    for (int x = 10; x < 65; ++x)
      CHECK(ba.at(x, y) == doctest::Approx(bb.at(x + 5, y)).epsilon(1e-12));
}

TEST_CASE("normalize") {
  SUBCASE("max becomes one") {
    SaliencyMap m(2, 2);
    m.values = {1, 2, 4, 0};
    auto n = normalize(m);
    CHECK(n.values[0] == doctest::Approx(0.25));
    CHECK(n.values[1] == doctest::Approx(0.5));
    CHECK(n.values[2] == doctest::Approx(1.0));
    CHECK(n.values[3] == doctest::Approx(0.0));
  }
  SUBCASE("all-zero map unchanged") {
    SaliencyMap m(3, 3);
    auto n = normalize(m);
    CHECK(map_sum(n) == 0.0);
  }
  SUBCASE("idempotence") {
    SaliencyMap m(2, 2);
    m.values = {0.5, 3, 1, 2};
    auto once = normalize(m);
    auto twice = normalize(once);
    for (std::size_t i = 0; i < once.values.size(); ++i)
      CHECK(once.values[i] == twice.values[i]);
  }
}

TEST_CASE("threshold mask strictness and monotonicity") {
  SaliencyMap m(3, 1);
  m.values = {0.39, 0.40, 0.41};
  auto mask = threshold_mask(m, 0.4);
  REQUIRE(mask.size() == 1);
  CHECK(mask[0].x == 2);
  CHECK(mask[0].value == doctest::Approx(0.41));

  SUBCASE("higher threshold is a subset") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> val(0, 1);
    SaliencyMap r(20, 20);
    for (auto& v : r.values) v = val(rng);
    auto lo = threshold_mask(r, 0.2);
    auto hi = threshold_mask(r, 0.5);
    std::set<std::pair<int, int>> lo_cells;
    for (const auto& c : lo) lo_cells.insert({c.x, c.y});
    for (const auto& c : hi) CHECK(lo_cells.count({c.x, c.y}) == 1);
  }
  SUBCASE("all-zero map gives empty mask") {
    SaliencyMap z(4, 4);
    CHECK(threshold_mask(z, 0.0).empty());
  }
}

TEST_CASE("pgm output is a valid P2 header with scaled values") {
  SaliencyMap m(2, 1);
  m.values = {0.0, 1.0};
  std::ostringstream out;
  write_pgm(m, out);
  std::istringstream in(out.str());
  std::string magic;
  int w, h, maxval, a, b;
  in >> magic >> w >> h >> maxval >> a >> b;
  CHECK(magic == "P2");
  CHECK(w == 2);
  CHECK(h == 1);
  CHECK(maxval == 255);
  CHECK(a == 0);
  CHECK(b == 255);
}
