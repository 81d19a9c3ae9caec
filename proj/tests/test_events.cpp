#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "gazerl/events.hpp"

using namespace gazerl;

namespace {

std::vector<GazeSample> cluster(double x, double y, double t0, int n,
                                double dt) {
  std::vector<GazeSample> s;
  for (int i = 0; i < n; ++i) s.push_back({t0 + i * dt, x, y});
  return s;
}

// Independent per-segment classifier: a segment is "slow" when its angular
// velocity is below the threshold. Used to cross-check detect_events.
std::vector<bool> slow_segments(const std::vector<GazeSample>& s,
                                double thr_deg_s, double ppd) {
  std::vector<bool> slow;
  for (std::size_t i = 1; i < s.size(); ++i) {
    double dist = std::hypot(s[i].x - s[i - 1].x, s[i].y - s[i - 1].y) / ppd;
    double dt = (s[i].t - s[i - 1].t) / 1000.0;
    double v = dt > 0 ? dist / dt : (dist > 0 ? 1e18 : 0.0);
    slow.push_back(v < thr_deg_s);
  }
  return slow;
}

}  // namespace

TEST_CASE("stationary samples form one long fixation") {
  auto s = cluster(40, 50, 0, 50, 500.0 / 49.0);
  auto events = detect_events(s);
  REQUIRE(events.size() == 1);
  CHECK(events[0].kind == EventKind::Fixation);
  CHECK(events[0].duration() == doctest::Approx(500.0));
  CHECK(events[0].cx == doctest::Approx(40.0));
  CHECK(events[0].cy == doctest::Approx(50.0));
}

TEST_CASE("two clusters joined by a fast sweep") {
  std::vector<GazeSample> s = cluster(10, 10, 0, 20, 10);
  // one jump of 100 px in 10 ms = 1000 deg/s at ppd 10
  auto right = cluster(110, 10, 200, 20, 10);
  s.insert(s.end(), right.begin(), right.end());
  auto events = detect_events(s);
  REQUIRE(events.size() == 3);
  CHECK(events[0].kind == EventKind::Fixation);
  CHECK(events[1].kind == EventKind::Saccade);
  CHECK(events[2].kind == EventKind::Fixation);

  // cross-check against the per-segment oracle: the single fast segment is
  // the only one classified as a saccade
  auto slow = slow_segments(s, 30.0, 10.0);
  int fast = 0;
  for (bool b : slow) fast += b ? 0 : 1;
  CHECK(fast == 1);
}

TEST_CASE("one sample is not enough") {
  std::vector<GazeSample> s = {{0, 1, 1}};
  CHECK_THROWS_AS(detect_events(s), InsufficientSamples);
  CHECK_THROWS_AS(detect_events(std::vector<GazeSample>{}),
                  InsufficientSamples);
}

TEST_CASE("short fixations fold into the surrounding saccade") {
  // 3 samples (~20 ms) stationary in the middle of a sweep: below the
  // 100 ms minimum, so everything inside is one saccade
  std::vector<GazeSample> s = cluster(0, 0, 0, 15, 10);
  auto mid = cluster(80, 0, 150, 3, 10);
  auto far = cluster(160, 0, 190, 15, 10);
  s.insert(s.end(), mid.begin(), mid.end());
  s.insert(s.end(), far.begin(), far.end());
  auto events = detect_events(s);
  REQUIRE(events.size() == 3);
  CHECK(events[0].kind == EventKind::Fixation);
  CHECK(events[1].kind == EventKind::Saccade);
  CHECK(events[2].kind == EventKind::Fixation);
}

TEST_CASE("events partition the sample timeline") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> pos(0, 159);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<GazeSample> s;
    double t = 0;
    int clusters = 2 + trial % 4;
    for (int c = 0; c < clusters; ++c) {
      double x = pos(rng), y = pos(rng);
      int n = 10 + static_cast<int>(rng() % 30);
      for (int i = 0; i < n; ++i, t += 5.0) s.push_back({t, x, y});
    }
    auto events = detect_events(s);
    REQUIRE(!events.empty());
    CHECK(events.front().t_start == doctest::Approx(s.front().t));
    CHECK(events.back().t_end == doctest::Approx(s.back().t));
    for (std::size_t i = 1; i < events.size(); ++i) {
      CHECK(events[i].t_start == doctest::Approx(events[i - 1].t_end));
      CHECK(events[i].kind != events[i - 1].kind);
    }
  }
}

TEST_CASE("segmentation is scale-consistent") {
  std::vector<GazeSample> s = cluster(10, 10, 0, 20, 10);
  auto b = cluster(90, 40, 200, 20, 10);
  s.insert(s.end(), b.begin(), b.end());
  auto base = detect_events(s, 30.0, 10.0);

  auto scaled = s;
  for (auto& g : scaled) {
    g.x *= 3.0;
    g.y *= 3.0;
  }
  auto events = detect_events(scaled, 30.0, 30.0);
  REQUIRE(events.size() == base.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    CHECK(events[i].kind == base[i].kind);
    CHECK(events[i].t_start == doctest::Approx(base[i].t_start));
    CHECK(events[i].t_end == doctest::Approx(base[i].t_end));
  }
}

TEST_CASE("aoi hit attribution") {
  SubGoalSet aois;
  aois.boxes.push_back({0, 0, 20, 20, 0.9});   // id 0
  aois.boxes.push_back({40, 0, 20, 20, 0.5});  // id 1
  aois.boxes.push_back({10, 0, 20, 20, 0.5});  // id 2 overlaps id 0

  GazeEvent fix{EventKind::Fixation, 0, 200, 50, 10};
  GazeEvent sac{EventKind::Saccade, 200, 210, 15, 10};

  SUBCASE("centroid outside all boxes") {
    GazeEvent out{EventKind::Fixation, 0, 100, 150, 150};
    CHECK(aoi_hits(std::vector<GazeEvent>{out}, aois).empty());
  }
  SUBCASE("centroid inside exactly one box") {
    auto hits = aoi_hits(std::vector<GazeEvent>{fix}, aois);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].aoi_id == 1);
    CHECK(hits[0].t_start == doctest::Approx(0.0));
    CHECK(hits[0].t_end == doctest::Approx(200.0));
  }
  SUBCASE("overlap ties go to the higher score") {
    GazeEvent both{EventKind::Fixation, 0, 100, 15, 10};  // in 0 and 2
    auto hits = aoi_hits(std::vector<GazeEvent>{both}, aois);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].aoi_id == 0);
  }
  SUBCASE("saccades never produce hits") {
    CHECK(aoi_hits(std::vector<GazeEvent>{sac}, aois).empty());
  }
}
