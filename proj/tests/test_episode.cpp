#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sstream>

#include "doctest.h"
#include "gazerl/episode.hpp"

using namespace gazerl;

namespace {

EpisodeLog parse_str(const std::string& text, int w = 160, int h = 210) {
  std::istringstream in(text);
  return parse_episode_log(in, w, h);
}

}  // namespace

TEST_CASE("empty input raises EmptyLog") {
  CHECK_THROWS_AS(parse_str(""), EmptyLog);
  CHECK_THROWS_AS(parse_str("#episode=e1;width=160;height=210\n"), EmptyLog);
}

TEST_CASE("single frame line parses fields") {
  auto log = parse_str("0;3;ax=77,ay=235;room=1;level=0;keys=0;gaze=80.0:100.0:12\n");
  REQUIRE(log.frames.size() == 1);
  const auto& fr = log.frames[0];
  CHECK(fr.frame_index == 0);
  CHECK(fr.action == 3);
  CHECK(fr.state.agent_x == 77);
  CHECK(fr.state.agent_y == 235);
  CHECK(fr.state.room_id == 1);
  CHECK(fr.state.level == 0);
  CHECK(fr.state.keys == 0);
  REQUIRE(fr.gaze.size() == 1);
  CHECK(fr.gaze[0].x == doctest::Approx(80.0));
  CHECK(fr.gaze[0].y == doctest::Approx(100.0));
  CHECK(fr.gaze[0].t == doctest::Approx(12.0));
}

TEST_CASE("malformed row among ten reports its line number") {
  std::string text = "#episode=e1;width=160;height=210\n";
  for (int i = 0; i < 10; ++i) {
    if (i == 6)
      text += "6;not-an-action;ax=0,ay=0;room=1;level=0;keys=0;gaze=\n";
    else
      text += std::to_string(i) + ";0;ax=0,ay=0;room=1;level=0;keys=0;gaze=\n";
  }
  try {
    parse_str(text);
    FAIL("expected MalformedLine");
  } catch (const MalformedLine& e) {
    CHECK(e.line_no == 8);  // 1-based, header counts as line 1
  }
}

TEST_CASE("out-of-bounds gaze is dropped and counted") {
  auto log = parse_str(
      "0;0;ax=0,ay=0;room=1;level=0;keys=0;"
      "gaze=10:10:1|-3:10:2|10:300:3|200:10:4\n");
  CHECK(log.frames[0].gaze.size() == 1);
  CHECK(log.dropped_samples == 3);
  CHECK(validate_log(log).dropped_samples == 3);
}

TEST_CASE("header overrides default dimensions") {
  auto log = parse_str(
      "#episode=tiny;width=20;height=20\n"
      "0;0;ax=1,ay=1;room=0;level=0;keys=0;gaze=19:19:0\n");
  CHECK(log.frame_width == 20);
  CHECK(log.frame_height == 20);
  CHECK(log.episode_id == "tiny");
  CHECK(log.frames[0].gaze.size() == 1);
}

TEST_CASE("parse and serialize round-trip") {
  EpisodeLog log;
  log.episode_id = "rt";
  log.frame_width = 160;
  log.frame_height = 210;
  for (int i = 0; i < 5; ++i) {
    FrameRecord fr;
    fr.frame_index = i;
    fr.action = i % 8;
    fr.state = {10 + i, 20, 1, 0, i % 2};
    fr.gaze.push_back({i * 16.7, 1.0 / 3.0 + i, 100.0 - 0.123456789 * i});
    if (i != 2) fr.gaze.push_back({i * 16.7 + 1.0, 50.5, 60.25});
    fr.gaze.clear();
    fr.gaze.push_back({i * 16.7, 100.0 - 0.123456789 * i, 1.0 / 3.0 + i});
    log.frames.push_back(fr);
  }
  std::ostringstream out;
  serialize_episode_log(log, out);
  auto back = parse_str(out.str());
  REQUIRE(back.frames.size() == log.frames.size());
  CHECK(back.episode_id == log.episode_id);
  for (std::size_t i = 0; i < log.frames.size(); ++i) {
    CHECK(back.frames[i].frame_index == log.frames[i].frame_index);
    CHECK(back.frames[i].action == log.frames[i].action);
    CHECK(back.frames[i].state.agent_x == log.frames[i].state.agent_x);
    CHECK(back.frames[i].state.keys == log.frames[i].state.keys);
    REQUIRE(back.frames[i].gaze.size() == log.frames[i].gaze.size());
    for (std::size_t g = 0; g < log.frames[i].gaze.size(); ++g) {
      // %.17g keeps doubles exactly
      CHECK(back.frames[i].gaze[g].x == log.frames[i].gaze[g].x);
      CHECK(back.frames[i].gaze[g].y == log.frames[i].gaze[g].y);
      CHECK(back.frames[i].gaze[g].t == log.frames[i].gaze[g].t);
    }
  }
}

TEST_CASE("filter_by_room keeps matching frames in order") {
  std::string text;
  for (int i = 0; i < 6; ++i)
    text += std::to_string(i) + ";0;ax=0,ay=0;room=" + std::to_string(i % 2) +
            ";level=0;keys=0;gaze=\n";
  auto log = parse_str(text);

  auto room1 = filter_by_room(log, 1, 0);
  REQUIRE(room1.frames.size() == 3);
  CHECK(room1.frames[0].frame_index == 1);
  CHECK(room1.frames[1].frame_index == 3);
  CHECK(room1.frames[2].frame_index == 5);

  SUBCASE("identity when everything matches") {
    auto all = filter_by_room(room1, 1, 0);
    CHECK(all.frames.size() == room1.frames.size());
  }
  SUBCASE("idempotence") {
    auto twice = filter_by_room(filter_by_room(log, 1, 0), 1, 0);
    CHECK(twice.frames.size() == room1.frames.size());
  }
  SUBCASE("absent room gives empty log") {
    CHECK(filter_by_room(log, 99, 0).frames.empty());
  }
}

TEST_CASE("validate_log counts violations") {
  std::string text;
  for (int i = 0; i < 100; ++i)
    text += std::to_string(i) + ";0;ax=0,ay=0;room=1;level=0;keys=0;gaze=\n";
  auto clean = parse_str(text);
  auto rep = validate_log(clean);
  CHECK(rep.frames == 100);
  CHECK(rep.index_violations == 0);
  CHECK(rep.time_violations == 0);

  auto bad = parse_str(
      "5;0;ax=0,ay=0;room=1;level=0;keys=0;gaze=\n"
      "4;0;ax=0,ay=0;room=1;level=0;keys=0;gaze=\n");
  CHECK(validate_log(bad).index_violations == 1);
}

TEST_CASE("atari-head adapter joins gameplay rows with a label sidecar") {
  std::istringstream gameplay(
      "frame_id,episode_id,score,duration,unclipped_reward,action,gaze_positions\n"
      "RZ_1_0,RZ_1,0,33,0,3,80.0,100.0,81.0,101.0\n"
      "RZ_1_1,RZ_1,0,33,0,4,90.0,110.0\n");
  std::istringstream labels(
      "0;77;235;1;0;0\n"
      "1;78;235;1;0;0\n");
  auto log = parse_atari_head(gameplay, labels, "RZ_1");
  REQUIRE(log.frames.size() == 2);
  CHECK(log.frames[0].action == 3);
  CHECK(log.frames[0].gaze.size() == 2);
  CHECK(log.frames[1].gaze.size() == 1);
  CHECK(log.frames[0].state.agent_x == 77);
  CHECK(log.frames[1].state.agent_x == 78);
  // synthesized timestamps stay ordered
  CHECK(log.frames[0].gaze[0].t < log.frames[0].gaze[1].t);
  CHECK(log.frames[0].gaze[1].t < log.frames[1].gaze[0].t);
}
