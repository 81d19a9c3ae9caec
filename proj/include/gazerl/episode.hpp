#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace gazerl {

/// One gaze sample in native frame coordinates, timestamped in ms since
/// episode start.
struct GazeSample {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
};

/// Game-state labels attached to a frame.
struct StateLabel {
  int agent_x = 0;
  int agent_y = 0;
  int room_id = 0;
  int level = 0;
  int keys = 0;
};

struct FrameRecord {
  std::int64_t frame_index = 0;
  int action = 0;  // 0..7
  std::vector<GazeSample> gaze;
  StateLabel state;
};

struct EpisodeLog {
  std::string episode_id;
  int frame_width = 160;
  int frame_height = 210;
  std::vector<FrameRecord> frames;
  // gaze samples removed at parse time (out of bounds or negative time)
  std::int64_t dropped_samples = 0;
};

struct ValidationReport {
  std::int64_t frames = 0;
  std::int64_t gaze_samples = 0;
  std::int64_t dropped_samples = 0;
  std::int64_t index_violations = 0;  // non-increasing frame_index
  std::int64_t time_violations = 0;   // decreasing gaze time within a frame
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedLine : public ParseError {
 public:
  explicit MalformedLine(std::size_t line_no, const std::string& what = "");
  std::size_t line_no;
};

class EmptyLog : public ParseError {
 public:
  EmptyLog();
};

/// Parses the line-oriented episode-log format. Out-of-bounds gaze samples
/// are dropped and counted in EpisodeLog::dropped_samples. Frame dimensions
/// come from the header line when present, otherwise from the arguments.
EpisodeLog parse_episode_log(std::istream& in, int width = 160,
                             int height = 210);

/// Inverse of parse_episode_log: parse(serialize(log)) == log.
void serialize_episode_log(const EpisodeLog& log, std::ostream& out);

/// Keeps only frames labeled with the given room and level, preserving
/// order. The episode id is suffixed with a room/level tag.
EpisodeLog filter_by_room(const EpisodeLog& log, int room_id, int level);

ValidationReport validate_log(const EpisodeLog& log);

/// Adapter for Atari-HEAD style gameplay files (comma-separated:
/// frame_id,episode_id,score,duration,unclipped_reward,action,x,y,x,y,...)
/// joined with a state-label sidecar of `frame;ax;ay;room;level;keys` lines.
/// Atari-HEAD does not ship RAM labels, so the sidecar must be produced by
/// replaying the episode (see README).
EpisodeLog parse_atari_head(std::istream& gameplay, std::istream& labels,
                            const std::string& episode_id, int width = 160,
                            int height = 210);

}  // namespace gazerl
