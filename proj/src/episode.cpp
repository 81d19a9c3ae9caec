#include "gazerl/episode.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace gazerl {

MalformedLine::MalformedLine(std::size_t line, const std::string& what)
    : ParseError("malformed line " + std::to_string(line) +
                 (what.empty() ? "" : ": " + what)),
      line_no(line) {}

EmptyLog::EmptyLog() : ParseError("no valid frames in log") {}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

bool parse_int(const std::string& s, long long& v) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && p == s.data() + s.size();
}

bool parse_double(const std::string& s, double& v) {
  if (s.empty()) return false;
  char* end = nullptr;
  v = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

// "key=value" with exact key match
bool key_value(const std::string& field, const std::string& key,
               std::string& value) {
  if (field.size() <= key.size() + 1) return false;
  if (field.compare(0, key.size(), key) != 0 || field[key.size()] != '=')
    return false;
  value = field.substr(key.size() + 1);
  return true;
}

}  // namespace

EpisodeLog parse_episode_log(std::istream& in, int width, int height) {
  EpisodeLog log;
  log.frame_width = width;
  log.frame_height = height;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      // header: #episode=<id>;width=<int>;height=<int>
      auto fields = split(line.substr(1), ';');
      for (const auto& f : fields) {
        std::string v;
        long long n;
        if (key_value(f, "episode", v)) {
          log.episode_id = v;
        } else if (key_value(f, "width", v) && parse_int(v, n)) {
          log.frame_width = static_cast<int>(n);
        } else if (key_value(f, "height", v) && parse_int(v, n)) {
          log.frame_height = static_cast<int>(n);
        }
      }
      continue;
    }
    auto fields = split(line, ';');
    if (fields.size() != 7) throw MalformedLine(line_no, "expected 7 fields");
    FrameRecord fr;
    long long n;
    if (!parse_int(fields[0], n)) throw MalformedLine(line_no, "frame_index");
    fr.frame_index = n;
    if (!parse_int(fields[1], n) || n < 0 || n > 7)
      throw MalformedLine(line_no, "action");
    fr.action = static_cast<int>(n);
    // ax=..,ay=..
    auto pos_fields = split(fields[2], ',');
    std::string v;
    if (pos_fields.size() != 2 || !key_value(pos_fields[0], "ax", v) ||
        !parse_int(v, n))
      throw MalformedLine(line_no, "agent position");
    fr.state.agent_x = static_cast<int>(n);
    if (!key_value(pos_fields[1], "ay", v) || !parse_int(v, n))
      throw MalformedLine(line_no, "agent position");
    fr.state.agent_y = static_cast<int>(n);
    if (!key_value(fields[3], "room", v) || !parse_int(v, n) || n < 0)
      throw MalformedLine(line_no, "room");
    fr.state.room_id = static_cast<int>(n);
    if (!key_value(fields[4], "level", v) || !parse_int(v, n) || n < 0)
      throw MalformedLine(line_no, "level");
    fr.state.level = static_cast<int>(n);
    if (!key_value(fields[5], "keys", v) || !parse_int(v, n) || n < 0)
      throw MalformedLine(line_no, "keys");
    fr.state.keys = static_cast<int>(n);
    if (fields[6].compare(0, 5, "gaze=") != 0)
      throw MalformedLine(line_no, "gaze");
    std::string gaze_str = fields[6].substr(5);
    if (!gaze_str.empty()) {
      for (const auto& tok : split(gaze_str, '|')) {
        auto parts = split(tok, ':');
        GazeSample gs;
        if (parts.size() != 3 || !parse_double(parts[0], gs.x) ||
            !parse_double(parts[1], gs.y) || !parse_double(parts[2], gs.t))
          throw MalformedLine(line_no, "gaze sample");
        bool in_bounds = gs.x >= 0 && gs.x < log.frame_width && gs.y >= 0 &&
                         gs.y < log.frame_height && gs.t >= 0;
        if (in_bounds)
          fr.gaze.push_back(gs);
        else
          ++log.dropped_samples;
      }
    }
    log.frames.push_back(std::move(fr));
  }
  if (log.frames.empty()) throw EmptyLog();
  return log;
}

void serialize_episode_log(const EpisodeLog& log, std::ostream& out) {
  out << "#episode=" << log.episode_id << ";width=" << log.frame_width
      << ";height=" << log.frame_height << "\n";
  char buf[64];
  for (const auto& fr : log.frames) {
    out << fr.frame_index << ';' << fr.action << ";ax=" << fr.state.agent_x
        << ",ay=" << fr.state.agent_y << ";room=" << fr.state.room_id
        << ";level=" << fr.state.level << ";keys=" << fr.state.keys
        << ";gaze=";
    for (std::size_t i = 0; i < fr.gaze.size(); ++i) {
      const auto& g = fr.gaze[i];
      if (i) out << '|';
      std::snprintf(buf, sizeof buf, "%.17g:%.17g:%.17g", g.x, g.y, g.t);
      out << buf;
    }
    out << "\n";
  }
}

EpisodeLog filter_by_room(const EpisodeLog& log, int room_id, int level) {
  EpisodeLog out;
  out.episode_id = log.episode_id + "-r" + std::to_string(room_id) + "l" +
                   std::to_string(level);
  out.frame_width = log.frame_width;
  out.frame_height = log.frame_height;
  out.dropped_samples = log.dropped_samples;
  for (const auto& fr : log.frames)
    if (fr.state.room_id == room_id && fr.state.level == level)
      out.frames.push_back(fr);
  return out;
}

ValidationReport validate_log(const EpisodeLog& log) {
  ValidationReport rep;
  rep.frames = static_cast<std::int64_t>(log.frames.size());
  rep.dropped_samples = log.dropped_samples;
  std::int64_t prev_index = 0;
  bool first = true;
  for (const auto& fr : log.frames) {
    if (!first && fr.frame_index <= prev_index) ++rep.index_violations;
    prev_index = fr.frame_index;
    first = false;
    double prev_t = -1.0;
    for (const auto& g : fr.gaze) {
      ++rep.gaze_samples;
      if (g.t < prev_t) ++rep.time_violations;
      prev_t = g.t;
    }
  }
  return rep;
}

EpisodeLog parse_atari_head(std::istream& gameplay, std::istream& labels,
                            const std::string& episode_id, int width,
                            int height) {
  EpisodeLog log;
  log.episode_id = episode_id;
  log.frame_width = width;
  log.frame_height = height;

  // sidecar: frame;ax;ay;room;level;keys
  std::vector<StateLabel> side;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(labels, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto f = split(line, ';');
    if (f.size() != 6) throw MalformedLine(line_no, "label sidecar");
    long long v[6];
    for (int i = 0; i < 6; ++i)
      if (!parse_int(f[i], v[i])) throw MalformedLine(line_no, "label sidecar");
    StateLabel sl;
    sl.agent_x = static_cast<int>(v[1]);
    sl.agent_y = static_cast<int>(v[2]);
    sl.room_id = static_cast<int>(v[3]);
    sl.level = static_cast<int>(v[4]);
    sl.keys = static_cast<int>(v[5]);
    side.push_back(sl);
  }

  line_no = 0;
  double t = 0.0;
  std::size_t frame = 0;
  while (std::getline(gameplay, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.rfind("frame_id", 0) == 0) continue;  // header row
    auto f = split(line, ',');
    if (f.size() < 6) throw MalformedLine(line_no, "gameplay row");
    FrameRecord fr;
    fr.frame_index = static_cast<std::int64_t>(frame);
    double duration = 0.0;
    parse_double(f[3], duration);
    long long act = 0;
    if (parse_int(f[5], act) && act >= 0 && act <= 7)
      fr.action = static_cast<int>(act);
    std::size_t n_gaze = (f.size() - 6) / 2;
    for (std::size_t i = 0; i < n_gaze; ++i) {
      GazeSample gs;
      if (!parse_double(f[6 + 2 * i], gs.x) ||
          !parse_double(f[6 + 2 * i + 1], gs.y))
        continue;
      // Atari-HEAD gives no per-sample clock; spread samples evenly over
      // the frame duration.
      gs.t = t + (n_gaze > 1 ? duration * double(i) / double(n_gaze) : 0.0);
      if (gs.x >= 0 && gs.x < width && gs.y >= 0 && gs.y < height &&
          gs.t >= 0)
        fr.gaze.push_back(gs);
      else
        ++log.dropped_samples;
    }
    if (frame < side.size()) fr.state = side[frame];
    log.frames.push_back(std::move(fr));
    t += duration > 0 ? duration : 1000.0 / 60.0;
    ++frame;
  }
  if (log.frames.empty()) throw EmptyLog();
  return log;
}

}  // namespace gazerl
