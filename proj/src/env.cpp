#include "gazerl/env.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>

namespace gazerl {

BadChar::BadChar(int r, int c)
    : LayoutError("bad layout char at row " + std::to_string(r) + " col " +
                  std::to_string(c)),
      row(r),
      col(c) {}

std::pair<double, double> action_direction(int action) {
  switch (action) {
    case kUp:
    case kJumpUp:
      return {0.0, -1.0};
    case kDown:
      return {0.0, 1.0};
    case kLeft:
    case kJumpLeft:
      return {-1.0, 0.0};
    case kRight:
    case kJumpRight:
      return {1.0, 0.0};
    default:
      return {0.0, 0.0};
  }
}

RoomLayout load_layout(std::istream& in) {
  std::vector<std::string> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(line);
  }
  RoomLayout layout;
  layout.height = static_cast<int>(rows.size());
  layout.width = 0;
  for (const auto& r : rows)
    layout.width = std::max(layout.width, static_cast<int>(r.size()));
  layout.cells.assign(static_cast<std::size_t>(layout.width) * layout.height,
                      Cell::Empty);
  bool spawn = false, door = false;
  for (int y = 0; y < layout.height; ++y) {
    for (int x = 0; x < static_cast<int>(rows[y].size()); ++x) {
      Cell c;
      switch (rows[y][x]) {
        case '.': c = Cell::Empty; break;
        case '#': c = Cell::Platform; break;
        case 'H': c = Cell::Ladder; break;
        case '|': c = Cell::Rope; break;
        case 'S': c = Cell::SkullPath; break;
        case 'K': c = Cell::Key; break;
        case 'D': c = Cell::Door; door = true; break;
        case 'A':
          c = Cell::Empty;
          layout.spawn_x = x;
          layout.spawn_y = y;
          spawn = true;
          break;
        default:
          throw BadChar(y, x);
      }
      layout.cells[static_cast<std::size_t>(y) * layout.width + x] = c;
    }
  }
  if (!spawn) throw NoSpawn();
  if (!door) throw NoDoor();
  for (int y = 0; y < layout.height; ++y)
    for (int x = 0; x < layout.width; ++x)
      if (layout.at(x, y) == Cell::SkullPath)
        layout.skull_path.emplace_back(x, y);
  const int len = static_cast<int>(layout.skull_path.size());
  layout.patrol_period = len >= 2 ? 2 * len - 2 : 1;
  return layout;
}

RoomLayout load_layout_string(const std::string& text) {
  std::istringstream in(text);
  return load_layout(in);
}

EnvState reset(const RoomLayout& layout, unsigned /*seed*/) {
  EnvState s;
  s.x = layout.spawn_x;
  s.y = layout.spawn_y;
  return s;
}

std::pair<int, int> skull_pos(const RoomLayout& layout, int phase) {
  if (layout.skull_path.empty()) return {-1, -1};
  const int len = static_cast<int>(layout.skull_path.size());
  if (len == 1) return layout.skull_path[0];
  const int p = phase % layout.patrol_period;
  const int idx = p < len ? p : 2 * len - 2 - p;
  return layout.skull_path[static_cast<std::size_t>(idx)];
}

namespace {

bool climbable(Cell c) { return c == Cell::Ladder || c == Cell::Rope; }

bool blocked(const RoomLayout& l, const EnvState& s, int x, int y) {
  if (!l.in_bounds(x, y)) return true;
  const Cell c = l.at(x, y);
  if (c == Cell::Platform) return true;
  if (c == Cell::Door && !s.has_key) return true;  // locked without a key
  return false;
}

bool supported(const RoomLayout& l, int x, int y) {
  if (climbable(l.at(x, y))) return true;
  if (y + 1 >= l.height) return true;
  const Cell below = l.at(x, y + 1);
  return below == Cell::Platform || below == Cell::Ladder;
}

}  // namespace

StepEvents step(const RoomLayout& layout, EnvState& state, int action) {
  if (!state.alive) throw SteppedWhenDead();
  StepEvents ev;
  const int ox = state.x, oy = state.y;
  int nx = ox, ny = oy;

  switch (action) {
    case kNoOp:
      break;
    case kUp:
      if ((climbable(layout.at(ox, oy)) ||
           (layout.in_bounds(ox, oy - 1) && climbable(layout.at(ox, oy - 1)))) &&
          !blocked(layout, state, ox, oy - 1))
        ny = oy - 1;
      break;
    case kDown:
      if ((climbable(layout.at(ox, oy)) ||
           (layout.in_bounds(ox, oy + 1) && climbable(layout.at(ox, oy + 1)))) &&
          !blocked(layout, state, ox, oy + 1))
        ny = oy + 1;
      break;
    case kLeft:
      if (!blocked(layout, state, ox - 1, oy)) nx = ox - 1;
      break;
    case kRight:
      if (!blocked(layout, state, ox + 1, oy)) nx = ox + 1;
      break;
    case kJumpUp:
      if (!blocked(layout, state, ox, oy - 1)) ny = oy - 1;
      break;
    case kJumpLeft:
    case kJumpRight: {
      const int dir = action == kJumpLeft ? -1 : 1;
      if (!blocked(layout, state, ox + 2 * dir, oy))
        nx = ox + 2 * dir;  // 2-cell hop, 1-cell arc not collision-checked
      else if (!blocked(layout, state, ox + dir, oy))
        nx = ox + dir;
      break;
    }
    default:
      break;
  }

  state.x = nx;
  state.y = ny;

  // gravity: fall until supported; falls of more than 3 cells are fatal
  int fall = 0;
  while (state.alive && !supported(layout, state.x, state.y)) {
    if (state.y + 1 >= layout.height ||
        blocked(layout, state, state.x, state.y + 1))
      break;
    ++state.y;
    ++fall;
  }
  if (fall > 3) {
    state.alive = false;
    ev.died = true;
  }

  if (state.alive) {
    const Cell here = layout.at(state.x, state.y);
    if (here == Cell::Key && !state.has_key) {
      state.has_key = true;
      ev.got_key = true;
    }
    if (here == Cell::Door && state.has_key && !state.door_opened) {
      state.door_opened = true;
      ev.opened_door = true;
    }
  }

  // collision with the skull, both before and after its patrol step
  if (state.alive) {
    auto [sx, sy] = skull_pos(layout, state.skull_phase);
    if (sx == state.x && sy == state.y) {
      state.alive = false;
      ev.died = true;
    }
  }
  state.skull_phase = (state.skull_phase + 1) % layout.patrol_period;
  if (state.alive) {
    auto [sx, sy] = skull_pos(layout, state.skull_phase);
    if (sx == state.x && sy == state.y) {
      state.alive = false;
      ev.died = true;
    }
  }

  ev.moved = state.x != ox || state.y != oy;
  ++state.steps;
  return ev;
}

bool subgoal_reached(const EnvState& state, const BoxProposal& goal,
                     GoalRequire require) {
  if (!goal.contains(state.x, state.y)) return false;
  if (require == GoalRequire::Key) return state.has_key;
  if (require == GoalRequire::Door) return state.door_opened;
  return true;
}

std::string render(const RoomLayout& layout, const EnvState& state) {
  std::string out;
  auto [sx, sy] = skull_pos(layout, state.skull_phase);
  for (int y = 0; y < layout.height; ++y) {
    for (int x = 0; x < layout.width; ++x) {
      char ch = '.';
      switch (layout.at(x, y)) {
        case Cell::Empty: ch = '.'; break;
        case Cell::Platform: ch = '#'; break;
        case Cell::Ladder: ch = 'H'; break;
        case Cell::Rope: ch = '|'; break;
        case Cell::SkullPath: ch = '.'; break;
        case Cell::Key: ch = state.has_key ? '.' : 'K'; break;
        case Cell::Door: ch = 'D'; break;
      }
      if (x == sx && y == sy) ch = 's';
      if (x == state.x && y == state.y) ch = state.alive ? '@' : 'x';
      out += ch;
    }
    out += '\n';
  }
  return out;
}

}  // namespace gazerl
