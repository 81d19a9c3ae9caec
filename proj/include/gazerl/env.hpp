#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gazerl/subgoals.hpp"

namespace gazerl {

enum class Cell : char {
  Empty,
  Platform,
  Ladder,
  Rope,
  SkullPath,
  Key,
  Door,
};

// Action ids (8 total)
enum Action : int {
  kNoOp = 0,
  kUp = 1,
  kDown = 2,
  kLeft = 3,
  kRight = 4,
  kJumpUp = 5,
  kJumpLeft = 6,
  kJumpRight = 7,
};
inline constexpr int kNumActions = 8;

/// Unit direction of an action in grid coordinates (y grows downward).
/// NoOp is the zero vector.
std::pair<double, double> action_direction(int action);

struct RoomLayout {
  int width = 0;
  int height = 0;
  std::vector<Cell> cells;
  int spawn_x = 0;
  int spawn_y = 0;
  std::vector<std::pair<int, int>> skull_path;  // patrol cells in order
  int patrol_period = 1;

  Cell at(int x, int y) const {
    return cells[static_cast<std::size_t>(y) * width + x];
  }
  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }
};

struct EnvState {
  int x = 0;
  int y = 0;
  bool has_key = false;
  int skull_phase = 0;
  bool alive = true;
  bool door_opened = false;
  long steps = 0;
};

struct StepEvents {
  bool died = false;
  bool got_key = false;
  bool opened_door = false;
  bool moved = false;
};

class LayoutError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BadChar : public LayoutError {
 public:
  BadChar(int row, int col);
  int row, col;
};

class NoSpawn : public LayoutError {
 public:
  NoSpawn() : LayoutError("layout has no spawn cell 'A'") {}
};

class NoDoor : public LayoutError {
 public:
  NoDoor() : LayoutError("layout has no door cell 'D'") {}
};

class SteppedWhenDead : public std::runtime_error {
 public:
  SteppedWhenDead() : std::runtime_error("step() on a dead agent") {}
};

/// ASCII legend: '.'=Empty '#'=Platform 'H'=Ladder '|'=Rope 'S'=SkullPath
/// 'K'=Key 'D'=Door 'A'=Spawn.
RoomLayout load_layout(std::istream& in);
RoomLayout load_layout_string(const std::string& text);

/// Deterministic; the seed is reserved for future stochastic variants.
EnvState reset(const RoomLayout& layout, unsigned seed = 0);

StepEvents step(const RoomLayout& layout, EnvState& state, int action);

/// Skull cell as a pure function of the patrol phase.
std::pair<int, int> skull_pos(const RoomLayout& layout, int phase);

enum class GoalRequire : int { None = 0, Key = 1, Door = 2 };

/// Agent cell inside the goal box (closed box convention); key/door goals
/// additionally require the corresponding flag.
bool subgoal_reached(const EnvState& state, const BoxProposal& goal,
                     GoalRequire require = GoalRequire::None);

/// ASCII dump of the layout with agent ('@') and skull ('s') overlaid.
std::string render(const RoomLayout& layout, const EnvState& state);

}  // namespace gazerl
