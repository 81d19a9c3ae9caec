#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gazerl/env.hpp"
#include "gazerl/subgoals.hpp"

namespace gazerl {

using Point = std::pair<double, double>;

struct RewardConfig {
  double alpha = 0.0;        // weight of the direction reward
  double beta = 0.0;         // weight of the distance reward
  double gamma = 0.0;        // weight of the step penalty
  double tau = 0.001;        // scaling constant for all dense terms
  double subgoal_bonus = 1.0;
  double death_penalty = 1.0;  // subtracted on a fatal transition
  // When set, the goal vector is G_prev - G_next (the literal equation
  // form); default steers toward the next goal.
  bool literal_dir_sign = false;
};

struct EpsilonSchedule {
  double start = 1.0;
  double end = 0.02;
  long horizon = 200000;
};

class DegenerateGoals : public std::runtime_error {
 public:
  DegenerateGoals() : std::runtime_error("previous and next goal coincide") {}
};

class UnknownVariant : public std::runtime_error {
 public:
  explicit UnknownVariant(const std::string& v)
      : std::runtime_error("unknown experiment variant: " + v) {}
};

/// Linear interpolation from start to end over the horizon, clamped after.
double epsilon(long step, const EpsilonSchedule& schedule = {});

/// Dot product of the action's unit direction with the unit goal vector.
double dir_reward(int action, Point g_prev, Point g_next,
                  bool literal_sign = false);

/// (sqrt(d_ap) - sqrt(d_ac)) / sqrt(d_pc) on raw distances.
double dist_reward(double d_ap, double d_ac, double d_pc);

/// Same, computing Euclidean distances from positions.
double dist_reward_points(Point agent, Point g_prev, Point g_next);

double shaped_reward(bool goal_reached, int action, Point agent, Point g_prev,
                     Point g_next, const RewardConfig& cfg);

/// Tabular action-value store over the encoded env state space.
struct QTable {
  int n_states = 0;
  int n_actions = kNumActions;
  double lr = 0.1;
  double discount = 0.99;
  std::vector<double> q;

  QTable() = default;
  QTable(int states, int actions = kNumActions, double lr_ = 0.1,
         double discount_ = 0.99)
      : n_states(states),
        n_actions(actions),
        lr(lr_),
        discount(discount_),
        q(static_cast<std::size_t>(states) * actions, 0.0) {}

  double& at(int s, int a) {
    return q[static_cast<std::size_t>(s) * n_actions + a];
  }
  double at(int s, int a) const {
    return q[static_cast<std::size_t>(s) * n_actions + a];
  }
  double max_q(int s) const;
  int greedy(int s) const;  // ties to the smaller action id
};

void q_update(QTable& table, int s, int a, double r, int s2, bool done);

/// Success ratio over the trailing `window` trials at each index (over the
/// available trials before warm-up).
std::vector<double> trailing_performance(std::span<const int> outcomes,
                                         int window = 100);

/// Sub-goal with its attainment requirement, in layout cell coordinates.
struct TrainGoal {
  BoxProposal box;
  GoalRequire require = GoalRequire::None;
};

std::vector<TrainGoal> read_train_goals(std::istream& in);

/// Encodes (x, y, has_key, skull_phase) for tabular learners.
struct StateSpace {
  int width = 0;
  int height = 0;
  int period = 1;

  explicit StateSpace(const RoomLayout& layout)
      : width(layout.width), height(layout.height),
        period(layout.patrol_period) {}
  int size() const { return width * height * 2 * period; }
  int encode(const EnvState& s) const {
    return ((s.y * width + s.x) * 2 + (s.has_key ? 1 : 0)) * period +
           s.skull_phase;
  }
};

struct TrainConfig {
  RewardConfig reward;
  EpsilonSchedule eps;           // flat variants: driven by global env steps
  long agent_eps_horizon = 2000; // per-agent schedule for hierarchical legs
  long budget = 300000;
  long step_cap = 500;  // env steps per sub-goal attempt
  int window = 100;
  double learned_threshold = 0.9;
  double lr = 0.1;  // flat baselines: incremental updates
  double discount = 0.99;
  // Per-sub-goal agents face a fixed-start deterministic sub-problem, so the
  // leg solver uses exact one-step backups and optimistic initial values.
  double leg_lr = 1.0;
  double optimism = 1.0;
  unsigned seed = 1;
};

enum class TrainStatus { Completed, BudgetExhausted };

struct TrainStats {
  // env-step count at which each plan step first passed the trailing
  // threshold; empty optional = never learned within budget
  std::vector<std::optional<long>> learned_at;
  long total_steps = 0;
  TrainStatus status = TrainStatus::Completed;
  // (env step, per-plan-step trailing performance) snapshots
  std::vector<std::pair<long, std::vector<double>>> trail_log;
};

struct LegResult {
  QTable table;
  std::optional<long> learned_at;  // in global env steps
  long steps_used = 0;
  TrainStatus status = TrainStatus::Completed;
  std::vector<int> outcomes;
};

/// Trains the tabular agent for plan step k. Episodes replay the greedy
/// policies of steps < k from reset, then explore toward goal plan[k];
/// they end on the goal, death, or the step cap. `global_steps` is advanced
/// by every env step taken.
LegResult train_low_level(const RoomLayout& layout,
                          std::span<const TrainGoal> goals,
                          std::span<const int> plan, int k,
                          std::span<const QTable> lower_agents,
                          const TrainConfig& cfg, long& global_steps);

/// Meta-controller state: last achieved plan step index and the key flag.
struct MetaPolicy {
  std::map<std::pair<int, int>, std::map<int, int>> dataset;  // state -> label counts

  bool knows(int last_idx, bool has_key) const;
  int predict(int last_idx, bool has_key) const;  // majority, ties smaller id
};

/// DAgger over the plan oracle: rolls out the meta policy (expert labels
/// aggregated at every sub-goal decision), terminating the episode on a
/// wrong meta choice.
MetaPolicy meta_dagger(const RoomLayout& layout,
                       std::span<const TrainGoal> goals,
                       std::span<const int> plan,
                       std::span<const QTable> agents, int iterations,
                       unsigned seed);

/// fullmodel: hierarchical, sparse sub-goal reward only. singlegoal /
/// singledist / singledir: one flat agent with the goal index in the state
/// and the named dense term.
TrainStats run_experiment(const std::string& variant,
                          const RoomLayout& layout,
                          std::span<const TrainGoal> goals,
                          std::span<const int> plan, const TrainConfig& cfg);

void write_stats_csv(const TrainStats& stats, std::ostream& out);
void write_learned_at_csv(const TrainStats& stats, std::ostream& out);

}  // namespace gazerl
