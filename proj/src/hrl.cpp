#include "gazerl/hrl.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "json.hpp"

namespace gazerl {

double epsilon(long step, const EpsilonSchedule& s) {
  if (step >= s.horizon) return s.end;
  const double frac = static_cast<double>(step) / static_cast<double>(s.horizon);
  return s.start + (s.end - s.start) * frac;
}

double dir_reward(int action, Point g_prev, Point g_next, bool literal_sign) {
  double gx = g_next.first - g_prev.first;
  double gy = g_next.second - g_prev.second;
  if (literal_sign) {
    gx = -gx;
    gy = -gy;
  }
  const double norm = std::hypot(gx, gy);
  if (norm == 0.0) throw DegenerateGoals();
  auto [ax, ay] = action_direction(action);
  if (ax == 0.0 && ay == 0.0) return 0.0;  // NoOp
  return (ax * gx + ay * gy) / norm;
}

double dist_reward(double d_ap, double d_ac, double d_pc) {
  if (d_pc <= 0.0) throw DegenerateGoals();
  return (std::sqrt(d_ap) - std::sqrt(d_ac)) / std::sqrt(d_pc);
}

double dist_reward_points(Point agent, Point g_prev, Point g_next) {
  const double d_ap = std::hypot(agent.first - g_prev.first,
                                 agent.second - g_prev.second);
  const double d_ac = std::hypot(agent.first - g_next.first,
                                 agent.second - g_next.second);
  const double d_pc = std::hypot(g_prev.first - g_next.first,
                                 g_prev.second - g_next.second);
  return dist_reward(d_ap, d_ac, d_pc);
}

double shaped_reward(bool goal_reached, int action, Point agent, Point g_prev,
                     Point g_next, const RewardConfig& cfg) {
  double r = goal_reached ? cfg.subgoal_bonus : 0.0;
  if (cfg.alpha != 0.0)
    r += cfg.alpha * cfg.tau *
         dir_reward(action, g_prev, g_next, cfg.literal_dir_sign);
  if (cfg.beta != 0.0)
    r += cfg.beta * cfg.tau * dist_reward_points(agent, g_prev, g_next);
  r += cfg.gamma * (-cfg.tau);  // R_step = -tau per step
  return r;
}

double QTable::max_q(int s) const {
  double best = at(s, 0);
  for (int a = 1; a < n_actions; ++a) best = std::max(best, at(s, a));
  return best;
}

int QTable::greedy(int s) const {
  int best = 0;
  for (int a = 1; a < n_actions; ++a)
    if (at(s, a) > at(s, best)) best = a;
  return best;
}

void q_update(QTable& table, int s, int a, double r, int s2, bool done) {
  const double target = r + (done ? 0.0 : table.discount * table.max_q(s2));
  table.at(s, a) += table.lr * (target - table.at(s, a));
}

std::vector<double> trailing_performance(std::span<const int> outcomes,
                                         int window) {
  std::vector<double> out(outcomes.size());
  long running = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    running += outcomes[i];
    if (i >= static_cast<std::size_t>(window))
      running -= outcomes[i - window];
    const std::size_t denom = std::min<std::size_t>(i + 1, window);
    out[i] = static_cast<double>(running) / static_cast<double>(denom);
  }
  return out;
}

std::vector<TrainGoal> read_train_goals(std::istream& in) {
  nlohmann::json arr = nlohmann::json::parse(in);
  std::vector<TrainGoal> goals(arr.size());
  for (const auto& item : arr) {
    std::size_t id = item.at("id").get<std::size_t>();
    if (id >= goals.size()) goals.resize(id + 1);
    TrainGoal& g = goals[id];
    g.box.x = item.at("x").get<int>();
    g.box.y = item.at("y").get<int>();
    g.box.w = item.at("w").get<int>();
    g.box.h = item.at("h").get<int>();
    g.box.score = item.value("score", 0.0);
    const std::string req = item.value("requires", "");
    g.require = req == "key" ? GoalRequire::Key
               : req == "door" ? GoalRequire::Door
                               : GoalRequire::None;
  }
  return goals;
}

bool MetaPolicy::knows(int last_idx, bool has_key) const {
  return dataset.count({last_idx, has_key ? 1 : 0}) > 0;
}

int MetaPolicy::predict(int last_idx, bool has_key) const {
  auto it = dataset.find({last_idx, has_key ? 1 : 0});
  if (it == dataset.end()) return -1;
  int best_id = -1, best = 0;
  for (const auto& [id, count] : it->second) {
    if (count > best) {  // map iterates ascending, ties keep the smaller id
      best = count;
      best_id = id;
    }
  }
  return best_id;
}

namespace {

Point goal_center(const TrainGoal& g) { return {g.box.cx(), g.box.cy()}; }

Point prev_point(const RoomLayout& layout, std::span<const TrainGoal> goals,
                 std::span<const int> plan, int k) {
  if (k == 0) return {layout.spawn_x + 0.5, layout.spawn_y + 0.5};
  return goal_center(goals[plan[k - 1]]);
}

// Greedy rollout of one already-trained leg. Returns true when the leg's
// goal is reached within the step cap.
bool run_leg_greedy(const RoomLayout& layout, const StateSpace& ss,
                    const TrainGoal& goal, const QTable& table,
                    EnvState& st, long step_cap, long& global_steps) {
  for (long t = 0; t < step_cap; ++t) {
    if (subgoal_reached(st, goal.box, goal.require)) return true;
    if (!st.alive) return false;
    step(layout, st, table.greedy(ss.encode(st)));
    ++global_steps;
  }
  return subgoal_reached(st, goal.box, goal.require);
}

}  // namespace

LegResult train_low_level(const RoomLayout& layout,
                          std::span<const TrainGoal> goals,
                          std::span<const int> plan, int k,
                          std::span<const QTable> lower_agents,
                          const TrainConfig& cfg, long& global_steps) {
  StateSpace ss(layout);
  LegResult res;
  res.table = QTable(ss.size(), kNumActions, cfg.leg_lr, cfg.discount);
  std::fill(res.table.q.begin(), res.table.q.end(), cfg.optimism);
  if (global_steps >= cfg.budget) {
    res.status = TrainStatus::BudgetExhausted;
    return res;
  }

  std::mt19937 rng(cfg.seed * 2654435761u + static_cast<unsigned>(k) * 7919u);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> random_action(0, kNumActions - 1);

  const TrainGoal& goal = goals[plan[k]];
  const Point g_next = goal_center(goal);
  const Point g_prev = prev_point(layout, goals, plan, k);
  const EpsilonSchedule leg_eps{1.0, 0.02, cfg.agent_eps_horizon};

  long agent_steps = 0;
  long running_successes = 0;

  while (global_steps < cfg.budget) {
    EnvState st = reset(layout);
    bool prefix_ok = true;
    for (int j = 0; j < k && prefix_ok; ++j)
      prefix_ok = run_leg_greedy(layout, ss, goals[plan[j]], lower_agents[j],
                                 st, cfg.step_cap, global_steps);

    int success = 0;
    if (prefix_ok) {
      for (long t = 0; t < cfg.step_cap && global_steps < cfg.budget; ++t) {
        const int s = ss.encode(st);
        const double eps = epsilon(agent_steps, leg_eps);
        const int a = unit(rng) < eps ? random_action(rng)
                                      : res.table.greedy(s);
        step(layout, st, a);
        ++global_steps;
        ++agent_steps;
        const bool reached =
            st.alive && subgoal_reached(st, goal.box, goal.require);
        double r = shaped_reward(reached, a, {st.x + 0.5, st.y + 0.5},
                                 g_prev, g_next, cfg.reward);
        if (!st.alive) r -= cfg.reward.death_penalty;
        const bool done = reached || !st.alive;
        q_update(res.table, s, a, r, ss.encode(st), done);
        if (done) {
          success = reached ? 1 : 0;
          break;
        }
      }
    }
    res.outcomes.push_back(success);
    running_successes += success;
    if (res.outcomes.size() > static_cast<std::size_t>(cfg.window))
      running_successes -= res.outcomes[res.outcomes.size() - 1 - cfg.window];

    if (res.outcomes.size() >= static_cast<std::size_t>(cfg.window) &&
        static_cast<double>(running_successes) / cfg.window >
            cfg.learned_threshold) {
      // confirm the greedy policy solves the leg before declaring it learned
      EnvState vs = reset(layout);
      bool ok = true;
      for (int j = 0; j < k && ok; ++j)
        ok = run_leg_greedy(layout, ss, goals[plan[j]], lower_agents[j], vs,
                            cfg.step_cap, global_steps);
      if (ok && run_leg_greedy(layout, ss, goal, res.table, vs, cfg.step_cap,
                               global_steps)) {
        res.learned_at = global_steps;
        break;
      }
    }
  }
  if (!res.learned_at) res.status = TrainStatus::BudgetExhausted;
  res.steps_used = agent_steps;
  return res;
}

MetaPolicy meta_dagger(const RoomLayout& layout,
                       std::span<const TrainGoal> goals,
                       std::span<const int> plan,
                       std::span<const QTable> agents, int iterations,
                       unsigned seed) {
  StateSpace ss(layout);
  MetaPolicy policy;
  (void)seed;  // rollouts are deterministic: greedy agents, majority meta
  const long step_cap = 500;
  for (int it = 0; it < iterations; ++it) {
    EnvState st = reset(layout);
    int last_idx = -1;
    long unused = 0;
    while (last_idx + 1 < static_cast<int>(plan.size())) {
      const int expert = plan[last_idx + 1];
      const int choice = policy.knows(last_idx, st.has_key)
                             ? policy.predict(last_idx, st.has_key)
                             : expert;
      policy.dataset[{last_idx, st.has_key ? 1 : 0}][expert] += 1;
      if (choice != expert) break;  // wrong meta choice ends the episode
      const int step_idx = last_idx + 1;
      if (!run_leg_greedy(layout, ss, goals[plan[step_idx]],
                          agents[step_idx], st, step_cap, unused))
        break;
      last_idx = step_idx;
    }
  }
  return policy;
}

namespace {

TrainStats run_hierarchical(const RoomLayout& layout,
                            std::span<const TrainGoal> goals,
                            std::span<const int> plan, TrainConfig cfg) {
  cfg.reward.alpha = 0.0;
  cfg.reward.beta = 0.0;
  cfg.reward.gamma = 0.0;
  TrainStats stats;
  stats.learned_at.assign(plan.size(), std::nullopt);
  long global_steps = 0;
  std::vector<QTable> agents;
  std::vector<double> final_trailing(plan.size(), 0.0);
  for (int k = 0; k < static_cast<int>(plan.size()); ++k) {
    auto leg = train_low_level(layout, goals, plan, k, agents, cfg,
                               global_steps);
    stats.learned_at[k] = leg.learned_at;
    auto trail = trailing_performance(leg.outcomes, cfg.window);
    if (!trail.empty()) final_trailing[k] = trail.back();
    stats.trail_log.emplace_back(global_steps, final_trailing);
    agents.push_back(std::move(leg.table));
    if (leg.status == TrainStatus::BudgetExhausted) {
      stats.status = TrainStatus::BudgetExhausted;
      break;
    }
  }
  if (stats.status == TrainStatus::Completed)
    meta_dagger(layout, goals, plan, agents, 3, cfg.seed);
  stats.total_steps = global_steps;
  return stats;
}

TrainStats run_flat(const RoomLayout& layout, std::span<const TrainGoal> goals,
                    std::span<const int> plan, const TrainConfig& cfg) {
  StateSpace ss(layout);
  const int n_steps = static_cast<int>(plan.size());
  QTable table(ss.size() * n_steps, kNumActions, cfg.lr, cfg.discount);
  auto encode = [&](const EnvState& s, int idx) {
    return ss.encode(s) * n_steps + std::min(idx, n_steps - 1);
  };

  std::mt19937 rng(cfg.seed * 2654435761u + 104729u);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> random_action(0, kNumActions - 1);

  TrainStats stats;
  stats.learned_at.assign(plan.size(), std::nullopt);
  std::vector<std::vector<int>> outcomes(plan.size());
  std::vector<long> running(plan.size(), 0);
  long global_steps = 0;

  while (global_steps < cfg.budget) {
    EnvState st = reset(layout);
    int idx = 0;
    long attempt_steps = 0;
    while (global_steps < cfg.budget) {
      const TrainGoal& goal = goals[plan[idx]];
      const Point g_next = goal_center(goal);
      const Point g_prev = prev_point(layout, goals, plan, idx);
      const int s = encode(st, idx);
      const double eps = epsilon(global_steps, cfg.eps);
      const int a =
          unit(rng) < eps ? random_action(rng) : table.greedy(s);
      step(layout, st, a);
      ++global_steps;
      ++attempt_steps;
      const bool reached =
          st.alive && subgoal_reached(st, goal.box, goal.require);
      double r = shaped_reward(reached, a, {st.x + 0.5, st.y + 0.5},
                               g_prev, g_next, cfg.reward);
      if (!st.alive) r -= cfg.reward.death_penalty;
      if (reached) {
        ++idx;
        attempt_steps = 0;
      }
      const bool done = !st.alive || idx == n_steps;
      q_update(table, s, a, r, encode(st, idx), done);
      if (done || attempt_steps >= cfg.step_cap) break;
    }
    // record which plan steps this episode achieved
    std::vector<double> trail_row(plan.size(), 0.0);
    for (int k = 0; k < n_steps; ++k) {
      const int success = idx > k ? 1 : 0;
      outcomes[k].push_back(success);
      running[k] += success;
      if (outcomes[k].size() > static_cast<std::size_t>(cfg.window))
        running[k] -= outcomes[k][outcomes[k].size() - 1 - cfg.window];
      const double denom =
          std::min<std::size_t>(outcomes[k].size(), cfg.window);
      trail_row[k] = running[k] / denom;
      if (!stats.learned_at[k] &&
          outcomes[k].size() >= static_cast<std::size_t>(cfg.window) &&
          trail_row[k] > cfg.learned_threshold)
        stats.learned_at[k] = global_steps;
    }
    if (outcomes[0].size() % 50 == 0)
      stats.trail_log.emplace_back(global_steps, trail_row);
  }
  stats.total_steps = global_steps;
  if (!stats.learned_at.empty() && !stats.learned_at.back())
    stats.status = TrainStatus::BudgetExhausted;
  return stats;
}

}  // namespace

TrainStats run_experiment(const std::string& variant,
                          const RoomLayout& layout,
                          std::span<const TrainGoal> goals,
                          std::span<const int> plan, const TrainConfig& cfg) {
  if (variant == "fullmodel") return run_hierarchical(layout, goals, plan, cfg);
  TrainConfig flat_cfg = cfg;
  flat_cfg.reward.alpha = 0.0;
  flat_cfg.reward.beta = 0.0;
  flat_cfg.reward.gamma = 0.0;
  // The sub-goal bonus is the hierarchical critic's intrinsic reward; the
  // flat baselines see only their named dense term.
  flat_cfg.reward.subgoal_bonus = 0.0;
  if (variant == "singlegoal")
    flat_cfg.reward.gamma = 1.0;
  else if (variant == "singledist")
    flat_cfg.reward.beta = 1.0;
  else if (variant == "singledir")
    flat_cfg.reward.alpha = 1.0;
  else
    throw UnknownVariant(variant);
  return run_flat(layout, goals, plan, flat_cfg);
}

void write_stats_csv(const TrainStats& stats, std::ostream& out) {
  const std::size_t n =
      stats.trail_log.empty() ? stats.learned_at.size()
                              : stats.trail_log.front().second.size();
  out << "step";
  for (std::size_t k = 0; k < n; ++k) out << ",trail_" << k;
  out << "\n";
  for (const auto& [step, trail] : stats.trail_log) {
    out << step;
    for (double v : trail) out << ',' << v;
    out << "\n";
  }
}

void write_learned_at_csv(const TrainStats& stats, std::ostream& out) {
  out << "plan_step,learned_at\n";
  for (std::size_t k = 0; k < stats.learned_at.size(); ++k) {
    out << k << ',';
    if (stats.learned_at[k]) out << *stats.learned_at[k];
    out << "\n";
  }
}

}  // namespace gazerl
