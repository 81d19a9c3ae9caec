#include "gazerl/subgoals.hpp"

#include <algorithm>
#include <map>
#include <ostream>

#include "json.hpp"

namespace gazerl {

double iou(const BoxProposal& a, const BoxProposal& b) {
  const int ix1 = std::max(a.x, b.x);
  const int iy1 = std::max(a.y, b.y);
  const int ix2 = std::min(a.x + a.w, b.x + b.w);
  const int iy2 = std::min(a.y + a.h, b.y + b.h);
  const double iw = std::max(0, ix2 - ix1);
  const double ih = std::max(0, iy2 - iy1);
  const double inter = iw * ih;
  const double uni =
      double(a.w) * a.h + double(b.w) * b.h - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

std::vector<BoxProposal> propose(std::span<const MaskCell> mask, int agent_w,
                                 int agent_h, int frame_w, int frame_h) {
  std::vector<BoxProposal> out;
  out.reserve(mask.size());
  for (const auto& c : mask) {
    BoxProposal b;
    b.x = c.x - agent_w / 2;
    b.y = c.y - agent_h / 2;
    b.w = agent_w;
    b.h = agent_h;
    b.score = c.value;
    if (b.x < 0) {
      b.w += b.x;
      b.x = 0;
    }
    if (b.y < 0) {
      b.h += b.y;
      b.y = 0;
    }
    if (b.x + b.w > frame_w) b.w = frame_w - b.x;
    if (b.y + b.h > frame_h) b.h = frame_h - b.y;
    if (b.w > 0 && b.h > 0) out.push_back(b);
  }
  return out;
}

namespace {

bool score_order(const BoxProposal& a, const BoxProposal& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.y != b.y) return a.y < b.y;
  return a.x < b.x;
}

BoxProposal hull(const BoxProposal& a, const BoxProposal& b) {
  BoxProposal h;
  h.x = std::min(a.x, b.x);
  h.y = std::min(a.y, b.y);
  h.w = std::max(a.x + a.w, b.x + b.w) - h.x;
  h.h = std::max(a.y + a.h, b.y + b.h) - h.y;
  h.score = std::max(a.score, b.score);
  return h;
}

}  // namespace

std::vector<BoxProposal> nms_merge(std::vector<BoxProposal> proposals,
                                   double iou_threshold) {
  std::sort(proposals.begin(), proposals.end(), score_order);
  std::vector<BoxProposal> kept;
  for (const auto& p : proposals) {
    bool suppressed = false;
    for (const auto& k : kept) {
      if (iou(p, k) > iou_threshold) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(p);
  }
  // merge survivors that still overlap, to a fixed point
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t i = 0; i < kept.size() && !merged; ++i) {
      for (std::size_t j = i + 1; j < kept.size() && !merged; ++j) {
        if (iou(kept[i], kept[j]) > 0.0) {
          kept[i] = hull(kept[i], kept[j]);
          kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(j));
          merged = true;
        }
      }
    }
  }
  std::sort(kept.begin(), kept.end(), score_order);
  return kept;
}

SubGoalSet merge_across_episodes(const std::vector<SubGoalSet>& per_episode,
                                 double iou_threshold) {
  std::vector<BoxProposal> all;
  for (const auto& set : per_episode)
    all.insert(all.end(), set.boxes.begin(), set.boxes.end());
  SubGoalSet out;
  out.boxes = nms_merge(std::move(all), iou_threshold);
  return out;  // nms_merge already orders by descending score
}

std::vector<std::pair<int, std::int64_t>> match_trajectory_frames(
    const EpisodeLog& log, const SubGoalSet& goals) {
  std::vector<std::pair<int, std::int64_t>> visits;
  int last = -1;
  for (const auto& fr : log.frames) {
    int best = -1;
    double best_score = -1.0;
    for (std::size_t i = 0; i < goals.boxes.size(); ++i) {
      const auto& b = goals.boxes[i];
      if (b.contains(fr.state.agent_x, fr.state.agent_y) &&
          b.score > best_score) {
        best = static_cast<int>(i);
        best_score = b.score;
      }
    }
    if (best < 0) continue;  // frames outside all boxes are ignored
    if (best != last) visits.emplace_back(best, fr.frame_index);
    last = best;
  }
  return visits;
}

std::vector<int> match_trajectory(const EpisodeLog& log,
                                  const SubGoalSet& goals) {
  std::vector<int> order;
  for (const auto& [id, frame] : match_trajectory_frames(log, goals))
    order.push_back(id);
  return order;
}

OrderedPlan majority_vote(const std::vector<std::vector<int>>& orders) {
  if (orders.empty()) throw EmptyInput();
  // modal sequence length, ties to the smaller length
  std::map<std::size_t, int> length_counts;
  for (const auto& o : orders) ++length_counts[o.size()];
  std::size_t modal_len = 0;
  int best_count = 0;
  for (const auto& [len, count] : length_counts) {
    if (count > best_count) {
      best_count = count;
      modal_len = len;
    }
  }
  std::vector<int> voted;
  for (std::size_t pos = 0; pos < modal_len; ++pos) {
    std::map<int, int> counts;
    for (const auto& o : orders)
      if (o.size() == modal_len) ++counts[o[pos]];
    int best_id = -1;
    int best = 0;
    for (const auto& [id, count] : counts) {
      if (count > best) {  // std::map iterates ids ascending, ties keep smaller
        best = count;
        best_id = id;
      }
    }
    voted.push_back(best_id);
  }
  OrderedPlan plan;
  for (int id : voted)
    if (plan.steps.empty() || plan.steps.back() != id) plan.steps.push_back(id);
  plan.unique_goals = plan.steps;
  std::sort(plan.unique_goals.begin(), plan.unique_goals.end());
  plan.unique_goals.erase(
      std::unique(plan.unique_goals.begin(), plan.unique_goals.end()),
      plan.unique_goals.end());
  return plan;
}

void write_subgoals_json(const SubGoalSet& goals, std::ostream& out) {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t i = 0; i < goals.boxes.size(); ++i) {
    const auto& b = goals.boxes[i];
    arr.push_back({{"id", i},
                   {"x", b.x},
                   {"y", b.y},
                   {"w", b.w},
                   {"h", b.h},
                   {"score", b.score}});
  }
  out << arr.dump(2) << "\n";
}

SubGoalSet read_subgoals_json(std::istream& in) {
  nlohmann::json arr = nlohmann::json::parse(in);
  SubGoalSet goals;
  goals.boxes.resize(arr.size());
  for (const auto& item : arr) {
    std::size_t id = item.at("id").get<std::size_t>();
    if (id >= goals.boxes.size()) goals.boxes.resize(id + 1);
    BoxProposal& b = goals.boxes[id];
    b.x = item.at("x").get<int>();
    b.y = item.at("y").get<int>();
    b.w = item.at("w").get<int>();
    b.h = item.at("h").get<int>();
    b.score = item.at("score").get<double>();
  }
  return goals;
}

void write_plan(const OrderedPlan& plan, std::ostream& out) {
  for (std::size_t i = 0; i < plan.steps.size(); ++i)
    out << plan.steps[i] << (i + 1 == plan.steps.size() ? '\n' : ' ');
}

std::vector<int> read_plan(std::istream& in) {
  std::vector<int> steps;
  int v;
  while (in >> v) steps.push_back(v);
  return steps;
}

}  // namespace gazerl
