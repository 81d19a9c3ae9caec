#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gazerl/episode.hpp"
#include "gazerl/saliency.hpp"

namespace gazerl {

/// Axis-aligned scored box, top-left corner + size, pixel (or cell) units.
struct BoxProposal {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
  double score = 0.0;

  bool contains(double px, double py) const {
    return px >= x && px < x + w && py >= y && py < y + h;
  }
  double cx() const { return x + w / 2.0; }
  double cy() const { return y + h / 2.0; }
};

/// Deduplicated sub-goal boxes; index in `boxes` is the sub-goal id.
struct SubGoalSet {
  std::vector<BoxProposal> boxes;
};

struct OrderedPlan {
  std::vector<int> steps;         // visit order, revisits allowed
  std::vector<int> unique_goals;  // distinct ids, ascending
};

class EmptyInput : public std::runtime_error {
 public:
  EmptyInput() : std::runtime_error("empty input") {}
};

double iou(const BoxProposal& a, const BoxProposal& b);

/// One agent-sized box centered on each mask cell, clipped to the frame.
std::vector<BoxProposal> propose(std::span<const MaskCell> mask, int agent_w,
                                 int agent_h, int frame_w, int frame_h);

/// Greedy NMS by descending score (ties by smaller y, then x), followed by
/// merging still-overlapping survivors into their bounding hull until no
/// kept pair overlaps. Merged score is the max of the merged boxes.
std::vector<BoxProposal> nms_merge(std::vector<BoxProposal> proposals,
                                   double iou_threshold);

/// Concatenates all per-episode sets and runs nms_merge once more; resulting
/// ids are assigned in descending score order.
SubGoalSet merge_across_episodes(const std::vector<SubGoalSet>& per_episode,
                                 double iou_threshold);

/// Visit order of sub-goals along the agent trajectory (consecutive
/// duplicates collapsed, revisits preserved).
std::vector<int> match_trajectory(const EpisodeLog& log,
                                  const SubGoalSet& goals);

/// Like match_trajectory, but each visit is paired with the frame index of
/// its first containing frame.
std::vector<std::pair<int, std::int64_t>> match_trajectory_frames(
    const EpisodeLog& log, const SubGoalSet& goals);

/// Positional majority vote over the sequences of modal length.
OrderedPlan majority_vote(const std::vector<std::vector<int>>& orders);

void write_subgoals_json(const SubGoalSet& goals, std::ostream& out);
SubGoalSet read_subgoals_json(std::istream& in);

void write_plan(const OrderedPlan& plan, std::ostream& out);
std::vector<int> read_plan(std::istream& in);

}  // namespace gazerl
