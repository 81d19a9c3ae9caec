#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gazerl/episode.hpp"

namespace gazerl {

/// Parameters of the bundled synthetic gaze dataset: 7 planted areas of
/// interest traversed in a 12-step pattern, three episodes, one of them
/// with a corrupted (shortened) visit order to exercise the majority vote.
struct SyntheticSpec {
  int frame_width = 160;
  int frame_height = 210;
  std::vector<std::pair<int, int>> aoi_centers = {
      {30, 30}, {130, 30}, {80, 80}, {30, 130},
      {130, 130}, {80, 180}, {130, 190}};
  // gaze sample count per AOI, descending so extracted ids match plan ids
  std::vector<int> aoi_samples = {300, 280, 260, 240, 220, 200, 180};
  std::vector<int> plan = {0, 1, 2, 3, 4, 5, 4, 3, 2, 1, 0, 6};
  int dwell_frames = 30;  // frames the agent sits on each plan step
  int n_episodes = 3;
};

/// Deterministic given the seed. Episode 3 skips one plan step.
std::vector<EpisodeLog> gen_synthetic(const SyntheticSpec& spec,
                                      unsigned seed);

/// Writes the episodes as ep<N>.log into the directory.
void write_synthetic(const std::string& dir, const SyntheticSpec& spec,
                     unsigned seed);

}  // namespace gazerl
