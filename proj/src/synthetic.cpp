#include "gazerl/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

namespace gazerl {

namespace {

constexpr double kFrameMs = 1000.0 / 60.0;
constexpr int kRunsPerAoi = 6;

// One contiguous burst of gaze on a single AOI; bursts are long and slow
// enough to register as fixations.
struct GazeRun {
  int aoi = 0;
  int samples = 0;
};

std::vector<int> episode_order(const SyntheticSpec& spec, int episode) {
  std::vector<int> order = spec.plan;
  if (episode == spec.n_episodes - 1 && order.size() > 3)
    order.erase(order.begin() + 3);  // corrupted episode skips one step
  return order;
}

}  // namespace

std::vector<EpisodeLog> gen_synthetic(const SyntheticSpec& spec,
                                      unsigned seed) {
  std::vector<EpisodeLog> episodes;
  for (int e = 0; e < spec.n_episodes; ++e) {
    std::mt19937 rng(seed * 7919u + static_cast<unsigned>(e) * 131u + 17u);
    std::uniform_int_distribution<int> tri(-1, 1);

    const auto order = episode_order(spec, e);
    const int n_frames = static_cast<int>(order.size()) * spec.dwell_frames;

    EpisodeLog log;
    log.episode_id = "synthetic-" + std::to_string(e + 1);
    log.frame_width = spec.frame_width;
    log.frame_height = spec.frame_height;
    log.frames.resize(n_frames);
    for (int i = 0; i < n_frames; ++i) {
      FrameRecord& fr = log.frames[i];
      fr.frame_index = i;
      fr.action = i % 8;
      const int segment = i / spec.dwell_frames;
      fr.state.agent_x = spec.aoi_centers[order[segment]].first;
      fr.state.agent_y = spec.aoi_centers[order[segment]].second;
      fr.state.room_id = 1;
      fr.state.level = 0;
      fr.state.keys = 0;
    }

    // interleave fixation bursts over all AOIs, round-robin
    std::vector<GazeRun> runs;
    for (int r = 0; r < kRunsPerAoi; ++r) {
      for (std::size_t k = 0; k < spec.aoi_centers.size(); ++k) {
        const int n = spec.aoi_samples[k];
        int count = n / kRunsPerAoi + (r < n % kRunsPerAoi ? 1 : 0);
        if (count > 0) runs.push_back({static_cast<int>(k), count});
      }
    }
    long total = 0;
    for (const auto& r : runs) total += r.samples;
    const double episode_ms = n_frames * kFrameMs;
    const double dt = episode_ms / static_cast<double>(total + 1);

    long m = 0;
    for (const auto& run : runs) {
      double ox = 0.0, oy = 0.0;  // slow drift keeps intra-run velocity low
      for (int i = 0; i < run.samples; ++i, ++m) {
        ox = std::clamp(ox + 0.5 * tri(rng), -4.0, 4.0);
        oy = std::clamp(oy + 0.5 * tri(rng), -4.0, 4.0);
        GazeSample g;
        g.t = m * dt;
        g.x = spec.aoi_centers[run.aoi].first + ox;
        g.y = spec.aoi_centers[run.aoi].second + oy;
        const int frame =
            std::min(static_cast<int>(g.t / kFrameMs), n_frames - 1);
        log.frames[frame].gaze.push_back(g);
      }
    }
    episodes.push_back(std::move(log));
  }
  return episodes;
}

void write_synthetic(const std::string& dir, const SyntheticSpec& spec,
                     unsigned seed) {
  std::filesystem::create_directories(dir);
  auto episodes = gen_synthetic(spec, seed);
  for (std::size_t i = 0; i < episodes.size(); ++i) {
    std::ofstream out(dir + "/ep" + std::to_string(i + 1) + ".log");
    serialize_episode_log(episodes[i], out);
  }
}

}  // namespace gazerl
