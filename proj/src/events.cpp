#include "gazerl/events.hpp"

#include <cmath>
#include <limits>

namespace gazerl {

namespace {

// angular velocity (deg/s) of the segment between two samples
double segment_velocity(const GazeSample& a, const GazeSample& b,
                        double px_per_degree) {
  const double dist_px = std::hypot(b.x - a.x, b.y - a.y);
  const double dt_s = (b.t - a.t) / 1000.0;
  if (dt_s <= 0.0)
    return dist_px > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return (dist_px / px_per_degree) / dt_s;
}

struct Run {
  bool saccade;
  std::size_t first_seg;
  std::size_t last_seg;  // inclusive
};

std::vector<Run> merge_runs(const std::vector<bool>& saccade) {
  std::vector<Run> runs;
  for (std::size_t i = 0; i < saccade.size(); ++i) {
    if (!runs.empty() && runs.back().saccade == saccade[i])
      runs.back().last_seg = i;
    else
      runs.push_back({saccade[i], i, i});
  }
  return runs;
}

}  // namespace

std::vector<GazeEvent> detect_events(std::span<const GazeSample> samples,
                                     double velocity_threshold_deg_s,
                                     double px_per_degree,
                                     double min_fixation_ms) {
  if (samples.size() < 2) throw InsufficientSamples();

  std::vector<bool> saccade(samples.size() - 1);
  for (std::size_t i = 0; i + 1 < samples.size(); ++i)
    saccade[i] = segment_velocity(samples[i], samples[i + 1],
                                  px_per_degree) >= velocity_threshold_deg_s;

  auto runs = merge_runs(saccade);

  // fold fixations below the minimum duration into adjacent saccades
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : runs) {
      if (r.saccade) continue;
      double dur = samples[r.last_seg + 1].t - samples[r.first_seg].t;
      if (dur < min_fixation_ms && runs.size() > 1) {
        for (std::size_t i = r.first_seg; i <= r.last_seg; ++i)
          saccade[i] = true;
        changed = true;
      }
    }
    if (changed) runs = merge_runs(saccade);
  }

  std::vector<GazeEvent> events;
  events.reserve(runs.size());
  for (const auto& r : runs) {
    GazeEvent e;
    e.kind = r.saccade ? EventKind::Saccade : EventKind::Fixation;
    e.t_start = samples[r.first_seg].t;
    e.t_end = samples[r.last_seg + 1].t;
    double sx = 0.0, sy = 0.0;
    const std::size_t n = r.last_seg + 2 - r.first_seg;
    for (std::size_t i = r.first_seg; i <= r.last_seg + 1; ++i) {
      sx += samples[i].x;
      sy += samples[i].y;
    }
    e.cx = sx / static_cast<double>(n);
    e.cy = sy / static_cast<double>(n);
    events.push_back(e);
  }
  return events;
}

std::vector<AoiHit> aoi_hits(std::span<const GazeEvent> events,
                             const SubGoalSet& aois) {
  std::vector<AoiHit> hits;
  for (const auto& e : events) {
    if (e.kind != EventKind::Fixation) continue;
    int best = -1;
    double best_score = -1.0;
    for (std::size_t i = 0; i < aois.boxes.size(); ++i) {
      const auto& b = aois.boxes[i];
      if (b.contains(e.cx, e.cy) && b.score > best_score) {
        best = static_cast<int>(i);
        best_score = b.score;
      }
    }
    if (best >= 0 && e.t_end > e.t_start)
      hits.push_back({best, e.t_start, e.t_end});
  }
  return hits;
}

}  // namespace gazerl
