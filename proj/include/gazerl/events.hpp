#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "gazerl/episode.hpp"
#include "gazerl/subgoals.hpp"

namespace gazerl {

enum class EventKind { Fixation, Saccade };

struct GazeEvent {
  EventKind kind = EventKind::Fixation;
  double t_start = 0.0;
  double t_end = 0.0;
  double cx = 0.0;
  double cy = 0.0;

  double duration() const { return t_end - t_start; }
};

/// A fixation landing inside an area of interest.
struct AoiHit {
  int aoi_id = -1;
  double t_start = 0.0;
  double t_end = 0.0;

  double duration() const { return t_end - t_start; }
};

class InsufficientSamples : public std::runtime_error {
 public:
  InsufficientSamples()
      : std::runtime_error("need at least 2 gaze samples") {}
};

/// I-VT segmentation: inter-sample segments below the angular velocity
/// threshold form fixations, the rest saccades. Fixations shorter than
/// min_fixation_ms are folded into the surrounding saccades. Events
/// partition [t_first, t_last].
std::vector<GazeEvent> detect_events(std::span<const GazeSample> samples,
                                     double velocity_threshold_deg_s = 30.0,
                                     double px_per_degree = 10.0,
                                     double min_fixation_ms = 100.0);

/// One hit per fixation whose centroid lies in an AOI box; overlap ties go
/// to the AOI with the higher saliency score.
std::vector<AoiHit> aoi_hits(std::span<const GazeEvent> events,
                             const SubGoalSet& aois);

}  // namespace gazerl
