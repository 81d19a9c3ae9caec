#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "gazerl/events.hpp"
#include "gazerl/subgoals.hpp"

namespace gazerl {

/// Gaze feature vector over a time window plus the next sub-goal actually
/// pursued. Layout: 4 features per AOI, concatenated by AOI id:
/// [total_look_ms, most_recently_looked_at, glance_count, first_glance_ms].
struct IntentSample {
  std::vector<double> features;
  int label = -1;
};

/// One-vs-rest linear max-margin classifier over standardized features.
struct LinearIntentModel {
  std::vector<int> classes;  // ascending
  std::vector<std::vector<double>> weights;  // per class
  std::vector<double> bias;
  std::vector<double> mean;
  std::vector<double> scale;
};

struct CvResult {
  double mean_accuracy = 0.0;
  std::vector<double> fold_accuracy;
};

class SingleClass : public std::runtime_error {
 public:
  SingleClass() : std::runtime_error("training labels are uniform") {}
};

class DimensionMismatch : public std::runtime_error {
 public:
  DimensionMismatch() : std::runtime_error("feature length mismatch") {}
};

class TooFewSamples : public std::runtime_error {
 public:
  TooFewSamples() : std::runtime_error("too few samples for k folds") {}
};

/// Aggregates time-ordered AOI hits into the per-AOI feature vector.
std::vector<double> extract_features(std::span<const AoiHit> hits,
                                     int n_aois);

/// Hinge-loss stochastic subgradient training, deterministic given the seed.
LinearIntentModel train(std::span<const IntentSample> samples, double reg,
                        int epochs, unsigned seed);

/// Argmax of per-class scores; ties go to the smaller class id.
int predict(const LinearIntentModel& model, std::span<const double> features);

/// Stratified k-fold cross-validation; every sample is tested exactly once.
CvResult cross_validate(std::span<const IntentSample> samples, int k,
                        double reg, int epochs, unsigned seed);

/// Builds intent samples from one room-filtered episode: features over the
/// span since the previous sub-goal was reached, labeled by the next goal.
std::vector<IntentSample> build_intent_dataset(const EpisodeLog& log,
                                               const SubGoalSet& aois,
                                               double velocity_threshold =
                                                   30.0,
                                               double px_per_degree = 10.0);

void save_model(const LinearIntentModel& model, std::ostream& out);
LinearIntentModel load_model(std::istream& in);

}  // namespace gazerl
