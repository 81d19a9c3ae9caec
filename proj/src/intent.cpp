#include "gazerl/intent.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <set>

namespace gazerl {

std::vector<double> extract_features(std::span<const AoiHit> hits,
                                     int n_aois) {
  std::vector<double> f(static_cast<std::size_t>(n_aois) * 4, 0.0);
  auto total = [&](int a) -> double& { return f[a * 4 + 0]; };
  auto recent = [&](int a) -> double& { return f[a * 4 + 1]; };
  auto glances = [&](int a) -> double& { return f[a * 4 + 2]; };
  auto first = [&](int a) -> double& { return f[a * 4 + 3]; };

  int prev_aoi = -1;
  std::vector<bool> seen_first(n_aois, false);
  double run_duration = 0.0;
  for (const auto& h : hits) {
    if (h.aoi_id < 0 || h.aoi_id >= n_aois) continue;
    total(h.aoi_id) += h.duration();
    if (h.aoi_id != prev_aoi) {
      // a new maximal run of consecutive hits on this AOI starts here
      if (prev_aoi >= 0 && !seen_first[prev_aoi]) {
        first(prev_aoi) = run_duration;
        seen_first[prev_aoi] = true;
      }
      glances(h.aoi_id) += 1.0;
      run_duration = 0.0;
    }
    run_duration += h.duration();
    prev_aoi = h.aoi_id;
  }
  if (prev_aoi >= 0) {
    if (!seen_first[prev_aoi]) first(prev_aoi) = run_duration;
    recent(prev_aoi) = 1.0;
  }
  return f;
}

namespace {

std::vector<double> standardized(const LinearIntentModel& m,
                                 std::span<const double> x) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out[i] = (x[i] - m.mean[i]) / m.scale[i];
  return out;
}

}  // namespace

LinearIntentModel train(std::span<const IntentSample> samples, double reg,
                        int epochs, unsigned seed) {
  if (samples.empty()) throw SingleClass();
  const std::size_t dim = samples[0].features.size();
  std::set<int> label_set;
  for (const auto& s : samples) {
    if (s.features.size() != dim) throw DimensionMismatch();
    label_set.insert(s.label);
  }
  if (label_set.size() < 2) throw SingleClass();

  LinearIntentModel model;
  model.classes.assign(label_set.begin(), label_set.end());
  model.mean.assign(dim, 0.0);
  model.scale.assign(dim, 1.0);
  for (const auto& s : samples)
    for (std::size_t i = 0; i < dim; ++i) model.mean[i] += s.features[i];
  for (auto& m : model.mean) m /= static_cast<double>(samples.size());
  std::vector<double> var(dim, 0.0);
  for (const auto& s : samples)
    for (std::size_t i = 0; i < dim; ++i) {
      double d = s.features[i] - model.mean[i];
      var[i] += d * d;
    }
  for (std::size_t i = 0; i < dim; ++i) {
    double sd = std::sqrt(var[i] / static_cast<double>(samples.size()));
    model.scale[i] = sd > 0.0 ? sd : 1.0;  // constant features pass through
  }

  std::vector<std::vector<double>> x;
  x.reserve(samples.size());
  for (const auto& s : samples) x.push_back(standardized(model, s.features));

  const double lr = 0.05;
  std::mt19937 rng(seed);
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  model.weights.assign(model.classes.size(), std::vector<double>(dim, 0.0));
  model.bias.assign(model.classes.size(), 0.0);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t idx : order) {
      for (std::size_t c = 0; c < model.classes.size(); ++c) {
        const double y = samples[idx].label == model.classes[c] ? 1.0 : -1.0;
        auto& w = model.weights[c];
        double score = model.bias[c];
        for (std::size_t i = 0; i < dim; ++i) score += w[i] * x[idx][i];
        const double decay = 1.0 - lr * reg;
        if (y * score < 1.0) {
          for (std::size_t i = 0; i < dim; ++i)
            w[i] = decay * w[i] + lr * y * x[idx][i];
          model.bias[c] += lr * y;
        } else {
          for (auto& wi : w) wi *= decay;
        }
      }
    }
  }
  return model;
}

int predict(const LinearIntentModel& model, std::span<const double> features) {
  if (features.size() != model.mean.size()) throw DimensionMismatch();
  auto x = standardized(model, features);
  int best_class = model.classes.front();
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    double score = model.bias[c];
    for (std::size_t i = 0; i < x.size(); ++i)
      score += model.weights[c][i] * x[i];
    if (score > best_score) {  // ties keep the smaller class id
      best_score = score;
      best_class = model.classes[c];
    }
  }
  return best_class;
}

CvResult cross_validate(std::span<const IntentSample> samples, int k,
                        double reg, int epochs, unsigned seed) {
  if (k < 2 || samples.size() < static_cast<std::size_t>(k))
    throw TooFewSamples();

  // stratified shuffle split: shuffle within each label, deal round-robin
  std::map<int, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < samples.size(); ++i)
    by_label[samples[i].label].push_back(i);
  std::mt19937 rng(seed);
  std::vector<int> fold_of(samples.size(), 0);
  int next_fold = 0;
  for (auto& [label, idxs] : by_label) {
    std::shuffle(idxs.begin(), idxs.end(), rng);
    for (std::size_t i : idxs) {
      fold_of[i] = next_fold;
      next_fold = (next_fold + 1) % k;
    }
  }

  CvResult result;
  for (int fold = 0; fold < k; ++fold) {
    std::vector<IntentSample> train_set;
    std::vector<std::size_t> test_idx;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (fold_of[i] == fold)
        test_idx.push_back(i);
      else
        train_set.push_back(samples[i]);
    }
    auto model = train(train_set, reg, epochs, seed + fold + 1);
    int correct = 0;
    for (std::size_t i : test_idx)
      if (predict(model, samples[i].features) == samples[i].label) ++correct;
    result.fold_accuracy.push_back(
        test_idx.empty() ? 0.0
                         : double(correct) / double(test_idx.size()));
  }
  result.mean_accuracy =
      std::accumulate(result.fold_accuracy.begin(),
                      result.fold_accuracy.end(), 0.0) /
      static_cast<double>(result.fold_accuracy.size());
  return result;
}

std::vector<IntentSample> build_intent_dataset(const EpisodeLog& log,
                                               const SubGoalSet& aois,
                                               double velocity_threshold,
                                               double px_per_degree) {
  std::vector<GazeSample> all;
  std::vector<double> frame_time(log.frames.size(), 0.0);
  double t = 0.0;
  for (std::size_t i = 0; i < log.frames.size(); ++i) {
    if (!log.frames[i].gaze.empty()) t = log.frames[i].gaze.front().t;
    frame_time[i] = t;
    t += 1000.0 / 60.0;
    for (const auto& g : log.frames[i].gaze) all.push_back(g);
  }
  if (all.size() < 2) return {};
  auto events = detect_events(all, velocity_threshold, px_per_degree);
  auto hits = aoi_hits(events, aois);
  auto visits = match_trajectory_frames(log, aois);

  std::map<std::int64_t, std::size_t> frame_pos;
  for (std::size_t i = 0; i < log.frames.size(); ++i)
    frame_pos[log.frames[i].frame_index] = i;

  std::vector<IntentSample> out;
  double window_start = 0.0;
  const int n_aois = static_cast<int>(aois.boxes.size());
  for (const auto& [goal, frame] : visits) {
    auto it = frame_pos.find(frame);
    if (it == frame_pos.end()) continue;
    const double window_end = frame_time[it->second];
    std::vector<AoiHit> in_window;
    for (const auto& h : hits)
      if (h.t_start >= window_start && h.t_start < window_end)
        in_window.push_back(h);
    IntentSample s;
    s.features = extract_features(in_window, n_aois);
    s.label = goal;
    out.push_back(std::move(s));
    window_start = window_end;
  }
  return out;
}

void save_model(const LinearIntentModel& model, std::ostream& out) {
  out << model.classes.size() << ' ' << model.mean.size() << "\n";
  auto row = [&](const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i)
      out << (i ? " " : "") << v[i];
    out << "\n";
  };
  out.precision(17);
  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    out << model.classes[c] << ' ' << model.bias[c] << "\n";
    row(model.weights[c]);
  }
  row(model.mean);
  row(model.scale);
}

LinearIntentModel load_model(std::istream& in) {
  LinearIntentModel m;
  std::size_t n_classes = 0, dim = 0;
  in >> n_classes >> dim;
  m.classes.resize(n_classes);
  m.bias.resize(n_classes);
  m.weights.assign(n_classes, std::vector<double>(dim));
  auto row = [&](std::vector<double>& v) {
    for (auto& x : v) in >> x;
  };
  for (std::size_t c = 0; c < n_classes; ++c) {
    in >> m.classes[c] >> m.bias[c];
    row(m.weights[c]);
  }
  m.mean.resize(dim);
  m.scale.resize(dim);
  row(m.mean);
  row(m.scale);
  return m;
}

}  // namespace gazerl
