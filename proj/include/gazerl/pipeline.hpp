#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace gazerl {

struct PipelineConfig {
  // paths
  std::string logs_dir;
  std::string out_dir = "out";
  std::string layout;    // training room layout (cell grid)
  std::string plan;      // training plan (step ids)
  std::string subgoals;  // training sub-goals in cell coordinates
  int room = 1;
  int level = 0;
  int frame_width = 160;
  int frame_height = 210;
  // saliency
  double sigma_px = 10.0;
  double threshold = 0.4;
  double px_per_degree = 10.0;
  // proposals
  double nms_iou = 0.3;
  int agent_w = 8;
  int agent_h = 20;
  // intention prediction
  int intent_k = 10;
  double intent_reg = 1e-3;
  int intent_epochs = 200;
  // hierarchical training
  std::string variant = "fullmodel";
  long budget = 300000;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double tau = 0.001;
  unsigned seed = 1;
  bool force = false;
};

class StageFailed : public std::runtime_error {
 public:
  StageFailed(const std::string& stage, const std::string& cause);
  std::string stage;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// key=value lines, '#' comments. Unknown keys are rejected.
PipelineConfig load_config(std::istream& in);
void apply_overrides(PipelineConfig& cfg,
                     const std::map<std::string, std::string>& kv);

struct Manifest {
  std::vector<std::pair<std::string, std::string>> entries;  // path, hash
};

/// FNV-1a 64-bit content hash, hex encoded.
std::string hash_file(const std::string& path);

/// Runs ingest -> saliency -> extract -> match -> features -> train-intent ->
/// train-hrl, skipping stages whose outputs already exist unless cfg.force.
/// Writes out_dir/manifest.txt and returns the manifest.
Manifest run_pipeline(const PipelineConfig& cfg);

/// Human-readable summary of a pipeline run (goal count, plan, CV accuracy,
/// learned-at steps).
std::string emit_report(const Manifest& manifest, const PipelineConfig& cfg);

}  // namespace gazerl
