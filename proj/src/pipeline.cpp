#include "gazerl/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gazerl/episode.hpp"
#include "gazerl/hrl.hpp"
#include "gazerl/intent.hpp"
#include "gazerl/saliency.hpp"
#include "gazerl/subgoals.hpp"

namespace fs = std::filesystem;

namespace gazerl {

StageFailed::StageFailed(const std::string& stage_, const std::string& cause)
    : std::runtime_error("stage " + stage_ + " failed: " + cause),
      stage(stage_) {}

namespace {

bool set_field(PipelineConfig& cfg, const std::string& key,
               const std::string& value) {
  auto as_int = [&] { return std::stol(value); };
  auto as_double = [&] { return std::stod(value); };
  if (key == "logs_dir") cfg.logs_dir = value;
  else if (key == "out_dir") cfg.out_dir = value;
  else if (key == "layout") cfg.layout = value;
  else if (key == "plan") cfg.plan = value;
  else if (key == "subgoals") cfg.subgoals = value;
  else if (key == "room") cfg.room = static_cast<int>(as_int());
  else if (key == "level") cfg.level = static_cast<int>(as_int());
  else if (key == "frame_width") cfg.frame_width = static_cast<int>(as_int());
  else if (key == "frame_height") cfg.frame_height = static_cast<int>(as_int());
  else if (key == "sigma_px") cfg.sigma_px = as_double();
  else if (key == "threshold") cfg.threshold = as_double();
  else if (key == "px_per_degree") cfg.px_per_degree = as_double();
  else if (key == "nms_iou") cfg.nms_iou = as_double();
  else if (key == "agent_w") cfg.agent_w = static_cast<int>(as_int());
  else if (key == "agent_h") cfg.agent_h = static_cast<int>(as_int());
  else if (key == "intent_k") cfg.intent_k = static_cast<int>(as_int());
  else if (key == "intent_reg") cfg.intent_reg = as_double();
  else if (key == "intent_epochs") cfg.intent_epochs = static_cast<int>(as_int());
  else if (key == "variant") cfg.variant = value;
  else if (key == "budget") cfg.budget = as_int();
  else if (key == "alpha") cfg.alpha = as_double();
  else if (key == "beta") cfg.beta = as_double();
  else if (key == "gamma") cfg.gamma = as_double();
  else if (key == "tau") cfg.tau = as_double();
  else if (key == "seed") cfg.seed = static_cast<unsigned>(as_int());
  else if (key == "force") cfg.force = value == "1" || value == "true";
  else return false;
  return true;
}

}  // namespace

PipelineConfig load_config(std::istream& in) {
  PipelineConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\r' ||
                             line.back() == '\t'))
      line.pop_back();
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key=value");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (!set_field(cfg, key, value))
      throw ConfigError("unknown config key: " + key);
  }
  return cfg;
}

void apply_overrides(PipelineConfig& cfg,
                     const std::map<std::string, std::string>& kv) {
  for (const auto& [key, value] : kv)
    if (!set_field(cfg, key, value))
      throw ConfigError("unknown config key: " + key);
}

std::string hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot hash missing file: " + path);
  std::uint64_t h = 14695981039346656037ull;
  char buf[4096];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
    if (!in) break;
  }
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

namespace {

struct PipelineState {
  std::vector<EpisodeLog> logs;             // room-filtered
  std::vector<std::string> artifacts;       // relative to out_dir, in order
};

std::string out_path(const PipelineConfig& cfg, const std::string& name) {
  return (fs::path(cfg.out_dir) / name).string();
}

bool outputs_exist(const PipelineConfig& cfg,
                   const std::vector<std::string>& names) {
  if (cfg.force) return false;
  for (const auto& n : names)
    if (!fs::exists(out_path(cfg, n))) return false;
  return true;
}

void stage_ingest(const PipelineConfig& cfg, PipelineState& st) {
  if (!fs::is_directory(cfg.logs_dir))
    throw StageFailed("ingest", "logs dir not found: " + cfg.logs_dir);
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(cfg.logs_dir))
    if (entry.path().extension() == ".log")
      files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw StageFailed("ingest", "no .log files");
  std::ostringstream summary;
  for (const auto& f : files) {
    std::ifstream in(f);
    try {
      auto log = parse_episode_log(in, cfg.frame_width, cfg.frame_height);
      auto filtered = filter_by_room(log, cfg.room, cfg.level);
      auto rep = validate_log(filtered);
      summary << filtered.episode_id << " frames=" << rep.frames
              << " gaze=" << rep.gaze_samples
              << " dropped=" << rep.dropped_samples
              << " index_violations=" << rep.index_violations << "\n";
      if (!filtered.frames.empty()) st.logs.push_back(std::move(filtered));
    } catch (const ParseError& e) {
      throw StageFailed("ingest", f + ": " + e.what());
    }
  }
  if (st.logs.empty())
    throw StageFailed("ingest", "no frames left after room filter");
  if (!outputs_exist(cfg, {"ingest.txt"})) {
    std::ofstream out(out_path(cfg, "ingest.txt"));
    out << summary.str();
  }
  st.artifacts.push_back("ingest.txt");
}

std::vector<SaliencyMap> stage_saliency(const PipelineConfig& cfg,
                                        PipelineState& st) {
  std::vector<SaliencyMap> maps;
  for (const auto& log : st.logs) {
    auto map = normalize(gaussian_blur(fixation_map(log), cfg.sigma_px));
    const std::string name = log.episode_id + ".pgm";
    if (!outputs_exist(cfg, {name})) {
      std::ofstream out(out_path(cfg, name));
      write_pgm(map, out);
    }
    st.artifacts.push_back(name);
    maps.push_back(std::move(map));
  }
  return maps;
}

void stage_extract(const PipelineConfig& cfg, PipelineState& st,
                   const std::vector<SaliencyMap>& maps) {
  if (outputs_exist(cfg, {"subgoals.json"})) {
    st.artifacts.push_back("subgoals.json");
    return;
  }
  std::vector<SubGoalSet> per_episode;
  for (const auto& map : maps) {
    auto mask = threshold_mask(map, cfg.threshold);
    auto boxes = propose(mask, cfg.agent_w, cfg.agent_h, map.width,
                         map.height);
    SubGoalSet set;
    set.boxes = nms_merge(std::move(boxes), cfg.nms_iou);
    per_episode.push_back(std::move(set));
  }
  auto goals = merge_across_episodes(per_episode, cfg.nms_iou);
  std::ofstream out(out_path(cfg, "subgoals.json"));
  write_subgoals_json(goals, out);
  st.artifacts.push_back("subgoals.json");
}

SubGoalSet load_extracted_goals(const PipelineConfig& cfg,
                                const char* stage) {
  std::ifstream in(out_path(cfg, "subgoals.json"));
  if (!in) throw StageFailed(stage, "subgoals.json missing");
  return read_subgoals_json(in);
}

void stage_match(const PipelineConfig& cfg, PipelineState& st) {
  if (!outputs_exist(cfg, {"plan.txt", "orders.txt"})) {
    auto goals = load_extracted_goals(cfg, "match");
    std::vector<std::vector<int>> orders;
    std::ostringstream orders_text;
    for (const auto& log : st.logs) {
      auto order = match_trajectory(log, goals);
      orders_text << log.episode_id << ":";
      for (int id : order) orders_text << ' ' << id;
      orders_text << "\n";
      orders.push_back(std::move(order));
    }
    OrderedPlan plan;
    try {
      plan = majority_vote(orders);
    } catch (const EmptyInput& e) {
      throw StageFailed("match", e.what());
    }
    std::ofstream pout(out_path(cfg, "plan.txt"));
    write_plan(plan, pout);
    std::ofstream oout(out_path(cfg, "orders.txt"));
    oout << orders_text.str();
  }
  st.artifacts.push_back("plan.txt");
  st.artifacts.push_back("orders.txt");
}

void stage_features(const PipelineConfig& cfg, PipelineState& st) {
  if (!outputs_exist(cfg, {"features.csv"})) {
    auto goals = load_extracted_goals(cfg, "features");
    std::ofstream out(out_path(cfg, "features.csv"));
    const int n = static_cast<int>(goals.boxes.size());
    for (int a = 0; a < n; ++a)
      out << "total_" << a << ",recent_" << a << ",glances_" << a
          << ",first_" << a << ",";
    out << "label\n";
    out.precision(17);
    for (const auto& log : st.logs) {
      for (const auto& sample :
           build_intent_dataset(log, goals, 30.0, cfg.px_per_degree)) {
        for (double f : sample.features) out << f << ',';
        out << sample.label << "\n";
      }
    }
  }
  st.artifacts.push_back("features.csv");
}

std::vector<IntentSample> load_features(const PipelineConfig& cfg,
                                        const char* stage) {
  std::ifstream in(out_path(cfg, "features.csv"));
  if (!in) throw StageFailed(stage, "features.csv missing");
  std::vector<IntentSample> samples;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    IntentSample s;
    std::stringstream row(line);
    std::string tok;
    std::vector<double> vals;
    while (std::getline(row, tok, ',')) vals.push_back(std::stod(tok));
    if (vals.empty()) continue;
    s.label = static_cast<int>(vals.back());
    vals.pop_back();
    s.features = std::move(vals);
    samples.push_back(std::move(s));
  }
  return samples;
}

void stage_train_intent(const PipelineConfig& cfg, PipelineState& st) {
  if (!outputs_exist(cfg, {"folds.csv", "intent_model.txt"})) {
    auto samples = load_features(cfg, "train-intent");
    try {
      auto cv = cross_validate(samples, cfg.intent_k, cfg.intent_reg,
                               cfg.intent_epochs, cfg.seed);
      std::ofstream fout(out_path(cfg, "folds.csv"));
      fout << "fold,accuracy\n";
      fout.precision(17);
      for (std::size_t i = 0; i < cv.fold_accuracy.size(); ++i)
        fout << i << ',' << cv.fold_accuracy[i] << "\n";
      fout << "mean," << cv.mean_accuracy << "\n";
      auto model = train(samples, cfg.intent_reg, cfg.intent_epochs, cfg.seed);
      std::ofstream mout(out_path(cfg, "intent_model.txt"));
      save_model(model, mout);
    } catch (const std::runtime_error& e) {
      throw StageFailed("train-intent", e.what());
    }
  }
  st.artifacts.push_back("folds.csv");
  st.artifacts.push_back("intent_model.txt");
}

void stage_train_hrl(const PipelineConfig& cfg, PipelineState& st) {
  if (cfg.layout.empty() || cfg.plan.empty() || cfg.subgoals.empty())
    return;  // training assets not configured; analysis-only run
  if (!outputs_exist(cfg, {"stats.csv", "learned_at.csv"})) {
    std::ifstream lin(cfg.layout);
    if (!lin) throw StageFailed("train-hrl", "layout missing: " + cfg.layout);
    std::ifstream pin(cfg.plan);
    if (!pin) throw StageFailed("train-hrl", "plan missing: " + cfg.plan);
    std::ifstream gin(cfg.subgoals);
    if (!gin)
      throw StageFailed("train-hrl", "subgoals missing: " + cfg.subgoals);
    try {
      auto layout = load_layout(lin);
      auto plan = read_plan(pin);
      auto goals = read_train_goals(gin);
      TrainConfig tc;
      tc.reward.alpha = cfg.alpha;
      tc.reward.beta = cfg.beta;
      tc.reward.gamma = cfg.gamma;
      tc.reward.tau = cfg.tau;
      tc.budget = cfg.budget;
      tc.seed = cfg.seed;
      auto stats = run_experiment(cfg.variant, layout, goals, plan, tc);
      std::ofstream sout(out_path(cfg, "stats.csv"));
      write_stats_csv(stats, sout);
      std::ofstream lout(out_path(cfg, "learned_at.csv"));
      write_learned_at_csv(stats, lout);
    } catch (const std::runtime_error& e) {
      throw StageFailed("train-hrl", e.what());
    }
  }
  st.artifacts.push_back("stats.csv");
  st.artifacts.push_back("learned_at.csv");
}

}  // namespace

Manifest run_pipeline(const PipelineConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  PipelineState st;
  stage_ingest(cfg, st);
  auto maps = stage_saliency(cfg, st);
  stage_extract(cfg, st, maps);
  stage_match(cfg, st);
  stage_features(cfg, st);
  stage_train_intent(cfg, st);
  stage_train_hrl(cfg, st);

  Manifest manifest;
  for (const auto& name : st.artifacts)
    manifest.entries.emplace_back(name, hash_file(out_path(cfg, name)));
  std::ofstream mout(out_path(cfg, "manifest.txt"));
  for (const auto& [path, hash] : manifest.entries)
    mout << path << ' ' << hash << "\n";
  return manifest;
}

std::string emit_report(const Manifest& manifest, const PipelineConfig& cfg) {
  std::ostringstream out;
  if (manifest.entries.empty()) return "no artifacts\n";
  auto has = [&](const std::string& name) {
    for (const auto& [path, hash] : manifest.entries)
      if (path == name) return true;
    return false;
  };
  out << "artifacts: " << manifest.entries.size() << "\n";
  if (has("subgoals.json")) {
    std::ifstream in(out_path(cfg, "subgoals.json"));
    if (in) {
      auto goals = read_subgoals_json(in);
      out << "unique sub-goals: " << goals.boxes.size() << "\n";
    }
  }
  if (has("plan.txt")) {
    std::ifstream in(out_path(cfg, "plan.txt"));
    if (in) {
      auto plan = read_plan(in);
      out << "plan (" << plan.size() << " steps):";
      for (int id : plan) out << ' ' << id;
      out << "\n";
    }
  }
  if (has("folds.csv")) {
    std::ifstream in(out_path(cfg, "folds.csv"));
    std::string line, mean_line;
    while (std::getline(in, line))
      if (line.rfind("mean,", 0) == 0) mean_line = line.substr(5);
    if (!mean_line.empty())
      out << "intent CV mean accuracy: " << mean_line << "\n";
  }
  if (has("learned_at.csv")) {
    std::ifstream in(out_path(cfg, "learned_at.csv"));
    std::string line;
    std::getline(in, line);
    out << "learned-at (env steps per plan step):\n";
    while (std::getline(in, line))
      if (!line.empty()) out << "  " << line << "\n";
  }
  return out.str();
}

}  // namespace gazerl
