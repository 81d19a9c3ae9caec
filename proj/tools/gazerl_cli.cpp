// Command-line front end: gaze ingestion, saliency, sub-goal extraction,
// intention prediction, the gridworld simulator, and hierarchical training.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "gazerl/episode.hpp"
#include "gazerl/events.hpp"
#include "gazerl/hrl.hpp"
#include "gazerl/intent.hpp"
#include "gazerl/pipeline.hpp"
#include "gazerl/saliency.hpp"
#include "gazerl/subgoals.hpp"
#include "gazerl/synthetic.hpp"

namespace fs = std::filesystem;
using namespace gazerl;

namespace {

EpisodeLog load_log(const std::string& path, int width, int height, int room,
                    int level, bool filter) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  auto log = parse_episode_log(in, width, height);
  return filter ? filter_by_room(log, room, level) : log;
}

std::vector<EpisodeLog> load_logs_dir(const std::string& dir, int width,
                                      int height, int room, int level) {
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".log") files.push_back(e.path().string());
  std::sort(files.begin(), files.end());
  std::vector<EpisodeLog> logs;
  for (const auto& f : files) {
    auto log = load_log(f, width, height, room, level, true);
    if (!log.frames.empty()) logs.push_back(std::move(log));
  }
  return logs;
}

std::ostream& open_out(std::ofstream& file, const std::string& path) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot write " + path);
  return file;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sub-goal discovery from gaze and hierarchical RL training"};
  app.require_subcommand(1);

  int width = 160, height = 210, room = 1, level = 0;
  app.add_option("--width", width, "native frame width")->capture_default_str();
  app.add_option("--height", height, "native frame height")
      ->capture_default_str();
  app.add_option("--room", room, "room id filter")->capture_default_str();
  app.add_option("--level", level, "level filter")->capture_default_str();

  // ingest
  auto* ingest = app.add_subcommand("ingest", "parse and validate a log");
  std::string log_path, out_path_str;
  bool no_filter = false;
  ingest->add_option("--log", log_path, "episode log file")->required();
  ingest->add_option("--out", out_path_str, "write the filtered log here");
  ingest->add_flag("--no-filter", no_filter, "skip the room/level filter");

  // events
  auto* events_cmd = app.add_subcommand("events", "fixation/saccade events");
  double velocity = 30.0, ppd = 10.0, min_fix = 100.0;
  events_cmd->add_option("--log", log_path, "episode log file")->required();
  events_cmd->add_option("--velocity", velocity, "I-VT threshold (deg/s)")
      ->capture_default_str();
  events_cmd->add_option("--ppd", ppd, "pixels per visual degree")
      ->capture_default_str();
  events_cmd->add_option("--min-fixation", min_fix, "minimum fixation (ms)")
      ->capture_default_str();
  events_cmd->add_option("--out", out_path_str, "output CSV (default stdout)");

  // saliency
  auto* saliency_cmd = app.add_subcommand("saliency", "gaze heatmap (PGM)");
  double sigma = 10.0;
  saliency_cmd->add_option("--log", log_path, "episode log file")->required();
  saliency_cmd->add_option("--sigma", sigma, "Gaussian sigma in pixels")
      ->capture_default_str();
  saliency_cmd->add_option("--out", out_path_str, "output PGM (default stdout)");

  // extract
  auto* extract_cmd =
      app.add_subcommand("extract", "sub-goal boxes from all logs");
  std::string logs_dir, agent_box = "8x20", subgoals_path, plan_path;
  double threshold = 0.4, iou_thr = 0.3;
  extract_cmd->add_option("--logs-dir", logs_dir, "directory of .log files")
      ->required();
  extract_cmd->add_option("--threshold", threshold, "saliency threshold")
      ->capture_default_str();
  extract_cmd->add_option("--iou", iou_thr, "NMS IoU threshold")
      ->capture_default_str();
  extract_cmd->add_option("--agent-box", agent_box, "agent box WxH")
      ->capture_default_str();
  extract_cmd->add_option("--sigma", sigma, "Gaussian sigma in pixels")
      ->capture_default_str();
  extract_cmd->add_option("--out", out_path_str, "subgoals.json path");

  // match
  auto* match_cmd = app.add_subcommand("match", "visit orders and plan");
  match_cmd->add_option("--logs-dir", logs_dir, "directory of .log files")
      ->required();
  match_cmd->add_option("--subgoals", subgoals_path, "subgoals.json")
      ->required();
  match_cmd->add_option("--out", out_path_str, "plan.txt path");

  // features
  auto* features_cmd =
      app.add_subcommand("features", "intent feature vectors (CSV)");
  features_cmd->add_option("--logs-dir", logs_dir, "directory of .log files")
      ->required();
  features_cmd->add_option("--subgoals", subgoals_path, "subgoals.json")
      ->required();
  features_cmd->add_option("--ppd", ppd, "pixels per visual degree")
      ->capture_default_str();
  features_cmd->add_option("--out", out_path_str, "features CSV path");

  // train-intent
  auto* intent_cmd =
      app.add_subcommand("train-intent", "cross-validate the intent model");
  std::string features_path, model_path;
  int k_folds = 10, epochs = 200;
  double reg = 1e-3;
  unsigned seed = 1;
  intent_cmd->add_option("--features", features_path, "features CSV")
      ->required();
  intent_cmd->add_option("--k", k_folds, "folds")->capture_default_str();
  intent_cmd->add_option("--reg", reg, "regularization")->capture_default_str();
  intent_cmd->add_option("--epochs", epochs, "training epochs")
      ->capture_default_str();
  intent_cmd->add_option("--seed", seed, "rng seed")->capture_default_str();
  intent_cmd->add_option("--out", out_path_str, "per-fold accuracy CSV");
  intent_cmd->add_option("--model", model_path, "save the final model here");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "run actions on a layout");
  std::string layout_path, actions_path;
  sim_cmd->add_option("--layout", layout_path, "room layout file")->required();
  sim_cmd->add_option("--actions", actions_path,
                      "whitespace-separated action ids (default stdin)");

  // train-hrl
  auto* hrl_cmd = app.add_subcommand("train-hrl", "train agents on a layout");
  std::string variant = "fullmodel", out_dir = "out";
  long budget = 300000;
  double alpha = 0.0, beta = 0.0, gamma = 0.0, tau = 0.001;
  hrl_cmd->add_option("--variant", variant,
                      "fullmodel|singlegoal|singledist|singledir")
      ->capture_default_str();
  hrl_cmd->add_option("--layout", layout_path, "room layout")->required();
  hrl_cmd->add_option("--plan", plan_path, "plan step ids")->required();
  hrl_cmd->add_option("--subgoals", subgoals_path,
                      "sub-goals in cell coordinates")->required();
  hrl_cmd->add_option("--budget", budget, "env step budget")
      ->capture_default_str();
  hrl_cmd->add_option("--seed", seed, "rng seed")->capture_default_str();
  hrl_cmd->add_option("--alpha", alpha, "direction weight")
      ->capture_default_str();
  hrl_cmd->add_option("--beta", beta, "distance weight")
      ->capture_default_str();
  hrl_cmd->add_option("--gamma", gamma, "step-penalty weight")
      ->capture_default_str();
  hrl_cmd->add_option("--tau", tau, "dense reward scale")
      ->capture_default_str();
  hrl_cmd->add_option("--out-dir", out_dir, "stats output directory")
      ->capture_default_str();

  // gen-synthetic
  auto* gen_cmd =
      app.add_subcommand("gen-synthetic", "write the bundled synthetic logs");
  gen_cmd->add_option("--out", out_dir, "output directory")->required();
  gen_cmd->add_option("--seed", seed, "rng seed")->capture_default_str();

  // run / report
  auto* run_cmd = app.add_subcommand("run", "full pipeline from a config");
  std::string config_path;
  std::vector<std::string> overrides;
  bool force = false;
  run_cmd->add_option("--config", config_path, "key=value config file");
  run_cmd->add_option("--set", overrides, "config override key=value");
  run_cmd->add_flag("--force", force, "recompute existing stage outputs");

  auto* report_cmd = app.add_subcommand("report", "summarize a pipeline run");
  report_cmd->add_option("--out-dir", out_dir, "pipeline output directory")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      auto log = load_log(log_path, width, height, room, level, !no_filter);
      auto rep = validate_log(log);
      std::cout << "episode=" << log.episode_id << " frames=" << rep.frames
                << " gaze=" << rep.gaze_samples
                << " dropped=" << rep.dropped_samples
                << " index_violations=" << rep.index_violations
                << " time_violations=" << rep.time_violations << "\n";
      if (!out_path_str.empty()) {
        std::ofstream out(out_path_str);
        serialize_episode_log(log, out);
      }
    } else if (*events_cmd) {
      auto log = load_log(log_path, width, height, room, level, true);
      std::vector<GazeSample> samples;
      for (const auto& fr : log.frames)
        samples.insert(samples.end(), fr.gaze.begin(), fr.gaze.end());
      auto events = detect_events(samples, velocity, ppd, min_fix);
      std::ofstream file;
      auto& out = open_out(file, out_path_str);
      out << "kind,t_start,t_end,cx,cy\n";
      for (const auto& e : events)
        out << (e.kind == EventKind::Fixation ? "fixation" : "saccade") << ','
            << e.t_start << ',' << e.t_end << ',' << e.cx << ',' << e.cy
            << "\n";
    } else if (*saliency_cmd) {
      auto log = load_log(log_path, width, height, room, level, true);
      auto map = normalize(gaussian_blur(fixation_map(log), sigma));
      std::ofstream file;
      write_pgm(map, open_out(file, out_path_str));
    } else if (*extract_cmd) {
      int aw = 8, ah = 20;
      if (std::sscanf(agent_box.c_str(), "%dx%d", &aw, &ah) != 2)
        throw std::runtime_error("bad --agent-box, expected WxH");
      auto logs = load_logs_dir(logs_dir, width, height, room, level);
      std::vector<SubGoalSet> per_episode;
      for (const auto& log : logs) {
        auto map = normalize(gaussian_blur(fixation_map(log), sigma));
        auto mask = threshold_mask(map, threshold);
        SubGoalSet set;
        set.boxes = nms_merge(propose(mask, aw, ah, map.width, map.height),
                              iou_thr);
        per_episode.push_back(std::move(set));
      }
      auto goals = merge_across_episodes(per_episode, iou_thr);
      std::ofstream file;
      write_subgoals_json(goals, open_out(file, out_path_str));
    } else if (*match_cmd) {
      std::ifstream gin(subgoals_path);
      auto goals = read_subgoals_json(gin);
      auto logs = load_logs_dir(logs_dir, width, height, room, level);
      std::vector<std::vector<int>> orders;
      for (const auto& log : logs)
        orders.push_back(match_trajectory(log, goals));
      auto plan = majority_vote(orders);
      std::ofstream file;
      write_plan(plan, open_out(file, out_path_str));
    } else if (*features_cmd) {
      std::ifstream gin(subgoals_path);
      auto goals = read_subgoals_json(gin);
      auto logs = load_logs_dir(logs_dir, width, height, room, level);
      std::ofstream file;
      auto& out = open_out(file, out_path_str);
      out.precision(17);
      for (const auto& log : logs)
        for (const auto& s : build_intent_dataset(log, goals, 30.0, ppd)) {
          for (double f : s.features) out << f << ',';
          out << s.label << "\n";
        }
    } else if (*intent_cmd) {
      std::ifstream in(features_path);
      if (!in) throw std::runtime_error("cannot open " + features_path);
      std::vector<IntentSample> samples;
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty() || !(std::isdigit(line[0]) || line[0] == '-'))
          continue;  // header or blank
        IntentSample s;
        std::stringstream row(line);
        std::string tok;
        std::vector<double> vals;
        while (std::getline(row, tok, ',')) vals.push_back(std::stod(tok));
        s.label = static_cast<int>(vals.back());
        vals.pop_back();
        s.features = std::move(vals);
        samples.push_back(std::move(s));
      }
      auto cv = cross_validate(samples, k_folds, reg, epochs, seed);
      std::ofstream file;
      auto& out = open_out(file, out_path_str);
      out << "fold,accuracy\n";
      for (std::size_t i = 0; i < cv.fold_accuracy.size(); ++i)
        out << i << ',' << cv.fold_accuracy[i] << "\n";
      out << "mean," << cv.mean_accuracy << "\n";
      if (!model_path.empty()) {
        auto model = train(samples, reg, epochs, seed);
        std::ofstream mout(model_path);
        save_model(model, mout);
      }
    } else if (*sim_cmd) {
      std::ifstream lin(layout_path);
      auto layout = load_layout(lin);
      std::ifstream afile;
      std::istream& ain =
          actions_path.empty() ? std::cin : (afile.open(actions_path), afile);
      auto state = reset(layout);
      std::cout << render(layout, state);
      int action;
      while (ain >> action && state.alive) {
        auto ev = step(layout, state, action);
        std::cout << "step " << state.steps << " action " << action
                  << (ev.died ? " died" : "") << (ev.got_key ? " got_key" : "")
                  << (ev.opened_door ? " opened_door" : "") << "\n"
                  << render(layout, state);
        if (ev.opened_door) break;
      }
    } else if (*hrl_cmd) {
      std::ifstream lin(layout_path);
      if (!lin) throw std::runtime_error("cannot open " + layout_path);
      auto layout = load_layout(lin);
      std::ifstream pin(plan_path);
      if (!pin) throw std::runtime_error("cannot open " + plan_path);
      auto plan = read_plan(pin);
      std::ifstream gin(subgoals_path);
      if (!gin) throw std::runtime_error("cannot open " + subgoals_path);
      auto goals = read_train_goals(gin);
      TrainConfig tc;
      tc.reward.alpha = alpha;
      tc.reward.beta = beta;
      tc.reward.gamma = gamma;
      tc.reward.tau = tau;
      tc.budget = budget;
      tc.seed = seed;
      auto stats = run_experiment(variant, layout, goals, plan, tc);
      fs::create_directories(out_dir);
      std::ofstream sout(fs::path(out_dir) / "stats.csv");
      write_stats_csv(stats, sout);
      std::ofstream lout(fs::path(out_dir) / "learned_at.csv");
      write_learned_at_csv(stats, lout);
      std::cout << "total env steps: " << stats.total_steps << "\n";
      for (std::size_t i = 0; i < stats.learned_at.size(); ++i) {
        std::cout << "plan step " << i << ": ";
        if (stats.learned_at[i])
          std::cout << "learned at " << *stats.learned_at[i] << "\n";
        else
          std::cout << "not learned\n";
      }
    } else if (*gen_cmd) {
      write_synthetic(out_dir, SyntheticSpec{}, seed);
      std::cout << "wrote synthetic episodes to " << out_dir << "\n";
    } else if (*run_cmd) {
      PipelineConfig cfg;
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw std::runtime_error("cannot open " + config_path);
        cfg = load_config(in);
      }
      std::map<std::string, std::string> kv;
      for (const auto& o : overrides) {
        auto eq = o.find('=');
        if (eq == std::string::npos)
          throw std::runtime_error("--set expects key=value");
        kv[o.substr(0, eq)] = o.substr(eq + 1);
      }
      apply_overrides(cfg, kv);
      if (force) cfg.force = true;
      auto manifest = run_pipeline(cfg);
      std::cout << emit_report(manifest, cfg);
    } else if (*report_cmd) {
      PipelineConfig cfg;
      cfg.out_dir = out_dir;
      Manifest manifest;
      std::ifstream in(fs::path(out_dir) / "manifest.txt");
      std::string path, hash;
      while (in >> path >> hash) manifest.entries.emplace_back(path, hash);
      std::cout << emit_report(manifest, cfg);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
