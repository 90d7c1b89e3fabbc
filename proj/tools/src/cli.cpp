#include "sumdca_cli/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "sumdca/ablation.hpp"
#include "sumdca/checkpoint.hpp"
#include "sumdca/config.hpp"
#include "sumdca/dataset.hpp"
#include "sumdca/errors.hpp"
#include "sumdca/evaluation.hpp"
#include "sumdca/partition_map.hpp"
#include "sumdca/random.hpp"
#include "sumdca/synth.hpp"
#include "sumdca_oracles/criteria.hpp"

namespace sumdca::cli {
namespace {

namespace fs = std::filesystem;

/// Training options shared by train, evaluate and ablate. Precedence:
/// built-in defaults, then --config, then --set, then dedicated flags.
struct TrainOptions {
  std::string config_file;
  std::vector<std::string> set_entries;
  std::map<std::string, std::string> flags;

  void attach(CLI::App* app) {
    app->add_option("--config", config_file, "key = value configuration file")->check(CLI::ExistingFile);
    app->add_option("--set", set_entries, "Extra key=value configuration entries");
    value(app, "--seed", "seed", "Random seed for initialization, shuffling and folds");
    value(app, "--sim", "similarity", "Similarity for global attention")
        ->check(CLI::IsMember({"dot", "cosine", "l2"}));
    value(app, "--radius", "neighbor_radius", "Local attention radius R");
    value(app, "--lca-variant", "lca_variant", "Local attention output form")
        ->check(CLI::IsMember({"literal", "contextual"}));
    value(app, "--window", "window_policy", "Local window edge policy")
        ->check(CLI::IsMember({"clamp", "zero", "truncate"}));
    value(app, "--epochs", "epochs", "Training epochs");
    value(app, "--lr", "learning_rate", "Adam learning rate");
    value(app, "--weight-decay", "weight_decay", "Decoupled weight decay");
    value(app, "--alpha", "alpha", "Weight of the repelling loss");
    value(app, "--beta", "beta", "Weight of the reconstruction loss");
    value(app, "--hidden-dim", "hidden_dim", "Score head hidden width (0 = feature dim)");
    flag(app, "--unsupervised", "supervised", "false", "Train without labels (no classification loss)");
    flag(app, "--no-gda", "use_gda", "false", "Disable global attention");
    flag(app, "--no-lca", "use_lca", "false", "Disable local attention");
    flag(app, "--no-positions", "use_positions", "false", "Disable sinusoidal positions");
    flag(app, "--no-repelling", "use_repelling", "false", "Drop the repelling loss");
    flag(app, "--no-reconstruction", "use_reconstruction", "false", "Drop the reconstruction loss");
    flag(app, "--early-stop", "early_stop", "true", "Stop when the epoch loss plateaus");
  }

  TrainConfig resolve(std::size_t feature_dim) const {
    TrainConfig c;
    std::map<std::string, std::string> file_entries;
    if (!config_file.empty()) {
      c = load_config_file(config_file);
      std::ifstream in(config_file);
      std::stringstream buf;
      buf << in.rdbuf();
      file_entries = parse_key_values(buf.str());
    }
    std::map<std::string, std::string> extra;
    for (const std::string& e : set_entries) {
      const auto eq = e.find('=');
      if (eq == std::string::npos) throw ContractError("--set expects key=value, got '" + e + "'");
      extra[e.substr(0, eq)] = e.substr(eq + 1);
    }
    apply_config(c, extra);
    apply_config(c, flags);
    const bool dim_given = file_entries.contains("feature_dim") || extra.contains("feature_dim");
    if (dim_given && c.model.feature_dim != feature_dim)
      throw ContractError("configured feature_dim " + std::to_string(c.model.feature_dim) +
                          " does not match the dataset's " + std::to_string(feature_dim));
    c.model.feature_dim = feature_dim;
    c.validate();
    c.model.validate();
    return c;
  }

 private:
  CLI::Option* value(CLI::App* app, const std::string& name, std::string key, const std::string& help) {
    return app->add_option_function<std::string>(
        name, [this, key](const std::string& v) { flags[key] = v; }, help);
  }
  void flag(CLI::App* app, const std::string& name, std::string key, std::string v, const std::string& help) {
    app->add_flag_callback(name, [this, key, v] { flags[key] = v; }, help);
  }
};

void write_text_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError(DataErrorKind::kIo, "cannot write '" + path.string() + "'");
  out << text;
}

void write_history(const fs::path& path, const std::vector<EpochStats>& history, std::size_t first_epoch) {
  std::ostringstream out;
  out << "epoch,total,classification,repelling,reconstruction\n";
  char buf[160];
  for (std::size_t e = 0; e < history.size(); ++e) {
    const EpochStats& h = history[e];
    std::snprintf(buf, sizeof buf, "%zu,%.10g,%.10g,%.10g,%.10g\n", first_epoch + e + 1, h.total, h.classification,
                  h.repelling, h.reconstruction);
    out << buf;
  }
  write_text_file(path, out.str());
}

SummaryOptions summary_options(double budget_ratio, std::size_t max_shots) {
  SummaryOptions o;
  o.budget_ratio = budget_ratio;
  o.max_shots = max_shots;
  summary_budget(budget_ratio, 1);
  return o;
}

std::vector<double> parse_number_list(const std::string& text, char sep) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, sep)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ContractError("cannot parse number '" + item + "'");
    }
  }
  return out;
}

std::vector<Point2> parse_points(const std::string& text) {
  std::vector<Point2> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ';')) {
    const std::vector<double> xy = parse_number_list(item, ',');
    if (xy.size() != 2) throw ContractError("point '" + item + "' needs exactly two coordinates");
    out.push_back({xy[0], xy[1]});
  }
  return out;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Diverse-and-contextual attention video summarization toolkit", "sumdca"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "sumdca 0.1.0");

  // synth
  SynthSpec synth_spec;
  std::string synth_out;
  std::string synth_agg = "max";
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--videos", synth_spec.videos, "Number of videos");
  synth->add_option("--frames", synth_spec.frames, "Frames per video");
  synth->add_option("--dim", synth_spec.feature_dim, "Feature dimension");
  synth->add_option("--shots", synth_spec.shots_per_video, "Shots per video");
  synth->add_option("--noise", synth_spec.noise, "Gaussian feature noise");
  synth->add_option("--users", synth_spec.users, "User summaries per video");
  synth->add_option("--seed", synth_spec.seed, "Random seed");
  synth->add_option("--budget-ratio", synth_spec.budget_ratio, "Summary budget used for the labels");
  synth->add_option("--corpus", synth_spec.corpus, "Corpus tag of every video");
  synth->add_option("--name", synth_spec.name, "Dataset name");
  synth->add_option("--agg", synth_agg, "User aggregation stored in the manifest")->check(CLI::IsMember({"max", "mean"}));

  // train
  TrainOptions train_opts;
  std::string train_data, train_out, train_history, train_resume;
  auto* train_cmd = app.add_subcommand("train", "Train a model and write a checkpoint");
  train_cmd->add_option("--data", train_data, "Dataset directory or manifest")->required();
  train_cmd->add_option("--out", train_out, "Checkpoint path")->required();
  train_cmd->add_option("--history", train_history, "Loss history CSV (default: <out>.loss.csv)");
  train_cmd->add_option("--resume", train_resume, "Continue from this checkpoint")->check(CLI::ExistingFile);
  train_opts.attach(train_cmd);

  // summarize
  std::string sum_ckpt, sum_data, sum_video, sum_out;
  double sum_ratio = kDefaultBudgetRatio;
  std::size_t sum_max_shots = 0;
  auto* summarize = app.add_subcommand("summarize", "Write summary CSVs for videos");
  summarize->add_option("--checkpoint", sum_ckpt, "Trained checkpoint")->required()->check(CLI::ExistingFile);
  summarize->add_option("--data", sum_data, "Dataset directory or manifest")->required();
  summarize->add_option("--video", sum_video, "Only this video id");
  summarize->add_option("--out", sum_out, "Output CSV (with --video) or directory")->required();
  summarize->add_option("--budget-ratio", sum_ratio, "Summary length as a fraction of the video");
  summarize->add_option("--max-shots", sum_max_shots, "Segment cap for videos without change points");

  // evaluate
  TrainOptions eval_opts;
  std::string eval_data, eval_protocol = "canonical", eval_agg, eval_splits, eval_report, eval_csv, eval_ckpt,
                         eval_baseline = "model", eval_target;
  std::size_t eval_folds = 5, eval_threads = 1, eval_max_shots = 0;
  double eval_ratio = kDefaultBudgetRatio;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Cross-validated evaluation and baselines");
  evaluate_cmd->add_option("--data", eval_data, "Dataset directory or manifest")->required();
  evaluate_cmd->add_option("--protocol", eval_protocol, "canonical, augmented or transfer")
      ->check(CLI::IsMember({"canonical", "augmented", "transfer"}));
  evaluate_cmd->add_option("--folds", eval_folds, "Number of folds (1 = train on the test videos)");
  evaluate_cmd->add_option("--agg", eval_agg, "User aggregation (default: from the manifest)")
      ->check(CLI::IsMember({"max", "mean"}));
  evaluate_cmd->add_option("--target", eval_target, "Target corpus (default: corpus of the first video)");
  evaluate_cmd->add_option("--splits", eval_splits, "Split file; read when present, written otherwise");
  evaluate_cmd->add_option("--report", eval_report, "Text report path");
  evaluate_cmd->add_option("--csv", eval_csv, "Per-video CSV path");
  evaluate_cmd->add_option("--checkpoint", eval_ckpt, "Evaluate fixed parameters instead of training")
      ->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--baseline", eval_baseline, "model, random or human")
      ->check(CLI::IsMember({"model", "random", "human"}));
  evaluate_cmd->add_option("--threads", eval_threads, "Folds trained concurrently");
  evaluate_cmd->add_option("--budget-ratio", eval_ratio, "Summary length as a fraction of the video");
  evaluate_cmd->add_option("--max-shots", eval_max_shots, "Segment cap for videos without change points");
  eval_opts.attach(evaluate_cmd);

  // ablate
  TrainOptions abl_opts;
  std::string abl_data, abl_axis, abl_out, abl_splits, abl_radii, abl_protocol = "canonical", abl_agg;
  std::size_t abl_folds = 5, abl_threads = 1;
  double abl_ratio = kDefaultBudgetRatio;
  auto* ablate = app.add_subcommand("ablate", "Evaluate a grid of model variants along one axis");
  ablate->add_option("--data", abl_data, "Dataset directory or manifest")->required();
  ablate->add_option("--axis", abl_axis, "similarity, radius, losses or modules")
      ->required()
      ->check(CLI::IsMember({"similarity", "radius", "losses", "modules"}));
  ablate->add_option("--radii", abl_radii, "Comma-separated radii for the radius axis (default 1,2,3,4)");
  ablate->add_option("--protocol", abl_protocol, "canonical, augmented or transfer")
      ->check(CLI::IsMember({"canonical", "augmented", "transfer"}));
  ablate->add_option("--folds", abl_folds, "Number of folds");
  ablate->add_option("--agg", abl_agg, "User aggregation (default: from the manifest)")
      ->check(CLI::IsMember({"max", "mean"}));
  ablate->add_option("--splits", abl_splits, "Split file; read when present, written otherwise");
  ablate->add_option("--out", abl_out, "Result CSV path (default: standard output)");
  ablate->add_option("--threads", abl_threads, "Folds trained concurrently");
  ablate->add_option("--budget-ratio", abl_ratio, "Summary length as a fraction of the video");
  abl_opts.attach(ablate);

  // partition-map
  std::string pm_points, pm_kind = "l2", pm_out, pm_range = "-1,1";
  std::size_t pm_grid = 200, pm_random = 0;
  std::uint64_t pm_seed = 0;
  auto* pmap = app.add_subcommand("partition-map", "Grid of winning points under a similarity");
  pmap->add_option("--points", pm_points, "Points as 'x,y;x,y;...'");
  pmap->add_option("--random", pm_random, "Draw this many random points instead");
  pmap->add_option("--seed", pm_seed, "Seed for --random");
  pmap->add_option("--kind", pm_kind, "Similarity")->check(CLI::IsMember({"dot", "cosine", "l2"}));
  pmap->add_option("--sim", pm_kind, "Alias of --kind")->check(CLI::IsMember({"dot", "cosine", "l2"}));
  pmap->add_option("--grid", pm_grid, "Cells per axis");
  pmap->add_option("--range", pm_range, "Axis range 'lo,hi' for both axes");
  pmap->add_option("--out", pm_out, "CSV path (default: standard output)");

  // check
  bool check_skip_training = false;
  auto* check = app.add_subcommand("check", "Run the gradient and oracle self-tests");
  check->add_flag("--skip-training", check_skip_training, "Skip the short training runs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*synth) {
      synth_spec.validate();
      Dataset ds = synth_generate(synth_spec);
      ds.aggregation = parse_aggregation(synth_agg);
      save_dataset(synth_out, ds);
      out << "wrote " << ds.videos.size() << " videos (T=" << synth_spec.frames << ", d=" << synth_spec.feature_dim
          << ") to " << synth_out << '\n';
      return 0;
    }

    if (*train_cmd) {
      const Dataset ds = load_dataset(train_data);
      TrainConfig cfg = train_opts.resolve(ds.feature_dim);
      std::optional<TrainState> resume;
      if (!train_resume.empty()) {
        Checkpoint ck = load_checkpoint(train_resume);
        resume = std::move(ck.state);
      }
      const std::size_t first_epoch = resume ? resume->epoch : 0;
      const TrainResult res = train(ds.videos, cfg, {}, std::move(resume));
      save_checkpoint(train_out, cfg, res.state);
      const fs::path history = train_history.empty() ? fs::path(train_out + ".loss.csv") : fs::path(train_history);
      write_history(history, res.history, first_epoch);
      char buf[200];
      std::snprintf(buf, sizeof buf, "trained %zu epochs (%zu optimizer steps); final loss %.6g\n", res.history.size(),
                    res.optimizer_steps, res.history.empty() ? 0.0 : res.history.back().total);
      out << buf << "checkpoint: " << train_out << "\nloss history: " << history.string() << '\n';
      return 0;
    }

    if (*summarize) {
      const Checkpoint ck = load_checkpoint(sum_ckpt);
      const Dataset ds = load_dataset(sum_data);
      const SummaryOptions opts = summary_options(sum_ratio, sum_max_shots);
      std::size_t written = 0;
      for (const VideoRecord& v : ds.videos) {
        if (!sum_video.empty() && v.id != sum_video) continue;
        const SummaryMask s = generate_summary(v, ck.state.params, opts);
        std::ostringstream csv;
        write_summary_csv(csv, v.id, s);
        const fs::path path = sum_video.empty() ? fs::path(sum_out) / (v.id + ".csv") : fs::path(sum_out);
        write_text_file(path, csv.str());
        std::size_t selected = 0;
        for (auto m : s.mask) selected += m;
        out << v.id << ": " << selected << "/" << v.frame_count() << " frames selected (budget " << s.budget
            << ") -> " << path.string() << '\n';
        ++written;
      }
      if (written == 0) throw ContractError("no video with id '" + sum_video + "' in " + sum_data);
      return 0;
    }

    if (*evaluate_cmd) {
      const Dataset ds = load_dataset(eval_data);
      EvalProtocol protocol;
      protocol.mode = parse_protocol_mode(eval_protocol);
      protocol.folds = eval_folds;
      protocol.agg = eval_agg.empty() ? ds.aggregation : parse_aggregation(eval_agg);
      protocol.target_corpus = eval_target;
      protocol.threads = eval_threads;
      const TrainConfig cfg = eval_opts.resolve(ds.feature_dim);
      protocol.seed = cfg.seed;
      const SummaryOptions opts = summary_options(eval_ratio, eval_max_shots);

      EvalReport report;
      if (eval_baseline == "random") {
        report = random_baseline(ds.videos, protocol, opts);
      } else if (eval_baseline == "human") {
        report = human_baseline(ds.videos, protocol);
      } else if (!eval_ckpt.empty()) {
        const Checkpoint ck = load_checkpoint(eval_ckpt);
        report.method = "checkpoint";
        report.protocol = protocol;
        report.budget_ratio = opts.budget_ratio;
        report.videos = evaluate_params(ds.videos, ck.state.params, protocol.agg, opts);
        finalize_report(report);
      } else {
        std::optional<FoldSplits> splits;
        if (!eval_splits.empty() && fs::exists(eval_splits)) splits = load_splits(eval_splits);
        if (!splits) {
          std::vector<std::string> ids;
          const std::string target = target_corpus(ds.videos, protocol);
          for (const VideoRecord& v : ds.videos)
            if (v.corpus == target) ids.push_back(v.id);
          splits = make_splits(ids, protocol.folds, protocol.seed);
          if (!eval_splits.empty()) save_splits(eval_splits, *splits);
        }
        report = evaluate(ds.videos, cfg, protocol, opts, &*splits);
      }
      std::ostringstream text;
      write_report_text(text, report);
      out << text.str();
      if (!eval_report.empty()) write_text_file(eval_report, text.str());
      if (!eval_csv.empty()) {
        std::ostringstream csv;
        write_report_csv(csv, report);
        write_text_file(eval_csv, csv.str());
      }
      return 0;
    }

    if (*ablate) {
      const Dataset ds = load_dataset(abl_data);
      EvalProtocol protocol;
      protocol.mode = parse_protocol_mode(abl_protocol);
      protocol.folds = abl_folds;
      protocol.agg = abl_agg.empty() ? ds.aggregation : parse_aggregation(abl_agg);
      protocol.threads = abl_threads;
      const TrainConfig cfg = abl_opts.resolve(ds.feature_dim);
      protocol.seed = cfg.seed;
      std::vector<std::size_t> radii;
      if (!abl_radii.empty())
        for (double r : parse_number_list(abl_radii, ',')) {
          if (r < 1 || r != static_cast<double>(static_cast<std::size_t>(r)))
            throw ContractError("radii must be positive integers");
          radii.push_back(static_cast<std::size_t>(r));
        }
      std::optional<FoldSplits> splits;
      if (!abl_splits.empty() && fs::exists(abl_splits)) splits = load_splits(abl_splits);
      if (!splits) {
        std::vector<std::string> ids;
        const std::string target = target_corpus(ds.videos, protocol);
        for (const VideoRecord& v : ds.videos)
          if (v.corpus == target) ids.push_back(v.id);
        splits = make_splits(ids, protocol.folds, protocol.seed);
        if (!abl_splits.empty()) save_splits(abl_splits, *splits);
      }
      const auto rows = run_ablation(ds.videos, parse_ablation_axis(abl_axis), cfg, protocol,
                                     summary_options(abl_ratio, 0), radii, &*splits);
      std::ostringstream csv;
      write_ablation_csv(csv, rows);
      if (abl_out.empty()) {
        out << csv.str();
      } else {
        write_text_file(abl_out, csv.str());
        for (const AblationRow& row : rows) {
          char buf[160];
          std::snprintf(buf, sizeof buf, "%-12s F %6.2f  tau %6.3f  rho %6.3f\n", row.setting.c_str(),
                        row.report.mean_fscore, row.report.mean_tau, row.report.mean_rho);
          out << buf;
        }
      }
      return 0;
    }

    if (*pmap) {
      const std::vector<double> range = parse_number_list(pm_range, ',');
      if (range.size() != 2 || !(range[0] < range[1])) throw ContractError("--range expects 'lo,hi' with lo < hi");
      std::vector<Point2> points;
      if (pm_random > 0) {
        Rng rng(pm_seed);
        for (std::size_t i = 0; i < pm_random; ++i)
          points.push_back({rng.uniform(range[0], range[1]), rng.uniform(range[0], range[1])});
      } else {
        if (pm_points.empty()) throw ContractError("partition-map needs --points or --random");
        points = parse_points(pm_points);
      }
      GridSpec grid;
      grid.x_min = grid.y_min = range[0];
      grid.x_max = grid.y_max = range[1];
      grid.nx = grid.ny = pm_grid;
      const PartitionMap map = partition_map(points, parse_similarity(pm_kind), grid);
      std::ostringstream csv;
      write_partition_csv(csv, map);
      if (pm_out.empty()) {
        out << csv.str();
      } else {
        write_text_file(pm_out, csv.str());
        for (std::size_t k = 0; k < points.size(); ++k)
          out << "point " << k << " (" << points[k].x << ", " << points[k].y << "): " << map.region_size(k)
              << " cells\n";
      }
      return 0;
    }

    if (*check) {
      const auto results = oracle::run_self_check(!check_skip_training);
      int failures = 0;
      for (const auto& r : results) {
        char buf[64];
        std::snprintf(buf, sizeof buf, " (%.2f s)\n", r.seconds);
        out << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << buf;
        failures += r.passed ? 0 : 1;
      }
      out << (failures == 0 ? "all suites passed\n" : std::to_string(failures) + " suite(s) failed\n");
      return failures == 0 ? 0 : 1;
    }
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace sumdca::cli
