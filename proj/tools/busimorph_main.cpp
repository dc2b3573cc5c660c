// busimorph command line: synth / extract / train / eval.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "busimorph/classifier.hpp"
#include "busimorph/dataset.hpp"
#include "busimorph/errors.hpp"
#include "busimorph/metrics.hpp"
#include "busimorph/morphometry.hpp"
#include "busimorph/pipeline.hpp"
#include "busimorph/synth.hpp"
#include "busimorph/version.hpp"

namespace {

using busimorph::DataError;
using ConfigMap = std::map<std::string, std::string>;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Simple key=value file; '#' starts a comment line. Values here override
// anything given on the command line.
ConfigMap read_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw busimorph::IoError("cannot open config file: " + path);
  ConfigMap out;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw DataError("config line is not key=value: " + t);
    }
    out[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return out;
}

int config_int(const ConfigMap& cfg, const std::string& key, int fallback) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  try {
    std::size_t pos = 0;
    const int v = std::stoi(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw DataError("config key '" + key + "' is not an integer: " + it->second);
  }
}

double config_double(const ConfigMap& cfg, const std::string& key,
                     double fallback) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  return busimorph::detail::parse_double(it->second, key.c_str());
}

std::uint64_t config_u64(const ConfigMap& cfg, const std::string& key,
                         std::uint64_t fallback) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw DataError("config key '" + key + "' is not an integer: " + it->second);
  }
}

std::string config_str(const ConfigMap& cfg, const std::string& key,
                       std::string fallback) {
  const auto it = cfg.find(key);
  return it == cfg.end() ? fallback : it->second;
}

struct Timer {
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  }
};

std::string join_args(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

// --- synth -----------------------------------------------------------------

struct SynthArgs {
  std::string out_dir;
  int per_class = 30;
  std::uint64_t seed = 42;
  std::string config_file;
};

int run_synth(SynthArgs a, const std::string& cmdline) {
  if (!a.config_file.empty()) {
    const ConfigMap cfg = read_config(a.config_file);
    a.out_dir = config_str(cfg, "out", a.out_dir);
    a.per_class = config_int(cfg, "per-class", a.per_class);
    a.seed = config_u64(cfg, "seed", a.seed);
  }
  Timer timer;
  const busimorph::DatasetIndex index =
      busimorph::synth_corpus(a.per_class, a.seed, a.out_dir);
  std::cout << "synthesized " << index.samples.size() << " samples under "
            << a.out_dir << "\n";

  nlohmann::json body;
  body["command"] = cmdline;
  body["options"] = {{"out", a.out_dir},
                     {"per-class", a.per_class},
                     {"seed", a.seed}};
  body["seeds"] = {{"corpus", a.seed}};
  body["inputs"] = nlohmann::json::array();
  body["outputs"] = {a.out_dir};
  body["samples"] = index.samples.size();
  body["wall_time_s"] = timer.seconds();
  busimorph::write_manifest(a.out_dir + "/corpus", std::move(body));
  return 0;
}

// --- extract -----------------------------------------------------------------

struct ExtractArgs {
  std::string data_root;
  std::string out_csv;
  int size = 256;
  int k = busimorph::MorphometryParams{}.k;
  double smooth_threshold = busimorph::MorphometryParams{}.smooth_threshold_deg;
  double eps = busimorph::MorphometryParams{}.simplify_eps;
  int connectivity = 8;
  int threshold = 128;
  int jobs = 1;
  std::string diagnostics_dir;
  std::string index_json;
  std::string config_file;
};

int run_extract(ExtractArgs a, const std::string& cmdline) {
  if (!a.config_file.empty()) {
    const ConfigMap cfg = read_config(a.config_file);
    a.data_root = config_str(cfg, "data", a.data_root);
    a.out_csv = config_str(cfg, "out", a.out_csv);
    a.size = config_int(cfg, "size", a.size);
    a.k = config_int(cfg, "k", a.k);
    a.smooth_threshold =
        config_double(cfg, "smooth-threshold", a.smooth_threshold);
    a.eps = config_double(cfg, "eps", a.eps);
    a.connectivity = config_int(cfg, "connectivity", a.connectivity);
    a.threshold = config_int(cfg, "threshold", a.threshold);
    a.jobs = config_int(cfg, "jobs", a.jobs);
    a.diagnostics_dir = config_str(cfg, "diagnostics", a.diagnostics_dir);
    a.index_json = config_str(cfg, "index-json", a.index_json);
  }
  if (a.connectivity != 4 && a.connectivity != 8) {
    throw DataError("connectivity must be 4 or 8");
  }
  if (a.k < 1) throw DataError("k must be >= 1");
  if (a.size < 0) throw DataError("size must be >= 0");

  Timer timer;
  const busimorph::DatasetIndex index = busimorph::scan_dataset(a.data_root);
  for (const std::string& w : index.warnings) {
    std::cerr << "warning: " << w << "\n";
  }

  busimorph::ExtractOptions opts;
  opts.working_size = a.size;
  opts.binarize_threshold = a.threshold;
  opts.morph.k = a.k;
  opts.morph.smooth_threshold_deg = a.smooth_threshold;
  opts.morph.simplify_eps = a.eps;
  opts.morph.connectivity = a.connectivity == 4
                                ? busimorph::Connectivity::Four
                                : busimorph::Connectivity::Eight;
  opts.jobs = a.jobs;
  opts.diagnostics_dir = a.diagnostics_dir;

  const busimorph::ExtractResult res = busimorph::extract_dataset(index, opts);
  for (const std::string& w : res.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  busimorph::write_features_csv(a.out_csv, res.rows);
  if (!a.index_json.empty()) {
    busimorph::write_index_json(index, a.index_json);
  }
  std::cout << "wrote " << res.rows.size() << " rows ("
            << res.degenerate_count << " degenerate) to " << a.out_csv << "\n";

  nlohmann::json body;
  body["command"] = cmdline;
  body["options"] = {{"data", a.data_root},
                     {"out", a.out_csv},
                     {"size", a.size},
                     {"k", a.k},
                     {"smooth-threshold", a.smooth_threshold},
                     {"eps", a.eps},
                     {"connectivity", a.connectivity},
                     {"threshold", a.threshold},
                     {"jobs", a.jobs}};
  body["seeds"] = nlohmann::json::object();
  body["inputs"] = {a.data_root};
  body["outputs"] = {a.out_csv};
  body["rows"] = res.rows.size();
  body["degenerate_rows"] = res.degenerate_count;
  body["wall_time_s"] = timer.seconds();
  busimorph::write_manifest(a.out_csv, std::move(body));
  return 0;
}

// --- train -------------------------------------------------------------------

struct TrainArgs {
  std::string features_csv;
  std::string model_out;
  std::string log_out;
  int epochs = 5;
  int batch_size = 32;
  double lr = 0.001;
  std::string optimizer = "adam";
  std::uint64_t seed = 42;
  std::uint64_t split_seed = 7;
  double fraction = 0.8;
  std::string config_file;
};

int run_train(TrainArgs a, const std::string& cmdline) {
  if (!a.config_file.empty()) {
    const ConfigMap cfg = read_config(a.config_file);
    a.features_csv = config_str(cfg, "features", a.features_csv);
    a.model_out = config_str(cfg, "model", a.model_out);
    a.log_out = config_str(cfg, "log", a.log_out);
    a.epochs = config_int(cfg, "epochs", a.epochs);
    a.batch_size = config_int(cfg, "batch-size", a.batch_size);
    a.lr = config_double(cfg, "lr", a.lr);
    a.optimizer = config_str(cfg, "optimizer", a.optimizer);
    a.seed = config_u64(cfg, "seed", a.seed);
    a.split_seed = config_u64(cfg, "split-seed", a.split_seed);
    a.fraction = config_double(cfg, "fraction", a.fraction);
  }
  busimorph::TrainConfig cfg;
  cfg.epochs = a.epochs;
  cfg.batch_size = a.batch_size;
  cfg.learning_rate = a.lr;
  cfg.seed = a.seed;
  if (a.optimizer == "adam") {
    cfg.optimizer = busimorph::Optimizer::Adam;
  } else if (a.optimizer == "sgd") {
    cfg.optimizer = busimorph::Optimizer::SGD;
  } else {
    throw DataError("optimizer must be adam or sgd");
  }

  Timer timer;
  const std::vector<busimorph::FeatureRow> rows =
      busimorph::read_features_csv(a.features_csv);
  const busimorph::TrainOutcome out =
      busimorph::train_on_rows(rows, a.split_seed, a.fraction, cfg);

  for (std::size_t i = 0; i < out.report.epochs.size(); ++i) {
    const busimorph::EpochStats& e = out.report.epochs[i];
    std::cout << "epoch," << (i + 1) << ','
              << busimorph::detail::format_double(e.train_loss) << ','
              << busimorph::detail::format_double(e.train_acc) << ','
              << busimorph::detail::format_double(e.val_loss) << ','
              << busimorph::detail::format_double(e.val_acc) << "\n";
  }
  const busimorph::EpochStats final_epoch = out.report.epochs.back();
  std::cout << "accuracy: "
            << busimorph::detail::format_double(final_epoch.train_acc)
            << " val_accuracy: "
            << busimorph::detail::format_double(final_epoch.val_acc)
            << " loss: "
            << busimorph::detail::format_double(final_epoch.train_loss)
            << "\n";

  busimorph::save_model(out.model, a.model_out);
  if (!a.log_out.empty()) {
    busimorph::write_train_log(a.log_out, out.report);
  }

  nlohmann::json body;
  body["command"] = cmdline;
  body["options"] = {{"features", a.features_csv},
                     {"model", a.model_out},
                     {"epochs", a.epochs},
                     {"batch-size", a.batch_size},
                     {"lr", a.lr},
                     {"optimizer", a.optimizer},
                     {"fraction", a.fraction}};
  body["seeds"] = {{"train", a.seed}, {"split", a.split_seed}};
  body["inputs"] = {a.features_csv};
  body["outputs"] = nlohmann::json::array({a.model_out});
  if (!a.log_out.empty()) body["outputs"].push_back(a.log_out);
  body["train_rows"] = out.train_rows;
  body["validation_rows"] = out.val_rows;
  body["excluded_degenerate"] = out.excluded_degenerate;
  body["accuracy"] = final_epoch.train_acc;
  body["val_accuracy"] = final_epoch.val_acc;
  body["loss"] = final_epoch.train_loss;
  body["wall_time_s"] = timer.seconds();
  busimorph::write_manifest(a.model_out, std::move(body));
  return 0;
}

// --- eval --------------------------------------------------------------------

struct EvalArgs {
  std::string model_file;
  std::string features_csv;
  std::string report_out;
  std::string heatmap_out;
  std::string config_file;
};

int run_eval(EvalArgs a, const std::string& cmdline) {
  if (!a.config_file.empty()) {
    const ConfigMap cfg = read_config(a.config_file);
    a.model_file = config_str(cfg, "model", a.model_file);
    a.features_csv = config_str(cfg, "features", a.features_csv);
    a.report_out = config_str(cfg, "report", a.report_out);
    a.heatmap_out = config_str(cfg, "heatmap", a.heatmap_out);
  }
  Timer timer;
  const busimorph::ClassifierModel model = busimorph::load_model(a.model_file);
  const std::vector<busimorph::FeatureRow> rows =
      busimorph::read_features_csv(a.features_csv);
  const busimorph::EvalOutcome out = busimorph::evaluate_rows(model, rows);

  std::cout << busimorph::report_table(out.report);
  if (out.excluded_degenerate > 0) {
    std::cerr << "warning: " << out.excluded_degenerate
              << " degenerate rows excluded from scoring\n";
  }
  if (!a.report_out.empty()) {
    busimorph::write_json_atomic(a.report_out,
                                 busimorph::report_to_json(out.report));
  }
  if (!a.heatmap_out.empty()) {
    busimorph::write_confusion_png(out.report.cm, a.heatmap_out);
  }

  const std::string manifest_anchor =
      a.report_out.empty() ? a.features_csv : a.report_out;
  nlohmann::json body;
  body["command"] = cmdline;
  body["options"] = {{"model", a.model_file}, {"features", a.features_csv}};
  body["seeds"] = nlohmann::json::object();
  body["inputs"] = {a.model_file, a.features_csv};
  body["outputs"] = nlohmann::json::array();
  if (!a.report_out.empty()) body["outputs"].push_back(a.report_out);
  if (!a.heatmap_out.empty()) body["outputs"].push_back(a.heatmap_out);
  body["scored_rows"] = out.scored_rows;
  body["excluded_degenerate"] = out.excluded_degenerate;
  body["accuracy"] = out.report.accuracy;
  body["macro_f1"] = out.report.macro_f1;
  body["wall_time_s"] = timer.seconds();
  busimorph::write_manifest(manifest_anchor, std::move(body));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Morphometric contour features and a small classifier for "
               "binary tumor masks"};
  app.set_version_flag("--version", busimorph::kVersion);
  app.require_subcommand(1);
  const std::string cmdline = join_args(argc, argv);

  SynthArgs synth_args;
  CLI::App* synth = app.add_subcommand(
      "synth", "Generate a labeled synthetic mask corpus");
  synth->add_option("--out", synth_args.out_dir, "Output dataset directory")
      ->required();
  synth->add_option("--per-class", synth_args.per_class,
                    "Samples per class (>= 2)")
      ->check(CLI::Range(2, 100000));
  synth->add_option("--seed", synth_args.seed, "Corpus seed");
  synth->add_option("--config", synth_args.config_file,
                    "key=value file; overrides flags");

  ExtractArgs ex_args;
  CLI::App* extract = app.add_subcommand(
      "extract", "Compute contour features for every sample in a dataset");
  extract
      ->add_option("--data", ex_args.data_root,
                   "Dataset root (class subdirectories with PNG pairs)")
      ->envname("BUSIMORPH_DATA_ROOT")
      ->required();
  extract->add_option("--out", ex_args.out_csv, "Output feature CSV")
      ->required();
  extract->add_option("--size", ex_args.size,
                      "Working resolution, 0 keeps native size")
      ->check(CLI::Range(0, 8192));
  extract->add_option("--k", ex_args.k, "Curvature step k")
      ->check(CLI::Range(1, 512));
  extract->add_option("--smooth-threshold", ex_args.smooth_threshold,
                      "Smooth-point angle threshold in degrees");
  extract->add_option(
      "--eps", ex_args.eps,
      "Polygon simplification tolerance, in pixels for a 100x100-px region; "
      "scales with region size, 0 measures the raw chain");
  extract->add_option("--connectivity", ex_args.connectivity,
                      "Component connectivity (4 or 8)");
  extract->add_option("--threshold", ex_args.threshold,
                      "Mask binarization threshold")
      ->check(CLI::Range(1, 255));
  extract->add_option("--jobs", ex_args.jobs, "Worker threads")
      ->check(CLI::Range(1, 256));
  extract->add_option("--diagnostics", ex_args.diagnostics_dir,
                      "Directory for per-sample JSON + overlay PNGs");
  extract->add_option("--index-json", ex_args.index_json,
                      "Also write the scanned dataset index as JSON");
  extract->add_option("--config", ex_args.config_file,
                      "key=value file; overrides flags");

  TrainArgs tr_args;
  CLI::App* train = app.add_subcommand(
      "train", "Train the classification head on a feature CSV");
  train->add_option("--features", tr_args.features_csv, "Feature CSV")
      ->required();
  train->add_option("--model", tr_args.model_out, "Output model file")
      ->required();
  train->add_option("--log", tr_args.log_out, "Per-epoch log file");
  train->add_option("--epochs", tr_args.epochs, "Training epochs")
      ->check(CLI::Range(1, 1000000));
  train->add_option("--batch-size", tr_args.batch_size, "Mini-batch size")
      ->check(CLI::Range(2, 1000000));
  train->add_option("--lr", tr_args.lr, "Learning rate");
  train->add_option("--optimizer", tr_args.optimizer, "adam or sgd");
  train->add_option("--seed", tr_args.seed, "Weight init / shuffle seed");
  train->add_option("--split-seed", tr_args.split_seed,
                    "Train/validation split seed");
  train->add_option("--fraction", tr_args.fraction,
                    "Training fraction of each class");
  train->add_option("--config", tr_args.config_file,
                    "key=value file; overrides flags");

  EvalArgs ev_args;
  CLI::App* eval = app.add_subcommand(
      "eval", "Evaluate a saved model against a feature CSV");
  eval->add_option("--model", ev_args.model_file, "Model file")->required();
  eval->add_option("--features", ev_args.features_csv, "Feature CSV")
      ->required();
  eval->add_option("--report", ev_args.report_out, "Metric report JSON");
  eval->add_option("--heatmap", ev_args.heatmap_out,
                   "Confusion matrix PNG heat grid");
  eval->add_option("--config", ev_args.config_file,
                   "key=value file; overrides flags");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (synth->parsed()) return run_synth(synth_args, cmdline);
    if (extract->parsed()) return run_extract(ex_args, cmdline);
    if (train->parsed()) return run_train(tr_args, cmdline);
    if (eval->parsed()) return run_eval(ev_args, cmdline);
    std::cerr << "error: no subcommand given\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
