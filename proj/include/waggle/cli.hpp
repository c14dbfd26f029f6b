#pragma once

#include <CLI11.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "waggle/classifier.hpp"
#include "waggle/error.hpp"
#include "waggle/evaluation.hpp"
#include "waggle/features.hpp"
#include "waggle/io.hpp"
#include "waggle/monitor.hpp"
#include "waggle/replay.hpp"
#include "waggle/synth.hpp"

namespace waggle::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitConvergence = 3;

constexpr int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidWindow:
    case ErrorKind::InvalidK:
    case ErrorKind::InvalidConfig:
    case ErrorKind::InvalidSpec:
      return kExitUsage;
    case ErrorKind::ConvergenceFailure:
      return kExitConvergence;
    case ErrorKind::EmptyWindow:
    case ErrorKind::TooShort:
    case ErrorKind::InvalidAngle:
    case ErrorKind::OutOfOrder:
    case ErrorKind::TooFewRows:
    case ErrorKind::DegenerateLabels:
    case ErrorKind::InvalidInput:
    case ErrorKind::UnsupportedVersion:
    case ErrorKind::ParseError:
    case ErrorKind::ShapeError:
    case ErrorKind::DegenerateFold:
    case ErrorKind::InvalidLabel:
    case ErrorKind::GapError:
    case ErrorKind::Io:
      return kExitData;
  }
  return kExitData;
}

/// Merged settings: flags override the --config file, which overrides
/// defaults.
struct RunConfig {
  MonitorConfig monitor;
  TrainConfig train;
  io::LoadOptions load;
  std::string kind = "logistic";
  std::size_t k = 5;
  std::uint64_t seed = 1;
};

namespace detail {

template <typename T>
T parse_value(const std::string& key, const std::string& text) {
  T value{};
  if constexpr (std::is_same_v<T, bool>) {
    if (text == "1" || text == "true") return true;
    if (text == "0" || text == "false") return false;
    throw Error(ErrorKind::InvalidConfig, "'" + key + "' expects true or false");
  } else if constexpr (std::is_same_v<T, std::string>) {
    return text;
  } else {
    std::istringstream in(text);
    if (!(in >> value) || !(in >> std::ws).eof()) {
      throw Error(ErrorKind::InvalidConfig, "bad value for '" + key + "': " + text);
    }
    if constexpr (std::is_unsigned_v<T>) {
      if (text.find('-') != std::string::npos) throw Error(ErrorKind::InvalidConfig, "'" + key + "' must be >= 0");
    }
    return value;
  }
}

// Config-file keys of one subcommand, each tied to its flag (if any).
class Settings {
 public:
  explicit Settings(CLI::App* app) : app_(app) {}

  template <typename T>
  void option(const std::string& flag, const std::string& key, T& target, const std::string& help) {
    CLI::Option* opt = app_->add_option(flag, target, help)->capture_default_str();
    add(key, opt, target);
  }

  void flag(const std::string& flag, const std::string& key, bool& target, const std::string& help) {
    CLI::Option* opt = app_->add_flag(flag, target, help);
    add(key, opt, target);
  }

  template <typename T>
  void config_only(const std::string& key, T& target) {
    add(key, nullptr, target);
  }

  void apply_file(const std::string& path) const {
    std::ifstream in = io::open_input(path);
    for (const auto& [key, value] : io::parse_config(in)) {
      auto it = entries_.find(key);
      if (it == entries_.end()) throw Error(ErrorKind::InvalidConfig, "unknown config key '" + key + "'");
      if (it->second.option && it->second.option->count() > 0) continue;
      it->second.apply(value);
    }
  }

 private:
  struct Entry {
    CLI::Option* option;
    std::function<void(const std::string&)> apply;
  };

  template <typename T>
  void add(const std::string& key, CLI::Option* opt, T& target) {
    entries_[key] = Entry{opt, [&target, key](const std::string& v) { target = parse_value<T>(key, v); }};
  }

  CLI::App* app_;
  std::map<std::string, Entry> entries_;
};

inline void add_monitor_options(Settings& s, RunConfig& rc) {
  s.option("--window", "window", rc.monitor.window, "Moving-average window (samples)");
  s.option("--threshold", "threshold", rc.monitor.threshold, "Crossing threshold on MovAve(sin theta)");
  s.option("--refractory", "refractory", rc.monitor.refractory, "Minimum samples between events");
  s.option("--lookback", "lookback", rc.monitor.lookback, "Trigger window length (samples)");
  s.option("--min-segment-len", "min_segment_len", rc.monitor.min_segment_len, "Shorter segments are merged");
  s.flag("--degrees", "degrees", rc.load.degrees, "Input theta is in degrees");
  s.option("--rate", "rate_hz", rc.load.rate_hz, "Sample rate of the input (Hz)");
}

inline void add_train_options(Settings& s, RunConfig& rc) {
  s.option("--seed", "seed", rc.seed, "Seed for CV folds and model initialization");
  s.config_only("logistic_learning_rate", rc.train.logistic.learning_rate);
  s.config_only("logistic_momentum", rc.train.logistic.momentum);
  s.config_only("logistic_epochs", rc.train.logistic.epochs);
  s.config_only("logistic_l2", rc.train.logistic.l2_lambda);
  s.config_only("mlp_learning_rate", rc.train.mlp.learning_rate);
  s.config_only("mlp_momentum", rc.train.mlp.momentum);
  s.config_only("mlp_epochs", rc.train.mlp.epochs);
  s.config_only("svm_c", rc.train.svm.C);
  s.config_only("svm_gamma", rc.train.svm.gamma);
  s.config_only("svm_tolerance", rc.train.svm.tolerance);
  s.config_only("svm_max_passes", rc.train.svm.max_passes);
  s.config_only("svm_max_iterations", rc.train.svm.max_iterations);
}

// Writes to `path`, or to `fallback` when the path is empty.
inline void emit(const std::string& path, std::ostream& fallback, const std::function<void(std::ostream&)>& body) {
  if (path.empty()) {
    body(fallback);
    return;
  }
  std::ofstream file = io::open_output(path);
  body(file);
  if (!file) throw Error(ErrorKind::Io, "failed writing " + path);
}

inline ClassifierKind parse_kind(const std::string& name) {
  const auto kind = classifier_kind_from_string(name);
  if (!kind) throw Error(ErrorKind::InvalidConfig, "unknown classifier kind '" + name + "'");
  return *kind;
}

inline FeatureTable load_tables(const std::vector<std::string>& paths) {
  std::vector<FeatureTable> tables;
  for (const auto& p : paths) tables.push_back(io::load_features(p));
  return pool_tables(tables);
}

}  // namespace detail

/// Runs one CLI invocation. Data goes to `out` (or files), diagnostics to
/// `err`. Returns the process exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Honeybee dance-move segmentation and classification"};
  app.name("waggle");
  app.require_subcommand(1);
  RunConfig rc;
  std::string config_path;
  std::string output;
  std::vector<std::string> inputs;

  auto* synth = app.add_subcommand("synth", "Generate synthetic labeled dances");
  detail::Settings synth_settings(synth);
  std::string out_dir;
  std::size_t n_dances = kDefaultCorpusSize;
  double noise = 0.05;
  synth->add_option("--out-dir", out_dir, "Directory for the trajectory CSV files")->required();
  synth_settings.option("--n-dances", "n_dances", n_dances, "Number of dances");
  synth_settings.option("--seed", "seed", rc.seed, "Corpus seed");
  synth_settings.option("--noise", "noise", noise, "Heading noise sd (radians)");

  auto* segment = app.add_subcommand("segment", "Trajectory CSV -> segments CSV");
  detail::Settings segment_settings(segment);
  segment->add_option("input", inputs, "Trajectory CSV")->required()->expected(1);
  detail::add_monitor_options(segment_settings, rc);

  auto* extract = app.add_subcommand("extract", "Trajectory CSV(s) -> feature CSV");
  detail::Settings extract_settings(extract);
  std::string segments_path;
  std::string bee_id;
  extract->add_option("inputs", inputs, "Trajectory CSV files")->required();
  extract->add_option("--segments", segments_path, "Segments CSV (single input only)");
  extract->add_option("--bee-id", bee_id, "Source id (single input only; default: file stem)");
  detail::add_monitor_options(extract_settings, rc);

  auto* train = app.add_subcommand("train", "Feature CSV(s) -> model file");
  detail::Settings train_settings(train);
  train->add_option("inputs", inputs, "Feature CSV files (pooled)")->required();
  train_settings.option("--kind", "kind", rc.kind, "logistic | mlp | svm");
  detail::add_train_options(train_settings, rc);

  auto* eval = app.add_subcommand("eval", "Cross-validate classifiers on feature CSV(s)");
  detail::Settings eval_settings(eval);
  bool pool = false;
  std::size_t seed_count = 0;
  std::string csv_path;
  eval->add_option("inputs", inputs, "Feature CSV files")->required();
  eval_settings.option("--kind", "kind", rc.kind, "logistic | mlp | svm | all");
  eval_settings.option("--k", "k", rc.k, "Number of folds");
  eval_settings.flag("--pool", "pool", pool, "Concatenate all inputs into one table");
  eval_settings.option("--seeds", "seeds", seed_count, "Also report mean/sd accuracy over this many CV seeds");
  eval->add_option("--csv", csv_path, "Also write the reports as CSV rows");
  detail::add_train_options(eval_settings, rc);

  auto* stream = app.add_subcommand("stream", "Replay a trajectory through the real-time circuit");
  detail::Settings stream_settings(stream);
  std::string model_path;
  bool max_speed = false;
  bool full_lookback = false;
  stream->add_option("input", inputs, "Trajectory CSV")->required()->expected(1);
  stream->add_option("--model", model_path, "Model file from `train`")->required();
  stream_settings.flag("--max-speed", "max_speed", max_speed, "Do not pace samples at the sample rate");
  stream_settings.flag("--full-lookback", "full_lookback", full_lookback,
                       "Classify the full lookback window even across the previous event");
  detail::add_monitor_options(stream_settings, rc);

  auto* report = app.add_subcommand("report", "Eval reports -> CSV, or features -> scatter data");
  std::vector<std::string> report_inputs;
  std::string scatter_path;
  auto* eval_opt = report->add_option("--eval", report_inputs, "Report files written by `eval`");
  auto* scatter_opt = report->add_option("--scatter", scatter_path, "Feature CSV to turn into x1,x2,label rows");
  eval_opt->excludes(scatter_opt);

  for (CLI::App* sub : {synth, segment, extract, train, eval, stream, report}) {
    sub->add_option("-o,--out", output, "Output file (default: standard output)");
    sub->add_option("--config", config_path, "key=value settings file (flags take precedence)");
  }

  try {
    app.parse(static_cast<int>(args.size()), [&] {
      static thread_local std::vector<const char*> argv;
      argv.clear();
      for (const auto& a : args) argv.push_back(a.c_str());
      return argv.data();
    }());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const std::map<CLI::App*, detail::Settings*> settings = {
        {synth, &synth_settings},   {segment, &segment_settings}, {extract, &extract_settings},
        {train, &train_settings},   {eval, &eval_settings},       {stream, &stream_settings}};
    CLI::App* active = app.get_subcommands().front();
    if (!config_path.empty()) {
      auto it = settings.find(active);
      if (it == settings.end()) throw Error(ErrorKind::InvalidConfig, "this subcommand takes no config file");
      it->second->apply_file(config_path);
    }
    rc.monitor.clip_lookback_to_event = !full_lookback;
    rc.monitor.validate();
    rc.train.seed = rc.seed;
    rc.train.validate();

    if (active == synth) {
      DanceRanges ranges;
      ranges.heading_noise_sd = {noise, noise};
      const auto corpus = generate_corpus(n_dances, ranges, rc.seed);
      std::filesystem::create_directories(out_dir);
      for (const LabeledDance& d : corpus) {
        const auto path = std::filesystem::path(out_dir) / (d.id + ".csv");
        std::ofstream file = io::open_output(path);
        io::write_trajectory(file, d.trajectory);
        out << path.string() << '\n';
      }
    } else if (active == segment) {
      const Trajectory t = io::load_trajectory(inputs.front(), rc.load);
      const auto segments = segment_trajectory(t, rc.monitor);
      detail::emit(output, out, [&](std::ostream& o) { io::write_segments(o, segments); });
    } else if (active == extract) {
      if (inputs.size() > 1 && (!segments_path.empty() || !bee_id.empty())) {
        throw Error(ErrorKind::InvalidConfig, "--segments and --bee-id need a single input");
      }
      std::vector<FeatureTable> tables;
      for (const auto& path : inputs) {
        const Trajectory t = io::load_trajectory(path, rc.load);
        std::vector<Segment> segments;
        if (!segments_path.empty()) {
          std::ifstream in = io::open_input(segments_path);
          segments = io::read_segments(in);
        } else {
          segments = segment_trajectory(t, rc.monitor);
        }
        const std::string id = bee_id.empty() ? std::filesystem::path(path).stem().string() : bee_id;
        tables.push_back(build_feature_table(t, segments, id, kFeatureWindow));
      }
      const FeatureTable table = pool_tables(tables);
      detail::emit(output, out, [&](std::ostream& o) { io::write_features(o, table); });
    } else if (active == train) {
      if (output.empty()) throw Error(ErrorKind::InvalidConfig, "train needs --out for the model file");
      const ClassifierModel model = train_classifier(detail::parse_kind(rc.kind), detail::load_tables(inputs), rc.train);
      detail::emit(output, out, [&](std::ostream& o) { o << serialize_model(model); });
    } else if (active == eval) {
      std::vector<ClassifierKind> kinds;
      if (rc.kind == "all") {
        kinds.assign(std::begin(kAllClassifierKinds), std::end(kAllClassifierKinds));
      } else {
        kinds.push_back(detail::parse_kind(rc.kind));
      }
      std::vector<std::pair<std::string, FeatureTable>> datasets;
      if (pool) {
        datasets.emplace_back("pooled", detail::load_tables(inputs));
      } else {
        for (const auto& p : inputs) datasets.emplace_back(std::filesystem::path(p).stem().string(), io::load_features(p));
      }
      std::vector<EvalReport> reports;
      for (const auto& [name, table] : datasets) {
        for (ClassifierKind kind : kinds) {
          EvalReport r = cross_validate(table, kind, rc.train, rc.k, rc.seed);
          r.dataset = name;
          if (seed_count > 0) r.seeds = cross_validate_seeds(table, kind, rc.train, rc.k, rc.seed, seed_count);
          reports.push_back(std::move(r));
        }
      }
      detail::emit(output, out, [&](std::ostream& o) {
        for (std::size_t i = 0; i < reports.size(); ++i) o << (i ? "\n" : "") << to_text(reports[i]);
      });
      if (!csv_path.empty()) {
        detail::emit(csv_path, out, [&](std::ostream& o) {
          o << kReportCsvHeader << '\n';
          for (const auto& r : reports) o << to_csv_row(r) << '\n';
        });
      }
    } else if (active == stream) {
      const Trajectory t = io::load_trajectory(inputs.front(), rc.load);
      const ClassifierModel model = io::load_model(model_path);
      ReplayOptions options;
      options.max_speed = max_speed;
      options.target_rate_hz = rc.load.rate_hz;
      const ReplayLog log = replay_stream(t, rc.monitor, model, options);
      detail::emit(output, out, [&](std::ostream& o) { write_event_log(o, log.events); });
      err << "samples=" << log.samples << " events=" << log.events.size() << " elapsed_s=" << log.elapsed_s;
      if (max_speed) err << " throughput=" << log.samples_per_second << " samples/s";
      err << '\n';
    } else if (active == report) {
      if (report_inputs.empty() == scatter_path.empty()) {
        throw Error(ErrorKind::InvalidConfig, "report needs exactly one of --eval or --scatter");
      }
      if (!scatter_path.empty()) {
        const FeatureTable table = io::load_features(scatter_path);
        detail::emit(output, out, [&](std::ostream& o) {
          o << "x1,x2,label\n";
          for (const FeatureRow& r : table.rows) {
            o << io::format_number(r.features.x1) << ',' << io::format_number(r.features.x2) << ','
              << (r.label ? std::to_string(label_code(*r.label)) : "") << '\n';
          }
        });
      } else {
        std::vector<EvalReport> reports;
        for (const auto& p : report_inputs) {
          auto parsed = reports_from_text(io::read_file(p));
          reports.insert(reports.end(), parsed.begin(), parsed.end());
        }
        detail::emit(output, out, [&](std::ostream& o) {
          o << kReportCsvHeader << '\n';
          for (const auto& r : reports) o << to_csv_row(r) << '\n';
        });
      }
    }
  } catch (const Error& e) {
    err << "waggle: " << e.what();
    if (e.position() != Error::npos) err << " (at " << e.position() << ")";
    err << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "waggle: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return run(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace waggle::cli
