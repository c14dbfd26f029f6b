#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "waggle/classifier.hpp"
#include "waggle/error.hpp"
#include "waggle/features.hpp"
#include "waggle/signal.hpp"

namespace waggle {

struct FoldPlan {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> assignment;  // row -> fold id

  std::vector<std::size_t> rows_in(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
      if (assignment[i] == fold) out.push_back(i);
    }
    return out;
  }

  std::vector<std::size_t> rows_outside(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
      if (assignment[i] != fold) out.push_back(i);
    }
    return out;
  }
};

/// Shuffles each class's rows with a seeded generator and deals them round
/// robin into k folds. The dealing position carries over from one class to
/// the next, so overall fold sizes also differ by at most one.
inline FoldPlan stratified_kfold(std::span<const MoveLabel> labels, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorKind::InvalidK, "k must be >= 2");
  if (labels.size() < k) throw Error(ErrorKind::TooFewRows, "fewer rows than folds");
  FoldPlan plan{k, seed, std::vector<std::size_t>(labels.size(), 0)};
  std::mt19937_64 rng(seed);
  std::size_t dealt = 0;
  for (MoveLabel cls : kAllLabels) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == cls) members.push_back(i);
    }
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t i : members) plan.assignment[i] = dealt++ % k;
  }
  return plan;
}

using ConfusionMatrix = std::array<std::array<std::size_t, kNumClasses>, kNumClasses>;

struct SeedSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation
  std::vector<double> accuracies;
};

struct EvalReport {
  std::string dataset;
  std::string classifier;
  std::size_t n = 0;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  ConfusionMatrix confusion{};  // rows = truth, columns = predicted
  double accuracy = 0.0;
  double f_weighted = 0.0;
  double f_macro = 0.0;
  Scores f1{};
  std::vector<double> fold_accuracies;
  std::string config;
  std::optional<SeedSummary> seeds;

  std::size_t total() const {
    std::size_t s = 0;
    for (const auto& row : confusion) for (std::size_t c : row) s += c;
    return s;
  }
};

namespace detail {

inline void fill_metrics(EvalReport& r) {
  const std::size_t total = r.total();
  std::size_t diag = 0;
  for (std::size_t k = 0; k < kNumClasses; ++k) diag += r.confusion[k][k];
  r.n = total;
  r.accuracy = total ? static_cast<double>(diag) / static_cast<double>(total) : 0.0;
  double weighted = 0.0;
  double macro = 0.0;
  std::size_t present = 0;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    std::size_t support = 0, predicted = 0;
    for (std::size_t j = 0; j < kNumClasses; ++j) {
      support += r.confusion[k][j];
      predicted += r.confusion[j][k];
    }
    const double tp = static_cast<double>(r.confusion[k][k]);
    const double precision = predicted ? tp / static_cast<double>(predicted) : 0.0;
    const double recall = support ? tp / static_cast<double>(support) : 0.0;
    r.f1[k] = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    if (support) {
      weighted += r.f1[k] * static_cast<double>(support);
      macro += r.f1[k];
      ++present;
    }
  }
  r.f_weighted = total ? weighted / static_cast<double>(total) : 0.0;
  r.f_macro = present ? macro / static_cast<double>(present) : 0.0;
}

}  // namespace detail

inline EvalReport compute_metrics(std::span<const MoveLabel> truth, std::span<const MoveLabel> predicted) {
  if (truth.size() != predicted.size() || truth.empty()) {
    throw Error(ErrorKind::ShapeError, "truth and predictions must have equal, non-zero length");
  }
  EvalReport r;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++r.confusion[class_index(truth[i])][class_index(predicted[i])];
  }
  detail::fill_metrics(r);
  return r;
}

inline std::string describe(const TrainConfig& cfg, ClassifierKind kind) {
  std::ostringstream os;
  switch (kind) {
    case ClassifierKind::Logistic:
      os << "lr=" << cfg.logistic.learning_rate << " momentum=" << cfg.logistic.momentum
         << " epochs=" << cfg.logistic.epochs << " l2=" << cfg.logistic.l2_lambda;
      break;
    case ClassifierKind::Mlp:
      os << "lr=" << cfg.mlp.learning_rate << " momentum=" << cfg.mlp.momentum
         << " epochs=" << cfg.mlp.epochs << " seed=" << cfg.seed;
      break;
    case ClassifierKind::Svm:
      os << "C=" << cfg.svm.C << " gamma=" << cfg.svm.gamma << " tol=" << cfg.svm.tolerance
         << " max_passes=" << cfg.svm.max_passes;
      break;
  }
  return os.str();
}

/// Stratified k-fold cross-validation with one confusion matrix pooled over
/// all held-out rows. Each fold trains on its own rows only, including the
/// standardizer fit.
inline EvalReport cross_validate(const FeatureTable& table, ClassifierKind kind, const TrainConfig& cfg,
                                 std::size_t k, std::uint64_t seed) {
  const std::vector<MoveLabel> labels = table.labels();
  const FoldPlan plan = stratified_kfold(labels, k, seed);
  ClassMask present{};
  for (MoveLabel l : labels) present[class_index(l)] = true;

  EvalReport report;
  report.classifier = std::string(to_string(kind));
  report.k = k;
  report.seed = seed;
  report.config = describe(cfg, kind);
  for (std::size_t fold = 0; fold < k; ++fold) {
    const auto train_rows = plan.rows_outside(fold);
    const auto test_rows = plan.rows_in(fold);
    ClassMask seen{};
    for (std::size_t i : train_rows) seen[class_index(labels[i])] = true;
    if (seen != present) throw Error(ErrorKind::DegenerateFold, "training fold lacks a class", fold);

    const ClassifierModel model = train_classifier(kind, table.subset(train_rows), cfg);
    std::size_t correct = 0;
    for (std::size_t i : test_rows) {
      const MoveLabel guess = predict(model, table.rows[i].features).label;
      ++report.confusion[class_index(labels[i])][class_index(guess)];
      if (guess == labels[i]) ++correct;
    }
    report.fold_accuracies.push_back(static_cast<double>(correct) / static_cast<double>(test_rows.size()));
  }
  detail::fill_metrics(report);
  return report;
}

inline SeedSummary summarize_accuracies(std::vector<double> accuracies) {
  SeedSummary s;
  s.count = accuracies.size();
  if (s.count == 0) return s;
  for (double a : accuracies) s.mean += a;
  s.mean /= static_cast<double>(s.count);
  if (s.count > 1) {
    double ss = 0.0;
    for (double a : accuracies) ss += (a - s.mean) * (a - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(s.count - 1));
  }
  s.accuracies = std::move(accuracies);
  return s;
}

/// CV accuracy over consecutive seeds first_seed, first_seed + 1, ...
inline SeedSummary cross_validate_seeds(const FeatureTable& table, ClassifierKind kind, const TrainConfig& cfg,
                                        std::size_t k, std::uint64_t first_seed, std::size_t count) {
  std::vector<double> acc;
  for (std::size_t s = 0; s < count; ++s) {
    acc.push_back(cross_validate(table, kind, cfg, k, first_seed + s).accuracy);
  }
  return summarize_accuracies(std::move(acc));
}

inline FeatureTable pool_tables(std::span<const FeatureTable> tables) {
  FeatureTable out;
  for (const FeatureTable& t : tables) out.rows.insert(out.rows.end(), t.rows.begin(), t.rows.end());
  return out;
}

// ---------------------------------------------------------------------------
// Report text block (key=value per line) and CSV rows.

inline std::string to_text(const EvalReport& r) {
  std::ostringstream os;
  auto num = [](double v) { return detail::format_number(v); };
  os << "dataset=" << r.dataset << '\n'
     << "classifier=" << r.classifier << '\n'
     << "n=" << r.n << '\n'
     << "k=" << r.k << '\n'
     << "seed=" << r.seed << '\n'
     << "accuracy=" << num(r.accuracy) << '\n'
     << "f_weighted=" << num(r.f_weighted) << '\n'
     << "f_macro=" << num(r.f_macro) << '\n'
     << "f1=" << num(r.f1[0]) << ' ' << num(r.f1[1]) << ' ' << num(r.f1[2]) << '\n';
  os << "confusion=";
  for (std::size_t i = 0; i < kNumClasses; ++i) {
    for (std::size_t j = 0; j < kNumClasses; ++j) os << (i || j ? " " : "") << r.confusion[i][j];
  }
  os << '\n' << "fold_accuracies=";
  for (std::size_t i = 0; i < r.fold_accuracies.size(); ++i) os << (i ? " " : "") << num(r.fold_accuracies[i]);
  os << '\n' << "config=" << r.config << '\n';
  if (r.seeds) {
    os << "seed_count=" << r.seeds->count << '\n'
       << "seed_mean=" << num(r.seeds->mean) << '\n'
       << "seed_sd=" << num(r.seeds->sd) << '\n';
  }
  return os.str();
}

inline std::vector<EvalReport> reports_from_text(std::string_view text) {
  std::vector<EvalReport> out;
  std::map<std::string, std::string> kv;
  std::size_t line_no = 0;
  auto field = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw Error(ErrorKind::ParseError, "report lacks key '" + key + "'", line_no);
    return it->second;
  };
  auto to_double = [&](const std::string& s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      throw Error(ErrorKind::ParseError, "malformed number '" + s + "'", line_no);
    }
    return v;
  };
  auto to_size = [&](const std::string& s) {
    std::uint64_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      throw Error(ErrorKind::ParseError, "malformed integer '" + s + "'", line_no);
    }
    return v;
  };
  auto flush = [&] {
    if (kv.empty()) return;
    EvalReport r;
    r.dataset = kv.count("dataset") ? kv["dataset"] : "";
    r.classifier = field("classifier");
    r.n = to_size(field("n"));
    r.k = to_size(field("k"));
    r.seed = to_size(field("seed"));
    r.accuracy = to_double(field("accuracy"));
    r.f_weighted = to_double(field("f_weighted"));
    r.f_macro = to_double(field("f_macro"));
    std::istringstream conf(field("confusion"));
    for (auto& row : r.confusion) {
      for (std::size_t& c : row) {
        if (!(conf >> c)) throw Error(ErrorKind::ParseError, "confusion needs 9 counts", line_no);
      }
    }
    std::istringstream f1(field("f1"));
    std::string tok;
    for (double& v : r.f1) {
      if (!(f1 >> tok)) throw Error(ErrorKind::ParseError, "f1 needs 3 values", line_no);
      v = to_double(tok);
    }
    std::istringstream folds(kv.count("fold_accuracies") ? kv["fold_accuracies"] : "");
    while (folds >> tok) r.fold_accuracies.push_back(to_double(tok));
    r.config = kv.count("config") ? kv["config"] : "";
    if (kv.count("seed_count")) {
      SeedSummary s;
      s.count = to_size(kv["seed_count"]);
      s.mean = to_double(field("seed_mean"));
      s.sd = to_double(field("seed_sd"));
      r.seeds = s;
    }
    out.push_back(std::move(r));
    kv.clear();
  };
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::ParseError, "expected key=value", line_no);
    std::string key = line.substr(0, eq);
    if (key == "dataset" && !kv.empty()) flush();
    kv[key] = line.substr(eq + 1);
  }
  flush();
  return out;
}

inline constexpr std::string_view kReportCsvHeader =
    "dataset,classifier,n,k,seed,accuracy,f_weighted,f_macro,seed_count,seed_mean,seed_sd";

inline std::string to_csv_row(const EvalReport& r) {
  std::ostringstream os;
  auto num = [](double v) { return detail::format_number(v); };
  os << r.dataset << ',' << r.classifier << ',' << r.n << ',' << r.k << ',' << r.seed << ','
     << num(r.accuracy) << ',' << num(r.f_weighted) << ',' << num(r.f_macro) << ',';
  if (r.seeds) {
    os << r.seeds->count << ',' << num(r.seeds->mean) << ',' << num(r.seeds->sd);
  } else {
    os << ",,";
  }
  return os.str();
}

}  // namespace waggle
