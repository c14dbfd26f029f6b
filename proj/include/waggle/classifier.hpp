#pragma once

#include <array>
#include <charconv>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include "waggle/error.hpp"
#include "waggle/features.hpp"
#include "waggle/logistic.hpp"
#include "waggle/mlp.hpp"
#include "waggle/svm.hpp"
#include "waggle/training.hpp"

namespace waggle {

enum class ClassifierKind { Logistic, Mlp, Svm };

inline constexpr ClassifierKind kAllClassifierKinds[] = {ClassifierKind::Logistic, ClassifierKind::Mlp,
                                                         ClassifierKind::Svm};

constexpr std::string_view to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::Logistic: return "logistic";
    case ClassifierKind::Mlp: return "mlp";
    case ClassifierKind::Svm: return "svm";
  }
  return "?";
}

inline std::optional<ClassifierKind> classifier_kind_from_string(std::string_view name) {
  for (ClassifierKind k : kAllClassifierKinds) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

/// A trained model plus the input standardization it was trained under.
/// Logistic regression sees raw features; the MLP and SVM see standardized
/// ones.
struct ClassifierModel {
  std::variant<LogisticModel, MlpModel, SvmRbfModel> params;
  std::optional<Standardizer> standardizer;

  ClassifierKind kind() const { return static_cast<ClassifierKind>(params.index()); }

  friend bool operator==(const ClassifierModel&, const ClassifierModel&) = default;
};

constexpr bool uses_standardization(ClassifierKind kind) { return kind != ClassifierKind::Logistic; }

inline ClassifierModel train_classifier(ClassifierKind kind, const FeatureTable& table,
                                        const TrainConfig& cfg) {
  ClassifierModel model;
  const FeatureTable* input = &table;
  FeatureTable scaled;
  if (uses_standardization(kind)) {
    model.standardizer = Standardizer::fit(table);
    scaled = model.standardizer->apply(table);
    input = &scaled;
  }
  switch (kind) {
    case ClassifierKind::Logistic: model.params = train_logistic(*input, cfg); break;
    case ClassifierKind::Mlp: model.params = train_mlp(*input, cfg); break;
    case ClassifierKind::Svm: model.params = train_svm_rbf(*input, cfg); break;
  }
  return model;
}

inline Prediction predict(const ClassifierModel& model, const FeatureVector& raw) {
  detail::check_input(raw);
  const FeatureVector v = model.standardizer ? model.standardizer->apply(raw) : raw;
  return std::visit([&](const auto& m) { return predict(m, v); }, model.params);
}

// ---------------------------------------------------------------------------
// Text model format:
//
//   waggle-model v1 <kind>
//   key=value lines
//   block <name> <rows> <cols>   followed by <rows> lines of <cols> numbers
//   end
//
// Numbers carry 17 significant digits so a round trip is exact.

inline constexpr int kModelFormatVersion = 1;

namespace detail {

inline std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

class ModelWriter {
 public:
  void line(std::string_view text) {
    out_.append(text);
    out_.push_back('\n');
  }
  void key(std::string_view name, std::string_view value) {
    out_.append(name);
    out_.push_back('=');
    line(value);
  }
  void key(std::string_view name, double value) { key(name, format_number(value)); }
  void mask(const ClassMask& m) { key("active", std::string{m[0] ? '1' : '0', ' ', m[1] ? '1' : '0', ' ', m[2] ? '1' : '0'}); }
  void block(std::string_view name, std::size_t rows, std::size_t cols, const std::vector<double>& values) {
    line("block " + std::string(name) + " " + std::to_string(rows) + " " + std::to_string(cols));
    for (std::size_t r = 0; r < rows; ++r) {
      std::string row;
      for (std::size_t c = 0; c < cols; ++c) {
        if (c) row.push_back(' ');
        row += format_number(values[r * cols + c]);
      }
      line(row);
    }
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class ModelReader {
 public:
  explicit ModelReader(std::string_view text) : text_(text) {}

  // Next line without its terminator; ParseError at end of input.
  std::string_view next_line() {
    if (pos_ >= text_.size()) throw Error(ErrorKind::ParseError, "unexpected end of model file", pos_);
    line_start_ = pos_;
    const std::size_t nl = text_.find('\n', pos_);
    const std::size_t end = nl == std::string_view::npos ? text_.size() : nl;
    std::string_view line = text_.substr(pos_, end - pos_);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos_ = nl == std::string_view::npos ? text_.size() : nl + 1;
    return line;
  }

  std::string_view expect_key(std::string_view name) {
    const std::string_view line = next_line();
    if (line.size() <= name.size() || line.substr(0, name.size()) != name || line[name.size()] != '=') {
      fail("expected key '" + std::string(name) + "'");
    }
    return line.substr(name.size() + 1);
  }

  double number(std::string_view token) const {
    double v = 0.0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
      fail("malformed number '" + std::string(token) + "'");
    }
    return v;
  }

  std::size_t count(std::string_view token) const {
    std::size_t v = 0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
      fail("malformed count '" + std::string(token) + "'");
    }
    return v;
  }

  std::vector<std::string_view> tokens(std::string_view line) const {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      const std::size_t start = i;
      while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
      if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
  }

  std::vector<double> numbers(std::string_view line, std::size_t expected) const {
    const auto toks = tokens(line);
    if (toks.size() != expected) fail("expected " + std::to_string(expected) + " numbers");
    std::vector<double> out;
    out.reserve(expected);
    for (auto t : toks) out.push_back(number(t));
    return out;
  }

  double expect_number(std::string_view name) { return numbers(expect_key(name), 1)[0]; }

  ClassMask expect_mask() {
    const auto toks = tokens(expect_key("active"));
    if (toks.size() != kNumClasses) fail("expected three activity flags");
    ClassMask m{};
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      if (toks[k] != "0" && toks[k] != "1") fail("activity flags must be 0 or 1");
      m[k] = toks[k] == "1";
    }
    return m;
  }

  // Reads a block header and its rows; rows may be fixed or read from the header.
  std::vector<double> expect_block(std::string_view name, std::optional<std::size_t> rows,
                                   std::size_t cols) {
    const auto header = tokens(next_line());
    if (header.size() != 4 || header[0] != "block" || header[1] != name) {
      fail("expected block '" + std::string(name) + "'");
    }
    const std::size_t r = count(header[2]);
    if ((rows && r != *rows) || count(header[3]) != cols) fail("unexpected block shape");
    std::vector<double> values;
    values.reserve(r * cols);
    for (std::size_t i = 0; i < r; ++i) {
      const auto row = numbers(next_line(), cols);
      values.insert(values.end(), row.begin(), row.end());
    }
    return values;
  }

  void expect_end() {
    if (next_line() != "end") fail("expected 'end'");
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::ParseError, what, line_start_);
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_start_ = 0;
};

inline void write_standardizer(ModelWriter& w, const std::optional<Standardizer>& s) {
  w.key("standardizer", s ? "1" : "0");
  if (s) {
    w.block("standardizer", 2, 2,
            {s->mean()[0], s->mean()[1], s->stddev()[0], s->stddev()[1]});
  }
}

inline std::optional<Standardizer> read_standardizer(ModelReader& r) {
  const auto flag = r.expect_key("standardizer");
  if (flag == "0") return std::nullopt;
  if (flag != "1") r.fail("standardizer flag must be 0 or 1");
  const auto v = r.expect_block("standardizer", 2, 2);
  if (!(v[2] > 0.0) || !(v[3] > 0.0)) r.fail("standardizer deviations must be positive");
  return Standardizer({v[0], v[1]}, {v[2], v[3]});
}

}  // namespace detail

inline std::string serialize_model(const ClassifierModel& model) {
  detail::ModelWriter w;
  w.line("waggle-model v" + std::to_string(kModelFormatVersion) + " " + std::string(to_string(model.kind())));
  if (const auto* lr = std::get_if<LogisticModel>(&model.params)) {
    w.key("l2_lambda", lr->l2_lambda);
    w.mask(lr->active);
    detail::write_standardizer(w, model.standardizer);
    std::vector<double> weights;
    for (const auto& row : lr->weights) weights.insert(weights.end(), row.begin(), row.end());
    w.block("weights", kNumClasses, 2, weights);
    w.block("bias", 1, kNumClasses, {lr->bias.begin(), lr->bias.end()});
  } else if (const auto* mlp = std::get_if<MlpModel>(&model.params)) {
    w.mask(mlp->active);
    detail::write_standardizer(w, model.standardizer);
    std::vector<double> hw, ow;
    for (const auto& row : mlp->hidden_weights) hw.insert(hw.end(), row.begin(), row.end());
    for (const auto& row : mlp->output_weights) ow.insert(ow.end(), row.begin(), row.end());
    w.block("hidden_weights", MlpModel::kHidden, MlpModel::kInputs, hw);
    w.block("hidden_bias", 1, MlpModel::kHidden, {mlp->hidden_bias.begin(), mlp->hidden_bias.end()});
    w.block("output_weights", MlpModel::kOutputs, MlpModel::kHidden, ow);
    w.block("output_bias", 1, MlpModel::kOutputs, {mlp->output_bias.begin(), mlp->output_bias.end()});
  } else {
    const auto& svm = std::get<SvmRbfModel>(model.params);
    w.key("gamma", svm.gamma);
    w.key("C", svm.C);
    w.mask(svm.active);
    detail::write_standardizer(w, model.standardizer);
    w.key("machines", std::to_string(svm.machines.size()));
    for (const BinarySvm& m : svm.machines) {
      w.key("pair", std::to_string(m.positive) + " " + std::to_string(m.negative));
      w.key("bias", m.bias);
      std::vector<double> rows;
      for (std::size_t i = 0; i < m.support.size(); ++i) {
        rows.insert(rows.end(), {m.support[i][0], m.support[i][1], m.coef[i]});
      }
      w.block("support", m.support.size(), 3, rows);
    }
  }
  w.line("end");
  return w.take();
}

inline ClassifierModel deserialize_model(std::string_view text) {
  detail::ModelReader r(text);
  const auto header = r.tokens(r.next_line());
  if (header.size() != 3 || header[0] != "waggle-model" || header[1].size() < 2 || header[1][0] != 'v') {
    r.fail("missing 'waggle-model v<N> <kind>' header");
  }
  const std::size_t version = r.count(header[1].substr(1));
  if (version != static_cast<std::size_t>(kModelFormatVersion)) {
    throw Error(ErrorKind::UnsupportedVersion,
                "model format v" + std::to_string(version) + " is not supported", 0);
  }
  const auto kind = classifier_kind_from_string(header[2]);
  if (!kind) r.fail("unknown model kind '" + std::string(header[2]) + "'");

  ClassifierModel model;
  switch (*kind) {
    case ClassifierKind::Logistic: {
      LogisticModel lr;
      lr.l2_lambda = r.expect_number("l2_lambda");
      lr.active = r.expect_mask();
      model.standardizer = detail::read_standardizer(r);
      const auto w = r.expect_block("weights", kNumClasses, 2);
      const auto b = r.expect_block("bias", 1, kNumClasses);
      for (std::size_t k = 0; k < kNumClasses; ++k) {
        lr.weights[k] = {w[2 * k], w[2 * k + 1]};
        lr.bias[k] = b[k];
      }
      model.params = lr;
      break;
    }
    case ClassifierKind::Mlp: {
      MlpModel mlp;
      mlp.active = r.expect_mask();
      model.standardizer = detail::read_standardizer(r);
      const auto hw = r.expect_block("hidden_weights", MlpModel::kHidden, MlpModel::kInputs);
      const auto hb = r.expect_block("hidden_bias", 1, MlpModel::kHidden);
      const auto ow = r.expect_block("output_weights", MlpModel::kOutputs, MlpModel::kHidden);
      const auto ob = r.expect_block("output_bias", 1, MlpModel::kOutputs);
      for (std::size_t h = 0; h < MlpModel::kHidden; ++h) {
        mlp.hidden_weights[h] = {hw[2 * h], hw[2 * h + 1]};
        mlp.hidden_bias[h] = hb[h];
      }
      for (std::size_t k = 0; k < MlpModel::kOutputs; ++k) {
        for (std::size_t h = 0; h < MlpModel::kHidden; ++h) mlp.output_weights[k][h] = ow[k * 3 + h];
        mlp.output_bias[k] = ob[k];
      }
      model.params = mlp;
      break;
    }
    case ClassifierKind::Svm: {
      SvmRbfModel svm;
      svm.gamma = r.expect_number("gamma");
      svm.C = r.expect_number("C");
      if (!(svm.gamma > 0.0) || !(svm.C > 0.0)) r.fail("gamma and C must be positive");
      svm.active = r.expect_mask();
      model.standardizer = detail::read_standardizer(r);
      const std::size_t count = r.count(r.expect_key("machines"));
      if (count > 3) r.fail("at most three pairwise machines");
      for (std::size_t m = 0; m < count; ++m) {
        BinarySvm machine;
        const auto pair = r.tokens(r.expect_key("pair"));
        if (pair.size() != 2) r.fail("pair needs two class indices");
        machine.positive = r.count(pair[0]);
        machine.negative = r.count(pair[1]);
        if (machine.positive >= machine.negative || machine.negative >= kNumClasses) r.fail("invalid class pair");
        machine.bias = r.expect_number("bias");
        const auto rows = r.expect_block("support", std::nullopt, 3);
        for (std::size_t i = 0; i < rows.size(); i += 3) {
          machine.support.push_back({rows[i], rows[i + 1]});
          machine.coef.push_back(rows[i + 2]);
        }
        svm.machines.push_back(std::move(machine));
      }
      model.params = std::move(svm);
      break;
    }
  }
  r.expect_end();
  return model;
}

}  // namespace waggle
