// Copyright 2026 The rcraf Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rcraf/activation.hpp"
#include "rcraf/adversarial.hpp"
#include "rcraf/bounds.hpp"
#include "rcraf/checkpoint.hpp"
#include "rcraf/data.hpp"
#include "rcraf/kernels.hpp"
#include "rcraf/net.hpp"
#include "rcraf/precision.hpp"
#include "rcraf/report.hpp"
#include "rcraf/training.hpp"

#ifndef RCRAF_VERSION
#define RCRAF_VERSION "0.0.0"
#endif

namespace rcraf::cli {
namespace {

using json = nlohmann::ordered_json;

constexpr double kDefaultGamma = 66.7228;
constexpr const char* kDefaultAlphaGrid = "5,10,20,36,43,50,100";

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Option registry: every bound variable is remembered so the resolved values
// can be written to the manifest.

static_assert(std::is_same_v<std::size_t, std::uint64_t>, "size_t options are bound as uint64_t");
using Binding = std::variant<double*, int*, std::uint64_t*, bool*, std::string*>;

struct Registry {
  std::vector<std::pair<std::string, Binding>> entries;

  json to_json() const {
    json j = json::object();
    for (const auto& [name, binding] : entries) {
      std::visit([&](auto* p) { j[name] = *p; }, binding);
    }
    return j;
  }
};

template <class T>
CLI::Option* bind_option(CLI::App* app, Registry& reg, const std::string& name, T& var,
                         const std::string& help) {
  reg.entries.emplace_back(name, &var);
  if constexpr (std::is_same_v<T, bool>) {
    return app->add_flag("--" + name, var, help);
  } else {
    return app->add_option("--" + name, var, help)->capture_default_str();
  }
}

struct Command {
  CLI::App* app = nullptr;
  Registry registry;
  int threads = 0;
  std::function<void(std::ostream&)> action;
  // Primary output; the manifest is written beside it when non-empty.
  std::function<std::string()> anchor;
};

// ---------------------------------------------------------------------------
// Small parsers.

double parse_real(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw ConfigError(what + ": '" + text + "' is not a number");
  }
  return v;
}

std::vector<std::string> split_on(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) parts.push_back(CLI::detail::trim_copy(item));
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

std::vector<double> parse_reals(const std::string& text, const std::string& what) {
  std::vector<double> values;
  if (CLI::detail::trim_copy(text).empty()) return values;
  for (const auto& part : split_on(text, ',')) values.push_back(parse_real(part, what));
  return values;
}

std::vector<std::size_t> parse_counts(const std::string& text, const std::string& what) {
  std::vector<std::size_t> values;
  for (double v : parse_reals(text, what)) {
    if (!(v >= 1.0) || v != std::floor(v) || v > 1e9) {
      throw ConfigError(what + ": expected positive integers");
    }
    values.push_back(static_cast<std::size_t>(v));
  }
  return values;
}

std::optional<std::pair<double, double>> parse_bounds(const std::string& text) {
  const auto v = parse_reals(text, "input-bounds");
  if (v.empty()) return std::nullopt;
  if (v.size() != 2 || !(v[0] < v[1])) throw ConfigError("input-bounds: expected lo,hi with lo < hi");
  return std::pair{v[0], v[1]};
}

ActivationSpec parse_activation(const std::string& name, double alpha, double gamma) {
  const auto kind = parse_activation_kind(name);
  if (!kind) throw ConfigError("unknown activation '" + name + "'");
  ActivationSpec spec = *kind == ActivationKind::kRcrAf ? ActivationSpec::rcraf(alpha, gamma)
                                                        : ActivationSpec::baseline(*kind);
  spec.validate();
  return spec;
}

ReportFormat pick_format(const std::string& format, const std::string& path) {
  if (format == "csv") return ReportFormat::kCsv;
  if (format == "json") return ReportFormat::kJson;
  if (!format.empty()) throw ConfigError("format must be csv or json");
  return path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0 ? ReportFormat::kJson
                                                                            : ReportFormat::kCsv;
}

void emit(const Table& table, const std::string& path, const std::string& format,
          std::ostream& out) {
  const ReportFormat f = pick_format(format, path);
  if (path.empty()) {
    out << (f == ReportFormat::kJson ? to_json(table) : to_csv(table));
  } else {
    write_report(table, path, f);
  }
}

json real_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void emit_json(const json& j, const std::string& path, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty()) {
    out << text;
  } else {
    write_text_file(path, text);
  }
}

// ---------------------------------------------------------------------------
// activation-table

void add_activation_table(CLI::App& root, Command& cmd) {
  struct Flags {
    std::string kind = "rcraf";
    double alpha = 1.0;
    double gamma = kDefaultGamma;
    double min = -5.0;
    double max = 5.0;
    std::size_t points = 201;
    std::string out;
    std::string format;
  };
  auto f = std::make_shared<Flags>();
  cmd.app = root.add_subcommand("activation-table", "Tabulate an activation and its derivative");
  auto* app = cmd.app;
  auto& reg = cmd.registry;
  bind_option(app, reg, "kind", f->kind, "rcraf, relu, gelu or swish");
  bind_option(app, reg, "alpha", f->alpha, "RCR-AF slope");
  bind_option(app, reg, "gamma", f->gamma, "RCR-AF clip level");
  bind_option(app, reg, "min", f->min, "First grid point");
  bind_option(app, reg, "max", f->max, "Last grid point");
  bind_option(app, reg, "points", f->points, "Number of grid points");
  bind_option(app, reg, "out", f->out, "Output path (stdout when empty)");
  bind_option(app, reg, "format", f->format, "csv or json (default from extension)");
  cmd.anchor = [f] { return f->out; };
  cmd.action = [f](std::ostream& out) {
    const ActivationSpec spec = parse_activation(f->kind, f->alpha, f->gamma);
    Table t{{"x", "value", "derivative"}, {}};
    for (const auto& row : activation_table(spec, f->min, f->max, f->points)) {
      t.add_row({row.x, row.value, row.derivative});
    }
    emit(t, f->out, f->format, out);
  };
}

// ---------------------------------------------------------------------------
// sparsity

void add_sparsity(CLI::App& root, Command& cmd) {
  struct Flags {
    std::string sigmas = "1";
    double alpha = 36.0;
    double gamma = kDefaultGamma;
    int bits = 32;
    std::string checkpoint;
    std::string data;
    std::string out;
    std::string format;
  };
  auto f = std::make_shared<Flags>();
  cmd.app = root.add_subcommand("sparsity", "Predicted clipped-region sparsity per layer");
  auto* app = cmd.app;
  auto& reg = cmd.registry;
  bind_option(app, reg, "sigmas", f->sigmas, "Comma-separated pre-activation std-devs, one per layer");
  bind_option(app, reg, "alpha", f->alpha, "RCR-AF slope");
  bind_option(app, reg, "gamma", f->gamma, "RCR-AF clip level");
  bind_option(app, reg, "bits", f->bits, "Floating-point width: 16, 32 or 64");
  bind_option(app, reg, "checkpoint", f->checkpoint,
       "Measure sigmas from this network on --data (overrides --sigmas, --alpha, --gamma)");
  bind_option(app, reg, "data", f->data, "Dataset CSV used with --checkpoint");
  bind_option(app, reg, "out", f->out, "Output path (stdout when empty)");
  bind_option(app, reg, "format", f->format, "csv or json (default from extension)");
  cmd.anchor = [f] { return f->out; };
  cmd.action = [f](std::ostream& out) {
    std::vector<double> sigmas = parse_reals(f->sigmas, "sigmas");
    double alpha = f->alpha;
    double gamma = f->gamma;
    if (!f->checkpoint.empty()) {
      if (f->data.empty()) throw ConfigError("--checkpoint needs --data");
      const DenseNetwork net = load_checkpoint(f->checkpoint);
      if (net.spec().activation.kind != ActivationKind::kRcrAf) {
        throw ConfigError("sparsity: checkpoint does not use RCR-AF");
      }
      const Dataset data = load_csv(f->data, static_cast<int>(net.num_classes()));
      sigmas.clear();
      for (const auto& layer : activation_sparsity(net, data.features())) {
        sigmas.push_back(layer.sigma);
      }
      alpha = net.spec().activation.alpha;
      gamma = net.spec().activation.gamma;
    }
    const auto rows = sparsity_report(sigmas, alpha, gamma, PrecisionModel::for_bits(f->bits));
    Table t{{"layer", "sigma", "alpha", "gamma", "p_sparsity", "m_clip"}, {}};
    for (const auto& r : rows) {
      t.add_row({static_cast<std::int64_t>(r.layer), r.sigma, r.alpha, r.gamma, r.p_sparsity,
                 r.m_clip});
    }
    emit(t, f->out, f->format, out);
  };
}

// ---------------------------------------------------------------------------
// bounds

struct BoundSpecFile {
  std::vector<LayerBoundSpec> layers;
  BoundConfig config;
  bool has_alpha = false;
};

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok |= key == a;
    if (!ok) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

BoundSpecFile load_bound_spec(const std::string& path) {
  const json j = read_json_file(path);
  BoundSpecFile spec;
  try {
    if (!j.is_object()) throw ConfigError(path + ": expected an object");
    reject_unknown_keys(j, {"layers", "config"}, path);
    for (const auto& l : j.at("layers")) {
      reject_unknown_keys(l, {"d_in", "d_out", "k", "b"}, path + " layer");
      spec.layers.push_back({l.at("d_in").get<std::size_t>(), l.at("d_out").get<std::size_t>(),
                             l.at("k").get<double>(), l.at("b").get<double>()});
    }
    if (j.contains("config")) {
      const json& c = j.at("config");
      reject_unknown_keys(c, {"alpha", "gamma", "n", "c", "epsilons", "epsilon_total",
                              "zeta_denominator", "lambda"},
                          path + " config");
      BoundConfig& cfg = spec.config;
      if (c.contains("alpha")) {
        cfg.alpha = c.at("alpha").get<double>();
        spec.has_alpha = true;
      }
      if (c.contains("gamma")) cfg.gamma = c.at("gamma").get<double>();
      if (c.contains("n")) cfg.n = c.at("n").get<std::size_t>();
      if (c.contains("c")) cfg.c = c.at("c").get<double>();
      if (c.contains("epsilons")) cfg.epsilons = c.at("epsilons").get<std::vector<double>>();
      if (c.contains("epsilon_total")) cfg.epsilon_total = c.at("epsilon_total").get<double>();
      if (c.contains("lambda")) cfg.lambda = c.at("lambda").get<double>();
      if (c.contains("zeta_denominator")) {
        const auto d = c.at("zeta_denominator").get<std::string>();
        if (d == "gamma") {
          cfg.zeta_denominator = ZetaDenominator::kGamma;
        } else if (d == "lambda") {
          cfg.zeta_denominator = ZetaDenominator::kLambda;
        } else {
          throw ConfigError(path + ": zeta_denominator must be gamma or lambda");
        }
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (spec.layers.empty()) throw ConfigError(path + ": no layers");
  return spec;
}

void add_bounds(CLI::App& root, Command& cmd) {
  struct Flags {
    std::string spec;
    std::string alpha_grid;
    std::string out;
    std::string report;
    std::string format;
  };
  auto f = std::make_shared<Flags>();
  cmd.app = root.add_subcommand("bounds", "Clipped Rademacher bound over an alpha grid");
  auto* app = cmd.app;
  auto& reg = cmd.registry;
  bind_option(app, reg, "spec", f->spec, "Network spec JSON (layers and config)")->required();
  bind_option(app, reg, "alpha-grid", f->alpha_grid,
       std::string("Comma-separated alphas (default: the spec's alpha, else ") + kDefaultAlphaGrid +
           ")");
  bind_option(app, reg, "out", f->out, "Bound table path (stdout when empty)");
  bind_option(app, reg, "report", f->report, "Per-layer JSON report (default <out>.layers.json)");
  bind_option(app, reg, "format", f->format, "csv or json for --out (default from extension)");
  cmd.anchor = [f] { return f->out; };
  cmd.action = [f](std::ostream& out) {
    const BoundSpecFile spec = load_bound_spec(f->spec);
    std::vector<double> grid = parse_reals(f->alpha_grid, "alpha-grid");
    if (grid.empty()) {
      grid = spec.has_alpha ? std::vector<double>{spec.config.alpha}
                            : parse_reals(kDefaultAlphaGrid, "alpha-grid");
    }
    const auto rows = alpha_sweep(spec.layers, spec.config, grid);
    Table t{{"alpha", "bound", "unclipped_bound"}, {}};
    for (const auto& r : rows) t.add_row({r.alpha, r.bound, r.unclipped_bound});
    emit(t, f->out, f->format, out);

    std::string report_path = f->report;
    if (report_path.empty() && !f->out.empty()) report_path = f->out + ".layers.json";
    if (report_path.empty()) return;
    Table layers{{"alpha", "layer", "lipschitz", "zeta", "eta", "k_clip", "b_clip", "c_in",
                  "c_out", "epsilon", "m_clip"},
                 {}};
    for (const auto& r : rows) {
      BoundConfig cfg = spec.config;
      cfg.alpha = r.alpha;
      const BoundReport rep = rademacher_bound(spec.layers, cfg);
      for (std::size_t i = 0; i < rep.layers.size(); ++i) {
        const auto& l = rep.layers[i];
        layers.add_row({r.alpha, static_cast<std::int64_t>(i), l.lipschitz, l.zeta, l.eta,
                        l.k_clip, l.b_clip, l.c_in, l.c_out, l.epsilon, rep.m_clip});
      }
    }
    write_report(layers, report_path, ReportFormat::kJson);
  };
}

// ---------------------------------------------------------------------------
// gen-data

void add_gen_data(CLI::App& root, Command& cmd) {
  struct Flags {
    std::string kind = "moons";
    std::size_t n = 1000;
    double noise = 0.1;
    double factor = 0.5;
    std::string centers = "0,0;3,3";
    double std = 1.0;
    std::uint64_t seed = 0;
    double test_fraction = 0.0;
    bool normalize = false;
    std::string out;
    std::string test_out;
  };
  auto f = std::make_shared<Flags>();
  cmd.app = root.add_subcommand("gen-data", "Generate a synthetic dataset as CSV");
  auto* app = cmd.app;
  auto& reg = cmd.registry;
  bind_option(app, reg, "kind", f->kind, "moons, blobs or circles");
  bind_option(app, reg, "n", f->n, "Number of samples before splitting");
  bind_option(app, reg, "noise", f->noise, "Gaussian noise std-dev (moons, circles)");
  bind_option(app, reg, "factor", f->factor, "Inner radius (circles)");
  bind_option(app, reg, "centers", f->centers, "Blob centers as x,y;x,y;...");
  bind_option(app, reg, "std", f->std, "Blob std-dev");
  bind_option(app, reg, "seed", f->seed, "Generator and split seed");
  bind_option(app, reg, "test-fraction", f->test_fraction, "Held-out fraction written to --test-out");
  bind_option(app, reg, "normalize", f->normalize, "Standardize features with training statistics");
  bind_option(app, reg, "out", f->out, "Training CSV path")->required();
  bind_option(app, reg, "test-out", f->test_out, "Held-out CSV path");
  cmd.anchor = [f] { return f->out; };
  cmd.action = [f](std::ostream& out) {
    if (!(f->test_fraction >= 0.0 && f->test_fraction < 1.0)) {
      throw ConfigError("test-fraction must be in [0, 1)");
    }
    if ((f->test_fraction > 0.0) != !f->test_out.empty()) {
      throw ConfigError("--test-out and a positive --test-fraction go together");
    }
    Dataset data = [&] {
      if (f->kind == "moons") return two_moons(f->n, f->noise, f->seed);
      if (f->kind == "circles") return circles(f->n, f->noise, f->factor, f->seed);
      if (f->kind == "blobs") {
        std::vector<std::vector<double>> centers;
        for (const auto& c : split_on(f->centers, ';')) centers.push_back(parse_reals(c, "centers"));
        return gaussian_blobs(f->n, centers, f->std, f->seed);
      }
      throw ConfigError("unknown dataset kind '" + f->kind + "'");
    }();
    std::optional<Dataset> test;
    if (f->test_fraction > 0.0) {
      auto [tr, te] = split(data, 1.0 - f->test_fraction, f->seed);
      data = std::move(tr);
      test = std::move(te);
    }
    if (f->normalize) {
      const Standardizer s = Standardizer::fit(data);
      data = s.apply(data);
      if (test) test = s.apply(*test);
    }
    save_csv(data, f->out);
    if (test) save_csv(*test, f->test_out);
    json j;
    j["train"] = data.size();
    j["test"] = test ? test->size() : 0;
    j["dims"] = data.dims();
    j["classes"] = data.num_classes();
    out << j.dump() << "\n";
  };
}

// ---------------------------------------------------------------------------
// Training commands.

struct TrainFlags {
  std::string data;
  std::string test;
  std::string hidden = "64,64";
  std::string activation = "rcraf";
  double alpha = 36.0;
  double gamma = kDefaultGamma;
  std::size_t epochs = 100;
  std::size_t batch_size = 64;
  double lr = 0.05;
  double momentum = 0.9;
  double weight_decay = 0.0;
  double ema_decay = 0.0;
  std::uint64_t seed = 0;
  double eval_eps = -1.0;
  std::size_t eval_steps = 20;
  double eval_step_size = 0.0;
  std::uint64_t eval_seed = 0;
  std::size_t eval_every = 1;
  std::string input_bounds;
};

struct AttackFlags {
  double eps = 0.1;
  std::size_t steps = 10;
  double step_size = 0.0;
  std::uint64_t attack_seed = 0;
};

void bind_train_flags(CLI::App* app, Registry& reg, TrainFlags& f, bool with_activation) {
  bind_option(app, reg, "data", f.data, "Training CSV")->required();
  bind_option(app, reg, "test", f.test, "Evaluation CSV (default: the training set)");
  bind_option(app, reg, "hidden", f.hidden, "Hidden layer widths, comma-separated");
  if (with_activation) {
    bind_option(app, reg, "activation", f.activation, "rcraf, relu, gelu or swish");
    bind_option(app, reg, "alpha", f.alpha, "RCR-AF slope");
  }
  bind_option(app, reg, "gamma", f.gamma, "RCR-AF clip level");
  bind_option(app, reg, "epochs", f.epochs, "Training epochs");
  bind_option(app, reg, "batch-size", f.batch_size, "Mini-batch size");
  bind_option(app, reg, "lr", f.lr, "Learning rate");
  bind_option(app, reg, "momentum", f.momentum, "Heavy-ball momentum");
  bind_option(app, reg, "weight-decay", f.weight_decay, "Decoupled weight decay");
  bind_option(app, reg, "ema-decay", f.ema_decay, "Weight EMA decay (0 disables)");
  bind_option(app, reg, "seed", f.seed, "Initialisation and shuffling seed");
  bind_option(app, reg, "eval-eps", f.eval_eps,
       "Evaluation PGD radius (negative: training radius, or none for standard training)");
  bind_option(app, reg, "eval-steps", f.eval_steps, "Evaluation PGD iterations");
  bind_option(app, reg, "eval-step-size", f.eval_step_size, "Evaluation PGD step (0: 2.5 eps / steps)");
  bind_option(app, reg, "eval-seed", f.eval_seed, "Evaluation PGD seed");
  bind_option(app, reg, "eval-every", f.eval_every, "Epochs between history evaluations");
  bind_option(app, reg, "input-bounds", f.input_bounds, "Input box lo,hi for attacks (default none)");
}

void bind_attack_flags(CLI::App* app, Registry& reg, AttackFlags& a) {
  bind_option(app, reg, "eps", a.eps, "Training PGD radius");
  bind_option(app, reg, "steps", a.steps, "Training PGD iterations");
  bind_option(app, reg, "step-size", a.step_size, "Training PGD step (0: 2.5 eps / steps)");
  bind_option(app, reg, "attack-seed", a.attack_seed, "Training PGD seed");
}

AttackConfig attack_config(const AttackFlags& a, const TrainFlags& f) {
  AttackConfig cfg;
  cfg.epsilon = a.eps;
  cfg.iterations = a.steps;
  cfg.step_size = a.step_size;
  cfg.seed = a.attack_seed;
  cfg.input_bounds = parse_bounds(f.input_bounds);
  cfg.validate();
  return cfg;
}

struct Datasets {
  Dataset train;
  std::optional<Dataset> test;
  const Dataset& eval() const { return test ? *test : train; }
};

Datasets load_datasets(const TrainFlags& f) {
  Datasets d{load_csv(f.data), std::nullopt};
  if (!f.test.empty()) d.test = load_csv(f.test, d.train.num_classes());
  return d;
}

struct Outcome {
  TrainResult result;
  double train_loss;
  double clean;
  double robust;
  double eval_eps;
};

Outcome train_one(const TrainFlags& f, const ActivationSpec& act,
                  const std::optional<AttackConfig>& train_attack, const Datasets& data) {
  std::vector<std::size_t> widths = {data.train.dims()};
  for (std::size_t w : parse_counts(f.hidden, "hidden")) widths.push_back(w);
  widths.push_back(static_cast<std::size_t>(data.train.num_classes()));
  const NetworkSpec spec{widths, act, f.seed};

  TrainConfig cfg;
  cfg.epochs = f.epochs;
  cfg.batch_size = f.batch_size;
  cfg.learning_rate = f.lr;
  cfg.momentum = f.momentum;
  cfg.weight_decay = f.weight_decay;
  if (f.ema_decay > 0.0) cfg.ema_decay = f.ema_decay;
  cfg.seed = f.seed;

  const double eval_eps = f.eval_eps >= 0.0 ? f.eval_eps
                          : train_attack   ? train_attack->epsilon
                                           : 0.0;
  std::optional<AttackConfig> eval_attack;
  if (eval_eps > 0.0) {
    AttackConfig e;
    e.epsilon = eval_eps;
    e.iterations = f.eval_steps;
    e.step_size = f.eval_step_size;
    e.seed = f.eval_seed;
    e.input_bounds = parse_bounds(f.input_bounds);
    e.validate();
    eval_attack = e;
  }

  FitOptions opts;
  opts.train_attack = train_attack;
  opts.eval_set = &data.eval();
  opts.eval_attack = eval_attack;
  opts.eval_every = f.eval_every;
  TrainResult result = fit(spec, cfg, data.train, opts);

  const double clean = evaluate_accuracy(result.net, data.eval());
  const double robust = eval_attack ? robust_accuracy(result.net, data.eval(), *eval_attack)
                                    : std::numeric_limits<double>::quiet_NaN();
  const double loss = result.history.back().train_loss;
  return {std::move(result), loss, clean, robust, eval_eps};
}

Table history_table(const TrainResult& r) {
  Table t{{"epoch", "train_loss", "clean_acc", "robust_acc"}, {}};
  for (const auto& m : r.history) {
    t.add_row({static_cast<std::int64_t>(m.epoch), m.train_loss, m.clean_accuracy,
               m.robust_accuracy});
  }
  return t;
}

void add_train(CLI::App& root, Command& cmd, bool adversarial) {
  struct Flags {
    TrainFlags train;
    AttackFlags attack;
    std::string out;
    std::string summary;
    std::string checkpoint;
    std::string format;
  };
  auto f = std::make_shared<Flags>();
  cmd.app = adversarial
                ? root.add_subcommand("train-adv", "PGD adversarial training on a CSV dataset")
                : root.add_subcommand("train", "Standard training on a CSV dataset");
  auto* app = cmd.app;
  auto& reg = cmd.registry;
  bind_train_flags(app, reg, f->train, true);
  if (adversarial) bind_attack_flags(app, reg, f->attack);
  bind_option(app, reg, "out", f->out, "Per-epoch history path");
  bind_option(app, reg, "summary", f->summary, "Summary JSON path (stdout always receives it)");
  bind_option(app, reg, "checkpoint", f->checkpoint, "Write the trained network here");
  bind_option(app, reg, "format", f->format, "csv or json for --out (default from extension)");
  cmd.anchor = [f] { return !f->out.empty() ? f->out : f->summary; };
  const std::string name = app->get_name();
  cmd.action = [f, adversarial, name](std::ostream& out) {
    const ActivationSpec act = parse_activation(f->train.activation, f->train.alpha,
                                                f->train.gamma);
    std::optional<AttackConfig> attack;
    if (adversarial) attack = attack_config(f->attack, f->train);
    const Datasets data = load_datasets(f->train);
    const Outcome o = train_one(f->train, act, attack, data);

    if (!f->out.empty()) emit(history_table(o.result), f->out, f->format, out);
    if (!f->checkpoint.empty()) save_checkpoint(o.result.net, f->checkpoint);
    json j;
    j["command"] = name;
    j["activation"] = std::string(to_string(act.kind));
    j["alpha"] = act.alpha;
    j["gamma"] = act.gamma;
    j["epochs"] = f->train.epochs;
    j["train_loss"] = real_or_null(o.train_loss);
    j["clean_acc"] = real_or_null(o.clean);
    j["robust_acc"] = real_or_null(o.robust);
    j["eval_eps"] = o.eval_eps;
    if (!f->summary.empty()) emit_json(j, f->summary, out);
    out << j.dump() << "\n";
  };
}

// ---------------------------------------------------------------------------
// attack-eval

void add_attack_eval(CLI::App& root, Command& cmd) {
  struct Flags {
    std::string checkpoint;
    std::string data;
    double eps = 0.1;
    std::size_t steps = 20;
    double step_size = 0.0;
    std::size_t restarts = 1;
    std::uint64_t seed = 0;
    std::string input_bounds;
    std::string out;
  };
  auto f = std::make_shared<Flags>();
  cmd.app = root.add_subcommand("attack-eval", "Clean and PGD robust accuracy of a checkpoint");
  auto* app = cmd.app;
  auto& reg = cmd.registry;
  bind_option(app, reg, "checkpoint", f->checkpoint, "Network checkpoint")->required();
  bind_option(app, reg, "data", f->data, "Evaluation CSV")->required();
  bind_option(app, reg, "eps", f->eps, "PGD radius");
  bind_option(app, reg, "steps", f->steps, "PGD iterations");
  bind_option(app, reg, "step-size", f->step_size, "PGD step (0: 2.5 eps / steps)");
  bind_option(app, reg, "restarts", f->restarts, "Random restarts");
  bind_option(app, reg, "seed", f->seed, "PGD seed");
  bind_option(app, reg, "input-bounds", f->input_bounds, "Input box lo,hi (default none)");
  bind_option(app, reg, "out", f->out, "JSON output path (stdout when empty)");
  cmd.anchor = [f] { return f->out; };
  cmd.action = [f](std::ostream& out) {
    AttackConfig cfg;
    cfg.epsilon = f->eps;
    cfg.iterations = f->steps;
    cfg.step_size = f->step_size;
    cfg.restarts = f->restarts;
    cfg.seed = f->seed;
    cfg.input_bounds = parse_bounds(f->input_bounds);
    cfg.validate();
    const DenseNetwork net = load_checkpoint(f->checkpoint);
    const Dataset data = load_csv(f->data, static_cast<int>(net.num_classes()));
    json j;
    j["clean_acc"] = evaluate_accuracy(net, data);
    j["robust_acc"] = robust_accuracy(net, data, cfg);
    j["eps"] = f->eps;
    j["steps"] = f->steps;
    emit_json(j, f->out, out);
  };
}

// ---------------------------------------------------------------------------
// sweep-alpha

void add_sweep_alpha(CLI::App& root, Command& cmd) {
  struct Flags {
    std::string mode = "std";
    std::string alpha_grid = kDefaultAlphaGrid;
    std::string baselines;
    TrainFlags train;
    AttackFlags attack;
    std::string out;
    std::string format;
  };
  auto f = std::make_shared<Flags>();
  cmd.app = root.add_subcommand("sweep-alpha", "Train once per alpha and summarise each run");
  auto* app = cmd.app;
  auto& reg = cmd.registry;
  bind_option(app, reg, "mode", f->mode, "std or adv");
  bind_option(app, reg, "alpha-grid", f->alpha_grid, "Comma-separated alphas");
  bind_option(app, reg, "baselines", f->baselines, "Extra activations to compare, e.g. relu,gelu");
  bind_train_flags(app, reg, f->train, false);
  bind_attack_flags(app, reg, f->attack);
  bind_option(app, reg, "out", f->out, "Summary table path (stdout when empty)");
  bind_option(app, reg, "format", f->format, "csv or json (default from extension)");
  cmd.anchor = [f] { return f->out; };
  cmd.action = [f](std::ostream& out) {
    if (f->mode != "std" && f->mode != "adv") throw ConfigError("mode must be std or adv");
    const std::vector<double> grid = parse_reals(f->alpha_grid, "alpha-grid");
    if (grid.empty()) throw ConfigError("alpha-grid is empty");
    std::vector<ActivationSpec> runs;
    for (double a : grid) runs.push_back(parse_activation("rcraf", a, f->train.gamma));
    for (const auto& b : split_on(f->baselines, ',')) {
      if (!b.empty()) runs.push_back(parse_activation(b, 1.0, f->train.gamma));
    }
    std::optional<AttackConfig> attack;
    if (f->mode == "adv") attack = attack_config(f->attack, f->train);
    const Datasets data = load_datasets(f->train);

    Table t{{"activation", "alpha", "gamma", "train_loss", "clean_acc", "robust_acc", "sparsity"},
            {}};
    for (const auto& act : runs) {
      const Outcome o = train_one(f->train, act, attack, data);
      Cell sparsity;
      if ((act.kind == ActivationKind::kRcrAf || act.kind == ActivationKind::kRelu) &&
          o.result.net.layers().size() > 1) {
        double sum = 0.0;
        const auto layers = activation_sparsity(o.result.net, data.eval().features());
        for (const auto& l : layers) sum += l.fraction;
        sparsity = sum / static_cast<double>(layers.size());
      }
      const bool rcraf = act.kind == ActivationKind::kRcrAf;
      t.add_row({std::string(to_string(act.kind)), rcraf ? Cell{act.alpha} : Cell{},
                 rcraf ? Cell{act.gamma} : Cell{}, o.train_loss, o.clean, o.robust, sparsity});
    }
    emit(t, f->out, f->format, out);
  };
}

// ---------------------------------------------------------------------------
// Config files.

std::string json_scalar(const json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return v.dump();
  throw ConfigError("config key '" + key + "' must be a string, number or boolean");
}

// Options for `command` from a flat, nested ({command: {...}}) or manifest
// ({command, options}) config file.
json config_options(const json& j, const std::string& command,
                    const std::vector<std::string>& commands) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (j.contains("options") && j.contains("command")) {
    reject_unknown_keys(j, {"tool", "version", "command", "options"}, "config");
    if (j.at("command") != command) {
      throw ConfigError("config was written for '" + j.at("command").dump() + "'");
    }
    return j.at("options");
  }
  bool nested = false;
  for (const auto& c : commands) nested |= j.contains(c);
  if (!nested) return j;
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const auto& c : commands) known |= key == c;
    if (!known) throw ConfigError("config: unknown key '" + key + "'");
  }
  return j.contains(command) ? j.at(command) : json::object();
}

int run_impl(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"RCR-AF activation analysis, bounds and adversarial training", "rcraf"};
  app.set_version_flag("--version", std::string(RCRAF_VERSION));
  app.require_subcommand(1, 1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  std::vector<std::unique_ptr<Command>> commands;
  auto make = [&]() -> Command& { return *commands.emplace_back(std::make_unique<Command>()); };
  add_activation_table(app, make());
  add_sparsity(app, make());
  add_bounds(app, make());
  add_gen_data(app, make());
  add_train(app, make(), false);
  add_train(app, make(), true);
  add_attack_eval(app, make());
  add_sweep_alpha(app, make());
  std::vector<std::string> names;
  for (auto& c : commands) {
    names.push_back(c->app->get_name());
    c->app->add_option("--config", "JSON config file; explicit flags take precedence");
    bind_option(c->app, c->registry, "threads", c->threads, "Worker thread cap (0: all)");
  }

  // Splice config values in front of the explicit flags.
  Command* selected = nullptr;
  for (auto& c : commands) {
    if (!args.empty() && c->app->get_name() == args[0]) selected = c.get();
  }
  if (selected != nullptr) {
    std::string config_path;
    std::vector<std::string> rest;
    for (std::size_t i = 1; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size()) {
        config_path = args[++i];
      } else if (args[i].rfind("--config=", 0) == 0) {
        config_path = args[i].substr(9);
      } else {
        rest.push_back(args[i]);
      }
    }
    std::vector<std::string> spliced = {args[0]};
    if (!config_path.empty()) {
      const json options = config_options(read_json_file(config_path), args[0], names);
      if (!options.is_object()) throw ConfigError("config options must be an object");
      for (const auto& [key, value] : options.items()) {
        if (key == "config" || selected->app->get_option_no_throw("--" + key) == nullptr) {
          throw ConfigError("config: unknown option '" + key + "' for " + args[0]);
        }
        if (value.is_boolean()) {
          spliced.push_back("--" + key + "=" + json_scalar(value, key));
        } else {
          spliced.push_back("--" + key);
          spliced.push_back(json_scalar(value, key));
        }
      }
    }
    spliced.insert(spliced.end(), rest.begin(), rest.end());
    args = std::move(spliced);
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << (selected ? selected->app->help() : app.help());
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << RCRAF_VERSION << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << (selected ? selected->app->help() : app.help());
    return kExitConfig;
  }

  if (selected->threads < 0) throw ConfigError("threads must be non-negative");
  kernels::set_thread_limit(selected->threads);
  selected->action(out);
  const std::string anchor = selected->anchor ? selected->anchor() : std::string();
  if (!anchor.empty()) {
    json manifest;
    manifest["tool"] = "rcraf";
    manifest["version"] = RCRAF_VERSION;
    manifest["command"] = selected->app->get_name();
    manifest["options"] = selected->registry.to_json();
    write_text_file(anchor + ".manifest.json", manifest.dump(2) + "\n");
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return run_impl(args, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace rcraf::cli
