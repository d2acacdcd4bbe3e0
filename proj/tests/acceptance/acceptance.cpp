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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails, except those named with
// --known-failure, which are still reported as FAIL.
//
//   rcraf_acceptance [--workdir DIR] [--only 1,2,...] [--known-failure 7,...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "cli.hpp"
#include "json.hpp"
#include "rcraf/activation.hpp"
#include "rcraf/adversarial.hpp"
#include "rcraf/bounds.hpp"
#include "rcraf/data.hpp"
#include "rcraf/kernels.hpp"
#include "rcraf/net.hpp"
#include "rcraf/random.hpp"
#include "rcraf/training.hpp"

namespace {

namespace fs = std::filesystem;
using namespace rcraf;

constexpr double kGamma = 66.7228;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------

Outcome analytic_identities() {
  Outcome o;
  for (double alpha : {1.0, 10.0, 20.0}) {
    const double m = (std::log1p(std::exp(-kGamma)) + kGamma) / alpha;
    double worst = 0.0;
    double prev = -INFINITY;
    bool monotone = true, positive = true, bounded = true;
    for (int i = 0; i <= 10000; ++i) {
      const double x = -50.0 + 0.01 * i;
      const double v = rcraf_forward(x, alpha, kGamma);
      worst = std::max(worst, std::abs(v - oracle::rcraf(x, alpha, kGamma)));
      monotone &= v >= prev;
      positive &= v > 0.0;
      bounded &= v <= m;
      prev = v;
    }
    o.require(worst < 1e-12, "alpha=" + fmt("%g", alpha) + " identity error " + fmt("%.3g", worst));
    o.require(monotone, "alpha=" + fmt("%g", alpha) + " not monotone");
    o.require(positive, "alpha=" + fmt("%g", alpha) + " not positive");
    o.require(bounded, "alpha=" + fmt("%g", alpha) + " exceeds M_clip");

    // Unclipped regime: the gap to ReLU peaks at x = 0 with value ln2 / alpha.
    const double limit = std::numbers::ln2 / alpha;
    double sup = 0.0;
    for (int i = 0; i <= 10000; ++i) {
      const double x = -5.0 + 1e-3 * i;
      sup = std::max(sup, std::abs(rcraf_forward(x, alpha, 700.0) - std::max(x, 0.0)));
    }
    o.require(std::abs(sup - limit) <= 1e-15,
              "alpha=" + fmt("%g", alpha) + " relu gap " + fmt("%.17g", sup));
    if (alpha == 1.0) o.note("max identity error " + fmt("%.2g", worst));
  }
  return o;
}

// ---------------------------------------------------------------------------

Matrix normal_batch(std::size_t rows, std::size_t cols, std::uint64_t seed, double scale) {
  const CounterRng rng(seed, Stream::kData);
  Matrix m(rows, cols);
  for (std::size_t k = 0; k < m.size(); ++k) m.values()[k] = scale * rng.normal(k);
  return m;
}

bool away_from_kinks(const DenseNetwork& net, const Matrix& x, double margin) {
  const auto pass = forward(net, x);
  const auto& act = net.spec().activation;
  for (std::size_t i = 0; i + 1 < pass.pre.size(); ++i) {
    for (double z : pass.pre[i].values()) {
      if (act.kind == ActivationKind::kRelu && std::abs(z) <= margin) return false;
      if (act.kind == ActivationKind::kRcrAf &&
          std::abs(std::abs(z) - act.clip_bound()) <= margin) {
        return false;
      }
    }
  }
  return true;
}

Outcome gradient_fidelity() {
  Outcome o;
  const double h = 1e-4;
  const std::vector<ActivationSpec> acts = {
      ActivationSpec::rcraf(2.0, 3.0), ActivationSpec::baseline(ActivationKind::kRelu),
      ActivationSpec::baseline(ActivationKind::kGelu),
      ActivationSpec::baseline(ActivationKind::kSwish)};
  double overall = 0.0;
  for (const auto& act : acts) {
    const std::string name(to_string(act.kind));
    const DenseNetwork net = init_network({{2, 5, 3}, act, 3});
    const Matrix x = normal_batch(6, 2, 21, 1.5);
    const std::vector<int> y = {0, 1, 2, 2, 1, 0};
    if (!away_from_kinks(net, x, 1e-3)) {
      o.require(false, name + ": fixture touches a kink");
      continue;
    }
    const LossGradients lg = loss_and_backward(net, x, y);
    const Matrix gx = input_gradient(net, x, y);
    double worst = 0.0;
    auto check = [&](double analytic, double numeric) {
      worst = std::max(worst, std::abs(analytic - numeric) / std::max(1.0, std::abs(analytic)));
    };
    for (std::size_t l = 0; l < net.layers().size(); ++l) {
      for (std::size_t k = 0; k < net.layers()[l].weights.size(); ++k) {
        DenseNetwork p = net, m = net;
        p.layers()[l].weights.values()[k] += h;
        m.layers()[l].weights.values()[k] -= h;
        check(lg.params.weights[l].values()[k], (mean_loss(p, x, y) - mean_loss(m, x, y)) / (2 * h));
      }
      for (std::size_t k = 0; k < net.layers()[l].bias.size(); ++k) {
        DenseNetwork p = net, m = net;
        p.layers()[l].bias[k] += h;
        m.layers()[l].bias[k] -= h;
        check(lg.params.biases[l][k], (mean_loss(p, x, y) - mean_loss(m, x, y)) / (2 * h));
      }
    }
    for (std::size_t k = 0; k < x.size(); ++k) {
      Matrix p = x, m = x;
      p.values()[k] += h;
      m.values()[k] -= h;
      check(gx.values()[k], (mean_loss(net, p, y) - mean_loss(net, m, y)) / (2 * h));
    }
    o.require(worst < 1e-5, name + " relative error " + fmt("%.3g", worst));
    overall = std::max(overall, worst);
  }
  o.note("max relative error " + fmt("%.2g", overall));
  return o;
}

// ---------------------------------------------------------------------------

Outcome sparsity_law() {
  Outcome o;
  const std::uint64_t n = 1000000;
  double worst_z = 0.0;
  std::uint64_t stream = 0;
  for (double alpha : {5.0, 36.0, 50.0}) {
    for (double sigma : {0.5, 1.0, 2.0}) {
      const double threshold = kGamma / alpha;
      const CounterRng rng = CounterRng(2024, Stream::kMonteCarlo).split(stream++);
      const double fraction =
          static_cast<double>(kernels::count_outside(sigma, threshold, rng, n)) / n;
      const double p = 2.0 * oracle::normal_cdf(-threshold / sigma);
      const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
      const double diff = std::abs(fraction - p);
      const bool ok = diff <= 3.0 * se;
      o.require(ok, "alpha=" + fmt("%g", alpha) + " sigma=" + fmt("%g", sigma) + " observed " +
                        fmt("%.6g", fraction) + " expected " + fmt("%.6g", p));
      if (se > 0.0) worst_z = std::max(worst_z, diff / se);
    }
  }
  o.note("largest deviation " + fmt("%.2f", worst_z) + " standard errors");
  return o;
}

// ---------------------------------------------------------------------------

Outcome bound_monotonicity() {
  Outcome o;
  const std::vector<LayerBoundSpec> layers = {
      {16, 16, 2.0, 4.0}, {16, 16, 2.0, 4.0}, {16, 16, 2.0, 4.0}};
  BoundConfig cfg;
  cfg.gamma = kGamma;
  cfg.n = 100;
  cfg.c = 1.0;
  double prev = INFINITY;
  std::string trace;
  for (double alpha : {5.0, 10.0, 20.0, 36.0, 43.0, 50.0, 100.0}) {
    cfg.alpha = alpha;
    const BoundReport r = rademacher_bound(layers, cfg);
    o.require(r.rademacher_bound <= prev, "bound rises at alpha=" + fmt("%g", alpha));
    bool clipped = false;
    for (const auto& l : r.layers) clipped |= l.zeta < 1.0;
    if (clipped) {
      o.require(r.rademacher_bound < r.unclipped_bound,
                "not below unclipped at alpha=" + fmt("%g", alpha));
    }
    prev = r.rademacher_bound;
    trace += (trace.empty() ? "" : " ") + fmt("%.4g", r.rademacher_bound);
  }
  o.note("bounds " + trace);
  return o;
}

// ---------------------------------------------------------------------------

Outcome lipschitz_link() {
  Outcome o;
  const double alpha = 3.0;
  for (double gamma : {1.0, 2.0, 10.0, kGamma}) {
    const double bound = gamma / alpha;
    double sup = 0.0;
    for (int i = 0; i <= 100000; ++i) {
      const double x = std::min(-bound + 2.0 * bound * i / 100000.0, std::nextafter(bound, 0.0));
      sup = std::max(sup, rcraf_derivative(x, alpha, gamma));
    }
    const double err = std::abs(sup - lipschitz_constant(gamma));
    o.require(err <= 1e-12, "gamma=" + fmt("%g", gamma) + " gap " + fmt("%.3g", err));
  }
  return o;
}

// ---------------------------------------------------------------------------

Outcome attack_correctness() {
  Outcome o;
  const Dataset moons = two_moons(300, 0.1, 11);
  TrainConfig tc;
  tc.epochs = 30;
  tc.batch_size = 32;
  tc.seed = 5;
  const DenseNetwork net =
      train_standard({{2, 16, 16, 2}, ActivationSpec::rcraf(36.0, kGamma), 5}, tc, moons).net;
  const Dataset data = two_moons(200, 0.1, 4);
  const Matrix& x = data.features();

  // Ball containment at every iterate.
  AttackConfig cfg;
  cfg.epsilon = 0.1;
  cfg.iterations = 20;
  cfg.step_size = 0.03;
  cfg.seed = 9;
  double worst = 0.0;
  std::size_t iterates = 0;
  pgd_attack(net, x, data.labels(), cfg, [&](std::size_t, const Matrix& it) {
    ++iterates;
    for (std::size_t k = 0; k < x.size(); ++k) {
      worst = std::max(worst, std::abs(it.values()[k] - x.values()[k]));
    }
  });
  o.require(iterates == cfg.iterations + 1, "observer saw " + std::to_string(iterates) + " iterates");
  o.require(worst <= cfg.epsilon + 1e-12, "left the ball by " + fmt("%.3g", worst - cfg.epsilon));

  // eps = 0 identity.
  AttackConfig zero = cfg;
  zero.epsilon = 0.0;
  o.require(pgd_attack(net, x, data.labels(), zero) == x, "eps=0 moved the input");

  // FGSM against one PGD step.
  AttackConfig one;
  one.epsilon = 0.1;
  one.step_size = 0.1;
  one.iterations = 1;
  one.random_start = false;
  o.require(pgd_attack(net, x, data.labels(), one) == fgsm_attack(net, x, data.labels(), 0.1),
            "FGSM differs from one PGD step");

  // Linear model: PGD reaches the best of the four ball corners.
  DenseNetwork lin(NetworkSpec{{2, 2}, ActivationSpec{}, 0});
  lin.layers()[0].weights = Matrix{{1.5, -0.5}, {-1.0, 2.0}};
  lin.layers()[0].bias = {0.1, -0.2};
  AttackConfig lc;
  lc.epsilon = 0.1;
  lc.iterations = 20;
  lc.seed = 2;
  const Matrix adv = pgd_attack(lin, x, data.labels(), lc);
  const auto attacked = per_sample_loss(lin, adv, data.labels());
  double corner_gap = 0.0;
  for (std::size_t s = 0; s < x.rows(); ++s) {
    double best = -INFINITY;
    for (double s0 : {-1.0, 1.0}) {
      for (double s1 : {-1.0, 1.0}) {
        const Matrix c{{x(s, 0) + s0 * 0.1, x(s, 1) + s1 * 0.1}};
        best = std::max(best, per_sample_loss(lin, c, std::vector<int>{data.labels()[s]})[0]);
      }
    }
    corner_gap = std::max(corner_gap, std::abs(attacked[s] - best));
  }
  o.require(corner_gap <= 1e-12, "linear PGD misses corner optimum by " + fmt("%.3g", corner_gap));
  o.note("max ball excursion " + fmt("%.17g", worst));
  return o;
}

// ---------------------------------------------------------------------------
// Criteria 7-9 go through the command-line front end so that every run leaves
// a manifest behind.

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = rcraf::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct Workspace {
  fs::path dir;
  std::string p(const std::string& name) const { return (dir / name).string(); }
  bool have_data = false;
};

bool ensure_data(Workspace& ws, Outcome& o) {
  if (ws.have_data) return true;
  const auto r = cli({"gen-data", "--kind", "moons", "--n", "2000", "--noise", "0.1", "--seed",
                      "2026", "--test-fraction", "0.2", "--out", ws.p("moons_train.csv"),
                      "--test-out", ws.p("moons_test.csv")});
  o.require(r.code == 0, "gen-data failed: " + r.err);
  ws.have_data = r.code == 0;
  return ws.have_data;
}

std::vector<std::string> twin_flags(const Workspace& ws) {
  return {"--data", ws.p("moons_train.csv"), "--test", ws.p("moons_test.csv"), "--hidden",
          "64,64", "--activation", "rcraf", "--alpha", "36", "--gamma", "66.7228", "--epochs",
          "200", "--batch-size", "64", "--lr", "0.05", "--momentum", "0.9", "--seed", "17",
          "--eval-eps", "0.1", "--eval-steps", "20", "--eval-seed", "5", "--eval-every", "50"};
}

Outcome adversarial_trend(Workspace& ws) {
  Outcome o;
  if (!ensure_data(ws, o)) return o;
  std::vector<std::string> std_args = {"train"};
  std::vector<std::string> adv_args = {"train-adv"};
  for (const auto& f : twin_flags(ws)) {
    std_args.push_back(f);
    adv_args.push_back(f);
  }
  std_args.insert(std_args.end(), {"--out", ws.p("std_history.csv"), "--summary",
                                   ws.p("std_summary.json"), "--checkpoint", ws.p("std.bin")});
  adv_args.insert(adv_args.end(),
                  {"--eps", "0.1", "--steps", "10", "--attack-seed", "23", "--out",
                   ws.p("adv_history.csv"), "--summary", ws.p("adv_summary.json"), "--checkpoint",
                   ws.p("adv.bin")});
  const auto s = cli(std_args);
  const auto a = cli(adv_args);
  o.require(s.code == 0, "train failed: " + s.err);
  o.require(a.code == 0, "train-adv failed: " + a.err);
  if (!o.pass) return o;
  const auto js = nlohmann::json::parse(slurp(ws.p("std_summary.json")));
  const auto ja = nlohmann::json::parse(slurp(ws.p("adv_summary.json")));
  const double rs = js["robust_acc"].get<double>();
  const double ra = ja["robust_acc"].get<double>();
  const double gap = ra - rs;
  o.note("robust acc standard " + fmt("%.4f", rs) + ", adversarial " + fmt("%.4f", ra) +
         ", gap " + fmt("%.2f", 100.0 * gap) + " pp (largest possible " +
         fmt("%.2f", 100.0 * (1.0 - rs)) + " pp)");
  o.note("clean acc standard " + fmt("%.4f", js["clean_acc"].get<double>()) + ", adversarial " +
         fmt("%.4f", ja["clean_acc"].get<double>()));
  o.require(gap >= 0.10, "gap below 10 pp");
  return o;
}

Outcome alpha_sweep_trend(Workspace& ws) {
  Outcome o;
  if (!ensure_data(ws, o)) return o;
  const auto r = cli({"sweep-alpha", "--mode", "std", "--alpha-grid", "1,5,20,50,200",
                      "--baselines", "relu", "--gamma", "66.7228", "--data",
                      ws.p("moons_train.csv"), "--test", ws.p("moons_test.csv"), "--hidden",
                      "64,64", "--epochs", "100", "--seed", "17", "--out", ws.p("sweep.csv")});
  o.require(r.code == 0, "sweep-alpha failed: " + r.err);
  if (r.code != 0) return o;
  std::istringstream in(slurp(ws.p("sweep.csv")));
  std::string line;
  std::getline(in, line);
  o.require(line == "activation,alpha,gamma,train_loss,clean_acc,robust_acc,sparsity",
            "unexpected header " + line);
  std::size_t rcraf_rows = 0;
  double best = 0.0;
  std::string summary;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    cells.resize(7);
    const double loss = std::strtod(cells[3].c_str(), nullptr);
    const double clean = std::strtod(cells[4].c_str(), nullptr);
    summary += (summary.empty() ? "" : ", ") + cells[0] +
               (cells[1].empty() ? "" : "@" + fmt("%g", std::strtod(cells[1].c_str(), nullptr))) +
               " " + fmt("%.4f", clean);
    if (cells[0] != "rcraf") continue;
    ++rcraf_rows;
    o.require(std::isfinite(loss) && !cells[3].empty(), "non-finite loss in row " + line);
    o.require(std::isfinite(clean) && !cells[4].empty(), "non-finite accuracy in row " + line);
    best = std::max(best, clean);
  }
  o.require(rcraf_rows == 5, "expected 5 alpha rows, got " + std::to_string(rcraf_rows));
  o.require(best >= 0.95, "best clean accuracy " + fmt("%.4f", best));
  o.note("clean acc " + summary);
  return o;
}

Outcome reproducibility(Workspace& ws) {
  Outcome o;
  const std::vector<std::pair<std::string, std::vector<std::string>>> runs = {
      {"std_history.csv.manifest.json", {"std_history.csv", "std_summary.json", "std.bin"}},
      {"adv_history.csv.manifest.json", {"adv_history.csv", "adv_summary.json", "adv.bin"}},
      {"sweep.csv.manifest.json", {"sweep.csv"}},
  };
  for (const auto& [manifest, outputs] : runs) {
    if (!fs::exists(ws.p(manifest))) {
      o.require(false, "missing " + manifest);
      continue;
    }
    std::vector<std::string> before;
    for (const auto& f : outputs) before.push_back(slurp(ws.p(f)));
    const auto m = nlohmann::json::parse(slurp(ws.p(manifest)));
    const auto r = cli({m["command"].get<std::string>(), "--config", ws.p(manifest)});
    o.require(r.code == 0, manifest + " rerun failed: " + r.err);
    for (std::size_t i = 0; i < outputs.size(); ++i) {
      o.require(!before[i].empty() && slurp(ws.p(outputs[i])) == before[i],
                outputs[i] + " changed on rerun");
    }
  }
  if (o.pass) o.note("all outputs byte-identical");
  return o;
}

// ---------------------------------------------------------------------------

std::set<int> parse_ids(const std::string& text) {
  std::set<int> ids;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) ids.insert(std::stoi(item));
  }
  return ids;
}

}  // namespace

int main(int argc, char** argv) {
  Workspace ws{fs::temp_directory_path() / "rcraf_acceptance"};
  std::set<int> only, known;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--workdir" && i + 1 < argc) {
      ws.dir = argv[++i];
    } else if (a == "--only" && i + 1 < argc) {
      only = parse_ids(argv[++i]);
    } else if (a == "--known-failure" && i + 1 < argc) {
      known = parse_ids(argv[++i]);
    } else {
      std::cerr << "usage: rcraf_acceptance [--workdir DIR] [--only 1,2] [--known-failure 7]\n";
      return 2;
    }
  }
  fs::remove_all(ws.dir);
  fs::create_directories(ws.dir);

  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "analytic identities", 5.0, analytic_identities},
      {2, "gradient fidelity", 10.0, gradient_fidelity},
      {3, "sparsity law", 10.0, sparsity_law},
      {4, "bound monotonicity", 1.0, bound_monotonicity},
      {5, "lipschitz link", 1.0, lipschitz_link},
      {6, "attack correctness", 10.0, attack_correctness},
      {7, "adversarial training trend", 300.0, [&] { return adversarial_trend(ws); }},
      {8, "alpha sweep", 600.0, [&] { return alpha_sweep_trend(ws); }},
      {9, "reproducibility from manifests", 0.0, [&] { return reproducibility(ws); }},
  };

  // Criterion 9 replays the artifacts of 7 and 8.
  if (only.count(9)) only.insert({7, 8});

  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0.0) {
      o.require(seconds < c.budget_s, "over the " + fmt("%g", c.budget_s) + " s budget");
    }
    const bool tolerated = !o.pass && known.count(c.id);
    if (!o.pass && !tolerated) ++failures;
    std::printf("[%s] criterion %d: %s (%.2f s)%s%s%s\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                seconds, tolerated ? " [known failure]" : "", o.detail.empty() ? "" : " -- ",
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
