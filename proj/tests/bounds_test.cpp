// Copyright 2026 The rcraf Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rcraf/bounds.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "rcraf/activation.hpp"
#include "rcraf/precision.hpp"
#include "rcraf/random.hpp"

namespace rcraf {
namespace {

constexpr double kPaperGamma = 66.7228;

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  const CounterRng rng(seed, Stream::kData);
  Matrix m(rows, cols);
  for (std::size_t k = 0; k < m.size(); ++k) m.values()[k] = rng.normal(k);
  return m;
}

std::vector<LayerBoundSpec> fixture_layers() {
  return {{16, 16, 2.0, 4.0}, {16, 16, 2.0, 4.0}, {16, 16, 2.0, 4.0}};
}

BoundConfig fixture_config(double alpha) {
  BoundConfig cfg;
  cfg.alpha = alpha;
  cfg.gamma = kPaperGamma;
  cfg.n = 100;
  cfg.c = 1.0;
  return cfg;
}

TEST(Lipschitz, Examples) {
  EXPECT_NEAR(lipschitz_constant(1e-15), 0.5, 1e-15);
  EXPECT_NEAR(lipschitz_constant(2.0), 0.88079707797788244, 1e-15);
  // 1 - L is about 1e-29 here, far below double resolution.
  EXPECT_EQ(lipschitz_constant(kPaperGamma), 1.0);
  EXPECT_LT(lipschitz_constant(30.0), 1.0);
  EXPECT_THROW(lipschitz_constant(0.0), std::domain_error);
}

TEST(Lipschitz, EqualsSupremumOfDerivativeInsideClipRegion) {
  for (double gamma : {1.0, 2.0, 10.0, kPaperGamma}) {
    const double alpha = 3.0;
    const double bound = gamma / alpha;
    double sup = 0.0;
    for (int i = 0; i <= 100000; ++i) {
      const double x = std::min(-bound + 2.0 * bound * i / 100000.0, std::nextafter(bound, 0.0));
      sup = std::max(sup, rcraf_derivative(x, alpha, gamma));
    }
    EXPECT_NEAR(sup, lipschitz_constant(gamma), 1e-12) << gamma;
  }
}

TEST(SpectralNorm, Examples) {
  EXPECT_NEAR(spectral_norm(Matrix{{1, 0}, {0, 1}}).value, 1.0, 1e-8);
  EXPECT_NEAR(spectral_norm(Matrix{{3, 0}, {0, 1}}).value, 3.0, 3.0 * 1e-8);
  const auto r = spectral_norm(random_matrix(5, 4, 11));
  EXPECT_TRUE(r.converged);
  const double ref = oracle::largest_singular_value(random_matrix(5, 4, 11));
  EXPECT_NEAR(r.value, ref, 1e-6 * ref);
}

TEST(SpectralNorm, ZeroMatrixAndStartInNullSpace) {
  EXPECT_EQ(spectral_norm(Matrix(3, 3)).value, 0.0);
  // The all-ones start vector is orthogonal to this row space.
  const Matrix w{{1, -1}, {2, -2}};
  EXPECT_NEAR(spectral_norm(w).value, oracle::largest_singular_value(w), 1e-9);
}

TEST(SpectralNorm, FlagsNonConvergence) {
  // Nearly tied singular values converge slowly; a tiny cap must be flagged.
  const auto r = spectral_norm(Matrix{{1.0, 0.3}, {0.2, 0.999}}, 1e-15, 2);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 2u);
  EXPECT_GT(r.value, 0.0);
}

TEST(SpectralNorm, MatchesSvdOnRandomMatrices) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Matrix w = random_matrix(3 + seed % 7, 2 + seed % 5, seed);
    const double ref = oracle::largest_singular_value(w);
    EXPECT_NEAR(spectral_norm(w).value, ref, 1e-6 * ref) << seed;
  }
}

TEST(Norm21, Examples) {
  EXPECT_EQ(norm_2_1_transpose(Matrix{{1, 0}, {0, 1}}), 2.0);
  EXPECT_EQ(norm_2_1_transpose(Matrix{{3, 4}, {0, 0}}), 5.0);
  const Matrix w = random_matrix(6, 3, 5);
  double brute = 0.0;
  for (std::size_t r = 0; r < 6; ++r) {
    brute += std::sqrt(w(r, 0) * w(r, 0) + w(r, 1) * w(r, 1) + w(r, 2) * w(r, 2));
  }
  EXPECT_EQ(norm_2_1_transpose(w), brute);
}

TEST(Norm21, DominatesSpectralNorm) {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const Matrix w = random_matrix(1 + seed % 6, 1 + (seed / 6) % 6, 1000 + seed);
    ASSERT_LE(spectral_norm(w).value, norm_2_1_transpose(w) * (1.0 + 1e-12)) << seed;
  }
}

TEST(ZetaClip, Examples) {
  BoundConfig cfg;
  cfg.gamma = 2.0;
  const LayerBoundSpec layer{4, 4, 3.0, 5.0};
  cfg.alpha = 1.0;
  EXPECT_NEAR(zeta_clip(layer, cfg, 1.0), 0.88079707797788244, 1e-15);
  cfg.alpha = 10.0;
  EXPECT_NEAR(zeta_clip(layer, cfg, 1.0), 0.11743961039705099, 1e-15);
  const double z10 = zeta_clip(layer, cfg, 1.0);
  cfg.alpha = 100.0;
  EXPECT_NEAR(zeta_clip(layer, cfg, 1.0), 0.1 * z10, 1e-16);
}

TEST(ZetaClip, LiteralLambdaVariant) {
  BoundConfig cfg;
  cfg.gamma = 2.0;
  cfg.alpha = 1.0;
  cfg.zeta_denominator = ZetaDenominator::kLambda;
  cfg.lambda = PrecisionModel::half().lambda();
  const LayerBoundSpec layer{4, 4, 3.0, 5.0};
  EXPECT_NEAR(zeta_clip(layer, cfg, 1.0), 1.0 / (1.0 + std::exp(-11.0899)), 1e-15);
}

TEST(CoverLogs, Examples) {
  EXPECT_NEAR(weight_cover_log(1.0, 1.0, 1.0, 1, 1), std::numbers::ln2, 1e-15);
  EXPECT_NEAR(weight_cover_log(2.0, 3.0, 1.5, 4, 5), weight_cover_log(1.0, 3.0, 1.5, 4, 5) / 4.0,
              1e-12);
  EXPECT_NEAR(weight_cover_log(0.5, 2.0, 1.0, 2, 3), 39.758506396608005, 1e-12);

  EXPECT_NEAR(output_cover_log(1.0, 1, 1.0), std::numbers::ln2, 1e-15);
  EXPECT_NEAR(output_cover_log(1.0, 3, 1e-300), 0.0, 1e-290);
  EXPECT_NEAR(output_cover_log(0.1, 4, 0.5), 9.5915810911934822, 1e-12);
}

TEST(EtaClip, Examples) {
  // Output cover dominates the weight cover: no reduction.
  EXPECT_EQ(eta_clip({2, 2, 0.1, 0.1}, 1.0, 1.0, 5.0), 1.0);
  EXPECT_NEAR(eta_clip({2, 2, 10.0, 10.0}, 0.1, 1.0, 0.01), 0.0035668049335673871, 1e-15);
  double prev = 1.0;
  for (double alpha : {1.0, 1e2, 1e4, 1e8}) {
    const double eta = eta_clip({8, 8, 2.0, 4.0}, 0.1, 1.0, m_clip(alpha, 2.0));
    EXPECT_LT(eta, prev);
    prev = eta;
  }
  EXPECT_LT(prev, 1e-3);
}

TEST(EtaClip, ReproducesCombinedCoveringBound) {
  // (eta b)^2 c^2 ln(2 d d') / eps^2 == min(weight cover, output cover).
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const CounterRng rng(seed, Stream::kData);
    const LayerBoundSpec layer{1 + seed % 9, 1 + (seed / 3) % 9, 1.0, 0.1 + 10.0 * rng.uniform(0)};
    const double eps = 0.01 + rng.uniform(1);
    const double c = 0.1 + 5.0 * rng.uniform(2);
    const double m = 1e-3 + 3.0 * rng.uniform(3);
    const double eta = eta_clip(layer, eps, c, m);
    const double combined = std::min(weight_cover_log(eps, layer.b, c, layer.d_in, layer.d_out),
                                     output_cover_log(eps, layer.d_out, m));
    const double substituted = weight_cover_log(eps, eta * layer.b, c, layer.d_in, layer.d_out);
    EXPECT_NEAR(substituted, combined, 1e-9 * combined) << seed;
  }
}

TEST(RademacherBound, UnityFactorsGiveCOverRootN) {
  BoundConfig cfg;
  cfg.alpha = 1e-9;
  cfg.gamma = 700.0;
  cfg.n = 16;
  cfg.c = 3.0;
  cfg.epsilon_total = 1e9;
  const std::vector<LayerBoundSpec> layers = {{1, 1, 1.0, 1.0}};
  const auto report = rademacher_bound(layers, cfg);
  EXPECT_EQ(report.layers[0].zeta, 1.0);
  EXPECT_EQ(report.layers[0].eta, 1.0);
  EXPECT_NEAR(report.rademacher_bound, 3.0 / 4.0, 1e-15);
  EXPECT_NEAR(report.unclipped_bound, 3.0 / 4.0, 1e-15);
}

TEST(RademacherBound, HandComputedTwoLayerChain) {
  BoundConfig cfg;
  cfg.alpha = 4.0;
  cfg.gamma = 2.0;
  cfg.n = 9;
  cfg.c = 2.0;
  cfg.epsilons = {0.5, 0.25};
  const std::vector<LayerBoundSpec> layers = {{3, 4, 2.0, 3.0}, {4, 2, 1.5, 2.5}};
  const auto r = rademacher_bound(layers, cfg);

  const double lip = 1.0 / (1.0 + std::exp(-2.0));
  const double m = (std::log1p(std::exp(-2.0)) + 2.0) / 4.0;
  const double z1 = std::min(1.0, 2.0 * 2.0 / (4.0 * 2.0 * 2.0)) * lip;
  const double c1 = std::min(z1 * 2.0 * 2.0, 2.0 * m);
  const double e1 = std::sqrt(std::min(1.0, 4.0 * std::log(m * 2.0 / 0.5 + 1.0) * 0.25 /
                                                (9.0 * c1 * c1 * std::log(24.0))));
  const double z2 = std::min(1.0, std::sqrt(2.0) * 2.0 / (4.0 * c1 * 1.5)) * lip;
  const double c2 = std::min(z2 * 1.5 * c1, std::sqrt(2.0) * m);
  const double e2 = std::sqrt(std::min(1.0, 2.0 * std::log(m * std::sqrt(2.0) / 0.25 + 1.0) *
                                                0.0625 / (6.25 * c2 * c2 * std::log(16.0))));
  const double k1 = 2.0 * z1, k2 = 1.5 * z2, b1 = 3.0 * e1, b2 = 2.5 * e2;
  const double expected = 2.0 / 3.0 * k1 * k2 *
                          std::pow(std::cbrt(b1 * b1 / (k1 * k1)) + std::cbrt(b2 * b2 / (k2 * k2)), 1.5);

  EXPECT_NEAR(r.layers[0].zeta, z1, 1e-15);
  EXPECT_NEAR(r.layers[1].zeta, z2, 1e-15);
  EXPECT_NEAR(r.layers[0].c_out, c1, 1e-15);
  EXPECT_NEAR(r.layers[1].c_in, c1, 1e-15);
  EXPECT_NEAR(r.layers[0].eta, e1, 1e-15);
  EXPECT_NEAR(r.layers[1].eta, e2, 1e-15);
  EXPECT_NEAR(r.rademacher_bound, expected, 1e-12 * expected);
}

TEST(RademacherBound, FixtureDecreasesFromAlpha5To50) {
  const auto layers = fixture_layers();
  EXPECT_LE(rademacher_bound(layers, fixture_config(50.0)).rademacher_bound,
            rademacher_bound(layers, fixture_config(5.0)).rademacher_bound);
}

TEST(RademacherBound, ClippedBelowUnclippedWhenZetaShrinks) {
  const auto layers = fixture_layers();
  for (double alpha : {36.0, 43.0, 100.0}) {
    const auto r = rademacher_bound(layers, fixture_config(alpha));
    bool shrunk = false;
    for (const auto& l : r.layers) shrunk |= l.zeta < 1.0;
    ASSERT_TRUE(shrunk);
    EXPECT_LT(r.rademacher_bound, r.unclipped_bound);
  }
}

TEST(RademacherBound, FactorsStayInUnitInterval) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const CounterRng rng(seed, Stream::kData);
    std::vector<LayerBoundSpec> layers;
    const std::size_t depth = 1 + seed % 4;
    std::size_t d_prev = 2 + seed % 5;
    for (std::size_t i = 0; i < depth; ++i) {
      const std::size_t d = 1 + (seed * 7 + i * 3) % 32;
      const double k = 0.2 + 4.0 * rng.uniform(2 * i);
      layers.push_back({d_prev, d, k, k * (1.0 + 3.0 * rng.uniform(2 * i + 1))});
      d_prev = d;
    }
    BoundConfig cfg = fixture_config(1.0 + 99.0 * rng.uniform(100));
    cfg.gamma = 0.5 + 20.0 * rng.uniform(101);
    cfg.c = 0.1 + 10.0 * rng.uniform(102);
    const auto r = rademacher_bound(layers, cfg);
    const double lip = lipschitz_constant(cfg.gamma);
    for (const auto& l : r.layers) {
      EXPECT_GT(l.zeta, 0.0);
      EXPECT_LE(l.zeta, lip);
      EXPECT_GT(l.eta, 0.0);
      EXPECT_LE(l.eta, 1.0);
    }
    EXPECT_LE(r.rademacher_bound, r.unclipped_bound * (1.0 + 1e-12)) << seed;
  }
}

TEST(RademacherBound, NonDecreasingInEachB) {
  for (std::size_t layer = 0; layer < 3; ++layer) {
    auto layers = fixture_layers();
    double prev = 0.0;
    for (double b : {2.0, 3.0, 4.0, 8.0, 16.0, 64.0}) {
      layers[layer].b = b;
      const double bound = rademacher_bound(layers, fixture_config(36.0)).rademacher_bound;
      EXPECT_GE(bound, prev);
      prev = bound;
    }
  }
}

TEST(RademacherBound, NonIncreasingInAlphaForUnitInputNorm) {
  const std::vector<std::vector<LayerBoundSpec>> specs = {
      fixture_layers(),
      {{2, 64, 3.0, 10.0}, {64, 64, 5.0, 20.0}, {64, 2, 2.0, 4.0}},
  };
  for (const auto& layers : specs) {
    double prev = INFINITY;
    for (double alpha : {1.0, 2.0, 5.0, 10.0, 20.0, 36.0, 43.0, 50.0, 100.0, 200.0}) {
      const double bound = rademacher_bound(layers, fixture_config(alpha)).rademacher_bound;
      EXPECT_LE(bound, prev) << alpha;
      prev = bound;
    }
  }
}

TEST(RademacherBound, LargeInputNormCanBreakAlphaMonotonicity) {
  // eta_i grows as the propagated norm c_i shrinks, which can outweigh the
  // zeta reduction once c is large. Kept as a documented counterexample.
  const std::vector<LayerBoundSpec> layers = {{2, 64, 3.0, 10.0}, {64, 64, 5.0, 20.0},
                                              {64, 2, 2.0, 4.0}};
  BoundConfig cfg = fixture_config(36.0);
  cfg.c = 10.0;
  const double at36 = rademacher_bound(layers, cfg).rademacher_bound;
  cfg.alpha = 100.0;
  EXPECT_GT(rademacher_bound(layers, cfg).rademacher_bound, at36);
}

TEST(RademacherBound, NarrowLayersCanBreakAlphaMonotonicity) {
  // Same effect at unit input norm: the propagated norms fall with alpha,
  // and the eta growth outweighs the remaining zeta reduction.
  const std::vector<LayerBoundSpec> layers = {{8, 8, 1.5, 3.0}, {8, 4, 1.2, 2.0}};
  const auto at100 = rademacher_bound(layers, fixture_config(100.0));
  const auto at200 = rademacher_bound(layers, fixture_config(200.0));
  EXPECT_GT(at200.rademacher_bound, at100.rademacher_bound);
  EXPECT_LT(at200.layers[1].zeta, at100.layers[1].zeta);
  EXPECT_GT(at200.layers[0].eta, at100.layers[0].eta);
  EXPECT_GT(at200.layers[1].eta, at100.layers[1].eta);
}

TEST(RademacherBound, RejectsInvalidInput) {
  EXPECT_THROW(rademacher_bound({}, fixture_config(1.0)), std::domain_error);
  auto layers = fixture_layers();
  BoundConfig cfg = fixture_config(1.0);
  cfg.epsilons = {0.1, 0.1};
  EXPECT_THROW(rademacher_bound(layers, cfg), std::domain_error);
  cfg = fixture_config(1.0);
  cfg.n = 0;
  EXPECT_THROW(rademacher_bound(layers, cfg), std::domain_error);
  layers[1].k = 0.0;
  EXPECT_THROW(rademacher_bound(layers, fixture_config(1.0)), std::domain_error);
}

TEST(AlphaSweep, SortedDeterministicAndConsistent) {
  const auto layers = fixture_layers();
  const std::vector<double> grid = {100, 5, 20, 10, 50, 20};
  const auto rows = alpha_sweep(layers, fixture_config(1.0), grid);
  ASSERT_EQ(rows.size(), grid.size());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_LE(rows[i - 1].alpha, rows[i].alpha);
    EXPECT_LE(rows[i].bound, rows[i - 1].bound);
  }
  EXPECT_EQ(rows[2].bound, rows[3].bound);  // duplicate alpha = 20

  const std::vector<double> single = {36.0};
  const auto one = alpha_sweep(layers, fixture_config(1.0), single);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].bound, rademacher_bound(layers, fixture_config(36.0)).rademacher_bound);
  EXPECT_THROW(alpha_sweep(layers, fixture_config(1.0), {}), std::domain_error);
}

TEST(MeasureLayer, UsesWeightShape) {
  const Matrix w = random_matrix(4, 3, 9);
  const auto spec = measure_layer(w);
  EXPECT_EQ(spec.d_in, 3u);
  EXPECT_EQ(spec.d_out, 4u);
  EXPECT_GE(spec.b, spec.k);
}

}  // namespace
}  // namespace rcraf
