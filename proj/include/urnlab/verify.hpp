/*
   Copyright 2026 The urnlab Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "urnlab/laws.hpp"
#include "urnlab/stats.hpp"
#include "urnlab/urn.hpp"

namespace urnlab {

inline constexpr double kDefaultStepCap = 2e10;
inline constexpr std::uint64_t kMinHorizon = 1000;
inline constexpr std::uint64_t kMinEnsemble = 100;

// Acceptance thresholds. KS bounds are pinned at M = 10^4 and widen as
// 1/sqrt(M) for smaller ensembles.
double normal_ks_threshold(std::uint64_t ensemble);
double mixture_ks_threshold(std::uint64_t ensemble);
inline constexpr double kTailFluctuationRatio = 0.05;
inline constexpr double kMinScaledCrossVariance = 1e-6;
inline constexpr double kMassTolerance = 1e-9;
inline constexpr double kConstantTrackTolerance = 1e-12;
inline constexpr double kDirichletVarianceTolerance = 0.05;
inline constexpr double kMinUHat = 1e-12;

struct EnsembleConfig {
    std::uint64_t horizon = 100000;
    std::uint64_t ensemble = 10000;
    std::uint64_t seed = 1;
    // Empty: powers of two up to the horizon, plus the horizon.
    std::vector<std::uint64_t> checkpoints;
    unsigned threads = 0;
    double step_cap = kDefaultStepCap;
    // Multiplies every predicted variance before studentization. Testing only.
    double variance_scale = 1.0;
};

enum class Verdict { Pass, Fail, Skipped };
std::string_view to_string(Verdict v);

struct AsDiagnostics {
    std::vector<double> tail_fluctuation;
    std::vector<double> terminal;
    double median_tail_fluctuation = 0.0;
    double median_abs_terminal = 0.0;
    double cross_variance = 0.0;
    bool all_positive = true;
    // Median over trajectories of |normalized track - companion| at each
    // checkpoint; empty without a companion.
    std::vector<double> gap_median;
};

struct PredictionReport {
    LawPrediction prediction;
    // Row-major [trajectory][checkpoint].
    std::vector<double> raw;
    std::vector<double> normalized;
    std::vector<double> terminal;
    std::vector<double> z;
    std::size_t dropped = 0;
    std::vector<double> u_hat;
    std::optional<KsResult> ks;
    std::optional<AsDiagnostics> diagnostics;
    std::optional<double> deviation;
    std::optional<double> sample_mean;
    std::optional<double> sample_variance;
    std::optional<double> mean_se;
    std::optional<double> variance_se;
    Verdict verdict = Verdict::Skipped;
    std::string detail;
};

struct EnsembleReport {
    std::uint64_t horizon = 0;
    std::uint64_t ensemble = 0;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> checkpoints;
    std::vector<PredictionReport> predictions;
    double seconds = 0.0;

    bool all_pass() const;
};

// Simulates streams 0..M-1 and scores every prediction. Deterministic in
// (spec, predictions, config) regardless of thread count.
EnsembleReport run_ensemble(const ReplacementSpec& spec, const std::vector<LawPrediction>& predictions,
                            const EnsembleConfig& config);

// Terminal compositions of streams 0..M-1 at step n; used for distribution
// checks against the oracle.
std::vector<Vector> terminal_compositions(const ReplacementSpec& spec, std::uint64_t n, std::uint64_t ensemble,
                                          std::uint64_t seed, unsigned threads = 0);

// U-hat = C_N . v / N^s for the class's non-dominant mass vector v.
double estimate_u(const Trajectory& trajectory, const StructureClass& cls);

struct Studentized {
    std::vector<double> z;
    std::size_t dropped = 0;
};

// Normal(v): z = x / sqrt(v). NormalMixture(c U): z_i = x_i / sqrt(c U_i),
// entries with U_i < 1e-12 become NaN and are counted as dropped.
Studentized studentize(std::span<const double> sample, const LawPrediction& prediction,
                       std::span<const double> u_hats, double variance_scale = 1.0);

// `normalized` is [trajectory][checkpoint]; tail fluctuation is taken over
// checkpoints n >= N/4.
AsDiagnostics as_convergence_diag(std::span<const double> normalized, std::span<const std::uint64_t> checkpoints,
                                  std::size_t trajectories, std::span<const double> companion = {});

} // namespace urnlab
