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

#include "urnlab/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <limits>
#include <set>
#include <thread>

#include "urnlab/error.hpp"
#include "urnlab/spectral.hpp"

namespace urnlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Streams are split into contiguous blocks; each worker writes only its own
// slots, so results do not depend on the worker count.
template <class F>
void for_each_stream(std::uint64_t count, unsigned threads, F&& body)
{
    unsigned workers = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, count));
    if (workers <= 1) {
        for (std::uint64_t t = 0; t < count; ++t) {
            body(t);
        }
        return;
    }
    const std::uint64_t chunk = (count + workers - 1) / workers;
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        const std::uint64_t lo = w * chunk;
        const std::uint64_t hi = std::min(count, lo + chunk);
        pool.emplace_back([lo, hi, &body] {
            for (std::uint64_t t = lo; t < hi; ++t) {
                body(t);
            }
        });
    }
}

std::size_t intern(std::vector<Vector>& pool, const Vector& v)
{
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (pool[i] == v) {
            return i;
        }
    }
    pool.push_back(v);
    return pool.size() - 1;
}

std::vector<std::uint64_t> resolve_checkpoints(const EnsembleConfig& config,
                                               const std::vector<LawPrediction>& predictions)
{
    const std::uint64_t n = config.horizon;
    std::set<std::uint64_t> grid;
    if (config.checkpoints.empty()) {
        for (auto c : geometric_checkpoints(n)) {
            grid.insert(c);
        }
    } else {
        validate_checkpoints(config.checkpoints, n);
        grid.insert(config.checkpoints.begin(), config.checkpoints.end());
    }
    grid.insert(n);
    const bool log_rate = std::any_of(predictions.begin(), predictions.end(),
                                      [](const LawPrediction& p) { return p.companion.has_value(); });
    if (log_rate) {
        for (std::uint64_t d : {n / 100, n / 10}) {
            if (d > 0) {
                grid.insert(d);
            }
        }
    }
    grid.erase(0);
    return {grid.begin(), grid.end()};
}

std::vector<double> finite_only(std::span<const double> x)
{
    std::vector<double> out;
    for (double v : x) {
        if (std::isfinite(v)) {
            out.push_back(v);
        }
    }
    return out;
}

std::string num(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::size_t find_checkpoint(std::span<const std::uint64_t> cps, std::uint64_t n)
{
    const auto it = std::find(cps.begin(), cps.end(), n);
    return it == cps.end() ? cps.size() : static_cast<std::size_t>(it - cps.begin());
}

void score_as(PredictionReport& out, const EnsembleReport& report, const std::vector<double>& companion)
{
    const auto& p = out.prediction;
    const std::size_t m = report.ensemble;
    out.diagnostics = as_convergence_diag(out.normalized, report.checkpoints, m, companion);
    const auto& d = *out.diagnostics;
    std::vector<std::string> failures;
    if (p.positive && !d.all_positive) {
        failures.push_back("non-positive terminal value");
    }
    const double scale = d.median_abs_terminal * d.median_abs_terminal;
    if (!(d.cross_variance > kMinScaledCrossVariance * scale) || !(scale > 0.0)) {
        failures.push_back("degenerate terminal values (cross variance " + num(d.cross_variance) + ")");
    }
    if (p.companion) {
        const std::uint64_t n = report.horizon;
        const std::size_t a = find_checkpoint(report.checkpoints, n / 100);
        const std::size_t b = find_checkpoint(report.checkpoints, n / 10);
        const std::size_t c = report.checkpoints.size() - 1;
        if (n / 100 >= 100 && a < c && b < c) {
            const double ga = d.gap_median[a];
            const double gb = d.gap_median[b];
            const double gc = d.gap_median[c];
            out.detail = "median gap to " + p.companion->name + " at N/100, N/10, N: " + num(ga) + ", " + num(gb) +
                         ", " + num(gc);
            if (!(ga > gb && gb > gc)) {
                failures.push_back("co-convergence gap not strictly decreasing");
            }
        } else {
            out.detail = "horizon too short for the co-convergence trend";
        }
    } else {
        out.detail = "median tail fluctuation " + num(d.median_tail_fluctuation) + " vs median |terminal| " +
                     num(d.median_abs_terminal);
        if (!(d.median_tail_fluctuation < kTailFluctuationRatio * d.median_abs_terminal)) {
            failures.push_back("tail fluctuation above 5% of median terminal magnitude");
        }
    }
    if (p.limit_mean && p.limit_variance) {
        const auto t = finite_only(out.terminal);
        const double mu = mean(t);
        const double var = variance(t);
        double m4 = 0.0;
        for (double x : t) {
            m4 += std::pow(x - mu, 4);
        }
        m4 /= static_cast<double>(t.size());
        const double size = static_cast<double>(t.size());
        out.sample_mean = mu;
        out.sample_variance = var;
        out.mean_se = std::sqrt(var / size);
        out.variance_se = std::sqrt(std::max(0.0, m4 - var * var) / size);
        if (!(std::abs(mu - *p.limit_mean) <= 3.0 * *out.mean_se)) {
            failures.push_back("mean outside 3 standard errors");
        }
        const double tol = std::max(kDirichletVarianceTolerance * *p.limit_variance, 3.0 * *out.variance_se);
        if (!(std::abs(var - *p.limit_variance) <= tol)) {
            failures.push_back("variance off the Dirichlet value");
        }
        out.detail += "; mean " + num(mu) + " (se " + num(*out.mean_se) + "), variance " + num(var);
    }
    (void)m;
    out.verdict = failures.empty() ? Verdict::Pass : Verdict::Fail;
    for (const auto& f : failures) {
        out.detail += "; " + f;
    }
}

void score_normal(PredictionReport& out, const EnsembleReport& report, double variance_scale)
{
    const auto& p = out.prediction;
    auto z = studentize(out.terminal, p, out.u_hat, variance_scale);
    out.z = std::move(z.z);
    out.dropped = z.dropped;
    const double threshold = p.kind == LimitKind::Normal ? normal_ks_threshold(report.ensemble)
                                                         : mixture_ks_threshold(report.ensemble);
    try {
        out.ks = ks_standard_normal(out.z);
    } catch (const Error& e) {
        out.verdict = Verdict::Fail;
        out.detail = e.what();
        return;
    }
    out.detail = "KS D = " + num(out.ks->statistic) + " (threshold " + num(threshold) + "), p ~ " +
                 num(out.ks->p_value);
    if (p.unverified) {
        out.verdict = Verdict::Skipped;
        out.detail += "; unverified: periodic dominant block";
        return;
    }
    out.verdict = out.ks->statistic < threshold ? Verdict::Pass : Verdict::Fail;
}

} // namespace

double normal_ks_threshold(std::uint64_t ensemble)
{
    return std::max(0.03, 0.03 * std::sqrt(1e4 / static_cast<double>(ensemble)));
}

double mixture_ks_threshold(std::uint64_t ensemble)
{
    return std::max(0.05, 0.05 * std::sqrt(1e4 / static_cast<double>(ensemble)));
}

std::string_view to_string(Verdict v)
{
    switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Skipped: return "SKIP";
    }
    return "?";
}

bool EnsembleReport::all_pass() const
{
    return std::none_of(predictions.begin(), predictions.end(),
                        [](const PredictionReport& p) { return p.verdict == Verdict::Fail; });
}

Studentized studentize(std::span<const double> sample, const LawPrediction& prediction,
                       std::span<const double> u_hats, double variance_scale)
{
    Studentized out;
    out.z.resize(sample.size());
    const double coefficient = prediction.value * variance_scale;
    if (prediction.kind == LimitKind::Normal) {
        if (!(coefficient > 0.0)) {
            fail(ErrorCode::Domain, "cannot studentize by a zero variance");
        }
        const double sd = std::sqrt(coefficient);
        for (std::size_t i = 0; i < sample.size(); ++i) {
            out.z[i] = sample[i] / sd;
        }
        return out;
    }
    if (prediction.kind != LimitKind::NormalMixture) {
        fail(ErrorCode::InvalidArgument, "studentize needs a Normal or NormalMixture prediction");
    }
    if (!(coefficient > 0.0)) {
        fail(ErrorCode::Domain, "cannot studentize by a zero mixture coefficient");
    }
    if (u_hats.size() != sample.size()) {
        fail(ErrorCode::InvalidArgument, "one U estimate per sample value is required");
    }
    for (std::size_t i = 0; i < sample.size(); ++i) {
        if (!(u_hats[i] >= kMinUHat)) {
            out.z[i] = kNaN;
            ++out.dropped;
            continue;
        }
        out.z[i] = sample[i] / std::sqrt(coefficient * u_hats[i]);
    }
    return out;
}

AsDiagnostics as_convergence_diag(std::span<const double> normalized, std::span<const std::uint64_t> checkpoints,
                                  std::size_t trajectories, std::span<const double> companion)
{
    const std::size_t ncp = checkpoints.size();
    if (ncp == 0 || normalized.size() != trajectories * ncp) {
        fail(ErrorCode::InvalidArgument, "track layout does not match checkpoints x trajectories");
    }
    if (!companion.empty() && companion.size() != normalized.size()) {
        fail(ErrorCode::InvalidArgument, "companion layout does not match the track");
    }
    const std::uint64_t horizon = checkpoints.back();
    const std::size_t last = ncp - 1;
    AsDiagnostics d;
    d.tail_fluctuation.resize(trajectories);
    d.terminal.resize(trajectories);
    for (std::size_t t = 0; t < trajectories; ++t) {
        const double* row = normalized.data() + t * ncp;
        const double end = row[last];
        double worst = 0.0;
        for (std::size_t c = 0; c < ncp; ++c) {
            if (4 * checkpoints[c] >= horizon && std::isfinite(row[c])) {
                worst = std::max(worst, std::abs(row[c] - end));
            }
        }
        d.tail_fluctuation[t] = worst;
        d.terminal[t] = end;
        if (!(end > 0.0)) {
            d.all_positive = false;
        }
    }
    const auto terminal = finite_only(d.terminal);
    std::vector<double> abs_terminal;
    for (double x : terminal) {
        abs_terminal.push_back(std::abs(x));
    }
    d.median_tail_fluctuation = median(d.tail_fluctuation);
    d.median_abs_terminal = abs_terminal.empty() ? 0.0 : median(abs_terminal);
    d.cross_variance = terminal.size() >= 2 ? variance(terminal) : 0.0;
    if (!companion.empty()) {
        d.gap_median.assign(ncp, kNaN);
        for (std::size_t c = 0; c < ncp; ++c) {
            std::vector<double> gaps;
            for (std::size_t t = 0; t < trajectories; ++t) {
                const double g = std::abs(normalized[t * ncp + c] - companion[t * ncp + c]);
                if (std::isfinite(g)) {
                    gaps.push_back(g);
                }
            }
            if (!gaps.empty()) {
                d.gap_median[c] = median(std::move(gaps));
            }
        }
    }
    return d;
}

double estimate_u(const Trajectory& trajectory, const StructureClass& cls)
{
    if (cls.family != Family::ThreeOneDominant && cls.family != Family::FourBlockDiag &&
        cls.family != Family::FourBlockJordan) {
        fail(ErrorCode::InvalidArgument, std::string("family ") + std::string(to_string(cls.family)) +
                                             " has no mixing variable U");
    }
    if (trajectory.states.empty()) {
        fail(ErrorCode::InvalidArgument, "trajectory has no checkpoints");
    }
    const double n = static_cast<double>(trajectory.checkpoints.back());
    return dot(trajectory.states.back(), cls.combination_vectors[1]) / std::pow(n, *cls.s);
}

std::vector<Vector> terminal_compositions(const ReplacementSpec& spec, std::uint64_t n, std::uint64_t ensemble,
                                          std::uint64_t seed, unsigned threads)
{
    std::vector<Vector> out(ensemble);
    for_each_stream(ensemble, threads, [&](std::uint64_t t) {
        UniformStream rng(seed, t);
        Vector counts = spec.initial();
        advance(spec, counts, n, rng);
        out[t] = std::move(counts);
    });
    return out;
}

EnsembleReport run_ensemble(const ReplacementSpec& spec, const std::vector<LawPrediction>& predictions,
                            const EnsembleConfig& config)
{
    const auto started = std::chrono::steady_clock::now();
    if (config.horizon < kMinHorizon) {
        fail(ErrorCode::InvalidArgument, "ensemble horizon must be at least " + std::to_string(kMinHorizon));
    }
    if (config.ensemble < kMinEnsemble) {
        fail(ErrorCode::InvalidArgument, "ensemble size must be at least " + std::to_string(kMinEnsemble));
    }
    if (static_cast<double>(config.horizon) * static_cast<double>(config.ensemble) > config.step_cap) {
        fail(ErrorCode::Resource, "N*M = " + num(static_cast<double>(config.horizon) * config.ensemble) +
                                      " exceeds the step cap " + num(config.step_cap));
    }
    EnsembleReport report;
    report.horizon = config.horizon;
    report.ensemble = config.ensemble;
    report.seed = config.seed;
    report.checkpoints = resolve_checkpoints(config, predictions);
    const std::size_t ncp = report.checkpoints.size();
    const std::size_t m = config.ensemble;

    std::vector<Vector> vectors;
    struct Slots {
        std::size_t track;
        std::optional<std::size_t> mixing;
        std::optional<std::size_t> companion;
    };
    std::vector<Slots> slots;
    for (const auto& p : predictions) {
        if (p.vector.size() != spec.colors()) {
            fail(ErrorCode::InvalidArgument, "prediction vector has the wrong length");
        }
        Slots s{intern(vectors, p.vector), std::nullopt, std::nullopt};
        if (p.mixing) {
            s.mixing = intern(vectors, p.mixing->vector);
        }
        if (p.companion) {
            s.companion = intern(vectors, p.companion->vector);
        }
        slots.push_back(s);
    }

    std::vector<std::vector<double>> data(vectors.size(), std::vector<double>(m * ncp));
    for_each_stream(m, config.threads, [&](std::uint64_t t) {
        UniformStream rng(config.seed, t);
        Vector counts = spec.initial();
        std::uint64_t n = 0;
        for (std::size_t c = 0; c < ncp; ++c) {
            advance(spec, counts, report.checkpoints[c] - n, rng);
            n = report.checkpoints[c];
            for (std::size_t v = 0; v < vectors.size(); ++v) {
                data[v][t * ncp + c] = dot(counts, vectors[v]);
            }
        }
    });

    const std::uint64_t horizon = report.checkpoints.back();
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        PredictionReport out;
        out.prediction = predictions[i];
        const auto& p = out.prediction;
        out.raw = data[slots[i].track];
        out.normalized.resize(m * ncp);
        out.terminal.resize(m);
        std::vector<double> norm(ncp);
        for (std::size_t c = 0; c < ncp; ++c) {
            norm[c] = p.normalization.evaluate(report.checkpoints[c]);
        }
        for (std::size_t t = 0; t < m; ++t) {
            for (std::size_t c = 0; c < ncp; ++c) {
                out.normalized[t * ncp + c] = out.raw[t * ncp + c] / norm[c];
            }
            out.terminal[t] = out.normalized[t * ncp + ncp - 1];
        }
        if (slots[i].mixing) {
            const auto& track = data[*slots[i].mixing];
            const double denom = std::pow(static_cast<double>(horizon), p.mixing->exponent);
            out.u_hat.resize(m);
            for (std::size_t t = 0; t < m; ++t) {
                out.u_hat[t] = track[t * ncp + ncp - 1] / denom;
            }
        }
        std::vector<double> companion;
        if (slots[i].companion) {
            const auto& track = data[*slots[i].companion];
            companion.resize(m * ncp);
            for (std::size_t c = 0; c < ncp; ++c) {
                const double denom = std::pow(static_cast<double>(report.checkpoints[c]), p.companion->exponent);
                for (std::size_t t = 0; t < m; ++t) {
                    companion[t * ncp + c] = track[t * ncp + c] / denom;
                }
            }
        }

        switch (p.kind) {
        case LimitKind::Normal:
        case LimitKind::NormalMixture:
            score_normal(out, report, config.variance_scale);
            break;
        case LimitKind::ASRandomVariable:
        case LimitKind::ASConstantVector:
            score_as(out, report, companion);
            break;
        case LimitKind::DeterministicConstant: {
            double worst = 0.0;
            for (double x : out.normalized) {
                worst = std::max(worst, std::abs(x - p.value));
            }
            out.deviation = worst;
            out.verdict = worst <= kMassTolerance ? Verdict::Pass : Verdict::Fail;
            out.detail = "max |normalized - " + num(p.value) + "| = " + num(worst);
            break;
        }
        case LimitKind::ExactlyConstantTrack: {
            double worst = 0.0;
            for (double x : out.raw) {
                worst = std::max(worst, std::abs(x - p.value));
            }
            const double tol =
                kConstantTrackTolerance * std::max(1.0, static_cast<double>(horizon + 1) * max_abs(p.vector));
            out.deviation = worst;
            out.verdict = worst <= tol ? Verdict::Pass : Verdict::Fail;
            out.detail = "max |track - C0.v| = " + num(worst) + " (tolerance " + num(tol) + ")";
            break;
        }
        }
        report.predictions.push_back(std::move(out));
    }
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

} // namespace urnlab
