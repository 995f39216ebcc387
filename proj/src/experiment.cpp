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

#include "urnlab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "urnlab/error.hpp"
#include "urnlab/oracle.hpp"

namespace urnlab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& path, const std::string& what)
{
    fail(ErrorCode::Config, path + ": " + what);
}

double number_at(const json& j, const std::string& path)
{
    if (!j.is_number()) {
        config_error(path, "expected a number");
    }
    return j.get<double>();
}

std::uint64_t count_at(const json& j, const std::string& path)
{
    const double x = number_at(j, path);
    if (!(x >= 0.0) || x != std::floor(x) || x > 9.0e18) {
        config_error(path, "expected a non-negative integer");
    }
    return static_cast<std::uint64_t>(x);
}

Vector vector_at(const json& j, const std::string& path)
{
    if (!j.is_array()) {
        config_error(path, "expected an array of numbers");
    }
    Vector out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(number_at(j[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
}

Matrix matrix_at(const json& j, const std::string& path)
{
    if (!j.is_array() || j.empty()) {
        config_error(path, "expected a non-empty array of rows");
    }
    std::vector<Vector> rows;
    for (std::size_t i = 0; i < j.size(); ++i) {
        rows.push_back(vector_at(j[i], path + "[" + std::to_string(i) + "]"));
        if (rows.back().size() != rows.front().size()) {
            config_error(path + "[" + std::to_string(i) + "]", "row length differs from row 0");
        }
    }
    return Matrix::from_rows(rows);
}

json optional_number(const std::optional<double>& x)
{
    return x ? json(*x) : json(nullptr);
}

json finite_or_null(double x)
{
    return std::isfinite(x) ? json(x) : json(nullptr);
}

std::string csv_number(double x)
{
    if (!std::isfinite(x)) {
        return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        fail(ErrorCode::Io, "cannot write " + path.string());
    }
}

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};

void write_samples(const fs::path& path, const PredictionReport& r, const std::vector<std::uint64_t>& checkpoints)
{
    std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.string().c_str(), "wb"));
    if (!file) {
        fail(ErrorCode::Io, "cannot write " + path.string());
    }
    std::FILE* f = file.get();
    std::fputs("trajectory_id,checkpoint_n,raw_value,normalized_value,z_value,U_hat\n", f);
    const std::size_t ncp = checkpoints.size();
    const std::size_t m = r.terminal.size();
    for (std::size_t t = 0; t < m; ++t) {
        for (std::size_t c = 0; c < ncp; ++c) {
            const std::size_t k = t * ncp + c;
            std::fprintf(f, "%zu,%llu,%s,%s,", t, static_cast<unsigned long long>(checkpoints[c]),
                         csv_number(r.raw[k]).c_str(), csv_number(r.normalized[k]).c_str());
            if (c + 1 == ncp) {
                if (!r.z.empty()) {
                    std::fputs(csv_number(r.z[t]).c_str(), f);
                }
                std::fputc(',', f);
                if (!r.u_hat.empty()) {
                    std::fputs(csv_number(r.u_hat[t]).c_str(), f);
                }
            } else {
                std::fputc(',', f);
            }
            std::fputc('\n', f);
        }
    }
    if (std::ferror(f)) {
        fail(ErrorCode::Io, "write error on " + path.string());
    }
}

json report_json(const PredictionReport& r, std::size_t index, const std::vector<std::uint64_t>& checkpoints,
                 bool graded)
{
    json j;
    j["index"] = index;
    j["label"] = r.prediction.label;
    j["sample_file"] = "samples_" + std::to_string(index) + ".csv";
    if (graded) {
        j["verdict"] = std::string(to_string(r.verdict));
        j["detail"] = r.detail;
    }
    if (r.ks) {
        j["ks"] = {{"statistic", r.ks->statistic}, {"p_value", r.ks->p_value}, {"size", r.ks->size}};
        j["dropped"] = r.dropped;
    }
    if (r.diagnostics) {
        const auto& d = *r.diagnostics;
        json diag = {{"median_tail_fluctuation", finite_or_null(d.median_tail_fluctuation)},
                     {"median_abs_terminal", finite_or_null(d.median_abs_terminal)},
                     {"cross_variance", finite_or_null(d.cross_variance)},
                     {"all_positive", d.all_positive}};
        if (!d.gap_median.empty()) {
            json gaps = json::array();
            for (std::size_t c = 0; c < checkpoints.size(); ++c) {
                gaps.push_back({{"n", checkpoints[c]}, {"median_gap", finite_or_null(d.gap_median[c])}});
            }
            diag["gap_median"] = gaps;
        }
        j["diagnostics"] = diag;
    }
    if (r.deviation) {
        j["deviation"] = *r.deviation;
    }
    if (r.sample_mean) {
        j["sample_mean"] = *r.sample_mean;
        j["sample_variance"] = *r.sample_variance;
        j["mean_se"] = *r.mean_se;
        j["variance_se"] = *r.variance_se;
    }
    return j;
}

json plan_json(const ExperimentPlan& plan)
{
    json j;
    j["R"] = to_json(plan.replacement);
    j["C0"] = plan.initial;
    j["horizon"] = plan.horizon;
    j["ensemble"] = plan.ensemble;
    j["seed"] = plan.seed;
    if (plan.checkpoints.empty()) {
        j["checkpoints"] = {{"policy", "geometric"}, {"per_octave", plan.per_octave}};
    } else {
        j["checkpoints"] = plan.checkpoints;
    }
    j["predictions"] = plan.predictions.empty() ? json("all") : json(plan.predictions);
    j["cap"] = plan.cap;
    j["oracle_depth"] = plan.oracle_depth;
    if (plan.variance_scale != 1.0) {
        j["variance_scale"] = plan.variance_scale;
    }
    return j;
}

} // namespace

std::optional<Stage> parse_stage(std::string_view name)
{
    for (Stage s : {Stage::Classify, Stage::Predict, Stage::OracleCheck, Stage::Simulate, Stage::Verify, Stage::All}) {
        if (to_string(s) == name) {
            return s;
        }
    }
    return std::nullopt;
}

std::string_view to_string(Stage s)
{
    switch (s) {
    case Stage::Classify: return "classify";
    case Stage::Predict: return "predict";
    case Stage::OracleCheck: return "oracle-check";
    case Stage::Simulate: return "simulate";
    case Stage::Verify: return "verify";
    case Stage::All: return "all";
    }
    return "?";
}

ReplacementSpec ExperimentPlan::spec() const
{
    return ReplacementSpec::make(replacement, initial);
}

ExperimentPlan parse_config(std::string_view text)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        config_error("$", std::string("not valid JSON: ") + e.what());
    }
    if (!root.is_object()) {
        config_error("$", "expected an object");
    }
    static const std::vector<std::string> known = {"R",       "C0",     "horizon", "ensemble",    "seed",
                                                   "checkpoints", "predictions", "output", "cap",
                                                   "threads", "oracle_depth"};
    for (const auto& [key, value] : root.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            config_error("$." + key, "unknown field");
        }
    }
    for (const char* key : {"R", "C0"}) {
        if (!root.contains(key)) {
            config_error(std::string("$.") + key, "required field missing");
        }
    }
    ExperimentPlan plan;
    plan.replacement = matrix_at(root["R"], "$.R");
    plan.initial = vector_at(root["C0"], "$.C0");
    if (root.contains("horizon")) {
        plan.horizon = count_at(root["horizon"], "$.horizon");
    }
    if (root.contains("ensemble")) {
        plan.ensemble = count_at(root["ensemble"], "$.ensemble");
    }
    if (root.contains("seed")) {
        plan.seed = count_at(root["seed"], "$.seed");
    }
    if (root.contains("checkpoints")) {
        const json& c = root["checkpoints"];
        if (c.is_array()) {
            for (std::size_t i = 0; i < c.size(); ++i) {
                plan.checkpoints.push_back(count_at(c[i], "$.checkpoints[" + std::to_string(i) + "]"));
            }
        } else if (c.is_object()) {
            for (const auto& [key, value] : c.items()) {
                if (key == "policy") {
                    if (!value.is_string() || value.get<std::string>() != "geometric") {
                        config_error("$.checkpoints.policy", "only \"geometric\" is supported");
                    }
                } else if (key == "per_octave") {
                    const auto k = count_at(value, "$.checkpoints.per_octave");
                    if (k < 1 || k > 64) {
                        config_error("$.checkpoints.per_octave", "must be between 1 and 64");
                    }
                    plan.per_octave = static_cast<unsigned>(k);
                } else {
                    config_error("$.checkpoints." + key, "unknown field");
                }
            }
        } else {
            config_error("$.checkpoints", "expected a policy object or an array of step counts");
        }
    }
    if (root.contains("predictions")) {
        const json& p = root["predictions"];
        if (p.is_string()) {
            if (p.get<std::string>() != "all") {
                config_error("$.predictions", "expected \"all\" or an array of indices");
            }
        } else if (p.is_array()) {
            for (std::size_t i = 0; i < p.size(); ++i) {
                plan.predictions.push_back(count_at(p[i], "$.predictions[" + std::to_string(i) + "]"));
            }
            if (plan.predictions.empty()) {
                config_error("$.predictions", "empty selection");
            }
        } else {
            config_error("$.predictions", "expected \"all\" or an array of indices");
        }
    }
    if (root.contains("output")) {
        if (!root["output"].is_string() || root["output"].get<std::string>().empty()) {
            config_error("$.output", "expected a non-empty path");
        }
        plan.output = root["output"].get<std::string>();
    }
    if (root.contains("cap")) {
        plan.cap = number_at(root["cap"], "$.cap");
    }
    if (root.contains("threads")) {
        plan.threads = static_cast<unsigned>(std::min<std::uint64_t>(count_at(root["threads"], "$.threads"), 1024));
    }
    if (root.contains("oracle_depth")) {
        const auto d = count_at(root["oracle_depth"], "$.oracle_depth");
        if (d < 1 || d > oracle::kMaxTreeSteps) {
            config_error("$.oracle_depth", "must be between 1 and " + std::to_string(oracle::kMaxTreeSteps));
        }
        plan.oracle_depth = static_cast<unsigned>(d);
    }
    validate_plan(plan);
    return plan;
}

ExperimentPlan load_config(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::Io, "cannot read config " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void validate_plan(const ExperimentPlan& plan)
{
    (void)plan.spec();
    if (plan.horizon < kMinHorizon) {
        config_error("$.horizon", "must be at least " + std::to_string(kMinHorizon));
    }
    if (plan.ensemble < kMinEnsemble) {
        config_error("$.ensemble", "must be at least " + std::to_string(kMinEnsemble));
    }
    if (!(plan.cap > 0.0)) {
        config_error("$.cap", "must be positive");
    }
    const double work = static_cast<double>(plan.horizon) * static_cast<double>(plan.ensemble);
    if (work > plan.cap) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "horizon * ensemble = %.3g exceeds the step cap %.3g", work, plan.cap);
        fail(ErrorCode::Resource, buf);
    }
    if (!plan.checkpoints.empty()) {
        try {
            validate_checkpoints(plan.checkpoints, plan.horizon);
        } catch (const Error& e) {
            config_error("$.checkpoints", e.what());
        }
    }
    if (!(plan.variance_scale > 0.0) || !std::isfinite(plan.variance_scale)) {
        fail(ErrorCode::Config, "variance scale must be positive");
    }
}

json to_json(const Matrix& m)
{
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto r = m.row(i);
        rows.push_back(Vector(r.begin(), r.end()));
    }
    return rows;
}

json to_json(const StructureClass& cls)
{
    json j;
    j["family"] = std::string(to_string(cls.family));
    j["colors"] = cls.colors;
    if (cls.family == Family::Unsupported) {
        j["reason"] = cls.reason;
        return j;
    }
    j["permutation"] = cls.permutation;
    j["s"] = optional_number(cls.s);
    j["lambda"] = optional_number(cls.lambda);
    j["beta"] = optional_number(cls.beta);
    j["pi_R"] = cls.pi_R;
    for (auto [key, v] : {std::pair{"pi_P", &cls.pi_P}, std::pair{"pi_Q", &cls.pi_Q}, std::pair{"xi", &cls.xi},
                          std::pair{"nu", &cls.nu}, std::pair{"p", &cls.p}}) {
        if (!v->empty()) {
            j[key] = *v;
        }
    }
    j["periodic_P"] = cls.periodic_P;
    if (cls.jordan) {
        j["jordan"] = {{"T", to_json(cls.jordan->T)}, {"J", to_json(cls.jordan->J)}};
    }
    json pairs = json::array();
    for (const auto& e : cls.eigenpairs) {
        pairs.push_back({{"name", e.name}, {"value", e.value}, {"vector", e.vector}});
    }
    j["eigenpairs"] = pairs;
    json combos = json::array();
    for (std::size_t i = 0; i < cls.combination_vectors.size(); ++i) {
        combos.push_back({{"name", cls.combination_names[i]}, {"vector", cls.combination_vectors[i]}});
    }
    j["combinations"] = combos;
    return j;
}

json to_json(const LawPrediction& p)
{
    json j;
    j["label"] = p.label;
    j["regime"] = p.regime;
    j["vector"] = p.vector;
    j["normalization"] = p.normalization.symbol();
    j["limit"] = std::string(to_string(p.kind));
    j["value"] = p.value;
    j["positive"] = p.positive;
    auto path = [](const PathVariable& v) {
        return json{{"name", v.name}, {"vector", v.vector}, {"exponent", v.exponent}};
    };
    if (p.mixing) {
        j["mixing"] = path(*p.mixing);
    }
    if (p.companion) {
        j["companion"] = path(*p.companion);
    }
    if (p.limit_mean) {
        j["limit_mean"] = *p.limit_mean;
        j["limit_variance"] = *p.limit_variance;
    }
    if (p.unverified) {
        j["unverified"] = true;
    }
    return j;
}

std::vector<OracleRow> oracle_checks(const ReplacementSpec& spec, const StructureClass& cls, unsigned depth)
{
    depth = std::min(depth, oracle::kMaxTreeSteps);
    std::vector<OracleRow> rows;
    for (const auto& pair : cls.eigenpairs) {
        OracleRow row{"mean C_n." + pair.name, 0.0, kOracleTolerance, depth};
        const double start = dot(spec.initial(), pair.vector);
        for (unsigned n = 0; n <= depth; ++n) {
            const double expected = pi_n(pair.value, n) * start;
            const double exact = oracle::exact_mean_linear(spec, pair.vector, pair.value, n);
            row.error = std::max(row.error, std::abs(exact - expected));
            row.tolerance = std::max(row.tolerance, kOracleTolerance * std::abs(expected));
        }
        rows.push_back(row);
    }
    if (is_jordan(cls.family)) {
        rows.push_back({"compensated martingale", oracle::compensated_martingale_check(spec, cls, depth),
                        kOracleTolerance, depth});
    } else if (std::any_of(cls.eigenpairs.begin(), cls.eigenpairs.end(),
                           [](const EigenPair& e) { return std::abs(e.value - 1.0) > 1e-12; })) {
        rows.push_back({"conditional variance", oracle::exact_conditional_variance_check(spec, cls, depth),
                        kOracleTolerance, depth});
    }
    if (cls.family == Family::ThreeOneDominant) {
        rows.push_back({"evolution identity", oracle::evolution_identity_check(spec, cls, depth), kOracleTolerance,
                        depth});
    }
    return rows;
}

int exit_code_for(const Error& e)
{
    switch (e.code()) {
    case ErrorCode::Unsupported: return kExitUnsupported;
    case ErrorCode::Internal: return kExitFail;
    default: return kExitUsage;
    }
}

RunResult run(const ExperimentPlan& plan, Stage stage)
{
    validate_plan(plan);
    const ReplacementSpec spec = plan.spec();
    std::error_code ec;
    fs::create_directories(plan.output, ec);
    if (ec || !fs::is_directory(plan.output)) {
        fail(ErrorCode::Io, "cannot create output directory " + plan.output.string());
    }

    RunResult result;
    json& summary = result.summary;
    summary["stage"] = std::string(to_string(stage));
    summary["config"] = plan_json(plan);

    const StructureClass cls = classify(spec);
    summary["classification"] = to_json(cls);
    json table = json::array();
    std::vector<LawPrediction> predictions;
    if (cls.family == Family::Unsupported) {
        result.exit_code = kExitUnsupported;
    } else {
        summary["classification"]["spectral_residual"] = spectral_residual(spec, cls);
        if (stage != Stage::Classify) {
            predictions = predict(spec, cls);
            for (std::size_t i = 0; i < predictions.size(); ++i) {
                json row = to_json(predictions[i]);
                row["index"] = i;
                table.push_back(row);
            }
        }
    }
    summary["predictions"] = table;
    write_text(plan.output / "classification.json",
               json{{"classification", summary["classification"]}, {"predictions", table}}.dump(2) + "\n");
    if (result.exit_code == kExitUnsupported) {
        summary["exit_code"] = result.exit_code;
        write_text(plan.output / "summary.json", summary.dump(2) + "\n");
        return result;
    }

    std::string verdicts;
    if (stage == Stage::OracleCheck || stage == Stage::All) {
        json rows = json::array();
        for (const auto& row : oracle_checks(spec, cls, plan.oracle_depth)) {
            rows.push_back({{"check", row.check},
                            {"depth", row.depth},
                            {"error", row.error},
                            {"tolerance", row.tolerance},
                            {"verdict", row.pass() ? "PASS" : "FAIL"}});
            char line[256];
            std::snprintf(line, sizeof line, "oracle  %-4s  %s  (n <= %u, error %.3g, tolerance %.3g)\n",
                          row.pass() ? "PASS" : "FAIL", row.check.c_str(), row.depth, row.error, row.tolerance);
            verdicts += line;
            if (!row.pass()) {
                result.exit_code = kExitFail;
            }
        }
        summary["oracle"] = rows;
        write_text(plan.output / "oracle.json", rows.dump(2) + "\n");
    }

    double seconds = 0.0;
    if (stage == Stage::Simulate || stage == Stage::Verify || stage == Stage::All) {
        std::vector<std::size_t> selected = plan.predictions;
        if (selected.empty()) {
            for (std::size_t i = 0; i < predictions.size(); ++i) {
                selected.push_back(i);
            }
        }
        std::vector<LawPrediction> chosen;
        for (std::size_t i = 0; i < selected.size(); ++i) {
            if (selected[i] >= predictions.size()) {
                config_error("$.predictions[" + std::to_string(i) + "]",
                             "index " + std::to_string(selected[i]) + " out of range (" +
                                 std::to_string(predictions.size()) + " predictions)");
            }
            chosen.push_back(predictions[selected[i]]);
        }
        EnsembleConfig cfg;
        cfg.horizon = plan.horizon;
        cfg.ensemble = plan.ensemble;
        cfg.seed = plan.seed;
        cfg.checkpoints = plan.checkpoints.empty() ? geometric_checkpoints(plan.horizon, plan.per_octave)
                                                   : plan.checkpoints;
        cfg.threads = plan.threads;
        cfg.step_cap = plan.cap;
        cfg.variance_scale = plan.variance_scale;
        const EnsembleReport report = run_ensemble(spec, chosen, cfg);
        seconds = report.seconds;
        const bool graded = stage != Stage::Simulate;
        json reports = json::array();
        for (std::size_t i = 0; i < report.predictions.size(); ++i) {
            const auto& r = report.predictions[i];
            write_samples(plan.output / ("samples_" + std::to_string(selected[i]) + ".csv"), r, report.checkpoints);
            reports.push_back(report_json(r, selected[i], report.checkpoints, graded));
            if (graded) {
                verdicts += "[" + std::to_string(selected[i]) + "]  " + std::string(to_string(r.verdict)) + "  " +
                            r.prediction.label + "  " + r.detail + "\n";
            }
        }
        summary["ensemble"] = {{"horizon", report.horizon},
                               {"ensemble", report.ensemble},
                               {"seed", report.seed},
                               {"streams", {0, report.ensemble - 1}},
                               {"checkpoints", report.checkpoints},
                               {"results", reports}};
        if (graded && !report.all_pass()) {
            result.exit_code = kExitFail;
        }
    }
    if (!verdicts.empty()) {
        write_text(plan.output / "verdicts.txt", verdicts);
    }
    summary["exit_code"] = result.exit_code;
    write_text(plan.output / "summary.json", summary.dump(2) + "\n");
    write_text(plan.output / "timing.json", json{{"ensemble_seconds", seconds}}.dump(2) + "\n");
    return result;
}

} // namespace urnlab
