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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "urnlab/error.hpp"
#include "urnlab/laws.hpp"
#include "urnlab/spectral.hpp"
#include "urnlab/urn.hpp"
#include "urnlab/verify.hpp"

namespace urnlab {

enum class Stage { Classify, Predict, OracleCheck, Simulate, Verify, All };

std::optional<Stage> parse_stage(std::string_view name);
std::string_view to_string(Stage s);

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUnsupported = 2;
inline constexpr int kExitUsage = 3;

inline constexpr unsigned kDefaultOracleDepth = 6;
inline constexpr double kOracleTolerance = 1e-10;

struct ExperimentPlan {
    Matrix replacement;
    Vector initial;
    std::uint64_t horizon = 100000;
    std::uint64_t ensemble = 10000;
    std::uint64_t seed = 1;
    unsigned per_octave = 1;
    std::vector<std::uint64_t> checkpoints;
    // Indices into the prediction table; empty means all.
    std::vector<std::size_t> predictions;
    std::filesystem::path output = "urnlab-out";
    double cap = kDefaultStepCap;
    unsigned threads = 0;
    unsigned oracle_depth = kDefaultOracleDepth;
    double variance_scale = 1.0;

    ReplacementSpec spec() const;
};

// Error(Config) with a "$.field" path for schema problems; matrix problems are
// forwarded from ReplacementSpec::make.
ExperimentPlan parse_config(std::string_view text);
ExperimentPlan load_config(const std::filesystem::path& path);

// Re-checks the cross-field constraints after command-line overrides.
void validate_plan(const ExperimentPlan& plan);

nlohmann::json to_json(const StructureClass& cls);
nlohmann::json to_json(const LawPrediction& p);
nlohmann::json to_json(const Matrix& m);

struct OracleRow {
    std::string check;
    double error = 0.0;
    double tolerance = kOracleTolerance;
    unsigned depth = 0;
    bool pass() const { return error <= tolerance; }
};

std::vector<OracleRow> oracle_checks(const ReplacementSpec& spec, const StructureClass& cls, unsigned depth);

struct RunResult {
    int exit_code = kExitPass;
    nlohmann::json summary;
};

// Writes the stage's artifacts under plan.output. Exceptions propagate.
RunResult run(const ExperimentPlan& plan, Stage stage);

// Maps an exception escaping parse/run onto the documented exit codes.
int exit_code_for(const Error& e);

} // namespace urnlab
