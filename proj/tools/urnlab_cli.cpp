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

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "urnlab/urnlab.h"

namespace {

struct Options {
    std::string config;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> horizon;
    std::optional<std::uint64_t> ensemble;
    std::optional<double> cap;
    std::optional<unsigned> threads;
    std::optional<double> variance_scale;
};

int report_error(urnlab_status status)
{
    std::cerr << "urnlab: " << urnlab_last_error() << "\n";
    return urnlab_exit_code(status);
}

void print_summary(const std::string& text)
{
    const auto s = nlohmann::json::parse(text);
    const auto& cls = s["classification"];
    std::cout << "family: " << cls["family"].get<std::string>() << "\n";
    if (cls.contains("reason")) {
        std::cout << "reason: " << cls["reason"].get<std::string>() << "\n";
    }
    for (const auto& p : s["predictions"]) {
        std::cout << "  [" << p["index"].get<std::size_t>() << "] " << p["label"].get<std::string>() << "  ~ "
                  << p["limit"].get<std::string>() << " at " << p["normalization"].get<std::string>() << "\n";
    }
    if (s.contains("oracle")) {
        for (const auto& row : s["oracle"]) {
            std::cout << "oracle " << row["verdict"].get<std::string>() << "  " << row["check"].get<std::string>()
                      << "  error " << row["error"].get<double>() << "\n";
        }
    }
    if (s.contains("ensemble")) {
        for (const auto& r : s["ensemble"]["results"]) {
            std::cout << "[" << r["index"].get<std::size_t>() << "] ";
            if (r.contains("verdict")) {
                std::cout << r["verdict"].get<std::string>() << "  ";
            }
            std::cout << r["label"].get<std::string>();
            if (r.contains("detail")) {
                std::cout << "  " << r["detail"].get<std::string>();
            }
            std::cout << "\n";
        }
    }
}

int execute(const std::string& stage, const Options& opt)
{
    urnlab_plan* plan = nullptr;
    urnlab_status st = urnlab_plan_load(opt.config.c_str(), &plan);
    if (st != URNLAB_OK) {
        return report_error(st);
    }
    auto set = [&](urnlab_status s) {
        if (st == URNLAB_OK) {
            st = s;
        }
    };
    if (opt.out) {
        set(urnlab_plan_set_output(plan, opt.out->c_str()));
    }
    if (opt.seed) {
        set(urnlab_plan_set_uint(plan, "seed", *opt.seed));
    }
    if (opt.horizon) {
        set(urnlab_plan_set_uint(plan, "horizon", *opt.horizon));
    }
    if (opt.ensemble) {
        set(urnlab_plan_set_uint(plan, "ensemble", *opt.ensemble));
    }
    if (opt.threads) {
        set(urnlab_plan_set_uint(plan, "threads", *opt.threads));
    }
    if (opt.cap) {
        set(urnlab_plan_set_double(plan, "cap", *opt.cap));
    }
    if (opt.variance_scale) {
        set(urnlab_plan_set_double(plan, "variance_scale", *opt.variance_scale));
    }
    int exit_code = 0;
    char* summary = nullptr;
    if (st == URNLAB_OK) {
        st = urnlab_run(plan, stage.c_str(), &exit_code, &summary);
    }
    urnlab_plan_free(plan);
    if (st != URNLAB_OK) {
        return report_error(st);
    }
    print_summary(summary);
    urnlab_string_free(summary);
    return exit_code;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Generalized Polya urn limit-law verifier"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(urnlab_version()));

    Options opt;
    std::string chosen;
    const std::pair<const char*, const char*> stages[] = {
        {"classify", "Classify the replacement matrix"},
        {"predict", "Classify and write the prediction table"},
        {"oracle-check", "Exact small-n checks on the enumeration tree"},
        {"simulate", "Run the ensemble and write sample files"},
        {"verify", "Run the ensemble and grade every prediction"},
        {"all", "Classify, predict, oracle-check and verify"},
    };
    for (const auto& [name, help] : stages) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opt.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out, "Output directory");
        sub->add_option("--seed", opt.seed, "Root seed");
        sub->add_option("--horizon", opt.horizon, "Steps per trajectory N");
        sub->add_option("--ensemble", opt.ensemble, "Trajectories M");
        sub->add_option("--cap", opt.cap, "Upper bound on N*M");
        sub->add_option("--threads", opt.threads, "Worker threads (0: all cores)");
        sub->add_option("--variance-scale", opt.variance_scale, "Multiply predicted variances (testing only)")
            ->group("");
        sub->callback([&chosen, sub] { chosen = sub->get_name(); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }
    return execute(chosen, opt);
}
