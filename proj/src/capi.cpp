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

#include "urnlab/urnlab.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <string>

#include "urnlab/experiment.hpp"

struct urnlab_spec {
    urnlab::ReplacementSpec spec;
};

struct urnlab_class {
    urnlab::StructureClass cls;
};

struct urnlab_plan {
    urnlab::ExperimentPlan plan;
};

namespace {

thread_local std::string last_error;

urnlab_status set_error(urnlab_status status, const char* what)
{
    last_error = what;
    return status;
}

template <class F>
urnlab_status guarded(F&& body)
{
    try {
        body();
        last_error.clear();
        return URNLAB_OK;
    } catch (const urnlab::Error& e) {
        return set_error(static_cast<urnlab_status>(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return set_error(URNLAB_E_RESOURCE, "out of memory");
    } catch (const std::exception& e) {
        return set_error(URNLAB_E_INTERNAL, e.what());
    } catch (...) {
        return set_error(URNLAB_E_INTERNAL, "unknown exception");
    }
}

void require(bool ok, const char* what)
{
    if (!ok) {
        urnlab::fail(urnlab::ErrorCode::InvalidArgument, what);
    }
}

char* duplicate(const std::string& s)
{
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) {
        throw std::bad_alloc();
    }
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

} // namespace

extern "C" {

const char* urnlab_version(void)
{
    return "1.0.0";
}

const char* urnlab_last_error(void)
{
    return last_error.c_str();
}

int urnlab_exit_code(urnlab_status status)
{
    switch (status) {
    case URNLAB_OK: return urnlab::kExitPass;
    case URNLAB_E_UNSUPPORTED: return urnlab::kExitUnsupported;
    case URNLAB_E_INTERNAL: return urnlab::kExitFail;
    default: return urnlab::kExitUsage;
    }
}

void urnlab_string_free(char* s)
{
    std::free(s);
}

urnlab_status urnlab_spec_new(const double* r, size_t k, const double* c0, urnlab_spec** out)
{
    return guarded([&] {
        require(r != nullptr && c0 != nullptr && out != nullptr, "null argument");
        *out = nullptr;
        urnlab::Matrix m(k, k);
        for (size_t i = 0; i < k; ++i) {
            for (size_t j = 0; j < k; ++j) {
                m(i, j) = r[i * k + j];
            }
        }
        *out = new urnlab_spec{urnlab::ReplacementSpec::make(std::move(m), urnlab::Vector(c0, c0 + k))};
    });
}

void urnlab_spec_free(urnlab_spec* spec)
{
    delete spec;
}

size_t urnlab_spec_colors(const urnlab_spec* spec)
{
    return spec == nullptr ? 0 : spec->spec.colors();
}

urnlab_status urnlab_classify(const urnlab_spec* spec, urnlab_class** out)
{
    return guarded([&] {
        require(spec != nullptr && out != nullptr, "null argument");
        *out = nullptr;
        *out = new urnlab_class{urnlab::classify(spec->spec)};
    });
}

void urnlab_class_free(urnlab_class* cls)
{
    delete cls;
}

const char* urnlab_class_family(const urnlab_class* cls)
{
    if (cls == nullptr) {
        return "";
    }
    return urnlab::to_string(cls->cls.family).data();
}

urnlab_status urnlab_class_json(const urnlab_class* cls, char** json)
{
    return guarded([&] {
        require(cls != nullptr && json != nullptr, "null argument");
        *json = duplicate(urnlab::to_json(cls->cls).dump());
    });
}

urnlab_status urnlab_predictions_json(const urnlab_spec* spec, const urnlab_class* cls, char** json)
{
    return guarded([&] {
        require(spec != nullptr && cls != nullptr && json != nullptr, "null argument");
        auto table = nlohmann::json::array();
        for (const auto& p : urnlab::predict(spec->spec, cls->cls)) {
            table.push_back(urnlab::to_json(p));
        }
        *json = duplicate(table.dump());
    });
}

urnlab_status urnlab_pi_n(double lambda, uint64_t n, double* out)
{
    return guarded([&] {
        require(out != nullptr, "null argument");
        *out = urnlab::pi_n(lambda, n);
    });
}

urnlab_status urnlab_simulate(const urnlab_spec* spec, uint64_t n, uint64_t seed, uint64_t stream, double* counts)
{
    return guarded([&] {
        require(spec != nullptr && counts != nullptr, "null argument");
        urnlab::UniformStream rng(seed, stream);
        urnlab::Vector c = spec->spec.initial();
        urnlab::advance(spec->spec, c, n, rng);
        std::memcpy(counts, c.data(), c.size() * sizeof(double));
    });
}

urnlab_status urnlab_plan_parse(const char* text, urnlab_plan** out)
{
    return guarded([&] {
        require(text != nullptr && out != nullptr, "null argument");
        *out = nullptr;
        *out = new urnlab_plan{urnlab::parse_config(text)};
    });
}

urnlab_status urnlab_plan_load(const char* path, urnlab_plan** out)
{
    return guarded([&] {
        require(path != nullptr && out != nullptr, "null argument");
        *out = nullptr;
        *out = new urnlab_plan{urnlab::load_config(path)};
    });
}

void urnlab_plan_free(urnlab_plan* plan)
{
    delete plan;
}

urnlab_status urnlab_plan_set_uint(urnlab_plan* plan, const char* key, uint64_t value)
{
    return guarded([&] {
        require(plan != nullptr && key != nullptr, "null argument");
        auto& p = plan->plan;
        const std::string k = key;
        if (k == "horizon") {
            p.horizon = value;
        } else if (k == "ensemble") {
            p.ensemble = value;
        } else if (k == "seed") {
            p.seed = value;
        } else if (k == "threads") {
            p.threads = static_cast<unsigned>(value);
        } else {
            urnlab::fail(urnlab::ErrorCode::InvalidArgument, "unknown integer setting " + k);
        }
    });
}

urnlab_status urnlab_plan_set_double(urnlab_plan* plan, const char* key, double value)
{
    return guarded([&] {
        require(plan != nullptr && key != nullptr, "null argument");
        const std::string k = key;
        if (k == "cap") {
            plan->plan.cap = value;
        } else if (k == "variance_scale") {
            plan->plan.variance_scale = value;
        } else {
            urnlab::fail(urnlab::ErrorCode::InvalidArgument, "unknown real setting " + k);
        }
    });
}

urnlab_status urnlab_plan_set_output(urnlab_plan* plan, const char* dir)
{
    return guarded([&] {
        require(plan != nullptr && dir != nullptr && *dir != '\0', "null or empty argument");
        plan->plan.output = dir;
    });
}

urnlab_status urnlab_run(const urnlab_plan* plan, const char* stage, int* exit_code, char** summary)
{
    return guarded([&] {
        require(plan != nullptr && stage != nullptr && exit_code != nullptr, "null argument");
        const auto s = urnlab::parse_stage(stage);
        if (!s) {
            urnlab::fail(urnlab::ErrorCode::InvalidArgument, std::string("unknown stage ") + stage);
        }
        const auto result = urnlab::run(plan->plan, *s);
        *exit_code = result.exit_code;
        if (summary != nullptr) {
            *summary = duplicate(result.summary.dump());
        }
    });
}

} // extern "C"
