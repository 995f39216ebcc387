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

#ifndef URNLAB_H
#define URNLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define URNLAB_API __declspec(dllexport)
#else
#  define URNLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum urnlab_status {
    URNLAB_OK = 0,
    URNLAB_E_INVALID_ARGUMENT = 1,
    URNLAB_E_DOMAIN = 2,
    URNLAB_E_UNSUPPORTED = 3,
    URNLAB_E_CONFIG = 4,
    URNLAB_E_RESOURCE = 5,
    URNLAB_E_IO = 6,
    URNLAB_E_INTERNAL = 7
} urnlab_status;

typedef struct urnlab_spec urnlab_spec;
typedef struct urnlab_class urnlab_class;
typedef struct urnlab_plan urnlab_plan;

URNLAB_API const char* urnlab_version(void);

/* Message for the last non-OK status on the calling thread; "" if none. */
URNLAB_API const char* urnlab_last_error(void);

/* Process exit code documented for the CLI: 0, 1, 2 (unsupported) or 3. */
URNLAB_API int urnlab_exit_code(urnlab_status status);

/* Strings returned through char** are owned by the caller. */
URNLAB_API void urnlab_string_free(char* s);

/* r is k*k row-major, c0 has k entries. */
URNLAB_API urnlab_status urnlab_spec_new(const double* r, size_t k, const double* c0, urnlab_spec** out);
URNLAB_API void urnlab_spec_free(urnlab_spec* spec);
URNLAB_API size_t urnlab_spec_colors(const urnlab_spec* spec);

URNLAB_API urnlab_status urnlab_classify(const urnlab_spec* spec, urnlab_class** out);
URNLAB_API void urnlab_class_free(urnlab_class* cls);
/* Static string, valid for the life of the process. */
URNLAB_API const char* urnlab_class_family(const urnlab_class* cls);
URNLAB_API urnlab_status urnlab_class_json(const urnlab_class* cls, char** json);
URNLAB_API urnlab_status urnlab_predictions_json(const urnlab_spec* spec, const urnlab_class* cls, char** json);

URNLAB_API urnlab_status urnlab_pi_n(double lambda, uint64_t n, double* out);

/* Composition after n draws on stream `stream` of `seed`; counts has k slots. */
URNLAB_API urnlab_status urnlab_simulate(const urnlab_spec* spec, uint64_t n, uint64_t seed, uint64_t stream,
                                         double* counts);

URNLAB_API urnlab_status urnlab_plan_parse(const char* text, urnlab_plan** out);
URNLAB_API urnlab_status urnlab_plan_load(const char* path, urnlab_plan** out);
URNLAB_API void urnlab_plan_free(urnlab_plan* plan);

/* Keys: "horizon", "ensemble", "seed", "threads". */
URNLAB_API urnlab_status urnlab_plan_set_uint(urnlab_plan* plan, const char* key, uint64_t value);
/* Keys: "cap", "variance_scale" (test override). */
URNLAB_API urnlab_status urnlab_plan_set_double(urnlab_plan* plan, const char* key, double value);
URNLAB_API urnlab_status urnlab_plan_set_output(urnlab_plan* plan, const char* dir);

/* Stage: classify, predict, oracle-check, simulate, verify or all. On OK,
   *exit_code holds the run's exit code; summary may be NULL. */
URNLAB_API urnlab_status urnlab_run(const urnlab_plan* plan, const char* stage, int* exit_code, char** summary);

#ifdef __cplusplus
}
#endif

#endif
