/*
 *  Copyright 2026 The crdtlab Authors
 *
 *  Licensed under the Apache License, Version 2.0 (the "License");
 *  you may not use this file except in compliance with the License.
 *  You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 *  Unless required by applicable law or agreed to in writing, software
 *  distributed under the License is distributed on an "AS IS" BASIS,
 *  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *  See the License for the specific language governing permissions and
 *  limitations under the License.
 */

/* C interface of the crdtlab scenario runner. All handles are opaque and
 * owned by the caller once returned; free them with the matching *_free.
 * Functions report failures through crdtlab_status and leave a message for
 * crdtlab_last_error() on the calling thread. */

#ifndef CRDTLAB_H_
#define CRDTLAB_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CRDTLAB_BUILDING)
#    define CRDTLAB_API __declspec(dllexport)
#  else
#    define CRDTLAB_API __declspec(dllimport)
#  endif
#else
#  define CRDTLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum crdtlab_status {
  CRDTLAB_OK = 0,
  CRDTLAB_ASSERTION_FAILED = 1, /* ran; some assertion in the scenario failed */
  CRDTLAB_PARSE_ERROR = 2,      /* malformed scenario text */
  CRDTLAB_INVALID_ARGUMENT = 3, /* null handle, unknown approach name, ... */
  CRDTLAB_UNSUPPORTED = 4,      /* approach does not implement the datatype */
  CRDTLAB_DIVERGENCE = 5,       /* compare: approaches disagree at the end */
  CRDTLAB_INTERNAL = 6
} crdtlab_status;

/* crdtlab_run flags */
#define CRDTLAB_RUN_TRACE 0x1u

typedef struct crdtlab_scenario crdtlab_scenario;
typedef struct crdtlab_report crdtlab_report;

CRDTLAB_API const char* crdtlab_version(void);

/* Message describing the most recent failure on this thread, or "". */
CRDTLAB_API const char* crdtlab_last_error(void);

CRDTLAB_API crdtlab_status crdtlab_scenario_parse(const char* text, size_t length,
                                                  crdtlab_scenario** out);
CRDTLAB_API void crdtlab_scenario_free(crdtlab_scenario* scenario);
CRDTLAB_API crdtlab_status crdtlab_scenario_set_seed(crdtlab_scenario* scenario, uint64_t seed);
CRDTLAB_API crdtlab_status crdtlab_scenario_set_name(crdtlab_scenario* scenario,
                                                     const char* name);

/* Runs the scenario. On CRDTLAB_OK and CRDTLAB_ASSERTION_FAILED a report is
 * stored in *out. */
CRDTLAB_API crdtlab_status crdtlab_run(const crdtlab_scenario* scenario, unsigned flags,
                                       crdtlab_report** out);

/* Runs the scenario once per approach in the comma-separated list. On
 * CRDTLAB_OK, CRDTLAB_ASSERTION_FAILED and CRDTLAB_DIVERGENCE a report is
 * stored in *out. */
CRDTLAB_API crdtlab_status crdtlab_compare(const crdtlab_scenario* scenario,
                                           const char* approaches, crdtlab_report** out);

CRDTLAB_API const char* crdtlab_report_text(const crdtlab_report* report);
CRDTLAB_API int crdtlab_report_passed(const crdtlab_report* report);
CRDTLAB_API void crdtlab_report_free(crdtlab_report* report);

CRDTLAB_API size_t crdtlab_datatype_count(void);
CRDTLAB_API const char* crdtlab_datatype_name(size_t index);
CRDTLAB_API size_t crdtlab_approach_count(void);
CRDTLAB_API const char* crdtlab_approach_name(size_t index);
/* 1 if supported, 0 if not, -1 if either name is unknown. */
CRDTLAB_API int crdtlab_supports(const char* approach, const char* datatype);

#ifdef __cplusplus
}
#endif

#endif /* CRDTLAB_H_ */
