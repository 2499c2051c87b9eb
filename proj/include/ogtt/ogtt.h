/* C interface to the OGTT design library.
 *
 * All work goes through ogtt_run: the request is a JSON document
 *   { "command":  "simulate" | "fit" | "estimate" | "compare" | "search" |
 *                 "validate-random" | "validate-surrogate" | "validate-robust",
 *     "config":   { ... }            (inline configuration; optional)
 *     "config_path": "cfg.json",     (or a path to one; optional)
 *     "overrides": { "seed": 1, "out_dir": "out", "workers": 4 },
 *     "args":     { ... } }          (command arguments)
 * and the response (written to *response_json on success) is the command's
 * result document.  Artifacts land under the configured output directory.
 *
 * Thread safety: one context per thread; a context carries only the last
 * error message.
 */
#ifndef OGTT_OGTT_H
#define OGTT_OGTT_H

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes returned by ogtt_run; they double as CLI exit codes. */
enum {
  OGTT_OK = 0,
  OGTT_ERR_INTERNAL = 1,   /* unexpected failure */
  OGTT_ERR_INPUT = 2,      /* bad request, config, data, or design */
  OGTT_ERR_ESTIMATION = 3, /* sampler or estimator could not deliver */
  OGTT_ERR_CONTRACT = 4    /* persisted state inconsistent with the run */
};

typedef struct ogtt_ctx ogtt_ctx;

ogtt_ctx* ogtt_ctx_new(void);
void ogtt_ctx_free(ogtt_ctx* ctx);

/* Execute one command.  On OGTT_OK, *response_json receives a NUL-terminated
 * JSON document to be released with ogtt_string_free.  On error, returns one
 * of the nonzero codes and leaves the message in ogtt_last_error. */
int ogtt_run(ogtt_ctx* ctx, const char* request_json, char** response_json);

/* Message of the most recent failed ogtt_run on this context ("" if none).
 * Valid until the next ogtt_run or ogtt_ctx_free. */
const char* ogtt_last_error(const ogtt_ctx* ctx);

void ogtt_string_free(char* s);

/* Library version, e.g. "0.1.0". */
const char* ogtt_version(void);

#ifdef __cplusplus
}
#endif

#endif /* OGTT_OGTT_H */
