/* Copyright 2026 The sebcom Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the sebcom library: knowledge-base training and
 * synchronization, the semantic frame codec, the protected AWGN link and the
 * scenario runner. Every call returns a status code; on failure
 * sebcom_last_error() describes the problem for the calling thread.
 * Strings returned through char** are owned by the caller and released with
 * sebcom_string_free().
 */
#ifndef SEBCOM_H
#define SEBCOM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(SEBCOM_BUILDING)
#define SEBCOM_API __declspec(dllexport)
#else
#define SEBCOM_API __declspec(dllimport)
#endif
#else
#define SEBCOM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sebcom_status {
    SEBCOM_OK = 0,
    SEBCOM_E_INVALID_ARGUMENT = 1,
    SEBCOM_E_IO = 2,
    SEBCOM_E_FORMAT = 3,
    SEBCOM_E_CORRUPT = 4,
    SEBCOM_E_KB_MISMATCH = 5,
    SEBCOM_E_STALE = 6,
    SEBCOM_E_CONSTRUCTION = 7,
    SEBCOM_E_INTERNAL = 8
} sebcom_status;

typedef enum sebcom_granularity { SEBCOM_COARSE = 0, SEBCOM_FINE = 1 } sebcom_granularity;

typedef enum sebcom_uep_mode {
    SEBCOM_UEP_IMPORTANCE = 0,
    SEBCOM_UEP_RANDOM = 1,
    SEBCOM_UEP_NONE = 2
} sebcom_uep_mode;

typedef struct sebcom_kb sebcom_kb;

typedef struct sebcom_codec_config {
    double p_fine;
    double p_protect;
    uint32_t k_coarse;
    uint32_t k_fine;
    int32_t kmeans_max_iters;
    double kmeans_tol;
    uint64_t seed;
} sebcom_codec_config;

typedef struct sebcom_channel_config {
    double snr_db; /* Es/N0; INFINITY for a noiseless link */
    uint64_t seed;
    int32_t max_bp_iters;
    sebcom_uep_mode uep;
} sebcom_channel_config;

typedef struct sebcom_update_config {
    uint32_t candidates_coarse;
    uint32_t candidates_fine;
    int32_t kmeans_max_iters;
    double kmeans_tol;
    uint64_t seed;
} sebcom_update_config;

/* Optional overrides for a scenario config file; NULL strings and zero flags
 * leave the file's values in place. */
typedef struct sebcom_scenario_overrides {
    int has_seed;
    uint64_t seed;
    const double* snrs;
    size_t n_snrs;
    const char* importance;
    const char* csv_path;
    const char* json_path;
    const char* pgm_dir;
} sebcom_scenario_overrides;

SEBCOM_API const char* sebcom_version(void);
SEBCOM_API const char* sebcom_status_name(sebcom_status status);
SEBCOM_API const char* sebcom_last_error(void);
SEBCOM_API void sebcom_string_free(char* s);

SEBCOM_API void sebcom_codec_config_default(sebcom_codec_config* config);
SEBCOM_API void sebcom_channel_config_default(sebcom_channel_config* config);
SEBCOM_API void sebcom_update_config_default(sebcom_update_config* config);

/* importance: "builtin" or "file:<path>" (a PGM, or a directory of PGMs
 * named like the images). */
SEBCOM_API sebcom_status sebcom_kb_train(const char* const* image_paths, size_t n_images,
                                         const sebcom_codec_config* config, const char* importance,
                                         sebcom_kb** out);
/* KB files hold a FULL sync message. */
SEBCOM_API sebcom_status sebcom_kb_load(const char* path, sebcom_kb** out);
SEBCOM_API sebcom_status sebcom_kb_save(const sebcom_kb* kb, const char* path);
SEBCOM_API void sebcom_kb_free(sebcom_kb* kb);
SEBCOM_API uint32_t sebcom_kb_version(const sebcom_kb* kb);
SEBCOM_API size_t sebcom_kb_count(const sebcom_kb* kb, sebcom_granularity granularity);
/* Writes 64 hex digits and a terminating NUL. */
SEBCOM_API sebcom_status sebcom_kb_hash(const sebcom_kb* kb, char out_hex[65]);
/* JSON summary: version, counts, bits, hash, poset check. */
SEBCOM_API sebcom_status sebcom_kb_describe(const sebcom_kb* kb, char** out_json);

SEBCOM_API sebcom_status sebcom_encode_file(const sebcom_kb* kb, const char* image_path, const char* importance,
                                            const sebcom_codec_config* config, const char* frame_path);
/* crc_ok may be NULL. A frame whose CRC fails is still decoded. */
SEBCOM_API sebcom_status sebcom_decode_file(const sebcom_kb* kb, const char* frame_path, const char* image_path,
                                            int* crc_ok);
/* Send a frame file over the protected AWGN link and decode it against kb.
 * Any of the output paths may be NULL; out_json receives a summary. */
SEBCOM_API sebcom_status sebcom_transmit_file(const sebcom_kb* kb, const char* frame_path,
                                              const sebcom_channel_config* channel, const char* image_out,
                                              const char* frame_out, const char* dump_out, char** out_json);

SEBCOM_API sebcom_status sebcom_sync_write_full(const sebcom_kb* kb, const char* path);
SEBCOM_API sebcom_status sebcom_sync_write_request(const sebcom_kb* kb, float statistic, const char* path);
/* Access-point update: candidates from the given images, prune plan from the
 * current importances. Writes the DELTA and applies it to kb. */
SEBCOM_API sebcom_status sebcom_sync_write_delta(sebcom_kb* kb, const char* const* image_paths, size_t n_images,
                                                 const char* importance, const sebcom_update_config* config,
                                                 const char* path);
SEBCOM_API sebcom_status sebcom_sync_apply(sebcom_kb* kb, const char* path);
SEBCOM_API sebcom_status sebcom_sync_describe(const char* path, char** out_json);

/* Runs the scenario described by a JSON config file; out_json (may be NULL)
 * receives the report. */
SEBCOM_API sebcom_status sebcom_run_scenario(const char* config_path, const sebcom_scenario_overrides* overrides,
                                             char** out_json);

/* Writes <family>_<index>.pgm files into out_dir. */
SEBCOM_API sebcom_status sebcom_gen_corpus(const char* family, size_t count, int32_t size, uint64_t seed,
                                           const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* SEBCOM_H */
