/* include/dirsep/dirsep.h */

/* Copyright 2026 dirsep authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the dirsep multichannel source-separation library.
 *
 * Conventions:
 *  - Every fallible call returns a dirsep_status; on failure,
 *    dirsep_last_error() describes the problem (thread-local, valid
 *    until the next failing call on the same thread).
 *  - `char**` / blob out-parameters hand ownership to the caller; free
 *    them with dirsep_string_free. `const char*` / `const double*`
 *    getters borrow from the handle and die with it.
 *  - Handles are freed with their matching *_free function; all *_free
 *    functions accept NULL.
 */

#ifndef DIRSEP_DIRSEP_H
#define DIRSEP_DIRSEP_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dirsep_status {
  DIRSEP_OK = 0,
  DIRSEP_ERR_INVALID_ARG = 1, /* bad parameter or shape mismatch */
  DIRSEP_ERR_IO = 2,          /* file missing or unreadable/unwritable */
  DIRSEP_ERR_FORMAT = 3,      /* bytes read but not parseable */
  DIRSEP_ERR_RUNTIME = 4      /* any other failure */
} dirsep_status;

const char* dirsep_version(void);
const char* dirsep_last_error(void);
void dirsep_string_free(char* s);

/* ---- audio buffers ---- */

typedef struct dirsep_audio dirsep_audio;

typedef enum dirsep_wav_format {
  DIRSEP_WAV_FLOAT32 = 0,
  DIRSEP_WAV_PCM16 = 1
} dirsep_wav_format;

dirsep_status dirsep_audio_load(const char* path, dirsep_audio** out);
dirsep_status dirsep_audio_save(const dirsep_audio* audio, const char* path,
                                dirsep_wav_format format);
/* data is channel-major: channel c occupies data[c*num_samples .. +num_samples). */
dirsep_status dirsep_audio_create(const double* data, int num_channels, int64_t num_samples,
                                  int sample_rate, dirsep_audio** out);
int dirsep_audio_channels(const dirsep_audio* audio);
int64_t dirsep_audio_num_samples(const dirsep_audio* audio);
int dirsep_audio_sample_rate(const dirsep_audio* audio);
/* Borrowed pointer to one channel's samples; NULL if out of range. */
const double* dirsep_audio_samples(const dirsep_audio* audio, int channel);
void dirsep_audio_free(dirsep_audio* audio);

/* ---- scene synthesis ---- */

/* Builds the S+1-channel one-sample-delay test scene from S mono
 * sources (2 to 4, common sample rate): channel 0 is the plain sum,
 * channel i delays source i by one sample. */
typedef struct dirsep_scene dirsep_scene;

dirsep_status dirsep_mix(const dirsep_audio* const* sources, int num_sources,
                         dirsep_scene** out);
int dirsep_scene_num_sources(const dirsep_scene* scene);
const dirsep_audio* dirsep_scene_mixture(const dirsep_scene* scene);
/* Ground-truth image of source `index` at channel 0 (mono). */
const dirsep_audio* dirsep_scene_reference(const dirsep_scene* scene, int index);
/* Microphone layout as JSON {"positions": [[x,y],...], "speed_of_sound": c}. */
dirsep_status dirsep_scene_geometry_json(const dirsep_scene* scene, char** out_json);
void dirsep_scene_free(dirsep_scene* scene);

/* ---- per-bin direction of arrival ---- */

/* Runs the STFT on every channel of `mixture` and estimates one
 * direction bin (0..num_directions-1, azimuth quantized over [0, 2pi))
 * per time-frequency cell. geometry_json may be NULL when the mixture
 * has the dirsep_mix layout (channels-1 sources). Output is either JSON
 * ({"bins","frames","num_directions","d"}) or CSV (one row per
 * frequency). */
dirsep_status dirsep_direction_field_json(const dirsep_audio* mixture,
                                          const char* geometry_json, int num_directions,
                                          int frame_size, int hop, char** out_json);
dirsep_status dirsep_direction_field_csv(const dirsep_audio* mixture,
                                         const char* geometry_json, int num_directions,
                                         int frame_size, int hop, char** out_csv);

/* ---- separation ---- */

typedef struct dirsep_separation dirsep_separation;

typedef struct dirsep_separate_params {
  const char* algorithm; /* "dntf", "dnmf", or "supervised" */
  int sources;           /* S */
  int atoms;             /* Z, dictionary size (dntf/supervised) */
  int directions;        /* D, direction bins (dntf/dnmf) */
  int iterations;
  uint64_t seed;
  const char* mask_mode; /* "conditioned" or "marginal" */
  int threads;           /* 1 = sequential */
  int frame_size;
  int hop;
} dirsep_separate_params;

/* Fills defaults: dntf, S=2, Z=20, D=24, 200 iterations, seed 0,
 * conditioned mask, 1 thread, frame 1024, hop 256. */
void dirsep_separate_params_init(dirsep_separate_params* params);

/* Separates a multichannel mixture recorded with `geometry_json`
 * microphones (NULL = dirsep_mix layout). `training` supplies one clean
 * mono clip per source and is required for "supervised" (pass NULL/0
 * otherwise). */
dirsep_status dirsep_separate(const dirsep_audio* mixture,
                              const dirsep_audio* const* training, int num_training,
                              const dirsep_separate_params* params, const char* geometry_json,
                              dirsep_separation** out);
int dirsep_separation_count(const dirsep_separation* sep);
const dirsep_audio* dirsep_separation_source(const dirsep_separation* sep, int index);
/* Fitted model as JSON (borrowed). */
const char* dirsep_separation_model_json(const dirsep_separation* sep);
/* Per-source direction summary as JSON; NULL for algorithms without a
 * direction factor ("supervised"). */
const char* dirsep_separation_directions_json(const dirsep_separation* sep);
/* Soft mask container ("DIRSEPMK" header + float64 payload), borrowed. */
dirsep_status dirsep_separation_mask_blob(const dirsep_separation* sep,
                                          const uint8_t** out_data, size_t* out_size);
void dirsep_separation_free(dirsep_separation* sep);

/* ---- evaluation ---- */

/* BSS_EVAL SDR/SIR/SAR with permutation resolution; mono clips of one
 * common length. JSON: {filter_length, permutation, per_source, mean,
 * min}. */
dirsep_status dirsep_bss_eval_json(const dirsep_audio* const* references, int num_references,
                                   const dirsep_audio* const* estimates, int num_estimates,
                                   int filter_length, char** out_json);

/* ---- benchmark experiment ---- */

/* Runs the full benchmark described by config_json (see README for the
 * schema; "{}" runs the synthetic default) and returns the report as
 * JSON and/or a printable table; either out-pointer may be NULL. */
dirsep_status dirsep_run_experiment(const char* config_json, char** out_report_json,
                                    char** out_table_text);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* DIRSEP_DIRSEP_H */
