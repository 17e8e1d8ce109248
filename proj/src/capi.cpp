// src/capi.cpp

// Copyright 2026 dirsep authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dirsep/dirsep.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "audio.hpp"
#include "bss_eval.hpp"
#include "doa.hpp"
#include "errors.hpp"
#include "experiment.hpp"
#include "json.hpp"
#include "mask.hpp"
#include "mixture.hpp"
#include "model_io.hpp"
#include "nmf.hpp"
#include "ntf.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "stft.hpp"

struct dirsep_audio {
  dirsep::AudioClip clip;
};

struct dirsep_scene {
  dirsep_audio mixture;
  std::vector<dirsep_audio> references;
  std::string geometry_json;
};

struct dirsep_separation {
  std::vector<dirsep_audio> sources;
  std::string model_json;
  std::string directions_json;  // empty when the model has no direction factor
  std::vector<std::uint8_t> mask_blob;
};

namespace {

thread_local std::string g_last_error;

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
dirsep_status guarded(Fn&& fn) {
  try {
    fn();
    return DIRSEP_OK;
  } catch (const std::invalid_argument& e) {
    g_last_error = e.what();
    return DIRSEP_ERR_INVALID_ARG;
  } catch (const dirsep::IoError& e) {
    g_last_error = e.what();
    return DIRSEP_ERR_IO;
  } catch (const dirsep::FormatError& e) {
    g_last_error = e.what();
    return DIRSEP_ERR_FORMAT;
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return DIRSEP_ERR_FORMAT;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DIRSEP_ERR_RUNTIME;
  } catch (...) {
    g_last_error = "unknown error";
    return DIRSEP_ERR_RUNTIME;
  }
}

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

dirsep::ArrayGeometry resolve_geometry(const dirsep::AudioClip& mixture,
                                       const char* geometry_json) {
  if (geometry_json != nullptr) return dirsep::geometry_from_json(geometry_json);
  require(mixture.channels() >= 2, "mixture needs at least two channels");
  return dirsep::delay_scene_geometry(mixture.channels() - 1, mixture.sample_rate);
}

std::vector<dirsep::ComplexGrid> channel_grids(const dirsep::AudioClip& mixture,
                                               const dirsep::StftParams& params) {
  std::vector<dirsep::ComplexGrid> grids;
  grids.reserve(mixture.channels());
  for (int c = 0; c < mixture.channels(); ++c) {
    grids.push_back(dirsep::stft(dirsep::mono_channel(mixture, c), params));
  }
  return grids;
}

}  // namespace

extern "C" {

const char* dirsep_version(void) { return "0.1.0"; }

const char* dirsep_last_error(void) { return g_last_error.c_str(); }

void dirsep_string_free(char* s) { std::free(s); }

dirsep_status dirsep_audio_load(const char* path, dirsep_audio** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    auto handle = std::make_unique<dirsep_audio>();
    handle->clip = dirsep::read_wav(path);
    *out = handle.release();
  });
}

dirsep_status dirsep_audio_save(const dirsep_audio* audio, const char* path,
                                dirsep_wav_format format) {
  return guarded([&] {
    require(audio != nullptr && path != nullptr, "null argument");
    dirsep::write_wav(audio->clip, path,
                      format == DIRSEP_WAV_PCM16 ? dirsep::WavFormat::kPcm16
                                                 : dirsep::WavFormat::kFloat32);
  });
}

dirsep_status dirsep_audio_create(const double* data, int num_channels, int64_t num_samples,
                                  int sample_rate, dirsep_audio** out) {
  return guarded([&] {
    require(data != nullptr && out != nullptr, "null argument");
    require(num_channels > 0 && num_samples > 0, "empty audio buffer");
    auto handle = std::make_unique<dirsep_audio>();
    handle->clip.sample_rate = sample_rate;
    handle->clip.samples.resize(num_channels);
    for (int c = 0; c < num_channels; ++c) {
      const double* begin = data + static_cast<std::size_t>(c) * num_samples;
      handle->clip.samples[c].assign(begin, begin + num_samples);
    }
    dirsep::validate(handle->clip);
    *out = handle.release();
  });
}

int dirsep_audio_channels(const dirsep_audio* audio) {
  return audio == nullptr ? 0 : audio->clip.channels();
}

int64_t dirsep_audio_num_samples(const dirsep_audio* audio) {
  return audio == nullptr ? 0 : static_cast<int64_t>(audio->clip.num_samples());
}

int dirsep_audio_sample_rate(const dirsep_audio* audio) {
  return audio == nullptr ? 0 : audio->clip.sample_rate;
}

const double* dirsep_audio_samples(const dirsep_audio* audio, int channel) {
  if (audio == nullptr || channel < 0 || channel >= audio->clip.channels()) return nullptr;
  return audio->clip.samples[channel].data();
}

void dirsep_audio_free(dirsep_audio* audio) { delete audio; }

dirsep_status dirsep_mix(const dirsep_audio* const* sources, int num_sources,
                         dirsep_scene** out) {
  return guarded([&] {
    require(sources != nullptr && out != nullptr, "null argument");
    require(num_sources >= 1, "scene needs at least one source");
    std::vector<dirsep::AudioClip> clips;
    clips.reserve(num_sources);
    for (int s = 0; s < num_sources; ++s) {
      require(sources[s] != nullptr, "null source clip");
      clips.push_back(sources[s]->clip);
    }
    dirsep::MixtureScene scene = dirsep::synthesize_mixture(clips);
    auto handle = std::make_unique<dirsep_scene>();
    handle->mixture.clip = std::move(scene.mixture);
    handle->references.resize(scene.references.size());
    for (std::size_t s = 0; s < scene.references.size(); ++s) {
      handle->references[s].clip.sample_rate = handle->mixture.clip.sample_rate;
      handle->references[s].clip.samples = {std::move(scene.references[s])};
    }
    handle->geometry_json = dirsep::geometry_to_json(scene.geometry);
    *out = handle.release();
  });
}

int dirsep_scene_num_sources(const dirsep_scene* scene) {
  return scene == nullptr ? 0 : static_cast<int>(scene->references.size());
}

const dirsep_audio* dirsep_scene_mixture(const dirsep_scene* scene) {
  return scene == nullptr ? nullptr : &scene->mixture;
}

const dirsep_audio* dirsep_scene_reference(const dirsep_scene* scene, int index) {
  if (scene == nullptr || index < 0 || index >= static_cast<int>(scene->references.size())) {
    return nullptr;
  }
  return &scene->references[index];
}

dirsep_status dirsep_scene_geometry_json(const dirsep_scene* scene, char** out_json) {
  return guarded([&] {
    require(scene != nullptr && out_json != nullptr, "null argument");
    *out_json = copy_string(scene->geometry_json);
  });
}

void dirsep_scene_free(dirsep_scene* scene) { delete scene; }

static dirsep_status direction_field_impl(const dirsep_audio* mixture,
                                          const char* geometry_json, int num_directions,
                                          int frame_size, int hop, bool csv, char** out) {
  return guarded([&] {
    require(mixture != nullptr && out != nullptr, "null argument");
    dirsep::StftParams params;
    if (frame_size > 0) params.frame_size = frame_size;
    if (hop > 0) params.hop = hop;
    const dirsep::ArrayGeometry geometry = resolve_geometry(mixture->clip, geometry_json);
    const dirsep::DoaSolver solver = dirsep::design_doa_solver(geometry);
    const std::vector<dirsep::ComplexGrid> grids = channel_grids(mixture->clip, params);
    const dirsep::DirectionField field =
        dirsep::direction_field(solver, grids, num_directions);
    *out = copy_string(csv ? dirsep::direction_field_to_csv(field)
                           : dirsep::direction_field_to_json(field));
  });
}

dirsep_status dirsep_direction_field_json(const dirsep_audio* mixture,
                                          const char* geometry_json, int num_directions,
                                          int frame_size, int hop, char** out_json) {
  return direction_field_impl(mixture, geometry_json, num_directions, frame_size, hop, false,
                              out_json);
}

dirsep_status dirsep_direction_field_csv(const dirsep_audio* mixture,
                                         const char* geometry_json, int num_directions,
                                         int frame_size, int hop, char** out_csv) {
  return direction_field_impl(mixture, geometry_json, num_directions, frame_size, hop, true,
                              out_csv);
}

void dirsep_separate_params_init(dirsep_separate_params* params) {
  if (params == nullptr) return;
  params->algorithm = "dntf";
  params->sources = 2;
  params->atoms = 20;
  params->directions = 24;
  params->iterations = 200;
  params->seed = 0;
  params->mask_mode = "conditioned";
  params->threads = 1;
  params->frame_size = 1024;
  params->hop = 256;
}

dirsep_status dirsep_separate(const dirsep_audio* mixture,
                              const dirsep_audio* const* training, int num_training,
                              const dirsep_separate_params* params, const char* geometry_json,
                              dirsep_separation** out) {
  return guarded([&] {
    require(mixture != nullptr && params != nullptr && out != nullptr, "null argument");
    require(params->algorithm != nullptr, "null algorithm name");
    const std::string algorithm = params->algorithm;
    require(algorithm == "dntf" || algorithm == "dnmf" || algorithm == "supervised",
            "algorithm must be dntf, dnmf, or supervised");
    require(params->sources >= 2, "separation needs at least two sources");
    require(params->iterations >= 1, "iteration count must be positive");
    const dirsep::MaskMode mode =
        dirsep::parse_mask_mode(params->mask_mode == nullptr ? "conditioned"
                                                             : params->mask_mode);
    dirsep::set_num_threads(params->threads);

    dirsep::StftParams stft_params;
    if (params->frame_size > 0) stft_params.frame_size = params->frame_size;
    if (params->hop > 0) stft_params.hop = params->hop;

    const std::vector<dirsep::ComplexGrid> grids =
        channel_grids(mixture->clip, stft_params);
    const dirsep::Spectrogram spect = dirsep::normalize_magnitude(grids[0]);
    const int bins = static_cast<int>(spect.p.rows());
    const int frames = static_cast<int>(spect.p.cols());

    dirsep::FitInfo info;
    info.seed = params->seed;
    info.iterations = params->iterations;
    info.mask_mode = mode;

    auto handle = std::make_unique<dirsep_separation>();
    dirsep::SeparationMask mask;
    if (algorithm == "supervised") {
      require(training != nullptr && num_training == params->sources,
              "supervised separation needs one training clip per source");
      std::vector<Eigen::MatrixXd> dicts;
      dicts.reserve(num_training);
      for (int s = 0; s < num_training; ++s) {
        require(training[s] != nullptr, "null training clip");
        const dirsep::AudioClip clip = dirsep::mono_channel(training[s]->clip, 0);
        if (clip.sample_rate != mixture->clip.sample_rate) {
          throw std::runtime_error("training sample rate differs from mixture");
        }
        const dirsep::Spectrogram train =
            dirsep::normalize_magnitude(dirsep::stft(clip, stft_params));
        dicts.push_back(dirsep::nmf_fit_dictionary(
            train.p, params->atoms, params->iterations,
            dirsep::derive_seed(params->seed, 400 + s)));
      }
      const dirsep::SupervisedFit fit = dirsep::supervised_nmf_fit(
          spect.p, dicts, params->iterations, dirsep::derive_seed(params->seed, 3));
      mask = fit.mask;
      handle->model_json = dirsep::supervised_model_to_json(fit.model, info);
    } else {
      const dirsep::ArrayGeometry geometry =
          resolve_geometry(mixture->clip, geometry_json);
      const dirsep::DoaSolver solver = dirsep::design_doa_solver(geometry);
      const dirsep::DirectionField field =
          dirsep::direction_field(solver, grids, params->directions);
      if (algorithm == "dntf") {
        dirsep::DntfModel model =
            dirsep::dntf_init(bins, frames, params->atoms, params->directions,
                              params->sources, params->seed);
        for (int i = 0; i < params->iterations; ++i) {
          model = dirsep::dntf_sparse_update(spect.p, field, model);
        }
        mask = dirsep::dntf_mask(model, field, mode);
        handle->model_json = dirsep::dntf_model_to_json(model, info);
        handle->directions_json =
            dirsep::direction_summary_to_json(dirsep::source_direction_summary(model.dir));
      } else {
        dirsep::DnmfModel model = dirsep::dnmf_init(bins, frames, params->directions,
                                                    params->sources, params->seed);
        for (int i = 0; i < params->iterations; ++i) {
          model = dirsep::dnmf_sparse_update(spect.p, field, model);
        }
        mask = dirsep::dnmf_mask(model, field, mode);
        handle->model_json = dirsep::dnmf_model_to_json(model, info);
        handle->directions_json =
            dirsep::direction_summary_to_json(dirsep::source_direction_summary(model.dir));
      }
    }

    const std::vector<std::vector<double>> estimates = dirsep::apply_mask(grids[0], mask);
    handle->sources.resize(estimates.size());
    for (std::size_t s = 0; s < estimates.size(); ++s) {
      handle->sources[s].clip.sample_rate = mixture->clip.sample_rate;
      handle->sources[s].clip.samples = {estimates[s]};
    }
    handle->mask_blob = dirsep::mask_to_blob(mask);
    *out = handle.release();
  });
}

int dirsep_separation_count(const dirsep_separation* sep) {
  return sep == nullptr ? 0 : static_cast<int>(sep->sources.size());
}

const dirsep_audio* dirsep_separation_source(const dirsep_separation* sep, int index) {
  if (sep == nullptr || index < 0 || index >= static_cast<int>(sep->sources.size())) {
    return nullptr;
  }
  return &sep->sources[index];
}

const char* dirsep_separation_model_json(const dirsep_separation* sep) {
  return sep == nullptr ? nullptr : sep->model_json.c_str();
}

const char* dirsep_separation_directions_json(const dirsep_separation* sep) {
  if (sep == nullptr || sep->directions_json.empty()) return nullptr;
  return sep->directions_json.c_str();
}

dirsep_status dirsep_separation_mask_blob(const dirsep_separation* sep,
                                          const uint8_t** out_data, size_t* out_size) {
  return guarded([&] {
    require(sep != nullptr && out_data != nullptr && out_size != nullptr, "null argument");
    *out_data = sep->mask_blob.data();
    *out_size = sep->mask_blob.size();
  });
}

void dirsep_separation_free(dirsep_separation* sep) { delete sep; }

dirsep_status dirsep_bss_eval_json(const dirsep_audio* const* references, int num_references,
                                   const dirsep_audio* const* estimates, int num_estimates,
                                   int filter_length, char** out_json) {
  return guarded([&] {
    require(references != nullptr && estimates != nullptr && out_json != nullptr,
            "null argument");
    require(num_references >= 1 && num_estimates >= 1, "need at least one signal");
    auto collect = [](const dirsep_audio* const* clips, int n) {
      std::vector<std::vector<double>> out;
      out.reserve(n);
      for (int i = 0; i < n; ++i) {
        require(clips[i] != nullptr, "null clip");
        require(clips[i]->clip.channels() == 1, "evaluation clips must be mono");
        out.push_back(clips[i]->clip.samples[0]);
      }
      return out;
    };
    const dirsep::BssEvalResult result = dirsep::bss_eval(
        collect(references, num_references), collect(estimates, num_estimates), filter_length);
    *out_json = copy_string(dirsep::bss_result_to_json(result));
  });
}

dirsep_status dirsep_run_experiment(const char* config_json, char** out_report_json,
                                    char** out_table_text) {
  return guarded([&] {
    require(config_json != nullptr, "null argument");
    const dirsep::ExperimentConfig config =
        dirsep::experiment_config_from_json(config_json);
    const dirsep::ExperimentReport report = dirsep::run_experiment(config);
    if (out_report_json != nullptr) {
      *out_report_json = copy_string(dirsep::report_to_json(report));
    }
    if (out_table_text != nullptr) {
      *out_table_text = copy_string(dirsep::report_to_table(report));
    }
  });
}

}  // extern "C"
