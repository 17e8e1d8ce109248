// tests/test_capi.cpp

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

// Exercises the shared library through the public C header only.

#include <dirsep/dirsep.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

namespace {

struct AudioDeleter {
  void operator()(dirsep_audio* a) const { dirsep_audio_free(a); }
};
using AudioPtr = std::unique_ptr<dirsep_audio, AudioDeleter>;

struct SceneDeleter {
  void operator()(dirsep_scene* s) const { dirsep_scene_free(s); }
};
using ScenePtr = std::unique_ptr<dirsep_scene, SceneDeleter>;

struct SeparationDeleter {
  void operator()(dirsep_separation* s) const { dirsep_separation_free(s); }
};
using SeparationPtr = std::unique_ptr<dirsep_separation, SeparationDeleter>;

struct StringDeleter {
  void operator()(char* s) const { dirsep_string_free(s); }
};
using StringPtr = std::unique_ptr<char, StringDeleter>;

AudioPtr make_tone(double freq, int samples, int rate, double amp) {
  std::vector<double> data(samples);
  for (int n = 0; n < samples; ++n) {
    data[n] = amp * std::sin(2.0 * 3.14159265358979323846 * freq * n / rate);
  }
  dirsep_audio* raw = nullptr;
  REQUIRE(dirsep_audio_create(data.data(), 1, samples, rate, &raw) == DIRSEP_OK);
  return AudioPtr(raw);
}

std::string temp_path(const std::string& name) {
  return std::string("/tmp/dirsep_capi_") + name;
}

}  // namespace

TEST_SUITE("capi") {
  TEST_CASE("version string is present") {
    const char* v = dirsep_version();
    REQUIRE(v != nullptr);
    CHECK(std::strlen(v) >= 5);
  }

  TEST_CASE("audio create, save, and load round trip") {
    std::vector<double> data(2 * 100);
    for (int c = 0; c < 2; ++c) {
      for (int n = 0; n < 100; ++n) data[c * 100 + n] = 0.01 * (n - 50) * (c + 1);
    }
    dirsep_audio* raw = nullptr;
    REQUIRE(dirsep_audio_create(data.data(), 2, 100, 16000, &raw) == DIRSEP_OK);
    AudioPtr audio(raw);
    CHECK(dirsep_audio_channels(audio.get()) == 2);
    CHECK(dirsep_audio_num_samples(audio.get()) == 100);
    CHECK(dirsep_audio_sample_rate(audio.get()) == 16000);
    const double* ch1 = dirsep_audio_samples(audio.get(), 1);
    REQUIRE(ch1 != nullptr);
    CHECK(ch1[60] == doctest::Approx(0.2));
    CHECK(dirsep_audio_samples(audio.get(), 2) == nullptr);

    const std::string path = temp_path("roundtrip.wav");
    REQUIRE(dirsep_audio_save(audio.get(), path.c_str(), DIRSEP_WAV_FLOAT32) == DIRSEP_OK);
    dirsep_audio* loaded_raw = nullptr;
    REQUIRE(dirsep_audio_load(path.c_str(), &loaded_raw) == DIRSEP_OK);
    AudioPtr loaded(loaded_raw);
    CHECK(dirsep_audio_channels(loaded.get()) == 2);
    CHECK(dirsep_audio_num_samples(loaded.get()) == 100);
    const double* back = dirsep_audio_samples(loaded.get(), 0);
    double max_err = 0.0;
    for (int n = 0; n < 100; ++n) {
      max_err = std::max(max_err, std::abs(back[n] - data[n]));
    }
    CHECK(max_err <= 1e-7);
    std::remove(path.c_str());
  }

  TEST_CASE("error paths set status codes and messages") {
    dirsep_audio* raw = nullptr;
    CHECK(dirsep_audio_load("/tmp/dirsep_capi_no_such_file.wav", &raw) == DIRSEP_ERR_IO);
    REQUIRE(dirsep_last_error() != nullptr);
    CHECK(std::strlen(dirsep_last_error()) > 0);

    const std::string garbage = temp_path("garbage.wav");
    std::FILE* fp = std::fopen(garbage.c_str(), "wb");
    REQUIRE(fp != nullptr);
    std::fputs("this is not a wav file at all href", fp);
    std::fclose(fp);
    CHECK(dirsep_audio_load(garbage.c_str(), &raw) == DIRSEP_ERR_FORMAT);
    std::remove(garbage.c_str());

    CHECK(dirsep_audio_create(nullptr, 1, 10, 8000, &raw) == DIRSEP_ERR_INVALID_ARG);
    std::vector<double> z(10, 0.0);
    CHECK(dirsep_audio_create(z.data(), 0, 10, 8000, &raw) == DIRSEP_ERR_INVALID_ARG);

    char* out_json = nullptr;
    CHECK(dirsep_run_experiment("{not json", &out_json, nullptr) == DIRSEP_ERR_FORMAT);
    CHECK(dirsep_run_experiment(R"({"algorithms":["nope"]})", &out_json, nullptr) ==
          DIRSEP_ERR_INVALID_ARG);
  }

  TEST_CASE("mix exposes the delay construction") {
    const AudioPtr s0 = make_tone(440.0, 800, 16000, 0.5);
    const AudioPtr s1 = make_tone(1170.0, 800, 16000, 0.5);
    const dirsep_audio* sources[2] = {s0.get(), s1.get()};
    dirsep_scene* raw = nullptr;
    REQUIRE(dirsep_mix(sources, 2, &raw) == DIRSEP_OK);
    ScenePtr scene(raw);
    CHECK(dirsep_scene_num_sources(scene.get()) == 2);
    const dirsep_audio* mixture = dirsep_scene_mixture(scene.get());
    REQUIRE(mixture != nullptr);
    CHECK(dirsep_audio_channels(mixture) == 3);
    CHECK(dirsep_audio_num_samples(mixture) == 800);

    const dirsep_audio* r0 = dirsep_scene_reference(scene.get(), 0);
    const dirsep_audio* r1 = dirsep_scene_reference(scene.get(), 1);
    REQUIRE(r0 != nullptr);
    REQUIRE(r1 != nullptr);
    CHECK(dirsep_scene_reference(scene.get(), 2) == nullptr);
    const double* mix0 = dirsep_audio_samples(mixture, 0);
    const double* a = dirsep_audio_samples(r0, 0);
    const double* b = dirsep_audio_samples(r1, 0);
    double max_err = 0.0;
    for (int n = 0; n < 800; ++n) {
      max_err = std::max(max_err, std::abs(mix0[n] - (a[n] + b[n])));
    }
    CHECK(max_err <= 1e-12);

    char* geo = nullptr;
    REQUIRE(dirsep_scene_geometry_json(scene.get(), &geo) == DIRSEP_OK);
    StringPtr geo_owner(geo);
    const nlohmann::json j = nlohmann::json::parse(geo);
    REQUIRE(j["positions"].size() == 3);
    CHECK(j["speed_of_sound"].get<double>() == doctest::Approx(340.29));

    // Mismatched sample rates are an invalid-argument failure.
    const AudioPtr other = make_tone(300.0, 800, 8000, 0.5);
    const dirsep_audio* bad[2] = {s0.get(), other.get()};
    dirsep_scene* bad_raw = nullptr;
    CHECK(dirsep_mix(bad, 2, &bad_raw) == DIRSEP_ERR_INVALID_ARG);
  }

  TEST_CASE("direction field json has the advertised shape") {
    const AudioPtr s0 = make_tone(500.0, 4000, 16000, 0.5);
    const AudioPtr s1 = make_tone(2500.0, 4000, 16000, 0.5);
    const dirsep_audio* sources[2] = {s0.get(), s1.get()};
    dirsep_scene* raw = nullptr;
    REQUIRE(dirsep_mix(sources, 2, &raw) == DIRSEP_OK);
    ScenePtr scene(raw);
    char* out = nullptr;
    REQUIRE(dirsep_direction_field_json(dirsep_scene_mixture(scene.get()), nullptr, 24, 512,
                                        128, &out) == DIRSEP_OK);
    StringPtr owner(out);
    const nlohmann::json j = nlohmann::json::parse(out);
    CHECK(j["num_directions"] == 24);
    CHECK(j["bins"] == 257);
    REQUIRE(j["d"].size() == 257);
    CHECK(j["d"][0].size() == j["frames"].get<std::size_t>());

    char* csv = nullptr;
    REQUIRE(dirsep_direction_field_csv(dirsep_scene_mixture(scene.get()), nullptr, 24, 512,
                                       128, &csv) == DIRSEP_OK);
    StringPtr csv_owner(csv);
    CHECK(std::strchr(csv, ',') != nullptr);
  }

  TEST_CASE("separate produces sources, model json, directions, and a mask") {
    const AudioPtr s0 = make_tone(400.0, 6000, 16000, 0.6);
    const AudioPtr s1 = make_tone(3000.0, 6000, 16000, 0.6);
    const dirsep_audio* sources[2] = {s0.get(), s1.get()};
    dirsep_scene* scene_raw = nullptr;
    REQUIRE(dirsep_mix(sources, 2, &scene_raw) == DIRSEP_OK);
    ScenePtr scene(scene_raw);

    dirsep_separate_params params;
    dirsep_separate_params_init(&params);
    CHECK(std::string(params.algorithm) == "dntf");
    CHECK(params.sources == 2);
    CHECK(params.atoms == 20);
    CHECK(params.directions == 24);
    CHECK(params.iterations == 200);
    params.atoms = 4;
    params.iterations = 10;
    params.frame_size = 512;
    params.hop = 128;
    params.seed = 11;

    dirsep_separation* sep_raw = nullptr;
    REQUIRE(dirsep_separate(dirsep_scene_mixture(scene.get()), nullptr, 0, &params, nullptr,
                            &sep_raw) == DIRSEP_OK);
    SeparationPtr sep(sep_raw);
    REQUIRE(dirsep_separation_count(sep.get()) == 2);
    const dirsep_audio* est = dirsep_separation_source(sep.get(), 0);
    REQUIRE(est != nullptr);
    CHECK(dirsep_audio_num_samples(est) == 6000);

    const char* model_json = dirsep_separation_model_json(sep.get());
    REQUIRE(model_json != nullptr);
    const nlohmann::json model = nlohmann::json::parse(model_json);
    CHECK(model["format"] == "dirsep-model");
    CHECK(model["type"] == "dntf");
    CHECK(model["fit"]["iterations"] == 10);

    const char* dirs_json = dirsep_separation_directions_json(sep.get());
    REQUIRE(dirs_json != nullptr);
    CHECK(nlohmann::json::parse(dirs_json)["sources"].size() == 2);

    const uint8_t* blob = nullptr;
    size_t blob_size = 0;
    REQUIRE(dirsep_separation_mask_blob(sep.get(), &blob, &blob_size) == DIRSEP_OK);
    REQUIRE(blob_size > 12);
    CHECK(std::memcmp(blob, "DIRSEPMK", 8) == 0);

    // Same seed, same inputs: byte-identical model JSON.
    dirsep_separation* again_raw = nullptr;
    REQUIRE(dirsep_separate(dirsep_scene_mixture(scene.get()), nullptr, 0, &params, nullptr,
                            &again_raw) == DIRSEP_OK);
    SeparationPtr again(again_raw);
    CHECK(std::string(model_json) == dirsep_separation_model_json(again.get()));
  }

  TEST_CASE("supervised separation needs matching training clips") {
    const AudioPtr s0 = make_tone(400.0, 4000, 16000, 0.6);
    const AudioPtr s1 = make_tone(3000.0, 4000, 16000, 0.6);
    const dirsep_audio* sources[2] = {s0.get(), s1.get()};
    dirsep_scene* scene_raw = nullptr;
    REQUIRE(dirsep_mix(sources, 2, &scene_raw) == DIRSEP_OK);
    ScenePtr scene(scene_raw);

    dirsep_separate_params params;
    dirsep_separate_params_init(&params);
    params.algorithm = "supervised";
    params.atoms = 3;
    params.iterations = 8;
    params.frame_size = 512;
    params.hop = 128;

    dirsep_separation* sep_raw = nullptr;
    CHECK(dirsep_separate(dirsep_scene_mixture(scene.get()), nullptr, 0, &params, nullptr,
                          &sep_raw) == DIRSEP_ERR_INVALID_ARG);

    const dirsep_audio* training[2] = {s0.get(), s1.get()};
    REQUIRE(dirsep_separate(dirsep_scene_mixture(scene.get()), training, 2, &params, nullptr,
                            &sep_raw) == DIRSEP_OK);
    SeparationPtr sep(sep_raw);
    CHECK(dirsep_separation_count(sep.get()) == 2);
    CHECK(nlohmann::json::parse(dirsep_separation_model_json(sep.get()))["type"] ==
          "supervised");
    CHECK(dirsep_separation_directions_json(sep.get()) == nullptr);
  }

  TEST_CASE("bss eval json scores a simple pair") {
    const AudioPtr s0 = make_tone(500.0, 4000, 16000, 0.7);
    const AudioPtr s1 = make_tone(1900.0, 4000, 16000, 0.7);
    const dirsep_audio* refs[2] = {s0.get(), s1.get()};
    const dirsep_audio* ests[2] = {s1.get(), s0.get()};  // swapped on purpose
    char* out = nullptr;
    REQUIRE(dirsep_bss_eval_json(refs, 2, ests, 2, 32, &out) == DIRSEP_OK);
    StringPtr owner(out);
    const nlohmann::json j = nlohmann::json::parse(out);
    CHECK(j["filter_length"] == 32);
    REQUIRE(j["permutation"].size() == 2);
    CHECK(j["permutation"][0] == 1);  // estimate 0 is reference 1
    CHECK(j["permutation"][1] == 0);
    CHECK(j["per_source"].size() == 2);
    CHECK(j["mean"]["sdr"].get<double>() >= 150.0);
    CHECK(j["min"]["sdr"].get<double>() >= 150.0);
  }

  TEST_CASE("experiment runs from a tiny synthetic config") {
    const char* config = R"({
      "seed": 1, "iters": 6, "Z": 4, "filter_length": 64,
      "algorithms": ["irm", "ibm"], "synthetic": {"seconds": 1.0}
    })";
    char* report_json = nullptr;
    char* table = nullptr;
    REQUIRE(dirsep_run_experiment(config, &report_json, &table) == DIRSEP_OK);
    StringPtr report_owner(report_json);
    StringPtr table_owner(table);
    const nlohmann::json j = nlohmann::json::parse(report_json);
    REQUIRE(j.contains("ibm"));
    REQUIRE(j.contains("irm"));
    for (const char* key :
         {"sdr_mean", "sdr_min", "sir_mean", "sir_min", "sar_mean", "sar_min",
          "seconds_per_iteration"}) {
      CHECK(j["ibm"].contains(key));
    }
    CHECK(j["ibm"]["sdr_mean"].get<double>() > 0.0);
    CHECK(std::string(table).find("ibm") != std::string::npos);
  }
}
