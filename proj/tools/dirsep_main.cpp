// tools/dirsep_main.cpp

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

// Command-line front end. Talks to the library exclusively through the
// public C interface; JSON handling here is plumbing for config files
// and report output.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dirsep/dirsep.h"
#include "json.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct CliError {
  int code;
  std::string message;
};

[[noreturn]] void fail(int code, const std::string& message) {
  throw CliError{code, message};
}

void check(dirsep_status status, const std::string& context) {
  if (status != DIRSEP_OK) {
    fail(kExitRuntime, context + ": " + dirsep_last_error());
  }
}

using AudioPtr = std::unique_ptr<dirsep_audio, decltype(&dirsep_audio_free)>;

AudioPtr load_audio(const std::string& path) {
  dirsep_audio* raw = nullptr;
  check(dirsep_audio_load(path.c_str(), &raw), "loading " + path);
  return AudioPtr(raw, &dirsep_audio_free);
}

void save_audio(const dirsep_audio* audio, const std::string& path) {
  check(dirsep_audio_save(audio, path.c_str(), DIRSEP_WAV_FLOAT32), "writing " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(kExitRuntime, "cannot open: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(kExitRuntime, "cannot open for writing: " + path);
  out << text;
  if (!out) fail(kExitRuntime, "write failed: " + path);
}

void write_binary_file(const std::string& path, const std::uint8_t* data, std::size_t size) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(kExitRuntime, "cannot open for writing: " + path);
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(size));
  if (!out) fail(kExitRuntime, "write failed: " + path);
}

std::string take_string(char* owned) {
  std::string s(owned == nullptr ? "" : owned);
  dirsep_string_free(owned);
  return s;
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  json j = json::parse(read_text_file(path), nullptr, false);
  if (j.is_discarded()) fail(kExitRuntime, "config is not valid JSON: " + path);
  if (!j.is_object()) fail(kExitRuntime, "config must be a JSON object: " + path);
  return j;
}

// Flag > config > default: a config value only lands where the user
// did not pass the flag explicitly.
template <typename T>
void merge_option(const CLI::Option* opt, const json& config, const char* key, T* value) {
  if (opt != nullptr && opt->count() > 0) return;
  if (config.contains(key)) *value = config[key].get<T>();
}

std::vector<std::string> split_commas(const std::string& list) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream stream(list);
  while (std::getline(stream, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Shared tuning flags; each field carries its CLI11 option so config
// merging can tell explicit flags from defaults.
struct CommonParams {
  int frame_size = 1024;
  int hop = 256;
  int sources = 2;
  int atoms = 20;
  int directions = 24;
  int iterations = 200;
  std::uint64_t seed = 0;
  std::string mask_mode = "conditioned";
  int threads = 1;
  int filter_length = 512;
  std::string config_path;

  CLI::Option* frame_size_opt = nullptr;
  CLI::Option* hop_opt = nullptr;
  CLI::Option* sources_opt = nullptr;
  CLI::Option* atoms_opt = nullptr;
  CLI::Option* directions_opt = nullptr;
  CLI::Option* iterations_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* mask_mode_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
  CLI::Option* filter_length_opt = nullptr;

  void add_stft_flags(CLI::App* app) {
    frame_size_opt = app->add_option("--frame-size", frame_size, "STFT frame size");
    hop_opt = app->add_option("--hop", hop, "STFT hop size");
  }
  void add_model_flags(CLI::App* app) {
    sources_opt = app->add_option("--S", sources, "number of sources");
    atoms_opt = app->add_option("--Z", atoms, "dictionary atoms per source");
    directions_opt = app->add_option("--D", directions, "direction bins");
    iterations_opt = app->add_option("--iters", iterations, "update iterations");
    seed_opt = app->add_option("--seed", seed, "random seed");
    mask_mode_opt = app->add_option("--mask-mode", mask_mode, "conditioned or marginal")
                        ->check(CLI::IsMember({"conditioned", "marginal"}));
    threads_opt = app->add_option("--threads", threads, "worker threads (1 = sequential)");
  }
  void add_config_flag(CLI::App* app) {
    app->add_option("--config", config_path, "JSON config merged under explicit flags");
  }

  void merge(const json& config) {
    merge_option(frame_size_opt, config, "frame_size", &frame_size);
    merge_option(hop_opt, config, "hop", &hop);
    merge_option(sources_opt, config, "S", &sources);
    merge_option(atoms_opt, config, "Z", &atoms);
    merge_option(directions_opt, config, "D", &directions);
    merge_option(iterations_opt, config, "iters", &iterations);
    merge_option(seed_opt, config, "seed", &seed);
    merge_option(mask_mode_opt, config, "mask_mode", &mask_mode);
    merge_option(threads_opt, config, "threads", &threads);
    merge_option(filter_length_opt, config, "filter_length", &filter_length);
  }
};

int cmd_mix(const std::vector<std::string>& inputs, const std::string& out_dir) {
  std::vector<AudioPtr> clips;
  std::vector<const dirsep_audio*> raw;
  for (const std::string& path : inputs) {
    clips.push_back(load_audio(path));
    raw.push_back(clips.back().get());
  }
  dirsep_scene* scene_raw = nullptr;
  check(dirsep_mix(raw.data(), static_cast<int>(raw.size()), &scene_raw), "mixing");
  std::unique_ptr<dirsep_scene, decltype(&dirsep_scene_free)> scene(scene_raw,
                                                                    &dirsep_scene_free);

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  save_audio(dirsep_scene_mixture(scene.get()), (dir / "mixture.wav").string());
  for (int s = 0; s < dirsep_scene_num_sources(scene.get()); ++s) {
    save_audio(dirsep_scene_reference(scene.get(), s),
               (dir / ("ref_" + std::to_string(s) + ".wav")).string());
  }
  char* geometry = nullptr;
  check(dirsep_scene_geometry_json(scene.get(), &geometry), "exporting geometry");
  write_text_file((dir / "geometry.json").string(), take_string(geometry) + "\n");
  std::cout << "wrote scene to " << out_dir << "\n";
  return kExitOk;
}

int cmd_doa(const std::string& mixture_path, const std::string& geometry_path,
            const CommonParams& params, bool csv, const std::string& out_path) {
  const AudioPtr mixture = load_audio(mixture_path);
  std::string geometry_json;
  if (!geometry_path.empty()) geometry_json = read_text_file(geometry_path);
  char* text = nullptr;
  const auto fn = csv ? &dirsep_direction_field_csv : &dirsep_direction_field_json;
  check(fn(mixture.get(), geometry_path.empty() ? nullptr : geometry_json.c_str(),
           params.directions, params.frame_size, params.hop, &text),
        "estimating directions");
  const std::string out = take_string(text);
  if (out_path.empty()) {
    std::cout << out;
    if (!out.empty() && out.back() != '\n') std::cout << "\n";
  } else {
    write_text_file(out_path, out);
  }
  return kExitOk;
}

int cmd_separate(const std::string& mixture_path, const std::string& algorithm,
                 const std::vector<std::string>& training_paths,
                 const std::string& geometry_path, const CommonParams& params,
                 const std::string& out_dir) {
  if (algorithm == "supervised" && training_paths.empty()) {
    fail(kExitUsage, "--algo supervised requires --train clips (one per source)");
  }
  const AudioPtr mixture = load_audio(mixture_path);
  std::vector<AudioPtr> training;
  std::vector<const dirsep_audio*> training_raw;
  for (const std::string& path : training_paths) {
    training.push_back(load_audio(path));
    training_raw.push_back(training.back().get());
  }
  std::string geometry_json;
  if (!geometry_path.empty()) geometry_json = read_text_file(geometry_path);

  dirsep_separate_params sep_params;
  dirsep_separate_params_init(&sep_params);
  sep_params.algorithm = algorithm.c_str();
  sep_params.sources = params.sources;
  sep_params.atoms = params.atoms;
  sep_params.directions = params.directions;
  sep_params.iterations = params.iterations;
  sep_params.seed = params.seed;
  sep_params.mask_mode = params.mask_mode.c_str();
  sep_params.threads = params.threads;
  sep_params.frame_size = params.frame_size;
  sep_params.hop = params.hop;

  dirsep_separation* sep_raw = nullptr;
  check(dirsep_separate(mixture.get(), training_raw.empty() ? nullptr : training_raw.data(),
                        static_cast<int>(training_raw.size()), &sep_params,
                        geometry_path.empty() ? nullptr : geometry_json.c_str(), &sep_raw),
        "separating");
  std::unique_ptr<dirsep_separation, decltype(&dirsep_separation_free)> sep(
      sep_raw, &dirsep_separation_free);

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  for (int s = 0; s < dirsep_separation_count(sep.get()); ++s) {
    save_audio(dirsep_separation_source(sep.get(), s),
               (dir / ("source_" + std::to_string(s) + ".wav")).string());
  }
  write_text_file((dir / "model.json").string(),
                  std::string(dirsep_separation_model_json(sep.get())) + "\n");
  const char* directions = dirsep_separation_directions_json(sep.get());
  if (directions != nullptr) {
    write_text_file((dir / "directions.json").string(), std::string(directions) + "\n");
  }
  const std::uint8_t* blob = nullptr;
  std::size_t blob_size = 0;
  check(dirsep_separation_mask_blob(sep.get(), &blob, &blob_size), "exporting mask");
  write_binary_file((dir / "mask.bin").string(), blob, blob_size);
  std::cout << "wrote " << dirsep_separation_count(sep.get()) << " sources to " << out_dir
            << "\n";
  return kExitOk;
}

int cmd_eval(const std::vector<std::string>& ref_paths,
             const std::vector<std::string>& est_paths, const CommonParams& params,
             const std::string& out_path) {
  std::vector<AudioPtr> refs, ests;
  std::vector<const dirsep_audio*> refs_raw, ests_raw;
  for (const std::string& path : ref_paths) {
    refs.push_back(load_audio(path));
    refs_raw.push_back(refs.back().get());
  }
  for (const std::string& path : est_paths) {
    ests.push_back(load_audio(path));
    ests_raw.push_back(ests.back().get());
  }
  char* text = nullptr;
  check(dirsep_bss_eval_json(refs_raw.data(), static_cast<int>(refs_raw.size()),
                             ests_raw.data(), static_cast<int>(ests_raw.size()),
                             params.filter_length, &text),
        "evaluating");
  const std::string out = take_string(text);
  if (out_path.empty()) {
    std::cout << out << "\n";
  } else {
    write_text_file(out_path, out + "\n");
  }
  return kExitOk;
}

int cmd_experiment(const json& config, const std::string& out_path) {
  char* report = nullptr;
  char* table = nullptr;
  check(dirsep_run_experiment(config.dump().c_str(), &report, &table), "running experiment");
  std::cout << take_string(table);
  const std::string report_text = take_string(report);
  if (!out_path.empty()) {
    write_text_file(out_path, report_text + "\n");
  } else {
    std::cout << report_text << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dirsep: directional source separation toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(dirsep_version()));

  // mix
  CLI::App* mix = app.add_subcommand("mix", "build the delayed test scene from mono WAVs");
  std::vector<std::string> mix_inputs;
  std::string mix_out;
  mix->add_option("sources", mix_inputs, "mono source WAVs (2-4)")
      ->required()
      ->expected(2, 4);
  mix->add_option("-o,--out", mix_out, "output directory")->required();

  // doa
  CLI::App* doa = app.add_subcommand("doa", "per-bin direction-of-arrival field");
  std::string doa_mixture, doa_geometry, doa_out;
  bool doa_csv = false;
  CommonParams doa_params;
  doa->add_option("mixture", doa_mixture, "multichannel mixture WAV")->required();
  doa->add_option("--geometry", doa_geometry, "microphone geometry JSON file");
  doa_params.directions_opt = doa->add_option("--D", doa_params.directions, "direction bins");
  doa_params.add_stft_flags(doa);
  doa_params.add_config_flag(doa);
  doa->add_flag("--csv", doa_csv, "emit CSV instead of JSON");
  doa->add_option("-o,--out", doa_out, "output file (default stdout)");

  // separate
  CLI::App* separate = app.add_subcommand("separate", "estimate and extract sources");
  std::string sep_mixture, sep_algo = "dntf", sep_geometry, sep_out;
  std::vector<std::string> sep_training;
  CommonParams sep_params;
  separate->add_option("mixture", sep_mixture, "multichannel mixture WAV")->required();
  separate->add_option("--algo", sep_algo, "dntf, dnmf, or supervised")
      ->check(CLI::IsMember({"dntf", "dnmf", "supervised"}));
  separate->add_option("--train", sep_training, "training WAV per source (supervised)");
  separate->add_option("--geometry", sep_geometry, "microphone geometry JSON file");
  sep_params.add_model_flags(separate);
  sep_params.add_stft_flags(separate);
  sep_params.add_config_flag(separate);
  separate->add_option("-o,--out", sep_out, "output directory")->required();

  // eval
  CLI::App* eval = app.add_subcommand("eval", "score estimates against references");
  std::vector<std::string> eval_refs, eval_ests;
  std::string eval_out;
  CommonParams eval_params;
  eval->add_option("--ref", eval_refs, "reference WAV (repeat per source)")->required();
  eval->add_option("--est", eval_ests, "estimate WAV (repeat per source)")->required();
  eval_params.filter_length_opt =
      eval->add_option("--filter-length", eval_params.filter_length, "distortion filter taps");
  eval_params.add_config_flag(eval);
  eval->add_option("-o,--out", eval_out, "output file (default stdout)");

  // experiment
  CLI::App* experiment = app.add_subcommand("experiment", "run the benchmark table");
  std::string exp_algorithms, exp_out;
  CommonParams exp_params;
  exp_params.add_model_flags(experiment);
  exp_params.add_stft_flags(experiment);
  exp_params.add_config_flag(experiment);
  exp_params.filter_length_opt = experiment->add_option(
      "--filter-length", exp_params.filter_length, "distortion filter taps");
  CLI::Option* exp_algorithms_opt = experiment->add_option(
      "--algorithms", exp_algorithms, "comma-separated subset of dntf,dnmf,supervised,irm,ibm");
  experiment->add_option("-o,--out", exp_out, "report JSON file (default stdout)");

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      app.exit(e);
      return kExitUsage;
    }

    if (mix->parsed()) return cmd_mix(mix_inputs, mix_out);
    if (doa->parsed()) {
      doa_params.merge(load_config(doa_params.config_path));
      return cmd_doa(doa_mixture, doa_geometry, doa_params, doa_csv, doa_out);
    }
    if (separate->parsed()) {
      const json config = load_config(sep_params.config_path);
      sep_params.merge(config);
      if (sep_algo == "dntf" && config.contains("algo") && separate->count("--algo") == 0) {
        sep_algo = config["algo"].get<std::string>();
      }
      return cmd_separate(sep_mixture, sep_algo, sep_training, sep_geometry, sep_params,
                          sep_out);
    }
    if (eval->parsed()) {
      eval_params.merge(load_config(eval_params.config_path));
      return cmd_eval(eval_refs, eval_ests, eval_params, eval_out);
    }
    if (experiment->parsed()) {
      json config = load_config(exp_params.config_path);
      exp_params.merge(config);
      config["frame_size"] = exp_params.frame_size;
      config["hop"] = exp_params.hop;
      config["S"] = exp_params.sources;
      config["Z"] = exp_params.atoms;
      config["D"] = exp_params.directions;
      config["iters"] = exp_params.iterations;
      config["seed"] = exp_params.seed;
      config["mask_mode"] = exp_params.mask_mode;
      config["threads"] = exp_params.threads;
      config["filter_length"] = exp_params.filter_length;
      if (exp_algorithms_opt->count() > 0) {
        config["algorithms"] = split_commas(exp_algorithms);
      }
      return cmd_experiment(config, exp_out);
    }
    return kExitUsage;
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
