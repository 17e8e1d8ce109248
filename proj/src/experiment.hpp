// src/experiment.hpp

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

#ifndef DIRSEP_EXPERIMENT_HPP
#define DIRSEP_EXPERIMENT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mask.hpp"
#include "mixture.hpp"
#include "stft.hpp"

namespace dirsep {

// One separation benchmark run: synthesize (or load) a scene, separate
// it with each requested algorithm, score against the references.
struct ExperimentConfig {
  std::vector<std::string> source_paths;    // empty -> synthetic sources
  std::vector<std::string> training_paths;  // per source, for "supervised"
  std::uint64_t seed = 0;
  int sources = 2;
  int atoms = 20;
  int directions = 24;
  int iterations = 200;
  StftParams stft;
  std::vector<std::string> algorithms = {"dntf", "dnmf", "supervised", "irm", "ibm"};
  int filter_length = 512;
  MaskMode mask_mode = MaskMode::kConditioned;
  int threads = 1;
  double synth_seconds = 3.0;  // synthetic sources only
  int synth_sample_rate = 16000;
};

ExperimentConfig experiment_config_from_json(const std::string& json_text);

struct AlgorithmReport {
  std::string algorithm;
  double sdr_mean = 0.0, sdr_min = 0.0;
  double sir_mean = 0.0, sir_min = 0.0;
  double sar_mean = 0.0, sar_min = 0.0;
  double seconds_per_iteration = 0.0;  // oracle rows: total mask time
};

struct ExperimentReport {
  std::vector<AlgorithmReport> rows;  // config order
};

// Algorithms: "dntf", "dnmf", "supervised" (needs training material;
// synthetic runs train on a second utterance of each synthetic speaker),
// "irm", "ibm" (oracles from the reference images at channel 0).
ExperimentReport run_experiment(const ExperimentConfig& config);

std::string report_to_json(const ExperimentReport& report);
std::string report_to_table(const ExperimentReport& report);

// Scene as the experiment builds it (exposed for tooling): loads WAVs or
// synthesizes speech-like sources from the seed.
MixtureScene experiment_scene(const ExperimentConfig& config);

}  // namespace dirsep

#endif  // DIRSEP_EXPERIMENT_HPP
