// tests/test_harness.cpp

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

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "experiment.hpp"
#include "json.hpp"
#include "mixture.hpp"
#include "rng.hpp"
#include "stft.hpp"

namespace {

dirsep::AudioClip mono_from(std::vector<double> samples, int rate) {
  dirsep::AudioClip clip;
  clip.sample_rate = rate;
  clip.samples.push_back(std::move(samples));
  return clip;
}

std::vector<double> random_samples(int n, std::uint64_t seed) {
  dirsep::RandomStream rng(seed);
  std::vector<double> x(n);
  for (double& v : x) v = rng.uniform(-0.5, 0.5);
  return x;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("scene channels follow the delay construction") {
    const int rate = 16000;
    const std::vector<double> s0 = random_samples(400, 1);
    const std::vector<double> s1 = random_samples(400, 2);
    const dirsep::MixtureScene scene =
        dirsep::synthesize_mixture({mono_from(s0, rate), mono_from(s1, rate)});
    REQUIRE(scene.mixture.channels() == 3);
    REQUIRE(scene.references.size() == 2);
    const double g = scene.gain;
    CHECK(g > 0.0);
    for (int n = 0; n < 400; ++n) {
      // channel 0: all sources; channel i: source i delayed one sample.
      CHECK(scene.mixture.samples[0][n] == doctest::Approx(g * (s0[n] + s1[n])).epsilon(1e-12));
      const double d0 = n == 0 ? 0.0 : s0[n - 1];
      const double d1 = n == 0 ? 0.0 : s1[n - 1];
      CHECK(scene.mixture.samples[1][n] == doctest::Approx(g * (d0 + s1[n])).epsilon(1e-12));
      CHECK(scene.mixture.samples[2][n] == doctest::Approx(g * (s0[n] + d1)).epsilon(1e-12));
      CHECK(scene.references[0][n] == doctest::Approx(g * s0[n]).epsilon(1e-12));
      CHECK(scene.references[1][n] == doctest::Approx(g * s1[n]).epsilon(1e-12));
    }
    const double peak = std::abs(
        *std::max_element(scene.mixture.samples[0].begin(), scene.mixture.samples[0].end(),
                          [](double a, double b) { return std::abs(a) < std::abs(b); }));
    CHECK(peak <= 0.9 + 1e-12);
  }

  TEST_CASE("scene geometry spaces microphones one sample of travel apart") {
    const dirsep::ArrayGeometry g = dirsep::delay_scene_geometry(2, 16000);
    REQUIRE(g.mics() == 3);
    const double delta = 340.29 / 16000.0;
    CHECK(delta == doctest::Approx(0.0212681).epsilon(1e-5));
    CHECK(g.positions(0, 0) == 0.0);
    CHECK(g.positions(0, 1) == 0.0);
    CHECK(g.positions(1, 0) == doctest::Approx(delta));
    CHECK(g.positions(1, 1) == doctest::Approx(0.0));
    CHECK(g.positions(2, 0) == doctest::Approx(0.0));
    CHECK(g.positions(2, 1) == doctest::Approx(delta));
    CHECK_THROWS_AS(dirsep::delay_scene_geometry(5, 16000), std::invalid_argument);
  }

  TEST_CASE("mixing rejects bad inputs and trims to the shortest clip") {
    const int rate = 16000;
    CHECK_THROWS_AS(dirsep::synthesize_mixture({mono_from(random_samples(100, 3), rate)}),
                    std::invalid_argument);
    CHECK_THROWS_AS(dirsep::synthesize_mixture({mono_from(random_samples(100, 3), rate),
                                                mono_from(random_samples(100, 4), 8000)}),
                    std::invalid_argument);
    const dirsep::MixtureScene scene =
        dirsep::synthesize_mixture({mono_from(random_samples(300, 5), rate),
                                    mono_from(random_samples(200, 6), rate)});
    CHECK(scene.mixture.num_samples() == 200);
    CHECK(scene.references[0].size() == 200);
  }

  TEST_CASE("two-source scene puts bin directions on the expected arcs") {
    const int rate = 16000;
    const dirsep::StftParams params;
    const std::vector<double> s0 =
        dirsep::synthesize_speech_like(1.5, rate, 10, 11, params);
    const std::vector<double> s1 =
        dirsep::synthesize_speech_like(1.5, rate, 20, 21, params);
    const dirsep::MixtureScene scene =
        dirsep::synthesize_mixture({mono_from(s0, rate), mono_from(s1, rate)});

    std::vector<dirsep::ComplexGrid> grids;
    for (int c = 0; c < scene.mixture.channels(); ++c) {
      grids.push_back(dirsep::stft(dirsep::mono_channel(scene.mixture, c), params));
    }
    const dirsep::DoaSolver solver = dirsep::design_doa_solver(scene.geometry);
    const dirsep::DirectionField field = dirsep::direction_field(solver, grids, 24);

    // Count direction bins over cells where one source clearly dominates.
    const dirsep::ComplexGrid g0 = dirsep::stft(mono_from(s0, rate), params);
    const dirsep::ComplexGrid g1 = dirsep::stft(mono_from(s1, rate), params);
    std::map<int, int> votes0, votes1;
    int strong0 = 0, strong1 = 0;
    for (int t = 0; t < field.d.cols(); ++t) {
      for (int f = 1; f < field.d.rows() - 1; ++f) {
        const double m0 = std::abs(g0.values(f, t));
        const double m1 = std::abs(g1.values(f, t));
        if (m0 > 20.0 * m1 && m0 > 1e-3) {
          ++votes0[field.d(f, t)];
          ++strong0;
        } else if (m1 > 20.0 * m0 && m1 > 1e-3) {
          ++votes1[field.d(f, t)];
          ++strong1;
        }
      }
    }
    REQUIRE(strong0 > 50);
    REQUIRE(strong1 > 50);
    auto top_bin = [](const std::map<int, int>& votes) {
      int best = -1, count = -1;
      for (const auto& [bin, n] : votes) {
        if (n > count) {
          best = bin;
          count = n;
        }
      }
      return best;
    };
    // Source 1 arrives delayed at mic 1 (the +x mic): wave from +x,
    // azimuth pi -> bin 12 of 24. Source 2 likewise -> bin 18.
    const int b0 = top_bin(votes0);
    const int b1 = top_bin(votes1);
    CHECK(std::abs(b0 - 12) <= 1);
    CHECK(std::abs(b1 - 18) <= 1);
  }

  TEST_CASE("speech-like generator is deterministic and well scaled") {
    const std::vector<double> a = dirsep::synthesize_speech_like(1.0, 16000, 1, 2);
    const std::vector<double> b = dirsep::synthesize_speech_like(1.0, 16000, 1, 2);
    const std::vector<double> c = dirsep::synthesize_speech_like(1.0, 16000, 1, 3);
    CHECK(a.size() == 16000);
    CHECK(a == b);
    CHECK(a != c);
    double peak = 0.0;
    for (double v : a) peak = std::max(peak, std::abs(v));
    CHECK(peak == doctest::Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("band chords stay inside their band") {
    const dirsep::StftParams params;
    const std::vector<double> low = dirsep::synthesize_band_chord(1.0, 16000, 0, 2, 7, params);
    const dirsep::ComplexGrid grid = dirsep::stft(mono_from(low, 16000), params);
    const int bins = grid.bins();
    // Band 0 of 2 occupies the lower half of the usable range.
    double in_band = 0.0, out_band = 0.0;
    for (int t = 1; t + 1 < grid.frames(); ++t) {
      for (int f = 0; f < bins; ++f) {
        const double e = std::norm(grid.values(f, t));
        if (f <= bins / 2 + 8) {
          in_band += e;
        } else {
          out_band += e;
        }
      }
    }
    CHECK(out_band <= 1e-5 * in_band);
  }

  TEST_CASE("experiment config parses fields and rejects unknown algorithms") {
    const std::string text = R"({
      "seed": 7, "S": 3, "Z": 8, "D": 16, "iters": 25,
      "frame_size": 512, "hop": 128, "filter_length": 64,
      "algorithms": ["dntf", "ibm"], "mask_mode": "marginal",
      "threads": 2, "synthetic": {"seconds": 0.8, "sample_rate": 8000}
    })";
    const dirsep::ExperimentConfig config = dirsep::experiment_config_from_json(text);
    CHECK(config.seed == 7);
    CHECK(config.sources == 3);
    CHECK(config.atoms == 8);
    CHECK(config.directions == 16);
    CHECK(config.iterations == 25);
    CHECK(config.stft.frame_size == 512);
    CHECK(config.stft.hop == 128);
    CHECK(config.filter_length == 64);
    CHECK(config.algorithms == std::vector<std::string>{"dntf", "ibm"});
    CHECK(config.mask_mode == dirsep::MaskMode::kMarginal);
    CHECK(config.threads == 2);
    CHECK(config.synth_seconds == doctest::Approx(0.8));
    CHECK(config.synth_sample_rate == 8000);
    CHECK_THROWS_AS(
        dirsep::experiment_config_from_json(R"({"algorithms": ["psychic"]})"),
        std::invalid_argument);
  }

  TEST_CASE("oracle-only experiment reports sane scores with ibm sir above irm") {
    dirsep::ExperimentConfig config;
    config.seed = 3;
    config.algorithms = {"irm", "ibm"};
    config.synth_seconds = 1.5;
    config.filter_length = 128;
    const dirsep::ExperimentReport report = dirsep::run_experiment(config);
    REQUIRE(report.rows.size() == 2);
    CHECK(report.rows[0].algorithm == "irm");
    CHECK(report.rows[1].algorithm == "ibm");
    for (const dirsep::AlgorithmReport& row : report.rows) {
      CHECK(row.sdr_mean > 0.0);
      CHECK(row.sdr_min <= row.sdr_mean);
      CHECK(row.sir_min <= row.sir_mean);
      CHECK(row.seconds_per_iteration >= 0.0);
    }
    CHECK(report.rows[1].sir_mean >= report.rows[0].sir_mean);
  }

  TEST_CASE("experiment scores are deterministic for a fixed seed") {
    dirsep::ExperimentConfig config;
    config.seed = 5;
    config.algorithms = {"dntf"};
    config.synth_seconds = 1.0;
    config.iterations = 8;
    config.atoms = 6;
    config.filter_length = 64;
    const dirsep::ExperimentReport r1 = dirsep::run_experiment(config);
    const dirsep::ExperimentReport r2 = dirsep::run_experiment(config);
    REQUIRE(r1.rows.size() == 1);
    CHECK(r1.rows[0].sdr_mean == r2.rows[0].sdr_mean);
    CHECK(r1.rows[0].sdr_min == r2.rows[0].sdr_min);
    CHECK(r1.rows[0].sir_mean == r2.rows[0].sir_mean);
    CHECK(r1.rows[0].sar_mean == r2.rows[0].sar_mean);
  }

  TEST_CASE("report serialization carries every column") {
    dirsep::ExperimentReport report;
    dirsep::AlgorithmReport row;
    row.algorithm = "dntf";
    row.sdr_mean = 6.25;
    row.sdr_min = 4.5;
    row.sir_mean = 11.0;
    row.sir_min = 9.0;
    row.sar_mean = 7.5;
    row.sar_min = 6.0;
    row.seconds_per_iteration = 0.125;
    report.rows.push_back(row);
    const nlohmann::json j = nlohmann::json::parse(dirsep::report_to_json(report));
    REQUIRE(j.contains("dntf"));
    CHECK(j["dntf"]["sdr_mean"].get<double>() == doctest::Approx(6.25));
    CHECK(j["dntf"]["sdr_min"].get<double>() == doctest::Approx(4.5));
    CHECK(j["dntf"]["sir_mean"].get<double>() == doctest::Approx(11.0));
    CHECK(j["dntf"]["sir_min"].get<double>() == doctest::Approx(9.0));
    CHECK(j["dntf"]["sar_mean"].get<double>() == doctest::Approx(7.5));
    CHECK(j["dntf"]["sar_min"].get<double>() == doctest::Approx(6.0));
    CHECK(j["dntf"]["seconds_per_iteration"].get<double>() == doctest::Approx(0.125));
    const std::string table = dirsep::report_to_table(report);
    CHECK(table.find("dntf") != std::string::npos);
    CHECK(table.find("sdr") != std::string::npos);
  }
}
