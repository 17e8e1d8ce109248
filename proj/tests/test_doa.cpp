// tests/test_doa.cpp

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

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "doa.hpp"
#include "doctest.h"
#include "rng.hpp"

namespace {

constexpr double kPi = 3.14159265358979323846;

dirsep::ArrayGeometry square_array() {
  dirsep::ArrayGeometry g;
  g.positions.resize(3, 2);
  g.positions << 0.0, 0.0, 0.02, 0.0, 0.0, 0.02;
  return g;
}

// Complex values a plane wave with wave vector k produces across the
// array: channel i carries phase k . x_i.
std::vector<std::complex<double>> plane_wave(const dirsep::ArrayGeometry& g,
                                             const Eigen::VectorXd& k) {
  std::vector<std::complex<double>> values;
  for (int i = 0; i < g.mics(); ++i) {
    double phase = k.dot(g.positions.row(i));
    values.emplace_back(std::cos(phase), std::sin(phase));
  }
  return values;
}

}  // namespace

TEST_SUITE("doa") {
  TEST_CASE("wrap_phase lands in (-pi, pi]") {
    CHECK(dirsep::wrap_phase(0.0) == doctest::Approx(0.0));
    CHECK(dirsep::wrap_phase(kPi) == doctest::Approx(kPi));
    CHECK(dirsep::wrap_phase(-kPi) == doctest::Approx(kPi));
    CHECK(dirsep::wrap_phase(3.0 * kPi) == doctest::Approx(kPi));
    CHECK(dirsep::wrap_phase(2.0 * kPi + 0.25) == doctest::Approx(0.25));
    CHECK(dirsep::wrap_phase(-2.0 * kPi - 0.25) == doctest::Approx(-0.25));
    for (double x = -20.0; x <= 20.0; x += 0.37) {
      double w = dirsep::wrap_phase(x);
      CHECK(w > -kPi - 1e-12);
      CHECK(w <= kPi + 1e-12);
      CHECK(std::remainder(w - x, 2.0 * kPi) == doctest::Approx(0.0).epsilon(1e-9));
    }
  }

  TEST_CASE("plane wave recovery is exact for small wave vectors") {
    const dirsep::ArrayGeometry g = square_array();
    const dirsep::DoaSolver solver = dirsep::design_doa_solver(g);
    dirsep::RandomStream rng(11);
    for (int trial = 0; trial < 50; ++trial) {
      Eigen::VectorXd k(2);
      // |k . (x_i - x_0)| stays below pi, so no wrap ambiguity.
      k << rng.uniform(-100.0, 100.0), rng.uniform(-100.0, 100.0);
      const auto values = plane_wave(g, k);
      const auto est = dirsep::estimate_doa(solver, values);
      REQUIRE(est.has_value());
      CHECK((*est - k).norm() <= 1e-9 * (1.0 + k.norm()));
    }
  }

  TEST_CASE("zero reference magnitude is reported unreliable") {
    const dirsep::DoaSolver solver = dirsep::design_doa_solver(square_array());
    std::vector<std::complex<double>> values{{0.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}};
    CHECK_FALSE(dirsep::estimate_doa(solver, values).has_value());
  }

  TEST_CASE("quantize_direction splits the circle into equal arcs") {
    Eigen::VectorXd k(2);
    k << 1.0, 0.0;
    CHECK(dirsep::quantize_direction(k, 8) == 0);
    k << 1.0, 1.0;  // azimuth pi/4 -> arc 1 of 8
    CHECK(dirsep::quantize_direction(k, 8) == 1);
    k << 0.0, 1.0;
    CHECK(dirsep::quantize_direction(k, 8) == 2);
    k << -1.0, 0.0;
    CHECK(dirsep::quantize_direction(k, 8) == 4);
    k << 0.0, -1.0;
    CHECK(dirsep::quantize_direction(k, 8) == 6);
    k << 1.0, -1e-9;  // azimuth just below 2pi -> last arc
    CHECK(dirsep::quantize_direction(k, 8) == 7);
    k << 0.0, 0.0;
    CHECK(dirsep::quantize_direction(k, 8) == 0);
    k.resize(1);
    k << 3.0;  // 1-D wave vector has no azimuth
    CHECK(dirsep::quantize_direction(k, 8) == 0);
  }

  TEST_CASE("right-angle array gives a diagonal solver") {
    dirsep::ArrayGeometry g;
    const double delta = 0.0212681;
    g.positions.resize(3, 2);
    g.positions << 0.0, 0.0, delta, 0.0, 0.0, delta;
    const dirsep::DoaSolver solver = dirsep::design_doa_solver(g);
    Eigen::MatrixXd expected_diffs(2, 2);
    expected_diffs << delta, 0.0, 0.0, delta;
    CHECK((solver.diffs - expected_diffs).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((solver.pinv - expected_diffs.inverse()).cwiseAbs().maxCoeff() <= 1e-12);
  }

  TEST_CASE("four-mic square array pseudoinverse is a left inverse") {
    dirsep::ArrayGeometry g;
    g.positions.resize(4, 2);
    g.positions << 0.0, 0.0, 0.02, 0.0, 0.0, 0.02, 0.02, 0.02;
    const dirsep::DoaSolver solver = dirsep::design_doa_solver(g);
    REQUIRE(solver.pinv.rows() == 2);
    REQUIRE(solver.pinv.cols() == 3);
    const Eigen::MatrixXd prod = solver.pinv * solver.diffs;
    CHECK((prod - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);
  }

  TEST_CASE("one-sample delay at the x mic reads as arrival from the -x axis") {
    const int rate = 16000;
    const double c = 340.29;
    const double delta = c / rate;
    dirsep::ArrayGeometry g;
    g.positions.resize(3, 2);
    g.positions << 0.0, 0.0, delta, 0.0, 0.0, delta;
    const dirsep::DoaSolver solver = dirsep::design_doa_solver(g);
    for (double omega : {0.3, 1.0, 2.5}) {  // digital frequency, rad/sample
      std::vector<std::complex<double>> values{
          {1.0, 0.0}, std::polar(1.0, -omega), {1.0, 0.0}};
      const auto est = dirsep::estimate_doa(solver, values);
      REQUIRE(est.has_value());
      CHECK((*est)(0) == doctest::Approx(-omega / delta).epsilon(1e-9));
      CHECK((*est)(1) == doctest::Approx(0.0));
      CHECK(dirsep::quantize_direction(*est, 24) == 12);  // azimuth pi
    }
  }

  TEST_CASE("steered plane wave lands in the source's arc across the band") {
    const int rate = 16000;
    const int frame = 256;
    const double c = 340.29;
    const double theta = 2.2;  // source azimuth, arc 8 of 24
    const dirsep::ArrayGeometry g = [&] {
      dirsep::ArrayGeometry a;
      const double delta = c / rate;
      a.positions.resize(3, 2);
      a.positions << 0.0, 0.0, delta, 0.0, 0.0, delta;
      return a;
    }();
    const dirsep::DoaSolver solver = dirsep::design_doa_solver(g);
    const Eigen::Vector2d toward(std::cos(theta), std::sin(theta));

    dirsep::RandomStream rng(99);
    const int bins = frame / 2 + 1, frames = 20;
    std::vector<dirsep::ComplexGrid> channels(3);
    for (auto& ch : channels) {
      ch.params = dirsep::StftParams{frame, frame / 4, dirsep::Window::kSqrtHann};
      ch.sample_rate = rate;
      ch.values.resize(bins, frames);
    }
    for (int t = 0; t < frames; ++t) {
      for (int f = 0; f < bins; ++f) {
        const std::complex<double> x(rng.gaussian(), rng.gaussian());
        const double hz = static_cast<double>(f) * rate / frame;
        for (int i = 0; i < 3; ++i) {
          const double phase = 2.0 * kPi * hz / c * toward.dot(g.positions.row(i));
          channels[i].values(f, t) = x * std::polar(1.0, phase);
        }
      }
    }
    const dirsep::DirectionField field = dirsep::direction_field(solver, channels, 24);
    const int want = dirsep::quantize_direction(
        Eigen::Vector2d(std::cos(theta), std::sin(theta)), 24);
    double hit = 0.0, total = 0.0;
    for (int t = 0; t < frames; ++t) {
      for (int f = 1; f + 1 < bins; ++f) {
        const double e = std::norm(channels[0].values(f, t));
        total += e;
        const int diff = std::abs(field.d(f, t) - want);
        if (std::min(diff, 24 - diff) <= 1) hit += e;
      }
    }
    CHECK(hit >= 0.95 * total);
  }

  TEST_CASE("collinear microphones are rejected") {
    dirsep::ArrayGeometry g;
    g.positions.resize(3, 2);
    g.positions << 0.0, 0.0, 0.01, 0.0, 0.02, 0.0;
    CHECK_THROWS_WITH_AS(dirsep::design_doa_solver(g), "degenerate array geometry",
                         std::invalid_argument);
  }

  TEST_CASE("geometry json round trip") {
    dirsep::ArrayGeometry g = square_array();
    g.speed_of_sound = 331.5;
    const dirsep::ArrayGeometry back = dirsep::geometry_from_json(dirsep::geometry_to_json(g));
    REQUIRE(back.mics() == g.mics());
    REQUIRE(back.dim() == g.dim());
    CHECK((back.positions - g.positions).norm() == doctest::Approx(0.0));
    CHECK(back.speed_of_sound == doctest::Approx(331.5));
  }

  TEST_CASE("direction field fills unreliable cells from neighbors in time") {
    const dirsep::ArrayGeometry g = square_array();
    const dirsep::DoaSolver solver = dirsep::design_doa_solver(g);

    // Hand-built 2-bin x 4-frame grids: frequency row 1 carries a plane
    // wave from azimuth pi/2 except frame 2, which is zeroed on the
    // reference channel; row 0 is unreliable everywhere.
    Eigen::VectorXd k(2);
    k << 0.0, 50.0;
    const auto wave = plane_wave(g, k);
    std::vector<dirsep::ComplexGrid> channels(3);
    for (int c = 0; c < 3; ++c) {
      channels[c].params = dirsep::StftParams{2, 1, dirsep::Window::kRect};
      channels[c].sample_rate = 16000;
      channels[c].values.setZero(2, 4);
      for (int t = 0; t < 4; ++t) {
        if (t != 2) channels[c].values(1, t) = wave[c];
      }
      if (c > 0) channels[c].values(1, 2) = wave[c];  // reference stays zero
    }

    const dirsep::DirectionField field = dirsep::direction_field(solver, channels, 8);
    REQUIRE(field.d.rows() == 2);
    REQUIRE(field.d.cols() == 4);
    CHECK(field.num_directions == 8);
    for (int t = 0; t < 4; ++t) {
      CHECK(field.d(1, t) == 2);  // frame 2 inherits neighbors' azimuth-pi/2 bin
      CHECK(field.d(0, t) == 0);  // no reliable cell in the row -> bin 0
    }
  }

  TEST_CASE("identical channels quantize to bin 0 everywhere") {
    const dirsep::ArrayGeometry g = square_array();
    const dirsep::DoaSolver solver = dirsep::design_doa_solver(g);
    dirsep::RandomStream rng(61);
    dirsep::ComplexGrid grid;
    grid.params = dirsep::StftParams{8, 2, dirsep::Window::kRect};
    grid.sample_rate = 8000;
    grid.values.resize(5, 6);
    for (int t = 0; t < 6; ++t) {
      for (int f = 0; f < 5; ++f) {
        grid.values(f, t) = std::complex<double>(rng.gaussian(), rng.gaussian());
      }
    }
    const std::vector<dirsep::ComplexGrid> channels(3, grid);
    const dirsep::DirectionField field = dirsep::direction_field(solver, channels, 24);
    CHECK(field.d.cwiseAbs().maxCoeff() == 0);
  }

  TEST_CASE("direction field json and csv round trips") {
    dirsep::DirectionField field;
    field.num_directions = 8;
    field.d.resize(3, 2);
    field.d << 0, 5, 2, 7, 4, 1;
    const std::string json_text = dirsep::direction_field_to_json(field);
    const dirsep::DirectionField back = dirsep::direction_field_from_json(json_text);
    CHECK(back.num_directions == 8);
    REQUIRE(back.d.rows() == 3);
    REQUIRE(back.d.cols() == 2);
    CHECK((back.d - field.d).cwiseAbs().maxCoeff() == 0);

    const std::string csv = dirsep::direction_field_to_csv(field);
    CHECK(csv == "0,5\n2,7\n4,1\n");
  }
}
