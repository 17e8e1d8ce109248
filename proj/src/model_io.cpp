// src/model_io.cpp

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

#include "model_io.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

#include "errors.hpp"
#include "json.hpp"

namespace dirsep {

namespace {

using nlohmann::json;

json matrix_to_rows(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json matrices_to_rows(const std::vector<Eigen::MatrixXd>& ms) {
  json out = json::array();
  for (const Eigen::MatrixXd& m : ms) out.push_back(matrix_to_rows(m));
  return out;
}

json fit_info_json(const FitInfo& info) {
  json j;
  j["iterations"] = info.iterations;
  j["mask_mode"] = mask_mode_name(info.mask_mode);
  j["seed"] = info.seed;
  return j;
}

}  // namespace

std::string dntf_model_to_json(const DntfModel& model, const FitInfo& info) {
  json j;
  j["format"] = "dirsep-model";
  j["type"] = "dntf";
  j["dims"] = {{"atoms", model.atoms()},
               {"bins", model.bins()},
               {"directions", model.directions()},
               {"frames", model.frames()},
               {"sources", model.sources()}};
  j["fit"] = fit_info_json(info);
  j["factors"] = {{"dir", matrix_to_rows(model.dir)},
                  {"dicts", matrices_to_rows(model.dicts)},
                  {"act", matrices_to_rows(model.act)}};
  return j.dump();
}

std::string dnmf_model_to_json(const DnmfModel& model, const FitInfo& info) {
  json j;
  j["format"] = "dirsep-model";
  j["type"] = "dnmf";
  j["dims"] = {{"bins", model.bins()},
               {"directions", model.directions()},
               {"frames", model.frames()},
               {"sources", model.sources()}};
  j["fit"] = fit_info_json(info);
  j["factors"] = {{"dir", matrix_to_rows(model.dir)},
                  {"joint", matrices_to_rows(model.joint)}};
  return j.dump();
}

std::string supervised_model_to_json(const SupervisedModel& model, const FitInfo& info) {
  json j;
  j["format"] = "dirsep-model";
  j["type"] = "supervised";
  j["dims"] = {{"atoms", model.dicts.empty() ? 0 : static_cast<int>(model.dicts[0].cols())},
               {"bins", model.bins()},
               {"frames", model.frames()},
               {"sources", model.sources()}};
  j["fit"] = fit_info_json(info);
  json weights = json::array();
  for (Eigen::Index s = 0; s < model.weights.size(); ++s) weights.push_back(model.weights(s));
  j["factors"] = {{"weights", weights},
                  {"dicts", matrices_to_rows(model.dicts)},
                  {"act", matrices_to_rows(model.act)}};
  return j.dump();
}

std::string bss_result_to_json(const BssEvalResult& result) {
  const int sources = static_cast<int>(result.per_source.size());
  json j;
  j["filter_length"] = result.filter_length;
  std::vector<int> estimate_to_reference(sources, 0);
  for (int ref = 0; ref < sources; ++ref) estimate_to_reference[result.assignment[ref]] = ref;
  j["permutation"] = estimate_to_reference;
  json per = json::array();
  double sdr_sum = 0.0, sir_sum = 0.0, sar_sum = 0.0;
  double sdr_min = 0.0, sir_min = 0.0, sar_min = 0.0;
  for (int s = 0; s < sources; ++s) {
    const BssScores& v = result.per_source[s];
    per.push_back({{"sdr", v.sdr}, {"sir", v.sir}, {"sar", v.sar}});
    sdr_sum += v.sdr;
    sir_sum += v.sir;
    sar_sum += v.sar;
    if (s == 0 || v.sdr < sdr_min) sdr_min = v.sdr;
    if (s == 0 || v.sir < sir_min) sir_min = v.sir;
    if (s == 0 || v.sar < sar_min) sar_min = v.sar;
  }
  j["per_source"] = per;
  if (sources > 0) {
    j["mean"] = {{"sdr", sdr_sum / sources}, {"sir", sir_sum / sources}, {"sar", sar_sum / sources}};
    j["min"] = {{"sdr", sdr_min}, {"sir", sir_min}, {"sar", sar_min}};
  }
  return j.dump();
}

std::string direction_summary_to_json(const std::vector<DirectionSummary>& summary) {
  json rows = json::array();
  for (const DirectionSummary& e : summary) {
    rows.push_back({{"source", e.source},
                    {"azimuth", e.azimuth},
                    {"concentration", e.concentration},
                    {"degenerate", e.degenerate}});
  }
  json out;
  out["sources"] = rows;
  return out.dump();
}

std::vector<std::uint8_t> mask_to_blob(const SeparationMask& mask) {
  const int sources = mask.sources();
  const int bins = mask.bins();
  const int frames = mask.frames();
  json header;
  header["dims"] = {sources, bins, frames};
  header["dtype"] = "float64";
  header["order"] = "source-major, then frequency, frame fastest";
  const std::string header_text = header.dump();

  std::vector<std::uint8_t> blob;
  const char magic[8] = {'D', 'I', 'R', 'S', 'E', 'P', 'M', 'K'};
  blob.insert(blob.end(), magic, magic + 8);
  const std::uint32_t header_len = static_cast<std::uint32_t>(header_text.size());
  for (int b = 0; b < 4; ++b) {
    blob.push_back(static_cast<std::uint8_t>((header_len >> (8 * b)) & 0xff));
  }
  blob.insert(blob.end(), header_text.begin(), header_text.end());
  blob.resize(blob.size() + static_cast<std::size_t>(sources) * bins * frames * sizeof(double));
  std::uint8_t* payload = blob.data() + 12 + header_text.size();
  for (int s = 0; s < sources; ++s) {
    for (int f = 0; f < bins; ++f) {
      for (int t = 0; t < frames; ++t) {
        const double v = mask.weights[s](f, t);
        std::memcpy(payload, &v, sizeof(double));
        payload += sizeof(double);
      }
    }
  }
  return blob;
}

SeparationMask mask_from_blob(const std::vector<std::uint8_t>& blob) {
  if (blob.size() < 12 || std::memcmp(blob.data(), "DIRSEPMK", 8) != 0) {
    throw FormatError("not a mask blob");
  }
  std::uint32_t header_len = 0;
  for (int b = 0; b < 4; ++b) {
    header_len |= static_cast<std::uint32_t>(blob[8 + b]) << (8 * b);
  }
  if (blob.size() < 12 + static_cast<std::size_t>(header_len)) {
    throw FormatError("truncated mask blob header");
  }
  const json header = json::parse(blob.begin() + 12, blob.begin() + 12 + header_len);
  const std::vector<int> dims = header.at("dims").get<std::vector<int>>();
  if (dims.size() != 3 || dims[0] <= 0 || dims[1] <= 0 || dims[2] <= 0) {
    throw FormatError("bad mask blob dimensions");
  }
  const std::size_t expected = static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  if (blob.size() != 12 + header_len + expected * sizeof(double)) {
    throw FormatError("mask blob payload size mismatch");
  }
  SeparationMask mask;
  mask.weights.assign(dims[0], Eigen::MatrixXd(dims[1], dims[2]));
  const std::uint8_t* payload = blob.data() + 12 + header_len;
  for (int s = 0; s < dims[0]; ++s) {
    for (int f = 0; f < dims[1]; ++f) {
      for (int t = 0; t < dims[2]; ++t) {
        double v = 0.0;
        std::memcpy(&v, payload, sizeof(double));
        payload += sizeof(double);
        mask.weights[s](f, t) = v;
      }
    }
  }
  return mask;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed: " + path);
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return text;
}

}  // namespace dirsep
