// Copyright 2026 The dramorigin Authors
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

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "dramorigin/error.h"
#include "dramorigin/svdd.h"

namespace dramorigin {
namespace {

using nlohmann::json;

json grid_entry(const GridScore& g) {
  return {{"C", g.C},
          {"gamma", g.gamma},
          {"feasible", g.feasible},
          {"score", g.score},
          {"true_positive_rate", g.true_positive_rate},
          {"true_negative_rate", g.true_negative_rate}};
}

template <typename T>
T field(const json& j, const char* name) {
  if (!j.contains(name)) throw FormatError(std::string("model file lacks field '") + name + "'", 0);
  try {
    return j.at(name).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("model field '") + name + "': " + e.what(), 0);
  }
}

}  // namespace

std::string model_to_json(const SvddModel& m, const std::optional<TuneResult>& tuning) {
  json j;
  j["format_version"] = kModelFormatVersion;
  j["class_tag"] = m.class_tag;
  j["feature_fingerprint"] = m.feature_fingerprint;
  if (!m.feature_fingerprint.empty()) {
    std::vector<std::string> order;
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      order.push_back(feature_column_name(i) + "=" + feature_description(i));
    }
    j["feature_order"] = order;
  }
  j["kernel"] = "rbf";
  j["C"] = m.C;
  j["gamma"] = m.gamma;
  j["R2"] = m.r2;
  j["w2"] = m.w2;
  j["tolerance"] = m.tolerance;
  j["scaler"] = {{"means", m.scaler.means()}, {"stds", m.scaler.stds()}};
  j["support_vectors"] = m.support_vectors;
  j["alphas"] = m.alphas;
  j["training"] = {{"size", m.training_size},
                   {"dual_objective", m.dual_objective},
                   {"kkt_residual", m.kkt_residual},
                   {"iterations", m.iterations}};
  if (tuning) {
    json grid = json::array();
    for (const auto& g : tuning->grid) grid.push_back(grid_entry(g));
    j["tuning"] = {{"C", tuning->C},
                   {"gamma", tuning->gamma},
                   {"score", tuning->score},
                   {"folds", tuning->folds},
                   {"seed", tuning->seed},
                   {"outlier_count", tuning->outlier_count},
                   {"grid", grid}};
  }
  return j.dump(2) + "\n";
}

SvddModel model_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("model file is not valid JSON: ") + e.what(), e.byte);
  }
  if (!j.is_object()) throw FormatError("model file must hold a JSON object", 0);
  const int version = field<int>(j, "format_version");
  if (version != kModelFormatVersion) {
    throw FormatError("unsupported model format version " + std::to_string(version), 0);
  }
  SvddModel m;
  m.class_tag = field<std::int32_t>(j, "class_tag");
  m.feature_fingerprint = field<std::string>(j, "feature_fingerprint");
  m.C = field<double>(j, "C");
  m.gamma = field<double>(j, "gamma");
  m.r2 = field<double>(j, "R2");
  m.w2 = field<double>(j, "w2");
  m.tolerance = field<double>(j, "tolerance");
  const json scaler = field<json>(j, "scaler");
  m.scaler = Scaler(field<std::vector<double>>(scaler, "means"),
                    field<std::vector<double>>(scaler, "stds"));
  m.support_vectors = field<std::vector<Point>>(j, "support_vectors");
  m.alphas = field<std::vector<double>>(j, "alphas");
  if (j.contains("training")) {
    const json& t = j["training"];
    m.training_size = field<std::size_t>(t, "size");
    m.dual_objective = field<double>(t, "dual_objective");
    m.kkt_residual = field<double>(t, "kkt_residual");
    m.iterations = field<std::uint64_t>(t, "iterations");
  }

  if (m.alphas.size() != m.support_vectors.size() || m.support_vectors.empty()) {
    throw FormatError("model needs one alpha per support vector", 0);
  }
  for (const auto& sv : m.support_vectors) {
    if (sv.size() != m.support_vectors.front().size()) {
      throw FormatError("support vectors differ in dimension", 0);
    }
  }
  if (!m.scaler.is_identity() && m.scaler.dimension() != m.dimension()) {
    throw FormatError("scaler dimension does not match support vectors", 0);
  }
  if (!(m.gamma > 0.0)) throw FormatError("model gamma must be positive", 0);
  return m;
}

void save_model(const SvddModel& model, const std::filesystem::path& path,
                const std::optional<TuneResult>& tuning) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << model_to_json(model, tuning);
  if (!out) throw IoError("write failed for " + path.string());
}

SvddModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace dramorigin
