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


#ifndef DRAMORIGIN_TESTS_CORPUS_UTIL_H_
#define DRAMORIGIN_TESTS_CORPUS_UTIL_H_

#include <cstdint>
#include <string>
#include <vector>

#include "dramorigin/dumpio.h"
#include "dramorigin/protocol.h"
#include "dramorigin/simgen.h"
#include "dramorigin/svdd.h"

namespace testutil {

inline const dramorigin::ClassProfile& default_profile(std::int32_t class_tag) {
  static const std::vector<dramorigin::ClassProfile> profiles = dramorigin::default_profiles();
  for (const auto& p : profiles) {
    if (p.class_tag == class_tag) return p;
  }
  throw std::out_of_range("no default profile " + std::to_string(class_tag));
}

// In-memory equivalent of one module of generate_corpus.
inline dramorigin::Dump simulated_dump(std::int32_t class_tag, std::size_t module_index,
                                       std::size_t rows, std::uint64_t master_seed) {
  using namespace dramorigin;
  const ClassProfile& profile = default_profile(class_tag);
  const ModuleInstance module(profile, module_seed(master_seed, class_tag, module_index));
  Dump d;
  d.record = module_record(profile, corpus_module_id(class_tag, module_index));
  d.pages = generate_module_pages(module, d.record.module_id, rows);
  return d;
}

inline std::vector<dramorigin::FeatureVector> features_of(const dramorigin::Dump& dump) {
  std::vector<dramorigin::FeatureVector> out;
  for (auto& r : dramorigin::extract_feature_rows(dump.pages)) out.push_back(r.features);
  return out;
}

// Tuned one-class model on the default grids, as the OEM side would build it.
inline dramorigin::SvddModel tuned_model(const dramorigin::Dump& dump, std::int32_t class_tag,
                                         std::uint64_t seed = 1) {
  using namespace dramorigin;
  const auto fv = features_of(dump);
  std::vector<Point> raw;
  for (const auto& f : fv) raw.push_back(f.to_point());
  const Scaler scaler = Scaler::fit(raw);
  std::vector<Point> scaled;
  for (const auto& r : raw) scaled.push_back(scaler.apply(r));
  const TuneResult t = tune(scaled, default_c_grid(), default_gamma_grid(), 5, seed);
  return train_feature_model(fv, t.C, t.gamma, class_tag);
}

}  // namespace testutil

#endif  // DRAMORIGIN_TESTS_CORPUS_UTIL_H_
