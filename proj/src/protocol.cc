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

#include "dramorigin/protocol.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

#include "json.hpp"

#include "dramorigin/error.h"
#include "dramorigin/parallel.h"
#include "dramorigin/rng.h"

namespace dramorigin {

double compute_ppr(std::size_t positives, std::size_t total) {
  if (total == 0) throw DomainError("PPR of zero pages is undefined");
  if (positives > total) throw DomainError("more positives than pages");
  return 100.0 * static_cast<double>(positives) / static_cast<double>(total);
}

double compute_ppr(const std::vector<bool>& decisions) {
  return compute_ppr(static_cast<std::size_t>(std::count(decisions.begin(), decisions.end(), true)),
                     decisions.size());
}

ThresholdSelection select_threshold(std::span<const double> positive_pprs,
                                    std::optional<double> negative_max) {
  if (positive_pprs.empty()) throw DomainError("select_threshold: no positive modules");
  ThresholdSelection s;
  s.lambda = *std::min_element(positive_pprs.begin(), positive_pprs.end());
  s.negative_max = negative_max;
  if (negative_max) {
    s.gap = s.lambda - *negative_max;
    s.separable = *negative_max <= s.lambda;
  }
  return s;
}

void VerificationPolicy::validate() const {
  if (!(lambda_ppr >= 0.0 && lambda_ppr <= 100.0)) {
    throw DomainError("lambda_ppr must lie in [0, 100]");
  }
  if (n_test_pages == 0) throw DomainError("at least one test page is required");
}

std::string_view verdict_name(Verdict v) {
  return v == Verdict::kAuthentic ? "authentic" : "counterfeit";
}

Verdict verdict_for(double ppr, double lambda) {
  return ppr >= lambda ? Verdict::kAuthentic : Verdict::kCounterfeit;
}

std::vector<PageGroup> collect_page_groups(std::span<const PageDump> pages) {
  std::map<std::pair<int, std::uint32_t>, std::vector<const PageDump*>> rows;
  for (const auto& p : pages) {
    auto& slot = rows[{p.bank(), p.row()}];
    for (const PageDump* q : slot) {
      if (q->pattern() == p.pattern()) {
        throw DomainError("dump repeats bank " + std::to_string(p.bank()) + " row " +
                          std::to_string(p.row()) + " pattern " +
                          std::string(pattern_name(p.pattern())));
      }
    }
    slot.push_back(&p);
  }
  std::vector<PageGroup> groups;
  for (const auto& [key, slot] : rows) {
    if (slot.size() != 4) continue;
    std::vector<PageDump> four;
    for (const PageDump* q : slot) four.push_back(*q);
    groups.emplace_back(std::move(four));
  }
  return groups;
}

std::vector<std::size_t> sample_indices(std::size_t population, std::size_t n,
                                        std::uint64_t seed) {
  if (n > population) {
    throw DomainError("cannot sample " + std::to_string(n) + " page groups from " +
                      std::to_string(population));
  }
  std::vector<std::size_t> idx(population);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    std::swap(idx[i], idx[i + rng.below(population - i)]);
  }
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  return idx;
}

namespace {

void check_fingerprint(const SvddModel& model) {
  if (model.feature_fingerprint != feature_fingerprint()) {
    throw DomainError("model feature fingerprint '" + model.feature_fingerprint +
                      "' does not match this build's '" + feature_fingerprint() + "'");
  }
}

VerificationReport assemble(std::string module_id, const SvddModel& model,
                            const VerificationPolicy& policy, std::size_t available,
                            std::vector<PageDecision> pages) {
  VerificationReport r;
  r.module_id = std::move(module_id);
  r.model_class_tag = model.class_tag;
  r.feature_fingerprint = model.feature_fingerprint;
  r.seed = policy.seed;
  r.pages_available = available;
  r.pages_tested = pages.size();
  r.positives = static_cast<std::size_t>(
      std::count_if(pages.begin(), pages.end(), [](const PageDecision& d) { return d.inside; }));
  r.ppr = compute_ppr(r.positives, r.pages_tested);
  r.lambda_ppr = policy.lambda_ppr;
  r.verdict = verdict_for(r.ppr, policy.lambda_ppr);
  r.pages = std::move(pages);
  return r;
}

}  // namespace

VerificationReport verify_features(std::string module_id, std::span<const FeatureRow> rows,
                                   const SvddModel& model, const VerificationPolicy& policy) {
  policy.validate();
  check_fingerprint(model);
  std::vector<const FeatureRow*> sorted;
  for (const auto& r : rows) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(), [](const FeatureRow* a, const FeatureRow* b) {
    return std::pair(a->bank, a->row) < std::pair(b->bank, b->row);
  });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i]->bank == sorted[i - 1]->bank && sorted[i]->row == sorted[i - 1]->row) {
      throw DomainError("feature rows repeat bank/row");
    }
  }
  const auto chosen = sample_indices(sorted.size(), policy.n_test_pages, policy.seed);
  std::vector<PageDecision> decisions(chosen.size());
  parallel_for(chosen.size(), [&](std::size_t i) {
    const FeatureRow& r = *sorted[chosen[i]];
    const Decision d = decide(model, r.features.values());
    decisions[i] = {r.bank, r.row, d.distance2, d.inside};
  });
  return assemble(std::move(module_id), model, policy, sorted.size(), std::move(decisions));
}

std::vector<FeatureRow> extract_feature_rows(std::span<const PageDump> pages) {
  const std::vector<PageGroup> groups = collect_page_groups(pages);
  std::vector<FeatureRow> rows(groups.size());
  parallel_for(groups.size(), [&](std::size_t i) {
    const PageGroup& g = groups[i];
    rows[i] = {g.module_id(), g.bank(), g.row(), extract_features(g)};
  });
  return rows;
}

VerificationReport verify_module(const Dump& dump, const SvddModel& model,
                                 const VerificationPolicy& policy) {
  policy.validate();
  check_fingerprint(model);
  const std::vector<PageGroup> groups = collect_page_groups(dump.pages);
  const auto chosen = sample_indices(groups.size(), policy.n_test_pages, policy.seed);
  std::vector<PageDecision> decisions(chosen.size());
  parallel_for(chosen.size(), [&](std::size_t i) {
    const PageGroup& g = groups[chosen[i]];
    const Decision d = decide(model, extract_features(g).values());
    decisions[i] = {g.bank(), g.row(), d.distance2, d.inside};
  });
  return assemble(dump.record.module_id, model, policy, groups.size(), std::move(decisions));
}

std::string report_to_json(const VerificationReport& r) {
  using nlohmann::ordered_json;
  ordered_json pages = ordered_json::array();
  for (const auto& p : r.pages) {
    pages.push_back({{"bank", p.bank}, {"row", p.row}, {"distance2", p.distance2},
                     {"inside", p.inside}});
  }
  ordered_json j = {{"module_id", r.module_id},
                    {"model_class_tag", r.model_class_tag},
                    {"feature_fingerprint", r.feature_fingerprint},
                    {"seed", r.seed},
                    {"pages_available", r.pages_available},
                    {"pages_tested", r.pages_tested},
                    {"positives", r.positives},
                    {"ppr", r.ppr},
                    {"lambda_ppr", r.lambda_ppr},
                    {"verdict", std::string(verdict_name(r.verdict))},
                    {"pages", pages}};
  return j.dump(2) + "\n";
}

VerificationReport report_from_json(std::string_view text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("report is not valid JSON: ") + e.what(), e.byte);
  }
  try {
    VerificationReport r;
    r.module_id = j.at("module_id").get<std::string>();
    r.model_class_tag = j.at("model_class_tag").get<std::int32_t>();
    r.feature_fingerprint = j.at("feature_fingerprint").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.pages_available = j.at("pages_available").get<std::size_t>();
    r.pages_tested = j.at("pages_tested").get<std::size_t>();
    r.positives = j.at("positives").get<std::size_t>();
    r.ppr = j.at("ppr").get<double>();
    r.lambda_ppr = j.at("lambda_ppr").get<double>();
    const auto verdict = j.at("verdict").get<std::string>();
    if (verdict != "authentic" && verdict != "counterfeit") {
      throw FormatError("unknown verdict '" + verdict + "'", 0);
    }
    r.verdict = verdict == "authentic" ? Verdict::kAuthentic : Verdict::kCounterfeit;
    for (const auto& p : j.at("pages")) {
      r.pages.push_back({p.at("bank").get<int>(), p.at("row").get<std::uint32_t>(),
                         p.at("distance2").get<double>(), p.at("inside").get<bool>()});
    }
    return r;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed report: ") + e.what(), 0);
  }
}

std::string summarize(const VerificationReport& r) {
  std::ostringstream out;
  char ppr[32], lam[32];
  std::snprintf(ppr, sizeof ppr, "%.2f", r.ppr);
  std::snprintf(lam, sizeof lam, "%.2f", r.lambda_ppr);
  out << "module        : " << r.module_id << "\n"
      << "model class   : " << r.model_class_tag << "\n"
      << "pages tested  : " << r.pages_tested << " of " << r.pages_available << " (seed "
      << r.seed << ")\n"
      << "positives     : " << r.positives << "\n"
      << "PPR           : " << ppr << " %\n"
      << "lambda_PPR    : " << lam << " %\n"
      << "verdict       : " << verdict_name(r.verdict) << "\n";
  return out.str();
}

}  // namespace dramorigin
