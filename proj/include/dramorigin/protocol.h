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

#ifndef DRAMORIGIN_PROTOCOL_H_
#define DRAMORIGIN_PROTOCOL_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dramorigin/dumpio.h"
#include "dramorigin/features.h"
#include "dramorigin/svdd.h"

namespace dramorigin {

/// Percentage of pages classified positive. Throws DomainError when empty.
double compute_ppr(const std::vector<bool>& decisions);
double compute_ppr(std::size_t positives, std::size_t total);

struct ThresholdSelection {
  double lambda = 0.0;                  // min PPR over known-genuine modules
  std::optional<double> negative_max;   // max PPR over known-foreign modules
  std::optional<double> gap;            // lambda - negative_max
  bool separable = true;                // false when negative_max > lambda
};

ThresholdSelection select_threshold(std::span<const double> positive_pprs,
                                    std::optional<double> negative_max = std::nullopt);

struct VerificationPolicy {
  double lambda_ppr = 0.0;        // percent, [0, 100]
  std::size_t n_test_pages = 256; // page groups to sample
  std::uint64_t seed = 0;

  /// Throws DomainError when lambda is outside [0, 100] or n is 0.
  void validate() const;
};

enum class Verdict { kAuthentic, kCounterfeit };
std::string_view verdict_name(Verdict v);

/// Authentic iff ppr >= lambda.
Verdict verdict_for(double ppr, double lambda);

struct PageDecision {
  int bank = 0;
  std::uint32_t row = 0;
  double distance2 = 0.0;
  bool inside = false;
  bool operator==(const PageDecision&) const = default;
};

struct VerificationReport {
  std::string module_id;
  std::int32_t model_class_tag = 0;
  std::string feature_fingerprint;
  std::uint64_t seed = 0;
  std::size_t pages_available = 0;
  std::size_t pages_tested = 0;
  std::size_t positives = 0;
  double ppr = 0.0;
  double lambda_ppr = 0.0;
  Verdict verdict = Verdict::kCounterfeit;
  std::vector<PageDecision> pages;  // sorted by (bank, row)
};

/// Complete page groups of a dump ordered by (bank, row); rows missing a
/// pattern are dropped. Throws DomainError on duplicate (bank, row,
/// pattern) pages.
std::vector<PageGroup> collect_page_groups(std::span<const PageDump> pages);

/// Features of every complete page group, ordered by (bank, row).
std::vector<FeatureRow> extract_feature_rows(std::span<const PageDump> pages);

/// n distinct indices from [0, population) sorted ascending; a seeded
/// partial Fisher-Yates shuffle. Throws DomainError when n > population.
std::vector<std::size_t> sample_indices(std::size_t population, std::size_t n,
                                        std::uint64_t seed);

/// Verifies pre-extracted page-group features. Sampling is over rows sorted
/// by (bank, row), so the input order does not matter.
VerificationReport verify_features(std::string module_id, std::span<const FeatureRow> rows,
                                   const SvddModel& model, const VerificationPolicy& policy);

/// Samples n page groups, extracts their features and classifies them.
/// Throws DomainError on a feature fingerprint mismatch or when the dump
/// holds fewer than n complete groups.
VerificationReport verify_module(const Dump& dump, const SvddModel& model,
                                 const VerificationPolicy& policy);

std::string report_to_json(const VerificationReport& report);
VerificationReport report_from_json(std::string_view text);
/// Human-readable summary.
std::string summarize(const VerificationReport& report);

}  // namespace dramorigin

#endif  // DRAMORIGIN_PROTOCOL_H_
