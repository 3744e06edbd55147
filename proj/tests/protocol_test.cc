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

#include <gtest/gtest.h>

#include "corpus_util.h"
#include "dramorigin/error.h"
#include "dramorigin/rng.h"

namespace dramorigin {
namespace {

constexpr std::uint64_t kMaster = 20260901;
constexpr std::size_t kRows = 512;

// class 1 model trained on module 1, shared by the end-to-end tests
struct Fixture {
  SvddModel model;
  Dump same_class;
  Dump other_class;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture x;
    x.model = testutil::tuned_model(testutil::simulated_dump(1, 0, kRows, kMaster), 1);
    x.same_class = testutil::simulated_dump(1, 1, kRows, kMaster);
    x.other_class = testutil::simulated_dump(4, 0, kRows, kMaster);
    return x;
  }();
  return f;
}

TEST(Ppr, Examples) {
  EXPECT_EQ(compute_ppr(std::vector<bool>(7, true)), 100.0);
  EXPECT_EQ(compute_ppr(std::vector<bool>(7, false)), 0.0);
  std::vector<bool> d(10000, false);
  std::fill(d.begin(), d.begin() + 9907, true);
  EXPECT_NEAR(compute_ppr(d), 99.07, 1e-12);
  EXPECT_THROW(compute_ppr(std::vector<bool>{}), DomainError);
  EXPECT_THROW(compute_ppr(5, 4), DomainError);
}

TEST(Threshold, Examples) {
  const std::vector<double> three = {95.40, 99.07, 98.2};
  EXPECT_EQ(select_threshold(three).lambda, 95.40);
  const std::vector<double> one = {87.6};
  EXPECT_EQ(select_threshold(one).lambda, 87.6);
  const ThresholdSelection overlap = select_threshold(three, 96.0);
  EXPECT_FALSE(overlap.separable);
  EXPECT_NEAR(*overlap.gap, -0.6, 1e-12);
  const ThresholdSelection clean = select_threshold(three, 0.17);
  EXPECT_TRUE(clean.separable);
  EXPECT_NEAR(*clean.gap, 95.23, 1e-12);
  EXPECT_FALSE(select_threshold(one).gap.has_value());
  EXPECT_THROW(select_threshold({}), DomainError);
}

TEST(Policy, Validation) {
  EXPECT_THROW((VerificationPolicy{-1.0, 1, 0}).validate(), DomainError);
  EXPECT_THROW((VerificationPolicy{100.5, 1, 0}).validate(), DomainError);
  EXPECT_THROW((VerificationPolicy{50.0, 0, 0}).validate(), DomainError);
  EXPECT_NO_THROW((VerificationPolicy{100.0, 1, 0}).validate());
}

TEST(Verdict, BoundaryIsAuthentic) {
  EXPECT_EQ(verdict_for(95.4, 95.4), Verdict::kAuthentic);
  EXPECT_EQ(verdict_for(95.39, 95.4), Verdict::kCounterfeit);
  EXPECT_EQ(verdict_name(Verdict::kAuthentic), "authentic");
  EXPECT_EQ(verdict_name(Verdict::kCounterfeit), "counterfeit");
}

TEST(Sampling, UniformWithoutReplacement) {
  const auto idx = sample_indices(100, 40, 9);
  ASSERT_EQ(idx.size(), 40u);
  EXPECT_TRUE(std::is_sorted(idx.begin(), idx.end()));
  EXPECT_EQ(std::adjacent_find(idx.begin(), idx.end()), idx.end());
  EXPECT_EQ(sample_indices(100, 40, 9), idx);
  EXPECT_NE(sample_indices(100, 40, 10), idx);
  EXPECT_THROW(sample_indices(10, 11, 0), DomainError);
  // every index equally likely: 20000 draws of 1 from 10
  std::vector<int> hits(10, 0);
  for (std::uint64_t s = 0; s < 20000; ++s) ++hits[sample_indices(10, 1, s)[0]];
  for (int h : hits) EXPECT_NEAR(h, 2000, 200);
}

TEST(PageGroups, IncompleteRowsAreSkipped) {
  Dump d = testutil::simulated_dump(2, 0, 8, kMaster);
  EXPECT_EQ(collect_page_groups(d.pages).size(), 8u);
  d.pages.erase(d.pages.begin() + 5);
  EXPECT_EQ(collect_page_groups(d.pages).size(), 7u);
  d.pages.push_back(d.pages[0]);
  EXPECT_THROW(collect_page_groups(d.pages), DomainError);
}

TEST(PageGroups, FeatureRowsOrderedByBankRow) {
  Dump d = testutil::simulated_dump(2, 0, 20, kMaster);
  std::reverse(d.pages.begin(), d.pages.end());
  const auto rows = extract_feature_rows(d.pages);
  ASSERT_EQ(rows.size(), 20u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_LT(std::pair(rows[i - 1].bank, rows[i - 1].row), std::pair(rows[i].bank, rows[i].row));
  }
}

TEST(Verify, SameClassAuthentic) {
  const auto& f = fixture();
  const VerificationReport r = verify_module(f.same_class, f.model, {50.0, 256, 1});
  EXPECT_EQ(r.pages_tested, 256u);
  EXPECT_EQ(r.pages_available, kRows);
  EXPECT_EQ(r.verdict, Verdict::kAuthentic) << r.ppr;
  EXPECT_EQ(r.module_id, "C1-M2");
  EXPECT_EQ(r.model_class_tag, 1);
}

TEST(Verify, OtherClassCounterfeit) {
  const auto& f = fixture();
  const VerificationReport r = verify_module(f.other_class, f.model, {50.0, 256, 1});
  EXPECT_EQ(r.verdict, Verdict::kCounterfeit);
  EXPECT_LT(r.ppr, 10.0);
}

TEST(Verify, AllPagesInsideGivesFullPpr) {
  const auto& f = fixture();
  SvddModel loose = f.model;
  loose.r2 = 1.0 + loose.w2;  // nothing lies farther than the far-field distance
  const VerificationReport r = verify_module(f.other_class, loose, {100.0, kRows, 3});
  EXPECT_EQ(r.pages_tested, kRows);
  EXPECT_EQ(r.ppr, 100.0);
  EXPECT_EQ(r.verdict, Verdict::kAuthentic);
}

TEST(Verify, PageOrderInvariance) {
  const auto& f = fixture();
  Dump shuffled = f.same_class;
  Rng rng(5);
  for (std::size_t i = shuffled.pages.size() - 1; i > 0; --i) {
    std::swap(shuffled.pages[i], shuffled.pages[rng.below(i + 1)]);
  }
  const VerificationPolicy policy{50.0, 100, 7};
  EXPECT_EQ(report_to_json(verify_module(shuffled, f.model, policy)),
            report_to_json(verify_module(f.same_class, f.model, policy)));
}

TEST(Verify, Deterministic) {
  const auto& f = fixture();
  const VerificationPolicy policy{50.0, 64, 11};
  const std::string a = report_to_json(verify_module(f.same_class, f.model, policy));
  EXPECT_EQ(a, report_to_json(verify_module(f.same_class, f.model, policy)));
  const VerificationReport other = verify_module(f.same_class, f.model, {50.0, 64, 12});
  const VerificationReport first = report_from_json(a);
  EXPECT_NE(other.pages, first.pages);
}

TEST(Verify, MonotoneInLambdaAndBoundary) {
  const auto& f = fixture();
  for (const Dump* d : {&f.same_class, &f.other_class}) {
    const VerificationReport base = verify_module(*d, f.model, {0.0, 128, 2});
    bool was_authentic = true;
    for (int step = 0; step <= 200; ++step) {
      const double lambda = step * 0.5;
      const VerificationReport r = verify_module(*d, f.model, {lambda, 128, 2});
      EXPECT_EQ(r.ppr, base.ppr);
      const bool authentic = r.verdict == Verdict::kAuthentic;
      if (!was_authentic) EXPECT_FALSE(authentic) << lambda;
      was_authentic = authentic;
    }
    const VerificationReport at = verify_module(*d, f.model, {base.ppr, 128, 2});
    EXPECT_EQ(at.verdict, Verdict::kAuthentic);
    const double above = std::nextafter(base.ppr, 101.0);
    if (above <= 100.0) {
      EXPECT_EQ(verify_module(*d, f.model, {above, 128, 2}).verdict, Verdict::kCounterfeit);
    }
  }
}

TEST(Verify, Errors) {
  const auto& f = fixture();
  EXPECT_THROW(verify_module(f.same_class, f.model, {50.0, kRows + 1, 0}), DomainError);
  SvddModel stale = f.model;
  stale.feature_fingerprint = "f26:old-order";
  EXPECT_THROW(verify_module(f.same_class, stale, {50.0, 10, 0}), DomainError);
}

TEST(Verify, FeatureRowsPathAgrees) {
  const auto& f = fixture();
  const auto rows = extract_feature_rows(f.same_class.pages);
  const VerificationPolicy policy{50.0, 200, 4};
  const VerificationReport a = verify_features("C1-M2", rows, f.model, policy);
  const VerificationReport b = verify_module(f.same_class, f.model, policy);
  EXPECT_EQ(report_to_json(a), report_to_json(b));
}

TEST(Report, JsonRoundTripAndSummary) {
  const auto& f = fixture();
  const VerificationReport r = verify_module(f.other_class, f.model, {12.5, 32, 8});
  const std::string text = report_to_json(r);
  const VerificationReport back = report_from_json(text);
  EXPECT_EQ(report_to_json(back), text);
  EXPECT_EQ(back.pages, r.pages);
  EXPECT_EQ(back.ppr, r.ppr);
  const std::string s = summarize(r);
  EXPECT_NE(s.find("counterfeit"), std::string::npos);
  EXPECT_NE(s.find("C4-M1"), std::string::npos);
  EXPECT_THROW(report_from_json("{}"), FormatError);
  EXPECT_THROW(report_from_json("[1,"), FormatError);
}

}  // namespace
}  // namespace dramorigin
