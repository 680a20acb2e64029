// Copyright 2026 The SoundSearch Authors
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

#pragma once

#include <array>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "soundsearch/error.h"

namespace soundsearch::stats {

enum class PValueMethod { kExact, kNormalApproximation };

struct TestResult {
  double statistic = 0.0;  // W = min(R+, R-)
  double p_value = 1.0;  // two-sided
  double effect_size_r = 0.0;  // matched-pairs rank-biserial
  std::size_t n_effective = 0;  // pairs left after dropping zero differences
  PValueMethod method = PValueMethod::kExact;
  double rank_sum_positive = 0.0;
  double rank_sum_negative = 0.0;
};

inline constexpr std::size_t kExactMaxPairs = 25;

// Signed ranks of the nonzero differences a[i] - b[i]; tied magnitudes get
// their average rank.
struct SignedRanks {
  std::vector<double> ranks;  // rank of |d|, in input order of nonzero d
  std::vector<bool> positive;
  double rank_sum_positive = 0.0;
  double rank_sum_negative = 0.0;
  std::vector<std::size_t> tie_sizes;  // sizes of tie groups with >1 member
};

SignedRanks signed_ranks(std::span<const double> a, std::span<const double> b);

// Two-sided Wilcoxon signed-rank test. Exact enumeration of the sign-flip
// distribution when n_effective <= exact_max_n, otherwise the tie-corrected
// normal approximation with continuity correction.
// Errors: InvalidArgument (length mismatch), AllZeroDifferences, TooFewPairs.
TestResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                std::size_t exact_max_n = kExactMaxPairs);

// Exact two-sided p for the given signed ranks; ranks must be multiples of 0.5.
double exact_p_value(const SignedRanks& sr);
double normal_p_value(const SignedRanks& sr);

// (R+ - R-) / (R+ + R-). Errors: InvalidArgument, AllZeroDifferences.
double rank_biserial(std::span<const double> a, std::span<const double> b);

// Errors: InvalidArgument when alpha is outside (0, 1) or m == 0.
double bonferroni_alpha(double alpha, std::size_t m);

// Unweighted task-load index over the five dimensions below.
inline constexpr std::array<std::string_view, 5> kTlxDimensions = {
    "Mental Demand", "Temporal Demand", "Performance", "Effort", "Frustration"};

// Maps spelling variants ("mental_demand", "MentalDemand") onto the
// canonical dimension name; nullopt if not a task-load dimension.
std::optional<std::string> canonical_tlx_dimension(std::string_view name);

// Errors: MissingDimension.
double tlx_workload(const std::map<std::string, double>& ratings_by_dimension);

// Paired ordinal ratings of two systems by the same participants on the
// same items, on a declared scale.
struct RatingsTable {
  std::string system_a;
  std::string system_b;
  double scale_min = 0.0;
  double scale_max = 10.0;
  std::vector<std::string> participants;  // first-seen order
  std::vector<std::string> items;  // natural order ("S-2" before "S-10")
  // (participant, item) -> rating per system; absent keys are missing cells.
  std::map<std::pair<std::string, std::string>, double> a;
  std::map<std::pair<std::string, std::string>, double> b;

  struct MissingCell {
    std::string participant;
    std::string item;
    std::string system;
  };
  std::vector<MissingCell> missing_cells() const;
};

struct CsvOptions {
  std::optional<std::string> system_a;  // defaults to first system seen
  std::optional<std::string> system_b;
  double scale_min = 0.0;
  double scale_max = 10.0;
};

// Columns: participant,item,system,rating (header required).
// Errors: MalformedCsv (message carries the line number).
RatingsTable read_ratings_csv(std::istream& in, const CsvOptions& options = {});

bool natural_less(std::string_view a, std::string_view b);

struct Distribution {
  std::size_t n = 0;
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0, mean = 0;
};
Distribution summarize(std::vector<double> values);

struct ItemReport {
  std::string item;
  std::optional<TestResult> result;
  std::optional<Error> error;
  bool significant = false;
};

struct StudyReport {
  double alpha = 0.05;
  double alpha_corrected = 0.05;
  std::string system_a;
  std::string system_b;
  std::optional<TestResult> overall;
  std::optional<Error> overall_error;
  bool overall_significant = false;
  std::vector<ItemReport> per_item;
  std::vector<RatingsTable::MissingCell> missing;
  Distribution summary_a;
  Distribution summary_b;
  // Present when the items are exactly the task-load dimensions.
  std::optional<ItemReport> workload;
};

// Pooled test over all complete (participant, item) pairs plus one test per
// item against the Bonferroni-corrected alpha. Per-item failures are
// recorded, not thrown.
StudyReport analyze_study(const RatingsTable& table, double alpha = 0.05);

nlohmann::json to_json(const TestResult& r);
nlohmann::json to_json(const StudyReport& report);
std::string to_text(const StudyReport& report);

}  // namespace soundsearch::stats
