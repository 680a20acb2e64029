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

#include "soundsearch/stats.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace soundsearch::stats {

namespace {

void check_lengths(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kInvalidArgument, "paired samples differ in length: " +
                                                 std::to_string(a.size()) + " vs " +
                                                 std::to_string(b.size()));
  }
}

Error csv_error(std::size_t line, const std::string& what) {
  return Error(ErrorCode::kMalformedCsv, "line " + std::to_string(line) + ": " + what);
}

// Minimal RFC 4180 field splitter: commas, double-quoted fields, "" escapes.
std::optional<std::vector<std::string>> split_csv(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          fields.back() += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  if (quoted) return std::nullopt;
  for (auto& f : fields) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = (b == std::string::npos) ? std::string() : f.substr(b, e - b + 1);
  }
  return fields;
}

std::string normalize_dimension_key(std::string_view name) {
  std::string out;
  for (unsigned char c : name) {
    if (std::isalnum(c)) out += static_cast<char>(std::tolower(c));
  }
  return out;
}

double quantile_sorted(const std::vector<double>& v, double q) {
  // Linear interpolation between closest ranks (type 7).
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

ItemReport run_test(std::string item, const std::vector<double>& a, const std::vector<double>& b,
                    double threshold) {
  ItemReport rep;
  rep.item = std::move(item);
  try {
    rep.result = wilcoxon_signed_rank(a, b);
    rep.significant = rep.result->p_value < threshold;
  } catch (const Error& e) {
    rep.error = e;
  }
  return rep;
}

nlohmann::json item_json(const ItemReport& r) {
  nlohmann::json j;
  j["item"] = r.item;
  if (r.result) {
    j.update(to_json(*r.result));
    j["significant"] = r.significant;
  } else if (r.error) {
    j["error"] = {{"code", std::string(r.error->name())}, {"message", r.error->what()}};
    j["significant"] = false;
  }
  return j;
}

nlohmann::json distribution_json(const Distribution& d) {
  return {{"n", d.n},          {"min", d.min},   {"q1", d.q1},     {"median", d.median},
          {"q3", d.q3},        {"max", d.max},   {"mean", d.mean}};
}

}  // namespace

SignedRanks signed_ranks(std::span<const double> a, std::span<const double> b) {
  check_lengths(a, b);
  std::vector<double> diffs;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (!std::isfinite(d)) throw Error(ErrorCode::kInvalidArgument, "ratings must be finite");
    if (d != 0.0) diffs.push_back(d);
  }
  SignedRanks sr;
  const std::size_t n = diffs.size();
  sr.ranks.resize(n);
  sr.positive.resize(n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return std::abs(diffs[x]) < std::abs(diffs[y]);
  });
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]])) ++j;
    // Positions i..j (0-based) share the average of ranks i+1..j+1.
    const double avg = static_cast<double>(i + j + 2) / 2.0;
    for (std::size_t k = i; k <= j; ++k) sr.ranks[order[k]] = avg;
    if (j > i) sr.tie_sizes.push_back(j - i + 1);
    i = j + 1;
  }
  for (std::size_t i = 0; i < n; ++i) {
    sr.positive[i] = diffs[i] > 0.0;
    (sr.positive[i] ? sr.rank_sum_positive : sr.rank_sum_negative) += sr.ranks[i];
  }
  return sr;
}

double exact_p_value(const SignedRanks& sr) {
  // Doubled ranks are integers, so the sign-flip distribution of 2*R+ can be
  // counted exactly by subset-sum dynamic programming.
  const std::size_t n = sr.ranks.size();
  std::vector<std::uint64_t> doubled(n);
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    doubled[i] = static_cast<std::uint64_t>(std::llround(sr.ranks[i] * 2.0));
    total += doubled[i];
  }
  std::vector<std::uint64_t> ways(total + 1, 0);
  ways[0] = 1;
  std::uint64_t reach = 0;
  for (std::uint64_t r : doubled) {
    reach += r;
    for (std::uint64_t s = reach; s >= r; --s) {
      ways[s] += ways[s - r];
      if (s == r) break;
    }
  }
  const auto observed = static_cast<std::int64_t>(std::llround(sr.rank_sum_positive * 2.0));
  const auto center2 = static_cast<std::int64_t>(total);  // 2 * (2 * E[R+])
  const std::int64_t observed_dev = std::abs(2 * observed - center2);
  std::uint64_t extreme = 0;
  for (std::uint64_t s = 0; s <= total; ++s) {
    if (std::abs(2 * static_cast<std::int64_t>(s) - center2) >= observed_dev) extreme += ways[s];
  }
  return static_cast<double>(extreme) / std::ldexp(1.0, static_cast<int>(n));
}

double normal_p_value(const SignedRanks& sr) {
  const double n = static_cast<double>(sr.ranks.size());
  const double mean = n * (n + 1.0) / 4.0;
  double variance = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0;
  for (std::size_t t : sr.tie_sizes) {
    const double td = static_cast<double>(t);
    variance -= (td * td * td - td) / 48.0;
  }
  if (!(variance > 0.0)) return 1.0;
  const double dev = std::max(0.0, std::abs(sr.rank_sum_positive - mean) - 0.5);
  const double z = dev / std::sqrt(variance);
  return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

TestResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                std::size_t exact_max_n) {
  const SignedRanks sr = signed_ranks(a, b);
  const std::size_t n = sr.ranks.size();
  if (n == 0) throw Error(ErrorCode::kAllZeroDifferences, "all paired differences are zero");
  if (n < 3) {
    throw Error(ErrorCode::kTooFewPairs,
                "need at least 3 nonzero differences, got " + std::to_string(n));
  }
  TestResult r;
  r.n_effective = n;
  r.rank_sum_positive = sr.rank_sum_positive;
  r.rank_sum_negative = sr.rank_sum_negative;
  r.statistic = std::min(sr.rank_sum_positive, sr.rank_sum_negative);
  r.effect_size_r = (sr.rank_sum_positive - sr.rank_sum_negative) /
                    (sr.rank_sum_positive + sr.rank_sum_negative);
  if (n <= exact_max_n) {
    r.method = PValueMethod::kExact;
    r.p_value = exact_p_value(sr);
  } else {
    r.method = PValueMethod::kNormalApproximation;
    r.p_value = normal_p_value(sr);
  }
  return r;
}

double rank_biserial(std::span<const double> a, std::span<const double> b) {
  const SignedRanks sr = signed_ranks(a, b);
  if (sr.ranks.empty()) {
    throw Error(ErrorCode::kAllZeroDifferences, "all paired differences are zero");
  }
  return (sr.rank_sum_positive - sr.rank_sum_negative) /
         (sr.rank_sum_positive + sr.rank_sum_negative);
}

double bonferroni_alpha(double alpha, std::size_t m) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must be in (0, 1)");
  }
  if (m == 0) throw Error(ErrorCode::kInvalidArgument, "number of comparisons must be >= 1");
  return alpha / static_cast<double>(m);
}

std::optional<std::string> canonical_tlx_dimension(std::string_view name) {
  const std::string key = normalize_dimension_key(name);
  for (std::string_view dim : kTlxDimensions) {
    if (normalize_dimension_key(dim) == key) return std::string(dim);
  }
  return std::nullopt;
}

double tlx_workload(const std::map<std::string, double>& ratings_by_dimension) {
  std::map<std::string, double> canonical;
  for (const auto& [name, value] : ratings_by_dimension) {
    if (auto dim = canonical_tlx_dimension(name)) canonical[*dim] = value;
  }
  double sum = 0.0;
  for (std::string_view dim : kTlxDimensions) {
    auto it = canonical.find(std::string(dim));
    if (it == canonical.end()) {
      throw Error(ErrorCode::kMissingDimension, "missing task-load dimension: " + std::string(dim));
    }
    sum += it->second;
  }
  return sum / static_cast<double>(kTlxDimensions.size());
}

bool natural_less(std::string_view a, std::string_view b) {
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    const bool da = std::isdigit(static_cast<unsigned char>(a[i])) != 0;
    const bool db = std::isdigit(static_cast<unsigned char>(b[j])) != 0;
    if (da && db) {
      std::size_t ei = i;
      std::size_t ej = j;
      while (ei < a.size() && std::isdigit(static_cast<unsigned char>(a[ei]))) ++ei;
      while (ej < b.size() && std::isdigit(static_cast<unsigned char>(b[ej]))) ++ej;
      std::string_view na = a.substr(i, ei - i);
      std::string_view nb = b.substr(j, ej - j);
      while (na.size() > 1 && na.front() == '0') na.remove_prefix(1);
      while (nb.size() > 1 && nb.front() == '0') nb.remove_prefix(1);
      if (na.size() != nb.size()) return na.size() < nb.size();
      if (na != nb) return na < nb;
      i = ei;
      j = ej;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  if ((a.size() - i) != (b.size() - j)) return (a.size() - i) < (b.size() - j);
  return a < b;
}

std::vector<RatingsTable::MissingCell> RatingsTable::missing_cells() const {
  std::vector<MissingCell> out;
  for (const auto& p : participants) {
    for (const auto& item : items) {
      const auto key = std::make_pair(p, item);
      if (!a.contains(key)) out.push_back({p, item, system_a});
      if (!b.contains(key)) out.push_back({p, item, system_b});
    }
  }
  return out;
}

RatingsTable read_ratings_csv(std::istream& in, const CsvOptions& options) {
  if (!(options.scale_min < options.scale_max)) {
    throw Error(ErrorCode::kInvalidArgument, "rating scale must satisfy min < max");
  }
  RatingsTable t;
  t.scale_min = options.scale_min;
  t.scale_max = options.scale_max;

  struct Row {
    std::size_t line;
    std::string participant, item, system;
    double rating;
  };
  std::vector<Row> rows;
  std::vector<std::string> systems;
  std::set<std::string> participants_seen;
  std::set<std::string> items_seen;

  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fields = split_csv(line);
    if (!fields) throw csv_error(line_no, "unterminated quoted field");
    if (!header_seen) {
      header_seen = true;
      std::vector<std::string> lowered;
      for (auto f : *fields) {
        std::transform(f.begin(), f.end(), f.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        lowered.push_back(f);
      }
      const std::vector<std::string> expected = {"participant", "item", "system", "rating"};
      if (lowered != expected) {
        throw csv_error(line_no, "expected header participant,item,system,rating");
      }
      continue;
    }
    if (fields->size() != 4) {
      throw csv_error(line_no, "expected 4 fields, got " + std::to_string(fields->size()));
    }
    Row row{line_no, (*fields)[0], (*fields)[1], (*fields)[2], 0.0};
    if (row.participant.empty() || row.item.empty() || row.system.empty()) {
      throw csv_error(line_no, "participant, item and system must be nonempty");
    }
    try {
      std::size_t used = 0;
      row.rating = std::stod((*fields)[3], &used);
      if (used != (*fields)[3].size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw csv_error(line_no, "rating is not a number: '" + (*fields)[3] + "'");
    }
    if (!std::isfinite(row.rating) || row.rating < t.scale_min || row.rating > t.scale_max) {
      std::ostringstream msg;
      msg << "rating " << (*fields)[3] << " outside scale [" << t.scale_min << ", "
          << t.scale_max << "]";
      throw csv_error(line_no, msg.str());
    }
    if (std::find(systems.begin(), systems.end(), row.system) == systems.end()) {
      systems.push_back(row.system);
    }
    if (participants_seen.insert(row.participant).second) t.participants.push_back(row.participant);
    items_seen.insert(row.item);
    rows.push_back(std::move(row));
  }
  if (!header_seen) throw csv_error(line_no, "empty ratings file");

  t.system_a = options.system_a.value_or(systems.size() > 0 ? systems[0] : "");
  t.system_b = options.system_b.value_or(systems.size() > 1 ? systems[1] : "");
  if (!options.system_b && options.system_a && systems.size() == 2) {
    t.system_b = systems[0] == t.system_a ? systems[1] : systems[0];
  }
  if (systems.size() != 2 || t.system_a == t.system_b ||
      std::find(systems.begin(), systems.end(), t.system_a) == systems.end() ||
      std::find(systems.begin(), systems.end(), t.system_b) == systems.end()) {
    throw csv_error(line_no, "ratings must cover exactly two systems (found " +
                                 std::to_string(systems.size()) + ")");
  }

  for (const Row& row : rows) {
    auto& target = row.system == t.system_a ? t.a : t.b;
    if (!target.emplace(std::make_pair(row.participant, row.item), row.rating).second) {
      throw csv_error(row.line, "duplicate rating for participant " + row.participant +
                                    ", item " + row.item + ", system " + row.system);
    }
  }
  t.items.assign(items_seen.begin(), items_seen.end());
  std::sort(t.items.begin(), t.items.end(),
            [](const std::string& x, const std::string& y) { return natural_less(x, y); });
  return t;
}

Distribution summarize(std::vector<double> values) {
  Distribution d;
  d.n = values.size();
  if (values.empty()) return d;
  std::sort(values.begin(), values.end());
  d.min = values.front();
  d.max = values.back();
  d.q1 = quantile_sorted(values, 0.25);
  d.median = quantile_sorted(values, 0.5);
  d.q3 = quantile_sorted(values, 0.75);
  d.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  return d;
}

StudyReport analyze_study(const RatingsTable& table, double alpha) {
  StudyReport rep;
  rep.alpha = alpha;
  rep.alpha_corrected = bonferroni_alpha(alpha, std::max<std::size_t>(table.items.size(), 1));
  rep.system_a = table.system_a;
  rep.system_b = table.system_b;
  rep.missing = table.missing_cells();

  std::vector<double> pooled_a, pooled_b, all_a, all_b;
  for (const auto& [key, v] : table.a) all_a.push_back(v);
  for (const auto& [key, v] : table.b) all_b.push_back(v);
  rep.summary_a = summarize(all_a);
  rep.summary_b = summarize(all_b);

  for (const std::string& item : table.items) {
    std::vector<double> xa, xb;
    for (const std::string& p : table.participants) {
      const auto key = std::make_pair(p, item);
      auto ia = table.a.find(key);
      auto ib = table.b.find(key);
      if (ia == table.a.end() || ib == table.b.end()) continue;
      xa.push_back(ia->second);
      xb.push_back(ib->second);
    }
    pooled_a.insert(pooled_a.end(), xa.begin(), xa.end());
    pooled_b.insert(pooled_b.end(), xb.begin(), xb.end());
    rep.per_item.push_back(run_test(item, xa, xb, rep.alpha_corrected));
  }

  ItemReport overall = run_test("overall", pooled_a, pooled_b, alpha);
  rep.overall = overall.result;
  rep.overall_error = overall.error;
  rep.overall_significant = overall.significant;

  // Task-load tables also get the unweighted workload comparison.
  std::set<std::string> dims;
  for (const auto& item : table.items) {
    if (auto d = canonical_tlx_dimension(item)) dims.insert(*d);
  }
  if (dims.size() == kTlxDimensions.size() && table.items.size() == kTlxDimensions.size()) {
    std::vector<double> wa, wb;
    for (const std::string& p : table.participants) {
      std::map<std::string, double> ra, rb;
      for (const auto& item : table.items) {
        const auto key = std::make_pair(p, item);
        if (auto it = table.a.find(key); it != table.a.end()) ra[item] = it->second;
        if (auto it = table.b.find(key); it != table.b.end()) rb[item] = it->second;
      }
      try {
        const double x = tlx_workload(ra);
        const double y = tlx_workload(rb);
        wa.push_back(x);
        wb.push_back(y);
      } catch (const Error&) {
        // Incomplete participants already appear in `missing`.
      }
    }
    rep.workload = run_test("Workload", wa, wb, alpha);
  }
  return rep;
}

nlohmann::json to_json(const TestResult& r) {
  return {{"W", r.statistic},
          {"p", r.p_value},
          {"r", r.effect_size_r},
          {"n", r.n_effective},
          {"method", r.method == PValueMethod::kExact ? "exact" : "normal-approximation"}};
}

nlohmann::json to_json(const StudyReport& report) {
  nlohmann::json j;
  j["alpha"] = report.alpha;
  j["alpha_corrected"] = report.alpha_corrected;
  j["systems"] = {{"a", report.system_a}, {"b", report.system_b}};
  if (report.overall) {
    j["overall"] = to_json(*report.overall);
    j["overall"]["significant"] = report.overall_significant;
  } else if (report.overall_error) {
    j["overall"] = {{"error",
                     {{"code", std::string(report.overall_error->name())},
                      {"message", report.overall_error->what()}}}};
  }
  j["per_item"] = nlohmann::json::array();
  for (const auto& item : report.per_item) j["per_item"].push_back(item_json(item));
  j["missing"] = nlohmann::json::array();
  for (const auto& m : report.missing) {
    j["missing"].push_back({{"participant", m.participant}, {"item", m.item}, {"system", m.system}});
  }
  j["summary"] = {{"a", distribution_json(report.summary_a)},
                  {"b", distribution_json(report.summary_b)}};
  if (report.workload) j["workload"] = item_json(*report.workload);
  return j;
}

std::string to_text(const StudyReport& report) {
  std::ostringstream s;
  s << std::fixed;
  s << "systems: a=" << report.system_a << " b=" << report.system_b << "\n";
  s << "alpha " << std::setprecision(4) << report.alpha << ", Bonferroni-corrected alpha "
    << std::setprecision(4) << report.alpha_corrected << " (" << report.per_item.size()
    << " items)\n";
  auto line = [&](const ItemReport& r) {
    s << "  " << std::left << std::setw(18) << r.item << std::right;
    if (r.result) {
      s << " W=" << std::setprecision(1) << std::setw(7) << r.result->statistic
        << "  p=" << std::setprecision(6) << std::setw(9) << r.result->p_value
        << "  r=" << std::setprecision(3) << std::setw(6) << r.result->effect_size_r
        << "  n=" << r.result->n_effective << (r.significant ? "  *" : "");
    } else if (r.error) {
      s << " " << r.error->name() << ": " << r.error->what();
    }
    s << "\n";
  };
  s << "overall:\n";
  ItemReport overall{"overall", report.overall, report.overall_error, report.overall_significant};
  line(overall);
  s << "per item:\n";
  for (const auto& r : report.per_item) line(r);
  if (report.workload) {
    s << "task load:\n";
    line(*report.workload);
  }
  auto dist = [&](const std::string& name, const Distribution& d) {
    s << "  " << name << ": n=" << d.n << std::setprecision(2) << " min=" << d.min
      << " q1=" << d.q1 << " median=" << d.median << " q3=" << d.q3 << " max=" << d.max
      << " mean=" << d.mean << "\n";
  };
  s << "rating distribution:\n";
  dist(report.system_a, report.summary_a);
  dist(report.system_b, report.summary_b);
  if (!report.missing.empty()) s << "missing cells: " << report.missing.size() << "\n";
  return s.str();
}

}  // namespace soundsearch::stats
