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

#include "commands.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "soundsearch/catalog.h"
#include "soundsearch/embedder.h"
#include "soundsearch/error.h"
#include "soundsearch/hnsw_index.h"
#include "soundsearch/mock_rng.h"
#include "soundsearch/query.h"
#include "soundsearch/search.h"
#include "soundsearch/service/config.h"
#include "soundsearch/service/http_server.h"
#include "soundsearch/service/search_service.h"
#include "soundsearch/stats.h"
#include "soundsearch/vector_store.h"

namespace soundsearch::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Validation failure detected after argument parsing; exits 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr std::size_t kExactThreshold = 10000;

std::string index_path_for(const std::string& store) { return store + ".hnsw"; }
std::string manifest_path_for(const std::string& store) { return store + ".manifest.jsonl"; }

std::uintmax_t file_bytes(const fs::path& p) {
  std::error_code ec;
  const auto n = fs::file_size(p, ec);
  return ec ? 0 : n;
}

std::unique_ptr<EmbedderClient> make_client(const std::string& endpoint, std::size_t dim,
                                            std::uint64_t mock_key) {
  if (!endpoint.empty()) return std::make_unique<RemoteEmbedder>(endpoint, dim);
  return std::make_unique<MockEmbedder>(dim, mock_key);
}

// ---------------------------------------------------------------- build

struct BuildArgs {
  std::string manifest;
  std::string vectors;
  std::string media_root;
  std::size_t synthetic = 0;
  std::size_t dim = kDefaultDim;
  std::uint64_t seed = 0;
  std::string out;
  bool no_index = false;
  bool allow_skips = false;
  bool progress = false;
  bool as_json = false;
  std::string endpoint;
  std::uint64_t mock_key = kDefaultMockKey;
  HnswParams hnsw;
};

int cmd_build(const BuildArgs& a, bool synthetic_given, std::ostream& out, std::ostream& err) {
  if (synthetic_given == !a.manifest.empty()) {
    throw UsageError("build needs exactly one of --manifest or --synthetic");
  }
  if (synthetic_given && a.synthetic == 0) throw UsageError("--synthetic must be positive");
  if (a.dim == 0) throw UsageError("--dim must be positive");
  if (!a.manifest.empty() && !fs::is_regular_file(a.manifest)) {
    throw UsageError("manifest not found: " + a.manifest);
  }
  if (!a.vectors.empty() && !fs::is_regular_file(a.vectors)) {
    throw UsageError("vector store not found: " + a.vectors);
  }

  const std::string manifest_out = manifest_path_for(a.out);
  const std::string index_out = index_path_for(a.out);
  std::string manifest_in = a.manifest;
  if (synthetic_given) {
    write_synthetic_manifest(manifest_out, a.synthetic, a.seed);
    manifest_in = manifest_out;
  }

  std::unique_ptr<EmbeddingSource> source;
  std::unique_ptr<EmbedderClient> client;
  if (synthetic_given) {
    source = std::make_unique<SyntheticEmbeddingSource>(a.seed, a.dim);
  } else if (!a.vectors.empty()) {
    source = std::make_unique<StoreEmbeddingSource>(load_store(a.vectors));
  } else {
    client = make_client(a.endpoint, a.dim, a.mock_key);
    const fs::path root = a.media_root.empty() ? fs::path(a.manifest).parent_path()
                                               : fs::path(a.media_root);
    source = std::make_unique<EmbedderEmbeddingSource>(*client, root);
  }

  IngestReport report;
  std::size_t count = 0, dim = 0;
  {
    IngestResult result = ingest_manifest(manifest_in, *source, a.out);
    report = result.report;
    count = result.store.count();
    dim = result.store.dim();
    if (!synthetic_given) write_manifest(result.catalog, manifest_out);
  }
  for (const IngestIssue& issue : report.skipped) {
    err << "line " << issue.line << ": " << (issue.clip_id.empty() ? "-" : issue.clip_id) << ": "
        << code_name(issue.code) << ": " << issue.message << '\n';
  }
  if (!report.skipped.empty() && !a.allow_skips) {
    std::error_code ec;
    fs::remove(a.out, ec);
    fs::remove(manifest_out, ec);
    err << "build failed: " << report.skipped.size()
        << " record(s) could not be ingested (pass --allow-skips to keep the rest)\n";
    return kExitRuntime;
  }

  if (!a.no_index) {
    const VectorStore store = load_store(a.out);
    HnswIndex::Progress progress;
    if (a.progress) {
      progress = [&err](std::size_t done, std::size_t total) {
        if (done % 100000 == 0 || done == total) {
          err << "indexed " << done << "/" << total << '\n' << std::flush;
        }
      };
    }
    if (store.count() > 0) HnswIndex::build(store, a.hnsw, progress).save(index_out);
  }

  const std::uintmax_t store_bytes = file_bytes(a.out);
  const std::uintmax_t index_bytes = a.no_index ? 0 : file_bytes(index_out);
  if (a.as_json) {
    json j = {{"store", a.out},
              {"count", count},
              {"dim", dim},
              {"store_bytes", store_bytes},
              {"index_bytes", index_bytes},
              {"skipped", report.skipped.size()},
              {"manifest", manifest_out}};
    if (!a.no_index) {
      j["index"] = index_out;
      j["ann_params"] = to_json(a.hnsw);
    }
    out << j.dump(2) << '\n';
  } else {
    out << "store   " << a.out << '\n'
        << "count   " << count << '\n'
        << "dim     " << dim << '\n'
        << "bytes   " << store_bytes << " (store)";
    if (!a.no_index) out << " + " << index_bytes << " (index)";
    out << '\n';
    if (!report.skipped.empty()) out << "skipped " << report.skipped.size() << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------- query

struct QueryArgs {
  std::string store;
  std::vector<std::string> texts;
  std::vector<std::string> clips;
  long long k = 10;
  bool dedup = false;
  double dedup_threshold = kDefaultDedupThreshold;
  bool exact = false;
  std::size_t ef = 0;
  std::string manifest;
  std::string endpoint;
  std::uint64_t mock_key = kDefaultMockKey;
  bool as_json = false;
};

int cmd_query(const QueryArgs& a, std::ostream& out) {
  if (a.k < 1) throw UsageError("-k must be at least 1");
  if (a.texts.empty() && a.clips.empty()) throw UsageError("query needs --text or --clip");
  if (!(a.dedup_threshold > 0.0 && a.dedup_threshold <= 1.0)) {
    throw UsageError("--dedup-threshold must be in (0, 1]");
  }
  if (!fs::is_regular_file(a.store)) throw UsageError("store not found: " + a.store);
  const VectorStore store = load_store(a.store);
  const auto k = static_cast<std::size_t>(a.k);

  Catalog catalog;
  const std::string manifest = a.manifest.empty() ? manifest_path_for(a.store) : a.manifest;
  if (fs::is_regular_file(manifest)) catalog = read_manifest(manifest);

  std::optional<HnswIndex> index;
  const std::string ipath = index_path_for(a.store);
  if (!a.exact && store.count() > kExactThreshold && fs::is_regular_file(ipath)) {
    index = HnswIndex::load(ipath, store);
  }

  const auto client = make_client(a.endpoint, store.dim(), a.mock_key);
  QueryParts parts;
  parts.texts = a.texts;
  parts.clip_ids = a.clips;
  const Embedding q = resolve_query(parts, *client, store);

  auto top = [&](std::size_t depth) {
    return index ? ann_top_k(*index, q, depth, AnnSearchParams{a.ef, false})
                 : exact_top_k(store, q, depth);
  };
  std::vector<SearchHit> hits;
  if (!a.dedup) {
    hits = top(std::min(k, store.count()));
  } else {
    std::size_t depth = std::min(store.count(), k);
    while (true) {
      hits = dedup_results(top(depth), store, a.dedup_threshold, k);
      if (hits.size() >= k || depth >= store.count()) break;
      depth = std::min(store.count(), depth * 2);
    }
  }

  if (a.as_json) {
    json rows = json::array();
    for (const SearchHit& h : hits) {
      json r = {{"rank", h.rank}, {"clip_id", h.clip_id}, {"score", h.score}};
      if (const AudioClip* c = catalog.find(h.clip_id); c && c->caption) r["caption"] = *c->caption;
      rows.push_back(std::move(r));
    }
    out << json{{"path", index ? "ann" : "exact"}, {"hits", rows}}.dump(2) << '\n';
    return kExitOk;
  }
  std::size_t id_width = 7;
  for (const SearchHit& h : hits) id_width = std::max(id_width, h.clip_id.size());
  char buf[64];
  out << std::left << std::setw(6) << "rank" << std::setw(static_cast<int>(id_width) + 2)
      << "clip_id" << std::setw(10) << "score" << "caption" << '\n';
  for (const SearchHit& h : hits) {
    std::snprintf(buf, sizeof(buf), "%.6f", h.score);
    const AudioClip* c = catalog.find(h.clip_id);
    out << std::left << std::setw(6) << h.rank << std::setw(static_cast<int>(id_width) + 2)
        << h.clip_id << std::setw(10) << buf << (c && c->caption ? *c->caption : "") << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  std::string store;
  std::size_t queries = 100;
  std::size_t k = 10;
  std::size_t ef = 0;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  bool skip_exact = false;
  bool as_json = false;
};

struct Percentiles {
  double p50 = 0, p90 = 0, p99 = 0, mean = 0;
};

// Linear interpolation between order statistics.
Percentiles percentiles(std::vector<double> v) {
  Percentiles p;
  if (v.empty()) return p;
  std::sort(v.begin(), v.end());
  auto at = [&](double q) {
    const double h = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(h);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  p.p50 = at(0.50);
  p.p90 = std::max(p.p50, at(0.90));
  p.p99 = std::max(p.p90, at(0.99));
  double sum = 0;
  for (double x : v) sum += x;
  p.mean = sum / static_cast<double>(v.size());
  return p;
}

json to_json(const Percentiles& p) {
  return {{"p50_ms", p.p50}, {"p90_ms", p.p90}, {"p99_ms", p.p99}, {"mean_ms", p.mean}};
}

std::string hardware_note() {
  std::string model;
  std::ifstream in("/proc/cpuinfo");
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("model name", 0) == 0) {
      model = line.substr(line.find(':') + 2);
      break;
    }
  }
  std::ostringstream s;
  s << std::thread::hardware_concurrency() << " hardware threads";
  if (!model.empty()) s << ", " << model;
  return s.str();
}

// Query i of a seeded bench run.
Embedding bench_query(std::uint64_t seed, std::size_t i, std::size_t dim) {
  return Embedding(seeded_unit_vector(keyed_hash(seed, "query", std::to_string(i)), dim));
}

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  if (a.queries == 0) throw UsageError("--queries must be positive");
  if (a.k == 0) throw UsageError("-k must be positive");
  if (a.threads == 0) throw UsageError("--threads must be positive");
  if (!fs::is_regular_file(a.store)) throw UsageError("store not found: " + a.store);
  const std::string ipath = index_path_for(a.store);
  if (!fs::is_regular_file(ipath)) {
    err << "bench: ANN index missing: " << ipath << " (run build without --no-index)\n";
    return kExitRuntime;
  }
  const VectorStore store = load_store(a.store);
  const HnswIndex index = HnswIndex::load(ipath, store);
  const std::size_t k = std::min(a.k, store.count());
  const AnnSearchParams sp{a.ef, false};

  std::vector<double> ann_ms(a.queries), exact_ms(a.queries), recall(a.queries);
  auto worker = [&](std::size_t t) {
    for (std::size_t i = t; i < a.queries; i += a.threads) {
      const Embedding q = bench_query(a.seed, i, store.dim());
      auto t0 = std::chrono::steady_clock::now();
      const auto approx = ann_top_k(index, q, k, sp);
      auto t1 = std::chrono::steady_clock::now();
      ann_ms[i] = std::chrono::duration<double, std::milli>(t1 - t0).count();
      if (a.skip_exact) continue;
      t0 = std::chrono::steady_clock::now();
      const auto truth = exact_top_k(store, q, k);
      t1 = std::chrono::steady_clock::now();
      exact_ms[i] = std::chrono::duration<double, std::milli>(t1 - t0).count();
      std::size_t found = 0;
      for (const SearchHit& h : approx) {
        found += std::any_of(truth.begin(), truth.end(),
                             [&](const SearchHit& e) { return e.clip_id == h.clip_id; });
      }
      recall[i] = static_cast<double>(found) / static_cast<double>(truth.size());
    }
  };
  // One untimed query warms the page cache and the visited-set buffers.
  (void)ann_top_k(index, bench_query(a.seed, a.queries, store.dim()), k, sp);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < a.threads; ++t) pool.emplace_back(worker, t);
  worker(0);
  for (auto& th : pool) th.join();

  const Percentiles ann = percentiles(ann_ms);
  const Percentiles exact = percentiles(exact_ms);
  double mean_recall = 0;
  for (double r : recall) mean_recall += r;
  mean_recall /= static_cast<double>(a.queries);
  const std::size_t ef_used = std::max(k, a.ef ? a.ef : index.params().ef_search);

  json j = {{"corpus_size", store.count()},
            {"dim", store.dim()},
            {"k", k},
            {"query_count", a.queries},
            {"threads", a.threads},
            {"seed", a.seed},
            {"ann", to_json(ann)},
            {"ann_params", to_json(index.params())},
            {"ef", ef_used},
            {"hardware", hardware_note()}};
  j["ann_params"]["ef"] = ef_used;
  if (!a.skip_exact) {
    j["exact"] = to_json(exact);
    j["recall_at_k"] = mean_recall;
  } else {
    j["exact"] = nullptr;
    j["recall_at_k"] = nullptr;
  }
  if (a.as_json) {
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  out << "corpus " << store.count() << " x " << store.dim() << ", k=" << k << ", " << a.queries
      << " queries, ef=" << ef_used << ", threads=" << a.threads << '\n'
      << "hardware: " << hardware_note() << '\n';
  out << std::fixed << std::setprecision(3);
  out << std::left << std::setw(8) << "path" << std::right << std::setw(10) << "p50_ms"
      << std::setw(10) << "p90_ms" << std::setw(10) << "p99_ms" << std::setw(10) << "mean_ms"
      << '\n';
  auto row = [&](const char* name, const Percentiles& p) {
    out << std::left << std::setw(8) << name << std::right << std::setw(10) << p.p50
        << std::setw(10) << p.p90 << std::setw(10) << p.p99 << std::setw(10) << p.mean << '\n';
  };
  row("ann", ann);
  if (!a.skip_exact) {
    row("exact", exact);
    out << std::setprecision(4) << "recall@" << k << " " << mean_recall << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------- stats

struct StatsArgs {
  std::string csv;
  double alpha = 0.05;
  std::string system_a;
  std::string system_b;
  double scale_min = 0.0;
  double scale_max = 10.0;
  bool as_json = false;
};

int cmd_stats(const StatsArgs& a, std::ostream& out) {
  std::ifstream in(a.csv);
  if (!in) throw UsageError("cannot open ratings file: " + a.csv);
  stats::CsvOptions opt;
  if (!a.system_a.empty()) opt.system_a = a.system_a;
  if (!a.system_b.empty()) opt.system_b = a.system_b;
  opt.scale_min = a.scale_min;
  opt.scale_max = a.scale_max;
  const stats::RatingsTable table = stats::read_ratings_csv(in, opt);
  const stats::StudyReport report = stats::analyze_study(table, a.alpha);
  if (a.as_json) {
    out << stats::to_json(report).dump(2) << '\n';
  } else {
    out << stats::to_text(report);
  }
  return kExitOk;
}

// ---------------------------------------------------------------- serve

std::atomic<service::HttpServer*> g_server{nullptr};

extern "C" void on_signal(int) {
  if (auto* s = g_server.load()) s->stop();
}

int cmd_serve(const std::string& config_path, const std::string& bind, std::ostream& out,
              std::ostream& err) {
  if (!fs::is_regular_file(config_path)) throw UsageError("config not found: " + config_path);
  service::ServiceConfig config = service::load_config(config_path);
  if (!bind.empty()) {
    service::apply_env_overrides(config, [&](const std::string& name) -> std::optional<std::string> {
      if (name == "SOUNDSEARCH_BIND") return bind;
      return std::nullopt;
    });
  }
  std::shared_ptr<service::SearchService> svc = service::SearchService::from_config(config);
  service::HttpServer server(svc);
  const int port = server.bind(config.server.host, config.server.port);
  if (port < 0) {
    err << "serve: cannot bind " << config.server.host << ":" << config.server.port << '\n';
    return kExitRuntime;
  }
  out << "listening on http://" << config.server.host << ":" << port << " (";
  const json ds = svc->datasets();
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out << (i ? ", " : "") << ds[i]["name"].get<std::string>() << "=" << ds[i]["count"];
  }
  out << ")" << std::endl;
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  const bool ok = server.serve();
  g_server = nullptr;
  return ok ? kExitOk : kExitRuntime;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kEmbedderUnavailable:
      return kExitUnavailable;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kMalformedCsv:
    case ErrorCode::kEmptyQuery:
    case ErrorCode::kEmptyQueryText:
      return kExitUsage;
    default:
      return kExitRuntime;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Semantic sound-effect search: build stores, query, benchmark, analyze, serve",
               "soundsearch"};
  app.require_subcommand(1);

  BuildArgs ba;
  CLI::App* build = app.add_subcommand("build", "Build a vector store and ANN index");
  build->add_option("--manifest", ba.manifest, "JSON-lines clip manifest");
  build->add_option("--vectors", ba.vectors, "Precomputed store supplying vectors by clip id");
  build->add_option("--media-root", ba.media_root, "Base directory for relative media paths");
  CLI::Option* syn = build->add_option("--synthetic", ba.synthetic, "Generate N seeded clips");
  build->add_option("--dim", ba.dim, "Embedding dimension")->capture_default_str();
  build->add_option("--seed", ba.seed, "Synthetic generator seed")->capture_default_str();
  build->add_option("-o,--out", ba.out, "Output store path")->required();
  build->add_flag("--no-index", ba.no_index, "Skip the ANN index");
  build->add_flag("--allow-skips", ba.allow_skips, "Keep going when records are skipped");
  build->add_flag("--progress", ba.progress, "Report indexing progress on stderr");
  build->add_option("--embedder-endpoint", ba.endpoint, "Remote embedding service URL");
  build->add_option("--M", ba.hnsw.max_degree, "Graph degree on upper layers")->capture_default_str();
  build->add_option("--ef-construction", ba.hnsw.ef_construction, "Build beam width")
      ->capture_default_str();
  build->add_option("--ef-search", ba.hnsw.ef_search, "Default query beam width")
      ->capture_default_str();
  build->add_option("--index-seed", ba.hnsw.seed, "Level assignment seed")->capture_default_str();
  build->add_flag("--json", ba.as_json, "Print the summary as JSON");

  QueryArgs qa;
  CLI::App* query = app.add_subcommand("query", "Rank clips for a text and/or clip query");
  query->add_option("store", qa.store, "Store path")->required();
  query->add_option("--text", qa.texts, "Query text (repeatable)");
  query->add_option("--clip", qa.clips, "Seed clip id (repeatable)");
  query->add_option("-k", qa.k, "Results to print")->capture_default_str();
  query->add_flag("--dedup", qa.dedup, "Suppress near-duplicate results");
  query->add_option("--dedup-threshold", qa.dedup_threshold)->capture_default_str();
  query->add_flag("--exact", qa.exact, "Force the exhaustive path");
  query->add_option("--ef", qa.ef, "ANN beam width (0: index default)");
  query->add_option("--manifest", qa.manifest, "Manifest for captions");
  query->add_option("--embedder-endpoint", qa.endpoint, "Remote embedding service URL");
  query->add_flag("--json", qa.as_json, "Print JSON");

  BenchArgs bea;
  CLI::App* bench = app.add_subcommand("bench", "Latency and recall of ANN vs exact search");
  bench->add_option("store", bea.store, "Store path (index at <store>.hnsw)")->required();
  bench->add_option("--queries", bea.queries, "Seeded random queries")->capture_default_str();
  bench->add_option("-k,--k", bea.k, "Neighbours per query")->capture_default_str();
  bench->add_option("--ef", bea.ef, "ANN beam width (0: index default)");
  bench->add_option("--seed", bea.seed, "Query seed")->capture_default_str();
  bench->add_option("--threads", bea.threads, "Query workers")->capture_default_str();
  bench->add_flag("--skip-exact", bea.skip_exact, "Time only the ANN path");
  bench->add_flag("--json", bea.as_json, "Print JSON");

  StatsArgs sa;
  CLI::App* st = app.add_subcommand("stats", "Paired Wilcoxon analysis of a ratings CSV");
  st->add_option("ratings", sa.csv, "CSV with participant,item,system,rating")->required();
  st->add_option("--alpha", sa.alpha, "Family-wise significance level")->capture_default_str();
  st->add_option("--system-a", sa.system_a, "First system (default: first seen)");
  st->add_option("--system-b", sa.system_b, "Second system (default: second seen)");
  st->add_option("--scale-min", sa.scale_min)->capture_default_str();
  st->add_option("--scale-max", sa.scale_max)->capture_default_str();
  st->add_flag("--json", sa.as_json, "Print JSON");

  std::string config_path, bind;
  CLI::App* serve = app.add_subcommand("serve", "Run the HTTP search service");
  serve->add_option("config", config_path, "Service config (JSON)")->required();
  serve->add_option("--bind", bind, "host:port, overrides the config");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (build->parsed()) {
      if (build->count("--M") > 0) ba.hnsw.max_degree_base = 2 * ba.hnsw.max_degree;
      return cmd_build(ba, syn->count() > 0, out, err);
    }
    if (query->parsed()) return cmd_query(qa, out);
    if (bench->parsed()) return cmd_bench(bea, out, err);
    if (st->parsed()) return cmd_stats(sa, out);
    if (serve->parsed()) return cmd_serve(config_path, bind, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const EmbedderUnavailable& e) {
    err << "embedder unavailable: " << e.what() << '\n';
    return kExitUnavailable;
  } catch (const Error& e) {
    err << e.name() << ": " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace soundsearch::cli
