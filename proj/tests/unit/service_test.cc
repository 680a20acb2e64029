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

#include <atomic>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <thread>
#include <vector>

#include <gtest/gtest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "soundsearch/embedder.h"
#include "soundsearch/hnsw_index.h"
#include "soundsearch/query.h"
#include "soundsearch/service/config.h"
#include "soundsearch/service/http_server.h"
#include "soundsearch/service/search_service.h"
#include "soundsearch/service/upload_stage.h"
#include "test_support.h"

namespace soundsearch::service {
namespace {

using nlohmann::json;
using test_support::make_wav;
using test_support::TempDir;

constexpr std::size_t kDim = 32;

// Steady clock the test can advance.
struct FakeClock {
  std::shared_ptr<std::atomic<long long>> ms = std::make_shared<std::atomic<long long>>(0);
  Clock clock() const {
    auto p = ms;
    return [p] { return std::chrono::steady_clock::time_point(std::chrono::milliseconds(p->load())); };
  }
  void advance(std::chrono::milliseconds d) const { *ms += d.count(); }
};

template <typename Fn>
::testing::AssertionResult api_error(Fn&& fn, int status, const std::string& code) {
  try {
    fn();
  } catch (const ApiError& e) {
    if (e.status() == status && e.code() == code) return ::testing::AssertionSuccess();
    return ::testing::AssertionFailure() << "got " << e.status() << " " << e.code() << ": " << e.what();
  }
  return ::testing::AssertionFailure() << "no ApiError, expected " << status << " " << code;
}

ServiceConfig base_config() {
  ServiceConfig c;
  c.embedder.dim = kDim;
  return c;
}

Dataset fixture_dataset(const test_support::FixtureCorpus& f, const std::string& name,
                        std::shared_ptr<const HnswIndex> index = nullptr) {
  Dataset ds;
  ds.name = name;
  ds.store = f.store;
  ds.catalog = f.catalog;
  ds.media_root = f.store_path.parent_path();
  ds.index = std::move(index);
  return ds;
}

std::vector<std::string> ids_of(const json& page) {
  std::vector<std::string> out;
  for (const auto& h : page["hits"]) out.push_back(h["clip_id"]);
  return out;
}

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    corpus_ = test_support::make_fixture_corpus(dir_.path(), 120, kDim);
    std::vector<Dataset> ds;
    ds.push_back(fixture_dataset(corpus_, "fixture"));
    svc_ = std::make_shared<SearchService>(base_config(), std::move(ds),
                                           std::make_shared<MockEmbedder>(kDim), clock_.clock());
  }
  TempDir dir_;
  test_support::FixtureCorpus corpus_;
  FakeClock clock_;
  std::shared_ptr<SearchService> svc_;
};

TEST_F(ServiceTest, TextSearchReturnsRankedPage) {
  const json page = svc_->search({{"texts", {"distant bells"}}, {"k", 20}});
  ASSERT_EQ(page["hits"].size(), 20u);
  double prev = 2.0;
  for (std::size_t i = 0; i < 20; ++i) {
    const auto& h = page["hits"][i];
    EXPECT_EQ(h["rank"], i + 1);
    EXPECT_LE(h["score"].get<double>(), prev);
    prev = h["score"];
    EXPECT_TRUE(h.contains("caption"));
    EXPECT_EQ(h["audio_url"], "/api/clip/" + h["clip_id"].get<std::string>() + "/audio?dataset=fixture");
  }
  EXPECT_TRUE(page["next_cursor"].is_string());
  EXPECT_GE(page["latency_ms"].get<double>(), 0.0);
  EXPECT_EQ(page["query_echo"]["texts"][0], "distant bells");
  EXPECT_EQ(page["query_echo"]["dataset"], "fixture");
}

TEST_F(ServiceTest, DefaultsAndReproducibility) {
  const json a = svc_->search({{"texts", {"rain"}}});
  EXPECT_EQ(a["hits"].size(), 20u);
  const json b = svc_->search({{"texts", {"rain"}}});
  EXPECT_EQ(a["hits"], b["hits"]);
  const json c = svc_->search({{"texts", {"rain"}}, {"cursor", a["next_cursor"]}});
  const json d = svc_->search({{"texts", {"rain"}}, {"cursor", a["next_cursor"]}});
  EXPECT_EQ(c["hits"], d["hits"]);
}

TEST_F(ServiceTest, MatchesInProcessComposition) {
  const json page = svc_->search({{"texts", {"jazz piano"}}, {"seed_clip_ids", {"c1"}}, {"k", 15}});
  const MockEmbedder m(kDim);
  QueryParts parts;
  parts.texts = {"jazz piano"};
  parts.clip_ids = {"c1"};
  const auto want = exact_top_k(corpus_.store, resolve_query(parts, m, corpus_.store), 15);
  ASSERT_EQ(page["hits"].size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    EXPECT_EQ(page["hits"][i]["clip_id"], want[i].clip_id);
    EXPECT_DOUBLE_EQ(page["hits"][i]["score"].get<double>(), want[i].score);
  }
}

TEST_F(ServiceTest, SimilarExcludesSeed) {
  const json page = svc_->similar("c1", std::string("30"), std::nullopt, std::nullopt, std::nullopt);
  const auto ids = ids_of(page);
  ASSERT_EQ(ids.size(), 30u);
  EXPECT_EQ(std::count(ids.begin(), ids.end(), "c1"), 0);
  // Equals the seed's own ranking with the seed removed.
  const auto full = search_similar(corpus_.store, "c1", 31);
  ASSERT_EQ(full[0].clip_id, "c1");
  for (std::size_t i = 0; i < 30; ++i) EXPECT_EQ(ids[i], full[i + 1].clip_id);
  EXPECT_EQ(page["hits"][0]["rank"], 1);
}

TEST_F(ServiceTest, SimilarPagingAndErrors) {
  std::vector<std::string> all;
  std::optional<std::string> cursor;
  do {
    const json page = svc_->similar("c9", std::string("25"), cursor, std::nullopt, std::nullopt);
    for (const auto& id : ids_of(page)) all.push_back(id);
    cursor = page["next_cursor"].is_null() ? std::nullopt
                                           : std::optional<std::string>(page["next_cursor"]);
  } while (cursor);
  EXPECT_EQ(all.size(), 119u);
  EXPECT_EQ(std::set<std::string>(all.begin(), all.end()).size(), 119u);
  EXPECT_TRUE(api_error([&] { svc_->similar("nope", {}, {}, {}, {}); }, 404, "UnknownClipId"));
  EXPECT_TRUE(api_error([&] { svc_->similar("c1", std::string("0"), {}, {}, {}); }, 400, "InvalidRequest"));
  EXPECT_TRUE(api_error([&] { svc_->similar("c1", std::string("x"), {}, {}, {}); }, 400, "InvalidRequest"));
  EXPECT_TRUE(api_error([&] { svc_->similar("c1", {}, {}, std::string("other"), {}); }, 404,
                        "UnknownDataset"));
  EXPECT_TRUE(api_error([&] { svc_->similar("c1", {}, {}, {}, std::string("maybe")); }, 400,
                        "InvalidRequest"));
}

std::vector<std::string> page_through(const SearchService& svc, json body, std::size_t k) {
  std::vector<std::string> all;
  body["k"] = k;
  for (int guard = 0; guard < 1000; ++guard) {
    const json page = svc.search(body);
    EXPECT_LE(page["hits"].size(), k);
    for (const auto& id : ids_of(page)) all.push_back(id);
    if (page["next_cursor"].is_null()) break;
    body["cursor"] = page["next_cursor"];
  }
  return all;
}

std::vector<std::string> single_shot(const SearchService& svc, const json& body, std::size_t depth) {
  const Dataset& ds = svc.dataset("fixture");
  QueryParts parts;
  for (const auto& t : body.value("texts", json::array())) parts.texts.push_back(t);
  for (const auto& c : body.value("seed_clip_ids", json::array())) parts.clip_ids.push_back(c);
  const MockEmbedder m(kDim);
  std::vector<std::string> out;
  for (const auto& h : svc.ranked(ds, resolve_query(parts, m, ds.store), depth, body.value("dedup", false),
                                  nullptr)) {
    out.push_back(h.clip_id);
  }
  return out;
}

json random_body(std::mt19937_64& rng, const std::vector<std::pair<std::string, std::string>>& scripts,
                 std::size_t corpus) {
  json body = json::object();
  std::uniform_int_distribution<std::size_t> pick(0, scripts.size() - 1), clip(0, corpus - 1);
  std::bernoulli_distribution coin(0.5);
  body["texts"] = {scripts[pick(rng)].second};
  if (coin(rng)) body["seed_clip_ids"] = {test_support::clip_name(clip(rng))};
  if (coin(rng)) body["texts"].push_back(scripts[pick(rng)].second);
  body["dedup"] = coin(rng);
  return body;
}

TEST_F(ServiceTest, PagingCompletenessExactPath) {
  const auto scripts = test_support::search_scripts();
  std::mt19937_64 rng(81);
  std::uniform_int_distribution<std::size_t> kdist(1, 40);
  for (int q = 0; q < 50; ++q) {
    const json body = random_body(rng, scripts, 120);
    const std::size_t k = kdist(rng);
    const auto paged = page_through(*svc_, body, k);
    const auto once = single_shot(*svc_, body, 1000);
    EXPECT_EQ(paged, once) << body.dump() << " k=" << k;
    if (!body["dedup"].get<bool>()) EXPECT_EQ(paged.size(), 120u);
    EXPECT_EQ(std::set<std::string>(paged.begin(), paged.end()).size(), paged.size());
  }
}

TEST(ServicePaging, CompletenessAcrossAnnTiers) {
  TempDir dir;
  const auto corpus = test_support::make_fixture_corpus(dir.path(), 1500, kDim, 12);
  HnswParams hp;
  hp.ef_construction = 80;
  auto index = std::make_shared<const HnswIndex>(HnswIndex::build(corpus.store, hp));
  ServiceConfig cfg = base_config();
  cfg.search.exact_threshold = 100;  // force the graph path
  cfg.search.result_pool = 200;      // and several tiers
  cfg.search.ef_search = 64;
  std::vector<Dataset> ds;
  ds.push_back(fixture_dataset(corpus, "fixture", index));
  const SearchService svc(cfg, std::move(ds), std::make_shared<MockEmbedder>(kDim));

  const auto scripts = test_support::search_scripts();
  std::mt19937_64 rng(82);
  std::uniform_int_distribution<std::size_t> kdist(20, 200);
  for (int q = 0; q < 50; ++q) {
    json body = random_body(rng, scripts, 1500);
    const std::size_t k = kdist(rng);
    // Page far enough to cross at least two tier boundaries, then compare
    // against one deep request.
    std::vector<std::string> paged;
    body["k"] = k;
    while (paged.size() < 700) {
      const json page = svc.search(body);
      for (const auto& id : ids_of(page)) paged.push_back(id);
      if (page["next_cursor"].is_null()) break;
      body["cursor"] = page["next_cursor"];
    }
    body.erase("cursor");
    const auto once = single_shot(svc, body, paged.size());
    EXPECT_EQ(paged, once) << "query " << q << " k=" << k;
    EXPECT_EQ(std::set<std::string>(paged.begin(), paged.end()).size(), paged.size());
  }
}

TEST_F(ServiceTest, CursorValidation) {
  const json first = svc_->search({{"texts", {"rain"}}, {"k", 5}});
  const std::string cursor = first["next_cursor"];
  EXPECT_EQ(cursor.size(), 32u);
  EXPECT_TRUE(api_error([&] { svc_->search({{"texts", {"thunder"}}, {"cursor", cursor}}); }, 400,
                        "CursorMismatch"));
  EXPECT_TRUE(api_error([&] { svc_->search({{"texts", {"rain"}}, {"cursor", "zz"}}); }, 400,
                        "InvalidCursor"));
  EXPECT_TRUE(api_error(
      [&] { svc_->search({{"texts", {"rain"}}, {"cursor", std::string(32, 'g')}}); }, 400,
      "InvalidCursor"));
  // A cursor survives a change of page size.
  const json next = svc_->search({{"texts", {"rain"}}, {"k", 9}, {"cursor", cursor}});
  EXPECT_EQ(next["hits"][0]["rank"], 6);
  // Round trip of the codec.
  EXPECT_EQ(decode_cursor(encode_cursor(0xabcdefULL, 77), 0xabcdefULL), 77u);
}

TEST_F(ServiceTest, CursorGoesStaleWhenStoreChanges) {
  const json first = svc_->search({{"texts", {"rain"}}, {"k", 5}});
  TempDir other_dir;
  const auto other = test_support::make_fixture_corpus(other_dir.path(), 120, kDim, 99);
  std::vector<Dataset> ds;
  ds.push_back(fixture_dataset(other, "fixture"));
  const SearchService reloaded(base_config(), std::move(ds), std::make_shared<MockEmbedder>(kDim));
  EXPECT_TRUE(api_error(
      [&] { reloaded.search({{"texts", {"rain"}}, {"cursor", first["next_cursor"]}}); }, 400,
      "CursorMismatch"));
}

TEST_F(ServiceTest, RequestValidation) {
  EXPECT_TRUE(api_error([&] { svc_->search({{"texts", json::array()}, {"seed_clip_ids", json::array()}}); },
                        400, "EmptyQuery"));
  EXPECT_TRUE(api_error([&] { svc_->search(json::object()); }, 400, "EmptyQuery"));
  EXPECT_TRUE(api_error([&] { svc_->search({{"texts", {"   "}}}); }, 400, "EmptyQuery"));
  EXPECT_TRUE(api_error([&] { svc_->search({{"texts", "rain"}}); }, 400, "InvalidRequest"));
  EXPECT_TRUE(api_error([&] { svc_->search({{"texts", {"rain"}}, {"k", 0}}); }, 400, "InvalidRequest"));
  EXPECT_TRUE(api_error([&] { svc_->search({{"texts", {"rain"}}, {"k", 201}}); }, 400, "InvalidRequest"));
  EXPECT_TRUE(api_error([&] { svc_->search({{"texts", {"rain"}}, {"k", 2.5}}); }, 400, "InvalidRequest"));
  EXPECT_TRUE(api_error([&] { svc_->search({{"texts", {"rain"}}, {"dedup", "yes"}}); }, 400,
                        "InvalidRequest"));
  EXPECT_TRUE(api_error([&] { svc_->search(json::array()); }, 400, "InvalidRequest"));
  EXPECT_TRUE(api_error([&] { svc_->search({{"seed_clip_ids", {"nope"}}}); }, 404, "UnknownClipId"));
  EXPECT_TRUE(api_error([&] { svc_->search({{"texts", {"rain"}}, {"dataset", "x"}}); }, 404,
                        "UnknownDataset"));
  EXPECT_TRUE(api_error([&] { svc_->search({{"upload_refs", {"up_missing"}}}); }, 404, "UnknownUpload"));
  // Antipodal parts cancel.
  const std::vector<float> row(corpus_.store.row(0).begin(), corpus_.store.row(0).end());
  std::vector<float> neg(row);
  for (float& x : neg) x = -x;
  std::vector<float> rows(row);
  rows.insert(rows.end(), neg.begin(), neg.end());
  std::vector<Dataset> ds(1);
  ds[0].name = "pm";
  ds[0].store = VectorStore::from_rows(kDim, rows, {"p", "m"});
  const SearchService pm(base_config(), std::move(ds), std::make_shared<MockEmbedder>(kDim));
  EXPECT_TRUE(api_error([&] { pm.search({{"seed_clip_ids", {"p", "m"}}}); }, 400, "ZeroVector"));
}

TEST_F(ServiceTest, UploadRoundTripAndExpiry) {
  const auto wav = make_wav(500);
  const json up = svc_->upload(wav, "audio/wav");
  const std::string ref = up["upload_ref"];
  EXPECT_EQ(up["media"], "wav");
  EXPECT_EQ(up["bytes"], wav.size());
  const json page = svc_->search({{"upload_refs", {ref}}, {"k", 5}});
  const auto want = exact_top_k(corpus_.store, embed_audio(MockEmbedder(kDim), wav, "wav"), 5);
  EXPECT_EQ(ids_of(page)[0], want[0].clip_id);
  // Combined with text in one fused query.
  const json both = svc_->search({{"upload_refs", {ref}}, {"texts", {"rain"}}, {"k", 5}});
  EXPECT_EQ(both["hits"].size(), 5u);

  clock_.advance(std::chrono::seconds(3601));
  EXPECT_TRUE(api_error([&] { svc_->search({{"upload_refs", {ref}}}); }, 404, "UploadExpired"));
}

TEST_F(ServiceTest, UploadValidation) {
  EXPECT_TRUE(api_error([&] { svc_->upload({}, "audio/wav"); }, 400, "EmptyPayload"));
  const std::vector<unsigned char> junk(64, 'x');
  EXPECT_TRUE(api_error([&] { svc_->upload(junk, "audio/wav"); }, 415, "UnsupportedMedia"));
  EXPECT_TRUE(api_error([&] { svc_->upload(junk, ""); }, 415, "UnsupportedMedia"));
  EXPECT_TRUE(api_error([&] { svc_->upload(make_wav(10), "text/plain"); }, 415, "UnsupportedMedia"));
  EXPECT_EQ(svc_->upload(make_wav(10), "application/octet-stream")["media"], "wav");
  EXPECT_EQ(svc_->upload(make_wav(10), "")["media"], "wav");

  ServiceConfig small = base_config();
  small.server.upload_cap_bytes = 100;
  SearchService capped(small, {}, std::make_shared<MockEmbedder>(kDim));
  EXPECT_TRUE(api_error([&] { capped.upload(make_wav(100), "audio/wav"); }, 413, "PayloadTooLarge"));
}

TEST(UploadStage, TokensExpireAndAreDistinct) {
  FakeClock clock;
  UploadStage stage(std::chrono::milliseconds(1000), clock.clock());
  const std::string a = stage.put({1, 2, 3}, "wav");
  const std::string b = stage.put({1, 2, 3}, "wav");
  EXPECT_NE(a, b);
  EXPECT_EQ(a.rfind("up_", 0), 0u);
  StagedUpload out;
  EXPECT_EQ(stage.get(a, &out), UploadStage::Status::kFound);
  EXPECT_EQ(out.bytes->size(), 3u);
  EXPECT_EQ(stage.live_count(), 2u);
  clock.advance(std::chrono::milliseconds(1001));
  EXPECT_EQ(stage.get(a, &out), UploadStage::Status::kExpired);
  stage.purge();
  EXPECT_EQ(stage.live_count(), 0u);
  EXPECT_EQ(stage.get(b, &out), UploadStage::Status::kExpired);
  EXPECT_EQ(stage.get("up_nothing", &out), UploadStage::Status::kUnknown);
}

TEST_F(ServiceTest, MediaAccess) {
  const MediaResponse full = svc_->clip_audio("c3", std::nullopt, std::nullopt);
  const auto bytes = test_support::read_bytes(corpus_.media_dir / "c3.wav");
  EXPECT_EQ(full.status, 200);
  EXPECT_EQ(full.content_type, "audio/wav");
  EXPECT_EQ(full.body, std::string(bytes.begin(), bytes.end()));
  const MediaResponse part = svc_->clip_audio("c3", std::string("fixture"), std::string("bytes=0-99"));
  EXPECT_EQ(part.status, 206);
  EXPECT_EQ(part.body.size(), 100u);
  EXPECT_EQ(part.range_end, 99u);
  EXPECT_EQ(part.body, std::string(bytes.begin(), bytes.begin() + 100));
  const MediaResponse tail = svc_->clip_audio("c3", std::nullopt, std::string("bytes=-10"));
  EXPECT_EQ(tail.body, std::string(bytes.end() - 10, bytes.end()));
  EXPECT_TRUE(api_error([&] { svc_->clip_audio("c3", {}, std::string("bytes=999999-")); }, 416,
                        "RangeNotSatisfiable"));
  EXPECT_TRUE(api_error([&] { svc_->clip_audio("zz", {}, {}); }, 404, "UnknownClipId"));
  std::filesystem::remove(corpus_.media_dir / "c4.wav");
  EXPECT_TRUE(api_error([&] { svc_->clip_audio("c4", {}, {}); }, 502, "MediaUnavailable"));
}

TEST(ServiceDatasets, MountsAndExperimentMode) {
  TempDir dir;
  const auto a = test_support::make_fixture_corpus(dir / "a", 30, kDim, 1);
  std::filesystem::create_directories(dir / "b");
  const auto b = test_support::make_fixture_corpus(dir / "b", 45, kDim, 2);
  const json cfg_json = {
      {"datasets",
       {{{"name", "alpha"}, {"store_path", "a/fixture.ssx"}, {"manifest_path", "a/fixture.ssx.manifest.jsonl"}},
        {{"name", "beta"}, {"store_path", "b/fixture.ssx"}, {"manifest_path", "b/fixture.ssx.manifest.jsonl"}}}},
      {"embedder", {{"mode", "mock"}, {"dim", kDim}}}};

  const auto two = SearchService::from_config(parse_config(cfg_json, dir.path()));
  const json list = two->datasets();
  ASSERT_EQ(list.size(), 2u);
  EXPECT_EQ(list[0], (json{{"name", "alpha"}, {"count", 30}, {"dim", kDim}}));
  EXPECT_EQ(list[1]["count"], 45);
  EXPECT_EQ(two->search({{"texts", {"rain"}}, {"dataset", "beta"}, {"k", 50}})["hits"].size(), 45u);
  // Media resolves relative to the manifest's directory by default.
  EXPECT_EQ(two->clip_audio("c1", std::string("beta"), {}).status, 200);

  json exp = cfg_json;
  exp["experiment"] = {{"dataset", "beta"}};
  const ServiceConfig exp_cfg = parse_config(exp, dir.path());
  EXPECT_EQ(mounted_datasets(exp_cfg).size(), 1u);
  const auto one = SearchService::from_config(exp_cfg);
  const json only = one->datasets();
  ASSERT_EQ(only.size(), 1u);
  EXPECT_EQ(only[0]["name"], "beta");
  EXPECT_TRUE(api_error([&] { one->search({{"texts", {"rain"}}, {"dataset", "alpha"}}); }, 404,
                        "UnknownDataset"));
  EXPECT_EQ(one->search({{"texts", {"rain"}}})["query_echo"]["dataset"], "beta");

  const SearchService none(base_config(), {}, std::make_shared<MockEmbedder>(kDim));
  EXPECT_EQ(none.datasets(), json::array());
  EXPECT_TRUE(api_error([&] { none.search({{"texts", {"rain"}}}); }, 404, "UnknownDataset"));
}

TEST(ServiceConfigTest, ParsesAndValidates) {
  const json j = {{"datasets", {{{"name", "main"}, {"store_path", "/data/s.ssx"}}}},
                  {"embedder", {{"mode", "remote"}, {"endpoint", "http://enc:9000"}, {"dim", 256}}},
                  {"search",
                   {{"default_k", 30},
                    {"dedup_default", true},
                    {"dedup_threshold", 0.95},
                    {"ann", {{"ef_search", 400}, {"result_pool", 2000}}}}},
                  {"server", {{"bind", "0.0.0.0:9090"}, {"upload_cap_bytes", 1024}, {"upload_ttl_s", 60}}}};
  const ServiceConfig c = parse_config(j, "/base");
  ASSERT_EQ(c.datasets.size(), 1u);
  EXPECT_EQ(c.datasets[0].index_path, "/data/s.ssx.hnsw");
  EXPECT_EQ(c.embedder.mode, "remote");
  EXPECT_EQ(c.embedder.dim, 256u);
  EXPECT_EQ(c.search.default_k, 30u);
  EXPECT_TRUE(c.search.dedup_default);
  EXPECT_EQ(c.search.dedup_threshold, 0.95);
  EXPECT_EQ(c.search.ef_search, 400u);
  EXPECT_EQ(c.search.result_pool, 2000u);
  EXPECT_EQ(c.server.host, "0.0.0.0");
  EXPECT_EQ(c.server.port, 9090);
  EXPECT_EQ(c.server.upload_cap_bytes, 1024u);
  EXPECT_FALSE(c.experiment_dataset.has_value());

  auto rejects = [](const json& bad) {
    return test_support::throws_code([&] { parse_config(bad, "/"); }, ErrorCode::kInvalidArgument);
  };
  EXPECT_TRUE(rejects({{"embedder", {{"mode", "magic"}}}}));
  EXPECT_TRUE(rejects({{"embedder", {{"mode", "remote"}}}}));
  EXPECT_TRUE(rejects({{"datasets", {{{"name", "x"}}}}}));
  EXPECT_TRUE(rejects({{"datasets", {{{"name", "x"}, {"store_path", "a"}}, {{"name", "x"}, {"store_path", "b"}}}}}));
  EXPECT_TRUE(rejects({{"experiment", {{"dataset", "ghost"}}}}));
  EXPECT_TRUE(rejects({{"server", {{"bind", "nohost"}}}}));
  EXPECT_TRUE(rejects({{"search", {{"default_k", 0}}}}));
  EXPECT_TRUE(rejects({{"search", {{"dedup_threshold", 1.5}}}}));
  EXPECT_TRUE(rejects(json::array()));
}

TEST(ServiceConfigTest, EnvironmentOverrides) {
  ServiceConfig c = parse_config(json::object(), "/");
  std::map<std::string, std::string> env{{"SOUNDSEARCH_BIND", "10.0.0.1:7000"},
                                         {"SOUNDSEARCH_EMBEDDER_ENDPOINT", "http://enc:1"}};
  apply_env_overrides(c, [&](const std::string& k) -> std::optional<std::string> {
    auto it = env.find(k);
    return it == env.end() ? std::nullopt : std::optional<std::string>(it->second);
  });
  EXPECT_EQ(c.server.host, "10.0.0.1");
  EXPECT_EQ(c.server.port, 7000);
  EXPECT_EQ(c.embedder.mode, "remote");
  EXPECT_EQ(c.embedder.endpoint, "http://enc:1");
}

TEST(ServiceConfigTest, LoadsFileWithComments) {
  TempDir dir;
  {
    std::ofstream out(dir / "c.json");
    out << "{\n  // local corpus\n  \"datasets\": [{\"name\": \"d\", \"store_path\": \"s.ssx\"}]\n}\n";
  }
  const ServiceConfig c = load_config(dir / "c.json", [](const std::string&) { return std::nullopt; });
  ASSERT_EQ(c.datasets.size(), 1u);
  EXPECT_EQ(c.datasets[0].store_path, dir / "s.ssx");
  EXPECT_TRUE(test_support::throws_code([&] { load_config(dir / "missing.json"); }, ErrorCode::kIoError));
}

// Live HTTP server over the fixture corpus.
class HttpTest : public ServiceTest {
 protected:
  void SetUp() override {
    ServiceTest::SetUp();
    server_ = std::make_unique<HttpServer>(svc_);
    port_ = server_->bind("127.0.0.1", 0);
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { server_->serve(); });
    server_->wait_until_ready();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }
  void TearDown() override {
    server_->stop();
    thread_.join();
  }
  static json body_of(const httplib::Result& r) { return json::parse(r->body); }
  void expect_golden(const httplib::Result& r, int status, const std::string& code) {
    ASSERT_TRUE(r) << httplib::to_string(r.error());
    EXPECT_EQ(r->status, status) << r->body;
    const json b = body_of(r);
    EXPECT_EQ(b["code"], code) << r->body;
    EXPECT_TRUE(b["message"].is_string());
    EXPECT_EQ(b.size(), 2u);
    EXPECT_EQ(r->get_header_value("Content-Type"), "application/json");
  }
  std::unique_ptr<HttpServer> server_;
  std::thread thread_;
  int port_ = 0;
  std::unique_ptr<httplib::Client> client_;
};

TEST_F(HttpTest, SearchOverHttp) {
  auto r = client_->Post("/api/search", R"({"texts":["distant bells"],"k":20})", "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(r->get_header_value("Access-Control-Allow-Origin"), "*");
  const json page = body_of(r);
  EXPECT_EQ(page["hits"].size(), 20u);
  EXPECT_EQ(page["hits"], svc_->search({{"texts", {"distant bells"}}, {"k", 20}})["hits"]);
}

TEST_F(HttpTest, ErrorTaxonomyGoldens) {
  expect_golden(client_->Post("/api/search", R"({"texts":[],"seed_clip_ids":[]})", "application/json"), 400,
                "EmptyQuery");
  expect_golden(client_->Post("/api/search", "{not json", "application/json"), 400, "InvalidRequest");
  expect_golden(client_->Post("/api/search", R"({"texts":["x"],"k":-3})", "application/json"), 400,
                "InvalidRequest");
  expect_golden(client_->Post("/api/search", R"({"texts":["x"],"cursor":"bogus"})", "application/json"), 400,
                "InvalidCursor");
  expect_golden(client_->Post("/api/search", R"({"upload_refs":["up_0"]})", "application/json"), 404,
                "UnknownUpload");
  expect_golden(client_->Post("/api/search", R"({"texts":["x"],"dataset":"nope"})", "application/json"), 404,
                "UnknownDataset");
  expect_golden(client_->Post("/api/upload", "", "audio/wav"), 400, "EmptyPayload");
  expect_golden(client_->Post("/api/upload", "plain words", "text/plain"), 415, "UnsupportedMedia");
  expect_golden(client_->Get("/api/similar/nope"), 404, "UnknownClipId");
  expect_golden(client_->Get("/api/similar/c1?k=abc"), 400, "InvalidRequest");
  expect_golden(client_->Get("/api/clip/nope/audio"), 404, "UnknownClipId");
  expect_golden(client_->Get("/api/nothing-here"), 404, "NotFound");
  std::filesystem::remove(corpus_.media_dir / "c5.wav");
  expect_golden(client_->Get("/api/clip/c5/audio"), 502, "MediaUnavailable");
  const std::string big(60u * 1024u * 1024u, 'x');
  expect_golden(client_->Post("/api/upload", big, "audio/wav"), 413, "PayloadTooLarge");
}

TEST_F(HttpTest, UploadThenSearch) {
  const auto wav = make_wav(400);
  auto up = client_->Post("/api/upload", std::string(wav.begin(), wav.end()), "audio/wav");
  ASSERT_TRUE(up);
  ASSERT_EQ(up->status, 200) << up->body;
  const std::string ref = body_of(up)["upload_ref"];
  auto r = client_->Post("/api/search", json{{"upload_refs", {ref}}, {"k", 3}}.dump(), "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(body_of(r)["hits"].size(), 3u);
}

TEST_F(HttpTest, SimilarAndDatasets) {
  auto r = client_->Get("/api/similar/c2?k=10&dedup=false");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  const json page = body_of(r);
  EXPECT_EQ(page["hits"].size(), 10u);
  for (const auto& h : page["hits"]) EXPECT_NE(h["clip_id"], "c2");
  auto next = client_->Get("/api/similar/c2?k=10&cursor=" + page["next_cursor"].get<std::string>());
  ASSERT_TRUE(next);
  EXPECT_EQ(body_of(next)["hits"][0]["rank"], 11);
  auto d = client_->Get("/api/datasets");
  ASSERT_TRUE(d);
  EXPECT_EQ(body_of(d), (json::array({{{"name", "fixture"}, {"count", 120}, {"dim", kDim}}})));
}

TEST_F(HttpTest, AudioStreamingWithRanges) {
  const auto bytes = test_support::read_bytes(corpus_.media_dir / "c7.wav");
  auto full = client_->Get("/api/clip/c7/audio");
  ASSERT_TRUE(full);
  EXPECT_EQ(full->status, 200);
  EXPECT_EQ(full->body, std::string(bytes.begin(), bytes.end()));
  EXPECT_EQ(full->get_header_value("Content-Type"), "audio/wav");
  EXPECT_EQ(full->get_header_value("Accept-Ranges"), "bytes");

  auto part = client_->Get("/api/clip/c7/audio", {{"Range", "bytes=0-99"}});
  ASSERT_TRUE(part);
  EXPECT_EQ(part->status, 206);
  EXPECT_EQ(part->body.size(), 100u);
  EXPECT_EQ(part->body, std::string(bytes.begin(), bytes.begin() + 100));
  EXPECT_EQ(part->get_header_value("Content-Range"), "bytes 0-99/" + std::to_string(bytes.size()));

  auto mid = client_->Get("/api/clip/c7/audio?dataset=fixture", {{"Range", "bytes=200-"}});
  ASSERT_TRUE(mid);
  EXPECT_EQ(mid->status, 206);
  EXPECT_EQ(mid->body, std::string(bytes.begin() + 200, bytes.end()));

  auto bad = client_->Get("/api/clip/c7/audio", {{"Range", "bytes=999999-"}});
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 416);
}

TEST_F(HttpTest, CorsPreflight) {
  auto r = client_->Options("/api/search");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 204);
  EXPECT_EQ(r->get_header_value("Access-Control-Allow-Origin"), "*");
  EXPECT_NE(r->get_header_value("Access-Control-Allow-Methods").find("POST"), std::string::npos);
  EXPECT_NE(r->get_header_value("Access-Control-Allow-Headers").find("Range"), std::string::npos);
}

}  // namespace
}  // namespace soundsearch::service
