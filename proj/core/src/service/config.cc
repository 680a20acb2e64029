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

#include "soundsearch/service/config.h"

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "soundsearch/error.h"

namespace soundsearch::service {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) {
  throw Error(ErrorCode::kInvalidArgument, "config: " + what);
}

const json* member(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

std::string get_string(const json& obj, const char* key, std::string fallback) {
  const json* v = member(obj, key);
  if (!v) return fallback;
  if (!v->is_string()) bad(std::string(key) + " must be a string");
  return v->get<std::string>();
}

std::size_t get_size(const json& obj, const char* key, std::size_t fallback) {
  const json* v = member(obj, key);
  if (!v) return fallback;
  if (!v->is_number_integer() || v->get<std::int64_t>() < 0) {
    bad(std::string(key) + " must be a nonnegative integer");
  }
  return v->get<std::size_t>();
}

double get_double(const json& obj, const char* key, double fallback) {
  const json* v = member(obj, key);
  if (!v) return fallback;
  if (!v->is_number()) bad(std::string(key) + " must be a number");
  return v->get<double>();
}

bool get_bool(const json& obj, const char* key, bool fallback) {
  const json* v = member(obj, key);
  if (!v) return fallback;
  if (!v->is_boolean()) bad(std::string(key) + " must be a boolean");
  return v->get<bool>();
}

const json& section(const json& j, const char* key) {
  static const json kEmpty = json::object();
  const json* v = member(j, key);
  if (!v) return kEmpty;
  if (!v->is_object()) bad(std::string(key) + " must be an object");
  return *v;
}

std::filesystem::path resolve(const std::string& p, const std::filesystem::path& base) {
  if (p.empty()) return {};
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

void parse_bind(ServerConfig& server, const std::string& bind) {
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos) bad("bind must be host:port, got '" + bind + "'");
  const std::string host = bind.substr(0, colon);
  const std::string port = bind.substr(colon + 1);
  int value = 0;
  auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
  if (ec != std::errc() || ptr != port.data() + port.size() || value < 0 || value > 65535) {
    bad("bad port in bind '" + bind + "'");
  }
  if (!host.empty()) server.host = host;
  server.port = value;
}

}  // namespace

std::optional<std::string> process_env(const std::string& name) {
  const char* v = std::getenv(name.c_str());
  if (v == nullptr) return std::nullopt;
  return std::string(v);
}

ServiceConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) bad("top level must be an object");
  ServiceConfig c;

  if (const json* ds = member(j, "datasets")) {
    if (!ds->is_array()) bad("datasets must be an array");
    std::set<std::string> names;
    for (const json& d : *ds) {
      if (!d.is_object()) bad("dataset entries must be objects");
      DatasetConfig dc;
      dc.name = get_string(d, "name", "");
      if (dc.name.empty()) bad("dataset name is required");
      if (!names.insert(dc.name).second) bad("duplicate dataset name '" + dc.name + "'");
      dc.store_path = resolve(get_string(d, "store_path", ""), base_dir);
      if (dc.store_path.empty()) bad("dataset '" + dc.name + "' needs store_path");
      dc.manifest_path = resolve(get_string(d, "manifest_path", ""), base_dir);
      dc.index_path = resolve(get_string(d, "index_path", ""), base_dir);
      if (dc.index_path.empty()) dc.index_path = dc.store_path.string() + ".hnsw";
      dc.media_root = resolve(get_string(d, "media_root", ""), base_dir);
      if (dc.media_root.empty()) {
        dc.media_root = dc.manifest_path.empty() ? base_dir : dc.manifest_path.parent_path();
      }
      c.datasets.push_back(std::move(dc));
    }
  }

  const json& exp = section(j, "experiment");
  if (get_bool(exp, "enabled", member(exp, "dataset") != nullptr)) {
    const std::string name = get_string(exp, "dataset", "");
    if (name.empty()) bad("experiment mode needs a dataset name");
    bool found = false;
    for (const auto& d : c.datasets) found = found || d.name == name;
    if (!found) bad("experiment dataset '" + name + "' is not configured");
    c.experiment_dataset = name;
  }

  const json& emb = section(j, "embedder");
  c.embedder.mode = get_string(emb, "mode", c.embedder.mode);
  if (c.embedder.mode != "mock" && c.embedder.mode != "remote") {
    bad("embedder.mode must be mock or remote");
  }
  c.embedder.endpoint = get_string(emb, "endpoint", c.embedder.endpoint);
  c.embedder.dim = get_size(emb, "dim", c.embedder.dim);
  if (c.embedder.dim == 0) bad("embedder.dim must be positive");
  c.embedder.mock_key = get_size(emb, "mock_key", c.embedder.mock_key);
  c.embedder.timeout_s = get_double(emb, "timeout_s", c.embedder.timeout_s);
  if (c.embedder.mode == "remote" && c.embedder.endpoint.empty()) {
    bad("remote embedder needs an endpoint");
  }

  const json& s = section(j, "search");
  c.search.default_k = get_size(s, "default_k", c.search.default_k);
  c.search.max_k = get_size(s, "max_k", c.search.max_k);
  if (c.search.max_k == 0 || c.search.default_k == 0 || c.search.default_k > c.search.max_k) {
    bad("search.default_k must be in [1, max_k]");
  }
  c.search.dedup_default = get_bool(s, "dedup_default", c.search.dedup_default);
  c.search.dedup_threshold = get_double(s, "dedup_threshold", c.search.dedup_threshold);
  if (!(c.search.dedup_threshold > 0.0 && c.search.dedup_threshold <= 1.0)) {
    bad("search.dedup_threshold must be in (0, 1]");
  }
  const json& ann = section(s, "ann");
  c.search.ef_search = get_size(ann, "ef_search", c.search.ef_search);
  c.search.exact_threshold = get_size(ann, "exact_threshold", c.search.exact_threshold);
  c.search.result_pool = get_size(ann, "result_pool", c.search.result_pool);
  if (c.search.result_pool < c.search.max_k) bad("search.ann.result_pool must be >= max_k");

  const json& srv = section(j, "server");
  if (const json* b = member(srv, "bind")) {
    if (!b->is_string()) bad("server.bind must be a string");
    parse_bind(c.server, b->get<std::string>());
  }
  c.server.upload_cap_bytes = get_size(srv, "upload_cap_bytes", c.server.upload_cap_bytes);
  c.server.upload_ttl_s = get_double(srv, "upload_ttl_s", c.server.upload_ttl_s);
  if (!(c.server.upload_ttl_s > 0.0)) bad("server.upload_ttl_s must be positive");
  c.server.cors_origin = get_string(srv, "cors_origin", c.server.cors_origin);
  c.server.static_dir = resolve(get_string(srv, "static_dir", ""), base_dir);
  c.server.threads = get_size(srv, "threads", c.server.threads);
  if (c.server.threads == 0) bad("server.threads must be positive");
  return c;
}

void apply_env_overrides(ServiceConfig& config, const EnvLookup& env) {
  if (auto bind = env("SOUNDSEARCH_BIND"); bind && !bind->empty()) {
    parse_bind(config.server, *bind);
  }
  if (auto ep = env("SOUNDSEARCH_EMBEDDER_ENDPOINT"); ep && !ep->empty()) {
    config.embedder.endpoint = *ep;
    config.embedder.mode = "remote";
  }
}

ServiceConfig load_config(const std::filesystem::path& path, const EnvLookup& env) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    bad(path.string() + ": " + e.what());
  }
  ServiceConfig c = parse_config(j, path.parent_path());
  apply_env_overrides(c, env);
  return c;
}

std::vector<DatasetConfig> mounted_datasets(const ServiceConfig& config) {
  if (!config.experiment_dataset) return config.datasets;
  std::vector<DatasetConfig> out;
  for (const auto& d : config.datasets) {
    if (d.name == *config.experiment_dataset) out.push_back(d);
  }
  return out;
}

}  // namespace soundsearch::service
