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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace soundsearch::service {

struct DatasetConfig {
  std::string name;
  std::filesystem::path store_path;
  std::filesystem::path manifest_path;  // optional; hits carry no metadata without it
  std::filesystem::path index_path;  // defaults to store_path + ".hnsw"
  std::filesystem::path media_root;  // base for relative media_uri values
};

struct EmbedderConfig {
  std::string mode = "mock";  // "mock" or "remote"
  std::string endpoint;
  std::size_t dim = 512;
  std::uint64_t mock_key = 0x5eedc1a95a11d5ull;
  double timeout_s = 10.0;
};

struct SearchConfig {
  std::size_t default_k = 20;
  std::size_t max_k = 200;
  bool dedup_default = false;
  double dedup_threshold = 0.98;
  // Graph beam width; 0 uses the value stored in the index.
  std::size_t ef_search = 0;
  // Stores at or below this size are searched exactly.
  std::size_t exact_threshold = 10000;
  // Candidates materialized per ANN pass; pages are slices of this list.
  std::size_t result_pool = 1000;
};

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t upload_cap_bytes = 50u * 1024u * 1024u;
  double upload_ttl_s = 3600.0;
  std::string cors_origin = "*";
  std::filesystem::path static_dir;  // web UI bundle; not served when empty
  std::size_t threads = 8;
};

struct ServiceConfig {
  std::vector<DatasetConfig> datasets;
  // Experiment mode pins the service to a single dataset.
  std::optional<std::string> experiment_dataset;
  EmbedderConfig embedder;
  SearchConfig search;
  ServerConfig server;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

// Process environment lookup.
std::optional<std::string> process_env(const std::string& name);

// Relative paths resolve against `base_dir`. Errors: InvalidArgument.
ServiceConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir);

// SOUNDSEARCH_BIND ("host:port" or ":port") and SOUNDSEARCH_EMBEDDER_ENDPOINT
// (also switches the embedder to remote mode).
void apply_env_overrides(ServiceConfig& config, const EnvLookup& env);

// Reads a JSON config file and applies environment overrides. Errors:
// IoError, InvalidArgument.
ServiceConfig load_config(const std::filesystem::path& path, const EnvLookup& env = process_env);

// Datasets visible to clients: all of them, or only the pinned one.
std::vector<DatasetConfig> mounted_datasets(const ServiceConfig& config);

}  // namespace soundsearch::service
