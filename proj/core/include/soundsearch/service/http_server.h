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

#include <memory>
#include <string>

#include "soundsearch/service/search_service.h"

namespace soundsearch::service {

// HTTP+JSON front end over a SearchService:
//   POST /api/search            QuerySpec -> ResultPage
//   POST /api/upload            raw audio body -> {upload_ref}
//   GET  /api/similar/{clip_id} ?k&cursor&dataset&dedup -> ResultPage
//   GET  /api/datasets          -> [{name, count, dim}]
//   GET  /api/clip/{id}/audio   media bytes, Range-capable
// Every non-2xx response carries {"code", "message"}.
class HttpServer {
 public:
  explicit HttpServer(std::shared_ptr<SearchService> service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds without serving; port 0 picks a free port. Returns the bound port
  // or -1 on failure.
  int bind(const std::string& host, int port);
  // Serves until stop(); returns false if the listener failed.
  bool serve();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace soundsearch::service
