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

#include "soundsearch/query.h"

#include "soundsearch/error.h"

namespace soundsearch {

Embedding resolve_query(const QueryParts& parts, const EmbedderClient& client,
                        const VectorStore& store) {
  if (parts.empty()) throw Error(ErrorCode::kEmptyQuery, "query has no text, audio or clip ids");
  std::vector<Embedding> vectors;
  vectors.reserve(parts.texts.size() + parts.audio.size() + parts.clip_ids.size());
  for (const std::string& text : parts.texts) vectors.push_back(embed_text(client, text));
  for (const AudioPart& a : parts.audio) {
    vectors.push_back(embed_audio(client, a.bytes, a.media_hint));
  }
  for (const std::string& id : parts.clip_ids) {
    // Stored rows are unit-norm already; keep them verbatim so a single clip
    // part resolves to exactly its stored vector.
    vectors.push_back(store.embedding(store.row_of(id)));
  }
  for (const Embedding& v : vectors) {
    if (v.dim() != store.dim()) {
      throw Error(ErrorCode::kDimMismatch, "query part has dim " + std::to_string(v.dim()) +
                                               ", store has " + std::to_string(store.dim()));
    }
  }
  return fuse_queries(vectors);
}

}  // namespace soundsearch
