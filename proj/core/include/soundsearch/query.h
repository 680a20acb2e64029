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

#include <string>
#include <vector>

#include "soundsearch/embedder.h"
#include "soundsearch/embedding.h"
#include "soundsearch/vector_store.h"

namespace soundsearch {

struct AudioPart {
  std::vector<unsigned char> bytes;
  std::string media_hint;
};

// Any mix of query texts, uploaded audio, and clips already in the store.
struct QueryParts {
  std::vector<std::string> texts;
  std::vector<AudioPart> audio;
  std::vector<std::string> clip_ids;

  bool empty() const { return texts.empty() && audio.empty() && clip_ids.empty(); }
};

// Embeds every part (clip ids resolve to their stored rows) and fuses them
// into one unit query vector. Parts are taken in the order texts, audio,
// clip ids. Errors: EmptyQuery, UnknownClipId, DimMismatch, embedder errors.
Embedding resolve_query(const QueryParts& parts, const EmbedderClient& client,
                        const VectorStore& store);

}  // namespace soundsearch
