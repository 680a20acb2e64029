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

#include "soundsearch/error.h"

namespace soundsearch {

std::string_view code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kEmptyQuery: return "EmptyQuery";
    case ErrorCode::kBatchMismatch: return "BatchMismatch";
    case ErrorCode::kNonPositiveTemperature: return "NonPositiveTemperature";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kEmptyStore: return "EmptyStore";
    case ErrorCode::kIndexNotBuilt: return "IndexNotBuilt";
    case ErrorCode::kUnknownClipId: return "UnknownClipId";
    case ErrorCode::kCorruptHeader: return "CorruptHeader";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kTruncatedFile: return "TruncatedFile";
    case ErrorCode::kChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::kIndexStoreMismatch: return "IndexStoreMismatch";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kMissingEmbedding: return "MissingEmbedding";
    case ErrorCode::kMalformedRecord: return "MalformedRecord";
    case ErrorCode::kEmptyQueryText: return "EmptyQueryText";
    case ErrorCode::kEmptyPayload: return "EmptyPayload";
    case ErrorCode::kUnsupportedMedia: return "UnsupportedMedia";
    case ErrorCode::kEmbedderUnavailable: return "EmbedderUnavailable";
    case ErrorCode::kTooFewPairs: return "TooFewPairs";
    case ErrorCode::kAllZeroDifferences: return "AllZeroDifferences";
    case ErrorCode::kMissingDimension: return "MissingDimension";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kMalformedCsv: return "MalformedCsv";
  }
  return "Unknown";
}

}  // namespace soundsearch
