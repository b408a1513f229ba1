/*
 * lmds - 3D facial landmark depth from a single 2D view, by learned
 *        pairwise dissimilarities and multidimensional scaling.
 *
 * File: src/error.cpp
 *
 * Copyright 2026 The lmds Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "lmds/error.hpp"

namespace lmds {

const char* error_token(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "E_INVALID_ARGUMENT";
    case ErrorCode::DimensionMismatch: return "E_DIMENSION";
    case ErrorCode::MissingCache: return "E_MISSING_CACHE";
    case ErrorCode::NonFinite: return "E_NON_FINITE";
    case ErrorCode::VersionMismatch: return "E_VERSION";
    case ErrorCode::ChecksumMismatch: return "E_CHECKSUM";
    case ErrorCode::BadFormat: return "E_BAD_FORMAT";
    case ErrorCode::Io: return "E_IO";
    case ErrorCode::Degenerate: return "E_DEGENERATE";
    case ErrorCode::NotConverged: return "E_NOT_CONVERGED";
    case ErrorCode::Diverged: return "E_DIVERGED";
    case ErrorCode::EmptyDataset: return "E_EMPTY_DATASET";
    case ErrorCode::SchemaMismatch: return "E_SCHEMA";
    case ErrorCode::MalformedRecord: return "E_MALFORMED_RECORD";
    case ErrorCode::Config: return "E_CONFIG";
    case ErrorCode::MissingInput: return "E_MISSING_INPUT";
    }
    return "E_UNKNOWN";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code)
{
}

} // namespace lmds
