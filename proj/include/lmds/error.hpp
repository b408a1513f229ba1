/*
 * lmds - 3D facial landmark depth from a single 2D view, by learned
 *        pairwise dissimilarities and multidimensional scaling.
 *
 * File: include/lmds/error.hpp
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
#pragma once

#include <stdexcept>
#include <string>

namespace lmds {

enum class ErrorCode {
    InvalidArgument,
    DimensionMismatch,
    MissingCache,
    NonFinite,
    VersionMismatch,
    ChecksumMismatch,
    BadFormat,
    Io,
    Degenerate,
    NotConverged,
    Diverged,
    EmptyDataset,
    SchemaMismatch,
    MalformedRecord,
    Config,
    MissingInput,
};

/// Stable, machine-parseable token for an error code, e.g. "E_CHECKSUM".
const char* error_token(ErrorCode code) noexcept;

/**
 * The single exception type thrown by the library. Every failure carries a
 * code so callers (and the CLI) can branch on the category without parsing
 * the message.
 */
class Error : public std::runtime_error
{
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace lmds
