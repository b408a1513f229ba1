/*
 * lmds - 3D facial landmark depth from a single 2D view, by learned
 *        pairwise dissimilarities and multidimensional scaling.
 *
 * File: include/lmds/io.hpp
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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lmds::io {

/// Bit pattern of an IEEE-754 double as 16 lowercase hex digits.
std::string hex_double(double value);
/// Inverse of hex_double. Throws Error(MalformedRecord) on anything but 16 hex digits.
double parse_hex_double(std::string_view text);

std::uint32_t crc32(std::span<const std::uint8_t> bytes, std::uint32_t seed = 0);
std::uint32_t crc32(std::string_view bytes, std::uint32_t seed = 0);
std::uint32_t crc32_doubles(std::span<const double> values, std::uint32_t seed = 0);
std::string hex32(std::uint32_t value);

void append_u32(std::vector<std::uint8_t>& out, std::uint32_t v);
void append_u64(std::vector<std::uint8_t>& out, std::uint64_t v);
void append_f64(std::vector<std::uint8_t>& out, double v);
std::uint32_t read_u32(std::span<const std::uint8_t> in, std::size_t offset);
std::uint64_t read_u64(std::span<const std::uint8_t> in, std::size_t offset);
double read_f64(std::span<const std::uint8_t> in, std::size_t offset);

std::vector<std::uint8_t> read_binary(const std::filesystem::path& path);
void write_binary(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

std::vector<std::string> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);

/// Shortest decimal that round-trips, for human-readable reports.
std::string format_double(double value);

} // namespace lmds::io
