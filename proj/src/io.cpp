/*
 * lmds - 3D facial landmark depth from a single 2D view, by learned
 *        pairwise dissimilarities and multidimensional scaling.
 *
 * File: src/io.cpp
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
#include "lmds/io.hpp"

#include "lmds/error.hpp"

#include <zlib.h>

#include <bit>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

namespace lmds::io {

std::string hex_double(double value)
{
    static constexpr char digits[] = "0123456789abcdef";
    auto bits = std::bit_cast<std::uint64_t>(value);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[bits & 0xF];
        bits >>= 4;
    }
    return out;
}

double parse_hex_double(std::string_view text)
{
    if (text.size() != 16) {
        throw Error(ErrorCode::MalformedRecord, "expected 16 hex digits, got '" + std::string(text) + "'");
    }
    std::uint64_t bits = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), bits, 16);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw Error(ErrorCode::MalformedRecord, "invalid hex double '" + std::string(text) + "'");
    }
    return std::bit_cast<double>(bits);
}

std::uint32_t crc32(std::span<const std::uint8_t> bytes, std::uint32_t seed)
{
    uLong crc = seed;
    // zlib takes uInt lengths; feed in chunks for very large buffers.
    std::size_t offset = 0;
    while (offset < bytes.size()) {
        const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - offset, 1u << 30));
        crc = ::crc32(crc, bytes.data() + offset, chunk);
        offset += chunk;
    }
    return static_cast<std::uint32_t>(crc);
}

std::uint32_t crc32(std::string_view bytes, std::uint32_t seed)
{
    return crc32(std::span(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()), seed);
}

std::uint32_t crc32_doubles(std::span<const double> values, std::uint32_t seed)
{
    std::vector<std::uint8_t> buf;
    buf.reserve(values.size() * 8);
    for (double v : values) {
        append_f64(buf, v);
    }
    return crc32(std::span<const std::uint8_t>(buf), seed);
}

std::string hex32(std::uint32_t value)
{
    char buf[9];
    std::snprintf(buf, sizeof(buf), "%08x", value);
    return buf;
}

void append_u32(std::vector<std::uint8_t>& out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

void append_u64(std::vector<std::uint8_t>& out, std::uint64_t v)
{
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

void append_f64(std::vector<std::uint8_t>& out, double v)
{
    append_u64(out, std::bit_cast<std::uint64_t>(v));
}

std::uint32_t read_u32(std::span<const std::uint8_t> in, std::size_t offset)
{
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
        v |= static_cast<std::uint32_t>(in[offset + i]) << (8 * i);
    }
    return v;
}

std::uint64_t read_u64(std::span<const std::uint8_t> in, std::size_t offset)
{
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
        v |= static_cast<std::uint64_t>(in[offset + i]) << (8 * i);
    }
    return v;
}

double read_f64(std::span<const std::uint8_t> in, std::size_t offset)
{
    return std::bit_cast<double>(read_u64(in, offset));
}

std::vector<std::uint8_t> read_binary(const std::filesystem::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw Error(ErrorCode::MissingInput, "cannot open '" + path.string() + "'");
    }
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void write_binary(const std::filesystem::path& path, std::span<const std::uint8_t> bytes)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
    }
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) {
        throw Error(ErrorCode::Io, "write failed for '" + path.string() + "'");
    }
}

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw Error(ErrorCode::MissingInput, "cannot open '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text)
{
    write_binary(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::vector<std::string> split(std::string_view text, char sep)
{
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.emplace_back(text.substr(start));
            break;
        }
        parts.emplace_back(text.substr(start, pos - start));
        start = pos + 1;
    }
    return parts;
}

std::string_view trim(std::string_view text)
{
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = text.find_last_not_of(" \t\r\n");
    return text.substr(first, last - first + 1);
}

std::string format_double(double value)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) {
        std::snprintf(buf, sizeof(buf), "%.17g", value);
        return buf;
    }
    return std::string(buf, ptr);
}

} // namespace lmds::io
