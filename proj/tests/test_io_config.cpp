/*
 * lmds - 3D facial landmark depth from a single 2D view, by learned
 *        pairwise dissimilarities and multidimensional scaling.
 *
 * File: tests/test_io_config.cpp
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
#include "lmds/config.hpp"
#include "lmds/error.hpp"
#include "lmds/io.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace lmds;

TEST_CASE("hex doubles round-trip bit-exactly")
{
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g(0.0, 1e3);
    for (int i = 0; i < 1000; ++i) {
        const double v = g(rng);
        CHECK(io::parse_hex_double(io::hex_double(v)) == v);
    }
    CHECK(io::hex_double(1.0) == "3ff0000000000000");
    CHECK(std::signbit(io::parse_hex_double(io::hex_double(-0.0))));
    CHECK(io::parse_hex_double(io::hex_double(std::numeric_limits<double>::denorm_min()))
          == std::numeric_limits<double>::denorm_min());
    CHECK_THROWS_AS(io::parse_hex_double("3ff"), Error);
    CHECK_THROWS_AS(io::parse_hex_double("3ff000000000000g"), Error);
}

TEST_CASE("crc32 check value")
{
    CHECK(io::crc32(std::string_view("123456789")) == 0xCBF43926u);
    CHECK(io::hex32(0xCBF43926u) == "cbf43926");
    // Chaining equals one pass.
    CHECK(io::crc32(std::string_view("6789"), io::crc32(std::string_view("12345"))) == 0xCBF43926u);
}

TEST_CASE("config: defaults, parsing, overrides, unknown keys")
{
    const PipelineConfig def;
    CHECK(def.train_count == 2000);
    CHECK(def.test_count == 500);
    CHECK(parse_config(format_config(def)).seed == def.seed);
    CHECK(format_config(parse_config(format_config(def))) == format_config(def));

    const auto cfg = parse_config("# comment\nseed = 7\n\ndata.train_count=10\nviewnorm.hidden = 8,4,8\n"
                                  "dissim.scheme = shuffled\npipeline.skip_viewnorm = true\n");
    CHECK(cfg.seed == 7);
    CHECK(cfg.train_count == 10);
    CHECK(cfg.viewnorm_hidden == std::vector<std::size_t>{8, 4, 8});
    CHECK(cfg.dissim_scheme == dissim::BatchScheme::Shuffled);
    CHECK(cfg.skip_viewnorm);

    auto over = cfg;
    apply_setting(over, "data.test_count", "3");
    CHECK(over.test_count == 3);

    auto code_of = [](const std::string& text) {
        try {
            parse_config(text);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::Config);
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(code_of("seed = 1\ndata.trian_count = 5\n").find("line 2") != std::string::npos);
    CHECK(code_of("seed 1\n").find("line 1") != std::string::npos);
    CHECK_FALSE(code_of("seed = abc\n").empty());
    CHECK_FALSE(code_of("viewnorm.learning_rate = nan\n").empty());

    const auto train = train_recipe(cfg), test = test_recipe(cfg);
    CHECK(train.count == 10);
    CHECK(test.offset == 10);
    CHECK(train.seed == test.seed);
    CHECK(derive_seed(1, seed_stream::kViewnormInit) != derive_seed(1, seed_stream::kDissimInit));
    CHECK(derive_seed(1, seed_stream::kViewnormInit) == derive_seed(1, seed_stream::kViewnormInit));
}
