/*
 * lmds - 3D facial landmark depth from a single 2D view, by learned
 *        pairwise dissimilarities and multidimensional scaling.
 *
 * File: tests/test_pipeline_commands.cpp
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
#include "lmds/commands.hpp"
#include "lmds/config.hpp"
#include "lmds/error.hpp"
#include "lmds/io.hpp"
#include "lmds/metrics.hpp"
#include "lmds/mds.hpp"
#include "lmds/pipeline.hpp"
#include "lmds/plot.hpp"

#include "oracles.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <sstream>

using namespace lmds;
namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

PipelineConfig small_config(const std::string& name)
{
    PipelineConfig c;
    c.out_dir = fs::temp_directory_path() / ("lmds_test_" + name);
    fs::remove_all(c.out_dir);
    c.train_count = 60;
    c.test_count = 20;
    c.viewnorm_epochs = 20;
    c.dissim_epochs = 2;
    c.eval_size = 20;
    c.eval_reps = 5;
    c.ablate_faces = 20;
    c.ablate_epochs = 2;
    c.ablate_seeds = 2;
    c.plot_faces = 2;
    return c;
}

pt::ptree read_svg(const fs::path& path)
{
    pt::ptree tree;
    pt::read_xml(path.string(), tree);  // throws on malformed XML
    return tree;
}

double attr(const pt::ptree& node, const std::string& name)
{
    return std::stod(node.get<std::string>("<xmlattr>." + name));
}

} // namespace

TEST_CASE("reconstruction text round-trips bit-exactly")
{
    std::mt19937_64 rng(1);
    std::vector<ReconstructionResult> rs(3);
    for (std::size_t k = 0; k < rs.size(); ++k) {
        rs[k].face_id = 100 + k;
        rs[k].predicted = oracle::random_shape(rng, 10);
        rs[k].predicted.topology_id = "t10";
        rs[k].dissim_hash = 0xdeadbeefu + k;
        rs[k].stress = 0.1 / (k + 1);
        rs[k].iterations = static_cast<int>(7 * k);
    }
    const auto back = parse_reconstructions(format_reconstructions(rs));
    REQUIRE(back.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(back[k].face_id == rs[k].face_id);
        CHECK(back[k].predicted == rs[k].predicted);
        CHECK(back[k].dissim_hash == rs[k].dissim_hash);
        CHECK(back[k].stress == rs[k].stress);
        CHECK(back[k].iterations == rs[k].iterations);
    }
    CHECK(parse_reconstructions(format_reconstructions({})).empty());
    CHECK_THROWS_AS(parse_reconstructions("garbage\n"), Error);
}

TEST_CASE("scatter svg: strict XML, ranges cover every point, identical shapes overlap")
{
    std::mt19937_64 rng(2);
    const auto gt = oracle::random_shape(rng, 30);
    const auto pred = oracle::random_shape(rng, 30);
    const auto dir = fs::temp_directory_path() / "lmds_test_svg";
    fs::create_directories(dir);
    for (auto plane : {plot::Plane::XY, plot::Plane::XZ, plot::Plane::YZ}) {
        io::write_text(dir / "a.svg", plot::scatter_svg(pred, gt, plane, "a <title> & \"quotes\""));
        const auto tree = read_svg(dir / "a.svg");
        const auto& svg = tree.get_child("svg");
        const double xmin = attr(svg, "data-xmin"), xmax = attr(svg, "data-xmax");
        const double ymin = attr(svg, "data-ymin"), ymax = attr(svg, "data-ymax");
        std::size_t circles = 0;
        for (const auto& [name, node] : svg.get_child("g")) {
            if (name != "circle") continue;
            ++circles;
            CHECK(attr(node, "cx") >= xmin);
            CHECK(attr(node, "cx") <= xmax);
            CHECK(attr(node, "cy") >= ymin);
            CHECK(attr(node, "cy") <= ymax);
        }
        CHECK(circles == 60);
    }

    io::write_text(dir / "same.svg", plot::scatter_svg(gt, gt, plot::Plane::XZ, "same"));
    std::vector<std::pair<double, double>> g, p;
    const auto same = read_svg(dir / "same.svg");
    for (const auto& [name, node] : same.get_child("svg.g")) {
        if (name != "circle") continue;
        (node.get<std::string>("<xmlattr>.class") == "gt" ? g : p).emplace_back(attr(node, "cx"), attr(node, "cy"));
    }
    CHECK(g.size() == 30);
    CHECK(g == p);

    CHECK_THROWS_AS(plot::scatter_svg(LandmarkSet3D{}, LandmarkSet3D{}, plot::Plane::XY, ""), Error);
    io::write_text(dir / "curves.svg", plot::curves_svg({{"a", {3, 2, 1}}, {"b", {3, 2.5, 2}}}, "t", "loss"));
    CHECK_NOTHROW(read_svg(dir / "curves.svg"));
    fs::remove_all(dir);
}

TEST_CASE("classical mds cost grows superlinearly in n")
{
    std::mt19937_64 rng(3);
    auto best_time = [&](std::size_t n) {
        const Matrix d = oracle::distances(oracle::random_shape(rng, n));
        double best = INFINITY;
        for (int rep = 0; rep < 5; ++rep) {
            const auto t0 = std::chrono::steady_clock::now();
            const auto e = mds::classical_mds(d, 3);
            const auto t1 = std::chrono::steady_clock::now();
            CHECK(e.coords.rows() == n);
            best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
        }
        return best;
    };
    const double t72 = best_time(72), t144 = best_time(144);
    MESSAGE("classical mds t(72) = " << t72 << " s, t(144) = " << t144 << " s");
    CHECK(t144 / t72 > 2.0);
}

TEST_CASE("commands on a small configuration")
{
    const PipelineConfig config = small_config("cmds");
    std::ostringstream out;
    const cli::Layout paths = cli::layout(config);

    SUBCASE("generate: counts, same seed same bytes, empty split")
    {
        const auto g = cli::cmd_generate(config, out);
        CHECK(g.train.samples.size() == 60);
        CHECK(g.test.samples.size() == 20);
        CHECK(g.test.samples.front().face_id == 60);
        const auto first = io::crc32(io::read_text(synth::records_path(paths.train_stem())));
        cli::cmd_generate(config, out);
        CHECK(io::crc32(io::read_text(synth::records_path(paths.train_stem()))) == first);

        auto empty = config;
        empty.out_dir = config.out_dir / "empty";
        empty.train_count = 0;
        const auto e = cli::cmd_generate(empty, out);
        CHECK(e.train.samples.empty());
        CHECK(cli::load_split(empty, false).samples.empty());
    }

    SUBCASE("missing inputs and stale datasets are reported")
    {
        try {
            cli::cmd_train(config, cli::Which::Both, out);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::MissingInput);
        }
        cli::cmd_generate(config, out);
        auto other = config;
        other.seed = 2;
        try {
            cli::load_split(other, false);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::Config);
        }
    }

    SUBCASE("train, reconstruct, evaluate, ablate, plot")
    {
        cli::cmd_generate(config, out);
        const auto summary = cli::cmd_train(config, cli::Which::Both, out);
        CHECK(summary.dissim_parameters == 1841);
        CHECK(summary.viewnorm_parameters == 22832);
        CHECK(summary.dissim_log.size() == 3);
        CHECK(out.str().find("total parameters: 24673") != std::string::npos);
        const auto model_bytes = io::read_binary(paths.dissim_model());
        cli::cmd_train(config, cli::Which::Dissim, out);
        CHECK(io::read_binary(paths.dissim_model()) == model_bytes);

        cli::ReconstructRequest one;
        one.face_id = 61;
        const auto single = cli::cmd_reconstruct(config, one, out);
        REQUIRE(single.size() == 1);
        CHECK(single.front().face_id == 61);
        CHECK(single.front().predicted.size() == 72);
        CHECK(parse_reconstructions(io::read_text(paths.root / "reconstruction-face-61.txt")).size() == 1);
        const auto timings = io::read_text(paths.root / "reconstruction-face-61.timings.csv");
        CHECK(timings.rfind("face_id,viewnorm_us,dissim_us,mds_us\n", 0) == 0);
        CHECK(single.front().timings.viewnorm_us >= 0.0);
        CHECK(single.front().timings.dissim_us >= 0.0);
        CHECK(single.front().timings.mds_us >= 0.0);

        one.face_id = 5;  // a training face, not in the test split
        CHECK_THROWS_AS(cli::cmd_reconstruct(config, one, out), Error);

        // A hand-written landmark file with a different point count.
        std::string text;
        const auto test = cli::load_split(config, true);
        for (std::size_t i = 0; i < 30; ++i) {
            text += io::format_double(test.samples[0].input_2d.points[i][0]) + " "
                    + io::format_double(test.samples[0].input_2d.points[i][1]) + "\n";
        }
        io::write_text(paths.root / "pts.txt", text);
        cli::ReconstructRequest file;
        file.landmarks = paths.root / "pts.txt";
        CHECK_THROWS_AS(cli::cmd_reconstruct(config, file, out), Error);  // 30 points do not fit a 72-point model

        const auto eval = cli::cmd_evaluate(config, std::nullopt, out);
        CHECK(eval.pipeline.report.mse.per_sample.size() == 20);
        CHECK(eval.orthographic_count + eval.perspective_count == 20);
        CHECK(eval.frontal_count <= eval.orthographic_count);
        const auto report = io::read_text(paths.report_json(false));
        CHECK(cli::cmd_evaluate(config, std::nullopt, out).mse_ratio == eval.mse_ratio);
        CHECK(io::read_text(paths.report_json(false)) == report);

        // Best training face against the test mean.
        cli::ReconstructRequest train_all;
        train_all.train_split = true;
        const auto train_results = cli::cmd_reconstruct(config, train_all, out);
        const auto train = cli::load_split(config, false);
        double best = INFINITY;
        for (std::size_t i = 0; i < train_results.size(); ++i) {
            best = std::min(best, metrics::landmark_mse(train_results[i].predicted, train.samples[i].gt_3d));
        }
        CHECK(best < metrics::mean(eval.pipeline.report.mse.per_sample));

        // Oracle predictions: exact GT for every test face.
        std::vector<ReconstructionResult> oracle_results;
        for (const auto& s : test.samples) {
            ReconstructionResult r;
            r.face_id = s.face_id;
            r.predicted = s.gt_3d;
            oracle_results.push_back(r);
        }
        io::write_text(paths.root / "oracle.txt", format_reconstructions(oracle_results));
        const auto perfect = cli::cmd_evaluate(config, paths.root / "oracle.txt", out);
        CHECK(perfect.pipeline.report.mse.mean < 1e-24);
        CHECK(perfect.pipeline.report.depth_corr.mean == doctest::Approx(100.0));

        const auto runs = cli::cmd_ablate(config, out);
        CHECK(runs.size() == 2);
        const auto csv = io::split(io::read_text(paths.ablation_csv()), '\n');
        std::size_t rows = 0;
        for (std::size_t i = 1; i < csv.size(); ++i) {
            if (csv[i].empty()) continue;
            const auto cells = io::split(csv[i], ',');
            CHECK(cells.size() == 6);
            for (const auto& c : cells) CHECK_FALSE(c.empty());
            ++rows;
        }
        CHECK(rows == 2 * 3);
        CHECK_NOTHROW(read_svg(paths.ablation_svg()));

        const auto plots = cli::cmd_plot(config, std::nullopt, out);
        CHECK(plots.size() == 3 * 2);
        for (const auto& f : plots) CHECK_NOTHROW(read_svg(f));
    }
    fs::remove_all(config.out_dir);
}
