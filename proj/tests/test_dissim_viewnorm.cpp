/*
 * lmds - 3D facial landmark depth from a single 2D view, by learned
 *        pairwise dissimilarities and multidimensional scaling.
 *
 * File: tests/test_dissim_viewnorm.cpp
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
#include "lmds/dissim.hpp"
#include "lmds/error.hpp"
#include "lmds/pipeline.hpp"
#include "lmds/synthdata.hpp"
#include "lmds/viewnorm.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace lmds;

TEST_CASE("pair features")
{
    CHECK(dissim::make_pair_features(Point2{0, 0}, Point2{0, 0}) == std::array<double, 6>{0, 0, 0, 0, 1, 1});
    const auto f = dissim::make_pair_features(Point2{1, 0}, Point2{0, 1});
    CHECK(f == std::array<double, 6>{1, 1, 0, 0, std::exp(-1.0), std::exp(-1.0)});
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    for (int i = 0; i < 1000; ++i) {
        const Point2 a{g(rng), g(rng)}, b{g(rng), g(rng)};
        CHECK(dissim::make_pair_features(a, b) == dissim::make_pair_features(b, a));
    }
    const auto span_version = dissim::make_pair_features(std::vector<double>{1, 0}, std::vector<double>{0, 1});
    CHECK(span_version.size() == 6);
    CHECK(span_version[4] == std::exp(-1.0));
    // The generic version orders features by kind then axis, like the 2D one.
    CHECK(std::equal(span_version.begin(), span_version.end(), f.begin()));
}

TEST_CASE("zero-weight dissimilarity model predicts ln 2")
{
    const auto m = dissim::default_model();
    CHECK(dissim::predict_distance(m, {0.3, -1}, {2, 5}) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK_THROWS_AS(dissim::predict_distance(viewnorm::default_model(3), {0, 0}, {1, 1}), Error);
}

TEST_CASE("dissimilarity matrix structure")
{
    auto m = dissim::default_model();
    m.initialize(nn::Init::HeUniform, 2);
    LandmarkSet2D four{{{0, 0}, {1, 0}, {0, 1}, {1, 1}}, ""};
    const Matrix d = dissim::build_dissimilarity_matrix(m, four);
    CHECK(d.rows() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(d(i, i) == 0.0);
        for (std::size_t j = 0; j < 4; ++j) {
            CHECK(d(i, j) == d(j, i));
            CHECK(d(i, j) >= 0.0);
            if (i != j) CHECK(d(i, j) == dissim::predict_distance(m, four.points[i], four.points[j]));
        }
    }
    LandmarkSet2D three{{{0, 0}, {1, 0}, {0, 1}}, ""};
    CHECK_THROWS_AS(dissim::build_dissimilarity_matrix(m, three), Error);
}

TEST_CASE("dissim training: epoch-0 loss of the zero model, memorization, reproducibility")
{
    std::mt19937_64 rng(3);
    auto shape = oracle::random_shape(rng, 12);
    LandmarkSet2D view;
    for (const auto& p : shape.points) view.points.push_back({p[0], p[1]});
    std::vector<dissim::TrainingFace> faces(8, {view, shape});

    dissim::TrainConfig cfg;
    cfg.epochs = 0;
    cfg.validation_fraction = 0.0;
    const auto zero = dissim::train_dissimilarity(faces, cfg, dissim::default_model());
    double expected = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < 12; ++i) {
        for (std::size_t j = i + 1; j < 12; ++j) {
            expected += std::pow(std::log(2.0) - distance(shape.points[i], shape.points[j]), 2);
            ++count;
        }
    }
    CHECK(zero.log.front().train_loss == doctest::Approx(expected / count).epsilon(1e-12));

    auto init = dissim::default_model();
    init.initialize(nn::Init::HeUniform, 4);
    cfg.epochs = 2000;
    cfg.learning_rate = 3e-3;
    const auto trained = dissim::train_dissimilarity(faces, cfg, init);
    CHECK(trained.log.back().train_loss < 1e-6);
    CHECK(dissim::evaluate_loss(trained.model, faces) < 1e-6);

    cfg.epochs = 3;
    cfg.validation_fraction = 0.25;
    for (auto scheme : {dissim::BatchScheme::SameFace, dissim::BatchScheme::Shuffled}) {
        cfg.scheme = scheme;
        const auto a = dissim::train_dissimilarity(faces, cfg, init);
        const auto b = dissim::train_dissimilarity(faces, cfg, init);
        CHECK(a.model == b.model);
        CHECK(a.log.back().val_loss == b.log.back().val_loss);
    }

    CHECK_THROWS_AS(dissim::train_dissimilarity({}, cfg, init), Error);
}

TEST_CASE("dissim training on a coplanar distribution predicts 2D distances")
{
    // Flat shapes seen head-on: the 3D distance equals the 2D distance.
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    auto make = [&]() {
        LandmarkSet3D s;
        for (int i = 0; i < 20; ++i) s.points.push_back({g(rng), g(rng), 0.0});
        s = normalize(s);
        LandmarkSet2D v;
        for (const auto& p : s.points) v.points.push_back({p[0], p[1]});
        return dissim::TrainingFace{v, s};
    };
    std::vector<dissim::TrainingFace> train;
    for (int i = 0; i < 300; ++i) train.push_back(make());
    auto init = dissim::default_model();
    init.initialize(nn::Init::HeUniform, 6);
    dissim::TrainConfig cfg;
    cfg.epochs = 6;
    cfg.learning_rate = 3e-3;
    const auto model = dissim::train_dissimilarity(train, cfg, init).model;

    std::vector<double> rel;
    for (int f = 0; f < 20; ++f) {
        const auto face = make();
        const Matrix d = dissim::build_dissimilarity_matrix(model, face.landmarks);
        for (std::size_t i = 0; i < 20; ++i) {
            for (std::size_t j = i + 1; j < 20; ++j) {
                const double truth = distance(face.landmarks.points[i], face.landmarks.points[j]);
                rel.push_back(std::abs(d(i, j) - truth) / truth);
            }
        }
    }
    std::nth_element(rel.begin(), rel.begin() + rel.size() / 2, rel.end());
    CHECK(rel[rel.size() / 2] < 0.05);
}

TEST_CASE("viewnorm: zero model, epoch-0 loss, identity task")
{
    const auto zero = viewnorm::default_model(12, {8, 4, 8});
    std::mt19937_64 rng(7);
    auto s = oracle::random_shape(rng, 12);
    const auto view = project(s, ViewParams{});
    const auto out = viewnorm::normalize_view(zero, view);
    for (const auto& p : out.points) CHECK(p == Point2{0, 0});
    CHECK(out.size() == view.size());
    CHECK_THROWS_AS(viewnorm::normalize_view(zero, LandmarkSet2D{{{0, 0}}, ""}), Error);

    std::vector<viewnorm::ViewPair> pairs;
    double sq = 0.0;
    for (int i = 0; i < 64; ++i) {
        const auto v = project(oracle::random_shape(rng, 12), ViewParams{});
        pairs.push_back({v, v});
        for (const auto& p : v.points) sq += p[0] * p[0] + p[1] * p[1];
    }
    viewnorm::TrainConfig cfg;
    cfg.epochs = 0;
    cfg.validation_fraction = 0.0;
    CHECK(viewnorm::train_viewnorm(pairs, cfg, zero).log.front().train_loss == doctest::Approx(sq / 64).epsilon(1e-12));

    // Identity task with a bottleneck wide enough to pass everything through.
    auto wide = viewnorm::default_model(12, {23});
    wide.initialize(nn::Init::HeUniform, 8);
    cfg.epochs = 800;
    cfg.learning_rate = 3e-3;
    cfg.batch_size = 16;
    std::vector<viewnorm::ViewPair> one(pairs.begin(), pairs.begin() + 1);
    one.resize(16, pairs.front());
    const auto fit = viewnorm::train_viewnorm(one, cfg, wide);
    CHECK(fit.log.back().train_loss < 1e-5);
}

TEST_CASE("viewnorm on the synthetic set: loss falls, profile inputs map near themselves, poses agree")
{
    synth::DatasetManifest recipe;
    recipe.count = 600;
    const auto ds = synth::generate(recipe);
    auto model = viewnorm::default_model(72);
    model.initialize(nn::Init::HeUniform, 1);
    viewnorm::TrainConfig cfg;
    cfg.epochs = 60;
    const auto result = viewnorm::train_viewnorm(view_pairs(ds.samples), cfg, model);
    CHECK(result.log.back().val_loss < result.log.front().val_loss);
    CHECK(result.log[5].val_loss < result.log.front().val_loss);

    // Held-out per-landmark RMSE on observed views.
    recipe.offset = 600;
    recipe.count = 50;
    const auto held = synth::generate(recipe);
    const double held_loss = viewnorm::evaluate_loss(result.model, view_pairs(held.samples));
    const double held_rmse = std::sqrt(held_loss / 72.0);

    double profile_sq = 0.0, pose_gap = 0.0;
    for (const auto& s : held.samples) {
        const auto out = viewnorm::normalize_view(result.model, s.profile_2d);
        for (std::size_t i = 0; i < 72; ++i) profile_sq += std::pow(distance(out.points[i], s.profile_2d.points[i]), 2);

        ViewParams left, right;
        left.yaw_deg = 45;
        right.yaw_deg = -45;
        const auto a = viewnorm::normalize_view(result.model, render_view(s.gt_3d, left));
        const auto b = viewnorm::normalize_view(result.model, render_view(s.gt_3d, right));
        double sq = 0.0;
        for (std::size_t i = 0; i < 72; ++i) sq += std::pow(distance(a.points[i], b.points[i]), 2);
        pose_gap += std::sqrt(sq / 72.0);
    }
    const double profile_rmse = std::sqrt(profile_sq / (50.0 * 72.0));
    MESSAGE("held-out rmse " << held_rmse << ", profile->profile rmse " << profile_rmse << ", +-45 gap " << pose_gap / 50);
    CHECK(profile_rmse < held_rmse);
    CHECK(pose_gap / 50.0 < 2.0 * held_rmse);
}
