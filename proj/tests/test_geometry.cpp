/*
 * lmds - 3D facial landmark depth from a single 2D view, by learned
 *        pairwise dissimilarities and multidimensional scaling.
 *
 * File: tests/test_geometry.cpp
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
#include "lmds/geometry.hpp"
#include "lmds/linalg.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace lmds;

TEST_CASE("sym_eig: identity, diagonal, random reconstruction")
{
    const auto id = sym_eig(Matrix::identity(4));
    for (double v : id.values) CHECK(v == doctest::Approx(1.0));

    Matrix d(3, 3);
    d(0, 0) = 3;
    d(1, 1) = 1;
    d(2, 2) = 2;
    const auto e = sym_eig(d);
    CHECK(e.values == std::vector<double>{3, 2, 1});
    CHECK(std::abs(e.vectors(0, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(e.vectors(2, 1)) == doctest::Approx(1.0));
    CHECK(std::abs(e.vectors(1, 2)) == doctest::Approx(1.0));

    std::mt19937_64 rng(4);
    std::normal_distribution<double> g;
    Matrix m(10, 10);
    for (std::size_t i = 0; i < 10; ++i) {
        for (std::size_t j = 0; j <= i; ++j) m(i, j) = m(j, i) = g(rng);
    }
    const auto r = sym_eig(m);
    Matrix lam(10, 10);
    for (std::size_t i = 0; i < 10; ++i) lam(i, i) = r.values[i];
    const Matrix back = multiply(multiply(r.vectors, lam), transpose(r.vectors));
    Matrix diff = back;
    for (std::size_t k = 0; k < diff.data().size(); ++k) diff.data()[k] -= m.data()[k];
    CHECK(frobenius_norm(diff) / frobenius_norm(m) < 1e-10);
    Matrix vtv = multiply(transpose(r.vectors), r.vectors);
    for (std::size_t i = 0; i < 10; ++i) vtv(i, i) -= 1.0;
    CHECK(frobenius_norm(vtv) < 1e-10);
    for (std::size_t i = 0; i + 1 < 10; ++i) CHECK(r.values[i] >= r.values[i + 1]);
    // Residual M v = lambda v.
    for (std::size_t k = 0; k < 10; ++k) {
        double res = 0.0;
        for (std::size_t i = 0; i < 10; ++i) {
            double mv = 0.0;
            for (std::size_t j = 0; j < 10; ++j) mv += m(i, j) * r.vectors(j, k);
            res += std::pow(mv - r.values[k] * r.vectors(i, k), 2);
        }
        CHECK(std::sqrt(res) < 1e-9 * frobenius_norm(m));
    }
}

TEST_CASE("rotate: identity, group property, isometry, centroid")
{
    std::mt19937_64 rng(1);
    const auto s = oracle::random_shape(rng, 30, false);
    CHECK(oracle::max_point_gap(rotate(s, 0, 0, 0), s) < 1e-15);
    CHECK(oracle::max_point_gap(rotate(rotate(s, 90, 0, 0), 90, 0, 0), rotate(s, 180, 0, 0)) < 1e-12);
    const auto r = rotate(s, 33, -71, 140);
    const Matrix a = oracle::distances(s), b = oracle::distances(r);
    for (std::size_t k = 0; k < a.data().size(); ++k) CHECK(std::abs(a.data()[k] - b.data()[k]) < 1e-12);
    const auto c0 = centroid(s), c1 = centroid(r);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(c0[k] - c1[k]) < 1e-12);
}

TEST_CASE("orthographic projection of the identity pose keeps x, y")
{
    std::mt19937_64 rng(2);
    const auto s = oracle::random_shape(rng, 20, false);
    const auto p = project(s, ViewParams{});
    LandmarkSet2D xy;
    for (const auto& q : s.points) xy.points.push_back({q[0], q[1]});
    const auto want = normalize(xy);
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(p.points[i][0] == doctest::Approx(want.points[i][0]).epsilon(1e-12));
        CHECK(p.points[i][1] == doctest::Approx(want.points[i][1]).epsilon(1e-12));
    }
    CHECK(rms_radius(p) == doctest::Approx(1.0));
}

TEST_CASE("scaling the 3D input leaves the orthographic output unchanged")
{
    std::mt19937_64 rng(3);
    const auto s = oracle::random_shape(rng, 25, false);
    auto big = s;
    for (auto& q : big.points) for (double& v : q) v *= 7.5;
    ViewParams v;
    v.yaw_deg = 45;
    const auto a = render_view(s, v), b = render_view(big, v);
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(std::abs(a.points[i][0] - b.points[i][0]) < 1e-12);
        CHECK(std::abs(a.points[i][1] - b.points[i][1]) < 1e-12);
    }
}

TEST_CASE("perspective with tiny fov converges to orthographic")
{
    std::mt19937_64 rng(4);
    const auto s = oracle::random_shape(rng, 40);
    ViewParams ortho;
    ViewParams persp;
    persp.projection = Projection::Perspective;
    persp.fov_deg = 0.01;
    const auto a = project(s, ortho), b = project(s, persp);
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(std::abs(a.points[i][0] - b.points[i][0]) < 1e-3);
        CHECK(std::abs(a.points[i][1] - b.points[i][1]) < 1e-3);
    }
    persp.fov_deg = 5.0;
    const auto c = project(s, persp);
    double gap = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) gap = std::max(gap, std::abs(a.points[i][0] - c.points[i][0]));
    CHECK(gap > 1e-4);  // a real perspective effect at 5 degrees
    persp.fov_deg = 180.0;
    CHECK_THROWS_AS(project(s, persp), Error);
}

TEST_CASE("coplanar shape: orthographic 2D distances equal 3D distances after matching normalization")
{
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    LandmarkSet3D s;
    for (int i = 0; i < 15; ++i) s.points.push_back({g(rng), g(rng), 0.4});
    const auto n3 = normalize(s);
    const auto p = project(s, ViewParams{});
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = 0; j < s.size(); ++j) {
            CHECK(distance(p.points[i], p.points[j]) == doctest::Approx(distance(n3.points[i], n3.points[j])).epsilon(1e-12));
        }
    }
}

TEST_CASE("procrustes: identity, similarity recovery, reflection, invariance")
{
    std::mt19937_64 rng(6);
    const auto t = oracle::random_shape(rng, 30);
    const auto same = procrustes_align(t, t);
    CHECK(same.sse < 1e-20);
    CHECK(same.transform.scale == doctest::Approx(1.0));
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) CHECK(same.transform.rotation[i][j] == doctest::Approx(i == j ? 1.0 : 0.0));
    }

    SimilarityTransform tf;
    tf.rotation = rotation_matrix(20, -35, 70);
    tf.scale = 2.3;
    tf.translation = {0.5, -1.0, 3.0};
    const auto moved = tf.apply(t);
    CHECK(procrustes_align(moved, t).sse < 1e-20);
    CHECK(procrustes_align(moved, t).rmse < 1e-10);

    auto mirrored = t;
    for (auto& p : mirrored.points) p[2] = -p[2];
    const auto refl = procrustes_align(mirrored, t);
    CHECK(refl.reflected);
    CHECK(refl.rmse < 1e-10);
    CHECK(procrustes_align(mirrored, t, true).rmse > 1e-3);

    const auto noisy = oracle::random_shape(rng, 30);
    const double base = procrustes_align(noisy, t).sse;
    CHECK(procrustes_align(tf.apply(noisy), t).sse == doctest::Approx(base).epsilon(1e-10));

    LandmarkSet3D flat;
    flat.points.assign(30, {1.0, 1.0, 1.0});
    CHECK_THROWS_AS(procrustes_align(t, flat), Error);
}

TEST_CASE("procrustes scale matches a rotation grid search on 3 points")
{
    // Planar 3-point sets in the xy plane; optimal rotation is about z.
    LandmarkSet3D target{{{0, 0, 0}, {2, 0, 0}, {0, 1, 0}}, ""};
    LandmarkSet3D moving{{{1, 1, 0}, {1, 2.5, 0}, {0.2, 1.1, 0}}, ""};
    const auto fit = procrustes_align(moving, target, true);
    // Grid search over angle with the closed-form optimal scale and translation for each angle.
    auto centred = [](const LandmarkSet3D& s) {
        const auto c = centroid(s);
        LandmarkSet3D out = s;
        for (auto& p : out.points) for (int k = 0; k < 3; ++k) p[k] -= c[k];
        return out;
    };
    const auto a = centred(moving), b = centred(target);
    double best = INFINITY, best_scale = 0;
    for (int step = 0; step < 360000; ++step) {
        const double th = 2 * M_PI * step / 360000.0;
        double num = 0, den = 0;
        std::vector<Point3> r;
        for (const auto& p : a.points) r.push_back({std::cos(th) * p[0] - std::sin(th) * p[1], std::sin(th) * p[0] + std::cos(th) * p[1], 0});
        for (std::size_t i = 0; i < 3; ++i) {
            num += r[i][0] * b.points[i][0] + r[i][1] * b.points[i][1];
            den += r[i][0] * r[i][0] + r[i][1] * r[i][1];
        }
        const double s = num / den;
        double sse = 0;
        for (std::size_t i = 0; i < 3; ++i) sse += std::pow(s * r[i][0] - b.points[i][0], 2) + std::pow(s * r[i][1] - b.points[i][1], 2);
        if (sse < best) {
            best = sse;
            best_scale = s;
        }
    }
    CHECK(fit.sse == doctest::Approx(best).epsilon(1e-6));
    // Angles th and th + pi give the same fit with opposite signs of s.
    CHECK(fit.transform.scale == doctest::Approx(std::abs(best_scale)).epsilon(1e-4));
}

TEST_CASE("normalize rejects coincident points")
{
    LandmarkSet2D s;
    s.points.assign(5, {0.3, 0.3});
    CHECK_THROWS_AS(normalize(s), Error);
}
