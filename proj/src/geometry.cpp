/*
 * lmds - 3D facial landmark depth from a single 2D view, by learned
 *        pairwise dissimilarities and multidimensional scaling.
 *
 * File: src/geometry.cpp
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
#include "lmds/geometry.hpp"

#include "lmds/error.hpp"
#include "lmds/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lmds {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double dot3(const Point3& a, const Point3& b) noexcept
{
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

Point3 cross3(const Point3& a, const Point3& b) noexcept
{
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

Point3 mul(const Mat3& m, const Point3& p) noexcept
{
    return {m[0][0] * p[0] + m[0][1] * p[1] + m[0][2] * p[2], m[1][0] * p[0] + m[1][1] * p[1] + m[1][2] * p[2],
            m[2][0] * p[0] + m[2][1] * p[1] + m[2][2] * p[2]};
}

Mat3 mul(const Mat3& a, const Mat3& b) noexcept
{
    Mat3 out{};
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c] + a[r][2] * b[2][c];
        }
    }
    return out;
}

double det3(const Mat3& m) noexcept
{
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
           + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

template <class Points>
void check_finite(const Points& points, const char* what)
{
    for (const auto& p : points) {
        for (double v : p) {
            if (!std::isfinite(v)) {
                throw Error(ErrorCode::NonFinite, std::string(what) + ": non-finite coordinate");
            }
        }
    }
}

template <class Shape>
auto centroid_of(const Shape& shape)
{
    typename std::decay_t<decltype(shape.points)>::value_type c{};
    if (shape.points.empty()) {
        return c;
    }
    for (const auto& p : shape.points) {
        for (std::size_t k = 0; k < c.size(); ++k) {
            c[k] += p[k];
        }
    }
    for (auto& v : c) {
        v /= static_cast<double>(shape.points.size());
    }
    return c;
}

template <class Shape>
double rms_of(const Shape& shape)
{
    if (shape.points.empty()) {
        return 0.0;
    }
    const auto c = centroid_of(shape);
    double s = 0.0;
    for (const auto& p : shape.points) {
        for (std::size_t k = 0; k < c.size(); ++k) {
            s += (p[k] - c[k]) * (p[k] - c[k]);
        }
    }
    return std::sqrt(s / static_cast<double>(shape.points.size()));
}

template <class Shape>
Shape normalize_of(const Shape& shape)
{
    const auto c = centroid_of(shape);
    const double r = rms_of(shape);
    if (!(r > 0.0)) {
        throw Error(ErrorCode::Degenerate, "cannot normalize a landmark set whose points all coincide");
    }
    Shape out = shape;
    for (auto& p : out.points) {
        for (std::size_t k = 0; k < c.size(); ++k) {
            p[k] = (p[k] - c[k]) / r;
        }
    }
    return out;
}

} // namespace

const char* to_string(Projection p) noexcept
{
    return p == Projection::Perspective ? "perspective" : "orthographic";
}

Projection projection_from_string(const std::string& name)
{
    if (name == "orthographic" || name == "ortho") return Projection::Orthographic;
    if (name == "perspective" || name == "persp") return Projection::Perspective;
    throw Error(ErrorCode::InvalidArgument, "unknown projection '" + name + "'");
}

Point3 centroid(const LandmarkSet3D& shape) { return centroid_of(shape); }
Point2 centroid(const LandmarkSet2D& shape) { return centroid_of(shape); }
double rms_radius(const LandmarkSet3D& shape) { return rms_of(shape); }
double rms_radius(const LandmarkSet2D& shape) { return rms_of(shape); }
LandmarkSet2D normalize(const LandmarkSet2D& shape) { return normalize_of(shape); }
LandmarkSet3D normalize(const LandmarkSet3D& shape) { return normalize_of(shape); }

double distance(const Point3& a, const Point3& b) noexcept
{
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    const double dz = a[2] - b[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double distance(const Point2& a, const Point2& b) noexcept
{
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    return std::sqrt(dx * dx + dy * dy);
}

Mat3 rotation_matrix(double yaw_deg, double pitch_deg, double roll_deg)
{
    if (!std::isfinite(yaw_deg) || !std::isfinite(pitch_deg) || !std::isfinite(roll_deg)) {
        throw Error(ErrorCode::NonFinite, "rotation angles must be finite");
    }
    const double cy = std::cos(yaw_deg * kDeg), sy = std::sin(yaw_deg * kDeg);
    const double cp = std::cos(pitch_deg * kDeg), sp = std::sin(pitch_deg * kDeg);
    const double cr = std::cos(roll_deg * kDeg), sr = std::sin(roll_deg * kDeg);
    const Mat3 ry{{{cy, 0, sy}, {0, 1, 0}, {-sy, 0, cy}}};
    const Mat3 rx{{{1, 0, 0}, {0, cp, -sp}, {0, sp, cp}}};
    const Mat3 rz{{{cr, -sr, 0}, {sr, cr, 0}, {0, 0, 1}}};
    return mul(rz, mul(rx, ry));
}

LandmarkSet3D rotate(const LandmarkSet3D& shape, double yaw_deg, double pitch_deg, double roll_deg)
{
    const Mat3 r = rotation_matrix(yaw_deg, pitch_deg, roll_deg);
    const Point3 c = centroid(shape);
    LandmarkSet3D out = shape;
    for (auto& p : out.points) {
        const Point3 q = mul(r, Point3{p[0] - c[0], p[1] - c[1], p[2] - c[2]});
        p = {q[0] + c[0], q[1] + c[1], q[2] + c[2]};
    }
    return out;
}

LandmarkSet2D project(const LandmarkSet3D& shape, const ViewParams& view)
{
    check_finite(shape.points, "project");
    LandmarkSet2D out;
    out.topology_id = shape.topology_id;
    out.points.reserve(shape.size());
    if (view.projection == Projection::Orthographic) {
        for (const auto& p : shape.points) {
            out.points.push_back({p[0], p[1]});
        }
        return normalize(out);
    }

    if (!std::isfinite(view.azimuth_deg) || !std::isfinite(view.elevation_deg) || !std::isfinite(view.fov_deg)) {
        throw Error(ErrorCode::InvalidArgument, "perspective view parameters must be finite");
    }
    if (view.fov_deg >= 180.0) {
        throw Error(ErrorCode::InvalidArgument, "field of view must be below 180 degrees");
    }
    const double az = view.azimuth_deg * kDeg;
    const double el = view.elevation_deg * kDeg;
    const Point3 back{std::sin(az) * std::cos(el), std::sin(el), std::cos(az) * std::cos(el)};
    Point3 right = cross3({0.0, 1.0, 0.0}, back);
    const double right_norm = std::sqrt(dot3(right, right));
    if (right_norm < 1e-12) {
        throw Error(ErrorCode::InvalidArgument, "camera looks straight along the vertical axis");
    }
    right = {right[0] / right_norm, right[1] / right_norm, right[2] / right_norm};
    const Point3 up = cross3(back, right);

    const Point3 c = centroid(shape);
    double radius = 0.0;
    for (const auto& p : shape.points) {
        radius = std::max(radius, distance(p, c));
    }
    if (!(radius > 0.0)) {
        throw Error(ErrorCode::Degenerate, "cannot project a landmark set whose points all coincide");
    }
    const bool pinhole = view.fov_deg > 0.0;
    const double dist = pinhole ? radius / std::tan(0.5 * view.fov_deg * kDeg) : 0.0;
    for (std::size_t i = 0; i < shape.size(); ++i) {
        const auto& p = shape.points[i];
        const Point3 q{p[0] - c[0], p[1] - c[1], p[2] - c[2]};
        const double xc = dot3(right, q);
        const double yc = dot3(up, q);
        if (!pinhole) {
            out.points.push_back({xc, yc});
            continue;
        }
        const double depth = dist - dot3(back, q);
        if (!(depth > 0.0)) {
            throw Error(ErrorCode::Degenerate, "landmark " + std::to_string(i) + " is at or behind the camera plane");
        }
        // Scaled by the camera distance so the fov -> 0 limit is the orthographic view.
        out.points.push_back({xc * dist / depth, yc * dist / depth});
    }
    return normalize(out);
}

LandmarkSet2D render_view(const LandmarkSet3D& shape, const ViewParams& view)
{
    return project(rotate(shape, view.yaw_deg, 0.0, 0.0), view);
}

Point3 SimilarityTransform::apply(const Point3& p) const noexcept
{
    const Point3 q = mul(rotation, p);
    return {scale * q[0] + translation[0], scale * q[1] + translation[1], scale * q[2] + translation[2]};
}

LandmarkSet3D SimilarityTransform::apply(const LandmarkSet3D& shape) const
{
    LandmarkSet3D out = shape;
    for (auto& p : out.points) {
        p = apply(p);
    }
    return out;
}

ProcrustesResult procrustes_align(const LandmarkSet3D& moving, const LandmarkSet3D& target, bool proper_rotation)
{
    if (moving.size() != target.size()) {
        throw Error(ErrorCode::DimensionMismatch, "procrustes_align: " + std::to_string(moving.size())
                                                      + " moving points vs " + std::to_string(target.size())
                                                      + " target points");
    }
    check_finite(moving.points, "procrustes_align");
    check_finite(target.points, "procrustes_align");
    if (rms_radius(target) == 0.0) {
        throw Error(ErrorCode::Degenerate, "procrustes_align: target points all coincide");
    }
    if (rms_radius(moving) == 0.0) {
        throw Error(ErrorCode::Degenerate, "procrustes_align: moving points all coincide");
    }
    const std::size_t n = moving.size();
    const Point3 mc = centroid(moving);
    const Point3 gc = centroid(target);

    Mat3 a{};
    double moving_ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point3 m{moving.points[i][0] - mc[0], moving.points[i][1] - mc[1], moving.points[i][2] - mc[2]};
        const Point3 g{target.points[i][0] - gc[0], target.points[i][1] - gc[1], target.points[i][2] - gc[2]};
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) {
                a[r][c] += g[r] * m[c];
            }
        }
        moving_ss += dot3(m, m);
    }

    // SVD of the 3x3 cross-covariance A = U S V^T through the eigenvectors of A^T A.
    Matrix ata(3, 3);
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            ata(r, c) = a[0][r] * a[0][c] + a[1][r] * a[1][c] + a[2][r] * a[2][c];
        }
    }
    const EigenDecomposition eig = sym_eig(ata);
    std::array<Point3, 3> v{};
    std::array<Point3, 3> u{};
    std::array<double, 3> s{};
    for (int k = 0; k < 3; ++k) {
        v[k] = {eig.vectors(0, k), eig.vectors(1, k), eig.vectors(2, k)};
        s[k] = std::sqrt(std::max(eig.values[k], 0.0));
    }
    for (int k = 0; k < 3; ++k) {
        Point3 col = mul(a, v[k]);
        for (int j = 0; j < k; ++j) {
            const double proj = dot3(u[j], col);
            for (int d = 0; d < 3; ++d) {
                col[d] -= proj * u[j][d];
            }
        }
        double norm = std::sqrt(dot3(col, col));
        if (norm <= 1e-10 * s[0]) {
            // Rank-deficient direction: any unit vector completing the basis will do,
            // since its singular value contributes nothing to the fit.
            if (k == 2) {
                col = cross3(u[0], u[1]);
            } else {
                const Point3& prev = u[0];
                int axis = 0;
                for (int d = 1; d < 3; ++d) {
                    if (std::abs(prev[d]) < std::abs(prev[axis])) {
                        axis = d;
                    }
                }
                Point3 e{0, 0, 0};
                e[axis] = 1.0;
                col = cross3(prev, e);
            }
            norm = std::sqrt(dot3(col, col));
        }
        u[k] = {col[0] / norm, col[1] / norm, col[2] / norm};
    }

    auto compose = [&]() {
        Mat3 r{};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                r[i][j] = u[0][i] * v[0][j] + u[1][i] * v[1][j] + u[2][i] * v[2][j];
            }
        }
        return r;
    };
    Mat3 rot = compose();
    double trace = s[0] + s[1] + s[2];
    if (proper_rotation && det3(rot) < 0.0) {
        u[2] = {-u[2][0], -u[2][1], -u[2][2]};
        rot = compose();
        trace = s[0] + s[1] - s[2];
    }

    ProcrustesResult result;
    result.transform.rotation = rot;
    result.transform.scale = trace / moving_ss;
    const Point3 rm = mul(rot, mc);
    result.transform.translation = {gc[0] - result.transform.scale * rm[0], gc[1] - result.transform.scale * rm[1],
                                    gc[2] - result.transform.scale * rm[2]};
    result.aligned = result.transform.apply(moving);
    result.aligned.topology_id = target.topology_id;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = distance(result.aligned.points[i], target.points[i]);
        result.sse += d * d;
    }
    result.rmse = std::sqrt(result.sse / static_cast<double>(n));
    result.reflected = det3(rot) < 0.0;
    return result;
}

} // namespace lmds
