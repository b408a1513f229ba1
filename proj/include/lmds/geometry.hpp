/*
 * lmds - 3D facial landmark depth from a single 2D view, by learned
 *        pairwise dissimilarities and multidimensional scaling.
 *
 * File: include/lmds/geometry.hpp
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

#include <array>
#include <string>
#include <vector>

namespace lmds {

using Point2 = std::array<double, 2>;
using Point3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

struct LandmarkSet2D
{
    std::vector<Point2> points;
    std::string topology_id;

    std::size_t size() const noexcept { return points.size(); }
    bool operator==(const LandmarkSet2D&) const = default;
};

struct LandmarkSet3D
{
    std::vector<Point3> points;
    std::string topology_id;

    std::size_t size() const noexcept { return points.size(); }
    bool operator==(const LandmarkSet3D&) const = default;
};

enum class Projection { Orthographic, Perspective };

const char* to_string(Projection p) noexcept;
Projection projection_from_string(const std::string& name);

/// Camera description. `yaw_deg` poses the head; azimuth, elevation and fov
/// place a pinhole camera and only matter for Perspective.
struct ViewParams
{
    Projection projection = Projection::Orthographic;
    double yaw_deg = 0.0;
    double azimuth_deg = 0.0;
    double elevation_deg = 0.0;
    double fov_deg = 0.0;

    bool operator==(const ViewParams&) const = default;
};

Point3 centroid(const LandmarkSet3D& shape);
Point2 centroid(const LandmarkSet2D& shape);

/// sqrt(mean over points of |p - centroid|^2).
double rms_radius(const LandmarkSet3D& shape);
double rms_radius(const LandmarkSet2D& shape);

/// Translate to zero mean and scale to unit RMS radius. Throws Error(Degenerate)
/// when all points coincide.
LandmarkSet2D normalize(const LandmarkSet2D& shape);
LandmarkSet3D normalize(const LandmarkSet3D& shape);

/// R = Rz(roll) * Rx(pitch) * Ry(yaw); yaw turns the head about the vertical axis.
Mat3 rotation_matrix(double yaw_deg, double pitch_deg, double roll_deg);

/// Rigid rotation about the centroid.
LandmarkSet3D rotate(const LandmarkSet3D& shape, double yaw_deg, double pitch_deg, double roll_deg);

/**
 * Projects to normalized 2D (zero mean, unit RMS).
 *
 * Orthographic drops z. Perspective puts a pinhole camera on a sphere around
 * the centroid at (azimuth, elevation), looking at the centroid, far enough
 * away that the bounding sphere of the shape just fills the field of view.
 * A non-positive fov is the orthographic limit of that camera. Throws
 * Error(InvalidArgument) for fov >= 180 and Error(Degenerate) if any point
 * lands at or behind the camera plane.
 */
LandmarkSet2D project(const LandmarkSet3D& shape, const ViewParams& view);

/// project(rotate(shape, view.yaw_deg, 0, 0), view): the full rendering of a posed head.
LandmarkSet2D render_view(const LandmarkSet3D& shape, const ViewParams& view);

/// Maps m to scale * R * m + t.
struct SimilarityTransform
{
    Mat3 rotation{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    double scale = 1.0;
    Point3 translation{0, 0, 0};

    Point3 apply(const Point3& p) const noexcept;
    LandmarkSet3D apply(const LandmarkSet3D& shape) const;
};

struct ProcrustesResult
{
    LandmarkSet3D aligned;
    SimilarityTransform transform;
    double sse = 0.0;
    double rmse = 0.0;  // sqrt(sse / n)
    bool reflected = false;
};

/**
 * Least-squares similarity alignment of `moving` onto `target`.
 *
 * Reflections are allowed unless `proper_rotation` is set, since an MDS
 * embedding is only defined up to an orthogonal map. Throws
 * Error(DimensionMismatch) on unequal counts and Error(Degenerate) when either
 * set has all points coincident.
 */
ProcrustesResult procrustes_align(const LandmarkSet3D& moving, const LandmarkSet3D& target,
                                  bool proper_rotation = false);

double distance(const Point3& a, const Point3& b) noexcept;
double distance(const Point2& a, const Point2& b) noexcept;

} // namespace lmds
