/*
 * lmds - 3D facial landmark depth from a single 2D view, by learned
 *        pairwise dissimilarities and multidimensional scaling.
 *
 * File: include/lmds/synthdata.hpp
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

#include "lmds/geometry.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace lmds::synth {

inline constexpr int kSchemaVersion = 1;
inline constexpr int kGeneratorVersion = 1;

/// Mean shape plus an orthonormal deformation basis with per-mode standard deviations.
struct LandmarkModel
{
    LandmarkSet3D mean_shape;
    std::vector<std::vector<double>> basis;  // K vectors of length 3n, (x, y, z) per landmark
    std::vector<double> sigmas;
    std::vector<std::size_t> mirror;  // bilateral partner of each landmark (itself on the midline)

    std::size_t landmarks() const noexcept { return mean_shape.size(); }
    std::size_t modes() const noexcept { return basis.size(); }
    /// CRC32 over topology id, mean shape, basis and sigmas.
    std::uint32_t hash() const;
};

/// Recipe for a model; enough to rebuild it bit for bit.
struct ModelSpec
{
    std::string source = "procedural";  // or "imported"
    std::size_t landmarks = 72;
    std::size_t modes = 20;
    std::uint64_t seed = 1;
    double deviation_rms = 0.15;  // RMS per-landmark displacement of a random face
    std::filesystem::path template_path;  // imported models only
    std::filesystem::path basis_path;

    bool operator==(const ModelSpec&) const = default;
};

/// Face-like procedural model: midline points plus mirrored jaw, brow, eye,
/// nose and mouth curves on a head-shaped depth profile, centred at unit RMS,
/// and K orthonormalized smooth random fields. sigma_k decays as 0.9^k and
/// is scaled so a random face moves each landmark by `deviation_rms` on average.
LandmarkModel build_default_model(std::size_t n, std::size_t k, std::uint64_t seed, double deviation_rms = 0.15);

/// Presets "synthetic-72" and "synthetic-51" with K = 20.
ModelSpec preset(const std::string& name, std::uint64_t seed);

/**
 * Reads a user-supplied model. The template file has one "x y z" line per
 * landmark; the basis file has one line per mode, "sigma v_1 ... v_3n".
 * The basis is re-orthonormalized; throws Error(BadFormat) on shape problems.
 */
LandmarkModel import_model(const std::filesystem::path& template_path, const std::filesystem::path& basis_path);

LandmarkModel build_model(const ModelSpec& spec);

std::string topology_id(std::size_t n);

/// mean_shape + sum_k c_k * basis_k.
LandmarkSet3D synthesize(const LandmarkModel& model, std::span<const double> coefficients);

struct ViewDistribution
{
    std::vector<double> yaw_choices{-45.0, 0.0, 45.0};
    double perspective_probability = 0.5;
    double azimuth_min = 0.0, azimuth_max = 45.0;
    double elevation_min = 0.0, elevation_max = 30.0;
    double fov_min = 0.0, fov_max = 5.0;

    bool operator==(const ViewDistribution&) const = default;
};

struct ShapeSample
{
    std::uint64_t face_id = 0;
    std::vector<double> coefficients;
    LandmarkSet3D gt_3d;
    ViewParams view;
    LandmarkSet2D input_2d;
    LandmarkSet2D profile_2d;

    bool operator==(const ShapeSample&) const = default;
};

/// Orthographic, yaw 0: the view every input is normalized towards.
ViewParams canonical_view();

ShapeSample make_sample(const LandmarkModel& model, std::uint64_t face_id, std::vector<double> coefficients,
                        const ViewParams& view);

/// Face `offset + i` is drawn from its own generator seeded from (seed, offset + i),
/// so any slice of a dataset can be produced independently.
std::vector<ShapeSample> sample_faces(const LandmarkModel& model, std::size_t count, const ViewDistribution& views,
                                      std::uint64_t seed, std::uint64_t offset = 0);

std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index) noexcept;

struct DatasetManifest
{
    int schema_version = kSchemaVersion;
    int generator_version = kGeneratorVersion;
    std::string split = "train";
    std::uint64_t seed = 1;
    std::uint64_t count = 0;
    std::uint64_t offset = 0;
    ModelSpec model;
    std::string model_hash;
    ViewDistribution views;

    bool operator==(const DatasetManifest&) const = default;
};

struct Dataset
{
    DatasetManifest manifest;
    std::vector<ShapeSample> samples;

    bool operator==(const Dataset&) const = default;
};

Dataset generate(const DatasetManifest& recipe);
/// Rebuilds the model and samples from the manifest alone; throws
/// Error(SchemaMismatch) if the model hash no longer matches.
Dataset regenerate(const DatasetManifest& manifest);

std::filesystem::path manifest_path(const std::filesystem::path& stem);
std::filesystem::path records_path(const std::filesystem::path& stem);

/// Writes `<stem>.manifest` and `<stem>.lmds`.
void write_dataset(const Dataset& dataset, const std::filesystem::path& stem);
/// Errors: MissingInput, SchemaMismatch, MalformedRecord (message names the line).
Dataset read_dataset(const std::filesystem::path& stem);

std::string format_manifest(const DatasetManifest& manifest);
DatasetManifest parse_manifest(const std::string& text);

} // namespace lmds::synth
