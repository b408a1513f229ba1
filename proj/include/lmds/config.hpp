/*
 * lmds - 3D facial landmark depth from a single 2D view, by learned
 *        pairwise dissimilarities and multidimensional scaling.
 *
 * File: include/lmds/config.hpp
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

#include "lmds/dissim.hpp"
#include "lmds/mds.hpp"
#include "lmds/synthdata.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace lmds {

/// Every knob of the command-line pipeline. Defaults are the documented values;
/// `format_config` prints them all in the file syntax.
struct PipelineConfig
{
    std::uint64_t seed = 1;
    std::filesystem::path out_dir = "out";

    std::size_t train_count = 2000;
    std::size_t test_count = 500;

    synth::ModelSpec model;
    synth::ViewDistribution views;

    std::vector<std::size_t> viewnorm_hidden{64, 32, 64};
    int viewnorm_epochs = 600;
    double viewnorm_learning_rate = 1e-3;
    std::size_t viewnorm_batch_size = 32;
    double viewnorm_validation_fraction = 0.1;

    std::size_t dissim_width = 20;
    std::size_t dissim_hidden = 5;
    int dissim_epochs = 12;
    double dissim_learning_rate = 1e-3;
    dissim::BatchScheme dissim_scheme = dissim::BatchScheme::SameFace;
    double dissim_validation_fraction = 0.1;

    mds::Mode mds_mode = mds::Mode::NonMetric;
    mds::SmacofOptions smacof;

    bool skip_viewnorm = false;

    std::size_t eval_size = 500;
    std::size_t eval_reps = 10;
    bool eval_align = true;

    std::size_t ablate_faces = 500;
    int ablate_epochs = 3;
    std::size_t ablate_seeds = 3;

    std::size_t plot_faces = 3;
};

/// Independent stream `stream` of the master seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

namespace seed_stream {
inline constexpr std::uint64_t kViewnormInit = 101;
inline constexpr std::uint64_t kViewnormTrain = 102;
inline constexpr std::uint64_t kDissimInit = 201;
inline constexpr std::uint64_t kDissimTrain = 202;
inline constexpr std::uint64_t kEvaluation = 301;
inline constexpr std::uint64_t kAblation = 400;  // + seed index
} // namespace seed_stream

/// Sets one key from its text value. Throws Error(Config) for unknown keys or
/// unparsable values.
void apply_setting(PipelineConfig& config, const std::string& key, const std::string& value);

/// `key = value` lines; `#` starts a comment. Errors name the line.
PipelineConfig parse_config(const std::string& text, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& path);

/// All keys with their current values, one per line, in file syntax.
std::string format_config(const PipelineConfig& config);

/// The synthetic dataset recipes implied by the config.
synth::DatasetManifest train_recipe(const PipelineConfig& config);
synth::DatasetManifest test_recipe(const PipelineConfig& config);

} // namespace lmds
