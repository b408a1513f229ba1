/*
 * lmds - 3D facial landmark depth from a single 2D view, by learned
 *        pairwise dissimilarities and multidimensional scaling.
 *
 * File: include/lmds/commands.hpp
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

#include "lmds/config.hpp"
#include "lmds/metrics.hpp"
#include "lmds/pipeline.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace lmds::cli {

/// Where each artifact lives under the configured output directory.
struct Layout
{
    std::filesystem::path root;
    std::filesystem::path train_stem() const { return root / "data" / "train"; }
    std::filesystem::path test_stem() const { return root / "data" / "test"; }
    std::filesystem::path viewnorm_model() const { return root / "models" / "viewnorm.llmw"; }
    std::filesystem::path dissim_model() const { return root / "models" / "dissim.llmw"; }
    std::filesystem::path viewnorm_log() const { return root / "logs" / "viewnorm_loss.csv"; }
    std::filesystem::path dissim_log() const { return root / "logs" / "dissim_loss.csv"; }
    std::filesystem::path reconstructions(bool skip_viewnorm) const;
    std::filesystem::path timings(bool skip_viewnorm) const;
    std::filesystem::path report_json(bool skip_viewnorm) const;
    std::filesystem::path report_csv(bool skip_viewnorm) const;
    std::filesystem::path ablation_csv() const { return root / "ablation.csv"; }
    std::filesystem::path ablation_summary() const { return root / "ablation_summary.csv"; }
    std::filesystem::path ablation_svg() const { return root / "ablation.svg"; }
    std::filesystem::path plots() const { return root / "plots"; }
};

Layout layout(const PipelineConfig& config);

struct GenerateResult
{
    synth::Dataset train;
    synth::Dataset test;
};

/// Writes the train and test splits with their manifests.
GenerateResult cmd_generate(const PipelineConfig& config, std::ostream& out);

/// Loads a split and checks that it was generated from this config.
synth::Dataset load_split(const PipelineConfig& config, bool test);

enum class Which { Viewnorm, Dissim, Both };
Which which_from_string(const std::string& name);

struct TrainSummary
{
    std::size_t viewnorm_parameters = 0;  // 0 when not trained in this call
    std::size_t dissim_parameters = 0;
    std::vector<nn::EpochLog> viewnorm_log;
    std::vector<nn::EpochLog> dissim_log;
};

/// Default-architecture parameter counts for the configured landmark count.
std::size_t default_viewnorm_parameters(const PipelineConfig& config);
std::size_t default_dissim_parameters(const PipelineConfig& config);

TrainSummary cmd_train(const PipelineConfig& config, Which which, std::ostream& out);

struct ReconstructRequest
{
    std::optional<std::uint64_t> face_id;                // one face of the chosen split
    std::optional<std::filesystem::path> landmarks;      // "x y" per line
    bool train_split = false;
    std::optional<std::filesystem::path> output;         // default under the output directory
};

std::vector<ReconstructionResult> cmd_reconstruct(const PipelineConfig& config, const ReconstructRequest& request,
                                                  std::ostream& out);

struct MethodScores
{
    std::string name;
    metrics::EvalReport report;
};

struct EvaluationSummary
{
    MethodScores pipeline;
    MethodScores baseline;
    double mse_ratio = 0.0;  // pipeline / baseline, means over repetitions
    std::optional<metrics::WilcoxonResult> wilcoxon;
    std::size_t orthographic_count = 0, perspective_count = 0;
    double orthographic_mse = 0.0, perspective_mse = 0.0;  // plain means per projection type
    std::size_t frontal_count = 0;  // orthographic at yaw 0
    double frontal_mse = 0.0;
};

/// Scores the pipeline on the test split against the mean training shape.
/// Reconstructs from the trained models unless `reconstructions` is given.
EvaluationSummary cmd_evaluate(const PipelineConfig& config,
                               const std::optional<std::filesystem::path>& reconstructions, std::ostream& out);

struct AblationRun
{
    std::uint64_t seed = 0;
    std::vector<nn::EpochLog> same_face;
    std::vector<nn::EpochLog> shuffled;
};

/// Trains the dissimilarity net with each batching scheme from identical
/// initial weights, data and step counts, for `ablate_seeds` seeds.
std::vector<AblationRun> cmd_ablate(const PipelineConfig& config, std::ostream& out);

/// Three plane projections per face, prediction aligned onto GT.
std::vector<std::filesystem::path> cmd_plot(const PipelineConfig& config,
                                            const std::optional<std::filesystem::path>& reconstructions,
                                            std::ostream& out);

LandmarkSet2D read_landmarks_2d(const std::filesystem::path& path);

} // namespace lmds::cli
