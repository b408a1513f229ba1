/*
 * lmds - 3D facial landmark depth from a single 2D view, by learned
 *        pairwise dissimilarities and multidimensional scaling.
 *
 * File: include/lmds/pipeline.hpp
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
#include "lmds/dissim.hpp"
#include "lmds/mds.hpp"
#include "lmds/nn.hpp"
#include "lmds/synthdata.hpp"
#include "lmds/viewnorm.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace lmds {

/// Wall time per stage in microseconds, from a monotonic clock.
struct StageTimings
{
    double viewnorm_us = 0.0;
    double dissim_us = 0.0;
    double mds_us = 0.0;
};

struct ReconstructionResult
{
    std::uint64_t face_id = 0;
    LandmarkSet3D predicted;
    std::uint32_t dissim_hash = 0;  // CRC32 of the dissimilarity matrix doubles
    double stress = 0.0;
    int iterations = 0;
    StageTimings timings;
};

struct PipelineOptions
{
    bool skip_viewnorm = false;
    mds::Mode mode = mds::Mode::NonMetric;
    mds::SmacofOptions smacof;
};

/**
 * normalize -> view normalizer -> normalize -> dissimilarity matrix -> 3D
 * embedding. With skip_viewnorm the observed view goes straight to the
 * dissimilarity net. MDS failures are rethrown with the face id.
 */
ReconstructionResult reconstruct(const nn::MlpModel& viewnorm_model, const nn::MlpModel& dissim_model,
                                 const LandmarkSet2D& input, std::uint64_t face_id, const PipelineOptions& options);

std::vector<ReconstructionResult> reconstruct_all(const nn::MlpModel& viewnorm_model, const nn::MlpModel& dissim_model,
                                                  std::span<const synth::ShapeSample> samples,
                                                  const PipelineOptions& options);

/// Training pairs for the two networks. The dissimilarity net learns from the
/// canonical view, the view normalizer maps each observed view onto it.
std::vector<dissim::TrainingFace> training_faces(std::span<const synth::ShapeSample> samples);
std::vector<viewnorm::ViewPair> view_pairs(std::span<const synth::ShapeSample> samples);

/// Per-landmark mean of the ground-truth shapes: the constant baseline.
LandmarkSet3D mean_shape(std::span<const synth::ShapeSample> samples);

/// Text file of reconstructions without timings, so equal inputs give equal bytes.
std::string format_reconstructions(std::span<const ReconstructionResult> results);
std::vector<ReconstructionResult> parse_reconstructions(const std::string& text);

/// face_id,viewnorm_us,dissim_us,mds_us
std::string format_timings(std::span<const ReconstructionResult> results);

} // namespace lmds
