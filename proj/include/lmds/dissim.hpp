/*
 * lmds - 3D facial landmark depth from a single 2D view, by learned
 *        pairwise dissimilarities and multidimensional scaling.
 *
 * File: include/lmds/dissim.hpp
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
#include "lmds/linalg.hpp"
#include "lmds/nn.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lmds::dissim {

/// (|a-b| per axis, a*b per axis, exp(-|a-b|) per axis). Swapping a and b
/// gives the same bits.
std::vector<double> make_pair_features(std::span<const double> a, std::span<const double> b);
std::array<double, 6> make_pair_features(const Point2& a, const Point2& b);

/// 6 -> `width` x `hidden` (ReLU) -> 1 (Softplus), with a shortcut from the
/// first hidden layer's output into the third hidden layer's input.
nn::MlpModel default_model(std::size_t width = 20, std::size_t hidden = 5);

double predict_distance(const nn::MlpModel& model, const Point2& a, const Point2& b);

/// All pairs evaluated in one batch; entry (i, j) for i < j is mirrored to
/// (j, i) and the diagonal is zero. Needs at least 4 landmarks.
Matrix build_dissimilarity_matrix(const nn::MlpModel& model, const LandmarkSet2D& landmarks);

enum class BatchScheme { SameFace, Shuffled };

const char* to_string(BatchScheme s) noexcept;
BatchScheme scheme_from_string(const std::string& name);

/// One training face: 2D landmarks the network sees and the 3D truth they come from.
struct TrainingFace
{
    LandmarkSet2D landmarks;
    LandmarkSet3D truth;
};

struct TrainConfig
{
    int epochs = 4;
    double learning_rate = 1e-3;
    BatchScheme scheme = BatchScheme::SameFace;
    std::uint64_t seed = 1;
    double validation_fraction = 0.1;  // taken from the end of the face list
};

using nn::EpochLog;

struct TrainResult
{
    nn::MlpModel model;
    std::vector<EpochLog> log;
};

/// Mean over every pair of every face of (prediction - true 3D distance)^2.
double evaluate_loss(const nn::MlpModel& model, std::span<const TrainingFace> faces);

/**
 * Adam on the squared distance error. One step per training face per epoch
 * with batches of C(n, 2) pairs: SameFace uses every pair of one face (faces
 * reshuffled each epoch), Shuffled visits every (face, pair) item of the
 * training split once per epoch in a random order. The log starts with an epoch-0 row evaluated before any
 * update. Throws Error(EmptyDataset) or Error(Diverged) naming the epoch.
 */
TrainResult train_dissimilarity(const std::vector<TrainingFace>& faces, const TrainConfig& config,
                                nn::MlpModel initial);

} // namespace lmds::dissim
