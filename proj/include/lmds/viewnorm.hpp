/*
 * lmds - 3D facial landmark depth from a single 2D view, by learned
 *        pairwise dissimilarities and multidimensional scaling.
 *
 * File: include/lmds/viewnorm.hpp
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
#include "lmds/nn.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace lmds::viewnorm {

/// 2n -> hidden... -> 2n encoder-decoder, ReLU inside and an Identity output.
nn::MlpModel default_model(std::size_t landmarks = 72, const std::vector<std::size_t>& hidden = {64, 32, 64});

/// (x0, y0, x1, y1, ...).
std::vector<double> flatten(const LandmarkSet2D& landmarks);
LandmarkSet2D unflatten(std::span<const double> values, const std::string& topology_id);

/// Raw network output as a landmark set with the input's topology. Throws
/// Error(DimensionMismatch) when the landmark count does not fit the model.
LandmarkSet2D normalize_view(const nn::MlpModel& model, const LandmarkSet2D& landmarks);

/// An observed view and the canonical view of the same face.
struct ViewPair
{
    LandmarkSet2D input;
    LandmarkSet2D profile;
};

struct TrainConfig
{
    int epochs = 60;
    double learning_rate = 1e-3;
    std::size_t batch_size = 32;
    std::uint64_t seed = 1;
    double validation_fraction = 0.1;
};

struct TrainResult
{
    nn::MlpModel model;
    std::vector<nn::EpochLog> log;
};

/// Mean over samples of sum over landmarks of |output - profile|^2.
double evaluate_loss(const nn::MlpModel& model, std::span<const ViewPair> pairs);

/// Adam over shuffled mini-batches; the last `validation_fraction` of the pairs
/// is held out. Throws Error(EmptyDataset) or Error(Diverged) naming the epoch.
TrainResult train_viewnorm(const std::vector<ViewPair>& pairs, const TrainConfig& config, nn::MlpModel initial);

} // namespace lmds::viewnorm
