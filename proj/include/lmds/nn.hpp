/*
 * lmds - 3D facial landmark depth from a single 2D view, by learned
 *        pairwise dissimilarities and multidimensional scaling.
 *
 * File: include/lmds/nn.hpp
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

#include "lmds/linalg.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lmds::nn {

enum class Activation { ReLU, Tanh, Softplus, Identity };

const char* to_string(Activation a) noexcept;
Activation activation_from_string(const std::string& name);

/// Fully connected layer; `weights` is out x in, row-major.
struct DenseLayer
{
    std::size_t in = 0;
    std::size_t out = 0;
    std::vector<double> weights;
    std::vector<double> bias;
    Activation activation = Activation::Identity;

    DenseLayer() = default;
    DenseLayer(std::size_t in_dim, std::size_t out_dim, Activation act)
        : in(in_dim), out(out_dim), weights(in_dim * out_dim, 0.0), bias(out_dim, 0.0), activation(act)
    {
    }

    double& w(std::size_t o, std::size_t i) { return weights[o * in + i]; }
    double w(std::size_t o, std::size_t i) const { return weights[o * in + i]; }

    std::size_t parameter_count() const noexcept { return out * in + out; }
    bool operator==(const DenseLayer&) const = default;
};

/// Additive shortcut: the post-activation output of layer `source` is added to
/// the input of layer `target`.
struct Skip
{
    std::size_t source = 0;
    std::size_t target = 0;
    bool operator==(const Skip&) const = default;
};

struct LayerSpec
{
    std::size_t width = 0;
    Activation activation = Activation::ReLU;
};

enum class Init { HeUniform, Zero };

class MlpModel
{
public:
    MlpModel() = default;

    /// Builds a model from an input width, the per-layer specs and the skips.
    /// Validates the skip invariants; parameters start at zero.
    MlpModel(std::string kind, std::size_t input_dim, const std::vector<LayerSpec>& layers,
             std::vector<Skip> skips = {});

    const std::string& kind() const noexcept { return kind_; }
    std::size_t input_dim() const noexcept { return input_dim_; }
    std::size_t output_dim() const noexcept { return layers_.empty() ? input_dim_ : layers_.back().out; }
    const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
    std::vector<DenseLayer>& layers() noexcept { return layers_; }
    const std::vector<Skip>& skips() const noexcept { return skips_; }

    std::size_t parameter_count() const noexcept;

    /// Parameters in layer order: weights (row-major) then bias, per layer.
    std::vector<double> parameters() const;
    void set_parameters(std::span<const double> params);

    /// Human-readable name of the flat parameter at `index`, e.g. "layers[2].weights[3,4]".
    std::string parameter_path(std::size_t index) const;

    /// Text descriptor stored in weight files, e.g.
    /// "mlp v1 kind=dissim in=6 layers=20:relu,1:softplus skips=0>2".
    std::string descriptor() const;
    static MlpModel from_descriptor(const std::string& descriptor);

    void initialize(Init init, std::uint64_t seed);

    bool operator==(const MlpModel&) const = default;

private:
    void validate() const;

    std::string kind_;
    std::size_t input_dim_ = 0;
    std::vector<DenseLayer> layers_;
    std::vector<Skip> skips_;
};

/// Per-layer activations kept by a forward pass for the matching backward pass.
/// Each matrix is batch x width.
struct ForwardCache
{
    std::vector<Matrix> inputs; // layer input after skip additions
    std::vector<Matrix> pre;    // pre-activation
    std::vector<Matrix> post;   // post-activation
    bool empty() const noexcept { return pre.empty(); }

    // Scratch reused by backward() so repeated training steps do not reallocate.
    mutable std::vector<Matrix> grad_post;
    mutable Matrix grad_in;
};

/// Flat gradient with the same layout as MlpModel::parameters().
using Gradients = std::vector<double>;

std::vector<double> forward(const MlpModel& model, std::span<const double> input);

/// Batched forward: `input` is batch x input_dim. Fills `cache` when given.
Matrix forward_batch(const MlpModel& model, const Matrix& input, ForwardCache* cache = nullptr);

/// Gradient of the loss w.r.t. every parameter, summed over the cached batch.
/// `loss_grad` holds dLoss/dOutput, batch x output_dim.
Gradients backward(const MlpModel& model, const ForwardCache& cache, const Matrix& loss_grad);
Gradients backward(const MlpModel& model, const ForwardCache& cache, std::span<const double> loss_grad);

struct AdamState
{
    std::uint64_t step = 0;
    std::vector<double> first_moment;
    std::vector<double> second_moment;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    AdamState() = default;
    explicit AdamState(std::size_t parameter_count, double learning_rate = 1e-3)
        : first_moment(parameter_count, 0.0), second_moment(parameter_count, 0.0), lr(learning_rate)
    {
    }
};

/// One Adam update with bias correction. Throws Error(NonFinite) naming the
/// first offending parameter index before touching anything.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads);
/// Same, on a model; non-finite errors name the parameter path.
void adam_step(AdamState& state, MlpModel& model, const Gradients& grads);

enum class Loss { SquaredError };

/// Max over parameters of |analytic - numeric| / max(|analytic|, |numeric|, 1e-12),
/// with central differences of step 1e-4, for loss = sum (y - target)^2. The step
/// shrinks tenfold (down to 1e-8) while a +-h evaluation flips any ReLU.
double gradient_check(const MlpModel& model, std::span<const double> input, std::span<const double> target,
                      Loss loss = Loss::SquaredError);

/// One row of a training curve; epoch 0 is the state before any update.
struct EpochLog
{
    int epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
};

/// "epoch,train_loss,val_loss" CSV.
std::string log_csv(const std::vector<EpochLog>& log);

inline constexpr std::uint32_t kWeightFormatVersion = 1;

std::vector<std::uint8_t> serialize_model(const MlpModel& model);
MlpModel deserialize_model(std::span<const std::uint8_t> bytes);
void save_model(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_model(const std::filesystem::path& path);

} // namespace lmds::nn
