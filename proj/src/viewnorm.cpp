/*
 * lmds - 3D facial landmark depth from a single 2D view, by learned
 *        pairwise dissimilarities and multidimensional scaling.
 *
 * File: src/viewnorm.cpp
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
#include "lmds/viewnorm.hpp"

#include "lmds/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace lmds::viewnorm {

nn::MlpModel default_model(std::size_t landmarks, const std::vector<std::size_t>& hidden)
{
    if (hidden.empty()) {
        throw Error(ErrorCode::InvalidArgument, "view normalizer needs at least one hidden layer");
    }
    if (*std::min_element(hidden.begin(), hidden.end()) >= 2 * landmarks) {
        throw Error(ErrorCode::InvalidArgument, "view normalizer bottleneck must be narrower than 2n");
    }
    std::vector<nn::LayerSpec> layers;
    for (std::size_t w : hidden) {
        layers.push_back({w, nn::Activation::ReLU});
    }
    layers.push_back({2 * landmarks, nn::Activation::Identity});
    return nn::MlpModel("viewnorm", 2 * landmarks, layers);
}

std::vector<double> flatten(const LandmarkSet2D& landmarks)
{
    std::vector<double> out;
    out.reserve(2 * landmarks.size());
    for (const auto& p : landmarks.points) {
        out.push_back(p[0]);
        out.push_back(p[1]);
    }
    return out;
}

LandmarkSet2D unflatten(std::span<const double> values, const std::string& topology_id)
{
    if (values.size() % 2 != 0) {
        throw Error(ErrorCode::DimensionMismatch, "flattened 2D landmarks need an even length");
    }
    LandmarkSet2D out;
    out.topology_id = topology_id;
    for (std::size_t i = 0; i < values.size(); i += 2) {
        out.points.push_back({values[i], values[i + 1]});
    }
    return out;
}

LandmarkSet2D normalize_view(const nn::MlpModel& model, const LandmarkSet2D& landmarks)
{
    if (2 * landmarks.size() != model.input_dim() || model.output_dim() != model.input_dim()) {
        throw Error(ErrorCode::DimensionMismatch, "view normalizer expects " + std::to_string(model.input_dim() / 2)
                                                      + " landmarks, got " + std::to_string(landmarks.size()));
    }
    return unflatten(nn::forward(model, flatten(landmarks)), landmarks.topology_id);
}

namespace {

void check_pair(const nn::MlpModel& model, const ViewPair& p)
{
    if (2 * p.input.size() != model.input_dim() || 2 * p.profile.size() != model.output_dim()) {
        throw Error(ErrorCode::DimensionMismatch, "view pair does not match the model's landmark count");
    }
}

Matrix stack(std::span<const ViewPair> pairs, std::span<const std::size_t> rows, bool profile)
{
    const std::size_t width = 2 * pairs[rows.front()].input.size();
    Matrix m(rows.size(), width);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& set = profile ? pairs[rows[r]].profile : pairs[rows[r]].input;
        for (std::size_t i = 0; i < set.size(); ++i) {
            m(r, 2 * i) = set.points[i][0];
            m(r, 2 * i + 1) = set.points[i][1];
        }
    }
    return m;
}

double sum_sq_error(const Matrix& out, const Matrix& target, Matrix* grad, double grad_scale)
{
    double total = 0.0;
    if (grad) {
        *grad = Matrix(out.rows(), out.cols());
    }
    for (std::size_t k = 0; k < out.data().size(); ++k) {
        const double diff = out.data()[k] - target.data()[k];
        total += diff * diff;
        if (grad) {
            grad->data()[k] = 2.0 * diff * grad_scale;
        }
    }
    return total;
}

} // namespace

double evaluate_loss(const nn::MlpModel& model, std::span<const ViewPair> pairs)
{
    if (pairs.empty()) {
        throw Error(ErrorCode::EmptyDataset, "no view pairs to evaluate");
    }
    constexpr std::size_t chunk = 256;
    double total = 0.0;
    std::vector<std::size_t> rows;
    for (std::size_t start = 0; start < pairs.size(); start += chunk) {
        rows.resize(std::min(chunk, pairs.size() - start));
        std::iota(rows.begin(), rows.end(), start);
        for (std::size_t r : rows) {
            check_pair(model, pairs[r]);
        }
        const Matrix out = nn::forward_batch(model, stack(pairs, rows, false));
        total += sum_sq_error(out, stack(pairs, rows, true), nullptr, 0.0);
    }
    return total / static_cast<double>(pairs.size());
}

TrainResult train_viewnorm(const std::vector<ViewPair>& pairs, const TrainConfig& config, nn::MlpModel initial)
{
    if (pairs.empty()) {
        throw Error(ErrorCode::EmptyDataset, "view normalizer training needs at least one sample");
    }
    if (config.epochs < 0 || config.batch_size == 0
        || !(config.validation_fraction >= 0.0 && config.validation_fraction < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "bad view normalizer training configuration");
    }
    for (const auto& p : pairs) {
        check_pair(initial, p);
    }
    std::size_t n_val = static_cast<std::size_t>(std::floor(config.validation_fraction * static_cast<double>(pairs.size())));
    if (config.validation_fraction > 0.0 && pairs.size() >= 2) {
        n_val = std::max<std::size_t>(n_val, 1);
    }
    const std::size_t n_train = pairs.size() - n_val;
    const std::span<const ViewPair> train(pairs.data(), n_train);
    const std::span<const ViewPair> val(pairs.data() + n_train, n_val);

    TrainResult result;
    result.model = std::move(initial);
    auto& model = result.model;
    nn::AdamState adam(model.parameter_count(), config.learning_rate);
    std::mt19937_64 rng(config.seed);
    auto val_loss = [&]() { return val.empty() ? std::nan("") : evaluate_loss(model, val); };
    result.log.push_back({0, evaluate_loss(model, train), val_loss()});

    std::vector<std::size_t> order(n_train);
    std::iota(order.begin(), order.end(), std::size_t{0});
    nn::ForwardCache cache;
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_total = 0.0;
        for (std::size_t start = 0; start < n_train; start += config.batch_size) {
            const std::span<const std::size_t> rows(order.data() + start, std::min(config.batch_size, n_train - start));
            const Matrix out = nn::forward_batch(model, stack(train, rows, false), &cache);
            Matrix grad;
            const double batch_total =
                sum_sq_error(out, stack(train, rows, true), &grad, 1.0 / static_cast<double>(rows.size()));
            if (!std::isfinite(batch_total)) {
                throw Error(ErrorCode::Diverged, "view normalizer training diverged in epoch " + std::to_string(epoch));
            }
            epoch_total += batch_total;
            nn::adam_step(adam, model, nn::backward(model, cache, grad));
        }
        const nn::EpochLog row{epoch, epoch_total / static_cast<double>(n_train), val_loss()};
        if (!std::isfinite(row.train_loss) || (!val.empty() && !std::isfinite(row.val_loss))) {
            throw Error(ErrorCode::Diverged, "view normalizer training diverged in epoch " + std::to_string(epoch));
        }
        result.log.push_back(row);
    }
    return result;
}

} // namespace lmds::viewnorm
