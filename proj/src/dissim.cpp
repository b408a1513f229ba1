/*
 * lmds - 3D facial landmark depth from a single 2D view, by learned
 *        pairwise dissimilarities and multidimensional scaling.
 *
 * File: src/dissim.cpp
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
#include "lmds/dissim.hpp"

#include "lmds/error.hpp"
#include "lmds/io.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace lmds::dissim {

std::vector<double> make_pair_features(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) {
        throw Error(ErrorCode::DimensionMismatch, "pair features need points of equal dimension");
    }
    const std::size_t d = a.size();
    std::vector<double> f(3 * d);
    for (std::size_t k = 0; k < d; ++k) {
        const double gap = std::abs(a[k] - b[k]);
        f[k] = gap;
        f[d + k] = a[k] * b[k];
        f[2 * d + k] = std::exp(-gap);
    }
    return f;
}

std::array<double, 6> make_pair_features(const Point2& a, const Point2& b)
{
    const double gx = std::abs(a[0] - b[0]);
    const double gy = std::abs(a[1] - b[1]);
    return {gx, gy, a[0] * b[0], a[1] * b[1], std::exp(-gx), std::exp(-gy)};
}

nn::MlpModel default_model(std::size_t width, std::size_t hidden)
{
    if (hidden < 3) {
        throw Error(ErrorCode::InvalidArgument, "the dissimilarity net needs at least 3 hidden layers for its shortcut");
    }
    std::vector<nn::LayerSpec> layers(hidden, {width, nn::Activation::ReLU});
    layers.push_back({1, nn::Activation::Softplus});
    return nn::MlpModel("dissim", 6, layers, {{0, 2}});
}

double predict_distance(const nn::MlpModel& model, const Point2& a, const Point2& b)
{
    if (model.input_dim() != 6 || model.output_dim() != 1) {
        throw Error(ErrorCode::DimensionMismatch, "dissimilarity model must map 6 features to 1 output");
    }
    const auto f = make_pair_features(a, b);
    return nn::forward(model, f).front();
}

namespace {

void fill_features(Matrix& features, std::size_t row, const Point2& a, const Point2& b)
{
    const auto f = make_pair_features(a, b);
    std::copy(f.begin(), f.end(), features.row(row).begin());
}

Matrix all_pair_features(const LandmarkSet2D& landmarks)
{
    const std::size_t n = landmarks.size();
    Matrix features(n * (n - 1) / 2, 6);
    std::size_t row = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            fill_features(features, row++, landmarks.points[i], landmarks.points[j]);
        }
    }
    return features;
}

std::vector<double> all_pair_targets(const LandmarkSet3D& truth)
{
    const std::size_t n = truth.size();
    std::vector<double> t;
    t.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            t.push_back(distance(truth.points[i], truth.points[j]));
        }
    }
    return t;
}

// Mean squared error over the batch; fills dLoss/dOutput when asked.
double batch_loss(const Matrix& output, std::span<const double> targets, Matrix* grad)
{
    const double inv = 1.0 / static_cast<double>(targets.size());
    double loss = 0.0;
    if (grad) {
        *grad = Matrix(output.rows(), 1);
    }
    for (std::size_t r = 0; r < targets.size(); ++r) {
        const double diff = output(r, 0) - targets[r];
        loss += diff * diff;
        if (grad) {
            (*grad)(r, 0) = 2.0 * diff * inv;
        }
    }
    return loss * inv;
}

} // namespace

Matrix build_dissimilarity_matrix(const nn::MlpModel& model, const LandmarkSet2D& landmarks)
{
    if (model.input_dim() != 6 || model.output_dim() != 1) {
        throw Error(ErrorCode::DimensionMismatch, "dissimilarity model must map 6 features to 1 output");
    }
    const std::size_t n = landmarks.size();
    if (n < 4) {
        throw Error(ErrorCode::InvalidArgument, "a dissimilarity matrix needs at least 4 landmarks");
    }
    const Matrix out = nn::forward_batch(model, all_pair_features(landmarks));
    Matrix d(n, n);
    std::size_t row = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            d(i, j) = d(j, i) = out(row++, 0);
        }
    }
    return d;
}

const char* to_string(BatchScheme s) noexcept
{
    return s == BatchScheme::SameFace ? "same-face" : "shuffled";
}

BatchScheme scheme_from_string(const std::string& name)
{
    if (name == "same-face" || name == "sameface") return BatchScheme::SameFace;
    if (name == "shuffled") return BatchScheme::Shuffled;
    throw Error(ErrorCode::InvalidArgument, "unknown batch scheme '" + name + "'");
}

double evaluate_loss(const nn::MlpModel& model, std::span<const TrainingFace> faces)
{
    double total = 0.0;
    std::size_t count = 0;
    for (const auto& face : faces) {
        const auto targets = all_pair_targets(face.truth);
        const Matrix out = nn::forward_batch(model, all_pair_features(face.landmarks));
        total += batch_loss(out, targets, nullptr) * static_cast<double>(targets.size());
        count += targets.size();
    }
    if (count == 0) {
        throw Error(ErrorCode::EmptyDataset, "no landmark pairs to evaluate");
    }
    return total / static_cast<double>(count);
}

TrainResult train_dissimilarity(const std::vector<TrainingFace>& faces, const TrainConfig& config,
                                nn::MlpModel initial)
{
    if (faces.empty()) {
        throw Error(ErrorCode::EmptyDataset, "dissimilarity training needs at least one face");
    }
    const std::size_t n = faces.front().landmarks.size();
    if (n < 2) {
        throw Error(ErrorCode::EmptyDataset, "faces need at least two landmarks");
    }
    for (const auto& f : faces) {
        if (f.landmarks.size() != n || f.truth.size() != n) {
            throw Error(ErrorCode::DimensionMismatch, "all training faces must share one landmark topology");
        }
    }
    if (config.epochs < 0 || !(config.validation_fraction >= 0.0 && config.validation_fraction < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "bad dissimilarity training configuration");
    }
    std::size_t n_val = static_cast<std::size_t>(std::floor(config.validation_fraction * static_cast<double>(faces.size())));
    if (config.validation_fraction > 0.0 && faces.size() >= 2) {
        n_val = std::max<std::size_t>(n_val, 1);
    }
    const std::size_t n_train = faces.size() - n_val;
    const std::span<const TrainingFace> train(faces.data(), n_train);
    const std::span<const TrainingFace> val(faces.data() + n_train, n_val);

    TrainResult result;
    result.model = std::move(initial);
    auto& model = result.model;
    nn::AdamState adam(model.parameter_count(), config.learning_rate);
    std::mt19937_64 rng(config.seed);

    auto val_loss = [&]() { return val.empty() ? std::nan("") : evaluate_loss(model, val); };
    result.log.push_back({0, evaluate_loss(model, train), val_loss()});

    const std::size_t pairs = n * (n - 1) / 2;
    std::vector<std::pair<std::size_t, std::size_t>> pair_index;
    pair_index.reserve(pairs);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            pair_index.emplace_back(i, j);
        }
    }
    std::vector<std::size_t> face_order(n_train);
    std::iota(face_order.begin(), face_order.end(), std::size_t{0});
    // Shuffled: every (face, pair) item of the training split once per epoch,
    // in a random order, cut into batches of one face's pair count.
    std::vector<std::uint64_t> items;
    if (config.scheme == BatchScheme::Shuffled) {
        items.resize(n_train * pairs);
        std::iota(items.begin(), items.end(), std::uint64_t{0});
    }

    Matrix features(pairs, 6);
    std::vector<double> targets(pairs);
    nn::ForwardCache cache;
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        if (config.scheme == BatchScheme::SameFace) {
            std::shuffle(face_order.begin(), face_order.end(), rng);
        } else {
            std::shuffle(items.begin(), items.end(), rng);
        }
        double epoch_loss = 0.0;
        for (std::size_t step = 0; step < n_train; ++step) {
            if (config.scheme == BatchScheme::SameFace) {
                const TrainingFace& face = train[face_order[step]];
                features = all_pair_features(face.landmarks);
                targets = all_pair_targets(face.truth);
            } else {
                for (std::size_t r = 0; r < pairs; ++r) {
                    const std::uint64_t item = items[step * pairs + r];
                    const TrainingFace& face = train[item / pairs];
                    const auto [i, j] = pair_index[item % pairs];
                    fill_features(features, r, face.landmarks.points[i], face.landmarks.points[j]);
                    targets[r] = distance(face.truth.points[i], face.truth.points[j]);
                }
            }
            const Matrix out = nn::forward_batch(model, features, &cache);
            Matrix grad;
            const double loss = batch_loss(out, targets, &grad);
            if (!std::isfinite(loss)) {
                throw Error(ErrorCode::Diverged, "dissimilarity training diverged in epoch " + std::to_string(epoch));
            }
            epoch_loss += loss;
            nn::adam_step(adam, model, nn::backward(model, cache, grad));
        }
        const EpochLog row{epoch, epoch_loss / static_cast<double>(n_train), val_loss()};
        if (!std::isfinite(row.train_loss) || (!val.empty() && !std::isfinite(row.val_loss))) {
            throw Error(ErrorCode::Diverged, "dissimilarity training diverged in epoch " + std::to_string(epoch));
        }
        result.log.push_back(row);
    }
    return result;
}

} // namespace lmds::dissim
