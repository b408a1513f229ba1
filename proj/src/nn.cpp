/*
 * lmds - 3D facial landmark depth from a single 2D view, by learned
 *        pairwise dissimilarities and multidimensional scaling.
 *
 * File: src/nn.cpp
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
#include "lmds/nn.hpp"

#include "lmds/error.hpp"
#include "lmds/io.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace lmds::nn {

const char* to_string(Activation a) noexcept
{
    switch (a) {
    case Activation::ReLU: return "relu";
    case Activation::Tanh: return "tanh";
    case Activation::Softplus: return "softplus";
    case Activation::Identity: return "identity";
    }
    return "identity";
}

Activation activation_from_string(const std::string& name)
{
    if (name == "relu") return Activation::ReLU;
    if (name == "tanh") return Activation::Tanh;
    if (name == "softplus") return Activation::Softplus;
    if (name == "identity") return Activation::Identity;
    throw Error(ErrorCode::BadFormat, "unknown activation '" + name + "'");
}

MlpModel::MlpModel(std::string kind, std::size_t input_dim, const std::vector<LayerSpec>& layers,
                   std::vector<Skip> skips)
    : kind_(std::move(kind)), input_dim_(input_dim), skips_(std::move(skips))
{
    std::size_t in = input_dim;
    for (const auto& spec : layers) {
        layers_.emplace_back(in, spec.width, spec.activation);
        in = spec.width;
    }
    validate();
}

void MlpModel::validate() const
{
    if (kind_.empty() || kind_.find_first_of(" \t\n=") != std::string::npos) {
        throw Error(ErrorCode::InvalidArgument, "model kind must be a non-empty token");
    }
    if (input_dim_ == 0 || layers_.empty()) {
        throw Error(ErrorCode::InvalidArgument, "model needs a positive input width and at least one layer");
    }
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const auto& layer = layers_[l];
        if (layer.out == 0) {
            throw Error(ErrorCode::InvalidArgument, "layer " + std::to_string(l) + " has zero width");
        }
        const std::size_t expected_in = l == 0 ? input_dim_ : layers_[l - 1].out;
        if (layer.in != expected_in || layer.weights.size() != layer.in * layer.out
            || layer.bias.size() != layer.out) {
            throw Error(ErrorCode::DimensionMismatch, "layer " + std::to_string(l) + " has inconsistent shape");
        }
    }
    for (const auto& skip : skips_) {
        if (skip.source >= skip.target || skip.target >= layers_.size()) {
            throw Error(ErrorCode::InvalidArgument, "skip " + std::to_string(skip.source) + ">"
                                                        + std::to_string(skip.target) + " must satisfy source < target");
        }
        if (layers_[skip.source].out != layers_[skip.target].in) {
            throw Error(ErrorCode::DimensionMismatch, "skip " + std::to_string(skip.source) + ">"
                                                          + std::to_string(skip.target) + " joins mismatched widths");
        }
    }
}

std::size_t MlpModel::parameter_count() const noexcept
{
    std::size_t n = 0;
    for (const auto& layer : layers_) {
        n += layer.parameter_count();
    }
    return n;
}

std::vector<double> MlpModel::parameters() const
{
    std::vector<double> out;
    out.reserve(parameter_count());
    for (const auto& layer : layers_) {
        out.insert(out.end(), layer.weights.begin(), layer.weights.end());
        out.insert(out.end(), layer.bias.begin(), layer.bias.end());
    }
    return out;
}

void MlpModel::set_parameters(std::span<const double> params)
{
    if (params.size() != parameter_count()) {
        throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(parameter_count())
                                                      + " parameters, got " + std::to_string(params.size()));
    }
    std::size_t offset = 0;
    for (auto& layer : layers_) {
        std::copy_n(params.begin() + static_cast<std::ptrdiff_t>(offset), layer.weights.size(), layer.weights.begin());
        offset += layer.weights.size();
        std::copy_n(params.begin() + static_cast<std::ptrdiff_t>(offset), layer.bias.size(), layer.bias.begin());
        offset += layer.bias.size();
    }
}

std::string MlpModel::parameter_path(std::size_t index) const
{
    std::size_t offset = 0;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const auto& layer = layers_[l];
        if (index < offset + layer.weights.size()) {
            const std::size_t k = index - offset;
            return "layers[" + std::to_string(l) + "].weights[" + std::to_string(k / layer.in) + ","
                   + std::to_string(k % layer.in) + "]";
        }
        offset += layer.weights.size();
        if (index < offset + layer.bias.size()) {
            return "layers[" + std::to_string(l) + "].bias[" + std::to_string(index - offset) + "]";
        }
        offset += layer.bias.size();
    }
    return "parameter[" + std::to_string(index) + "]";
}

std::string MlpModel::descriptor() const
{
    std::ostringstream d;
    d << "mlp v1 kind=" << kind_ << " in=" << input_dim_ << " layers=";
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        d << (l ? "," : "") << layers_[l].out << ":" << to_string(layers_[l].activation);
    }
    d << " skips=";
    if (skips_.empty()) {
        d << "-";
    }
    for (std::size_t s = 0; s < skips_.size(); ++s) {
        d << (s ? "," : "") << skips_[s].source << ">" << skips_[s].target;
    }
    return d.str();
}

namespace {

std::size_t parse_size(const std::string& text, const std::string& what)
{
    try {
        std::size_t pos = 0;
        const auto v = std::stoull(text, &pos);
        if (pos != text.size()) {
            throw std::invalid_argument(text);
        }
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw Error(ErrorCode::BadFormat, "bad " + what + " '" + text + "' in model descriptor");
    }
}

} // namespace

MlpModel MlpModel::from_descriptor(const std::string& descriptor)
{
    const auto tokens = io::split(descriptor, ' ');
    if (tokens.size() != 6 || tokens[0] != "mlp" || tokens[1] != "v1") {
        throw Error(ErrorCode::BadFormat, "unrecognised model descriptor '" + descriptor + "'");
    }
    auto value_of = [&](const std::string& token, const std::string& key) {
        if (token.rfind(key + "=", 0) != 0) {
            throw Error(ErrorCode::BadFormat, "expected '" + key + "=' in model descriptor");
        }
        return token.substr(key.size() + 1);
    };
    const std::string kind = value_of(tokens[2], "kind");
    const std::size_t in = parse_size(value_of(tokens[3], "in"), "input width");

    std::vector<LayerSpec> specs;
    for (const auto& item : io::split(value_of(tokens[4], "layers"), ',')) {
        const auto parts = io::split(item, ':');
        if (parts.size() != 2) {
            throw Error(ErrorCode::BadFormat, "bad layer spec '" + item + "'");
        }
        specs.push_back({parse_size(parts[0], "layer width"), activation_from_string(parts[1])});
    }
    std::vector<Skip> skips;
    const std::string skip_text = value_of(tokens[5], "skips");
    if (skip_text != "-") {
        for (const auto& item : io::split(skip_text, ',')) {
            const auto parts = io::split(item, '>');
            if (parts.size() != 2) {
                throw Error(ErrorCode::BadFormat, "bad skip spec '" + item + "'");
            }
            skips.push_back({parse_size(parts[0], "skip source"), parse_size(parts[1], "skip target")});
        }
    }
    try {
        return MlpModel(kind, in, specs, std::move(skips));
    } catch (const Error& e) {
        throw Error(ErrorCode::BadFormat, std::string("invalid model descriptor: ") + e.what());
    }
}

void MlpModel::initialize(Init init, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    for (auto& layer : layers_) {
        std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
        if (init == Init::Zero) {
            std::fill(layer.weights.begin(), layer.weights.end(), 0.0);
            continue;
        }
        const double limit = layer.activation == Activation::ReLU
                                 ? std::sqrt(6.0 / static_cast<double>(layer.in))
                                 : std::sqrt(6.0 / static_cast<double>(layer.in + layer.out));
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (auto& w : layer.weights) {
            w = dist(rng);
        }
    }
}

namespace {

double softplus(double x)
{
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x)
{
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

void activate(Activation a, const Matrix& pre, Matrix& post)
{
    post.resize(pre.rows(), pre.cols());
    const double* in = pre.data().data();
    double* out = post.data().data();
    const std::size_t size = pre.data().size();
    switch (a) {
    case Activation::ReLU:
        for (std::size_t k = 0; k < size; ++k) out[k] = in[k] > 0.0 ? in[k] : 0.0;
        break;
    case Activation::Tanh:
        for (std::size_t k = 0; k < size; ++k) out[k] = std::tanh(in[k]);
        break;
    case Activation::Softplus:
        for (std::size_t k = 0; k < size; ++k) out[k] = softplus(in[k]);
        break;
    case Activation::Identity:
        std::copy(in, in + size, out);
        break;
    }
}

// grad *= activation'(pre), elementwise.
void scale_by_derivative(Activation a, const Matrix& pre, const Matrix& post, Matrix& grad)
{
    const double* z = pre.data().data();
    const double* y = post.data().data();
    double* g = grad.data().data();
    const std::size_t size = grad.data().size();
    switch (a) {
    case Activation::ReLU:
        for (std::size_t k = 0; k < size; ++k) g[k] = z[k] > 0.0 ? g[k] : 0.0;
        break;
    case Activation::Tanh:
        for (std::size_t k = 0; k < size; ++k) g[k] *= 1.0 - y[k] * y[k];
        break;
    case Activation::Softplus:
        for (std::size_t k = 0; k < size; ++k) g[k] *= sigmoid(z[k]);
        break;
    case Activation::Identity:
        break;
    }
}

// out = in * W^T + b, accumulated in input order so the batched and
// single-sample paths agree bit for bit.
void affine(const DenseLayer& layer, const Matrix& in, Matrix& out)
{
    const std::size_t batch = in.rows();
    std::vector<double> wt(layer.in * layer.out);
    for (std::size_t o = 0; o < layer.out; ++o) {
        for (std::size_t i = 0; i < layer.in; ++i) {
            wt[i * layer.out + o] = layer.weights[o * layer.in + i];
        }
    }
    out.resize(batch, layer.out);
    for (std::size_t r = 0; r < batch; ++r) {
        double* out_row = out.row(r).data();
        const double* in_row = in.row(r).data();
        std::copy(layer.bias.begin(), layer.bias.end(), out_row);
        for (std::size_t i = 0; i < layer.in; ++i) {
            const double x = in_row[i];
            const double* w = wt.data() + i * layer.out;
            for (std::size_t o = 0; o < layer.out; ++o) {
                out_row[o] += w[o] * x;
            }
        }
    }
}

void add_into(Matrix& dst, const Matrix& src)
{
    double* d = dst.data().data();
    const double* s = src.data().data();
    const std::size_t size = dst.data().size();
    for (std::size_t k = 0; k < size; ++k) {
        d[k] += s[k];
    }
}

void assign(Matrix& dst, const Matrix& src)
{
    dst.resize(src.rows(), src.cols());
    std::copy(src.data().begin(), src.data().end(), dst.data().begin());
}

} // namespace

Matrix forward_batch(const MlpModel& model, const Matrix& input, ForwardCache* cache)
{
    const auto& layers = model.layers();
    if (input.cols() != model.input_dim()) {
        throw Error(ErrorCode::DimensionMismatch, "layer 0 expects input width " + std::to_string(model.input_dim())
                                                      + ", got " + std::to_string(input.cols()));
    }
    ForwardCache local;
    ForwardCache& c = cache ? *cache : local;
    c.inputs.resize(layers.size());
    c.pre.resize(layers.size());
    c.post.resize(layers.size());
    for (std::size_t l = 0; l < layers.size(); ++l) {
        Matrix& in = c.inputs[l];
        assign(in, l == 0 ? input : c.post[l - 1]);
        for (const auto& skip : model.skips()) {
            if (skip.target == l) {
                add_into(in, c.post[skip.source]);
            }
        }
        affine(layers[l], in, c.pre[l]);
        activate(layers[l].activation, c.pre[l], c.post[l]);
    }
    return c.post.back();
}

std::vector<double> forward(const MlpModel& model, std::span<const double> input)
{
    Matrix in(1, input.size());
    std::copy(input.begin(), input.end(), in.data().begin());
    return forward_batch(model, in).data();
}

Gradients backward(const MlpModel& model, const ForwardCache& cache, const Matrix& loss_grad)
{
    const auto& layers = model.layers();
    if (cache.empty() || cache.pre.size() != layers.size() || cache.post.size() != layers.size()) {
        throw Error(ErrorCode::MissingCache, "backward called without a forward cache for this model");
    }
    const std::size_t batch = cache.pre.front().rows();
    if (loss_grad.rows() != batch || loss_grad.cols() != model.output_dim()) {
        throw Error(ErrorCode::DimensionMismatch, "loss gradient shape does not match the cached batch");
    }

    std::vector<std::size_t> offsets(layers.size());
    std::size_t total = 0;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        offsets[l] = total;
        total += layers[l].parameter_count();
    }
    Gradients grads(total, 0.0);

    auto& dpost = cache.grad_post;
    dpost.resize(layers.size());
    for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
        dpost[l].resize(batch, layers[l].out);
        std::fill(dpost[l].data().begin(), dpost[l].data().end(), 0.0);
    }
    assign(dpost.back(), loss_grad);

    for (std::size_t l = layers.size(); l-- > 0;) {
        const auto& layer = layers[l];
        Matrix& dpre = dpost[l];
        scale_by_derivative(layer.activation, cache.pre[l], cache.post[l], dpre);

        double* dw = grads.data() + offsets[l];
        double* db = dw + layer.weights.size();
        const Matrix& in = cache.inputs[l];
        for (std::size_t r = 0; r < batch; ++r) {
            const double* in_row = in.row(r).data();
            const double* dz_row = dpre.row(r).data();
            for (std::size_t o = 0; o < layer.out; ++o) {
                const double dz = dz_row[o];
                if (dz == 0.0) {
                    continue;
                }
                double* dw_row = dw + o * layer.in;
                for (std::size_t i = 0; i < layer.in; ++i) {
                    dw_row[i] += dz * in_row[i];
                }
                db[o] += dz;
            }
        }

        const bool feeds_skip = std::any_of(model.skips().begin(), model.skips().end(),
                                            [l](const Skip& s) { return s.target == l; });
        if (l == 0 && !feeds_skip) {
            continue;
        }
        Matrix& din = cache.grad_in;
        din.resize(batch, layer.in);
        std::fill(din.data().begin(), din.data().end(), 0.0);
        for (std::size_t r = 0; r < batch; ++r) {
            double* din_row = din.row(r).data();
            const double* dz_row = dpre.row(r).data();
            for (std::size_t o = 0; o < layer.out; ++o) {
                const double dz = dz_row[o];
                if (dz == 0.0) {
                    continue;
                }
                const double* w_row = layer.weights.data() + o * layer.in;
                for (std::size_t i = 0; i < layer.in; ++i) {
                    din_row[i] += w_row[i] * dz;
                }
            }
        }
        if (l > 0) {
            add_into(dpost[l - 1], din);
        }
        for (const auto& skip : model.skips()) {
            if (skip.target == l) {
                add_into(dpost[skip.source], din);
            }
        }
    }
    return grads;
}

Gradients backward(const MlpModel& model, const ForwardCache& cache, std::span<const double> loss_grad)
{
    Matrix g(1, loss_grad.size());
    std::copy(loss_grad.begin(), loss_grad.end(), g.data().begin());
    return backward(model, cache, g);
}

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads)
{
    if (params.size() != grads.size() || state.first_moment.size() != params.size()
        || state.second_moment.size() != params.size()) {
        throw Error(ErrorCode::DimensionMismatch, "adam_step: parameter, gradient and moment sizes differ");
    }
    for (std::size_t k = 0; k < grads.size(); ++k) {
        if (!std::isfinite(grads[k])) {
            throw Error(ErrorCode::NonFinite, "non-finite gradient at parameter[" + std::to_string(k) + "]");
        }
    }
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double correction1 = 1.0 - std::pow(state.beta1, t);
    const double correction2 = 1.0 - std::pow(state.beta2, t);
    for (std::size_t k = 0; k < params.size(); ++k) {
        const double g = grads[k];
        state.first_moment[k] = state.beta1 * state.first_moment[k] + (1.0 - state.beta1) * g;
        state.second_moment[k] = state.beta2 * state.second_moment[k] + (1.0 - state.beta2) * g * g;
        const double m_hat = state.first_moment[k] / correction1;
        const double v_hat = state.second_moment[k] / correction2;
        params[k] -= state.lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
}

void adam_step(AdamState& state, MlpModel& model, const Gradients& grads)
{
    for (std::size_t k = 0; k < grads.size(); ++k) {
        if (!std::isfinite(grads[k])) {
            throw Error(ErrorCode::NonFinite, "non-finite gradient at " + model.parameter_path(k));
        }
    }
    auto params = model.parameters();
    adam_step(state, std::span<double>(params), grads);
    model.set_parameters(params);
}

namespace {

// (L(a) - L(b)) for L = sum (y - t)^2, factored per output so the large
// common part of the two losses never gets subtracted.
double loss_difference(std::span<const double> a, std::span<const double> b, std::span<const double> target)
{
    double diff = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        diff += (a[k] - b[k]) * (a[k] + b[k] - 2.0 * target[k]);
    }
    return diff;
}

} // namespace

double gradient_check(const MlpModel& model, std::span<const double> input, std::span<const double> target, Loss)
{
    if (target.size() != model.output_dim()) {
        throw Error(ErrorCode::DimensionMismatch, "gradient_check: target width differs from model output");
    }
    Matrix in(1, input.size());
    std::copy(input.begin(), input.end(), in.data().begin());
    ForwardCache cache;
    const Matrix y = forward_batch(model, in, &cache);
    Matrix dy(1, y.cols());
    for (std::size_t k = 0; k < y.cols(); ++k) {
        dy(0, k) = 2.0 * (y(0, k) - target[k]);
    }
    const Gradients analytic = backward(model, cache, dy);

    // Central differences are only valid while every ReLU stays on the side it
    // is on at the base point; the step shrinks until the +-h evaluations keep
    // the base activation pattern.
    auto pattern = [&](const MlpModel& m, const ForwardCache& c) {
        std::vector<bool> signs;
        for (std::size_t l = 0; l < m.layers().size(); ++l) {
            if (m.layers()[l].activation != Activation::ReLU) continue;
            for (double z : c.pre[l].data()) signs.push_back(z > 0.0);
        }
        return signs;
    };
    const std::vector<bool> base = pattern(model, cache);

    MlpModel probe = model;
    auto params = model.parameters();
    double worst = 0.0;
    ForwardCache side;
    for (std::size_t k = 0; k < params.size(); ++k) {
        const double original = params[k];
        double numeric = 0.0;
        for (double h = 1e-4;; h *= 0.1) {
            params[k] = original + h;
            probe.set_parameters(params);
            const Matrix plus = forward_batch(probe, in, &side);
            bool same_side = pattern(probe, side) == base;
            params[k] = original - h;
            probe.set_parameters(params);
            const Matrix minus = forward_batch(probe, in, &side);
            same_side = same_side && pattern(probe, side) == base;
            numeric = loss_difference(plus.data(), minus.data(), target) / (2.0 * h);
            if (same_side || h < 1e-8) break;
        }
        params[k] = original;

        const double denom = std::max({std::abs(analytic[k]), std::abs(numeric), 1e-12});
        worst = std::max(worst, std::abs(analytic[k] - numeric) / denom);
    }
    return worst;
}

std::string log_csv(const std::vector<EpochLog>& log)
{
    std::string out = "epoch,train_loss,val_loss\n";
    for (const auto& row : log) {
        out += std::to_string(row.epoch) + "," + io::format_double(row.train_loss) + "," + io::format_double(row.val_loss)
               + "\n";
    }
    return out;
}

namespace {
constexpr char kMagic[4] = {'L', 'L', 'M', 'W'};
}

std::vector<std::uint8_t> serialize_model(const MlpModel& model)
{
    std::vector<std::uint8_t> out(kMagic, kMagic + 4);
    io::append_u32(out, kWeightFormatVersion);
    const std::string desc = model.descriptor();
    io::append_u32(out, static_cast<std::uint32_t>(desc.size()));
    out.insert(out.end(), desc.begin(), desc.end());
    io::append_u64(out, model.parameter_count());
    for (double p : model.parameters()) {
        io::append_f64(out, p);
    }
    io::append_u32(out, io::crc32(std::span<const std::uint8_t>(out)));
    return out;
}

MlpModel deserialize_model(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < 8) {
        throw Error(ErrorCode::ChecksumMismatch, "weight file truncated before header");
    }
    if (!std::equal(kMagic, kMagic + 4, bytes.begin())) {
        throw Error(ErrorCode::BadFormat, "not a weight file (bad magic)");
    }
    const std::uint32_t version = io::read_u32(bytes, 4);
    if (version != kWeightFormatVersion) {
        throw Error(ErrorCode::VersionMismatch, "weight file version " + std::to_string(version) + ", expected "
                                                    + std::to_string(kWeightFormatVersion));
    }
    if (bytes.size() < 16) {
        throw Error(ErrorCode::ChecksumMismatch, "weight file truncated");
    }
    const std::uint32_t stored_crc = io::read_u32(bytes, bytes.size() - 4);
    if (io::crc32(bytes.first(bytes.size() - 4)) != stored_crc) {
        throw Error(ErrorCode::ChecksumMismatch, "weight file checksum mismatch (corrupt or truncated)");
    }

    const std::size_t desc_len = io::read_u32(bytes, 8);
    std::size_t offset = 12;
    if (offset + desc_len + 8 > bytes.size() - 4) {
        throw Error(ErrorCode::BadFormat, "weight file descriptor overruns the file");
    }
    const std::string desc(bytes.begin() + static_cast<std::ptrdiff_t>(offset),
                           bytes.begin() + static_cast<std::ptrdiff_t>(offset + desc_len));
    offset += desc_len;
    MlpModel model = MlpModel::from_descriptor(desc);
    const std::uint64_t count = io::read_u64(bytes, offset);
    offset += 8;
    if (count != model.parameter_count() || offset + count * 8 != bytes.size() - 4) {
        throw Error(ErrorCode::BadFormat, "weight file parameter count does not match its descriptor");
    }
    std::vector<double> params(count);
    for (std::size_t k = 0; k < count; ++k) {
        params[k] = io::read_f64(bytes, offset + 8 * k);
        if (!std::isfinite(params[k])) {
            throw Error(ErrorCode::NonFinite, "weight file holds a non-finite value at " + model.parameter_path(k));
        }
    }
    model.set_parameters(params);
    return model;
}

void save_model(const MlpModel& model, const std::filesystem::path& path)
{
    const auto bytes = serialize_model(model);
    io::write_binary(path, bytes);
}

MlpModel load_model(const std::filesystem::path& path)
{
    const auto bytes = io::read_binary(path);
    return deserialize_model(bytes);
}

} // namespace lmds::nn
