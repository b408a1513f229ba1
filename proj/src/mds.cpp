/*
 * lmds - 3D facial landmark depth from a single 2D view, by learned
 *        pairwise dissimilarities and multidimensional scaling.
 *
 * File: src/mds.cpp
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
#include "lmds/mds.hpp"

#include "lmds/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lmds::mds {

void validate_dissimilarity(const Matrix& d)
{
    if (d.rows() != d.cols()) {
        throw Error(ErrorCode::InvalidArgument, "dissimilarity matrix is not square");
    }
    for (std::size_t i = 0; i < d.rows(); ++i) {
        if (d(i, i) != 0.0) {
            throw Error(ErrorCode::InvalidArgument, "dissimilarity diagonal entry " + std::to_string(i) + " is not zero");
        }
        for (std::size_t j = 0; j < i; ++j) {
            const double v = d(i, j);
            if (!std::isfinite(v) || v < 0.0) {
                throw Error(ErrorCode::InvalidArgument, "dissimilarity entry (" + std::to_string(i) + ","
                                                            + std::to_string(j) + ") is negative or non-finite");
            }
            if (v != d(j, i)) {
                throw Error(ErrorCode::InvalidArgument, "dissimilarity matrix is not symmetric at ("
                                                            + std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
    }
}

Matrix pairwise_distances(const Matrix& coords)
{
    const std::size_t n = coords.rows();
    Matrix d(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < coords.cols(); ++k) {
                const double diff = coords(i, k) - coords(j, k);
                s += diff * diff;
            }
            d(i, j) = d(j, i) = std::sqrt(s);
        }
    }
    return d;
}

Matrix pairwise_distances(const LandmarkSet3D& shape)
{
    const std::size_t n = shape.size();
    Matrix d(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            d(i, j) = d(j, i) = distance(shape.points[i], shape.points[j]);
        }
    }
    return d;
}

Matrix double_center(const Matrix& d)
{
    validate_dissimilarity(d);
    const std::size_t n = d.rows();
    Matrix b(n, n);
    if (n == 0) {
        return b;
    }
    std::vector<double> row_mean(n, 0.0);
    double grand = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            row_mean[i] += d(i, j) * d(i, j);
        }
        grand += row_mean[i];
        row_mean[i] /= static_cast<double>(n);
    }
    grand /= static_cast<double>(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            b(i, j) = b(j, i) = -0.5 * (d(i, j) * d(i, j) - row_mean[i] - row_mean[j] + grand);
        }
    }
    return b;
}

namespace {

void center_columns(Matrix& x)
{
    if (x.rows() == 0) {
        return;
    }
    for (std::size_t k = 0; k < x.cols(); ++k) {
        double mean = 0.0;
        for (std::size_t i = 0; i < x.rows(); ++i) {
            mean += x(i, k);
        }
        mean /= static_cast<double>(x.rows());
        for (std::size_t i = 0; i < x.rows(); ++i) {
            x(i, k) -= mean;
        }
    }
}

} // namespace

Embedding classical_mds(const Matrix& d, std::size_t p)
{
    const Matrix b = double_center(d);
    const std::size_t n = d.rows();
    if (n < 2 || p < 1 || p > n - 1) {
        throw Error(ErrorCode::InvalidArgument, "classical_mds needs 1 <= p <= n - 1 (n = " + std::to_string(n)
                                                    + ", p = " + std::to_string(p) + ")");
    }
    const EigenDecomposition eig = sym_eig(b);
    const double threshold = 1e-12 * std::max(eig.values.front(), 0.0);
    std::size_t positive = 0;
    while (positive < n && eig.values[positive] > threshold && eig.values[positive] > 0.0) {
        ++positive;
    }

    Embedding emb;
    emb.coords = Matrix(n, p);
    for (std::size_t k = 0; k < std::min(p, positive); ++k) {
        const double scale = std::sqrt(eig.values[k]);
        for (std::size_t i = 0; i < n; ++i) {
            emb.coords(i, k) = scale * eig.vectors(i, k);
        }
    }
    if (p > positive) {
        emb.warnings.push_back("only " + std::to_string(positive) + " positive eigenvalues for " + std::to_string(p)
                               + " requested dimensions; remaining axes are zero");
    }
    center_columns(emb.coords);
    emb.converged = true;
    return emb;
}

std::vector<double> isotonic_regression(std::span<const double> targets, std::span<const std::size_t> order,
                                        std::span<const double> weights)
{
    const std::size_t n = targets.size();
    if (order.size() != n) {
        throw Error(ErrorCode::DimensionMismatch, "isotonic_regression: order length differs from targets");
    }
    if (!weights.empty() && weights.size() != n) {
        throw Error(ErrorCode::DimensionMismatch, "isotonic_regression: weights length differs from targets");
    }
    std::vector<char> seen(n, 0);
    for (std::size_t idx : order) {
        if (idx >= n || seen[idx]) {
            throw Error(ErrorCode::InvalidArgument, "isotonic_regression: order is not a permutation");
        }
        seen[idx] = 1;
    }
    bool any_weight = weights.empty();
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw Error(ErrorCode::InvalidArgument, "isotonic_regression: weights must be finite and nonnegative");
        }
        any_weight = any_weight || w > 0.0;
    }
    const bool unit = weights.empty() || !any_weight;
    auto weight_at = [&](std::size_t idx) { return unit ? 1.0 : weights[idx]; };

    struct Block
    {
        std::size_t begin;
        std::size_t end;
        double swy;
        double sw;
        double value;
    };
    std::vector<Block> stack;
    stack.reserve(n);
    for (std::size_t pos = 0; pos < n; ++pos) {
        const std::size_t idx = order[pos];
        const double w = weight_at(idx);
        stack.push_back({pos, pos + 1, w * targets[idx], w, w > 0.0 ? targets[idx] : 0.0});
        while (stack.size() >= 2) {
            Block& top = stack.back();
            Block& prev = stack[stack.size() - 2];
            if (!(top.sw == 0.0 || prev.sw == 0.0 || prev.value > top.value)) {
                break;
            }
            // Continue prev's running sums element by element, so each block mean is
            // the same left-to-right sum a from-scratch evaluation would produce.
            for (std::size_t q = top.begin; q < top.end; ++q) {
                const std::size_t k = order[q];
                const double wk = weight_at(k);
                prev.swy += wk * targets[k];
                prev.sw += wk;
            }
            prev.end = top.end;
            prev.value = prev.sw > 0.0 ? prev.swy / prev.sw : 0.0;
            stack.pop_back();
        }
    }

    std::vector<double> fitted(n);
    for (const auto& block : stack) {
        for (std::size_t q = block.begin; q < block.end; ++q) {
            fitted[order[q]] = block.value;
        }
    }
    return fitted;
}

double nonmetric_stress(const Matrix& d, const Matrix& coords, const Matrix& disparities)
{
    const std::size_t n = d.rows();
    if (d.cols() != n || coords.rows() != n || disparities.rows() != n || disparities.cols() != n) {
        throw Error(ErrorCode::DimensionMismatch, "nonmetric_stress: matrix shapes disagree");
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < coords.cols(); ++k) {
                const double diff = coords(i, k) - coords(j, k);
                s += diff * diff;
            }
            const double dist = std::sqrt(s);
            num += (dist - disparities(i, j)) * (dist - disparities(i, j));
            den += dist * dist;
        }
    }
    if (!(den > 0.0)) {
        throw Error(ErrorCode::Degenerate, "nonmetric_stress: all embedding distances are zero");
    }
    return std::sqrt(num / den);
}

const char* to_string(Mode m) noexcept
{
    return m == Mode::Metric ? "metric" : "nonmetric";
}

Mode mode_from_string(const std::string& name)
{
    if (name == "metric") return Mode::Metric;
    if (name == "nonmetric") return Mode::NonMetric;
    throw Error(ErrorCode::InvalidArgument, "unknown MDS mode '" + name + "'");
}

namespace {

void fill_distances(const Matrix& x, std::vector<double>& dist)
{
    const std::size_t n = x.rows();
    const std::size_t p = x.cols();
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < p; ++c) {
                const double diff = x(i, c) - x(j, c);
                s += diff * diff;
            }
            dist[k++] = std::sqrt(s);
        }
    }
}

// X <- (1/n) B(X) X, written as a sum over pairs of dhat/d * (x_i - x_j).
Matrix guttman_transform(const Matrix& x, const std::vector<double>& dist, const std::vector<double>& dhat)
{
    const std::size_t n = x.rows();
    const std::size_t p = x.cols();
    Matrix out(n, p);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j, ++k) {
            if (dist[k] <= 0.0) {
                continue;
            }
            const double ratio = dhat[k] / dist[k];
            for (std::size_t c = 0; c < p; ++c) {
                const double step = ratio * (x(i, c) - x(j, c));
                out(i, c) += step;
                out(j, c) -= step;
            }
        }
    }
    for (double& v : out.data()) {
        v /= static_cast<double>(n);
    }
    return out;
}

} // namespace

Embedding smacof_embed(const Matrix& d, std::size_t p, Mode mode, const SmacofOptions& opts)
{
    if (opts.max_iter < 0 || !(opts.rel_tol >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "smacof_embed: max_iter and rel_tol must be nonnegative");
    }
    Embedding emb = classical_mds(d, p);
    emb.converged = false;
    const std::size_t n = d.rows();
    const std::size_t pairs = n * (n - 1) / 2;

    std::vector<double> target(pairs);
    {
        std::size_t k = 0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                target[k++] = d(i, j);
            }
        }
    }
    const double target_ss = std::inner_product(target.begin(), target.end(), target.begin(), 0.0);
    if (!(target_ss > 0.0)) {
        throw Error(ErrorCode::Degenerate, "smacof_embed: all dissimilarities are zero");
    }

    // Pair order by dissimilarity, with runs of equal values kept as tie blocks
    // that are re-sorted by the current distances (primary tie approach).
    std::vector<std::size_t> order(pairs);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return target[a] < target[b]; });
    std::vector<std::pair<std::size_t, std::size_t>> ties;
    for (std::size_t s = 0; s < pairs;) {
        std::size_t e = s + 1;
        while (e < pairs && target[order[e]] == target[order[s]]) {
            ++e;
        }
        if (e - s > 1) {
            ties.emplace_back(s, e);
        }
        s = e;
    }

    Matrix& x = emb.coords;
    std::vector<double> dist(pairs);
    std::vector<double> dhat(pairs);
    const double sqrt_pairs = std::sqrt(static_cast<double>(pairs));
    double previous = 0.0;
    int k = 0;
    for (;; ++k) {
        fill_distances(x, dist);
        double stress = 0.0;
        std::vector<double> fitted;
        if (mode == Mode::NonMetric) {
            for (const auto& [s, e] : ties) {
                std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(s),
                                 order.begin() + static_cast<std::ptrdiff_t>(e),
                                 [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
            }
            fitted = isotonic_regression(dist, order);
            double num = 0.0;
            double den = 0.0;
            for (std::size_t q = 0; q < pairs; ++q) {
                num += (dist[q] - fitted[q]) * (dist[q] - fitted[q]);
                den += dist[q] * dist[q];
            }
            if (!(den > 0.0)) {
                throw Error(ErrorCode::Degenerate, "smacof_embed: embedding collapsed to a point at iteration "
                                                       + std::to_string(k));
            }
            stress = std::sqrt(num / den);
        } else {
            double num = 0.0;
            for (std::size_t q = 0; q < pairs; ++q) {
                num += (dist[q] - target[q]) * (dist[q] - target[q]);
            }
            stress = std::sqrt(num / target_ss);
        }
        emb.stress_history.push_back(stress);
        emb.stress = stress;
        if ((k > 0 && previous - stress <= opts.rel_tol * previous) || stress < 1e-15) {
            emb.converged = true;
            break;
        }
        if (k == opts.max_iter) {
            break;
        }

        if (mode == Mode::NonMetric) {
            // Rescale so the disparities have sum of squares equal to the pair count
            // and the configuration sits at its optimal scale against them; the raw
            // stress then equals pairs * stress-1^2 and the Guttman step can only lower it.
            const double fit_norm = std::sqrt(std::inner_product(fitted.begin(), fitted.end(), fitted.begin(), 0.0));
            const double dist_ss = std::inner_product(dist.begin(), dist.end(), dist.begin(), 0.0);
            const double alpha = sqrt_pairs * fit_norm / dist_ss;
            for (double& v : x.data()) {
                v *= alpha;
            }
            for (std::size_t q = 0; q < pairs; ++q) {
                dist[q] *= alpha;
                dhat[q] = sqrt_pairs * fitted[q] / fit_norm;
            }
        } else {
            dhat = target;
        }
        x = guttman_transform(x, dist, dhat);
        for (double v : x.data()) {
            if (!std::isfinite(v)) {
                throw Error(ErrorCode::Diverged, "smacof_embed: non-finite coordinates at iteration " + std::to_string(k + 1));
            }
        }
        previous = stress;
    }
    emb.iterations = k;

    if (mode == Mode::NonMetric && k > 0) {
        fill_distances(x, dist);
        const double dist_ss = std::inner_product(dist.begin(), dist.end(), dist.begin(), 0.0);
        if (dist_ss > 0.0) {
            const double scale = std::inner_product(dist.begin(), dist.end(), target.begin(), 0.0) / dist_ss;
            for (double& v : x.data()) {
                v *= scale;
            }
        }
    }
    if (k > 0) {
        center_columns(x);
    }
    return emb;
}

LandmarkSet3D to_landmarks(const Matrix& coords, const std::string& topology_id)
{
    if (coords.cols() > 3) {
        throw Error(ErrorCode::DimensionMismatch, "to_landmarks: embedding has more than 3 columns");
    }
    LandmarkSet3D out;
    out.topology_id = topology_id;
    out.points.resize(coords.rows(), Point3{0, 0, 0});
    for (std::size_t i = 0; i < coords.rows(); ++i) {
        for (std::size_t k = 0; k < coords.cols(); ++k) {
            out.points[i][k] = coords(i, k);
        }
    }
    return out;
}

} // namespace lmds::mds
