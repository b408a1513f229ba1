/*
 * lmds - 3D facial landmark depth from a single 2D view, by learned
 *        pairwise dissimilarities and multidimensional scaling.
 *
 * File: src/metrics.cpp
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
#include "lmds/metrics.hpp"

#include "lmds/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>

namespace lmds::metrics {

double landmark_mse(const LandmarkSet3D& pred, const LandmarkSet3D& gt, bool align, bool squared)
{
    if (pred.size() != gt.size()) {
        throw Error(ErrorCode::DimensionMismatch, "landmark_mse: " + std::to_string(pred.size())
                                                      + " predicted vs " + std::to_string(gt.size()) + " true landmarks");
    }
    if (gt.size() == 0) {
        throw Error(ErrorCode::EmptyDataset, "landmark_mse: no landmarks");
    }
    const LandmarkSet3D& moved = align ? procrustes_align(pred, gt).aligned : pred;
    double total = 0.0;
    for (std::size_t i = 0; i < gt.size(); ++i) {
        const double d = distance(moved.points[i], gt.points[i]);
        total += squared ? d * d : d;
    }
    return total / static_cast<double>(gt.size());
}

double depth_corr(const LandmarkSet3D& pred, const LandmarkSet3D& gt)
{
    if (pred.size() != gt.size()) {
        throw Error(ErrorCode::DimensionMismatch, "depth_corr: point counts differ");
    }
    const std::size_t n = gt.size();
    if (n < 3) {
        throw Error(ErrorCode::InvalidArgument, "depth_corr needs at least 3 landmarks");
    }
    const Point3 mp = centroid(pred);
    const Point3 mg = centroid(gt);
    double trace = 0.0;
    for (int a = 0; a < 3; ++a) {
        double sxy = 0.0, sxx = 0.0, syy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = pred.points[i][a] - mp[a];
            const double y = gt.points[i][a] - mg[a];
            sxy += x * y;
            sxx += x * x;
            syy += y * y;
        }
        if (!(sxx > 0.0) || !(syy > 0.0)) {
            throw Error(ErrorCode::Degenerate, "depth_corr: axis " + std::to_string(a) + " has zero variance");
        }
        trace += sxy / std::sqrt(sxx * syy);
    }
    return 100.0 * trace / 3.0;
}

double mean(std::span<const double> values)
{
    if (values.empty()) {
        throw Error(ErrorCode::EmptyDataset, "mean of an empty list");
    }
    double s = 0.0;
    for (double v : values) {
        s += v;
    }
    return s / static_cast<double>(values.size());
}

double sample_std(std::span<const double> values)
{
    if (values.size() < 2) {
        return 0.0;
    }
    const double m = mean(values);
    double ss = 0.0;
    for (double v : values) {
        ss += (v - m) * (v - m);
    }
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

CriterionSummary subsample_protocol(std::span<const double> per_sample, const Protocol& protocol)
{
    const std::size_t n = per_sample.size();
    if (protocol.size == 0 || protocol.reps == 0) {
        throw Error(ErrorCode::InvalidArgument, "subsample size and repetitions must be positive");
    }
    if (protocol.size > n) {
        throw Error(ErrorCode::InvalidArgument, "subsample size " + std::to_string(protocol.size)
                                                    + " exceeds the " + std::to_string(n) + " available samples");
    }
    CriterionSummary out;
    out.per_sample.assign(per_sample.begin(), per_sample.end());
    std::mt19937_64 rng(protocol.seed);
    std::vector<std::size_t> pool(n);
    for (std::size_t rep = 0; rep < protocol.reps; ++rep) {
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        for (std::size_t k = 0; k < protocol.size; ++k) {
            std::uniform_int_distribution<std::size_t> pick(k, n - 1);
            std::swap(pool[k], pool[pick(rng)]);
        }
        std::sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(protocol.size));
        double s = 0.0;
        for (std::size_t k = 0; k < protocol.size; ++k) {
            s += per_sample[pool[k]];
        }
        out.reps.push_back(s / static_cast<double>(protocol.size));
    }
    out.mean = mean(out.reps);
    out.std = sample_std(out.reps);
    return out;
}

EvalReport evaluate(std::span<const LandmarkSet3D> predictions, std::span<const LandmarkSet3D> truths,
                    const Protocol& protocol, bool align)
{
    if (predictions.size() != truths.size()) {
        throw Error(ErrorCode::DimensionMismatch, "evaluate: prediction and truth counts differ");
    }
    std::vector<double> mse;
    std::vector<double> dc;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        const LandmarkSet3D pred = align ? procrustes_align(predictions[i], truths[i]).aligned : predictions[i];
        mse.push_back(landmark_mse(pred, truths[i], false));
        dc.push_back(depth_corr(pred, truths[i]));
    }
    EvalReport report;
    report.protocol = protocol;
    report.mse = subsample_protocol(mse, protocol);
    report.depth_corr = subsample_protocol(dc, protocol);
    return report;
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) {
        throw Error(ErrorCode::DimensionMismatch, "wilcoxon_signed_rank: samples differ in length");
    }
    std::vector<double> diff;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (!std::isfinite(d)) {
            throw Error(ErrorCode::NonFinite, "wilcoxon_signed_rank: non-finite difference");
        }
        if (d != 0.0) {
            diff.push_back(d);
        }
    }
    const std::size_t m = diff.size();
    if (m == 0) {
        throw Error(ErrorCode::InvalidArgument, "wilcoxon_signed_rank: all differences are zero");
    }
    if (m < 5) {
        throw Error(ErrorCode::InvalidArgument, "wilcoxon_signed_rank: needs at least 5 nonzero differences, got "
                                                    + std::to_string(m));
    }

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return std::abs(diff[x]) < std::abs(diff[y]); });
    std::vector<double> rank(m);
    double tie_term = 0.0;
    for (std::size_t s = 0; s < m;) {
        std::size_t e = s + 1;
        while (e < m && std::abs(diff[order[e]]) == std::abs(diff[order[s]])) {
            ++e;
        }
        const double midrank = 0.5 * static_cast<double>(s + 1 + e);
        for (std::size_t k = s; k < e; ++k) {
            rank[order[k]] = midrank;
        }
        const double t = static_cast<double>(e - s);
        tie_term += t * t * t - t;
        s = e;
    }

    WilcoxonResult result;
    result.m = m;
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        total += rank[i];
        if (diff[i] > 0.0) {
            result.statistic += rank[i];
        }
    }
    const double mu = 0.5 * total;
    const double observed = std::abs(result.statistic - mu);

    if (m <= 20) {
        // Walk all sign patterns in Gray-code order, one rank flipping per step.
        result.exact = true;
        constexpr double eps = 1e-9;
        const std::uint64_t patterns = std::uint64_t{1} << m;
        double w = 0.0;
        std::uint64_t extreme = observed <= eps ? 1 : 0;  // the all-negative pattern, W = 0
        if (observed > eps && std::abs(w - mu) >= observed - eps) {
            extreme = 1;
        }
        std::uint64_t signs = 0;
        for (std::uint64_t k = 1; k < patterns; ++k) {
            const int bit = std::countr_zero(k);
            signs ^= std::uint64_t{1} << bit;
            w += (signs >> bit & 1) ? rank[static_cast<std::size_t>(bit)] : -rank[static_cast<std::size_t>(bit)];
            if (std::abs(w - mu) >= observed - eps) {
                ++extreme;
            }
        }
        result.p_value = static_cast<double>(extreme) / static_cast<double>(patterns);
    } else {
        const double md = static_cast<double>(m);
        const double variance = md * (md + 1.0) * (2.0 * md + 1.0) / 24.0 - tie_term / 48.0;
        const double z = std::max(0.0, observed - 0.5) / std::sqrt(variance);
        result.p_value = std::erfc(z / std::sqrt(2.0));
    }
    result.p_value = std::min(1.0, result.p_value);
    return result;
}

} // namespace lmds::metrics
