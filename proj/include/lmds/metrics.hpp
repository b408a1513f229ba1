/*
 * lmds - 3D facial landmark depth from a single 2D view, by learned
 *        pairwise dissimilarities and multidimensional scaling.
 *
 * File: include/lmds/metrics.hpp
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

#include <cstdint>
#include <span>
#include <vector>

namespace lmds::metrics {

/// Mean over landmarks of the squared distance between prediction and truth,
/// after a similarity alignment of `pred` onto `gt` when `align` is set.
/// With `squared` off, the plain distances are averaged instead.
double landmark_mse(const LandmarkSet3D& pred, const LandmarkSet3D& gt, bool align = true, bool squared = true);

/// 100 * (sum of the per-axis Pearson correlations between pred and gt) / 3.
/// Throws Error(Degenerate) if any axis has zero variance in either set.
double depth_corr(const LandmarkSet3D& pred, const LandmarkSet3D& gt);

double mean(std::span<const double> values);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_std(std::span<const double> values);

struct Protocol
{
    std::size_t size = 500;
    std::size_t reps = 10;
    std::uint64_t seed = 1;
};

/// Repeated subsampling of one per-sample criterion.
struct CriterionSummary
{
    std::vector<double> per_sample;
    std::vector<double> reps;  // mean over each subsample
    double mean = 0.0;         // over reps
    double std = 0.0;          // sample std over reps
};

/**
 * Draws `reps` subsets of `size` indices without replacement, each from the
 * same seeded stream regardless of the criterion, and averages the
 * per-sample values over each subset in ascending index order. With
 * size == |values| and reps == 1 the result is the plain mean.
 */
CriterionSummary subsample_protocol(std::span<const double> per_sample, const Protocol& protocol);

struct EvalReport
{
    Protocol protocol;
    CriterionSummary mse;
    CriterionSummary depth_corr;
};

/// Per-sample MSE and DepthCorr, both measured on the aligned prediction when
/// `align` is set, summarized with subsample_protocol.
EvalReport evaluate(std::span<const LandmarkSet3D> predictions, std::span<const LandmarkSet3D> truths,
                    const Protocol& protocol, bool align = true);

struct WilcoxonResult
{
    double statistic = 0.0;  // W+, the rank sum of positive differences
    double p_value = 1.0;    // two-sided
    std::size_t m = 0;       // nonzero differences
    bool exact = false;
};

/// Signed-rank test on a - b with midranks for tied magnitudes. Exact
/// enumeration of all 2^m sign patterns for m <= 20, otherwise the normal
/// approximation with tie and continuity corrections. Throws
/// Error(InvalidArgument) when fewer than 5 differences are nonzero.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

} // namespace lmds::metrics
