/*
 * lmds - 3D facial landmark depth from a single 2D view, by learned
 *        pairwise dissimilarities and multidimensional scaling.
 *
 * File: include/lmds/mds.hpp
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

#include <span>
#include <string>
#include <vector>

namespace lmds::mds {

/// Throws Error(InvalidArgument) unless `d` is square, finite, nonnegative,
/// exactly symmetric and has a zero diagonal.
void validate_dissimilarity(const Matrix& d);

/// Euclidean distances between the rows of `coords`, mirrored so the result is exactly symmetric.
Matrix pairwise_distances(const Matrix& coords);
Matrix pairwise_distances(const LandmarkSet3D& shape);

/// B = -1/2 J (D o D) J with J = I - 11^T / n.
Matrix double_center(const Matrix& d);

struct Embedding
{
    Matrix coords;  // n x p, columns centered
    double stress = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> stress_history;  // stress at the start of each iteration
    std::vector<std::string> warnings;
};

/// Torgerson embedding. Eigenvalues at or below 1e-12 * lambda_max count as
/// zero; if fewer than p are positive the missing axes are zero and a warning
/// is recorded. Requires 1 <= p <= n - 1.
Embedding classical_mds(const Matrix& d, std::size_t p);

/**
 * Weighted least-squares fit that is nondecreasing along `order`, by
 * pool-adjacent-violators. `targets`, `weights` and the result are indexed by
 * element, not by rank. Empty `weights` means unit weights. Zero-weight
 * elements take the value of the block they are pooled into.
 */
std::vector<double> isotonic_regression(std::span<const double> targets, std::span<const std::size_t> order,
                                        std::span<const double> weights = {});

/// Kruskal stress-1 over the strict lower triangle:
/// sqrt(sum (d_emb - disparity)^2 / sum d_emb^2). Throws Error(Degenerate)
/// when every embedding distance is zero.
double nonmetric_stress(const Matrix& d, const Matrix& coords, const Matrix& disparities);

enum class Mode { Metric, NonMetric };

const char* to_string(Mode m) noexcept;
Mode mode_from_string(const std::string& name);

struct SmacofOptions
{
    int max_iter = 500;
    double rel_tol = 1e-9;
};

/**
 * SMACOF majorization started from the classical embedding.
 *
 * Metric mode fits D directly and reports sqrt(sum (d - D)^2 / sum D^2).
 * NonMetric mode refits disparities by isotonic regression on the current
 * distances, ordered by D with ties broken by current distance, and reports
 * stress-1; before each Guttman step the configuration and disparities are
 * rescaled so stress-1 can never increase. The final nonmetric configuration
 * is scaled to best match D in least squares.
 */
Embedding smacof_embed(const Matrix& d, std::size_t p, Mode mode, const SmacofOptions& opts = {});

LandmarkSet3D to_landmarks(const Matrix& coords, const std::string& topology_id);

} // namespace lmds::mds
