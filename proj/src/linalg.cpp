/*
 * lmds - 3D facial landmark depth from a single 2D view, by learned
 *        pairwise dissimilarities and multidimensional scaling.
 *
 * File: src/linalg.cpp
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
#include "lmds/linalg.hpp"

#include "lmds/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace lmds {

Matrix Matrix::identity(std::size_t n)
{
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

Matrix transpose(const Matrix& m)
{
    Matrix t(m.cols(), m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            t(c, r) = m(r, c);
        }
    }
    return t;
}

Matrix multiply(const Matrix& a, const Matrix& b)
{
    if (a.cols() != b.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "matrix product: inner dimensions differ");
    }
    Matrix out(a.rows(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        auto out_row = out.row(r);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(r, k);
            const auto b_row = b.row(k);
            for (std::size_t c = 0; c < b.cols(); ++c) {
                out_row[c] += aik * b_row[c];
            }
        }
    }
    return out;
}

double frobenius_norm(const Matrix& m)
{
    double s = 0.0;
    for (double v : m.data()) {
        s += v * v;
    }
    return std::sqrt(s);
}

namespace {

double off_diagonal_norm_sq(const Matrix& a)
{
    double s = 0.0;
    for (std::size_t p = 0; p < a.rows(); ++p) {
        for (std::size_t q = p + 1; q < a.cols(); ++q) {
            s += a(p, q) * a(p, q);
        }
    }
    return 2.0 * s;
}

} // namespace

EigenDecomposition sym_eig(const Matrix& m, int max_sweeps)
{
    if (m.rows() != m.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "sym_eig: matrix is not square");
    }
    const std::size_t n = m.rows();
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            a(i, j) = 0.5 * (m(i, j) + m(j, i));
        }
    }
    for (double v : a.data()) {
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::NonFinite, "sym_eig: non-finite matrix entry");
        }
    }
    Matrix v = Matrix::identity(n);
    const double norm = frobenius_norm(a);

    EigenDecomposition result;
    bool converged = n < 2 || norm == 0.0;
    int sweep = 0;
    while (!converged && sweep < max_sweeps) {
        ++sweep;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) {
                    continue;
                }
                const double app = a(p, p);
                const double aqq = a(q, q);
                // Once the off-diagonal entry no longer registers against either
                // diagonal entry, the rotation would be a no-op in floating point.
                if (sweep > 4 && std::abs(app) + 100.0 * std::abs(apq) == std::abs(app)
                    && std::abs(aqq) + 100.0 * std::abs(apq) == std::abs(aqq)) {
                    a(p, q) = 0.0;
                    a(q, p) = 0.0;
                    continue;
                }
                const double theta = 0.5 * (aqq - app) / apq;
                double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                if (theta < 0.0) {
                    t = -t;
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) {
                        continue;
                    }
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    const double new_kp = akp - s * (akq + tau * akp);
                    const double new_kq = akq + s * (akp - tau * akq);
                    a(k, p) = new_kp;
                    a(p, k) = new_kp;
                    a(k, q) = new_kq;
                    a(q, k) = new_kq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = vkp - s * (vkq + tau * vkp);
                    v(k, q) = vkq + s * (vkp - tau * vkq);
                }
            }
        }
        const double off = off_diagonal_norm_sq(a);
        converged = off == 0.0 || std::sqrt(off) <= 1e-17 * norm;
    }
    if (!converged) {
        std::ostringstream msg;
        msg << "sym_eig: no convergence after " << max_sweeps << " sweeps, off-diagonal norm "
            << std::sqrt(off_diagonal_norm_sq(a)) << " (matrix norm " << norm << ")";
        throw Error(ErrorCode::NotConverged, msg.str());
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

    result.values.resize(n);
    result.vectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        result.values[k] = a(order[k], order[k]);
        for (std::size_t r = 0; r < n; ++r) {
            result.vectors(r, k) = v(r, order[k]);
        }
    }
    result.sweeps = sweep;
    return result;
}

} // namespace lmds
