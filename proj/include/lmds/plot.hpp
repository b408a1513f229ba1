/*
 * lmds - 3D facial landmark depth from a single 2D view, by learned
 *        pairwise dissimilarities and multidimensional scaling.
 *
 * File: include/lmds/plot.hpp
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

#include <string>
#include <vector>

namespace lmds::plot {

enum class Plane { XY, XZ, YZ };
const char* to_string(Plane p) noexcept;

/**
 * Scatter of one coordinate plane. Points are drawn in data coordinates
 * inside a transformed group: GT markers carry class "gt", predictions class
 * "pred". The root element records the plotted range as data-xmin, data-xmax,
 * data-ymin and data-ymax.
 */
std::string scatter_svg(const LandmarkSet3D& predicted, const LandmarkSet3D& truth, Plane plane,
                        const std::string& title);

struct Series
{
    std::string name;
    std::vector<double> values;  // one per epoch, starting at epoch 0
};

/// Line chart of loss curves, one polyline (class "series") per entry.
std::string curves_svg(const std::vector<Series>& series, const std::string& title, const std::string& y_label);

} // namespace lmds::plot
