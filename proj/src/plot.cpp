/*
 * lmds - 3D facial landmark depth from a single 2D view, by learned
 *        pairwise dissimilarities and multidimensional scaling.
 *
 * File: src/plot.cpp
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
#include "lmds/plot.hpp"

#include "lmds/error.hpp"
#include "lmds/io.hpp"

#include <algorithm>
#include <cmath>

namespace lmds::plot {

namespace {

constexpr double kSize = 400.0;
constexpr double kMargin = 40.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string num(double v)
{
    return io::format_double(v == 0.0 ? 0.0 : v);  // no "-0"
}

std::string escape(const std::string& text)
{
    std::string out;
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Range
{
    double lo = 0.0, hi = 0.0;
};

// Padded range; a flat range is widened so the transform stays finite.
Range padded(double lo, double hi)
{
    double span = hi - lo;
    if (!(span > 0.0)) {
        span = std::max(1.0, std::abs(lo));
        lo -= 0.5 * span;
        hi += 0.5 * span;
    }
    return {lo - 0.05 * span, hi + 0.05 * span};
}

std::string header(double width, double height, const std::string& extra)
{
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
           + num(width) + "\" height=\"" + num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\""
           + extra + ">\n";
}

} // namespace

const char* to_string(Plane p) noexcept
{
    switch (p) {
    case Plane::XY: return "xy";
    case Plane::XZ: return "xz";
    case Plane::YZ: return "yz";
    }
    return "?";
}

std::string scatter_svg(const LandmarkSet3D& predicted, const LandmarkSet3D& truth, Plane plane,
                        const std::string& title)
{
    if (predicted.size() == 0 && truth.size() == 0) {
        throw Error(ErrorCode::EmptyDataset, "nothing to plot");
    }
    const int a = plane == Plane::YZ ? 1 : 0;
    const int b = plane == Plane::XY ? 1 : 2;
    double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
    for (const auto* set : {&predicted, &truth}) {
        for (const auto& p : set->points) {
            if (!std::isfinite(p[a]) || !std::isfinite(p[b])) {
                throw Error(ErrorCode::NonFinite, "cannot plot non-finite coordinates");
            }
            xlo = std::min(xlo, p[a]);
            xhi = std::max(xhi, p[a]);
            ylo = std::min(ylo, p[b]);
            yhi = std::max(yhi, p[b]);
        }
    }
    const Range xr = padded(xlo, xhi);
    const Range yr = padded(ylo, yhi);
    const double inner = kSize - 2.0 * kMargin;
    const double scale = inner / std::max(xr.hi - xr.lo, yr.hi - yr.lo);
    const double radius = 3.0 / scale;
    const std::string axis_names[] = {"x", "y", "z"};

    std::string out = header(kSize, kSize,
                             " data-xmin=\"" + num(xr.lo) + "\" data-xmax=\"" + num(xr.hi) + "\" data-ymin=\""
                                 + num(yr.lo) + "\" data-ymax=\"" + num(yr.hi) + "\"");
    out += "<title>" + escape(title) + "</title>\n";
    out += "<style>.gt{fill:#1f77b4;fill-opacity:0.7}.pred{fill:none;stroke:#d62728;stroke-width:"
           + num(1.5 / scale) + "}</style>\n";
    out += "<rect x=\"" + num(kMargin) + "\" y=\"" + num(kMargin) + "\" width=\"" + num(inner) + "\" height=\""
           + num(inner) + "\" fill=\"none\" stroke=\"#888\"/>\n";
    out += "<text x=\"" + num(kSize / 2) + "\" y=\"20\" text-anchor=\"middle\">" + escape(title) + "</text>\n";
    out += "<text x=\"" + num(kSize / 2) + "\" y=\"" + num(kSize - 10) + "\" text-anchor=\"middle\">" + axis_names[a]
           + " [" + num(xr.lo) + ", " + num(xr.hi) + "]</text>\n";
    out += "<text x=\"12\" y=\"" + num(kSize / 2) + "\" transform=\"rotate(-90 12 " + num(kSize / 2)
           + ")\" text-anchor=\"middle\">" + axis_names[b] + " [" + num(yr.lo) + ", " + num(yr.hi) + "]</text>\n";
    // Data y grows upwards.
    out += "<g transform=\"translate(" + num(kMargin) + " " + num(kSize - kMargin) + ") scale(" + num(scale) + " "
           + num(-scale) + ") translate(" + num(-xr.lo) + " " + num(-yr.lo) + ")\">\n";
    for (const auto& p : truth.points) {
        out += "<circle class=\"gt\" cx=\"" + num(p[a]) + "\" cy=\"" + num(p[b]) + "\" r=\"" + num(radius) + "\"/>\n";
    }
    for (const auto& p : predicted.points) {
        out += "<circle class=\"pred\" cx=\"" + num(p[a]) + "\" cy=\"" + num(p[b]) + "\" r=\"" + num(radius)
               + "\"/>\n";
    }
    out += "</g>\n</svg>\n";
    return out;
}

std::string curves_svg(const std::vector<Series>& series, const std::string& title, const std::string& y_label)
{
    std::size_t longest = 0;
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& s : series) {
        longest = std::max(longest, s.values.size());
        for (double v : s.values) {
            if (std::isfinite(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
    }
    if (longest == 0 || !std::isfinite(lo)) {
        throw Error(ErrorCode::EmptyDataset, "no curve values to plot");
    }
    const double width = 640.0, height = 400.0, left = 70.0, right = 170.0, top = 40.0, bottom = 50.0;
    const Range yr = padded(lo, hi);
    const double xspan = std::max<double>(1.0, static_cast<double>(longest - 1));
    auto px = [&](double i) { return left + (width - left - right) * i / xspan; };
    auto py = [&](double v) { return height - bottom - (height - top - bottom) * (v - yr.lo) / (yr.hi - yr.lo); };

    std::string out = header(width, height, "");
    out += "<title>" + escape(title) + "</title>\n";
    out += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(width - left - right)
           + "\" height=\"" + num(height - top - bottom) + "\" fill=\"none\" stroke=\"#888\"/>\n";
    out += "<text x=\"" + num(width / 2) + "\" y=\"24\" text-anchor=\"middle\">" + escape(title) + "</text>\n";
    out += "<text x=\"" + num((left + width - right) / 2) + "\" y=\"" + num(height - 12)
           + "\" text-anchor=\"middle\">epoch</text>\n";
    out += "<text x=\"16\" y=\"" + num(height / 2) + "\" transform=\"rotate(-90 16 " + num(height / 2)
           + ")\" text-anchor=\"middle\">" + escape(y_label) + "</text>\n";
    out += "<text x=\"" + num(left - 6) + "\" y=\"" + num(py(yr.hi)) + "\" text-anchor=\"end\">" + num(yr.hi)
           + "</text>\n";
    out += "<text x=\"" + num(left - 6) + "\" y=\"" + num(py(yr.lo)) + "\" text-anchor=\"end\">" + num(yr.lo)
           + "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const char* colour = kPalette[k % std::size(kPalette)];
        std::string points;
        for (std::size_t i = 0; i < series[k].values.size(); ++i) {
            if (!std::isfinite(series[k].values[i])) continue;
            if (!points.empty()) points += ' ';
            points += num(px(static_cast<double>(i))) + "," + num(py(series[k].values[i]));
        }
        out += "<polyline class=\"series\" data-name=\"" + escape(series[k].name) + "\" fill=\"none\" stroke=\""
               + colour + "\" stroke-width=\"2\" points=\"" + points + "\"/>\n";
        const double ly = top + 16.0 + 18.0 * static_cast<double>(k);
        out += "<line x1=\"" + num(width - right + 10) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(width - right + 30)
               + "\" y2=\"" + num(ly) + "\" stroke=\"" + colour + "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + num(width - right + 36) + "\" y=\"" + num(ly + 4) + "\">" + escape(series[k].name)
               + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

} // namespace lmds::plot
