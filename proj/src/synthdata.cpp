/*
 * lmds - 3D facial landmark depth from a single 2D view, by learned
 *        pairwise dissimilarities and multidimensional scaling.
 *
 * File: src/synthdata.cpp
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
#include "lmds/synthdata.hpp"

#include "lmds/error.hpp"
#include "lmds/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

namespace lmds::synth {

namespace {

constexpr double kPi = std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double head_depth(double x, double y)
{
    const double shell = 1.0 - (x / 1.25) * (x / 1.25) - (y / 1.8) * (y / 1.8);
    double z = 0.85 * std::sqrt(std::max(0.05, shell));
    z += 0.45 * std::exp(-(x * x / 0.03 + (y + 0.1) * (y + 0.1) / 0.12));                            // nose
    z -= 0.08 * std::exp(-((std::abs(x) - 0.42) * (std::abs(x) - 0.42) / 0.02 + (y - 0.28) * (y - 0.28) / 0.01)); // eye sockets
    z += 0.05 * std::exp(-(x * x / 0.1 + (y + 0.72) * (y + 0.72) / 0.02));                           // lips
    return z;
}

struct Curve
{
    double weight;
    Point2 (*at)(double t);
};

const Curve kCurves[] = {
    {0.30, [](double t) { const double a = 1.35 * t; return Point2{0.08 + 0.95 * std::cos(a), 0.25 - 1.45 * std::sin(a)}; }},
    {0.17, [](double t) { return Point2{0.18 + 0.7 * t, 0.6 + 0.12 * std::sin(kPi * t)}; }},
    {0.20, [](double t) { const double a = 2.0 * kPi * t; return Point2{0.42 + 0.19 * std::cos(a), 0.28 + 0.07 * std::sin(a)}; }},
    {0.10, [](double t) { return Point2{0.07 + 0.15 * t, -0.05 - 0.3 * t}; }},
    {0.23, [](double t) { const double a = -0.5 * kPi + kPi * t; return Point2{0.04 + 0.4 * std::cos(a), -0.72 + 0.14 * std::sin(a)}; }},
};

// Splits `pairs` landmarks over the curves by weight, largest remainders first.
std::vector<std::size_t> allocate(std::size_t pairs)
{
    constexpr std::size_t m = std::size(kCurves);
    std::vector<std::size_t> counts(m);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t used = 0;
    for (std::size_t c = 0; c < m; ++c) {
        const double exact = kCurves[c].weight * static_cast<double>(pairs);
        counts[c] = static_cast<std::size_t>(std::floor(exact));
        used += counts[c];
        remainders.emplace_back(exact - std::floor(exact), c);
    }
    std::stable_sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t r = 0; used < pairs; ++r, ++used) {
        ++counts[remainders[r % m].second];
    }
    return counts;
}

LandmarkSet3D face_template(std::size_t n, std::vector<std::size_t>& mirror)
{
    std::size_t mid = static_cast<std::size_t>(std::lround(0.17 * static_cast<double>(n)));
    if ((n - mid) % 2 != 0) {
        mid = mid > 0 ? mid - 1 : 1;
    }
    mid = std::max<std::size_t>(mid, n % 2 == 0 ? 2 : 1);
    const std::size_t pairs = (n - mid) / 2;

    LandmarkSet3D shape;
    shape.topology_id = topology_id(n);
    mirror.clear();
    for (std::size_t i = 0; i < mid; ++i) {
        const double t = mid == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(mid - 1);
        const double y = 1.05 - 2.4 * t;
        shape.points.push_back({0.0, y, head_depth(0.0, y)});
        mirror.push_back(i);
    }
    const auto counts = allocate(pairs);
    for (std::size_t c = 0; c < counts.size(); ++c) {
        for (std::size_t j = 0; j < counts[c]; ++j) {
            const double t = (static_cast<double>(j) + 0.5) / static_cast<double>(counts[c]);
            const Point2 q = kCurves[c].at(t);
            const double z = head_depth(q[0], q[1]);
            const std::size_t right = shape.points.size();
            shape.points.push_back({q[0], q[1], z});
            shape.points.push_back({-q[0], q[1], z});
            mirror.push_back(right + 1);
            mirror.push_back(right);
        }
    }

    // Centre and scale; x stays exactly antisymmetric because its mean is zero by construction.
    Point3 c = centroid(shape);
    c[0] = 0.0;
    for (auto& p : shape.points) {
        p = {p[0], p[1] - c[1], p[2] - c[2]};
    }
    const double r = rms_radius(shape);
    for (auto& p : shape.points) {
        p = {p[0] / r, p[1] / r, p[2] / r};
    }
    return shape;
}

double dot(const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

// Modified Gram-Schmidt against `basis`, applied twice; false if little is left.
bool orthonormalize_into(std::vector<double>& v, const std::vector<std::vector<double>>& basis)
{
    const double original = std::sqrt(dot(v, v));
    if (!(original > 0.0)) {
        return false;
    }
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto& b : basis) {
            const double proj = dot(v, b);
            for (std::size_t i = 0; i < v.size(); ++i) {
                v[i] -= proj * b[i];
            }
        }
    }
    const double norm = std::sqrt(dot(v, v));
    if (!(norm > 1e-8 * original)) {
        return false;
    }
    for (double& x : v) {
        x /= norm;
    }
    return true;
}

void fill_sigmas(LandmarkModel& model, double deviation_rms)
{
    const std::size_t k = model.modes();
    double decay_ss = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        decay_ss += std::pow(0.81, static_cast<double>(i));
    }
    const double scale = std::sqrt(static_cast<double>(model.landmarks()) * deviation_rms * deviation_rms / decay_ss);
    model.sigmas.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        model.sigmas[i] = scale * std::pow(0.9, static_cast<double>(i));
    }
}

} // namespace

std::string topology_id(std::size_t n)
{
    return "synthetic-" + std::to_string(n);
}

std::uint32_t LandmarkModel::hash() const
{
    std::uint32_t crc = io::crc32(mean_shape.topology_id);
    for (const auto& p : mean_shape.points) {
        crc = io::crc32_doubles(p, crc);
    }
    for (const auto& b : basis) {
        crc = io::crc32_doubles(b, crc);
    }
    return io::crc32_doubles(sigmas, crc);
}

LandmarkModel build_default_model(std::size_t n, std::size_t k, std::uint64_t seed, double deviation_rms)
{
    if (n < 10) {
        throw Error(ErrorCode::InvalidArgument, "landmark model needs at least 10 landmarks");
    }
    if (k >= 3 * n) {
        throw Error(ErrorCode::InvalidArgument, "basis size " + std::to_string(k) + " must be below 3n = "
                                                    + std::to_string(3 * n));
    }
    if (!(deviation_rms > 0.0) || !std::isfinite(deviation_rms)) {
        throw Error(ErrorCode::InvalidArgument, "deviation_rms must be positive");
    }
    LandmarkModel model;
    model.mean_shape = face_template(n, model.mirror);

    std::mt19937_64 rng(splitmix64(seed));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    for (std::size_t mode = 0; mode < k; ++mode) {
        std::vector<double> v(3 * n, 0.0);
        for (int axis = 0; axis < 3; ++axis) {
            for (int wave = 0; wave < 4; ++wave) {
                const Point3 omega{1.2 * gauss(rng), 1.2 * gauss(rng), 1.2 * gauss(rng)};
                const double amp = gauss(rng);
                const double ph = phase(rng);
                for (std::size_t i = 0; i < n; ++i) {
                    const auto& p = model.mean_shape.points[i];
                    v[3 * i + static_cast<std::size_t>(axis)] +=
                        amp * std::sin(omega[0] * p[0] + omega[1] * p[1] + omega[2] * p[2] + ph);
                }
            }
        }
        while (!orthonormalize_into(v, model.basis)) {
            for (double& x : v) {
                x = gauss(rng);
            }
        }
        model.basis.push_back(std::move(v));
    }
    fill_sigmas(model, deviation_rms);
    return model;
}

ModelSpec preset(const std::string& name, std::uint64_t seed)
{
    ModelSpec spec;
    spec.seed = seed;
    if (name == "synthetic-72") {
        spec.landmarks = 72;
    } else if (name == "synthetic-51") {
        spec.landmarks = 51;
    } else {
        throw Error(ErrorCode::InvalidArgument, "unknown model preset '" + name + "'");
    }
    return spec;
}

LandmarkModel import_model(const std::filesystem::path& template_path, const std::filesystem::path& basis_path)
{
    auto parse_line = [](const std::string& line, std::size_t lineno, const std::filesystem::path& file) {
        std::vector<double> values;
        std::istringstream in(line);
        std::string tok;
        while (in >> tok) {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
                throw Error(ErrorCode::BadFormat, file.string() + ":" + std::to_string(lineno) + ": bad number '" + tok + "'");
            }
            values.push_back(v);
        }
        return values;
    };
    auto read_rows = [&](const std::filesystem::path& file) {
        std::vector<std::vector<double>> rows;
        std::istringstream in(io::read_text(file));
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto t = io::trim(line);
            if (t.empty() || t.front() == '#') {
                continue;
            }
            rows.push_back(parse_line(std::string(t), lineno, file));
        }
        return rows;
    };

    LandmarkModel model;
    for (const auto& row : read_rows(template_path)) {
        if (row.size() != 3) {
            throw Error(ErrorCode::BadFormat, template_path.string() + ": template rows need exactly 3 values");
        }
        model.mean_shape.points.push_back({row[0], row[1], row[2]});
    }
    const std::size_t n = model.mean_shape.size();
    if (n < 4) {
        throw Error(ErrorCode::BadFormat, template_path.string() + ": template needs at least 4 landmarks");
    }
    model.mean_shape.topology_id = "imported-" + std::to_string(n);
    for (std::size_t i = 0; i < n; ++i) {
        model.mirror.push_back(i);
    }
    for (auto row : read_rows(basis_path)) {
        if (row.size() != 3 * n + 1 || !(row[0] > 0.0)) {
            throw Error(ErrorCode::BadFormat, basis_path.string() + ": basis rows need a positive sigma and "
                                                  + std::to_string(3 * n) + " values");
        }
        const double sigma = row.front();
        std::vector<double> v(row.begin() + 1, row.end());
        if (!orthonormalize_into(v, model.basis)) {
            throw Error(ErrorCode::BadFormat, basis_path.string() + ": basis vectors are linearly dependent");
        }
        model.basis.push_back(std::move(v));
        model.sigmas.push_back(sigma);
    }
    if (model.modes() >= 3 * n) {
        throw Error(ErrorCode::BadFormat, basis_path.string() + ": too many basis vectors");
    }
    return model;
}

LandmarkModel build_model(const ModelSpec& spec)
{
    if (spec.source == "imported") {
        return import_model(spec.template_path, spec.basis_path);
    }
    if (spec.source != "procedural") {
        throw Error(ErrorCode::InvalidArgument, "unknown model source '" + spec.source + "'");
    }
    return build_default_model(spec.landmarks, spec.modes, spec.seed, spec.deviation_rms);
}

LandmarkSet3D synthesize(const LandmarkModel& model, std::span<const double> coefficients)
{
    if (coefficients.size() != model.modes()) {
        throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(model.modes()) + " coefficients, got "
                                                      + std::to_string(coefficients.size()));
    }
    LandmarkSet3D shape = model.mean_shape;
    for (std::size_t i = 0; i < shape.size(); ++i) {
        for (std::size_t a = 0; a < 3; ++a) {
            double v = shape.points[i][a];
            for (std::size_t k = 0; k < coefficients.size(); ++k) {
                v += coefficients[k] * model.basis[k][3 * i + a];
            }
            shape.points[i][a] = v;
        }
    }
    return shape;
}

ViewParams canonical_view()
{
    return ViewParams{};
}

ShapeSample make_sample(const LandmarkModel& model, std::uint64_t face_id, std::vector<double> coefficients,
                        const ViewParams& view)
{
    ShapeSample s;
    s.face_id = face_id;
    s.gt_3d = synthesize(model, coefficients);
    s.coefficients = std::move(coefficients);
    s.view = view;
    s.input_2d = render_view(s.gt_3d, view);
    s.profile_2d = project(s.gt_3d, canonical_view());
    return s;
}

std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index) noexcept
{
    return splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

std::vector<ShapeSample> sample_faces(const LandmarkModel& model, std::size_t count, const ViewDistribution& views,
                                      std::uint64_t seed, std::uint64_t offset)
{
    if (views.yaw_choices.empty()) {
        throw Error(ErrorCode::InvalidArgument, "view distribution needs at least one yaw choice");
    }
    std::vector<ShapeSample> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint64_t face_id = offset + i;
        std::mt19937_64 rng(sample_seed(seed, face_id));
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<double> coefficients(model.modes());
        for (std::size_t k = 0; k < coefficients.size(); ++k) {
            coefficients[k] = model.sigmas[k] * gauss(rng);
        }
        // Every draw is made regardless of the projection type so the stream stays aligned.
        std::uniform_int_distribution<std::size_t> pick(0, views.yaw_choices.size() - 1);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        ViewParams view;
        view.yaw_deg = views.yaw_choices[pick(rng)];
        const bool perspective = unit(rng) < views.perspective_probability;
        const double az = views.azimuth_min + (views.azimuth_max - views.azimuth_min) * unit(rng);
        const double el = views.elevation_min + (views.elevation_max - views.elevation_min) * unit(rng);
        const double fov = views.fov_min + (views.fov_max - views.fov_min) * unit(rng);
        if (perspective) {
            view.projection = Projection::Perspective;
            view.azimuth_deg = az;
            view.elevation_deg = el;
            view.fov_deg = fov;
        }
        out.push_back(make_sample(model, face_id, std::move(coefficients), view));
    }
    return out;
}

Dataset generate(const DatasetManifest& recipe)
{
    const LandmarkModel model = build_model(recipe.model);
    Dataset ds;
    ds.manifest = recipe;
    ds.manifest.schema_version = kSchemaVersion;
    ds.manifest.generator_version = kGeneratorVersion;
    ds.manifest.model.landmarks = model.landmarks();
    ds.manifest.model.modes = model.modes();
    ds.manifest.model_hash = io::hex32(model.hash());
    ds.samples = sample_faces(model, recipe.count, recipe.views, recipe.seed, recipe.offset);
    return ds;
}

Dataset regenerate(const DatasetManifest& manifest)
{
    if (manifest.schema_version != kSchemaVersion || manifest.generator_version != kGeneratorVersion) {
        throw Error(ErrorCode::SchemaMismatch, "manifest was written by schema " + std::to_string(manifest.schema_version)
                                                   + " / generator " + std::to_string(manifest.generator_version));
    }
    Dataset ds = generate(manifest);
    if (!manifest.model_hash.empty() && ds.manifest.model_hash != manifest.model_hash) {
        throw Error(ErrorCode::SchemaMismatch, "model hash " + ds.manifest.model_hash + " does not match manifest hash "
                                                   + manifest.model_hash);
    }
    return ds;
}

std::filesystem::path manifest_path(const std::filesystem::path& stem)
{
    return std::filesystem::path(stem.string() + ".manifest");
}

std::filesystem::path records_path(const std::filesystem::path& stem)
{
    return std::filesystem::path(stem.string() + ".lmds");
}

namespace {

std::string join_doubles(const std::vector<double>& values)
{
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += io::format_double(values[i]);
    }
    return out;
}

double parse_decimal(const std::string& text, const std::string& key)
{
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw Error(ErrorCode::MalformedRecord, "manifest key '" + key + "': bad number '" + text + "'");
    }
    return v;
}

std::uint64_t parse_unsigned(const std::string& text, const std::string& key)
{
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw Error(ErrorCode::MalformedRecord, "manifest key '" + key + "': bad integer '" + text + "'");
    }
    return v;
}

std::pair<double, double> parse_range(const std::string& text, const std::string& key)
{
    const auto parts = io::split(text, ',');
    if (parts.size() != 2) {
        throw Error(ErrorCode::MalformedRecord, "manifest key '" + key + "' needs 'min,max'");
    }
    return {parse_decimal(parts[0], key), parse_decimal(parts[1], key)};
}

} // namespace

std::string format_manifest(const DatasetManifest& m)
{
    std::ostringstream out;
    out << "schema_version=" << m.schema_version << "\n"
        << "generator_version=" << m.generator_version << "\n"
        << "split=" << m.split << "\n"
        << "seed=" << m.seed << "\n"
        << "count=" << m.count << "\n"
        << "offset=" << m.offset << "\n"
        << "model_source=" << m.model.source << "\n"
        << "model_landmarks=" << m.model.landmarks << "\n"
        << "model_modes=" << m.model.modes << "\n"
        << "model_seed=" << m.model.seed << "\n"
        << "model_deviation_rms=" << io::format_double(m.model.deviation_rms) << "\n"
        << "model_template=" << m.model.template_path.string() << "\n"
        << "model_basis=" << m.model.basis_path.string() << "\n"
        << "model_hash=" << m.model_hash << "\n"
        << "yaw_choices=" << join_doubles(m.views.yaw_choices) << "\n"
        << "perspective_probability=" << io::format_double(m.views.perspective_probability) << "\n"
        << "azimuth_range=" << io::format_double(m.views.azimuth_min) << "," << io::format_double(m.views.azimuth_max) << "\n"
        << "elevation_range=" << io::format_double(m.views.elevation_min) << ","
        << io::format_double(m.views.elevation_max) << "\n"
        << "fov_range=" << io::format_double(m.views.fov_min) << "," << io::format_double(m.views.fov_max) << "\n";
    return out.str();
}

DatasetManifest parse_manifest(const std::string& text)
{
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto t = io::trim(line);
        if (t.empty() || t.front() == '#') {
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorCode::MalformedRecord, "manifest line " + std::to_string(lineno) + ": expected key=value");
        }
        kv[std::string(io::trim(t.substr(0, eq)))] = std::string(io::trim(t.substr(eq + 1)));
    }
    auto need = [&](const std::string& key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end()) {
            throw Error(ErrorCode::MalformedRecord, "manifest is missing '" + key + "'");
        }
        return it->second;
    };

    DatasetManifest m;
    m.schema_version = static_cast<int>(parse_unsigned(need("schema_version"), "schema_version"));
    if (m.schema_version != kSchemaVersion) {
        throw Error(ErrorCode::SchemaMismatch, "manifest schema version " + std::to_string(m.schema_version)
                                                   + ", expected " + std::to_string(kSchemaVersion));
    }
    m.generator_version = static_cast<int>(parse_unsigned(need("generator_version"), "generator_version"));
    m.split = need("split");
    m.seed = parse_unsigned(need("seed"), "seed");
    m.count = parse_unsigned(need("count"), "count");
    m.offset = parse_unsigned(need("offset"), "offset");
    m.model.source = need("model_source");
    m.model.landmarks = parse_unsigned(need("model_landmarks"), "model_landmarks");
    m.model.modes = parse_unsigned(need("model_modes"), "model_modes");
    m.model.seed = parse_unsigned(need("model_seed"), "model_seed");
    m.model.deviation_rms = parse_decimal(need("model_deviation_rms"), "model_deviation_rms");
    m.model.template_path = need("model_template");
    m.model.basis_path = need("model_basis");
    m.model_hash = need("model_hash");
    m.views.yaw_choices.clear();
    for (const auto& part : io::split(need("yaw_choices"), ',')) {
        m.views.yaw_choices.push_back(parse_decimal(part, "yaw_choices"));
    }
    m.views.perspective_probability = parse_decimal(need("perspective_probability"), "perspective_probability");
    std::tie(m.views.azimuth_min, m.views.azimuth_max) = parse_range(need("azimuth_range"), "azimuth_range");
    std::tie(m.views.elevation_min, m.views.elevation_max) = parse_range(need("elevation_range"), "elevation_range");
    std::tie(m.views.fov_min, m.views.fov_max) = parse_range(need("fov_range"), "fov_range");
    return m;
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& stem)
{
    if (dataset.samples.size() != dataset.manifest.count) {
        throw Error(ErrorCode::InvalidArgument, "manifest count does not match the number of samples");
    }
    const std::size_t n = dataset.manifest.model.landmarks;
    const std::size_t k = dataset.manifest.model.modes;
    std::string text = "lmds-dataset schema=" + std::to_string(kSchemaVersion) + " landmarks=" + std::to_string(n)
                       + " modes=" + std::to_string(k) + " count=" + std::to_string(dataset.samples.size()) + "\n";
    for (const auto& s : dataset.samples) {
        if (s.gt_3d.size() != n || s.input_2d.size() != n || s.profile_2d.size() != n || s.coefficients.size() != k) {
            throw Error(ErrorCode::DimensionMismatch, "sample " + std::to_string(s.face_id) + " does not match the manifest shape");
        }
        std::string line = std::to_string(s.face_id);
        line += s.view.projection == Projection::Perspective ? " p" : " o";
        for (double v : {s.view.yaw_deg, s.view.azimuth_deg, s.view.elevation_deg, s.view.fov_deg}) {
            line += ' ' + io::hex_double(v);
        }
        for (double v : s.coefficients) {
            line += ' ' + io::hex_double(v);
        }
        for (const auto& p : s.gt_3d.points) {
            for (double v : p) line += ' ' + io::hex_double(v);
        }
        for (const auto* set : {&s.input_2d, &s.profile_2d}) {
            for (const auto& p : set->points) {
                for (double v : p) line += ' ' + io::hex_double(v);
            }
        }
        text += line + '\n';
    }
    std::filesystem::create_directories(std::filesystem::absolute(stem).parent_path());
    io::write_text(manifest_path(stem), format_manifest(dataset.manifest));
    io::write_text(records_path(stem), text);
}

Dataset read_dataset(const std::filesystem::path& stem)
{
    Dataset ds;
    ds.manifest = parse_manifest(io::read_text(manifest_path(stem)));
    const std::string text = io::read_text(records_path(stem));
    const std::size_t n = ds.manifest.model.landmarks;
    const std::size_t k = ds.manifest.model.modes;
    const std::string topo = ds.manifest.model.source == "imported" ? "imported-" + std::to_string(n) : topology_id(n);

    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) {
        throw Error(ErrorCode::MalformedRecord, records_path(stem).string() + ": line 1: missing header");
    }
    ++lineno;
    const std::string expected_prefix = "lmds-dataset schema=";
    if (line.rfind(expected_prefix, 0) != 0) {
        throw Error(ErrorCode::MalformedRecord, records_path(stem).string() + ": line 1: not a dataset header");
    }
    const auto header = io::split(line, ' ');
    if (header[1] != "schema=" + std::to_string(kSchemaVersion)) {
        throw Error(ErrorCode::SchemaMismatch, records_path(stem).string() + ": dataset " + header[1] + ", expected schema="
                                                   + std::to_string(kSchemaVersion));
    }
    const std::string expected_header = "lmds-dataset schema=" + std::to_string(kSchemaVersion) + " landmarks="
                                        + std::to_string(n) + " modes=" + std::to_string(k)
                                        + " count=" + std::to_string(ds.manifest.count);
    if (line != expected_header) {
        throw Error(ErrorCode::SchemaMismatch, records_path(stem).string() + ": header '" + line
                                                   + "' does not match the manifest");
    }

    const std::size_t fields = 2 + 4 + k + 3 * n + 4 * n;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = records_path(stem).string() + ": line " + std::to_string(lineno) + ": ";
        if (line.empty()) {
            throw Error(ErrorCode::MalformedRecord, where + "empty record");
        }
        const auto tok = io::split(line, ' ');
        if (tok.size() != fields) {
            throw Error(ErrorCode::MalformedRecord, where + "expected " + std::to_string(fields) + " fields, got "
                                                        + std::to_string(tok.size()));
        }
        try {
            ShapeSample s;
            s.face_id = parse_unsigned(tok[0], "face_id");
            if (tok[1] != "o" && tok[1] != "p") {
                throw Error(ErrorCode::MalformedRecord, "unknown projection tag '" + tok[1] + "'");
            }
            s.view.projection = tok[1] == "p" ? Projection::Perspective : Projection::Orthographic;
            std::size_t t = 2;
            s.view.yaw_deg = io::parse_hex_double(tok[t++]);
            s.view.azimuth_deg = io::parse_hex_double(tok[t++]);
            s.view.elevation_deg = io::parse_hex_double(tok[t++]);
            s.view.fov_deg = io::parse_hex_double(tok[t++]);
            s.coefficients.resize(k);
            for (auto& c : s.coefficients) {
                c = io::parse_hex_double(tok[t++]);
            }
            s.gt_3d.topology_id = s.input_2d.topology_id = s.profile_2d.topology_id = topo;
            s.gt_3d.points.resize(n);
            for (auto& p : s.gt_3d.points) {
                for (double& v : p) v = io::parse_hex_double(tok[t++]);
            }
            for (auto* set : {&s.input_2d, &s.profile_2d}) {
                set->points.resize(n);
                for (auto& p : set->points) {
                    for (double& v : p) v = io::parse_hex_double(tok[t++]);
                }
            }
            ds.samples.push_back(std::move(s));
        } catch (const Error& e) {
            throw Error(ErrorCode::MalformedRecord, where + e.what());
        }
    }
    if (ds.samples.size() != ds.manifest.count) {
        throw Error(ErrorCode::MalformedRecord, records_path(stem).string() + ": expected "
                                                    + std::to_string(ds.manifest.count) + " records, found "
                                                    + std::to_string(ds.samples.size()));
    }
    return ds;
}

} // namespace lmds::synth
