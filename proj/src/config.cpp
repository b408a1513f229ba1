/*
 * lmds - 3D facial landmark depth from a single 2D view, by learned
 *        pairwise dissimilarities and multidimensional scaling.
 *
 * File: src/config.cpp
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
#include "lmds/config.hpp"

#include "lmds/error.hpp"
#include "lmds/io.hpp"

#include <charconv>
#include <cmath>
#include <functional>

namespace lmds {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept
{
    return synth::sample_seed(seed, stream);
}

namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& text)
{
    T value{};
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw Error(ErrorCode::Config, "bad value '" + text + "' for " + key);
    }
    return value;
}

std::size_t parse_size(const std::string& key, const std::string& text)
{
    return parse_number<std::size_t>(key, text);
}

int parse_int(const std::string& key, const std::string& text)
{
    return parse_number<int>(key, text);
}

double parse_real(const std::string& key, const std::string& text)
{
    const double v = parse_number<double>(key, text);
    if (!std::isfinite(v)) {
        throw Error(ErrorCode::Config, key + " must be finite");
    }
    return v;
}

bool parse_bool(const std::string& key, const std::string& text)
{
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw Error(ErrorCode::Config, "bad boolean '" + text + "' for " + key);
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& text, T (*one)(const std::string&, const std::string&))
{
    std::vector<T> out;
    for (const auto& part : io::split(text, ',')) {
        out.push_back(one(key, std::string(io::trim(part))));
    }
    if (out.empty()) {
        throw Error(ErrorCode::Config, key + " needs at least one value");
    }
    return out;
}

template <typename T>
std::string join(const std::vector<T>& values)
{
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        if constexpr (std::is_floating_point_v<T>) {
            out += io::format_double(values[i]);
        } else {
            out += std::to_string(values[i]);
        }
    }
    return out;
}

std::string str(double v) { return io::format_double(v); }
std::string str(bool v) { return v ? "true" : "false"; }
template <typename T>
std::string str(T v) requires std::is_integral_v<T> { return std::to_string(v); }

struct Entry
{
    const char* key;
    std::function<void(PipelineConfig&, const std::string&, const std::string&)> set;
    std::function<std::string(const PipelineConfig&)> get;
};

#define LMDS_ENTRY(name, field, parser)                                                                  \
    Entry                                                                                                \
    {                                                                                                    \
        name, [](PipelineConfig& c, const std::string& k, const std::string& v) { c.field = parser(k, v); }, \
            [](const PipelineConfig& c) { return str(c.field); }                                         \
    }

const std::vector<Entry>& entries()
{
    static const std::vector<Entry> table = {
        LMDS_ENTRY("seed", seed, parse_number<std::uint64_t>),
        Entry{"out_dir", [](PipelineConfig& c, const std::string&, const std::string& v) { c.out_dir = v; },
              [](const PipelineConfig& c) { return c.out_dir.string(); }},
        LMDS_ENTRY("data.train_count", train_count, parse_size),
        LMDS_ENTRY("data.test_count", test_count, parse_size),
        Entry{"model.source",
              [](PipelineConfig& c, const std::string& k, const std::string& v) {
                  if (v != "procedural" && v != "imported") {
                      throw Error(ErrorCode::Config, k + " must be procedural or imported");
                  }
                  c.model.source = v;
              },
              [](const PipelineConfig& c) { return c.model.source; }},
        LMDS_ENTRY("model.landmarks", model.landmarks, parse_size),
        LMDS_ENTRY("model.modes", model.modes, parse_size),
        LMDS_ENTRY("model.deviation_rms", model.deviation_rms, parse_real),
        Entry{"model.template_path",
              [](PipelineConfig& c, const std::string&, const std::string& v) { c.model.template_path = v; },
              [](const PipelineConfig& c) { return c.model.template_path.string(); }},
        Entry{"model.basis_path",
              [](PipelineConfig& c, const std::string&, const std::string& v) { c.model.basis_path = v; },
              [](const PipelineConfig& c) { return c.model.basis_path.string(); }},
        Entry{"views.yaw_choices",
              [](PipelineConfig& c, const std::string& k, const std::string& v) {
                  c.views.yaw_choices = parse_list<double>(k, v, parse_real);
              },
              [](const PipelineConfig& c) { return join(c.views.yaw_choices); }},
        LMDS_ENTRY("views.perspective_probability", views.perspective_probability, parse_real),
        LMDS_ENTRY("views.azimuth_min", views.azimuth_min, parse_real),
        LMDS_ENTRY("views.azimuth_max", views.azimuth_max, parse_real),
        LMDS_ENTRY("views.elevation_min", views.elevation_min, parse_real),
        LMDS_ENTRY("views.elevation_max", views.elevation_max, parse_real),
        LMDS_ENTRY("views.fov_min", views.fov_min, parse_real),
        LMDS_ENTRY("views.fov_max", views.fov_max, parse_real),
        Entry{"viewnorm.hidden",
              [](PipelineConfig& c, const std::string& k, const std::string& v) {
                  c.viewnorm_hidden = parse_list<std::size_t>(k, v, parse_size);
              },
              [](const PipelineConfig& c) { return join(c.viewnorm_hidden); }},
        LMDS_ENTRY("viewnorm.epochs", viewnorm_epochs, parse_int),
        LMDS_ENTRY("viewnorm.learning_rate", viewnorm_learning_rate, parse_real),
        LMDS_ENTRY("viewnorm.batch_size", viewnorm_batch_size, parse_size),
        LMDS_ENTRY("viewnorm.validation_fraction", viewnorm_validation_fraction, parse_real),
        LMDS_ENTRY("dissim.width", dissim_width, parse_size),
        LMDS_ENTRY("dissim.hidden", dissim_hidden, parse_size),
        LMDS_ENTRY("dissim.epochs", dissim_epochs, parse_int),
        LMDS_ENTRY("dissim.learning_rate", dissim_learning_rate, parse_real),
        Entry{"dissim.scheme",
              [](PipelineConfig& c, const std::string&, const std::string& v) {
                  c.dissim_scheme = dissim::scheme_from_string(v);
              },
              [](const PipelineConfig& c) { return std::string(dissim::to_string(c.dissim_scheme)); }},
        LMDS_ENTRY("dissim.validation_fraction", dissim_validation_fraction, parse_real),
        Entry{"mds.mode",
              [](PipelineConfig& c, const std::string&, const std::string& v) { c.mds_mode = mds::mode_from_string(v); },
              [](const PipelineConfig& c) { return std::string(mds::to_string(c.mds_mode)); }},
        LMDS_ENTRY("mds.max_iter", smacof.max_iter, parse_int),
        LMDS_ENTRY("mds.rel_tol", smacof.rel_tol, parse_real),
        LMDS_ENTRY("pipeline.skip_viewnorm", skip_viewnorm, parse_bool),
        LMDS_ENTRY("eval.size", eval_size, parse_size),
        LMDS_ENTRY("eval.reps", eval_reps, parse_size),
        LMDS_ENTRY("eval.align", eval_align, parse_bool),
        LMDS_ENTRY("ablate.faces", ablate_faces, parse_size),
        LMDS_ENTRY("ablate.epochs", ablate_epochs, parse_int),
        LMDS_ENTRY("ablate.seeds", ablate_seeds, parse_size),
        LMDS_ENTRY("plot.faces", plot_faces, parse_size),
    };
    return table;
}

#undef LMDS_ENTRY

} // namespace

void apply_setting(PipelineConfig& config, const std::string& key, const std::string& value)
{
    for (const auto& e : entries()) {
        if (key == e.key) {
            try {
                e.set(config, key, value);
            } catch (const Error& err) {
                if (err.code() == ErrorCode::Config) throw;
                throw Error(ErrorCode::Config, key + ": " + err.what());
            }
            return;
        }
    }
    throw Error(ErrorCode::Config, "unknown config key '" + key + "'");
}

PipelineConfig parse_config(const std::string& text, PipelineConfig base)
{
    std::size_t line_no = 0;
    for (const auto& raw : io::split(text, '\n')) {
        ++line_no;
        std::string line(raw);
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const std::string trimmed(io::trim(line));
        if (trimmed.empty()) {
            continue;
        }
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::Config, "line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key(io::trim(trimmed.substr(0, eq)));
        const std::string value(io::trim(trimmed.substr(eq + 1)));
        try {
            apply_setting(base, key, value);
        } catch (const Error& err) {
            throw Error(ErrorCode::Config, "line " + std::to_string(line_no) + ": " + err.what());
        }
    }
    return base;
}

PipelineConfig load_config(const std::filesystem::path& path)
{
    return parse_config(io::read_text(path));
}

std::string format_config(const PipelineConfig& config)
{
    std::string out;
    for (const auto& e : entries()) {
        out += e.key;
        out += " = ";
        out += e.get(config);
        out += '\n';
    }
    return out;
}

namespace {

synth::DatasetManifest recipe(const PipelineConfig& config)
{
    synth::DatasetManifest m;
    m.seed = config.seed;
    m.model = config.model;
    m.model.seed = config.seed;
    m.views = config.views;
    return m;
}

} // namespace

synth::DatasetManifest train_recipe(const PipelineConfig& config)
{
    auto m = recipe(config);
    m.split = "train";
    m.count = config.train_count;
    m.offset = 0;
    return m;
}

synth::DatasetManifest test_recipe(const PipelineConfig& config)
{
    auto m = recipe(config);
    m.split = "test";
    m.count = config.test_count;
    m.offset = config.train_count;
    return m;
}

} // namespace lmds
