/*
 * lmds - 3D facial landmark depth from a single 2D view, by learned
 *        pairwise dissimilarities and multidimensional scaling.
 *
 * File: src/pipeline.cpp
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
#include "lmds/pipeline.hpp"

#include "lmds/error.hpp"
#include "lmds/io.hpp"

#include <chrono>

namespace lmds {

namespace {

using Clock = std::chrono::steady_clock;

double micros_since(Clock::time_point start)
{
    return std::chrono::duration<double, std::micro>(Clock::now() - start).count();
}

} // namespace

ReconstructionResult reconstruct(const nn::MlpModel& viewnorm_model, const nn::MlpModel& dissim_model,
                                 const LandmarkSet2D& input, std::uint64_t face_id, const PipelineOptions& options)
{
    ReconstructionResult result;
    result.face_id = face_id;

    auto start = Clock::now();
    LandmarkSet2D view = normalize(input);
    if (!options.skip_viewnorm) {
        view = viewnorm::normalize_view(viewnorm_model, view);
        if (rms_radius(view) > 0.0) {
            view = normalize(view);
        }
    }
    result.timings.viewnorm_us = options.skip_viewnorm ? 0.0 : micros_since(start);

    start = Clock::now();
    const Matrix d = dissim::build_dissimilarity_matrix(dissim_model, view);
    result.timings.dissim_us = micros_since(start);
    result.dissim_hash = io::crc32_doubles(d.data());

    start = Clock::now();
    mds::Embedding embedding;
    try {
        embedding = mds::smacof_embed(d, 3, options.mode, options.smacof);
    } catch (const Error& e) {
        throw Error(e.code(), "face " + std::to_string(face_id) + ": " + e.what());
    }
    result.timings.mds_us = micros_since(start);
    result.predicted = mds::to_landmarks(embedding.coords, input.topology_id);
    result.stress = embedding.stress;
    result.iterations = embedding.iterations;
    return result;
}

std::vector<ReconstructionResult> reconstruct_all(const nn::MlpModel& viewnorm_model, const nn::MlpModel& dissim_model,
                                                  std::span<const synth::ShapeSample> samples,
                                                  const PipelineOptions& options)
{
    std::vector<ReconstructionResult> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        out.push_back(reconstruct(viewnorm_model, dissim_model, s.input_2d, s.face_id, options));
    }
    return out;
}

std::vector<dissim::TrainingFace> training_faces(std::span<const synth::ShapeSample> samples)
{
    std::vector<dissim::TrainingFace> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        out.push_back({s.profile_2d, s.gt_3d});
    }
    return out;
}

std::vector<viewnorm::ViewPair> view_pairs(std::span<const synth::ShapeSample> samples)
{
    std::vector<viewnorm::ViewPair> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        out.push_back({s.input_2d, s.profile_2d});
    }
    return out;
}

LandmarkSet3D mean_shape(std::span<const synth::ShapeSample> samples)
{
    if (samples.empty()) {
        throw Error(ErrorCode::EmptyDataset, "mean shape of an empty dataset");
    }
    LandmarkSet3D mean = samples.front().gt_3d;
    for (auto& p : mean.points) {
        p = {0.0, 0.0, 0.0};
    }
    for (const auto& s : samples) {
        if (s.gt_3d.size() != mean.size()) {
            throw Error(ErrorCode::DimensionMismatch, "mean shape over mixed landmark counts");
        }
        for (std::size_t i = 0; i < mean.size(); ++i) {
            for (int k = 0; k < 3; ++k) {
                mean.points[i][k] += s.gt_3d.points[i][k];
            }
        }
    }
    const double inv = 1.0 / static_cast<double>(samples.size());
    for (auto& p : mean.points) {
        for (double& v : p) {
            v *= inv;
        }
    }
    return mean;
}

std::string format_reconstructions(std::span<const ReconstructionResult> results)
{
    const std::size_t n = results.empty() ? 0 : results.front().predicted.size();
    const std::string topo = results.empty() ? "-" : results.front().predicted.topology_id;
    std::string out = "lmds-reconstructions v1 count=" + std::to_string(results.size()) + " landmarks=" + std::to_string(n)
                      + " topology=" + (topo.empty() ? "-" : topo) + "\n";
    for (const auto& r : results) {
        if (r.predicted.size() != n) {
            throw Error(ErrorCode::DimensionMismatch, "reconstructions with mixed landmark counts");
        }
        out += std::to_string(r.face_id) + ' ' + io::hex32(r.dissim_hash) + ' ' + io::hex_double(r.stress) + ' '
               + std::to_string(r.iterations);
        for (const auto& p : r.predicted.points) {
            for (double v : p) {
                out += ' ';
                out += io::hex_double(v);
            }
        }
        out += '\n';
    }
    return out;
}

std::vector<ReconstructionResult> parse_reconstructions(const std::string& text)
{
    const auto lines = io::split(text, '\n');
    if (lines.empty()) {
        throw Error(ErrorCode::BadFormat, "empty reconstruction file");
    }
    const auto head = io::split(lines.front(), ' ');
    if (head.size() != 5 || head[0] != "lmds-reconstructions" || head[1] != "v1") {
        throw Error(ErrorCode::BadFormat, "not a reconstruction file (bad header)");
    }
    auto field = [&](const std::string& tok, const std::string& key) {
        if (tok.rfind(key + "=", 0) != 0) {
            throw Error(ErrorCode::BadFormat, "reconstruction header lacks " + key);
        }
        return tok.substr(key.size() + 1);
    };
    std::size_t count = 0, n = 0;
    try {
        count = std::stoull(field(head[2], "count"));
        n = std::stoull(field(head[3], "landmarks"));
    } catch (const std::logic_error&) {
        throw Error(ErrorCode::BadFormat, "bad reconstruction header numbers");
    }
    std::string topo = field(head[4], "topology");
    if (topo == "-") topo.clear();

    std::vector<ReconstructionResult> out;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        const auto tok = io::split(lines[li], ' ');
        const std::string where = "reconstruction line " + std::to_string(li + 1);
        if (tok.size() != 4 + 3 * n) {
            throw Error(ErrorCode::MalformedRecord, where + ": expected " + std::to_string(4 + 3 * n) + " fields");
        }
        ReconstructionResult r;
        try {
            r.face_id = std::stoull(tok[0]);
            r.dissim_hash = static_cast<std::uint32_t>(std::stoul(tok[1], nullptr, 16));
            r.iterations = std::stoi(tok[3]);
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::MalformedRecord, where + ": bad integer field");
        }
        r.stress = io::parse_hex_double(tok[2]);
        r.predicted.topology_id = topo;
        for (std::size_t i = 0; i < n; ++i) {
            r.predicted.points.push_back({io::parse_hex_double(tok[4 + 3 * i]), io::parse_hex_double(tok[5 + 3 * i]),
                                          io::parse_hex_double(tok[6 + 3 * i])});
        }
        out.push_back(std::move(r));
    }
    if (out.size() != count) {
        throw Error(ErrorCode::MalformedRecord, "reconstruction file holds " + std::to_string(out.size())
                                                    + " records, header says " + std::to_string(count));
    }
    return out;
}

std::string format_timings(std::span<const ReconstructionResult> results)
{
    std::string out = "face_id,viewnorm_us,dissim_us,mds_us\n";
    for (const auto& r : results) {
        out += std::to_string(r.face_id) + ',' + io::format_double(r.timings.viewnorm_us) + ','
               + io::format_double(r.timings.dissim_us) + ',' + io::format_double(r.timings.mds_us) + '\n';
    }
    return out;
}

} // namespace lmds
