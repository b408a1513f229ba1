/*
 * lmds - 3D facial landmark depth from a single 2D view, by learned
 *        pairwise dissimilarities and multidimensional scaling.
 *
 * File: src/commands.cpp
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
#include "lmds/commands.hpp"

#include "lmds/error.hpp"
#include "lmds/io.hpp"
#include "lmds/plot.hpp"

#include <json.hpp>

#include <cstdio>
#include <map>

namespace lmds::cli {

namespace fs = std::filesystem;

namespace {

std::string fmt(const char* format, double value)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, format, value);
    return buf;
}

void ensure_parent(const fs::path& path)
{
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) {
            throw Error(ErrorCode::Io, "cannot create directory '" + path.parent_path().string() + "': " + ec.message());
        }
    }
}

std::string suffix(bool skip_viewnorm)
{
    return skip_viewnorm ? "-skip-viewnorm" : "";
}

PipelineOptions pipeline_options(const PipelineConfig& config)
{
    PipelineOptions o;
    o.skip_viewnorm = config.skip_viewnorm;
    o.mode = config.mds_mode;
    o.smacof = config.smacof;
    return o;
}

metrics::Protocol protocol(const PipelineConfig& config)
{
    return {config.eval_size, config.eval_reps, derive_seed(config.seed, seed_stream::kEvaluation)};
}

nn::MlpModel dissim_architecture(const PipelineConfig& config)
{
    return dissim::default_model(config.dissim_width, config.dissim_hidden);
}

nn::MlpModel viewnorm_architecture(const PipelineConfig& config)
{
    return viewnorm::default_model(config.model.landmarks, config.viewnorm_hidden);
}

dissim::TrainConfig dissim_train_config(const PipelineConfig& config)
{
    dissim::TrainConfig t;
    t.epochs = config.dissim_epochs;
    t.learning_rate = config.dissim_learning_rate;
    t.scheme = config.dissim_scheme;
    t.seed = derive_seed(config.seed, seed_stream::kDissimTrain);
    t.validation_fraction = config.dissim_validation_fraction;
    return t;
}

std::string last_losses(const std::vector<nn::EpochLog>& log)
{
    const auto& row = log.back();
    return "epoch " + std::to_string(row.epoch) + " train_loss=" + fmt("%.6g", row.train_loss)
           + " val_loss=" + fmt("%.6g", row.val_loss);
}

// The checksum stored in the weight file: CRC32 of everything before it.
std::string model_crc(const nn::MlpModel& model)
{
    const auto bytes = nn::serialize_model(model);
    return io::hex32(io::crc32(std::span(bytes).first(bytes.size() - 4)));
}

void check_model(const nn::MlpModel& model, const std::string& kind, const fs::path& path)
{
    if (model.kind() != kind) {
        throw Error(ErrorCode::BadFormat, "'" + path.string() + "' holds a " + model.kind() + " model, expected " + kind);
    }
}

nn::MlpModel load_kind(const fs::path& path, const std::string& kind)
{
    nn::MlpModel m = nn::load_model(path);
    check_model(m, kind, path);
    return m;
}

std::map<std::uint64_t, const synth::ShapeSample*> by_face(const synth::Dataset& ds)
{
    std::map<std::uint64_t, const synth::ShapeSample*> index;
    for (const auto& s : ds.samples) {
        index[s.face_id] = &s;
    }
    return index;
}

nlohmann::ordered_json summary_json(const metrics::CriterionSummary& c)
{
    return {{"mean", c.mean}, {"std", c.std}, {"reps", c.reps}};
}

} // namespace

fs::path Layout::reconstructions(bool skip_viewnorm) const
{
    return root / ("reconstructions" + suffix(skip_viewnorm) + ".txt");
}

fs::path Layout::timings(bool skip_viewnorm) const
{
    return root / ("timings" + suffix(skip_viewnorm) + ".csv");
}

fs::path Layout::report_json(bool skip_viewnorm) const
{
    return root / ("report" + suffix(skip_viewnorm) + ".json");
}

fs::path Layout::report_csv(bool skip_viewnorm) const
{
    return root / ("report" + suffix(skip_viewnorm) + ".csv");
}

Layout layout(const PipelineConfig& config)
{
    return Layout{config.out_dir};
}

GenerateResult cmd_generate(const PipelineConfig& config, std::ostream& out)
{
    const Layout paths = layout(config);
    GenerateResult result;
    result.train = synth::generate(train_recipe(config));
    result.test = synth::generate(test_recipe(config));
    for (const auto* ds : {&result.train, &result.test}) {
        const fs::path stem = ds == &result.train ? paths.train_stem() : paths.test_stem();
        ensure_parent(stem);
        synth::write_dataset(*ds, stem);
        out << ds->manifest.split << ": " << ds->samples.size() << " records, seed " << ds->manifest.seed
            << ", offset " << ds->manifest.offset << ", model " << ds->manifest.model_hash << " -> "
            << synth::records_path(stem).string() << '\n';
    }
    return result;
}

synth::Dataset load_split(const PipelineConfig& config, bool test)
{
    const Layout paths = layout(config);
    const fs::path stem = test ? paths.test_stem() : paths.train_stem();
    if (!fs::exists(synth::manifest_path(stem))) {
        throw Error(ErrorCode::MissingInput, "no " + std::string(test ? "test" : "train") + " dataset at '"
                                                 + synth::manifest_path(stem).string() + "'; run generate first");
    }
    synth::Dataset ds = synth::read_dataset(stem);
    synth::DatasetManifest expect = test ? test_recipe(config) : train_recipe(config);
    synth::DatasetManifest got = ds.manifest;
    got.model_hash.clear();
    if (expect.model.source == "imported") {
        expect.model.landmarks = got.model.landmarks;
        expect.model.modes = got.model.modes;
    }
    if (!(got == expect)) {
        throw Error(ErrorCode::Config, "dataset '" + stem.string()
                                           + "' was generated with different settings; run generate again");
    }
    return ds;
}

Which which_from_string(const std::string& name)
{
    if (name == "viewnorm") return Which::Viewnorm;
    if (name == "dissim") return Which::Dissim;
    if (name == "both" || name == "all") return Which::Both;
    throw Error(ErrorCode::InvalidArgument, "unknown model '" + name + "' (expected viewnorm, dissim or both)");
}

std::size_t default_viewnorm_parameters(const PipelineConfig& config)
{
    return viewnorm_architecture(config).parameter_count();
}

std::size_t default_dissim_parameters(const PipelineConfig& config)
{
    return dissim_architecture(config).parameter_count();
}

TrainSummary cmd_train(const PipelineConfig& config, Which which, std::ostream& out)
{
    const Layout paths = layout(config);
    const synth::Dataset train = load_split(config, false);
    TrainSummary summary;

    if (which != Which::Dissim) {
        nn::MlpModel model = viewnorm_architecture(config);
        model.initialize(nn::Init::HeUniform, derive_seed(config.seed, seed_stream::kViewnormInit));
        viewnorm::TrainConfig t;
        t.epochs = config.viewnorm_epochs;
        t.learning_rate = config.viewnorm_learning_rate;
        t.batch_size = config.viewnorm_batch_size;
        t.seed = derive_seed(config.seed, seed_stream::kViewnormTrain);
        t.validation_fraction = config.viewnorm_validation_fraction;
        auto result = viewnorm::train_viewnorm(view_pairs(train.samples), t, std::move(model));
        ensure_parent(paths.viewnorm_model());
        ensure_parent(paths.viewnorm_log());
        nn::save_model(result.model, paths.viewnorm_model());
        io::write_text(paths.viewnorm_log(), nn::log_csv(result.log));
        summary.viewnorm_parameters = result.model.parameter_count();
        summary.viewnorm_log = std::move(result.log);
        out << "viewnorm: " << summary.viewnorm_parameters << " parameters, " << last_losses(summary.viewnorm_log)
            << ", crc " << model_crc(result.model) << " -> "
            << paths.viewnorm_model().string() << '\n';
    }
    if (which != Which::Viewnorm) {
        nn::MlpModel model = dissim_architecture(config);
        model.initialize(nn::Init::HeUniform, derive_seed(config.seed, seed_stream::kDissimInit));
        auto result = dissim::train_dissimilarity(training_faces(train.samples), dissim_train_config(config),
                                                  std::move(model));
        ensure_parent(paths.dissim_model());
        ensure_parent(paths.dissim_log());
        nn::save_model(result.model, paths.dissim_model());
        io::write_text(paths.dissim_log(), nn::log_csv(result.log));
        summary.dissim_parameters = result.model.parameter_count();
        summary.dissim_log = std::move(result.log);
        out << "dissim: " << summary.dissim_parameters << " parameters, " << last_losses(summary.dissim_log)
            << ", crc " << model_crc(result.model) << " -> "
            << paths.dissim_model().string() << '\n';
    }
    const std::size_t vp = summary.viewnorm_parameters ? summary.viewnorm_parameters : default_viewnorm_parameters(config);
    const std::size_t dp = summary.dissim_parameters ? summary.dissim_parameters : default_dissim_parameters(config);
    out << "total parameters: " << vp + dp << " (viewnorm " << vp << " + dissim " << dp << ")\n";
    return summary;
}

LandmarkSet2D read_landmarks_2d(const fs::path& path)
{
    LandmarkSet2D set;
    std::size_t line_no = 0;
    for (const auto& raw : io::split(io::read_text(path), '\n')) {
        ++line_no;
        const std::string line(io::trim(raw));
        if (line.empty() || line.front() == '#') continue;
        std::vector<double> values;
        for (const auto& tok : io::split(line, ' ')) {
            if (tok.empty()) continue;
            try {
                std::size_t used = 0;
                values.push_back(std::stod(tok, &used));
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::logic_error&) {
                throw Error(ErrorCode::MalformedRecord, path.string() + ":" + std::to_string(line_no) + ": bad number '"
                                                            + tok + "'");
            }
        }
        if (values.size() != 2) {
            throw Error(ErrorCode::MalformedRecord, path.string() + ":" + std::to_string(line_no) + ": expected 'x y'");
        }
        set.points.push_back({values[0], values[1]});
    }
    if (set.size() == 0) {
        throw Error(ErrorCode::EmptyDataset, "no landmarks in '" + path.string() + "'");
    }
    set.topology_id = synth::topology_id(set.size());
    return set;
}

std::vector<ReconstructionResult> cmd_reconstruct(const PipelineConfig& config, const ReconstructRequest& request,
                                                  std::ostream& out)
{
    if (request.face_id && request.landmarks) {
        throw Error(ErrorCode::InvalidArgument, "--face and --landmarks are mutually exclusive");
    }
    const Layout paths = layout(config);
    const nn::MlpModel vn = load_kind(paths.viewnorm_model(), "viewnorm");
    const nn::MlpModel dm = load_kind(paths.dissim_model(), "dissim");
    const PipelineOptions options = pipeline_options(config);

    std::vector<ReconstructionResult> results;
    fs::path target;
    if (request.landmarks) {
        results.push_back(reconstruct(vn, dm, read_landmarks_2d(*request.landmarks), 0, options));
        target = paths.root / "reconstruction-input.txt";
    } else {
        const synth::Dataset ds = load_split(config, !request.train_split);
        if (request.face_id) {
            const auto index = by_face(ds);
            const auto it = index.find(*request.face_id);
            if (it == index.end()) {
                throw Error(ErrorCode::MissingInput, "face " + std::to_string(*request.face_id) + " is not in the "
                                                         + ds.manifest.split + " split");
            }
            results.push_back(reconstruct(vn, dm, it->second->input_2d, it->first, options));
            target = paths.root / ("reconstruction-face-" + std::to_string(*request.face_id) + ".txt");
        } else {
            results = reconstruct_all(vn, dm, ds.samples, options);
            target = request.train_split ? paths.root / ("reconstructions-train" + suffix(config.skip_viewnorm) + ".txt")
                                         : paths.reconstructions(config.skip_viewnorm);
        }
    }
    if (request.output) {
        target = *request.output;
    }
    ensure_parent(target);
    io::write_text(target, format_reconstructions(results));
    fs::path timing_path = target;
    timing_path.replace_extension(".timings.csv");
    io::write_text(timing_path, format_timings(results));

    if (results.size() == 1) {
        const auto& r = results.front();
        out << "face " << r.face_id << ": " << r.predicted.size() << " points, stress " << fmt("%.6g", r.stress)
            << ", " << r.iterations << " iterations, dissim " << io::hex32(r.dissim_hash) << ", time us viewnorm "
            << fmt("%.1f", r.timings.viewnorm_us) << " dissim " << fmt("%.1f", r.timings.dissim_us) << " mds "
            << fmt("%.1f", r.timings.mds_us) << '\n';
    } else {
        double vn_us = 0.0, d_us = 0.0, m_us = 0.0;
        for (const auto& r : results) {
            vn_us += r.timings.viewnorm_us;
            d_us += r.timings.dissim_us;
            m_us += r.timings.mds_us;
        }
        const double n = static_cast<double>(std::max<std::size_t>(results.size(), 1));
        out << results.size() << " reconstructions, mean time us viewnorm " << fmt("%.1f", vn_us / n) << " dissim "
            << fmt("%.1f", d_us / n) << " mds " << fmt("%.1f", m_us / n) << '\n';
    }
    out << "wrote " << target.string() << " and " << timing_path.string() << '\n';
    return results;
}

EvaluationSummary cmd_evaluate(const PipelineConfig& config, const std::optional<fs::path>& reconstructions,
                               std::ostream& out)
{
    const Layout paths = layout(config);
    const synth::Dataset train = load_split(config, false);
    const synth::Dataset test = load_split(config, true);
    if (test.samples.empty()) {
        throw Error(ErrorCode::EmptyDataset, "the test split is empty");
    }

    std::vector<ReconstructionResult> results;
    if (reconstructions) {
        results = parse_reconstructions(io::read_text(*reconstructions));
    } else {
        const nn::MlpModel vn = load_kind(paths.viewnorm_model(), "viewnorm");
        const nn::MlpModel dm = load_kind(paths.dissim_model(), "dissim");
        results = reconstruct_all(vn, dm, test.samples, pipeline_options(config));
        ensure_parent(paths.reconstructions(config.skip_viewnorm));
        io::write_text(paths.reconstructions(config.skip_viewnorm), format_reconstructions(results));
        io::write_text(paths.timings(config.skip_viewnorm), format_timings(results));
    }
    std::map<std::uint64_t, const ReconstructionResult*> predicted;
    for (const auto& r : results) {
        predicted[r.face_id] = &r;
    }

    const LandmarkSet3D baseline_shape = mean_shape(train.samples);
    std::vector<LandmarkSet3D> preds, truths, constant;
    for (const auto& s : test.samples) {
        const auto it = predicted.find(s.face_id);
        if (it == predicted.end()) {
            throw Error(ErrorCode::MissingInput, "no reconstruction for test face " + std::to_string(s.face_id));
        }
        preds.push_back(it->second->predicted);
        truths.push_back(s.gt_3d);
        constant.push_back(baseline_shape);
    }

    EvaluationSummary summary;
    summary.pipeline.name = config.skip_viewnorm ? "pipeline (no viewnorm)" : "pipeline";
    summary.pipeline.report = metrics::evaluate(preds, truths, protocol(config), config.eval_align);
    summary.baseline.name = "mean-shape baseline";
    summary.baseline.report = metrics::evaluate(constant, truths, protocol(config), config.eval_align);
    summary.mse_ratio = summary.pipeline.report.mse.mean / summary.baseline.report.mse.mean;
    for (std::size_t i = 0; i < test.samples.size(); ++i) {
        const double mse = summary.pipeline.report.mse.per_sample[i];
        if (test.samples[i].view.projection == Projection::Perspective) {
            summary.perspective_mse += mse;
            ++summary.perspective_count;
        } else {
            summary.orthographic_mse += mse;
            ++summary.orthographic_count;
            if (test.samples[i].view.yaw_deg == 0.0) {
                summary.frontal_mse += mse;
                ++summary.frontal_count;
            }
        }
    }
    if (summary.frontal_count) summary.frontal_mse /= static_cast<double>(summary.frontal_count);
    if (summary.perspective_count) summary.perspective_mse /= static_cast<double>(summary.perspective_count);
    if (summary.orthographic_count) summary.orthographic_mse /= static_cast<double>(summary.orthographic_count);
    std::string wilcoxon_note;
    try {
        summary.wilcoxon = metrics::wilcoxon_signed_rank(summary.pipeline.report.mse.reps, summary.baseline.report.mse.reps);
    } catch (const Error& e) {
        wilcoxon_note = e.what();
    }

    nlohmann::ordered_json report;
    const auto& p = summary.pipeline.report.protocol;
    report["protocol"] = {{"size", p.size}, {"reps", p.reps}, {"seed", p.seed}};
    report["align"] = config.eval_align;
    report["skip_viewnorm"] = config.skip_viewnorm;
    report["mds_mode"] = mds::to_string(config.mds_mode);
    nlohmann::ordered_json methods = nlohmann::ordered_json::array();
    std::vector<std::uint64_t> ids;
    for (const auto& s : test.samples) ids.push_back(s.face_id);
    for (const auto* m : {&summary.pipeline, &summary.baseline}) {
        methods.push_back({{"name", m->name},
                           {"mse", summary_json(m->report.mse)},
                           {"depthcorr", summary_json(m->report.depth_corr)},
                           {"per_sample", {{"face_id", ids},
                                           {"mse", m->report.mse.per_sample},
                                           {"depthcorr", m->report.depth_corr.per_sample}}}});
    }
    report["methods"] = methods;
    report["mse_ratio"] = summary.mse_ratio;
    report["by_projection"] = {
        {"orthographic", {{"count", summary.orthographic_count}, {"mse", summary.orthographic_mse}}},
        {"perspective", {{"count", summary.perspective_count}, {"mse", summary.perspective_mse}}},
        {"orthographic_frontal", {{"count", summary.frontal_count}, {"mse", summary.frontal_mse}}}};
    if (summary.wilcoxon) {
        report["wilcoxon"] = {{"statistic", summary.wilcoxon->statistic},
                              {"p_value", summary.wilcoxon->p_value},
                              {"m", summary.wilcoxon->m},
                              {"exact", summary.wilcoxon->exact}};
    } else {
        report["wilcoxon"] = {{"unavailable", wilcoxon_note}};
    }
    ensure_parent(paths.report_json(config.skip_viewnorm));
    io::write_text(paths.report_json(config.skip_viewnorm), report.dump(2) + "\n");

    std::string csv = "method,mse_mean,mse_std,depthcorr_mean,depthcorr_std\n";
    for (const auto* m : {&summary.pipeline, &summary.baseline}) {
        csv += m->name + ',' + io::format_double(m->report.mse.mean) + ',' + io::format_double(m->report.mse.std) + ','
               + io::format_double(m->report.depth_corr.mean) + ',' + io::format_double(m->report.depth_corr.std) + '\n';
    }
    io::write_text(paths.report_csv(config.skip_viewnorm), csv);

    char line[160];
    std::snprintf(line, sizeof line, "%-24s %22s %26s\n", "method", "avgDepthCorr (%)", "avgMSE");
    out << line;
    for (const auto* m : {&summary.pipeline, &summary.baseline}) {
        std::snprintf(line, sizeof line, "%-24s %12.2f +- %-7.2f %12.4e +- %-10.2e\n", m->name.c_str(),
                      m->report.depth_corr.mean, m->report.depth_corr.std, m->report.mse.mean, m->report.mse.std);
        out << line;
    }
    out << "MSE ratio pipeline / baseline: " << fmt("%.4f", summary.mse_ratio) << '\n';
    out << "MSE by projection: orthographic " << fmt("%.4e", summary.orthographic_mse) << " (n="
        << summary.orthographic_count << "), perspective " << fmt("%.4e", summary.perspective_mse) << " (n="
        << summary.perspective_count << "), orthographic frontal " << fmt("%.4e", summary.frontal_mse)
        << " (n=" << summary.frontal_count << ")\n";
    if (summary.wilcoxon) {
        out << "Wilcoxon signed-rank on repetition MSEs: W+=" << fmt("%g", summary.wilcoxon->statistic)
            << " p=" << fmt("%.4g", summary.wilcoxon->p_value) << (summary.wilcoxon->exact ? " (exact" : " (normal")
            << ", m=" << summary.wilcoxon->m << ")\n";
    } else {
        out << "Wilcoxon signed-rank: not available (" << wilcoxon_note << ")\n";
    }
    out << "wrote " << paths.report_json(config.skip_viewnorm).string() << '\n';
    return summary;
}

std::vector<AblationRun> cmd_ablate(const PipelineConfig& config, std::ostream& out)
{
    const Layout paths = layout(config);
    const synth::Dataset train = load_split(config, false);
    if (config.ablate_faces > train.samples.size()) {
        throw Error(ErrorCode::Config, "ablate.faces = " + std::to_string(config.ablate_faces) + " exceeds the "
                                           + std::to_string(train.samples.size()) + " training faces");
    }
    if (config.ablate_seeds == 0) {
        throw Error(ErrorCode::Config, "ablate.seeds must be positive");
    }
    const auto faces = training_faces(std::span(train.samples).first(config.ablate_faces));

    std::vector<AblationRun> runs;
    std::string csv = "seed,epoch,same_face_train,same_face_val,shuffled_train,shuffled_val\n";
    std::string table = "seed,same_face_final_val,shuffled_final_val,same_face_le_shuffled\n";
    std::vector<plot::Series> curves;
    for (std::size_t k = 0; k < config.ablate_seeds; ++k) {
        AblationRun run;
        run.seed = derive_seed(config.seed, seed_stream::kAblation + k);
        nn::MlpModel init = dissim_architecture(config);
        init.initialize(nn::Init::HeUniform, run.seed);
        dissim::TrainConfig t = dissim_train_config(config);
        t.epochs = config.ablate_epochs;
        t.seed = run.seed;
        t.scheme = dissim::BatchScheme::SameFace;
        run.same_face = dissim::train_dissimilarity(faces, t, init).log;
        t.scheme = dissim::BatchScheme::Shuffled;
        run.shuffled = dissim::train_dissimilarity(faces, t, init).log;

        plot::Series a{"same-face seed " + std::to_string(k + 1), {}}, b{"shuffled seed " + std::to_string(k + 1), {}};
        for (std::size_t e = 0; e < run.same_face.size(); ++e) {
            csv += std::to_string(k + 1) + ',' + std::to_string(run.same_face[e].epoch) + ','
                   + io::format_double(run.same_face[e].train_loss) + ',' + io::format_double(run.same_face[e].val_loss)
                   + ',' + io::format_double(run.shuffled[e].train_loss) + ','
                   + io::format_double(run.shuffled[e].val_loss) + '\n';
            a.values.push_back(run.same_face[e].val_loss);
            b.values.push_back(run.shuffled[e].val_loss);
        }
        const double sf = run.same_face.back().val_loss, sh = run.shuffled.back().val_loss;
        table += std::to_string(k + 1) + ',' + io::format_double(sf) + ',' + io::format_double(sh) + ','
                 + (sf <= sh ? "true" : "false") + '\n';
        out << "seed " << k + 1 << ": final val loss same-face " << fmt("%.6g", sf) << ", shuffled " << fmt("%.6g", sh)
            << (sf <= sh ? "  (same-face <= shuffled)" : "  (same-face > shuffled)") << '\n';
        curves.push_back(std::move(a));
        curves.push_back(std::move(b));
        runs.push_back(std::move(run));
    }
    ensure_parent(paths.ablation_csv());
    io::write_text(paths.ablation_csv(), csv);
    io::write_text(paths.ablation_summary(), table);
    io::write_text(paths.ablation_svg(),
                   plot::curves_svg(curves, "Dissimilarity training: batch composition", "validation loss"));
    out << "wrote " << paths.ablation_csv().string() << ", " << paths.ablation_summary().string() << ", "
        << paths.ablation_svg().string() << '\n';
    return runs;
}

std::vector<fs::path> cmd_plot(const PipelineConfig& config, const std::optional<fs::path>& reconstructions,
                               std::ostream& out)
{
    const Layout paths = layout(config);
    const fs::path source = reconstructions ? *reconstructions : paths.reconstructions(config.skip_viewnorm);
    const auto results = parse_reconstructions(io::read_text(source));
    if (results.empty()) {
        throw Error(ErrorCode::EmptyDataset, "no reconstructions in '" + source.string() + "'");
    }
    const synth::Dataset test = load_split(config, true);
    const auto index = by_face(test);
    std::vector<fs::path> written;
    fs::create_directories(paths.plots());
    const std::size_t count = std::min(config.plot_faces, results.size());
    for (std::size_t k = 0; k < count; ++k) {
        const auto& r = results[k];
        const auto it = index.find(r.face_id);
        if (it == index.end()) {
            throw Error(ErrorCode::MissingInput, "face " + std::to_string(r.face_id) + " is not in the test split");
        }
        const LandmarkSet3D& gt = it->second->gt_3d;
        const LandmarkSet3D aligned = procrustes_align(r.predicted, gt).aligned;
        for (plot::Plane plane : {plot::Plane::XY, plot::Plane::XZ, plot::Plane::YZ}) {
            const fs::path file = paths.plots() / ("face_" + std::to_string(r.face_id) + "_" + plot::to_string(plane) + ".svg");
            io::write_text(file, plot::scatter_svg(aligned, gt, plane,
                                                   "face " + std::to_string(r.face_id) + " " + plot::to_string(plane)));
            written.push_back(file);
        }
    }
    out << "wrote " << written.size() << " plots to " << paths.plots().string() << '\n';
    return written;
}

} // namespace lmds::cli
