/*
 * lmds - 3D facial landmark depth from a single 2D view, by learned
 *        pairwise dissimilarities and multidimensional scaling.
 *
 * File: tools/lmds_main.cpp
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

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace lmds;

struct Globals
{
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::vector<std::string> overrides;
    bool skip_viewnorm = false;
};

PipelineConfig resolve(const Globals& g)
{
    PipelineConfig config = g.config_path.empty() ? PipelineConfig{} : load_config(g.config_path);
    for (const auto& kv : g.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::Config, "--set expects key=value, got '" + kv + "'");
        }
        apply_setting(config, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (g.seed) config.seed = *g.seed;
    if (g.out_dir) config.out_dir = *g.out_dir;
    if (g.skip_viewnorm) config.skip_viewnorm = true;
    return config;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"lmds: 3D facial landmark recovery from 2D landmarks with learned dissimilarities and MDS"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config_path, "key = value config file")->check(CLI::ExistingFile);
    app.add_option("--seed", g.seed, "master seed (overrides the config)");
    app.add_option("--out-dir", g.out_dir, "output directory (overrides the config)");
    app.add_option("--set", g.overrides, "override one config key, key=value (repeatable)");

    auto* generate = app.add_subcommand("generate", "write the synthetic train and test splits");
    auto* train = app.add_subcommand("train", "train the view normalizer and/or the dissimilarity net");
    std::string which = "both";
    train->add_option("--which", which, "viewnorm, dissim or both")->capture_default_str();

    auto* reconstruct = app.add_subcommand("reconstruct", "recover 3D landmarks from 2D input");
    std::optional<std::uint64_t> face;
    std::optional<std::string> landmarks, output;
    std::string split = "test";
    reconstruct->add_option("--face", face, "reconstruct one face of the split");
    reconstruct->add_option("--landmarks", landmarks, "text file of 2D landmarks, 'x y' per line")
        ->check(CLI::ExistingFile);
    reconstruct->add_option("--split", split, "dataset split for batch or --face mode")
        ->check(CLI::IsMember({"train", "test"}))
        ->capture_default_str();
    reconstruct->add_option("--output", output, "result file");
    reconstruct->add_flag("--skip-viewnorm", g.skip_viewnorm, "feed the observed view to the dissimilarity net");

    auto* evaluate = app.add_subcommand("evaluate", "score reconstructions against the mean-shape baseline");
    std::optional<std::string> recon_in;
    evaluate->add_option("--reconstructions", recon_in, "evaluate this reconstruction file instead of the models")
        ->check(CLI::ExistingFile);
    evaluate->add_flag("--skip-viewnorm", g.skip_viewnorm, "bypass the view normalizer");

    auto* ablate = app.add_subcommand("ablate", "compare same-face and shuffled batches for the dissimilarity net");

    auto* plot = app.add_subcommand("plot", "SVG scatter plots of predicted vs ground-truth landmarks");
    plot->add_option("--reconstructions", recon_in, "reconstruction file (default: the evaluated test set)")
        ->check(CLI::ExistingFile);
    plot->add_flag("--skip-viewnorm", g.skip_viewnorm, "plot the no-viewnorm reconstructions");

    auto* run = app.add_subcommand("run", "generate, train, evaluate and plot in one go");
    run->add_flag("--skip-viewnorm", g.skip_viewnorm, "bypass the view normalizer at evaluation");

    auto* show = app.add_subcommand("config", "print the effective configuration");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        const PipelineConfig config = resolve(g);
        auto& out = std::cout;
        if (generate->parsed()) {
            cli::cmd_generate(config, out);
        } else if (train->parsed()) {
            cli::cmd_train(config, cli::which_from_string(which), out);
        } else if (reconstruct->parsed()) {
            cli::ReconstructRequest request;
            request.face_id = face;
            if (landmarks) request.landmarks = *landmarks;
            if (output) request.output = *output;
            request.train_split = split == "train";
            cli::cmd_reconstruct(config, request, out);
        } else if (evaluate->parsed()) {
            std::optional<std::filesystem::path> path;
            if (recon_in) path = *recon_in;
            cli::cmd_evaluate(config, path, out);
        } else if (ablate->parsed()) {
            cli::cmd_ablate(config, out);
        } else if (plot->parsed()) {
            std::optional<std::filesystem::path> path;
            if (recon_in) path = *recon_in;
            cli::cmd_plot(config, path, out);
        } else if (run->parsed()) {
            cli::cmd_generate(config, out);
            cli::cmd_train(config, cli::Which::Both, out);
            cli::cmd_evaluate(config, std::nullopt, out);
            cli::cmd_plot(config, std::nullopt, out);
        } else if (show->parsed()) {
            out << format_config(config);
        }
    } catch (const Error& e) {
        std::cerr << "error[" << error_token(e.code()) << "]: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error[E_INTERNAL]: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
