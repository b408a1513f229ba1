/*
 * lmds - 3D facial landmark depth from a single 2D view, by learned
 *        pairwise dissimilarities and multidimensional scaling.
 *
 * File: tests/acceptance.cpp
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
// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. Usage: lmds_acceptance [work-dir]

#include "lmds/commands.hpp"
#include "lmds/config.hpp"
#include "lmds/dissim.hpp"
#include "lmds/error.hpp"
#include "lmds/io.hpp"
#include "lmds/mds.hpp"
#include "lmds/metrics.hpp"
#include "lmds/nn.hpp"
#include "lmds/viewnorm.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <string>

using namespace lmds;
namespace fs = std::filesystem;

namespace {

// Tolerances and budgets, one block per criterion.
constexpr double kMdsResidual = 1e-8;           // 1
constexpr double kMdsSeconds = 5.0;
constexpr double kNonMetricRmse = 1e-3;         // 2
constexpr double kStressSlack = 1e-12;
constexpr double kNonMetricSeconds = 30.0;
constexpr double kGradientRelError = 1e-5;      // 4
constexpr int kGradientProbes = 20;
constexpr int kSymmetryPairs = 10000;           // 5
constexpr std::size_t kDissimBudget = 3000;     // 6
constexpr std::size_t kTotalBudget = 30000;
constexpr double kBaselineRatio = 0.7;          // 7
constexpr double kPipelineSeconds = 600.0;
constexpr double kWilcoxonAgreement = 0.01;     // 9
constexpr double kSignFlipTolerance = 1e-9;     // 10
constexpr double kAlignedZero = 1e-24;          // rounding left by the similarity fit
constexpr double kPoseRatio = 2.0;              // 12

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome
{
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, format, a, b, c, d);
    return buf;
}

// Shared state for the default-configuration run (criteria 7 and 12).
struct DefaultRun
{
    bool done = false;
    std::string error;
    double seconds = 0.0;
    cli::EvaluationSummary enabled;
    cli::EvaluationSummary skipped;
};

fs::path g_work;
std::ofstream g_log;
DefaultRun g_default;

Outcome mds_round_trip()
{
    std::mt19937_64 rng(101);
    const auto t0 = Clock::now();
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
        const auto s = oracle::random_shape(rng, 72);
        const auto e = mds::classical_mds(oracle::distances(s), 3);
        worst = std::max(worst, procrustes_align(mds::to_landmarks(e.coords, ""), s).rmse);
    }
    const double t = seconds_since(t0);
    return {worst < kMdsResidual && t < kMdsSeconds,
            fmt("max Procrustes residual %.3e (< %.0e), %.2f s (< %.0f s)", worst, kMdsResidual, t, kMdsSeconds)};
}

Outcome nonmetric_recovery()
{
    std::mt19937_64 rng(102);
    const auto t0 = Clock::now();
    double worst = 0.0, worst_increase = -INFINITY;
    for (int k = 0; k < 20; ++k) {
        const auto s = oracle::random_shape(rng, 20);
        Matrix d = oracle::distances(s);
        for (double& v : d.data()) v = v * v * v;
        const auto e = mds::smacof_embed(d, 3, mds::Mode::NonMetric);
        worst = std::max(worst, procrustes_align(mds::to_landmarks(e.coords, ""), s).rmse);
        for (std::size_t i = 1; i < e.stress_history.size(); ++i) {
            worst_increase = std::max(worst_increase, e.stress_history[i] - e.stress_history[i - 1]);
        }
    }
    const double t = seconds_since(t0);
    const bool monotone = worst_increase <= kStressSlack;
    return {worst < kNonMetricRmse && monotone && t < kNonMetricSeconds,
            fmt("max Procrustes RMSE %.3e (< %.0e); max stress increase %.2e (<= %.0e); ", worst, kNonMetricRmse,
                worst_increase, kStressSlack)
                + fmt("%.2f s (< %.0f s)", t, kNonMetricSeconds)};
}

Outcome pava_equivalence()
{
    std::mt19937_64 rng(103);
    std::uniform_int_distribution<int> len(1, 50);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::size_t mismatches = 0;
    for (int k = 0; k < 1000; ++k) {
        std::vector<double> y(static_cast<std::size_t>(len(rng)));
        for (double& v : y) v = u(rng);
        std::vector<std::size_t> order(y.size());
        std::iota(order.begin(), order.end(), 0);
        const auto fit = mds::isotonic_regression(y, order);
        if (fit != oracle::naive_pava(y, std::vector<double>(y.size(), 1.0))) ++mismatches;
    }
    return {mismatches == 0, std::to_string(mismatches) + " of 1000 vectors differ from the O(n^2) oracle"};
}

Outcome gradient_fidelity()
{
    std::mt19937_64 rng(104);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto random = [&](std::size_t n) {
        std::vector<double> v(n);
        for (double& x : v) x = u(rng);
        return v;
    };
    double worst_d = 0.0, worst_v = 0.0;
    auto d = dissim::default_model();
    auto v = viewnorm::default_model(72);
    for (int k = 0; k < kGradientProbes; ++k) {
        d.initialize(nn::Init::HeUniform, 1000 + k);
        v.initialize(nn::Init::HeUniform, 2000 + k);
        const auto x = random(6);
        const auto t = random(1);
        worst_d = std::max(worst_d, nn::gradient_check(d, x, t));
        const auto xv = random(144);
        const auto tv = random(144);
        worst_v = std::max(worst_v, nn::gradient_check(v, xv, tv));
    }
    return {worst_d < kGradientRelError && worst_v < kGradientRelError,
            fmt("max relative error dissim %.2e, viewnorm %.2e (< %.0e) over %.0f probes", worst_d, worst_v,
                kGradientRelError, kGradientProbes)};
}

Outcome symmetry_suite()
{
    auto m = dissim::default_model();
    m.initialize(nn::Init::HeUniform, 105);
    std::mt19937_64 rng(105);
    std::normal_distribution<double> g;
    int asymmetric = 0;
    for (int k = 0; k < kSymmetryPairs; ++k) {
        const Point2 a{g(rng), g(rng)}, b{g(rng), g(rng)};
        if (dissim::predict_distance(m, a, b) != dissim::predict_distance(m, b, a)) ++asymmetric;
    }
    int bad_matrices = 0;
    for (int k = 0; k < 20; ++k) {
        LandmarkSet2D s;
        for (int i = 0; i < 72; ++i) s.points.push_back({g(rng), g(rng)});
        const Matrix d = dissim::build_dissimilarity_matrix(m, s);
        if (d != transpose(d)) ++bad_matrices;
    }
    return {asymmetric == 0 && bad_matrices == 0,
            std::to_string(asymmetric) + " of " + std::to_string(kSymmetryPairs) + " pairs asymmetric; "
                + std::to_string(bad_matrices) + " of 20 matrices differ from their transpose"};
}

Outcome parameter_budget()
{
    const PipelineConfig config;
    const std::size_t d = cli::default_dissim_parameters(config);
    const std::size_t v = cli::default_viewnorm_parameters(config);
    std::printf("  parameters: dissimilarity %zu, view normalizer %zu, total %zu\n", d, v, d + v);
    return {d < kDissimBudget && d + v < kTotalBudget,
            "dissimilarity " + std::to_string(d) + " (< " + std::to_string(kDissimBudget) + "), total "
                + std::to_string(d + v) + " (< " + std::to_string(kTotalBudget) + ")"};
}

void run_default()
{
    if (g_default.done) return;
    g_default.done = true;
    try {
        PipelineConfig config;
        config.out_dir = g_work / "default";
        fs::remove_all(config.out_dir);
        const auto t0 = Clock::now();
        cli::cmd_generate(config, g_log);
        cli::cmd_train(config, cli::Which::Both, g_log);
        g_default.enabled = cli::cmd_evaluate(config, std::nullopt, g_log);
        g_default.seconds = seconds_since(t0);
        config.skip_viewnorm = true;
        g_default.skipped = cli::cmd_evaluate(config, std::nullopt, g_log);
    } catch (const std::exception& e) {
        g_default.error = e.what();
    }
}

Outcome baseline_ordering()
{
    run_default();
    if (!g_default.error.empty()) return {false, "default run failed: " + g_default.error};
    const auto& s = g_default.enabled;
    const double ratio = s.mse_ratio;
    return {ratio <= kBaselineRatio && g_default.seconds < kPipelineSeconds,
            fmt("pipeline MSE %.4e, mean-shape baseline %.4e, ratio %.3f (<= %.1f); ", s.pipeline.report.mse.mean,
                s.baseline.report.mse.mean, ratio, kBaselineRatio)
                + fmt("generate+train+evaluate %.0f s (< %.0f s)", g_default.seconds, kPipelineSeconds)};
}

Outcome ablation_ordering()
{
    PipelineConfig config;
    config.out_dir = g_work / "default";  // reuses the generated default training split
    if (!fs::exists(synth::manifest_path(cli::layout(config).train_stem()))) {
        cli::cmd_generate(config, g_log);
    }
    const auto runs = cli::cmd_ablate(config, g_log);
    int held = 0;
    std::string detail;
    for (const auto& r : runs) {
        const double sf = r.same_face.back().val_loss, sh = r.shuffled.back().val_loss;
        held += sf <= sh ? 1 : 0;
        detail += fmt("same-face %.5f vs shuffled %.5f; ", sf, sh);
    }
    return {held == static_cast<int>(runs.size()) && !runs.empty(),
            detail + std::to_string(held) + " of " + std::to_string(runs.size()) + " seeds with same-face <= shuffled"};
}

Outcome wilcoxon_exactness()
{
    const auto r5 = metrics::wilcoxon_signed_rank(std::vector<double>{1, 2, 3, 4, 5}, std::vector<double>(5, 0.0));
    const auto r10 = metrics::wilcoxon_signed_rank(std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10},
                                                   std::vector<double>(10, 0.0));
    std::mt19937_64 rng(109);
    std::normal_distribution<double> g(0.3, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
        std::vector<double> a(20), b(20);
        for (double& x : a) x = g(rng);
        for (double& x : b) x = g(rng) - 0.3;
        const auto exact = metrics::wilcoxon_signed_rank(a, b);
        // Normal approximation for the same statistic, with continuity correction.
        const double mu = 20.0 * 21.0 / 4.0, sd = std::sqrt(20.0 * 21.0 * 41.0 / 24.0);
        const double z = std::max(0.0, std::abs(exact.statistic - mu) - 0.5) / sd;
        worst = std::max(worst, std::abs(std::min(1.0, std::erfc(z / std::sqrt(2.0))) - exact.p_value));
    }
    const bool pass = r5.p_value == 0.0625 && r5.exact && r10.p_value == 2.0 / 1024.0 && r10.exact
                      && worst <= kWilcoxonAgreement;
    return {pass, fmt("n=5 p=%.6g (0.0625), n=10 p=%.6g (2/1024), max |exact - normal| at m=20 %.4f (<= %.2f)",
                      r5.p_value, r10.p_value, worst, kWilcoxonAgreement)};
}

Outcome metric_sanity()
{
    std::mt19937_64 rng(110);
    const auto gt = oracle::random_shape(rng, 72);
    auto flipped = gt;
    for (auto& p : flipped.points) p[2] = -p[2];
    const double same = metrics::depth_corr(gt, gt);
    const double flip = metrics::depth_corr(flipped, gt);
    const double raw = metrics::landmark_mse(gt, gt, false);
    const double aligned = metrics::landmark_mse(gt, gt, true);
    return {std::abs(same - 100.0) < kSignFlipTolerance && std::abs(flip - 100.0 / 3.0) < kSignFlipTolerance
                && raw == 0.0 && aligned < kAlignedZero,
            fmt("depth_corr(gt,gt) %.10f, z-negated %.10f (33.33 +- %.0e); ", same, flip, kSignFlipTolerance)
                + fmt("landmark_mse(gt,gt) %.1e unaligned (== 0), %.1e after Procrustes (< %.0e)", raw, aligned,
                      kAlignedZero)};
}

std::map<std::string, std::vector<std::uint8_t>> tree_bytes(const fs::path& root)
{
    std::map<std::string, std::vector<std::uint8_t>> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = fs::relative(entry.path(), root).generic_string();
        if (name.find("timings") != std::string::npos) continue;  // wall-clock measurements
        files[name] = io::read_binary(entry.path());
    }
    return files;
}

Outcome determinism()
{
    std::map<std::string, std::vector<std::uint8_t>> trees[2];
    for (int k = 0; k < 2; ++k) {
        PipelineConfig config;
        config.out_dir = g_work / ("determinism_" + std::to_string(k));
        fs::remove_all(config.out_dir);
        config.train_count = 300;
        config.test_count = 60;
        config.viewnorm_epochs = 40;
        config.dissim_epochs = 2;
        config.eval_size = 50;
        config.ablate_faces = 50;
        config.ablate_epochs = 2;
        config.ablate_seeds = 2;
        cli::cmd_generate(config, g_log);
        cli::cmd_train(config, cli::Which::Both, g_log);
        cli::cmd_evaluate(config, std::nullopt, g_log);
        cli::cmd_plot(config, std::nullopt, g_log);
        cli::cmd_ablate(config, g_log);
        trees[k] = tree_bytes(config.out_dir);
    }
    std::size_t differing = 0;
    for (const auto& [name, bytes] : trees[0]) {
        const auto it = trees[1].find(name);
        if (it == trees[1].end() || it->second != bytes) ++differing;
    }
    differing += trees[1].size() > trees[0].size() ? trees[1].size() - trees[0].size() : 0;
    const bool has_all = trees[0].count("models/viewnorm.llmw") && trees[0].count("models/dissim.llmw")
                         && trees[0].count("report.json") && trees[0].count("ablation.svg");
    return {differing == 0 && has_all && !trees[0].empty(),
            std::to_string(trees[0].size()) + " files compared (datasets, models, logs, reports, plots), "
                + std::to_string(differing) + " differ"};
}

Outcome pose_robustness()
{
    run_default();
    if (!g_default.error.empty()) return {false, "default run failed: " + g_default.error};
    const auto& on = g_default.enabled;
    const auto& off = g_default.skipped;
    const double ratio = on.perspective_mse / on.frontal_mse;
    const bool degrades = off.perspective_mse > on.perspective_mse;
    return {ratio <= kPoseRatio && degrades && on.frontal_count > 0 && on.perspective_count > 0,
            fmt("perspective MSE %.4e / orthographic frontal MSE %.4e = %.3f (<= %.0f); ", on.perspective_mse,
                on.frontal_mse, ratio, kPoseRatio)
                + fmt("skip-viewnorm perspective MSE %.4e (> %.4e)", off.perspective_mse, on.perspective_mse)};
}

} // namespace

int main(int argc, char** argv)
{
    g_work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "lmds_acceptance";
    fs::create_directories(g_work);
    g_log.open(g_work / "acceptance.log");

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"MDS round-trip", mds_round_trip},
        {"non-metric recovery", nonmetric_recovery},
        {"PAVA equivalence", pava_equivalence},
        {"gradient fidelity", gradient_fidelity},
        {"symmetry", symmetry_suite},
        {"parameter budget", parameter_budget},
        {"trivial-baseline ordering", baseline_ordering},
        {"ablation ordering", ablation_ordering},
        {"Wilcoxon exactness", wilcoxon_exactness},
        {"metric sanity", metric_sanity},
        {"determinism", determinism},
        {"pose robustness", pose_robustness},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::printf("criterion %2zu %s  %s: %s [%.1f s]\n", k + 1, o.pass ? "PASS" : "FAIL", criteria[k].first.c_str(),
                    o.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
    }
    std::printf("%zu of %zu criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
