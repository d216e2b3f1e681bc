// SPDX-License-Identifier: Apache-2.0

#include "sweep.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "blockmerge/merge_v1.hpp"
#include "blockmerge/merge_v2.hpp"
#include "blockmerge/metrics.hpp"

namespace blockmerge::tools {

CorpusOptions fragmentation_corpus() {
    CorpusOptions options;
    options.concave_shapes = true;
    options.walls = true;
    return options;
}

PredictorNoise fragmentation_noise() {
    PredictorNoise noise;
    noise.fragmentation = 0.3;
    return noise;
}

SweepScene make_sweep_scene(const SweepSpec& spec, std::uint64_t seed) {
    SweepScene scene;
    scene.cloud = generate_scene(random_room(seed, spec.corpus));
    // Block layout only depends on the scene box, not on the grid resolution.
    const auto bounds = compute_bounds(scene.cloud, kDefaultGridRes);
    const auto blocks = partition_blocks(bounds, spec.block_side, spec.stride);
    scene.preds = simulate_block_predictor(scene.cloud, blocks, scene.cloud.gt_labels, spec.noise, seed);
    return scene;
}

namespace {

// Rows of one scene, grouped [grid][tau2] plus one v1 row per grid.
struct SceneRows {
    std::vector<std::vector<MetricsRow>> v2;
    std::vector<MetricsRow> v1;
};

SceneRows evaluate_scene(const SweepSpec& spec, const SweepScene& scene, std::uint64_t seed,
                         const std::vector<std::int64_t>& tau2s) {
    SceneRows out;
    for (const int grid : spec.grids) {
        const auto table = build_cell_table(scene.cloud, compute_bounds(scene.cloud, grid));
        auto& per_tau = out.v2.emplace_back();
        for (const auto tau2 : tau2s) {
            const auto result = run_v2(table, scene.preds, {spec.tau1, tau2, grid});
            per_tau.push_back({"v2", grid, spec.tau1, tau2, seed, evaluate(result.labels, scene.cloud.gt_labels)});
        }
        if (spec.baseline) {
            const auto result = run_v1(table, scene.preds, {spec.tau1, grid});
            out.v1.push_back(
                {"v1", grid, spec.tau1, kInfiniteTau, seed, evaluate(result.labels, scene.cloud.gt_labels)});
        }
    }
    return out;
}

std::vector<std::int64_t> sorted_taus(const SweepSpec& spec) {
    auto taus = spec.tau2s;
    std::sort(taus.begin(), taus.end());
    return taus;
}

std::vector<MetricsRow> flatten(const SweepSpec& spec, const std::vector<SceneRows>& scenes, std::size_t num_taus) {
    std::vector<MetricsRow> rows;
    for (std::size_t t = 0; t < num_taus; ++t) {
        for (std::size_t g = 0; g < spec.grids.size(); ++g) {
            for (const auto& s : scenes) {
                rows.push_back(s.v2[g][t]);
            }
        }
    }
    for (std::size_t g = 0; g < spec.grids.size() && spec.baseline; ++g) {
        for (const auto& s : scenes) {
            rows.push_back(s.v1[g]);
        }
    }
    return rows;
}

}  // namespace

std::vector<MetricsRow> run_sweep(const SweepSpec& spec) {
    const auto taus = sorted_taus(spec);
    std::vector<SceneRows> scenes(spec.seeds.size());
    std::vector<std::exception_ptr> failures(spec.seeds.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next++; i < spec.seeds.size(); i = next++) {
            try {
                const auto scene = make_sweep_scene(spec, spec.seeds[i]);
                scenes[i] = evaluate_scene(spec, scene, spec.seeds[i], taus);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    const auto threads = static_cast<std::size_t>(std::max(1, spec.workers));
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 1; t < std::min(threads, spec.seeds.size()); ++t) {
            pool.emplace_back(worker);
        }
        worker();
    }
    for (const auto& f : failures) {
        if (f) {
            std::rethrow_exception(f);
        }
    }
    return flatten(spec, scenes, taus.size());
}

std::vector<MetricsRow> run_sweep(const SweepSpec& spec, const SweepScene& scene, std::uint64_t seed) {
    const auto taus = sorted_taus(spec);
    const std::vector<SceneRows> scenes{evaluate_scene(spec, scene, seed, taus)};
    return flatten(spec, scenes, taus.size());
}

std::vector<SweepPoint> average_over_seeds(const std::vector<MetricsRow>& rows) {
    std::vector<SweepPoint> points;
    for (const auto& row : rows) {
        auto it = std::find_if(points.begin(), points.end(), [&](const SweepPoint& p) {
            return p.algo == row.algo && p.grid == row.grid && p.tau2 == row.tau2;
        });
        if (it == points.end()) {
            it = points.insert(points.end(), SweepPoint{row.algo, row.grid, row.tau2});
        }
        it->m_prec += row.report.m_prec;
        it->m_rec += row.report.m_rec;
        it->m_cov += row.report.m_cov;
        it->m_wcov += row.report.m_wcov;
        ++it->runs;
    }
    for (auto& p : points) {
        const auto n = static_cast<double>(p.runs);
        p.m_prec /= n;
        p.m_rec /= n;
        p.m_cov /= n;
        p.m_wcov /= n;
    }
    return points;
}

}  // namespace blockmerge::tools
