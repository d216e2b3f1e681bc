// SPDX-License-Identifier: Apache-2.0

#ifndef BLOCKMERGE_TOOLS_SWEEP_HPP
#define BLOCKMERGE_TOOLS_SWEEP_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "blockmerge/io.hpp"
#include "blockmerge/synthetic.hpp"

namespace blockmerge::tools {

// Default corpus for threshold sweeps: rooms with walls and some L/U shaped
// furniture, predicted with fragmentation noise only.
CorpusOptions fragmentation_corpus();
PredictorNoise fragmentation_noise();

struct SweepSpec {
    std::vector<std::int64_t> tau2s{10, 50, 110, 500, 5000};
    std::vector<int> grids{400, 500};
    std::vector<std::uint64_t> seeds{0, 1, 2};
    std::int64_t tau1 = 25;
    double block_side = 1.0;
    double stride = 0.5;
    CorpusOptions corpus = fragmentation_corpus();
    PredictorNoise noise = fragmentation_noise();
    // Also emit one v1 row per (grid, seed).
    bool baseline = false;
    int workers = 1;
};

// Scene and predictions of one sweep seed.
struct SweepScene {
    PointCloud cloud;
    std::vector<BlockPrediction> preds;
};

SweepScene make_sweep_scene(const SweepSpec& spec, std::uint64_t seed);

// Runs every (tau2, grid, seed) combination; rows are ordered by tau2
// (ascending), then grid and seed in the given order, with v1 rows last.
// Seeds are processed on up to `workers` threads; the output does not depend
// on the worker count.
std::vector<MetricsRow> run_sweep(const SweepSpec& spec);

// Same, for a fixed scene; every row gets `seed`.
std::vector<MetricsRow> run_sweep(const SweepSpec& spec, const SweepScene& scene, std::uint64_t seed);

struct SweepPoint {
    std::string algo;
    int grid = 0;
    std::int64_t tau2 = 0;
    double m_prec = 0.0;
    double m_rec = 0.0;
    double m_cov = 0.0;
    double m_wcov = 0.0;
    std::size_t runs = 0;
};

// Seed-averaged metrics per (algo, grid, tau2), in first-appearance order.
std::vector<SweepPoint> average_over_seeds(const std::vector<MetricsRow>& rows);

}  // namespace blockmerge::tools

#endif  // BLOCKMERGE_TOOLS_SWEEP_HPP
