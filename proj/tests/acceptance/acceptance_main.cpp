// SPDX-License-Identifier: Apache-2.0

// Runs each acceptance criterion once and prints one PASS/FAIL line per
// criterion. Exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "blockmerge/merge_v1.hpp"
#include "blockmerge/merge_v2.hpp"
#include "blockmerge/metrics.hpp"
#include "blockmerge/synthetic.hpp"
#include "invariants.hpp"
#include "sweep.hpp"

namespace bm = blockmerge;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::size_t distinct_labels_on(const std::vector<bm::InstanceLabel>& labels, bm::InstanceLabel gt,
                               const std::vector<bm::InstanceLabel>& gt_labels) {
    std::set<bm::InstanceLabel> seen;
    for (std::size_t n = 0; n < labels.size(); ++n) {
        if (gt_labels[n] == gt) {
            seen.insert(labels[n]);
        }
    }
    return seen.size();
}

Outcome fig1_regression() {
    const auto start = Clock::now();
    const auto s = bm::fig1_scenario();
    const auto bounds = bm::compute_bounds(s.cloud, 400);
    const auto blocks = bm::partition_blocks(bounds, s.block_side, s.stride);
    const auto preds = bm::simulate_block_predictor(s.cloud, blocks, s.cloud.gt_labels, {}, 0);
    const auto table = bm::build_cell_table(s.cloud, bounds);
    const auto v1 = bm::run_v1(table, preds, {25, 400});
    const auto v2 = bm::run_v2(table, preds, {25, 110, 400});
    const auto r1 = bm::evaluate(v1.labels, s.cloud.gt_labels);
    const auto r2 = bm::evaluate(v2.labels, s.cloud.gt_labels);
    const double elapsed = seconds_since(start);
    const auto n1 = distinct_labels_on(v1.labels, s.sofa, s.cloud.gt_labels);
    const auto n2 = distinct_labels_on(v2.labels, s.sofa, s.cloud.gt_labels);
    const bool pass = n1 >= 2 && n2 == 1 && r2.m_prec > r1.m_prec && r2.m_rec > r1.m_rec && elapsed < 1.0;
    return {pass, fmt("sofa labels v1 %zu v2 %zu; m_prec %.1f -> %.1f; m_rec %.1f -> %.1f; %.3f s", n1, n2,
                      r1.m_prec, r2.m_prec, r1.m_rec, r2.m_rec, elapsed)};
}

struct BoxRoom {
    bm::PointCloud cloud;
    bm::SceneBounds bounds;
    std::vector<bm::BlockPrediction> preds;
};

BoxRoom box_room(std::uint64_t seed) {
    BoxRoom room;
    room.cloud = bm::generate_scene(bm::random_room(seed));
    room.bounds = bm::compute_bounds(room.cloud, 400);
    const auto blocks = bm::partition_blocks(room.bounds, 1.0, 0.5);
    room.preds = bm::simulate_block_predictor(room.cloud, blocks, room.cloud.gt_labels, {}, seed);
    return room;
}

Outcome oracle_equivalence() {
    const auto start = Clock::now();
    double worst_v2 = 1.0;
    double worst_gt = 1.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto room = box_room(seed);
        const auto oracle = bm::oracle_merge(room.cloud, room.preds, room.bounds);
        const auto v2 = bm::run_v2(room.cloud, room.preds, {25, 0, 400});
        worst_v2 = std::min(worst_v2, bm::partition_equal(v2.labels, oracle).rand_index);
        worst_gt = std::min(worst_gt, bm::partition_equal(oracle, room.cloud.gt_labels).rand_index);
    }
    const double elapsed = seconds_since(start);
    const bool pass = worst_v2 == 1.0 && worst_gt == 1.0 && elapsed < 30.0;
    return {pass, fmt("20 rooms; min Rand v2/oracle %.6f, oracle/gt %.6f; %.2f s", worst_v2, worst_gt, elapsed)};
}

// The sweep corpus, generated once and shared by criteria 3 to 5.
struct Corpus {
    bm::tools::SweepSpec spec;
    std::vector<bm::tools::SweepScene> scenes;
};

Corpus make_corpus() {
    Corpus c;
    c.spec.baseline = true;
    c.spec.seeds.clear();
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        c.spec.seeds.push_back(seed);
        c.scenes.push_back(bm::tools::make_sweep_scene(c.spec, seed));
    }
    return c;
}

Outcome tau2_limit(const Corpus& corpus) {
    const auto start = Clock::now();
    std::size_t runs = 0;
    std::size_t mismatches = 0;
    auto check = [&](const bm::PointCloud& cloud, const std::vector<bm::BlockPrediction>& preds, int grid) {
        const auto table = bm::build_cell_table(cloud, bm::compute_bounds(cloud, grid));
        const auto v1 = bm::run_v1(table, preds, {25, grid});
        const auto v2 = bm::run_v2(table, preds, {25, bm::kInfiniteTau, grid});
        ++runs;
        mismatches += bm::partition_equal(v1.labels, v2.labels).equal ? 0 : 1;
    };
    for (const int grid : {400, 500}) {
        for (const auto& scene : corpus.scenes) {
            check(scene.cloud, scene.preds, grid);
        }
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto room = box_room(seed);
            check(room.cloud, room.preds, grid);
        }
    }
    return {mismatches == 0,
            fmt("%zu scene/grid runs, %zu mismatches; %.2f s", runs, mismatches, seconds_since(start))};
}

struct Averages {
    std::vector<bm::tools::SweepPoint> points;

    const bm::tools::SweepPoint& at(const std::string& algo, int grid, std::int64_t tau2) const {
        return *std::find_if(points.begin(), points.end(), [&](const auto& p) {
            return p.algo == algo && p.grid == grid && (algo == "v1" || p.tau2 == tau2);
        });
    }
};

Averages sweep_averages(const Corpus& corpus) {
    std::vector<bm::MetricsRow> rows;
    for (std::size_t i = 0; i < corpus.scenes.size(); ++i) {
        const auto part = bm::tools::run_sweep(corpus.spec, corpus.scenes[i], corpus.spec.seeds[i]);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    return {bm::tools::average_over_seeds(rows)};
}

Outcome sweep_shape(const Corpus& corpus, const Averages& avg) {
    auto taus = corpus.spec.tau2s;
    std::sort(taus.begin(), taus.end());
    bool pass = true;
    std::string detail;
    for (const int grid : corpus.spec.grids) {
        std::int64_t best_prec = taus.front();
        std::int64_t best_rec = taus.front();
        std::int64_t best = taus.front();
        for (const auto t : taus) {
            const auto& p = avg.at("v2", grid, t);
            // Ties keep the smaller threshold.
            if (p.m_prec > avg.at("v2", grid, best_prec).m_prec) best_prec = t;
            if (p.m_rec > avg.at("v2", grid, best_rec).m_rec) best_rec = t;
            const auto& b = avg.at("v2", grid, best);
            if (p.m_prec + p.m_rec > b.m_prec + b.m_rec) best = t;
        }
        const auto& top = avg.at("v2", grid, best);
        const auto& base = avg.at("v1", grid, 0);
        const double d_prec = top.m_prec - base.m_prec;
        const double d_rec = top.m_rec - base.m_rec;
        pass = pass && best_prec <= 110 && best_rec <= 110 && d_prec >= 1.0 && d_rec >= 1.0;
        detail += fmt("%sG=%d argmax m_prec %lld m_rec %lld; best tau2 %lld vs v1: m_prec %+.2f m_rec %+.2f",
                      detail.empty() ? "" : "; ", grid, static_cast<long long>(best_prec),
                      static_cast<long long>(best_rec), static_cast<long long>(best), d_prec, d_rec);
    }
    return {pass, detail};
}

Outcome grid_trend(const Corpus& corpus, const Averages& avg) {
    bool pass = true;
    double worst_prec = 1e9;
    double worst_rec = 1e9;
    auto compare = [&](std::int64_t tau400, std::int64_t tau500) {
        const auto& a = avg.at("v2", 400, tau400);
        const auto& b = avg.at("v2", 500, tau500);
        worst_prec = std::min(worst_prec, b.m_prec - a.m_prec);
        worst_rec = std::min(worst_rec, b.m_rec - a.m_rec);
    };
    for (const auto t : corpus.spec.tau2s) {
        compare(t, t);
    }
    compare(bm::default_tau2(400), bm::default_tau2(500));
    pass = worst_prec >= -0.5 && worst_rec >= -0.5;
    const auto& d400 = avg.at("v2", 400, bm::default_tau2(400));
    const auto& d500 = avg.at("v2", 500, bm::default_tau2(500));
    return {pass, fmt("default tau2: G=400 %.2f/%.2f, G=500 %.2f/%.2f (prec/rec); worst delta prec %+.2f rec %+.2f",
                      d400.m_prec, d400.m_rec, d500.m_prec, d500.m_rec, worst_prec, worst_rec)};
}

double median_ms(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

Outcome runtime_overhead() {
    auto options = bm::tools::fragmentation_corpus();
    options.target_points = 1000000;
    const auto cloud = bm::generate_scene(bm::random_room(7, options));
    const auto bounds = bm::compute_bounds(cloud, 400);
    const auto blocks = bm::partition_blocks(bounds, 1.0, 0.5);
    const auto preds =
        bm::simulate_block_predictor(cloud, blocks, cloud.gt_labels, bm::tools::fragmentation_noise(), 7);
    const auto table = bm::build_cell_table(cloud, bounds);
    std::vector<double> t1;
    std::vector<double> t2;
    auto time_ms = [](const std::function<void()>& f) {
        const auto start = Clock::now();
        f();
        return seconds_since(start) * 1000.0;
    };
    for (int rep = 0; rep < 5; ++rep) {
        t1.push_back(time_ms([&] { bm::run_v1(table, preds, {25, 400}); }));
        t2.push_back(time_ms([&] { bm::run_v2(table, preds, {25, 110, 400}); }));
    }
    const double m1 = median_ms(t1);
    const double m2 = median_ms(t2);
    return {m2 <= 1.5 * m1, fmt("%zu points; median v1 %.1f ms, v2 %.1f ms, ratio %.3f", cloud.size(), m1, m2,
                                m2 / m1)};
}

Outcome metric_arithmetic() {
    std::vector<bm::InstanceLabel> pred(400, bm::kUnlabelled);
    std::vector<bm::InstanceLabel> gt(400);
    for (std::size_t n = 0; n < 400; ++n) {
        gt[n] = bm::InstanceLabel{n < 100 ? 0 : 1};
        if (n < 60) {
            pred[n] = bm::InstanceLabel{7};
        }
    }
    const auto r = bm::evaluate(pred, gt);
    const std::vector<bm::InstanceLabel> intact(4, bm::InstanceLabel{0});
    const std::vector<bm::InstanceLabel> split{bm::InstanceLabel{0}, bm::InstanceLabel{0}, bm::InstanceLabel{1},
                                               bm::InstanceLabel{1}};
    const double rand = bm::partition_equal(intact, split).rand_index;
    const bool pass = r.m_rec == 50.0 && r.m_cov * 100.0 == 30.0 && r.m_wcov * 100.0 == 15.0 &&
                      std::abs(rand - 4.0 / 6.0) <= 1e-9;
    return {pass, fmt("m_rec %.6f m_cov %.6f m_wcov %.6f rand %.12f", r.m_rec, r.m_cov * 100.0, r.m_wcov * 100.0,
                      rand)};
}

Outcome invariant_suite() {
    namespace t = bm::testing;
    const auto start = Clock::now();
    constexpr std::uint64_t kSeeds = 100;
    std::size_t violations = 0;
    std::size_t max_points = 0;
    std::string first;
    auto note = [&](const std::string& message) {
        if (!message.empty()) {
            ++violations;
            if (first.empty()) first = message;
        }
    };
    for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
        const auto c = t::make_property_case(seed);
        max_points = std::max(max_points, c.cloud.size());
        note(t::check_propagation_shrinks_labels(c));
        note(t::check_cell_consistency(c));
        note(t::check_counter_monotone(c));
        note(t::check_determinism(seed));
        note(t::check_local_id_permutation(t::make_property_case(seed, /*zero_noise=*/true)));
    }
    const double elapsed = seconds_since(start);
    const bool pass = violations == 0 && max_points <= 10000 && elapsed < 60.0;
    return {pass, fmt("%llu seeds, largest scene %zu points, %zu violations%s%s; %.2f s",
                      static_cast<unsigned long long>(kSeeds), max_points, violations, first.empty() ? "" : ": ",
                      first.c_str(), elapsed)};
}

}  // namespace

int main() {
    int failures = 0;
    auto report = [&](int id, const char* name, const std::function<Outcome()>& run) {
        const auto start = Clock::now();
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::printf("criterion %d %s: %s (%s) [%.2f s]\n", id, o.pass ? "PASS" : "FAIL", name, o.detail.c_str(),
                    seconds_since(start));
        std::fflush(stdout);
    };

    report(1, "fig1 regression", fig1_regression);
    report(2, "oracle equivalence", oracle_equivalence);
    const auto corpus_start = Clock::now();
    const auto corpus = make_corpus();
    const auto averages = sweep_averages(corpus);
    std::printf("sweep corpus: %zu seeds built and swept in %.2f s\n", corpus.scenes.size(),
                seconds_since(corpus_start));
    report(3, "tau2 limit", [&] { return tau2_limit(corpus); });
    report(4, "sweep shape", [&] { return sweep_shape(corpus, averages); });
    report(5, "grid resolution trend", [&] { return grid_trend(corpus, averages); });
    report(6, "runtime overhead", runtime_overhead);
    report(7, "metric arithmetic", metric_arithmetic);
    report(8, "invariant suite", invariant_suite);
    std::printf("%s: %d of 8 criteria failed\n", failures == 0 ? "OK" : "FAILED", failures);
    return failures == 0 ? 0 : 1;
}
