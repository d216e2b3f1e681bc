// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <ostream>
#include <set>
#include <span>
#include <stdexcept>
#include <utility>

#include "blockmerge/config.hpp"
#include "blockmerge/error.hpp"
#include "blockmerge/io.hpp"
#include "blockmerge/merge_v1.hpp"
#include "blockmerge/merge_v2.hpp"
#include "blockmerge/metrics.hpp"
#include "blockmerge/synthetic.hpp"
#include "sweep.hpp"

namespace blockmerge::tools {
namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fixed1(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f", v);
    return buf;
}

std::string shortest(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

// The RunConfig-backed flags of one subcommand. Values come from the
// defaults, then the --config file, then explicitly given flags.
class ConfigFlags {
public:
    explicit ConfigFlags(CLI::App* cmd) : cmd_(cmd) {
        cmd_->add_option("--config", config_path_, "JSON run configuration (flags take precedence)")
            ->check(CLI::ExistingFile);
    }

    ConfigFlags& algo() {
        add("--algo", algo_, "merge algorithm", [this](RunConfig& c) { c.algorithm = parse_algorithm(algo_); })
            ->check(CLI::IsMember({"v1", "v2"}));
        return *this;
    }
    ConfigFlags& grid() {
        add("--grid", grid_, "voxel grid resolution G", [this](RunConfig& c) { c.grid_res = grid_; });
        return *this;
    }
    ConfigFlags& tau1() {
        add("--tau1", tau1_, "label adoption threshold (cells)", [this](RunConfig& c) { c.tau1 = tau1_; });
        return *this;
    }
    ConfigFlags& tau2() {
        add("--tau2", tau2_, "propagation threshold (cells) or inf", [this](RunConfig& c) { c.tau2 = parse_tau(tau2_); });
        return *this;
    }
    ConfigFlags& blocks() {
        add("--block-side", side_, "block side (m)", [this](RunConfig& c) { c.block_side = side_; });
        add("--stride", stride_, "block stride (m)", [this](RunConfig& c) { c.stride = stride_; });
        return *this;
    }
    ConfigFlags& seed() {
        add("--seed", seed_, "random seed", [this](RunConfig& c) { c.seed = seed_; });
        return *this;
    }
    ConfigFlags& workers() {
        add("--workers", workers_, "concurrent runs", [this](RunConfig& c) { c.workers = workers_; });
        return *this;
    }
    ConfigFlags& format() {
        add("--format", format_, "point cloud format", [this](RunConfig& c) { c.format = parse_cloud_format(format_); })
            ->check(CLI::IsMember({"ply", "tsv"}));
        return *this;
    }
    ConfigFlags& path(const char* name, std::string RunConfig::*field, const char* help) {
        auto& slot = paths_.emplace_back(std::make_unique<std::string>());
        std::string* value = slot.get();
        add(name, *value, help, [value, field](RunConfig& c) { c.*field = *value; });
        return *this;
    }

    RunConfig resolve() const {
        RunConfig config = config_path_.empty() ? RunConfig{} : load_config(config_path_);
        for (const auto& [opt, apply] : setters_) {
            if (opt->count() > 0) {
                apply(config);
            }
        }
        config.validate();
        return config;
    }

private:
    template <typename T>
    CLI::Option* add(const char* name, T& value, const char* help, std::function<void(RunConfig&)> apply) {
        CLI::Option* opt = cmd_->add_option(name, value, help);
        setters_.emplace_back(opt, std::move(apply));
        return opt;
    }

    CLI::App* cmd_;
    std::string config_path_;
    std::string algo_;
    int grid_ = 0;
    std::int64_t tau1_ = 0;
    std::string tau2_;
    double side_ = 0.0;
    double stride_ = 0.0;
    std::uint64_t seed_ = 0;
    int workers_ = 1;
    std::string format_;
    std::vector<std::unique_ptr<std::string>> paths_;
    std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> setters_;
};

void require_path(const std::string& value, const char* flag) {
    if (value.empty()) {
        throw UsageError(std::string(flag) + " is required");
    }
}

struct NoiseFlags {
    double fragmentation = 0.0;
    double jitter = 0.0;
    double dropout = 0.0;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--fragmentation", fragmentation, "predictor fragmentation probability")
            ->check(CLI::Range(0.0, 1.0))
            ->capture_default_str();
        cmd->add_option("--jitter", jitter, "predictor boundary jitter probability")
            ->check(CLI::Range(0.0, 1.0))
            ->capture_default_str();
        cmd->add_option("--dropout", dropout, "predictor dropout fraction")
            ->check(CLI::Range(0.0, 1.0))
            ->capture_default_str();
    }
    PredictorNoise noise() const {
        PredictorNoise n;
        n.fragmentation = fragmentation;
        n.jitter = jitter;
        n.dropout = dropout;
        return n;
    }
};

// ---- synth -----------------------------------------------------------------

struct SynthArgs {
    std::string scene = "room";
    std::size_t points = 100000;
    bool concave = false;
    bool walls = false;
    NoiseFlags noise;
};

int cmd_synth(const RunConfig& config, const SynthArgs& args, std::ostream& out) {
    require_path(config.out, "--out");
    SceneSpec spec;
    if (args.scene == "fig1") {
        spec = fig1_scenario().spec;
    } else {
        CorpusOptions options;
        options.target_points = args.points;
        options.concave_shapes = args.concave;
        options.walls = args.walls;
        spec = random_room(config.seed, options);
    }
    const PointCloud cloud = generate_scene(spec);
    write_point_cloud(config.out, cloud, config.format);
    out << "points " << cloud.size() << "\n";
    out << "instances " << spec.shapes.size() << "\n";

    if (!config.preds.empty()) {
        const auto bounds = compute_bounds(cloud, config.grid_res);
        const auto blocks = partition_blocks(bounds, config.block_side, config.stride);
        const auto preds = simulate_block_predictor(cloud, blocks, cloud.gt_labels, args.noise.noise(), config.seed);
        write_block_predictions(config.preds, preds);
        out << "blocks " << preds.size() << "\n";
    }
    return kExitOk;
}

// ---- partition -------------------------------------------------------------

int cmd_partition(const RunConfig& config, std::ostream& out) {
    require_path(config.in, "--in");
    const PointCloud cloud = read_point_cloud(config.in, config.format);
    const auto bounds = compute_bounds(cloud, config.grid_res);
    const auto blocks = partition_blocks(bounds, config.block_side, config.stride);
    const auto members = assign_points_to_blocks(cloud, blocks);

    std::string text = "ordinal\torigin_x\torigin_y\tside\tpoints\n";
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        text += std::to_string(blocks[b].ordinal) + "\t" + shortest(blocks[b].origin_x) + "\t" +
                shortest(blocks[b].origin_y) + "\t" + shortest(blocks[b].side) + "\t" +
                std::to_string(members[b].size()) + "\n";
    }
    if (config.out.empty()) {
        out << text;
    } else {
        atomic_write(config.out, text);
        out << "blocks " << blocks.size() << "\n";
    }
    return kExitOk;
}

// ---- merge -----------------------------------------------------------------

// Prediction files only carry origins; take side and closed edges from the
// partition the origins came from.
void restore_block_geometry(std::vector<BlockPrediction>& preds, const std::vector<Block>& layout) {
    for (auto& p : preds) {
        const auto ord = static_cast<std::size_t>(p.block.ordinal);
        if (ord >= layout.size()) {
            continue;
        }
        const Block& ref = layout[ord];
        const double tol = 1e-6 * std::max(1.0, ref.side);
        if (std::abs(ref.origin_x - p.block.origin_x) <= tol && std::abs(ref.origin_y - p.block.origin_y) <= tol) {
            p.block = ref;
        }
    }
}

int cmd_merge(const RunConfig& config, const std::string& export_path, std::ostream& out) {
    require_path(config.in, "--in");
    require_path(config.preds, "--preds");
    require_path(config.out, "--out");

    const PointCloud cloud = read_point_cloud(config.in, config.format);
    auto preds = read_block_predictions(config.preds, config.block_side);
    const auto bounds = compute_bounds(cloud, config.grid_res);
    restore_block_geometry(preds, partition_blocks(bounds, config.block_side, config.stride));
    for (const auto& p : preds) {
        validate_prediction(p, cloud);
    }
    const auto table = build_cell_table(cloud, bounds);

    const auto start = std::chrono::steady_clock::now();
    const MergeResult result =
        config.algorithm == Algorithm::V1 ? run_v1(table, preds, config.v1_params()) : run_v2(table, preds, config.v2_params());
    const std::chrono::duration<double, std::milli> elapsed = std::chrono::steady_clock::now() - start;

    write_labels(config.out, result.labels);
    if (!export_path.empty()) {
        write_point_cloud(export_path, cloud, config.format, result.labels);
    }

    const auto& d = result.diagnostics;
    out << "algo " << to_string(config.algorithm) << "\n";
    out << "grid " << config.grid_res << "\n";
    out << "tau1 " << config.tau1 << "\n";
    if (config.algorithm == Algorithm::V2) {
        out << "tau2 " << format_tau(config.effective_tau2()) << "\n";
    }
    out << "blocks " << d.blocks << "\n";
    out << "distinct_labels " << d.distinct_labels << "\n";
    out << "unlabelled_points " << d.unlabelled_points << "\n";
    if (config.algorithm == Algorithm::V2) {
        out << "rewrites " << d.rewrites << "\n";
    }
    out << "wall_time_ms " << fixed1(elapsed.count()) << "\n";
    return kExitOk;
}

// ---- eval ------------------------------------------------------------------

MetricsRow metrics_row(const RunConfig& config, const MetricsReport& report) {
    const bool v1 = config.algorithm == Algorithm::V1;
    return {std::string(to_string(config.algorithm)), config.grid_res, config.tau1,
            v1 ? kInfiniteTau : config.effective_tau2(), config.seed, report};
}

int cmd_eval(const RunConfig& config, std::ostream& out) {
    require_path(config.preds, "--preds");
    if (config.gt.empty() && config.in.empty()) {
        throw UsageError("--gt (labels) or --in (cloud with gt labels) is required");
    }
    const auto pred = read_labels(config.preds);
    std::vector<InstanceLabel> gt;
    if (!config.gt.empty()) {
        gt = read_labels(config.gt);
    } else {
        auto cloud = read_point_cloud(config.in, config.format);
        if (!cloud.has_gt()) {
            throw UsageError(config.in + " has no gt_label column");
        }
        gt = std::move(cloud.gt_labels);
    }
    if (pred.size() != gt.size()) {
        throw Error(ErrorCode::InvalidArgument, "label count mismatch: " + std::to_string(pred.size()) +
                                                    " predicted vs " + std::to_string(gt.size()) + " ground truth");
    }
    const MetricsReport report = evaluate(pred, gt);
    out << "m_rec  " << fixed1(report.m_rec) << "\n";
    out << "m_prec " << (report.precision_defined ? fixed1(report.m_prec) : "undefined") << "\n";
    out << "m_cov  " << fixed1(100.0 * report.m_cov) << "\n";
    out << "m_wcov " << fixed1(100.0 * report.m_wcov) << "\n";
    out << "pred_instances " << report.pred_instances << "\n";
    out << "gt_instances " << report.gt_instances << "\n";

    const std::vector<MetricsRow> rows{metrics_row(config, report)};
    const std::string csv = format_metrics_csv(rows);
    out << csv;
    if (!config.out.empty()) {
        atomic_write(config.out, csv);
    }
    return kExitOk;
}

// ---- sweep -----------------------------------------------------------------

struct SweepArgs {
    std::vector<std::string> tau2s{"10", "50", "110", "500", "5000"};
    std::vector<int> grids{400, 500};
    int seeds = 3;
    std::size_t points = 100000;
    bool boxes_only = false;
    bool baseline = false;
    NoiseFlags noise{0.3, 0.0, 0.0};
};

int cmd_sweep(const RunConfig& config, const SweepArgs& args, std::ostream& out) {
    if (!config.in.empty() && config.preds.empty()) {
        throw UsageError("--in requires --preds");
    }
    if (config.in.empty() && !config.preds.empty()) {
        throw UsageError("--preds requires --in");
    }
    if (args.seeds < 1) {
        throw UsageError("--seeds must be at least 1");
    }
    SweepSpec spec;
    spec.tau2s.clear();
    std::set<std::int64_t> seen;
    for (const auto& t : args.tau2s) {
        const auto tau = parse_tau(t);
        if (seen.insert(tau).second) {
            spec.tau2s.push_back(tau);
        }
    }
    spec.grids = args.grids;
    for (const int g : spec.grids) {
        if (g < 1) {
            throw UsageError("--grid values must be positive");
        }
    }
    spec.tau1 = config.tau1;
    spec.block_side = config.block_side;
    spec.stride = config.stride;
    spec.corpus.target_points = args.points;
    if (args.boxes_only) {
        spec.corpus.concave_shapes = false;
        spec.corpus.walls = false;
    }
    spec.noise = args.noise.noise();
    spec.baseline = args.baseline;
    spec.workers = config.workers;

    std::vector<MetricsRow> rows;
    if (config.in.empty()) {
        spec.seeds.clear();
        for (int i = 0; i < args.seeds; ++i) {
            spec.seeds.push_back(config.seed + static_cast<std::uint64_t>(i));
        }
        rows = run_sweep(spec);
    } else {
        SweepScene scene{read_point_cloud(config.in, config.format), {}};
        if (!scene.cloud.has_gt()) {
            throw UsageError(config.in + " has no gt_label column");
        }
        scene.preds = read_block_predictions(config.preds, config.block_side);
        const auto bounds = compute_bounds(scene.cloud, kDefaultGridRes);
        restore_block_geometry(scene.preds, partition_blocks(bounds, config.block_side, config.stride));
        rows = run_sweep(spec, scene, config.seed);
    }

    if (config.out.empty()) {
        out << format_metrics_csv(rows);
        return kExitOk;
    }
    write_metrics_csv(config.out, rows);
    out << "rows " << rows.size() << "\n";
    out << "algo\tgrid\ttau2\tm_prec\tm_rec\n";
    for (const auto& p : average_over_seeds(rows)) {
        out << p.algo << "\t" << p.grid << "\t" << format_tau(p.tau2) << "\t" << fixed1(p.m_prec) << "\t"
            << fixed1(p.m_rec) << "\n";
    }
    return kExitOk;
}

// ---- regress-fig1 ----------------------------------------------------------

std::size_t labels_on(std::span<const InstanceLabel> labels, std::span<const InstanceLabel> gt, InstanceLabel object) {
    std::set<InstanceLabel> seen;
    for (std::size_t n = 0; n < labels.size(); ++n) {
        if (gt[n] == object && labels[n].is_labelled()) {
            seen.insert(labels[n]);
        }
    }
    return seen.size();
}

int cmd_regress_fig1(const RunConfig& config, std::ostream& out) {
    const Fig1Scenario s = fig1_scenario();
    const auto bounds = compute_bounds(s.cloud, config.grid_res);
    const auto blocks = partition_blocks(bounds, s.block_side, s.stride);
    const auto preds = simulate_block_predictor(s.cloud, blocks, s.cloud.gt_labels, PredictorNoise{}, config.seed);
    const auto table = build_cell_table(s.cloud, bounds);

    const MergeParamsV2 params = config.v2_params();
    const auto v1 = run_v1(table, preds, params.assignment());
    const auto v2 = run_v2(table, preds, params);
    const auto m1 = evaluate(v1.labels, s.cloud.gt_labels);
    const auto m2 = evaluate(v2.labels, s.cloud.gt_labels);
    const std::size_t n1 = labels_on(v1.labels, s.cloud.gt_labels, s.sofa);
    const std::size_t n2 = labels_on(v2.labels, s.cloud.gt_labels, s.sofa);

    out << "v1 sofa_labels " << n1 << " m_prec " << fixed1(m1.m_prec) << " m_rec " << fixed1(m1.m_rec) << "\n";
    out << "v2 sofa_labels " << n2 << " m_prec " << fixed1(m2.m_prec) << " m_rec " << fixed1(m2.m_rec)
        << " tau2 " << format_tau(params.tau2) << "\n";

    if (n1 >= 2 && n2 == 1) {
        out << "PASS\n";
        return kExitOk;
    }
    if (params.propagation_disabled()) {
        out << "FAIL (expected with tau2 = inf): propagation is disabled, so v2 reduces to v1 and the sofa keeps "
            << n2 << " labels\n";
    } else {
        out << "FAIL: want v1 sofa_labels >= 2 and v2 sofa_labels == 1, got " << n1 << " and " << n2 << "\n";
    }
    return kExitFailure;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Block merging of per-block instance predictions", "blockmerge"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "blockmerge 1.0.0");

    auto* synth = app.add_subcommand("synth", "Generate a synthetic room and optional simulated predictions");
    ConfigFlags synth_flags(synth);
    synth_flags.seed().grid().blocks().format().path("--out", &RunConfig::out, "point cloud output")
        .path("--preds", &RunConfig::preds, "block predictions output");
    SynthArgs synth_args;
    synth->add_option("--scene", synth_args.scene, "room or fig1")
        ->check(CLI::IsMember({"room", "fig1"}))
        ->capture_default_str();
    synth->add_option("--points", synth_args.points, "approximate point count of a room")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    synth->add_flag("--concave", synth_args.concave, "include L and U shaped instances");
    synth->add_flag("--walls", synth_args.walls, "include perimeter walls");
    synth_args.noise.add_to(synth);

    auto* partition = app.add_subcommand("partition", "List the snake-ordered blocks of a point cloud");
    ConfigFlags partition_flags(partition);
    partition_flags.grid().blocks().format().path("--in", &RunConfig::in, "point cloud")
        .path("--out", &RunConfig::out, "block table output (default: stdout)");

    auto* merge = app.add_subcommand("merge", "Merge block predictions into scene labels");
    ConfigFlags merge_flags(merge);
    merge_flags.algo().grid().tau1().tau2().blocks().format()
        .path("--in", &RunConfig::in, "point cloud")
        .path("--preds", &RunConfig::preds, "block predictions")
        .path("--out", &RunConfig::out, "labels output");
    std::string export_path;
    merge->add_option("--export", export_path, "also write the cloud with a pred_label column");

    auto* eval = app.add_subcommand("eval", "Score predicted labels against ground truth");
    ConfigFlags eval_flags(eval);
    eval_flags.algo().grid().tau1().tau2().seed().format()
        .path("--preds", &RunConfig::preds, "predicted labels")
        .path("--gt", &RunConfig::gt, "ground-truth labels")
        .path("--in", &RunConfig::in, "point cloud with gt labels (instead of --gt)")
        .path("--out", &RunConfig::out, "metrics CSV output");

    auto* sweep = app.add_subcommand("sweep", "Sweep tau2 and grid resolution over a synthetic corpus");
    ConfigFlags sweep_flags(sweep);
    sweep_flags.tau1().blocks().seed().workers().format()
        .path("--in", &RunConfig::in, "point cloud with gt labels (instead of the corpus)")
        .path("--preds", &RunConfig::preds, "block predictions for --in")
        .path("--out", &RunConfig::out, "metrics CSV output (default: stdout)");
    SweepArgs sweep_args;
    sweep->add_option("--tau2", sweep_args.tau2s, "tau2 values, comma separated")->delimiter(',')->capture_default_str();
    sweep->add_option("--grid", sweep_args.grids, "grid resolutions, comma separated")
        ->delimiter(',')
        ->capture_default_str();
    sweep->add_option("--seeds", sweep_args.seeds, "number of corpus seeds, starting at --seed")->capture_default_str();
    sweep->add_option("--points", sweep_args.points, "approximate point count per room")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sweep->add_flag("--boxes-only", sweep_args.boxes_only, "rooms of plain boxes, no walls or concave shapes");
    sweep->add_flag("--baseline", sweep_args.baseline, "add v1 rows");
    sweep_args.noise.add_to(sweep);

    auto* regress = app.add_subcommand("regress-fig1", "Check that v1 splits the sofa scenario and v2 unifies it");
    ConfigFlags regress_flags(regress);
    regress_flags.grid().tau1().tau2().seed();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (synth->parsed()) {
            return cmd_synth(synth_flags.resolve(), synth_args, out);
        }
        if (partition->parsed()) {
            return cmd_partition(partition_flags.resolve(), out);
        }
        if (merge->parsed()) {
            return cmd_merge(merge_flags.resolve(), export_path, out);
        }
        if (eval->parsed()) {
            return cmd_eval(eval_flags.resolve(), out);
        }
        if (sweep->parsed()) {
            return cmd_sweep(sweep_flags.resolve(), sweep_args, out);
        }
        return cmd_regress_fig1(regress_flags.resolve(), out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
    } catch (const Error& e) {
        err << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
    }
    return kExitUsage;
}

}  // namespace blockmerge::tools
