// SPDX-License-Identifier: Apache-2.0

#include "blockmerge/merge_v2.hpp"

namespace blockmerge {

std::int64_t default_tau2(int grid_res) noexcept {
    return grid_res == 500 ? 50 : 110;
}

InstanceLabel assign_instance_labels(MergeStateV2& state, std::span<const CellId> cells,
                                     const MergeParamsV2& params) {
    const InstanceLabel assigned = assign_unlabelled_cells(state.grid, cells, params.tau1, state.counter);
    auto& table = state.tables.emplace_back();
    for (const CellId c : cells) {
        table.add(state.grid.label(c));
    }
    return assigned;
}

PropagationStats propagate_labels(MergeStateV2& state, const MergeParamsV2& params) {
    PropagationStats stats;
    if (params.propagation_disabled()) {
        return stats;
    }
    auto& tables = state.tables;
    for (std::size_t m = 0; m < tables.size(); ++m) {
        const auto mode = tables[m].mode();
        if (!mode) {
            continue;
        }
        // Snapshot: entries of tables[m] itself are not modified below.
        const std::vector<LabelHistogram::Entry> entries(tables[m].entries().begin(), tables[m].entries().end());
        for (const auto& e : entries) {
            if (e.label == mode->label || static_cast<std::int64_t>(e.count) <= params.tau2) {
                continue;
            }
            stats.rewritten_cells += state.grid.relabel(e.label, mode->label);
            ++stats.rewrites;
            for (std::size_t later = m + 1; later < tables.size(); ++later) {
                tables[later].merge_into(e.label, mode->label);
            }
        }
    }
    return stats;
}

PropagationStats merge_block_v2(MergeStateV2& state, const CellTable& table, const BlockPrediction& pred,
                                const MergeParamsV2& params, CellCollector& collector) {
    state.tables.clear();
    state.tables.reserve(pred.instances.size());
    for (const auto& inst : pred.instances) {
        assign_instance_labels(state, collector.collect(table, inst.points), params);
    }
    return propagate_labels(state, params);
}

MergeResult run_v2(const CellTable& table, std::span<const BlockPrediction> preds, const MergeParamsV2& params) {
    check_snake_order(preds);
    MergeStateV2 state(table);
    CellCollector collector(table.num_cells());
    PropagationStats totals;

    for (std::size_t b = 0; b < preds.size(); ++b) {
        if (b == 0) {
            seed_first_block(state.grid, table, preds[b], state.counter);
            continue;
        }
        const auto stats = merge_block_v2(state, table, preds[b], params, collector);
        totals.rewrites += stats.rewrites;
        totals.rewritten_cells += stats.rewritten_cells;
    }

    MergeResult out = finalize_point_labels(state.grid, table);
    out.diagnostics.blocks = preds.size();
    out.diagnostics.next_group = state.counter.next();
    out.diagnostics.rewrites = totals.rewrites;
    out.diagnostics.rewritten_cells = totals.rewritten_cells;
    return out;
}

MergeResult run_v2(const PointCloud& cloud, std::span<const BlockPrediction> preds, const MergeParamsV2& params) {
    const CellTable table = build_cell_table(cloud, compute_bounds(cloud, params.grid_res));
    return run_v2(table, preds, params);
}

}  // namespace blockmerge
