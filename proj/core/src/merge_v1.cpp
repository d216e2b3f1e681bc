// SPDX-License-Identifier: Apache-2.0

#include "blockmerge/merge_v1.hpp"

#include <algorithm>
#include <utility>
#include <vector>

namespace blockmerge {

LabelHistogram labelled_histogram(const VoxelLabelGrid& grid, std::span<const CellId> cells) {
    LabelHistogram h;
    for (const CellId c : cells) {
        const InstanceLabel l = grid.label(c);
        if (l.is_labelled()) {
            h.add(l);
        }
    }
    return h;
}

void seed_first_block(VoxelLabelGrid& grid, const CellTable& table, const BlockPrediction& pred,
                      GroupCounter& counter) {
    // (cell, local id) per point; sorting groups the votes of each cell.
    std::vector<std::pair<CellId, std::int64_t>> votes;
    for (const auto& inst : pred.instances) {
        for (const auto n : inst.points) {
            votes.emplace_back(table.point_cell[n], inst.local_id);
        }
    }
    std::sort(votes.begin(), votes.end());

    std::size_t i = 0;
    while (i < votes.size()) {
        const CellId cell = votes[i].first;
        std::int64_t best_id = votes[i].second;
        std::size_t best_count = 0;
        while (i < votes.size() && votes[i].first == cell) {
            const std::int64_t id = votes[i].second;
            std::size_t run = 0;
            while (i < votes.size() && votes[i].first == cell && votes[i].second == id) {
                ++run;
                ++i;
            }
            // Ids arrive ascending, so strict > keeps the smallest id on ties.
            if (run > best_count) {
                best_count = run;
                best_id = id;
            }
        }
        const InstanceLabel label{best_id};
        grid.assign(cell, label);
        counter.advance_past(label);
    }
}

InstanceLabel assign_unlabelled_cells(VoxelLabelGrid& grid, std::span<const CellId> cells,
                                      std::int64_t tau1, GroupCounter& counter) {
    const bool any_unlabelled =
        std::any_of(cells.begin(), cells.end(), [&](CellId c) { return grid.label(c).is_unlabelled(); });
    if (!any_unlabelled) {
        return kUnlabelled;
    }
    const auto mode = labelled_histogram(grid, cells).mode();
    const bool adopt = mode && static_cast<std::int64_t>(mode->count) > tau1;
    const InstanceLabel label = adopt ? mode->label : counter.mint();
    for (const CellId c : cells) {
        if (grid.label(c).is_unlabelled()) {
            grid.assign(c, label);
        }
    }
    return label;
}

void merge_block_v1(VoxelLabelGrid& grid, const CellTable& table, const BlockPrediction& pred,
                    const MergeParams& params, GroupCounter& counter, CellCollector& collector) {
    for (const auto& inst : pred.instances) {
        const auto cells = collector.collect(table, inst.points);
        assign_unlabelled_cells(grid, cells, params.tau1, counter);
    }
}

MergeResult run_v1(const CellTable& table, std::span<const BlockPrediction> preds, const MergeParams& params) {
    check_snake_order(preds);
    VoxelLabelGrid grid(table.num_cells(), table.bounds.grid_res);
    GroupCounter counter;
    CellCollector collector(table.num_cells());

    for (std::size_t b = 0; b < preds.size(); ++b) {
        if (b == 0) {
            seed_first_block(grid, table, preds[b], counter);
        } else {
            merge_block_v1(grid, table, preds[b], params, counter, collector);
        }
    }

    MergeResult out = finalize_point_labels(grid, table);
    out.diagnostics.blocks = preds.size();
    out.diagnostics.next_group = counter.next();
    return out;
}

MergeResult run_v1(const PointCloud& cloud, std::span<const BlockPrediction> preds, const MergeParams& params) {
    const CellTable table = build_cell_table(cloud, compute_bounds(cloud, params.grid_res));
    return run_v1(table, preds, params);
}

}  // namespace blockmerge
