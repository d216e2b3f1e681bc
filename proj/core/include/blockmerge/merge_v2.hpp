// SPDX-License-Identifier: Apache-2.0

#ifndef BLOCKMERGE_MERGE_V2_HPP
#define BLOCKMERGE_MERGE_V2_HPP

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "blockmerge/grid.hpp"
#include "blockmerge/histogram.hpp"
#include "blockmerge/merge_v1.hpp"
#include "blockmerge/scene.hpp"

namespace blockmerge {

// A tau2 no histogram count can exceed; disables propagation.
inline constexpr std::int64_t kInfiniteTau = std::numeric_limits<std::int64_t>::max();

// 110 for a 400^3 grid, 50 for 500^3; other resolutions fall back to 110.
std::int64_t default_tau2(int grid_res) noexcept;

struct MergeParamsV2 {
    std::int64_t tau1 = kDefaultTau1;
    // A label co-occurring with an instance's mode is rewritten to the mode
    // when its cell count on the instance strictly exceeds tau2.
    std::int64_t tau2 = 110;
    int grid_res = kDefaultGridRes;

    bool propagation_disabled() const noexcept { return tau2 == kInfiniteTau; }
    MergeParams assignment() const noexcept { return {tau1, grid_res}; }
};

struct MergeStateV2 {
    explicit MergeStateV2(const CellTable& table)
        : grid(table.num_cells(), table.bounds.grid_res, /*track_members=*/true) {}

    VoxelLabelGrid grid;
    GroupCounter counter;
    // One histogram per instance of the block being merged, in block order.
    std::vector<LabelHistogram> tables;
};

// Assignment step for one instance of a non-first block. Applies the shared
// assignment rule, then records every label now present on the instance's
// cells into a new histogram appended to `state.tables`. Returns the label
// given to the instance's previously Unlabelled cells.
InstanceLabel assign_instance_labels(MergeStateV2& state, std::span<const CellId> cells,
                                     const MergeParamsV2& params);

struct PropagationStats {
    std::size_t rewrites = 0;
    std::size_t rewritten_cells = 0;
};

// Global propagation over the histograms of the current block, instance by
// instance in block order. Each rewrite is applied to the whole grid and
// folded into the histograms of the instances not yet visited.
PropagationStats propagate_labels(MergeStateV2& state, const MergeParamsV2& params);

// Assignment pass over all instances of `pred`, then one propagation pass.
PropagationStats merge_block_v2(MergeStateV2& state, const CellTable& table, const BlockPrediction& pred,
                                const MergeParamsV2& params, CellCollector& collector);

MergeResult run_v2(const PointCloud& cloud, std::span<const BlockPrediction> preds, const MergeParamsV2& params);
MergeResult run_v2(const CellTable& table, std::span<const BlockPrediction> preds, const MergeParamsV2& params);

}  // namespace blockmerge

#endif  // BLOCKMERGE_MERGE_V2_HPP
