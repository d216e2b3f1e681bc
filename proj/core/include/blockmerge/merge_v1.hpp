// SPDX-License-Identifier: Apache-2.0

#ifndef BLOCKMERGE_MERGE_V1_HPP
#define BLOCKMERGE_MERGE_V1_HPP

#include <cstdint>
#include <span>

#include "blockmerge/grid.hpp"
#include "blockmerge/histogram.hpp"
#include "blockmerge/scene.hpp"

namespace blockmerge {

inline constexpr std::int64_t kDefaultTau1 = 25;
inline constexpr int kDefaultGridRes = 400;

struct MergeParams {
    // Minimum labelled-cell overlap (strictly exceeded) for a block instance
    // to adopt an existing label instead of minting a new group.
    std::int64_t tau1 = kDefaultTau1;
    int grid_res = kDefaultGridRes;
};

// Histogram of the labels already present on `cells`; Unlabelled cells are
// skipped.
LabelHistogram labelled_histogram(const VoxelLabelGrid& grid, std::span<const CellId> cells);

// Labels every cell touched by the first block with the local instance id
// holding most of the cell's points (ties: smallest id), then advances the
// counter past the largest id used.
void seed_first_block(VoxelLabelGrid& grid, const CellTable& table, const BlockPrediction& pred,
                      GroupCounter& counter);

// Per-instance assignment shared by both merge variants: the Unlabelled cells
// of the instance receive the mode of its labelled cells when that mode's cell
// count exceeds tau1, and a freshly minted group otherwise. Labelled cells are
// left untouched. Returns the label given to the Unlabelled cells (Unlabelled
// when the instance had none, in which case nothing is minted).
InstanceLabel assign_unlabelled_cells(VoxelLabelGrid& grid, std::span<const CellId> cells,
                                      std::int64_t tau1, GroupCounter& counter);

void merge_block_v1(VoxelLabelGrid& grid, const CellTable& table, const BlockPrediction& pred,
                    const MergeParams& params, GroupCounter& counter, CellCollector& collector);

// Full baseline merge. Throws OrderViolation when ordinals are not strictly
// increasing.
MergeResult run_v1(const PointCloud& cloud, std::span<const BlockPrediction> preds, const MergeParams& params);

// Same, reusing a voxelization built for `params.grid_res`.
MergeResult run_v1(const CellTable& table, std::span<const BlockPrediction> preds, const MergeParams& params);

}  // namespace blockmerge

#endif  // BLOCKMERGE_MERGE_V1_HPP
