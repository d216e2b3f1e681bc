// SPDX-License-Identifier: Apache-2.0

#ifndef BLOCKMERGE_GRID_HPP
#define BLOCKMERGE_GRID_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "blockmerge/labels.hpp"
#include "blockmerge/scene.hpp"

namespace blockmerge {

// Label state of the occupied voxels of a scene (the merge state V). Cells
// are addressed by their dense CellId from a CellTable; every cell starts
// Unlabelled.
//
// With `track_members` the grid keeps an inverted index label -> cells so
// that relabel() touches only the cells holding the old label instead of
// scanning the whole grid. The result is identical either way.
class VoxelLabelGrid {
public:
    VoxelLabelGrid() = default;
    VoxelLabelGrid(std::size_t num_cells, int grid_res, bool track_members = false);

    int grid_res() const noexcept { return grid_res_; }
    std::size_t num_cells() const noexcept { return labels_.size(); }
    bool tracks_members() const noexcept { return track_members_; }

    InstanceLabel label(CellId cell) const { return labels_[cell]; }
    std::span<const InstanceLabel> labels() const noexcept { return labels_; }

    void assign(CellId cell, InstanceLabel label);

    // Rewrites every cell holding `from` to `to`, anywhere in the grid.
    // Returns the number of cells rewritten.
    std::size_t relabel(InstanceLabel from, InstanceLabel to);

    std::size_t labelled_cells() const;
    std::size_t distinct_labels() const;

private:
    std::vector<InstanceLabel> labels_;
    int grid_res_ = 0;
    bool track_members_ = false;
    // May hold stale entries after assign() overwrites a labelled cell;
    // relabel() re-checks each entry before rewriting it.
    std::unordered_map<std::int64_t, std::vector<CellId>> members_;
};

// Monotonic source of fresh group identifiers.
class GroupCounter {
public:
    GroupCounter() = default;
    explicit GroupCounter(std::int64_t next) : next_(next) {}

    InstanceLabel mint() { return InstanceLabel{next_++}; }

    // Ensures later mint() calls return values strictly above `label`.
    void advance_past(InstanceLabel label) {
        if (label.is_labelled() && next_ <= label.value()) {
            next_ = label.value() + 1;
        }
    }

    std::int64_t next() const noexcept { return next_; }

private:
    std::int64_t next_ = 0;
};

// One predicted object inside one block, numbered by the per-block segmenter.
struct LocalInstance {
    std::int64_t local_id = 0;
    std::vector<std::uint32_t> points;  // global point indices

    friend bool operator==(const LocalInstance&, const LocalInstance&) = default;
};

struct BlockPrediction {
    Block block;
    std::vector<LocalInstance> instances;
};

// Checks the BlockPrediction invariants against a cloud: point indices in
// range and inside the block footprint, instances disjoint, local ids
// non-negative and unique. Throws InvalidArgument on the first violation.
void validate_prediction(const BlockPrediction& pred, const PointCloud& cloud);

// Throws OrderViolation unless block ordinals are strictly increasing.
void check_snake_order(std::span<const BlockPrediction> preds);

// Deduplicates the cells touched by a set of points. Reusable across calls
// so per-instance work stays proportional to the instance size.
class CellCollector {
public:
    explicit CellCollector(std::size_t num_cells) : stamp_(num_cells, 0) {}

    std::span<const CellId> collect(const CellTable& table, std::span<const std::uint32_t> points);

private:
    std::vector<std::uint32_t> stamp_;
    std::uint32_t epoch_ = 0;
    std::vector<CellId> cells_;
};

struct MergeDiagnostics {
    std::size_t blocks = 0;
    std::size_t unlabelled_points = 0;
    std::size_t distinct_labels = 0;
    std::size_t rewrites = 0;       // global label rewrites (v2 only)
    std::size_t rewritten_cells = 0;
    std::int64_t next_group = 0;
};

struct MergeResult {
    std::vector<InstanceLabel> labels;
    MergeDiagnostics diagnostics;
};

// Projects cell labels onto points. Fills labels and the unlabelled/distinct
// counts of the diagnostics.
MergeResult finalize_point_labels(const VoxelLabelGrid& grid, const CellTable& table);

}  // namespace blockmerge

#endif  // BLOCKMERGE_GRID_HPP
