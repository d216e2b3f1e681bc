// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <string>
#include <unordered_set>

#include "blockmerge/error.hpp"
#include "blockmerge/grid.hpp"

namespace blockmerge {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::EmptyScene: return "EmptyScene";
        case ErrorCode::OutOfBounds: return "OutOfBounds";
        case ErrorCode::OrderViolation: return "OrderViolation";
        case ErrorCode::UndefinedIoU: return "UndefinedIoU";
        case ErrorCode::UndefinedRecall: return "UndefinedRecall";
        case ErrorCode::UndefinedCoverage: return "UndefinedCoverage";
        case ErrorCode::SpecError: return "SpecError";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::MissingColumn: return "MissingColumn";
        case ErrorCode::OrdinalGap: return "OrdinalGap";
        case ErrorCode::Io: return "Io";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message, std::size_t line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
      code_(code),
      line_(line) {}

VoxelLabelGrid::VoxelLabelGrid(std::size_t num_cells, int grid_res, bool track_members)
    : labels_(num_cells), grid_res_(grid_res), track_members_(track_members) {}

void VoxelLabelGrid::assign(CellId cell, InstanceLabel label) {
    labels_[cell] = label;
    if (track_members_ && label.is_labelled()) {
        members_[label.value()].push_back(cell);
    }
}

std::size_t VoxelLabelGrid::relabel(InstanceLabel from, InstanceLabel to) {
    if (from == to || from.is_unlabelled()) {
        return 0;
    }
    std::size_t rewritten = 0;
    if (!track_members_) {
        for (auto& l : labels_) {
            if (l == from) {
                l = to;
                ++rewritten;
            }
        }
        return rewritten;
    }

    const auto it = members_.find(from.value());
    if (it == members_.end()) {
        return 0;
    }
    std::vector<CellId> moved = std::move(it->second);
    members_.erase(it);
    auto& dst = members_[to.value()];
    for (const CellId c : moved) {
        if (labels_[c] == from) {
            labels_[c] = to;
            dst.push_back(c);
            ++rewritten;
        }
    }
    return rewritten;
}

std::size_t VoxelLabelGrid::labelled_cells() const {
    return static_cast<std::size_t>(
        std::count_if(labels_.begin(), labels_.end(), [](InstanceLabel l) { return l.is_labelled(); }));
}

std::size_t VoxelLabelGrid::distinct_labels() const {
    std::unordered_set<InstanceLabel> seen;
    for (const auto l : labels_) {
        if (l.is_labelled()) {
            seen.insert(l);
        }
    }
    return seen.size();
}

void validate_prediction(const BlockPrediction& pred, const PointCloud& cloud) {
    std::unordered_set<std::int64_t> ids;
    std::unordered_set<std::uint32_t> claimed;
    const std::string where = "block " + std::to_string(pred.block.ordinal);
    for (const auto& inst : pred.instances) {
        if (inst.local_id < 0) {
            throw Error(ErrorCode::InvalidArgument, where + ": negative local instance id");
        }
        if (!ids.insert(inst.local_id).second) {
            throw Error(ErrorCode::InvalidArgument,
                        where + ": duplicate local instance id " + std::to_string(inst.local_id));
        }
        for (const auto n : inst.points) {
            if (n >= cloud.size()) {
                throw Error(ErrorCode::InvalidArgument,
                            where + ": point index " + std::to_string(n) + " out of range");
            }
            if (!pred.block.contains(cloud.points[n].x, cloud.points[n].y)) {
                throw Error(ErrorCode::InvalidArgument,
                            where + ": point " + std::to_string(n) + " lies outside the block footprint");
            }
            if (!claimed.insert(n).second) {
                throw Error(ErrorCode::InvalidArgument,
                            where + ": point " + std::to_string(n) + " belongs to two instances");
            }
        }
    }
}

void check_snake_order(std::span<const BlockPrediction> preds) {
    for (std::size_t i = 1; i < preds.size(); ++i) {
        if (preds[i].block.ordinal <= preds[i - 1].block.ordinal) {
            throw Error(ErrorCode::OrderViolation,
                        "block ordinal " + std::to_string(preds[i].block.ordinal) + " follows ordinal " +
                            std::to_string(preds[i - 1].block.ordinal));
        }
    }
}

std::span<const CellId> CellCollector::collect(const CellTable& table, std::span<const std::uint32_t> points) {
    if (++epoch_ == 0) {
        std::fill(stamp_.begin(), stamp_.end(), 0);
        epoch_ = 1;
    }
    cells_.clear();
    for (const auto n : points) {
        const CellId c = table.point_cell[n];
        if (stamp_[c] != epoch_) {
            stamp_[c] = epoch_;
            cells_.push_back(c);
        }
    }
    return cells_;
}

MergeResult finalize_point_labels(const VoxelLabelGrid& grid, const CellTable& table) {
    MergeResult out;
    out.labels.resize(table.point_cell.size());
    for (std::size_t n = 0; n < table.point_cell.size(); ++n) {
        out.labels[n] = grid.label(table.point_cell[n]);
        if (out.labels[n].is_unlabelled()) {
            ++out.diagnostics.unlabelled_points;
        }
    }
    out.diagnostics.distinct_labels = grid.distinct_labels();
    return out;
}

}  // namespace blockmerge
