// SPDX-License-Identifier: Apache-2.0

#ifndef BLOCKMERGE_SCENE_HPP
#define BLOCKMERGE_SCENE_HPP

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "blockmerge/labels.hpp"

namespace blockmerge {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const Vec3&, const Vec3&) = default;
};

struct Color {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Color&, const Color&) = default;
};

using Point = Vec3;

// A scene. `colors` and `gt_labels` are either empty or hold exactly one
// entry per point.
struct PointCloud {
    std::vector<Point> points;
    std::vector<Color> colors;
    std::vector<InstanceLabel> gt_labels;

    std::size_t size() const noexcept { return points.size(); }
    bool empty() const noexcept { return points.empty(); }
    bool has_colors() const noexcept { return !colors.empty(); }
    bool has_gt() const noexcept { return !gt_labels.empty(); }

    // Throws InvalidArgument when the optional columns are mis-sized or a
    // coordinate is not finite.
    void validate() const;
};

// Axis-aligned scene box with cubic cells: cell_size is the largest axis
// extent divided by grid_res, so only the longest axis uses all G cells.
struct SceneBounds {
    Vec3 min_corner;
    Vec3 max_corner;
    double cell_size = 1.0;
    int grid_res = 400;

    double extent_x() const noexcept { return max_corner.x - min_corner.x; }
    double extent_y() const noexcept { return max_corner.y - min_corner.y; }
    double extent_z() const noexcept { return max_corner.z - min_corner.z; }
};

struct CellIndex {
    std::int32_t i = 0;
    std::int32_t j = 0;
    std::int32_t k = 0;

    friend bool operator==(const CellIndex&, const CellIndex&) = default;
    friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

// Ground-plane tile of the scene; height is unbounded. The `closed_*` flags
// mark the last block along an axis, whose upper edge is inclusive so that
// points on the scene's max face are not lost.
struct Block {
    double origin_x = 0.0;
    double origin_y = 0.0;
    double side = 1.0;
    int ordinal = 0;
    bool closed_x = false;
    bool closed_y = false;

    bool contains(double x, double y) const noexcept;
};

SceneBounds compute_bounds(const PointCloud& cloud, int grid_res);

// Throws OutOfBounds when p lies more than half a cell outside `bounds`.
CellIndex voxelize(const Point& p, const SceneBounds& bounds);

// Snake-ordered sliding window over the ground footprint of `bounds`: rows
// advance along +y, and the x direction alternates per row starting with +x.
std::vector<Block> partition_blocks(const SceneBounds& bounds, double side, double stride);

std::vector<std::uint32_t> points_in_block(const PointCloud& cloud, const Block& block);

// Same result as calling points_in_block for every block, but buckets the
// points into stride-sized columns first so large scenes stay linear.
std::vector<std::vector<std::uint32_t>> assign_points_to_blocks(const PointCloud& cloud,
                                                                std::span<const Block> blocks);

// Dense id of an occupied voxel within a CellTable.
using CellId = std::uint32_t;

// The occupied cells of one scene. Only cells holding at least one point are
// stored; `point_cell[n]` is the cell of point n.
struct CellTable {
    SceneBounds bounds;
    std::vector<CellIndex> cells;
    std::vector<CellId> point_cell;

    std::size_t num_cells() const noexcept { return cells.size(); }
};

CellTable build_cell_table(const PointCloud& cloud, const SceneBounds& bounds);

}  // namespace blockmerge

#endif  // BLOCKMERGE_SCENE_HPP
