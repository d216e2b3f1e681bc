// SPDX-License-Identifier: Apache-2.0

#include "blockmerge/scene.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "blockmerge/error.hpp"

namespace blockmerge {

namespace {

// Absorbs representation error in quotients such as 0.3 / 0.1, which would
// otherwise floor one cell (or one block) short of the intended value.
constexpr double kSnap = 1e-9;

std::int32_t cell_component(double coord, double lo, double cell_size, int grid_res) {
    const double q = std::floor((coord - lo) / cell_size + kSnap);
    return static_cast<std::int32_t>(std::clamp(q, 0.0, static_cast<double>(grid_res - 1)));
}

std::size_t origin_count(double extent, double side, double stride) {
    if (extent <= side) {
        return 1;
    }
    return 1 + static_cast<std::size_t>(std::ceil((extent - side) / stride - kSnap));
}

}  // namespace

bool Block::contains(double x, double y) const noexcept {
    const double hx = origin_x + side;
    const double hy = origin_y + side;
    const bool in_x = x >= origin_x && (x < hx || (closed_x && x <= hx));
    const bool in_y = y >= origin_y && (y < hy || (closed_y && y <= hy));
    return in_x && in_y;
}

void PointCloud::validate() const {
    if (!colors.empty() && colors.size() != points.size()) {
        throw Error(ErrorCode::InvalidArgument, "colour column has " + std::to_string(colors.size()) +
                                                    " entries for " + std::to_string(points.size()) +
                                                    " points");
    }
    if (!gt_labels.empty() && gt_labels.size() != points.size()) {
        throw Error(ErrorCode::InvalidArgument, "gt label column has " +
                                                    std::to_string(gt_labels.size()) + " entries for " +
                                                    std::to_string(points.size()) + " points");
    }
    for (std::size_t n = 0; n < points.size(); ++n) {
        const auto& p = points[n];
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
            throw Error(ErrorCode::InvalidArgument, "point " + std::to_string(n) + " is not finite");
        }
    }
}

SceneBounds compute_bounds(const PointCloud& cloud, int grid_res) {
    if (cloud.empty()) {
        throw Error(ErrorCode::EmptyScene, "cannot compute bounds of an empty point cloud");
    }
    if (grid_res < 1) {
        throw Error(ErrorCode::InvalidArgument, "grid resolution must be >= 1");
    }
    SceneBounds b;
    b.grid_res = grid_res;
    b.min_corner = b.max_corner = cloud.points.front();
    for (const auto& p : cloud.points) {
        b.min_corner.x = std::min(b.min_corner.x, p.x);
        b.min_corner.y = std::min(b.min_corner.y, p.y);
        b.min_corner.z = std::min(b.min_corner.z, p.z);
        b.max_corner.x = std::max(b.max_corner.x, p.x);
        b.max_corner.y = std::max(b.max_corner.y, p.y);
        b.max_corner.z = std::max(b.max_corner.z, p.z);
    }
    const double extent = std::max({b.extent_x(), b.extent_y(), b.extent_z()});
    b.cell_size = extent > 0.0 ? extent / grid_res : 1.0;
    return b;
}

CellIndex voxelize(const Point& p, const SceneBounds& bounds) {
    const double tol = bounds.cell_size / 2.0;
    const auto& lo = bounds.min_corner;
    const auto& hi = bounds.max_corner;
    if (p.x < lo.x - tol || p.y < lo.y - tol || p.z < lo.z - tol || p.x > hi.x + tol ||
        p.y > hi.y + tol || p.z > hi.z + tol) {
        throw Error(ErrorCode::OutOfBounds, "point lies outside the scene bounds");
    }
    return {cell_component(p.x, lo.x, bounds.cell_size, bounds.grid_res),
            cell_component(p.y, lo.y, bounds.cell_size, bounds.grid_res),
            cell_component(p.z, lo.z, bounds.cell_size, bounds.grid_res)};
}

std::vector<Block> partition_blocks(const SceneBounds& bounds, double side, double stride) {
    if (!(side > 0.0) || !(stride > 0.0) || stride > side) {
        throw Error(ErrorCode::InvalidArgument, "block partition requires 0 < stride <= side");
    }
    const std::size_t nx = origin_count(bounds.extent_x(), side, stride);
    const std::size_t ny = origin_count(bounds.extent_y(), side, stride);

    std::vector<Block> blocks;
    blocks.reserve(nx * ny);
    for (std::size_t row = 0; row < ny; ++row) {
        for (std::size_t step = 0; step < nx; ++step) {
            const std::size_t col = (row % 2 == 0) ? step : nx - 1 - step;
            Block b;
            b.origin_x = bounds.min_corner.x + static_cast<double>(col) * stride;
            b.origin_y = bounds.min_corner.y + static_cast<double>(row) * stride;
            b.side = side;
            b.ordinal = static_cast<int>(blocks.size());
            b.closed_x = col + 1 == nx;
            b.closed_y = row + 1 == ny;
            blocks.push_back(b);
        }
    }
    return blocks;
}

std::vector<std::uint32_t> points_in_block(const PointCloud& cloud, const Block& block) {
    std::vector<std::uint32_t> out;
    for (std::size_t n = 0; n < cloud.points.size(); ++n) {
        if (block.contains(cloud.points[n].x, cloud.points[n].y)) {
            out.push_back(static_cast<std::uint32_t>(n));
        }
    }
    return out;
}

std::vector<std::vector<std::uint32_t>> assign_points_to_blocks(const PointCloud& cloud,
                                                                std::span<const Block> blocks) {
    std::vector<std::vector<std::uint32_t>> out(blocks.size());
    if (blocks.empty() || cloud.empty()) {
        return out;
    }

    // Column buckets of width `bin` anchored at the lowest block origin.
    double ox = blocks.front().origin_x;
    double oy = blocks.front().origin_y;
    double bin = blocks.front().side;
    for (const auto& b : blocks) {
        ox = std::min(ox, b.origin_x);
        oy = std::min(oy, b.origin_y);
        bin = std::min(bin, b.side);
    }
    bin = std::max(bin / 2.0, 1e-6);

    auto bucket_of = [&](double v, double o) {
        return static_cast<std::int64_t>(std::floor((v - o) / bin));
    };

    std::unordered_map<std::int64_t, std::vector<std::uint32_t>> buckets;
    auto key = [](std::int64_t bx, std::int64_t by) { return (bx << 32) ^ (by & 0xffffffff); };
    for (std::size_t n = 0; n < cloud.points.size(); ++n) {
        const auto& p = cloud.points[n];
        buckets[key(bucket_of(p.x, ox), bucket_of(p.y, oy))].push_back(static_cast<std::uint32_t>(n));
    }

    for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
        const auto& b = blocks[bi];
        const std::int64_t x0 = bucket_of(b.origin_x, ox) - 1;
        const std::int64_t x1 = bucket_of(b.origin_x + b.side, ox) + 1;
        const std::int64_t y0 = bucket_of(b.origin_y, oy) - 1;
        const std::int64_t y1 = bucket_of(b.origin_y + b.side, oy) + 1;
        auto& dst = out[bi];
        for (std::int64_t bx = x0; bx <= x1; ++bx) {
            for (std::int64_t by = y0; by <= y1; ++by) {
                const auto it = buckets.find(key(bx, by));
                if (it == buckets.end()) {
                    continue;
                }
                for (const auto n : it->second) {
                    if (b.contains(cloud.points[n].x, cloud.points[n].y)) {
                        dst.push_back(n);
                    }
                }
            }
        }
        std::sort(dst.begin(), dst.end());
    }
    return out;
}

CellTable build_cell_table(const PointCloud& cloud, const SceneBounds& bounds) {
    CellTable table;
    table.bounds = bounds;
    table.point_cell.resize(cloud.size());

    const auto g = static_cast<std::uint64_t>(bounds.grid_res);
    std::unordered_map<std::uint64_t, CellId> ids;
    ids.reserve(cloud.size());
    for (std::size_t n = 0; n < cloud.size(); ++n) {
        const CellIndex c = voxelize(cloud.points[n], bounds);
        const std::uint64_t key = (static_cast<std::uint64_t>(c.i) * g + static_cast<std::uint64_t>(c.j)) * g +
                                  static_cast<std::uint64_t>(c.k);
        const auto [it, inserted] = ids.try_emplace(key, static_cast<CellId>(table.cells.size()));
        if (inserted) {
            table.cells.push_back(c);
        }
        table.point_cell[n] = it->second;
    }
    return table;
}

}  // namespace blockmerge
