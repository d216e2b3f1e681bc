// SPDX-License-Identifier: Apache-2.0

#ifndef BLOCKMERGE_TESTS_FIXTURES_HPP
#define BLOCKMERGE_TESTS_FIXTURES_HPP

#include <cstdint>
#include <initializer_list>
#include <map>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "blockmerge/grid.hpp"
#include "blockmerge/scene.hpp"

namespace blockmerge::testing {

// n cells in a row holding one point each, so point n lies in cell n.
inline CellTable line_table(std::size_t n, int grid_res = 400) {
    CellTable t;
    t.bounds.grid_res = grid_res;
    for (std::size_t i = 0; i < n; ++i) {
        t.cells.push_back({static_cast<std::int32_t>(i), 0, 0});
        t.point_cell.push_back(static_cast<CellId>(i));
    }
    return t;
}

inline std::vector<std::uint32_t> range(std::uint32_t begin, std::uint32_t end) {
    std::vector<std::uint32_t> out;
    for (auto i = begin; i < end; ++i) {
        out.push_back(i);
    }
    return out;
}

inline BlockPrediction block(int ordinal, std::vector<LocalInstance> instances) {
    BlockPrediction p;
    p.block.ordinal = ordinal;
    p.instances = std::move(instances);
    return p;
}

inline std::vector<CellId> cell_ids(std::span<const std::uint32_t> points) {
    return {points.begin(), points.end()};
}

template <typename Labels>
std::set<std::int64_t> distinct(const Labels& labels) {
    std::set<std::int64_t> out;
    for (const auto& l : labels) {
        if (l.is_labelled()) {
            out.insert(l.value());
        }
    }
    return out;
}

template <typename Labels>
std::set<std::int64_t> distinct_on(const Labels& labels, std::span<const std::uint32_t> points) {
    std::set<std::int64_t> out;
    for (const auto n : points) {
        if (labels[n].is_labelled()) {
            out.insert(labels[n].value());
        }
    }
    return out;
}

}  // namespace blockmerge::testing

#endif  // BLOCKMERGE_TESTS_FIXTURES_HPP
