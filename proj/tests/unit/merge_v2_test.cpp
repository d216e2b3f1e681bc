// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "blockmerge/merge_v1.hpp"
#include "blockmerge/merge_v2.hpp"
#include "blockmerge/synthetic.hpp"
#include "fixtures.hpp"

namespace blockmerge {
namespace {

using testing::block;
using testing::cell_ids;
using testing::line_table;
using testing::range;

void fill(VoxelLabelGrid& grid, CellId begin, CellId end, std::int64_t label) {
    for (CellId c = begin; c < end; ++c) {
        grid.assign(c, InstanceLabel{label});
    }
}

TEST(DefaultTau2, PerGridResolution) {
    EXPECT_EQ(default_tau2(400), 110);
    EXPECT_EQ(default_tau2(500), 50);
    EXPECT_EQ(default_tau2(123), 110);
}

TEST(AssignInstanceLabels, AdoptsModeAndRecordsHistogram) {
    const auto t = line_table(50);
    MergeStateV2 state(t);
    fill(state.grid, 0, 40, 5);
    state.counter = GroupCounter(10);
    const auto cells = cell_ids(range(0, 50));
    EXPECT_EQ(assign_instance_labels(state, cells, {25, 110, 400}), InstanceLabel{5});
    ASSERT_EQ(state.tables.size(), 1u);
    EXPECT_EQ(state.tables[0].count(InstanceLabel{5}), 50u);
    EXPECT_EQ(state.tables[0].size(), 1u);
}

TEST(AssignInstanceLabels, FreshLabelWithoutHistory) {
    const auto t = line_table(8);
    MergeStateV2 state(t);
    state.counter = GroupCounter(3);
    const auto cells = cell_ids(range(0, 8));
    EXPECT_EQ(assign_instance_labels(state, cells, {25, 110, 400}), InstanceLabel{3});
    EXPECT_EQ(state.tables[0].count(InstanceLabel{3}), 8u);
    EXPECT_EQ(state.counter.next(), 4);
}

TEST(AssignInstanceLabels, ModeOfTwoLabelsAndBothRecorded) {
    const auto t = line_table(110);
    MergeStateV2 state(t);
    fill(state.grid, 0, 40, 5);
    fill(state.grid, 40, 100, 9);
    state.counter = GroupCounter(10);
    const auto cells = cell_ids(range(0, 110));
    EXPECT_EQ(assign_instance_labels(state, cells, {25, 110, 400}), InstanceLabel{9});
    EXPECT_EQ(state.tables[0].count(InstanceLabel{5}), 40u);
    EXPECT_EQ(state.tables[0].count(InstanceLabel{9}), 70u);
}

// Grid: cells 0..39 labelled 5 and 40..99 labelled 9 (one instance), plus
// cells 100..119 labelled 5 elsewhere in the scene.
MergeStateV2 two_label_state(const CellTable& t) {
    MergeStateV2 state(t);
    fill(state.grid, 0, 40, 5);
    fill(state.grid, 40, 100, 9);
    fill(state.grid, 100, 120, 5);
    state.counter = GroupCounter(10);
    LabelHistogram h;
    h.add(InstanceLabel{9}, 60);
    h.add(InstanceLabel{5}, 40);
    state.tables.push_back(h);
    return state;
}

TEST(PropagateLabels, RewritesGloballyAboveTau2) {
    const auto t = line_table(120);
    auto state = two_label_state(t);
    const auto stats = propagate_labels(state, {25, 30, 400});
    EXPECT_EQ(stats.rewrites, 1u);
    EXPECT_EQ(stats.rewritten_cells, 60u);
    for (CellId c = 0; c < 120; ++c) {
        EXPECT_EQ(state.grid.label(c), InstanceLabel{9}) << c;
    }
}

TEST(PropagateLabels, NoRewriteAtOrBelowTau2) {
    const auto t = line_table(120);
    for (const std::int64_t tau2 : {40, 50}) {
        auto state = two_label_state(t);
        const auto stats = propagate_labels(state, {25, tau2, 400});
        EXPECT_EQ(stats.rewrites, 0u) << tau2;
        EXPECT_EQ(state.grid.label(0), InstanceLabel{5});
        EXPECT_EQ(state.grid.label(110), InstanceLabel{5});
    }
}

TEST(PropagateLabels, InfiniteTau2IsANoOp) {
    const auto t = line_table(120);
    auto state = two_label_state(t);
    state.tables[0].add(InstanceLabel{5}, 1000000);
    const auto before = std::vector<InstanceLabel>(state.grid.labels().begin(), state.grid.labels().end());
    const auto stats = propagate_labels(state, {25, kInfiniteTau, 400});
    EXPECT_EQ(stats.rewrites, 0u);
    EXPECT_TRUE(std::equal(before.begin(), before.end(), state.grid.labels().begin()));
}

TEST(PropagateLabels, ZeroTau2MergesEveryCoOccurringLabel) {
    const auto t = line_table(10);
    MergeStateV2 state(t);
    fill(state.grid, 0, 8, 1);
    fill(state.grid, 8, 9, 2);
    fill(state.grid, 9, 10, 3);
    LabelHistogram h;
    h.add(InstanceLabel{1}, 8);
    h.add(InstanceLabel{2}, 1);
    h.add(InstanceLabel{3}, 1);
    state.tables.push_back(h);
    propagate_labels(state, {25, 0, 400});
    EXPECT_EQ(state.grid.distinct_labels(), 1u);
}

TEST(PropagateLabels, LaterHistogramsSeeEarlierRewrites) {
    // Instance A rewrites 5 -> 9. Instance B saw {5:20, 7:10}; after folding
    // its mode is 9, so 7 is rewritten to 9 as well.
    const auto t = line_table(130);
    auto state = two_label_state(t);
    fill(state.grid, 120, 130, 7);
    LabelHistogram b;
    b.add(InstanceLabel{5}, 20);
    b.add(InstanceLabel{7}, 10);
    state.tables.push_back(b);
    const auto stats = propagate_labels(state, {25, 5, 400});
    EXPECT_EQ(stats.rewrites, 2u);
    EXPECT_EQ(state.tables[1].count(InstanceLabel{9}), 20u);
    EXPECT_EQ(state.grid.distinct_labels(), 1u);
    EXPECT_EQ(state.grid.label(125), InstanceLabel{9});
}

TEST(RunV2, SingleBlockMatchesV1) {
    const auto t = line_table(6);
    const std::vector<BlockPrediction> preds{block(0, {{3, range(0, 2)}, {1, range(2, 6)}})};
    EXPECT_EQ(run_v2(t, preds, {25, 0, 400}).labels, run_v1(t, preds, {}).labels);
}

TEST(RunV2, ReunitesFragmentsThroughALaterInstance) {
    // Blocks 0 and 1 label two disjoint halves 0 and 1; block 2 sees an
    // instance covering both halves.
    const auto t = line_table(20);
    const std::vector<BlockPrediction> preds{
        block(0, {{0, range(0, 10)}}),
        block(1, {{0, range(10, 20)}}),
        block(2, {{3, range(4, 16)}}),
    };
    EXPECT_EQ(testing::distinct(run_v1(t, preds, {0, 400}).labels).size(), 2u);
    const auto r = run_v2(t, preds, {0, 5, 400});
    EXPECT_EQ(testing::distinct(r.labels).size(), 1u);
    EXPECT_EQ(r.diagnostics.rewrites, 1u);
    // Both halves counted 6 cells; the tie goes to the smaller label.
    EXPECT_EQ(r.labels[0], InstanceLabel{0});
}

TEST(RunV2, UnifiesTheSofaScenario) {
    const auto s = fig1_scenario();
    const auto blocks = partition_blocks(compute_bounds(s.cloud, 400), s.block_side, s.stride);
    const auto preds = simulate_block_predictor(s.cloud, blocks, s.cloud.gt_labels, {}, 0);
    const auto r = run_v2(s.cloud, preds, {25, 110, 400});
    std::vector<std::uint32_t> sofa;
    for (std::uint32_t n = 0; n < s.cloud.size(); ++n) {
        if (s.cloud.gt_labels[n] == s.sofa) {
            sofa.push_back(n);
        }
    }
    EXPECT_EQ(testing::distinct_on(r.labels, sofa).size(), 1u);
}

TEST(FinalizePointLabels, ProjectsCellsAndCountsUnlabelled) {
    CellTable t = line_table(3);
    t.point_cell = {0, 0, 1, 2};
    VoxelLabelGrid grid(3, 400);
    grid.assign(0, InstanceLabel{4});
    grid.assign(1, InstanceLabel{6});
    const auto r = finalize_point_labels(grid, t);
    EXPECT_EQ(r.labels[0], r.labels[1]);
    EXPECT_EQ(r.labels[2], InstanceLabel{6});
    EXPECT_EQ(r.labels[3], kUnlabelled);
    EXPECT_EQ(r.diagnostics.unlabelled_points, 1u);
    EXPECT_EQ(r.diagnostics.distinct_labels, 2u);
}

TEST(FinalizePointLabels, AllLabelled) {
    const auto t = line_table(4);
    VoxelLabelGrid grid(4, 400);
    fill(grid, 0, 4, 0);
    EXPECT_EQ(finalize_point_labels(grid, t).diagnostics.unlabelled_points, 0u);
}

}  // namespace
}  // namespace blockmerge
