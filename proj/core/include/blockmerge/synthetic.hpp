// SPDX-License-Identifier: Apache-2.0

#ifndef BLOCKMERGE_SYNTHETIC_HPP
#define BLOCKMERGE_SYNTHETIC_HPP

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "blockmerge/grid.hpp"
#include "blockmerge/labels.hpp"
#include "blockmerge/scene.hpp"

namespace blockmerge {

// Seeded generator with a platform-independent output sequence (the standard
// distributions are implementation-defined, so conversions are done here).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // Uniform integer in [0, n); n > 0.
    std::uint64_t below(std::uint64_t n);
    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

// Mixes a base seed with a stream index into an independent seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

struct Box {
    Vec3 lo;
    Vec3 hi;

    double volume() const noexcept;
    // Positive-volume overlap; touching faces do not count.
    bool intersects(const Box& other) const noexcept;
    bool inside(const Box& container, double tol = 1e-9) const noexcept;
    Box inflated(double margin) const noexcept;
};

// One ground-truth object, made of pairwise disjoint boxes.
struct ShapeSpec {
    std::int64_t id = 0;
    std::vector<Box> parts;
    double density = 1000.0;  // points per cubic metre
};

ShapeSpec make_box(std::int64_t id, const Box& box, double density);
// Two bars meeting at the (x0, y0) corner of `footprint`; `thickness` is the
// bar width in the ground plane.
ShapeSpec make_l_shape(std::int64_t id, const Box& footprint, double thickness, double density);
// A bar along the top (max y) edge of `footprint` with two legs hanging down
// from its ends.
ShapeSpec make_u_shape(std::int64_t id, const Box& footprint, double thickness, double density);

struct SceneSpec {
    Box room{{0.0, 0.0, 0.0}, {4.0, 4.0, 3.0}};
    std::vector<ShapeSpec> shapes;
    // Uniform per-coordinate perturbation of sampled points (metres), clamped
    // to the room.
    double position_jitter = 0.0;
    std::uint64_t seed = 0;
};

// Samples round(density * volume) uniform points per part; gt label = shape
// id. Throws SpecError for overlapping shapes, shapes leaving the room,
// duplicate or negative ids, or non-positive densities.
PointCloud generate_scene(const SceneSpec& spec);

struct PredictorNoise {
    // Probability that an instance's in-block points are split in two by a
    // random plane through their median.
    double fragmentation = 0.0;
    // Probability that a point with another instance within `jitter_radius`
    // is reassigned to the nearest such instance.
    double jitter = 0.0;
    // Fraction of points left out of every instance.
    double dropout = 0.0;
    double jitter_radius = 0.1;

    void validate() const;
};

// Stand-in for a per-block segmentation network. Each gt instance present in
// a block becomes one local instance (before noise) with a randomly permuted
// block-local id, so ids never agree across blocks. One prediction is emitted
// per block, in block order, even if it has no instances.
std::vector<BlockPrediction> simulate_block_predictor(const PointCloud& cloud, std::span<const Block> blocks,
                                                      std::span<const InstanceLabel> gt_labels,
                                                      const PredictorNoise& noise, std::uint64_t seed);

// Order-free reference merge: (block, local instance) nodes are joined
// whenever they touch a common voxel cell; each connected component becomes
// one instance, and points take the component of their cell. Points in cells
// no prediction touches stay Unlabelled.
std::vector<InstanceLabel> oracle_merge(const PointCloud& cloud, std::span<const BlockPrediction> preds,
                                        const SceneBounds& bounds);

// Room with a U-shaped sofa whose middle leg is first seen by the block at
// ordinal `blue_block` (1 m blocks, 0.5 m stride) without touching any cell
// labelled by earlier blocks, so the sequential baseline mints a new group
// for it.
struct Fig1Scenario {
    SceneSpec spec;
    PointCloud cloud;
    InstanceLabel sofa;
    int blue_block = 8;
    double block_side = 1.0;
    double stride = 0.5;
};

Fig1Scenario fig1_scenario();

struct CorpusOptions {
    std::size_t target_points = 100000;
    int min_instances = 5;
    int max_instances = 15;
    // Replace some boxes with L and U shapes.
    bool concave_shapes = false;
    // Add four perimeter wall instances (and a floor slab when `floor` is
    // set). These span many blocks, like the structural classes of real
    // indoor scans.
    bool walls = false;
    bool floor = false;
    // Minimum clearance between instances (metres).
    double gap = 0.05;
};

// Random furnished room: disjoint axis-aligned instances, uniform density
// chosen so the cloud has about `target_points` points.
SceneSpec random_room(std::uint64_t seed, const CorpusOptions& options = {});

}  // namespace blockmerge

#endif  // BLOCKMERGE_SYNTHETIC_HPP
