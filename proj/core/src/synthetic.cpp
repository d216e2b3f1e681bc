// SPDX-License-Identifier: Apache-2.0

#include "blockmerge/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>

#include <boost/pending/disjoint_sets.hpp>

#include "blockmerge/error.hpp"

namespace blockmerge {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Vec3 sample_in(const Box& b, Rng& rng) {
    return {rng.uniform(b.lo.x, b.hi.x), rng.uniform(b.lo.y, b.hi.y), rng.uniform(b.lo.z, b.hi.z)};
}

double dist2(const Point& a, const Point& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return dx * dx + dy * dy + dz * dz;
}

void validate_spec(const SceneSpec& spec) {
    std::set<std::int64_t> ids;
    for (const auto& s : spec.shapes) {
        const std::string name = "shape " + std::to_string(s.id);
        if (s.id < 0 || !ids.insert(s.id).second) {
            throw Error(ErrorCode::SpecError, name + ": ids must be unique and non-negative");
        }
        if (!(s.density > 0.0)) {
            throw Error(ErrorCode::SpecError, name + ": density must be positive");
        }
        if (s.parts.empty()) {
            throw Error(ErrorCode::SpecError, name + ": has no parts");
        }
        for (const auto& p : s.parts) {
            if (!(p.volume() > 0.0)) {
                throw Error(ErrorCode::SpecError, name + ": part has no volume");
            }
            if (!p.inside(spec.room)) {
                throw Error(ErrorCode::SpecError, name + ": part leaves the room");
            }
        }
    }
    for (std::size_t a = 0; a < spec.shapes.size(); ++a) {
        for (std::size_t b = a; b < spec.shapes.size(); ++b) {
            const auto& pa = spec.shapes[a].parts;
            const auto& pb = spec.shapes[b].parts;
            for (std::size_t i = 0; i < pa.size(); ++i) {
                for (std::size_t j = (a == b ? i + 1 : 0); j < pb.size(); ++j) {
                    if (pa[i].intersects(pb[j])) {
                        throw Error(ErrorCode::SpecError, "shapes " + std::to_string(spec.shapes[a].id) + " and " +
                                                              std::to_string(spec.shapes[b].id) + " overlap");
                    }
                }
            }
        }
    }
}

// Neighbour lookup for boundary jitter within one block.
class PointHash {
public:
    PointHash(const PointCloud& cloud, std::span<const std::uint32_t> points, double cell)
        : cloud_(cloud), inv_(1.0 / cell) {
        for (const auto n : points) {
            buckets_[key(cloud.points[n])].push_back(n);
        }
    }

    // Nearest point within `radius` labelled differently from point n, if any.
    std::optional<std::uint32_t> nearest_other(std::uint32_t n, std::span<const InstanceLabel> labels,
                                               double radius) const {
        const auto& p = cloud_.points[n];
        const auto [ci, cj, ck] = coords(p);
        std::optional<std::uint32_t> best;
        double best_d2 = radius * radius;
        for (std::int64_t di = -1; di <= 1; ++di) {
            for (std::int64_t dj = -1; dj <= 1; ++dj) {
                for (std::int64_t dk = -1; dk <= 1; ++dk) {
                    const auto it = buckets_.find(pack(ci + di, cj + dj, ck + dk));
                    if (it == buckets_.end()) {
                        continue;
                    }
                    for (const auto m : it->second) {
                        if (labels[m] == labels[n]) {
                            continue;
                        }
                        const double d2 = dist2(p, cloud_.points[m]);
                        if (d2 <= best_d2 && (!best || d2 < best_d2 || m < *best)) {
                            best = m;
                            best_d2 = d2;
                        }
                    }
                }
            }
        }
        return best;
    }

private:
    std::array<std::int64_t, 3> coords(const Point& p) const {
        return {static_cast<std::int64_t>(std::floor(p.x * inv_)), static_cast<std::int64_t>(std::floor(p.y * inv_)),
                static_cast<std::int64_t>(std::floor(p.z * inv_))};
    }
    static std::uint64_t pack(std::int64_t i, std::int64_t j, std::int64_t k) {
        return (static_cast<std::uint64_t>(i & 0x1fffff) << 42) | (static_cast<std::uint64_t>(j & 0x1fffff) << 21) |
               static_cast<std::uint64_t>(k & 0x1fffff);
    }
    std::uint64_t key(const Point& p) const {
        const auto [i, j, k] = coords(p);
        return pack(i, j, k);
    }

    const PointCloud& cloud_;
    double inv_;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets_;
};

// Splits `points` at the median of their projection on a random direction.
std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>> split_by_plane(const PointCloud& cloud,
                                                                                std::vector<std::uint32_t> points,
                                                                                Rng& rng) {
    const double z = rng.uniform(-1.0, 1.0);
    const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const Vec3 normal{r * std::cos(phi), r * std::sin(phi), z};
    auto proj = [&](std::uint32_t n) {
        const auto& p = cloud.points[n];
        return p.x * normal.x + p.y * normal.y + p.z * normal.z;
    };
    std::sort(points.begin(), points.end(), [&](std::uint32_t a, std::uint32_t b) {
        const double pa = proj(a);
        const double pb = proj(b);
        return pa < pb || (pa == pb && a < b);
    });
    const auto half = points.begin() + static_cast<std::ptrdiff_t>(points.size() / 2);
    std::vector<std::uint32_t> lo(points.begin(), half);
    std::vector<std::uint32_t> hi(half, points.end());
    std::sort(lo.begin(), lo.end());
    std::sort(hi.begin(), hi.end());
    return {std::move(lo), std::move(hi)};
}

}  // namespace

std::uint64_t Rng::below(std::uint64_t n) {
    // Rejection keeps the result unbiased for any n.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x = engine_();
    while (x >= limit) {
        x = engine_();
    }
    return x % n;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

double Box::volume() const noexcept {
    return std::max(0.0, hi.x - lo.x) * std::max(0.0, hi.y - lo.y) * std::max(0.0, hi.z - lo.z);
}

bool Box::intersects(const Box& o) const noexcept {
    return lo.x < o.hi.x && o.lo.x < hi.x && lo.y < o.hi.y && o.lo.y < hi.y && lo.z < o.hi.z && o.lo.z < hi.z;
}

bool Box::inside(const Box& c, double tol) const noexcept {
    return lo.x >= c.lo.x - tol && lo.y >= c.lo.y - tol && lo.z >= c.lo.z - tol && hi.x <= c.hi.x + tol &&
           hi.y <= c.hi.y + tol && hi.z <= c.hi.z + tol;
}

Box Box::inflated(double m) const noexcept {
    return {{lo.x - m, lo.y - m, lo.z - m}, {hi.x + m, hi.y + m, hi.z + m}};
}

ShapeSpec make_box(std::int64_t id, const Box& box, double density) {
    return {id, {box}, density};
}

ShapeSpec make_l_shape(std::int64_t id, const Box& f, double t, double density) {
    ShapeSpec s{id, {}, density};
    s.parts.push_back({{f.lo.x, f.lo.y, f.lo.z}, {f.hi.x, f.lo.y + t, f.hi.z}});
    s.parts.push_back({{f.lo.x, f.lo.y + t, f.lo.z}, {f.lo.x + t, f.hi.y, f.hi.z}});
    return s;
}

ShapeSpec make_u_shape(std::int64_t id, const Box& f, double t, double density) {
    ShapeSpec s{id, {}, density};
    s.parts.push_back({{f.lo.x, f.hi.y - t, f.lo.z}, {f.hi.x, f.hi.y, f.hi.z}});
    s.parts.push_back({{f.lo.x, f.lo.y, f.lo.z}, {f.lo.x + t, f.hi.y - t, f.hi.z}});
    s.parts.push_back({{f.hi.x - t, f.lo.y, f.lo.z}, {f.hi.x, f.hi.y - t, f.hi.z}});
    return s;
}

PointCloud generate_scene(const SceneSpec& spec) {
    validate_spec(spec);
    Rng rng(spec.seed);
    PointCloud cloud;
    for (const auto& shape : spec.shapes) {
        for (const auto& part : shape.parts) {
            const auto count = static_cast<std::size_t>(std::llround(shape.density * part.volume()));
            for (std::size_t i = 0; i < count; ++i) {
                Point p = sample_in(part, rng);
                if (spec.position_jitter > 0.0) {
                    const double j = spec.position_jitter;
                    p.x = std::clamp(p.x + rng.uniform(-j, j), spec.room.lo.x, spec.room.hi.x);
                    p.y = std::clamp(p.y + rng.uniform(-j, j), spec.room.lo.y, spec.room.hi.y);
                    p.z = std::clamp(p.z + rng.uniform(-j, j), spec.room.lo.z, spec.room.hi.z);
                }
                cloud.points.push_back(p);
                cloud.gt_labels.emplace_back(shape.id);
            }
        }
    }
    return cloud;
}

void PredictorNoise::validate() const {
    auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!unit(fragmentation) || !unit(jitter) || !unit(dropout)) {
        throw Error(ErrorCode::InvalidArgument, "predictor noise probabilities must lie in [0, 1]");
    }
    if (!(jitter_radius > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "jitter radius must be positive");
    }
}

std::vector<BlockPrediction> simulate_block_predictor(const PointCloud& cloud, std::span<const Block> blocks,
                                                      std::span<const InstanceLabel> gt_labels,
                                                      const PredictorNoise& noise, std::uint64_t seed) {
    noise.validate();
    if (gt_labels.size() != cloud.size()) {
        throw Error(ErrorCode::InvalidArgument, "simulated predictor needs one gt label per point");
    }
    const auto block_points = assign_points_to_blocks(cloud, blocks);
    std::vector<BlockPrediction> preds(blocks.size());

    for (std::size_t b = 0; b < blocks.size(); ++b) {
        Rng rng(derive_seed(seed, b));
        auto& pred = preds[b];
        pred.block = blocks[b];

        std::vector<std::uint32_t> kept;
        kept.reserve(block_points[b].size());
        for (const auto n : block_points[b]) {
            if (gt_labels[n].is_labelled() && !(noise.dropout > 0.0 && rng.bernoulli(noise.dropout))) {
                kept.push_back(n);
            }
        }

        // Per-point predicted gt; jitter looks at the true labels only.
        std::map<InstanceLabel, std::vector<std::uint32_t>> groups;
        std::optional<PointHash> hash;
        if (noise.jitter > 0.0) {
            hash.emplace(cloud, kept, noise.jitter_radius);
        }
        for (const auto n : kept) {
            InstanceLabel label = gt_labels[n];
            if (hash && rng.bernoulli(noise.jitter)) {
                if (const auto other = hash->nearest_other(n, gt_labels, noise.jitter_radius)) {
                    label = gt_labels[*other];
                }
            }
            groups[label].push_back(n);
        }

        std::vector<std::vector<std::uint32_t>> locals;
        for (auto& [label, pts] : groups) {
            if (pts.size() >= 2 && noise.fragmentation > 0.0 && rng.bernoulli(noise.fragmentation)) {
                auto [lo, hi] = split_by_plane(cloud, std::move(pts), rng);
                locals.push_back(std::move(lo));
                locals.push_back(std::move(hi));
            } else {
                locals.push_back(std::move(pts));
            }
        }

        std::vector<std::int64_t> ids(locals.size());
        std::iota(ids.begin(), ids.end(), 0);
        for (std::size_t i = ids.size(); i > 1; --i) {
            std::swap(ids[i - 1], ids[rng.below(i)]);
        }
        pred.instances.resize(locals.size());
        for (std::size_t i = 0; i < locals.size(); ++i) {
            pred.instances[static_cast<std::size_t>(ids[i])] = {ids[i], std::move(locals[i])};
        }
    }
    return preds;
}

std::vector<InstanceLabel> oracle_merge(const PointCloud& cloud, std::span<const BlockPrediction> preds,
                                        const SceneBounds& bounds) {
    std::vector<InstanceLabel> out(cloud.size());
    if (cloud.empty()) {
        return out;
    }
    const CellTable table = build_cell_table(cloud, bounds);

    std::size_t num_nodes = 0;
    for (const auto& p : preds) {
        num_nodes += p.instances.size();
    }
    boost::disjoint_sets_with_storage<> sets(num_nodes);
    for (std::size_t v = 0; v < num_nodes; ++v) {
        sets.make_set(v);
    }

    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> owner(table.num_cells(), kNone);
    std::size_t node = 0;
    for (const auto& p : preds) {
        for (const auto& inst : p.instances) {
            for (const auto n : inst.points) {
                auto& o = owner[table.point_cell[n]];
                if (o == kNone) {
                    o = node;
                } else {
                    sets.union_set(o, node);
                }
            }
            ++node;
        }
    }

    // Every node touching a cell was unioned with the cell's owner, so each
    // covered cell maps to exactly one component and no point is contested.
    std::unordered_map<std::size_t, std::int64_t> compact;
    for (std::size_t n = 0; n < cloud.size(); ++n) {
        const std::size_t o = owner[table.point_cell[n]];
        if (o == kNone) {
            continue;
        }
        const auto root = sets.find_set(o);
        const auto [it, fresh] = compact.try_emplace(root, static_cast<std::int64_t>(compact.size()));
        out[n] = InstanceLabel{it->second};
    }
    return out;
}

Fig1Scenario fig1_scenario() {
    constexpr double kDensity = 20000.0;
    constexpr double kSeatTop = 0.8;

    Fig1Scenario s;
    s.spec.room = {{0.0, 0.0, 0.0}, {4.0, 2.0, 2.0}};
    s.spec.seed = 1;
    s.sofa = InstanceLabel{0};

    // Sofa: back bar along +y with a long right arm and two short legs. The
    // middle leg (x 2.6..2.9) is first seen by block 8 in its unlabelled
    // strip y >= 1.0; the left leg (x 1.6..1.9) is first seen by block 10.
    ShapeSpec sofa{0, {}, kDensity};
    sofa.parts.push_back({{1.6, 1.6, 0.0}, {3.9, 1.9, kSeatTop}});   // back
    sofa.parts.push_back({{3.53, 0.1, 0.0}, {3.9, 1.6, kSeatTop}});  // right arm
    sofa.parts.push_back({{2.6, 1.05, 0.0}, {2.9, 1.6, kSeatTop}});  // middle leg
    sofa.parts.push_back({{1.6, 1.05, 0.0}, {1.9, 1.6, kSeatTop}});  // left leg
    s.spec.shapes.push_back(std::move(sofa));

    s.spec.shapes.push_back(make_box(1, {{0.0, 0.0, 0.0}, {0.45, 0.45, 1.2}}, kDensity));   // cabinet
    s.spec.shapes.push_back(make_box(2, {{0.2, 1.3, 0.4}, {1.2, 1.95, 0.75}}, kDensity));   // table
    s.spec.shapes.push_back(make_box(3, {{1.5, 0.1, 0.0}, {3.2, 0.45, 1.8}}, kDensity));    // shelf

    s.cloud = generate_scene(s.spec);
    return s;
}

SceneSpec random_room(std::uint64_t seed, const CorpusOptions& options) {
    if (options.min_instances < 1 || options.max_instances < options.min_instances) {
        throw Error(ErrorCode::InvalidArgument, "invalid instance count range");
    }
    Rng rng(derive_seed(seed, 0x726f6f6d));
    SceneSpec spec;
    spec.seed = derive_seed(seed, 1);
    const double width = rng.uniform(4.0, 6.0);
    const double depth = rng.uniform(4.0, 6.0);
    const double height = 3.0;
    spec.room = {{0.0, 0.0, 0.0}, {width, depth, height}};

    const auto span = static_cast<std::uint64_t>(options.max_instances - options.min_instances + 1);
    const int wanted = options.min_instances + static_cast<int>(rng.below(span));

    std::vector<Box> occupied;
    std::int64_t next_id = 0;
    if (options.walls) {
        constexpr double t = 0.15;
        const double g = options.gap;
        const std::array<Box, 4> walls{{
            {{0.0, 0.0, 0.0}, {width - t - g, t, height}},
            {{width - t, 0.0, 0.0}, {width, depth - t - g, height}},
            {{t + g, depth - t, 0.0}, {width, depth, height}},
            {{0.0, t + g, 0.0}, {t, depth, height}},
        }};
        for (const auto& w : walls) {
            spec.shapes.push_back(make_box(next_id++, w, 1.0));
            occupied.push_back(w);
        }
    }
    if (options.floor) {
        const double inner = options.walls ? 0.15 + options.gap : 0.0;
        const Box slab{{inner, inner, 0.0}, {width - inner, depth - inner, 0.05}};
        spec.shapes.push_back(make_box(next_id++, slab, 1.0));
        occupied.push_back(slab);
    }
    const std::size_t structural = spec.shapes.size();
    const double floor_top = options.floor ? 0.05 + options.gap : 0.0;

    auto fits = [&](const Box& b) {
        if (!b.inside(spec.room)) {
            return false;
        }
        const Box padded = b.inflated(options.gap);
        return std::none_of(occupied.begin(), occupied.end(), [&](const Box& o) { return padded.intersects(o); });
    };

    for (int placed = 0; placed < wanted; ++placed) {
        const std::int64_t id = next_id++;
        const bool concave = options.concave_shapes && rng.bernoulli(0.3);
        for (int attempt = 0; attempt < 2000; ++attempt) {
            const double sx = concave ? rng.uniform(1.2, 2.2) : rng.uniform(0.3, 1.4);
            const double sy = concave ? rng.uniform(1.2, 2.2) : rng.uniform(0.3, 1.4);
            const double sz = rng.uniform(0.3, 1.4);
            const double x0 = rng.uniform(0.0, width - sx);
            const double y0 = rng.uniform(0.0, depth - sy);
            const double z0 = rng.bernoulli(0.7) ? floor_top : rng.uniform(floor_top, height - sz);
            const Box footprint{{x0, y0, z0}, {x0 + sx, y0 + sy, z0 + sz}};
            ShapeSpec shape;
            if (!concave) {
                shape = make_box(id, footprint, 1.0);
            } else {
                const double t = rng.uniform(0.3, 0.45);
                shape = rng.bernoulli(0.5) ? make_u_shape(id, footprint, t, 1.0) : make_l_shape(id, footprint, t, 1.0);
            }
            if (!std::all_of(shape.parts.begin(), shape.parts.end(), fits)) {
                continue;
            }
            occupied.insert(occupied.end(), shape.parts.begin(), shape.parts.end());
            spec.shapes.push_back(std::move(shape));
            break;
        }
    }
    if (static_cast<int>(spec.shapes.size() - structural) < options.min_instances) {
        throw Error(ErrorCode::SpecError, "could not place " + std::to_string(options.min_instances) + " instances");
    }

    double volume = 0.0;
    for (const auto& s : spec.shapes) {
        for (const auto& p : s.parts) {
            volume += p.volume();
        }
    }
    const double density = static_cast<double>(options.target_points) / volume;
    for (auto& s : spec.shapes) {
        s.density = density;
    }
    return spec;
}

}  // namespace blockmerge
