// SPDX-License-Identifier: Apache-2.0

#include "blockmerge/metrics.hpp"

#include <algorithm>
#include <string>
#include <tuple>
#include <unordered_map>

#include "blockmerge/error.hpp"

namespace blockmerge {

namespace {

struct PairKeyHash {
    std::size_t operator()(const std::pair<std::int64_t, std::int64_t>& k) const noexcept {
        const auto h1 = std::hash<std::int64_t>{}(k.first);
        const auto h2 = std::hash<std::int64_t>{}(k.second);
        return h1 ^ (h2 + 0x9e3779b97f4a7c15ULL + (h1 << 6) + (h1 >> 2));
    }
};

struct Overlap {
    InstanceLabel pred;
    InstanceLabel gt;
    std::size_t inter = 0;
    double iou = 0.0;
};

// Every (pred, gt) pair sharing at least one point.
std::vector<Overlap> overlaps(const InstanceSet& pred, const InstanceSet& gt) {
    std::unordered_map<std::uint32_t, InstanceLabel> gt_of;
    gt_of.reserve(gt.total_points());
    for (const auto& [label, pts] : gt.instances()) {
        for (const auto n : pts) {
            gt_of.emplace(n, label);
        }
    }

    std::vector<Overlap> out;
    for (const auto& [plabel, ppts] : pred.instances()) {
        std::map<InstanceLabel, std::size_t> counts;
        for (const auto n : ppts) {
            const auto it = gt_of.find(n);
            if (it != gt_of.end()) {
                ++counts[it->second];
            }
        }
        for (const auto& [glabel, inter] : counts) {
            const std::size_t uni = ppts.size() + gt.instances().at(glabel).size() - inter;
            out.push_back({plabel, glabel, inter, static_cast<double>(inter) / static_cast<double>(uni)});
        }
    }
    return out;
}

std::map<InstanceLabel, int> majority_class(const InstanceSet& set, std::span<const int> point_classes) {
    std::map<InstanceLabel, int> out;
    for (const auto& [label, pts] : set.instances()) {
        std::map<int, std::size_t> votes;
        for (const auto n : pts) {
            ++votes[point_classes[n]];
        }
        int best = 0;
        std::size_t best_count = 0;
        for (const auto& [c, v] : votes) {
            if (v > best_count) {
                best = c;
                best_count = v;
            }
        }
        out[label] = best;
    }
    return out;
}

}  // namespace

InstanceSet InstanceSet::from_labels(std::span<const InstanceLabel> labels) {
    InstanceSet set;
    for (std::size_t n = 0; n < labels.size(); ++n) {
        if (labels[n].is_labelled()) {
            set.instances_[labels[n]].push_back(static_cast<std::uint32_t>(n));
        }
    }
    return set;
}

void InstanceSet::add(InstanceLabel label, std::vector<std::uint32_t> points) {
    if (label.is_unlabelled()) {
        throw Error(ErrorCode::InvalidArgument, "instance sets cannot hold Unlabelled");
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    for (const auto& [other, pts] : instances_) {
        std::vector<std::uint32_t> common;
        std::set_intersection(pts.begin(), pts.end(), points.begin(), points.end(), std::back_inserter(common));
        if (!common.empty() || other == label) {
            throw Error(ErrorCode::InvalidArgument,
                        "instance " + std::to_string(label.value()) + " overlaps instance " +
                            std::to_string(other.value()));
        }
    }
    instances_.emplace(label, std::move(points));
}

std::size_t InstanceSet::total_points() const noexcept {
    std::size_t t = 0;
    for (const auto& [label, pts] : instances_) {
        t += pts.size();
    }
    return t;
}

double iou(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
    std::vector<std::uint32_t> sa(a.begin(), a.end());
    std::vector<std::uint32_t> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    sa.erase(std::unique(sa.begin(), sa.end()), sa.end());
    sb.erase(std::unique(sb.begin(), sb.end()), sb.end());
    if (sa.empty() && sb.empty()) {
        throw Error(ErrorCode::UndefinedIoU, "IoU of two empty sets is undefined");
    }
    std::vector<std::uint32_t> common;
    std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(common));
    const std::size_t uni = sa.size() + sb.size() - common.size();
    return static_cast<double>(common.size()) / static_cast<double>(uni);
}

PrecisionRecall precision_recall(const InstanceSet& pred, const InstanceSet& gt, double iou_threshold) {
    if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "IoU threshold must lie in (0, 1]");
    }
    if (gt.empty()) {
        throw Error(ErrorCode::UndefinedRecall, "recall is undefined without ground-truth instances");
    }
    PrecisionRecall out;
    if (pred.empty()) {
        out.precision_defined = false;
        return out;
    }

    auto cands = overlaps(pred, gt);
    std::erase_if(cands, [&](const Overlap& o) { return o.iou < iou_threshold; });
    std::sort(cands.begin(), cands.end(), [](const Overlap& l, const Overlap& r) {
        return std::tie(r.iou, l.pred, l.gt) < std::tie(l.iou, r.pred, r.gt);
    });

    std::map<InstanceLabel, bool> pred_used;
    std::map<InstanceLabel, bool> gt_used;
    for (const auto& c : cands) {
        if (pred_used[c.pred] || gt_used[c.gt]) {
            continue;
        }
        pred_used[c.pred] = gt_used[c.gt] = true;
        out.matches.push_back({c.pred, c.gt, c.iou});
    }
    out.true_positives = out.matches.size();
    out.m_prec = 100.0 * static_cast<double>(out.true_positives) / static_cast<double>(pred.size());
    out.m_rec = 100.0 * static_cast<double>(out.true_positives) / static_cast<double>(gt.size());
    return out;
}

Coverage coverage(const InstanceSet& pred, const InstanceSet& gt) {
    if (gt.empty()) {
        throw Error(ErrorCode::UndefinedCoverage, "coverage is undefined without ground-truth instances");
    }
    std::map<InstanceLabel, double> best;
    for (const auto& o : overlaps(pred, gt)) {
        auto& b = best[o.gt];
        b = std::max(b, o.iou);
    }
    const double total = static_cast<double>(gt.total_points());
    Coverage out;
    for (const auto& [label, pts] : gt.instances()) {
        const auto it = best.find(label);
        const double b = it == best.end() ? 0.0 : it->second;
        out.m_cov += b;
        out.m_wcov += b * static_cast<double>(pts.size()) / total;
    }
    out.m_cov /= static_cast<double>(gt.size());
    return out;
}

MetricsReport evaluate(std::span<const InstanceLabel> pred, std::span<const InstanceLabel> gt, double iou_threshold) {
    if (pred.size() != gt.size()) {
        throw Error(ErrorCode::InvalidArgument, "prediction has " + std::to_string(pred.size()) +
                                                    " labels, ground truth has " + std::to_string(gt.size()));
    }
    const auto p = InstanceSet::from_labels(pred);
    const auto g = InstanceSet::from_labels(gt);
    const auto pr = precision_recall(p, g, iou_threshold);
    const auto cov = coverage(p, g);

    MetricsReport r;
    r.m_prec = pr.m_prec;
    r.m_rec = pr.m_rec;
    r.precision_defined = pr.precision_defined;
    r.m_cov = cov.m_cov;
    r.m_wcov = cov.m_wcov;
    r.pred_instances = p.size();
    r.gt_instances = g.size();
    r.matches = pr.matches;
    return r;
}

MetricsReport evaluate_per_class(std::span<const InstanceLabel> pred, std::span<const InstanceLabel> gt,
                                 std::span<const int> point_classes, double iou_threshold) {
    if (pred.size() != gt.size() || point_classes.size() != gt.size()) {
        throw Error(ErrorCode::InvalidArgument, "prediction, ground truth and classes differ in length");
    }
    const auto p = InstanceSet::from_labels(pred);
    const auto g = InstanceSet::from_labels(gt);
    if (g.empty()) {
        throw Error(ErrorCode::UndefinedRecall, "recall is undefined without ground-truth instances");
    }
    const auto pclass = majority_class(p, point_classes);
    const auto gclass = majority_class(g, point_classes);

    std::map<int, std::pair<InstanceSet, InstanceSet>> split;
    for (const auto& [label, pts] : g.instances()) {
        split[gclass.at(label)].second.add(label, pts);
    }
    for (const auto& [label, pts] : p.instances()) {
        split[pclass.at(label)].first.add(label, pts);
    }

    MetricsReport r;
    r.pred_instances = p.size();
    r.gt_instances = g.size();
    std::size_t prec_classes = 0;
    for (const auto& [c, sets] : split) {
        if (sets.second.empty()) {
            continue;
        }
        ClassMetrics cm;
        cm.semantic_class = c;
        cm.gt_instances = sets.second.size();
        cm.pr = precision_recall(sets.first, sets.second, iou_threshold);
        cm.cov = coverage(sets.first, sets.second);
        if (cm.pr.precision_defined) {
            r.m_prec += cm.pr.m_prec;
            ++prec_classes;
        }
        r.m_rec += cm.pr.m_rec;
        r.m_cov += cm.cov.m_cov;
        r.m_wcov += cm.cov.m_wcov;
        r.matches.insert(r.matches.end(), cm.pr.matches.begin(), cm.pr.matches.end());
        r.per_class.push_back(std::move(cm));
    }
    const auto n = static_cast<double>(r.per_class.size());
    r.m_rec /= n;
    r.m_cov /= n;
    r.m_wcov /= n;
    r.precision_defined = prec_classes > 0;
    r.m_prec = prec_classes > 0 ? r.m_prec / static_cast<double>(prec_classes) : 0.0;
    return r;
}

PartitionComparison partition_equal(std::span<const InstanceLabel> a, std::span<const InstanceLabel> b) {
    if (a.size() != b.size()) {
        throw Error(ErrorCode::InvalidArgument, "labellings differ in length");
    }
    PartitionComparison out;
    out.equal = true;
    std::unordered_map<std::int64_t, std::int64_t> ab;
    std::unordered_map<std::int64_t, std::int64_t> ba;
    std::unordered_map<std::int64_t, std::size_t> na;
    std::unordered_map<std::int64_t, std::size_t> nb;
    std::unordered_map<std::pair<std::int64_t, std::int64_t>, std::size_t, PairKeyHash> nab;
    for (std::size_t n = 0; n < a.size(); ++n) {
        const auto la = a[n].value();
        const auto lb = b[n].value();
        if (out.equal) {
            const auto [ia, fresh_a] = ab.try_emplace(la, lb);
            const auto [ib, fresh_b] = ba.try_emplace(lb, la);
            if (ia->second != lb || ib->second != la) {
                out.equal = false;
            }
        }
        ++na[la];
        ++nb[lb];
        ++nab[{la, lb}];
    }

    const auto pairs = [](std::size_t k) { return static_cast<double>(k) * static_cast<double>(k - (k > 0)) / 2.0; };
    const double total = pairs(a.size());
    if (total == 0.0) {
        out.rand_index = 1.0;
        return out;
    }
    double sum_ab = 0.0;
    double sum_a = 0.0;
    double sum_b = 0.0;
    for (const auto& [k, v] : nab) sum_ab += pairs(v);
    for (const auto& [k, v] : na) sum_a += pairs(v);
    for (const auto& [k, v] : nb) sum_b += pairs(v);
    // Agreeing pairs: together in both, or apart in both.
    out.rand_index = (total + 2.0 * sum_ab - sum_a - sum_b) / total;
    return out;
}

}  // namespace blockmerge
