// SPDX-License-Identifier: Apache-2.0

#ifndef BLOCKMERGE_METRICS_HPP
#define BLOCKMERGE_METRICS_HPP

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "blockmerge/labels.hpp"

namespace blockmerge {

// Evaluation view of a labelling: label -> sorted point indices. Unlabelled
// points are not part of any instance.
class InstanceSet {
public:
    InstanceSet() = default;

    static InstanceSet from_labels(std::span<const InstanceLabel> labels);

    // Throws InvalidArgument if the point set overlaps an existing instance
    // or the label is Unlabelled.
    void add(InstanceLabel label, std::vector<std::uint32_t> points);

    const std::map<InstanceLabel, std::vector<std::uint32_t>>& instances() const noexcept { return instances_; }
    std::size_t size() const noexcept { return instances_.size(); }
    bool empty() const noexcept { return instances_.empty(); }
    std::size_t total_points() const noexcept;

private:
    std::map<InstanceLabel, std::vector<std::uint32_t>> instances_;
};

// |a ∩ b| / |a ∪ b|. Inputs need not be sorted. Throws UndefinedIoU when both
// are empty.
double iou(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);

struct InstanceMatch {
    InstanceLabel pred;
    InstanceLabel gt;
    double iou = 0.0;
};

struct PrecisionRecall {
    double m_prec = 0.0;  // percent
    double m_rec = 0.0;   // percent
    bool precision_defined = true;
    std::size_t true_positives = 0;
    std::vector<InstanceMatch> matches;
};

// Greedy one-to-one matching by descending IoU (ties: smaller pred label, then
// smaller gt label); a pair counts when IoU >= iou_threshold.
// Throws UndefinedRecall for an empty ground truth.
PrecisionRecall precision_recall(const InstanceSet& pred, const InstanceSet& gt, double iou_threshold = 0.5);

struct Coverage {
    double m_cov = 0.0;   // fraction
    double m_wcov = 0.0;  // fraction
};

// Mean best IoU per gt instance, plain and weighted by gt point count.
// Throws UndefinedCoverage for an empty ground truth.
Coverage coverage(const InstanceSet& pred, const InstanceSet& gt);

struct ClassMetrics {
    int semantic_class = 0;
    std::size_t gt_instances = 0;
    PrecisionRecall pr;
    Coverage cov;
};

struct MetricsReport {
    double m_prec = 0.0;  // percent
    double m_rec = 0.0;   // percent
    double m_cov = 0.0;   // fraction, multiply by 100 for tables
    double m_wcov = 0.0;  // fraction
    bool precision_defined = true;
    std::size_t pred_instances = 0;
    std::size_t gt_instances = 0;
    std::vector<InstanceMatch> matches;
    std::vector<ClassMetrics> per_class;  // filled by evaluate_per_class only
};

MetricsReport evaluate(std::span<const InstanceLabel> pred, std::span<const InstanceLabel> gt,
                       double iou_threshold = 0.5);

// Class-averaged variant. Each instance is assigned the majority class of its
// points; metrics are computed per class and averaged over classes that have
// ground-truth instances. Top-level fields hold the class means; the
// scene-level aggregation is what evaluate() returns.
MetricsReport evaluate_per_class(std::span<const InstanceLabel> pred, std::span<const InstanceLabel> gt,
                                 std::span<const int> point_classes, double iou_threshold = 0.5);

struct PartitionComparison {
    bool equal = false;
    double rand_index = 0.0;
};

// Compares the partitions two labellings induce. Unlabelled is treated as one
// more label value. Throws InvalidArgument on length mismatch.
PartitionComparison partition_equal(std::span<const InstanceLabel> a, std::span<const InstanceLabel> b);

}  // namespace blockmerge

#endif  // BLOCKMERGE_METRICS_HPP
