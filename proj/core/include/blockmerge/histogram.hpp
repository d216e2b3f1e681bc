// SPDX-License-Identifier: Apache-2.0

#ifndef BLOCKMERGE_HISTOGRAM_HPP
#define BLOCKMERGE_HISTOGRAM_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "blockmerge/labels.hpp"

namespace blockmerge {

// Cell counts per label for one block instance (the mapping table H of an
// instance). Instances rarely see more than a handful of labels, so entries
// live in a flat vector.
class LabelHistogram {
public:
    struct Entry {
        InstanceLabel label;
        std::size_t count = 0;

        friend bool operator==(const Entry&, const Entry&) = default;
    };

    void add(InstanceLabel label, std::size_t count = 1);

    std::size_t count(InstanceLabel label) const noexcept;

    // Folds the count of `from` into `to`; no-op when `from` is absent.
    void merge_into(InstanceLabel from, InstanceLabel to);

    // Largest count; ties go to the smallest label value.
    std::optional<Entry> mode() const noexcept;

    std::span<const Entry> entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    std::size_t total() const noexcept;
    void clear() noexcept { entries_.clear(); }

private:
    std::vector<Entry> entries_;
};

}  // namespace blockmerge

#endif  // BLOCKMERGE_HISTOGRAM_HPP
