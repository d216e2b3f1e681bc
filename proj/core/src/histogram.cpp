// SPDX-License-Identifier: Apache-2.0

#include "blockmerge/histogram.hpp"

#include <algorithm>

namespace blockmerge {

void LabelHistogram::add(InstanceLabel label, std::size_t count) {
    for (auto& e : entries_) {
        if (e.label == label) {
            e.count += count;
            return;
        }
    }
    entries_.push_back({label, count});
}

std::size_t LabelHistogram::count(InstanceLabel label) const noexcept {
    for (const auto& e : entries_) {
        if (e.label == label) {
            return e.count;
        }
    }
    return 0;
}

void LabelHistogram::merge_into(InstanceLabel from, InstanceLabel to) {
    if (from == to) {
        return;
    }
    const auto it = std::find_if(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.label == from; });
    if (it == entries_.end()) {
        return;
    }
    const std::size_t moved = it->count;
    entries_.erase(it);
    add(to, moved);
}

std::optional<LabelHistogram::Entry> LabelHistogram::mode() const noexcept {
    if (entries_.empty()) {
        return std::nullopt;
    }
    Entry best = entries_.front();
    for (const auto& e : entries_) {
        if (e.count > best.count || (e.count == best.count && e.label < best.label)) {
            best = e;
        }
    }
    return best;
}

std::size_t LabelHistogram::total() const noexcept {
    std::size_t t = 0;
    for (const auto& e : entries_) {
        t += e.count;
    }
    return t;
}

}  // namespace blockmerge
