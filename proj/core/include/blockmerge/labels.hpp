// SPDX-License-Identifier: Apache-2.0

#ifndef BLOCKMERGE_LABELS_HPP
#define BLOCKMERGE_LABELS_HPP

#include <compare>
#include <cstdint>
#include <functional>

namespace blockmerge {

// Either Unlabelled or a non-negative group identifier. Unlabelled is encoded
// as -1 wherever labels are serialized.
class InstanceLabel {
public:
    constexpr InstanceLabel() noexcept = default;
    constexpr explicit InstanceLabel(std::int64_t value) noexcept
        : value_(value < 0 ? kUnlabelledValue : value) {}

    static constexpr InstanceLabel unlabelled() noexcept { return InstanceLabel{}; }

    constexpr bool is_unlabelled() const noexcept { return value_ == kUnlabelledValue; }
    constexpr bool is_labelled() const noexcept { return !is_unlabelled(); }
    constexpr std::int64_t value() const noexcept { return value_; }

    friend constexpr bool operator==(InstanceLabel, InstanceLabel) noexcept = default;
    friend constexpr auto operator<=>(InstanceLabel, InstanceLabel) noexcept = default;

private:
    static constexpr std::int64_t kUnlabelledValue = -1;
    std::int64_t value_ = kUnlabelledValue;
};

inline constexpr InstanceLabel kUnlabelled = InstanceLabel::unlabelled();

}  // namespace blockmerge

template <>
struct std::hash<blockmerge::InstanceLabel> {
    std::size_t operator()(blockmerge::InstanceLabel l) const noexcept {
        return std::hash<std::int64_t>{}(l.value());
    }
};

#endif  // BLOCKMERGE_LABELS_HPP
