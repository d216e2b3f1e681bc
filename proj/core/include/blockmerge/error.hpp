// SPDX-License-Identifier: Apache-2.0

#ifndef BLOCKMERGE_ERROR_HPP
#define BLOCKMERGE_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace blockmerge {

enum class ErrorCode {
    EmptyScene,
    OutOfBounds,
    OrderViolation,
    UndefinedIoU,
    UndefinedRecall,
    UndefinedCoverage,
    SpecError,
    ParseError,
    MissingColumn,
    OrdinalGap,
    Io,
    InvalidArgument,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this type. `line()` is non-zero
// for parse failures and names the 1-based line of the offending input.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::size_t line = 0);

    ErrorCode code() const noexcept { return code_; }
    std::size_t line() const noexcept { return line_; }

private:
    ErrorCode code_;
    std::size_t line_;
};

}  // namespace blockmerge

#endif  // BLOCKMERGE_ERROR_HPP
