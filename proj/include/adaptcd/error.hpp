#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace adaptcd {

enum class ErrorKind {
    MalformedMask,
    EmptyRegion,
    DimensionMismatch,
    TooSmall,
    InvalidArgument,
    CorruptFeature,
    MissingPrototype,
    MissingKey,
    Provider,
    Io,
    Config,
};

std::string_view to_string(ErrorKind kind);

// Every failure in the library surfaces as an Error carrying a machine-readable kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

}  // namespace adaptcd
