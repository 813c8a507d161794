#pragma once

#include <stdexcept>
#include <string>

namespace degel {

/// Bad argument / malformed input (dimension mismatch, invalid config, ...).
struct input_error : std::invalid_argument {
    explicit input_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Operation requested on an operator that does not support it
/// (e.g. radial evaluation of a non-rotation-invariant family).
struct unsupported_operator : std::logic_error {
    explicit unsupported_operator(const std::string& what) : std::logic_error(what) {}
};

/// A numerical procedure failed (bracket not found, NaN in iteration, ...).
/// The message carries diagnostics of the last known state.
struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace degel
