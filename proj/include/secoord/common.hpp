#ifndef SECOORD_COMMON_HPP
#define SECOORD_COMMON_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace secoord {

/// Bad user input: unknown axis, malformed table, invalid config field.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A computation would exceed the configured enumeration/memory budget.
struct resource_error : std::runtime_error {
    explicit resource_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A scheme failed its distributional constraints.
struct Violation {
    std::string name;
    double magnitude = 0.0;
};

struct validation_error : std::runtime_error {
    std::vector<Violation> violations;
    validation_error(const std::string& msg, std::vector<Violation> v)
        : std::runtime_error(msg), violations(std::move(v)) {}
};

/// Broken internal invariant; indicates a bug, not bad input.
struct internal_error : std::logic_error {
    explicit internal_error(const std::string& msg) : std::logic_error(msg) {}
};

} // namespace secoord

#endif
