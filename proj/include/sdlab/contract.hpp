#pragma once

#include <stdexcept>
#include <string>

namespace sdlab {

// Precondition / shape violations. Thrown instead of asserting so the CLI
// can report them and tests can exercise the error paths.
struct ContractError : std::runtime_error {
    explicit ContractError(const std::string& msg) : std::runtime_error(msg) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ContractError(msg);
}

}  // namespace sdlab
