#pragma once
// qsep/errors.hpp — exception taxonomy shared by the library and the CLI.

#include <stdexcept>
#include <string>

namespace qsep {

inline constexpr const char* version_string = "1.0.0";

/// Invalid user-supplied configuration (bad schedule, out-of-range parameter,
/// malformed JSON, ...). The CLI maps this to exit code 1.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A requested runtime assertion failed (statistical gate, exact invariant,
/// ordering violation, ...). The CLI maps this to exit code 2.
struct assertion_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace qsep
