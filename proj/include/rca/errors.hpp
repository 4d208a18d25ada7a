#pragma once

#include <stdexcept>
#include <string>

namespace rca {

// Malformed arguments: bad shapes, inconsistent sample counts, bad config values.
// The CLI maps this family to exit code 2.
struct invalid_input : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Numeric preconditions that fail at runtime: rank-deficient maps, vanishing
// cumulants, diverging iterations. The CLI maps this family to exit code 3.
struct degenerate_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct convergence_error : degenerate_error {
  using degenerate_error::degenerate_error;
};

}  // namespace rca
