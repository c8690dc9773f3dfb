#pragma once

#include <stdexcept>
#include <string>

namespace bandit {

// Invalid user input (config file, flags, grids, priors). CLI exit code 2.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A solver produced structurally invalid output (e.g. a threshold row with
// multiple action flips). Signals a bug or a broken run, not bad input.
// CLI exit code 3.
class integrity_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bandit
