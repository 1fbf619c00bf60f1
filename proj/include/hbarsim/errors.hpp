#pragma once

#include <stdexcept>
#include <string>

namespace hbarsim {

/// Bad or inconsistent run configuration (unknown key, missing key, invariant).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// File access or malformed CSV input.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A fit that cannot be carried out (ill-posed data, no resonance found).
struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace hbarsim
