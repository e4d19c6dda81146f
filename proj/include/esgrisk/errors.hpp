#ifndef ESGRISK_ERRORS_HPP
#define ESGRISK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace esgrisk {

// Bad user input: invalid parameters, malformed files, schema violations.
// Maps to CLI exit code 2.
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// Numerical or model failure: non-monotone acceptance map, no feasible
// acceptance, degenerate calibration. Maps to CLI exit code 3.
class ModelError : public std::runtime_error {
public:
    explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace esgrisk

#endif
