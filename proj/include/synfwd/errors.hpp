#pragma once

#include <stdexcept>
#include <string>

namespace synfwd {

/// Malformed or invalid input (files, flags, contract violations by callers).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical routine could not produce a meaningful result.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace synfwd
