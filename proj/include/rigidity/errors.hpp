#pragma once

#include <stdexcept>
#include <string>

namespace rigidity {

/// Bad caller input: malformed data, violated preconditions, out-of-domain points.
/// The CLI maps this to exit status 2.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical routine could not produce a trustworthy answer. Exit status 3.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace rigidity
