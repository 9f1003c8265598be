#pragma once

#include <stdexcept>
#include <string>

namespace srcorr {

// Requested statistics have no representation on the selected route
// (e.g. single-photon emitters in a positive-P Monte Carlo).
class UnsupportedStatistics : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A configured size or memory cap would be exceeded.
class ResourceLimit : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A numerical precondition failed (vanishing projection, tail mass too large, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace srcorr
