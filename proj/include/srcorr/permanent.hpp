#pragma once

#include <complex>
#include <Eigen/Dense>

namespace srcorr {

inline constexpr int kDefaultPermanentLimit = 20;

/// Permanent of a square complex matrix by Ryser's formula, visiting subsets in
/// Gray-code order so each step updates the row sums by one column: O(2^n n).
/// Throws ResourceLimit for n > max_order.
std::complex<double> permanent(const Eigen::MatrixXcd& a, int max_order = kDefaultPermanentLimit);

} // namespace srcorr
