#include "srcorr/permanent.hpp"

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "srcorr/errors.hpp"

namespace srcorr {

std::complex<double> permanent(const Eigen::MatrixXcd& a, int max_order) {
    if (a.rows() != a.cols()) throw std::invalid_argument("permanent: matrix must be square");
    const int n = static_cast<int>(a.rows());
    if (n > max_order)
        throw ResourceLimit("permanent: order " + std::to_string(n) + " exceeds limit " + std::to_string(max_order));
    if (n == 0) return 1.0;
    if (n > 62) throw ResourceLimit("permanent: order too large for subset enumeration");

    std::vector<std::complex<double>> row_sums(static_cast<std::size_t>(n), 0.0);
    std::complex<double> total = 0.0;
    std::uint64_t gray = 0;
    const std::uint64_t subsets = std::uint64_t{1} << n;
    for (std::uint64_t k = 1; k < subsets; ++k) {
        const int col = std::countr_zero(k);
        const std::uint64_t bit = std::uint64_t{1} << col;
        gray ^= bit;
        if (gray & bit) {
            for (int i = 0; i < n; ++i) row_sums[static_cast<std::size_t>(i)] += a(i, col);
        } else {
            for (int i = 0; i < n; ++i) row_sums[static_cast<std::size_t>(i)] -= a(i, col);
        }
        std::complex<double> prod = row_sums[0];
        for (int i = 1; i < n; ++i) prod *= row_sums[static_cast<std::size_t>(i)];
        // (-1)^(n - |S|)
        if ((n - std::popcount(gray)) % 2 == 0)
            total += prod;
        else
            total -= prod;
    }
    return total;
}

} // namespace srcorr
