#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "srcorr/geometry.hpp"
#include "srcorr/statistics.hpp"

namespace srcorr {

/// Nonzero amplitudes of a state vector, sorted by basis index.
using SparseKet = std::vector<std::pair<std::size_t, std::complex<double>>>;

struct FockLimits {
    std::size_t max_dimension = std::size_t{1} << 20;  ///< (n_max+1)^N
    std::size_t dense_dimension = 4096;                ///< largest matrix ever materialized
    double max_tail = 1e-10;                           ///< per-mode truncated probability
};

/// Product number basis |n_1..n_N>, index n_1 + n_2 (c+1) + n_3 (c+1)^2 + ...
class FockBasis {
public:
    FockBasis(int n_modes, int cutoff);

    int modes() const noexcept { return modes_; }
    int cutoff() const noexcept { return cutoff_; }
    std::size_t dimension() const noexcept { return dim_; }
    std::size_t stride(int mode) const { return strides_[static_cast<std::size_t>(mode)]; }
    int occupation(std::size_t index, int mode) const;
    std::size_t index(std::span<const int> occupations) const;

private:
    int modes_;
    int cutoff_;
    std::size_t dim_;
    std::vector<std::size_t> strides_;
};

/// Density matrix on a truncated N-mode Fock space, held as a mixture
/// sum_i w_i |psi_i><psi_i| of sparse kets. Diagonal states have one basis
/// ket per component; photon subtraction keeps the mixture form.
class TruncatedDensityMatrix {
public:
    struct Component {
        double weight;
        SparseKet ket;
    };

    TruncatedDensityMatrix(FockBasis basis, std::vector<Component> components, double tail_mass);

    const FockBasis& basis() const noexcept { return basis_; }
    int modes() const noexcept { return basis_.modes(); }
    int cutoff() const noexcept { return basis_.cutoff(); }
    std::size_t dimension() const noexcept { return basis_.dimension(); }
    const std::vector<Component>& components() const noexcept { return components_; }
    /// Upper bound on the probability lost to truncation, 1 - prod_l (1 - tail_l).
    double tail_mass() const noexcept { return tail_; }

    double trace() const;
    std::complex<double> element(std::size_t row, std::size_t col) const;
    /// Throws ResourceLimit above limits.dense_dimension.
    Eigen::MatrixXcd to_dense(const FockLimits& limits = {}) const;
    double smallest_eigenvalue(const FockLimits& limits = {}) const;

private:
    FockBasis basis_;
    std::vector<Component> components_;
    double tail_;
};

/// E+(r) = sum_l e^{i phi_l} a_l restricted to the truncated space.
class FieldOperator {
public:
    FieldOperator(const SourceChain& chain, const Detector& det);

    const std::vector<std::complex<double>>& coefficients() const noexcept { return coef_; }
    SparseKet apply(const SparseKet& ket, const FockBasis& basis) const;

private:
    std::vector<std::complex<double>> coef_;
};

/// Smallest cutoff keeping the per-mode tail below limits.max_tail.
int default_cutoff(const PhotonStatistics& stats, const FockLimits& limits = {});

/// Product state sum P(n_1)..P(n_N) |n><n|. Coherent sources use the
/// phase-averaged Poissonian mixture. n_max < 0 picks default_cutoff.
TruncatedDensityMatrix build_density(const PhotonStatistics& stats, int n_sources, int n_max = -1,
                                     const FockLimits& limits = {});

/// Normally ordered <prod_j E-(r_j) E+(r_j)>; an empty detector list gives Tr(rho).
double gm_exact(const TruncatedDensityMatrix& rho, const SourceChain& chain, std::span<const Detector> detectors);

struct Projection {
    TruncatedDensityMatrix state;  ///< normalized, Tr = 1
    double trace;                  ///< Tr of the unnormalized projection
};

/// Removes `count` photons through E+(theta1) and renormalizes.
/// Throws NumericalError when the projected trace is below 1e-14.
Projection photon_subtract(const TruncatedDensityMatrix& rho, const SourceChain& chain, double theta1, int count);

/// Tr[rho a_l^dagger a_l'] with 1-based mode indices.
std::complex<double> mode_mode_correlation(const TruncatedDensityMatrix& rho, int l, int lp);

struct FactorizationCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double relative_gap = 0.0;
};

/// G^(m)(theta1 x (m-1), theta2) against G^(1) of the (m-1)-fold projected
/// state at theta2 times G^(m-1)(theta1, .., theta1).
FactorizationCheck factorization_check(const TruncatedDensityMatrix& rho, const SourceChain& chain, double theta1,
                                       double theta2, int m);

} // namespace srcorr
