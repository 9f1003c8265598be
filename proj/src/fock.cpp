#include "srcorr/fock.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "srcorr/errors.hpp"

namespace srcorr {

namespace {

constexpr double kMinProjectionTrace = 1e-14;

double squared_norm(const SparseKet& ket) {
    double s = 0.0;
    for (const auto& [idx, amp] : ket) s += std::norm(amp);
    return s;
}

std::complex<double> amplitude(const SparseKet& ket, std::size_t index) {
    const auto it = std::lower_bound(ket.begin(), ket.end(), index,
                                     [](const auto& e, std::size_t i) { return e.first < i; });
    return (it != ket.end() && it->first == index) ? it->second : std::complex<double>{};
}

SparseKet annihilate(const SparseKet& ket, const FockBasis& basis, int mode) {
    SparseKet out;
    out.reserve(ket.size());
    for (const auto& [idx, amp] : ket) {
        const int n = basis.occupation(idx, mode);
        if (n > 0) out.emplace_back(idx - basis.stride(mode), amp * std::sqrt(static_cast<double>(n)));
    }
    // removing a fixed stride keeps the order
    return out;
}

std::complex<double> inner(const SparseKet& a, const SparseKet& b) {
    std::complex<double> s{};
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (ia->first < ib->first) {
            ++ia;
        } else if (ib->first < ia->first) {
            ++ib;
        } else {
            s += std::conj(ia->second) * ib->second;
            ++ia;
            ++ib;
        }
    }
    return s;
}

} // namespace

FockBasis::FockBasis(int n_modes, int cutoff) : modes_(n_modes), cutoff_(cutoff), dim_(1) {
    if (n_modes < 1) throw std::invalid_argument("FockBasis: need at least one mode");
    if (cutoff < 0) throw std::invalid_argument("FockBasis: cutoff must be >= 0");
    strides_.reserve(static_cast<std::size_t>(n_modes));
    for (int l = 0; l < n_modes; ++l) {
        strides_.push_back(dim_);
        if (dim_ > (std::size_t{1} << 40) / static_cast<std::size_t>(cutoff + 1))
            throw ResourceLimit("FockBasis: dimension overflow");
        dim_ *= static_cast<std::size_t>(cutoff + 1);
    }
}

int FockBasis::occupation(std::size_t index, int mode) const {
    return static_cast<int>((index / strides_[static_cast<std::size_t>(mode)]) % static_cast<std::size_t>(cutoff_ + 1));
}

std::size_t FockBasis::index(std::span<const int> occupations) const {
    if (static_cast<int>(occupations.size()) != modes_) throw std::invalid_argument("FockBasis::index: wrong mode count");
    std::size_t idx = 0;
    for (int l = 0; l < modes_; ++l) {
        const int n = occupations[static_cast<std::size_t>(l)];
        if (n < 0 || n > cutoff_) throw std::out_of_range("FockBasis::index: occupation outside cutoff");
        idx += static_cast<std::size_t>(n) * strides_[static_cast<std::size_t>(l)];
    }
    return idx;
}

TruncatedDensityMatrix::TruncatedDensityMatrix(FockBasis basis, std::vector<Component> components, double tail_mass)
    : basis_(std::move(basis)), components_(std::move(components)), tail_(tail_mass) {}

double TruncatedDensityMatrix::trace() const {
    double t = 0.0;
    for (const auto& c : components_) t += c.weight * squared_norm(c.ket);
    return t;
}

std::complex<double> TruncatedDensityMatrix::element(std::size_t row, std::size_t col) const {
    if (row >= dimension() || col >= dimension()) throw std::out_of_range("TruncatedDensityMatrix::element");
    std::complex<double> s{};
    for (const auto& c : components_) s += c.weight * amplitude(c.ket, row) * std::conj(amplitude(c.ket, col));
    return s;
}

Eigen::MatrixXcd TruncatedDensityMatrix::to_dense(const FockLimits& limits) const {
    if (dimension() > limits.dense_dimension)
        throw ResourceLimit("dense density matrix of dimension " + std::to_string(dimension()) + " exceeds limit " +
                            std::to_string(limits.dense_dimension));
    const auto d = static_cast<Eigen::Index>(dimension());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    for (const auto& c : components_)
        for (const auto& [i, ai] : c.ket)
            for (const auto& [j, aj] : c.ket)
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += c.weight * ai * std::conj(aj);
    return m;
}

double TruncatedDensityMatrix::smallest_eigenvalue(const FockLimits& limits) const {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(to_dense(limits), Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

FieldOperator::FieldOperator(const SourceChain& chain, const Detector& det) {
    coef_.reserve(static_cast<std::size_t>(chain.size()));
    for (int l = 1; l <= chain.size(); ++l) coef_.push_back(std::polar(1.0, optical_phase(chain, l, det)));
}

SparseKet FieldOperator::apply(const SparseKet& ket, const FockBasis& basis) const {
    if (static_cast<int>(coef_.size()) != basis.modes())
        throw std::invalid_argument("FieldOperator: mode count does not match the basis");
    SparseKet out;
    out.reserve(ket.size() * coef_.size());
    for (const auto& [idx, amp] : ket)
        for (int l = 0; l < basis.modes(); ++l) {
            const int n = basis.occupation(idx, l);
            if (n > 0)
                out.emplace_back(idx - basis.stride(l),
                                 amp * coef_[static_cast<std::size_t>(l)] * std::sqrt(static_cast<double>(n)));
        }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    SparseKet merged;
    merged.reserve(out.size());
    for (const auto& e : out) {
        if (!merged.empty() && merged.back().first == e.first)
            merged.back().second += e.second;
        else
            merged.push_back(e);
    }
    return merged;
}

int default_cutoff(const PhotonStatistics& stats, const FockLimits& limits) {
    return stats.cutoff_for_tail(limits.max_tail);
}

TruncatedDensityMatrix build_density(const PhotonStatistics& stats, int n_sources, int n_max, const FockLimits& limits) {
    if (n_sources < 1) throw std::invalid_argument("build_density: N must be >= 1");
    if (stats.is_single_photon()) n_max = 1;
    if (n_max < 0) n_max = default_cutoff(stats, limits);
    const double tail = stats.tail_mass(n_max);
    if (tail >= limits.max_tail)
        throw NumericalError("build_density: per-mode tail mass " + std::to_string(tail) + " at n_max = " +
                             std::to_string(n_max) + " exceeds " + std::to_string(limits.max_tail));
    FockBasis basis(n_sources, n_max);
    if (basis.dimension() > limits.max_dimension)
        throw ResourceLimit("build_density: dimension (" + std::to_string(n_max) + "+1)^" + std::to_string(n_sources) +
                            " = " + std::to_string(basis.dimension()) + " exceeds budget " +
                            std::to_string(limits.max_dimension));

    std::vector<double> p(static_cast<std::size_t>(n_max) + 1);
    for (int n = 0; n <= n_max; ++n) p[static_cast<std::size_t>(n)] = stats.probability(n);

    std::vector<TruncatedDensityMatrix::Component> comps;
    comps.reserve(basis.dimension());
    for (std::size_t idx = 0; idx < basis.dimension(); ++idx) {
        double w = 1.0;
        for (int l = 0; l < n_sources && w > 0.0; ++l) w *= p[static_cast<std::size_t>(basis.occupation(idx, l))];
        if (w > 0.0) comps.push_back({w, SparseKet{{idx, 1.0}}});
    }
    const double total_tail = 1.0 - std::pow(1.0 - tail, n_sources);
    return TruncatedDensityMatrix(std::move(basis), std::move(comps), total_tail);
}

double gm_exact(const TruncatedDensityMatrix& rho, const SourceChain& chain, std::span<const Detector> detectors) {
    if (chain.size() != rho.modes()) throw std::invalid_argument("gm_exact: chain size does not match mode count");
    std::vector<FieldOperator> ops;
    ops.reserve(detectors.size());
    for (const auto& d : detectors) ops.emplace_back(chain, d);
    double g = 0.0;
    for (const auto& c : rho.components()) {
        SparseKet ket = c.ket;
        for (const auto& op : ops) {
            if (ket.empty()) break;
            ket = op.apply(ket, rho.basis());
        }
        g += c.weight * squared_norm(ket);
    }
    return g;
}

Projection photon_subtract(const TruncatedDensityMatrix& rho, const SourceChain& chain, double theta1, int count) {
    if (count < 0) throw std::invalid_argument("photon_subtract: count must be >= 0");
    if (chain.size() != rho.modes()) throw std::invalid_argument("photon_subtract: chain size does not match mode count");
    const FieldOperator op(chain, Detector(theta1));
    std::vector<TruncatedDensityMatrix::Component> comps;
    comps.reserve(rho.components().size());
    double trace = 0.0;
    for (const auto& c : rho.components()) {
        SparseKet ket = c.ket;
        for (int i = 0; i < count && !ket.empty(); ++i) ket = op.apply(ket, rho.basis());
        const double norm = squared_norm(ket);
        if (norm == 0.0) continue;
        trace += c.weight * norm;
        comps.push_back({c.weight, std::move(ket)});
    }
    if (!(trace > kMinProjectionTrace))
        throw NumericalError("photon_subtract: projection trace " + std::to_string(trace) + " vanishes");
    for (auto& c : comps) c.weight /= trace;
    return {TruncatedDensityMatrix(rho.basis(), std::move(comps), rho.tail_mass()), trace};
}

std::complex<double> mode_mode_correlation(const TruncatedDensityMatrix& rho, int l, int lp) {
    if (l < 1 || l > rho.modes() || lp < 1 || lp > rho.modes())
        throw std::out_of_range("mode_mode_correlation: mode index outside 1.." + std::to_string(rho.modes()));
    std::complex<double> s{};
    for (const auto& c : rho.components()) {
        // <psi| a_l^dag a_l' |psi> = <a_l psi | a_l' psi>
        s += c.weight * inner(annihilate(c.ket, rho.basis(), l - 1), annihilate(c.ket, rho.basis(), lp - 1));
    }
    return s;
}

FactorizationCheck factorization_check(const TruncatedDensityMatrix& rho, const SourceChain& chain, double theta1,
                                       double theta2, int m) {
    if (m < 1) throw std::invalid_argument("factorization_check: m must be >= 1");
    FactorizationCheck f;
    const auto detectors = superradiant_detectors(m, theta1, theta2);
    f.lhs = gm_exact(rho, chain, detectors);
    const Projection proj = photon_subtract(rho, chain, theta1, m - 1);
    const std::vector<Detector> last{Detector(theta2)};
    const std::vector<Detector> bundle(static_cast<std::size_t>(m - 1), Detector(theta1));
    f.rhs = gm_exact(proj.state, chain, last) * gm_exact(rho, chain, bundle);
    const double scale = std::max(std::abs(f.lhs), std::abs(f.rhs));
    f.relative_gap = scale > 0.0 ? std::abs(f.lhs - f.rhs) / scale : 0.0;
    return f;
}

} // namespace srcorr
