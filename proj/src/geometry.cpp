#include "srcorr/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace srcorr {

SourceChain::SourceChain(int n_sources, double spacing, double wavenumber)
    : n_(n_sources), d_(spacing), k_(wavenumber) {
    if (n_sources < 1) throw std::invalid_argument("SourceChain: n_sources must be >= 1");
    if (!(spacing > 0.0) || !std::isfinite(spacing))
        throw std::invalid_argument("SourceChain: spacing must be positive");
    if (!(wavenumber > 0.0) || !std::isfinite(wavenumber))
        throw std::invalid_argument("SourceChain: wavenumber must be positive");
}

SourceChain SourceChain::from_kd(int n_sources, double kd) { return SourceChain(n_sources, 1.0, kd); }

double SourceChain::position(int l) const {
    if (l < 1 || l > n_)
        throw std::out_of_range("source index " + std::to_string(l) + " outside 1.." + std::to_string(n_));
    return l * d_;
}

Detector::Detector(double angle) : theta(angle) {
    constexpr double half_pi = std::numbers::pi / 2;
    // small slack so that values produced by degree conversion of +-90 pass
    if (!(std::abs(angle) <= half_pi + 1e-12))
        throw std::invalid_argument("Detector: angle must lie in [-pi/2, pi/2]");
}

double Detector::direction_along_chain() const { return std::sin(theta); }

double optical_phase(const SourceChain& chain, int source_index, const Detector& det) {
    return chain.wavenumber() * chain.position(source_index) * det.direction_along_chain();
}

double delta_phase(const SourceChain& chain, double theta1, double theta2) {
    return chain.kd() * (std::sin(theta1) - std::sin(theta2));
}

std::vector<Detector> superradiant_detectors(int m, double theta1, double theta2) {
    if (m < 1) throw std::invalid_argument("superradiant_detectors: m must be >= 1");
    std::vector<Detector> dets(static_cast<std::size_t>(m - 1), Detector(theta1));
    dets.emplace_back(theta2);
    return dets;
}

double theta2_for_phase(const SourceChain& chain, double theta1, double phi_delta) {
    const double s = std::sin(theta1) - phi_delta / chain.kd();
    if (std::abs(s) > 1.0) throw std::domain_error("relative phase not reachable for this kd");
    return std::asin(s);
}

} // namespace srcorr
