#pragma once

#include <span>
#include <vector>

namespace srcorr {

/// N equally spaced sources on a line. Source l (1-based) sits at l*d.
///
/// Only the product kd enters any observable; spacing and wavenumber are kept
/// separately so that callers can express geometry in physical units.
class SourceChain {
public:
    SourceChain(int n_sources, double spacing, double wavenumber);

    /// Chain with unit spacing and the given dimensionless kd.
    static SourceChain from_kd(int n_sources, double kd);

    int size() const noexcept { return n_; }
    double spacing() const noexcept { return d_; }
    double wavenumber() const noexcept { return k_; }
    double kd() const noexcept { return k_ * d_; }
    double position(int l) const;

private:
    int n_;
    double d_;
    double k_;
};

/// Far-field detector, angle in radians from the chain normal.
struct Detector {
    double theta = 0.0;

    explicit Detector(double angle);
    double direction_along_chain() const;
};

/// Phase l*kd*sin(theta) picked up by a photon from source l reaching `det`.
double optical_phase(const SourceChain& chain, int source_index, const Detector& det);

/// Relative phase kd*(sin theta1 - sin theta2) between two detector directions.
double delta_phase(const SourceChain& chain, double theta1, double theta2);

/// m-1 detectors at theta1 followed by one at theta2.
std::vector<Detector> superradiant_detectors(int m, double theta1, double theta2);

/// theta2 giving the requested relative phase for a detector bundle at theta1.
/// Throws std::domain_error when the phase is not reachable (|sin theta2| > 1).
double theta2_for_phase(const SourceChain& chain, double theta1, double phi_delta);

} // namespace srcorr
