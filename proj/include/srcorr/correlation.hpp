#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "srcorr/combinatorics.hpp"
#include "srcorr/geometry.hpp"
#include "srcorr/permanent.hpp"
#include "srcorr/statistics.hpp"

namespace srcorr {

enum class Normalization { raw, by_g1_product, by_angular_average };
enum class GridKind { phase_delta, theta2 };

std::string to_string(Normalization n);
std::string to_string(GridKind g);

struct CurveMetadata {
    int n_sources = 0;
    int order = 0;
    std::string statistics;
    Normalization normalization = Normalization::raw;
    GridKind grid_kind = GridKind::phase_delta;
    std::string route;
};

/// Sampled G^(m) (or a normalized form) over relative phase or detector angle.
struct CorrelationCurve {
    std::vector<double> grid;
    std::vector<double> values;
    CurveMetadata meta;
    std::string diagnostic;  ///< non-empty when the result is degenerate

    /// Throws std::logic_error if sizes differ, the grid is not strictly
    /// increasing, or a value is negative or non-finite.
    void validate() const;
    std::size_t size() const { return grid.size(); }
};

/// sin^2(N x/2) / sin^2(x/2), with the limit N^2 where sin(x/2) vanishes.
double superradiant_ratio(int n_sources, double phi_delta);

/// Sum over the final states of one partition of |sum_l m_l e^{-i l phi}|^2,
/// folded into c1 + c2 (ratio - N).
struct InterferenceKernel {
    double c1 = 0.0;
    double c2 = 0.0;
    double operator()(int n_sources, double phi_delta) const;
};

InterferenceKernel kernel_coefficients(const Partition& p);

// Grids ---------------------------------------------------------------------

std::vector<double> uniform_grid(double lo, double hi, int points);
/// 1024 points over [-pi, pi].
std::vector<double> default_phase_grid();
/// Grid over [-pi, pi] whose step divides 2 pi / N, so the zeros of the
/// interference ratio at multiples of 2 pi / N are sampled exactly.
std::vector<double> commensurate_phase_grid(int n_sources, int points_per_lobe = 64);

// Superradiant configuration: m-1 detectors share one direction, the m-th scans.

/// Partition-sum route for any statistics.
CorrelationCurve g_general(const PhotonStatistics& stats, int n_sources, int m, std::span<const double> phi_grid);
double g_general_at(const PhotonStatistics& stats, int n_sources, int m, double phi_delta);

/// Thermal closed form nbar^m N^m (m-1)! (1 + (m-1)/N^2 ratio).
CorrelationCurve g_tls_closed(int n_sources, int m, double nbar, std::span<const double> phi_grid);
double g_tls_closed_at(int n_sources, int m, double nbar, double phi_delta);

/// Coherent closed form built from squared-multinomial sums over all final states.
CorrelationCurve g_cls_closed(int n_sources, int m, double nbar, std::span<const double> phi_grid);
double g_cls_closed_at(int n_sources, int m, double nbar, double phi_delta);

/// Sums entering the coherent closed form, cached per (N, m).
struct ClsSums {
    double diagonal = 0.0;  ///< sum C^2 m_1 m_1
    double cross = 0.0;     ///< sum C^2 m_1 m_2
};
const ClsSums& cls_sums(int n_sources, int m);

/// Coherent sources through the Bessel-moment (characteristic functional) route.
CorrelationCurve g_cls_functional(int n_sources, int m, double nbar, std::span<const double> phi_grid);
double g_cls_functional_at(int n_sources, int m, double nbar, double phi_delta);

/// Thermal G^(m) at arbitrary detectors: permanent of the m x m mutual coherence
/// matrix nbar * sum_l exp(i(phi_li - phi_lj)).
double thermal_permanent_gm(const SourceChain& chain, std::span<const Detector> detectors, double nbar,
                            int max_order = kDefaultPermanentLimit);

/// Permanent route in the superradiant configuration, one grid point per phase.
CorrelationCurve thermal_permanent_curve(const SourceChain& chain, int m, double nbar, double theta1,
                                         std::span<const double> phi_grid);

// Normalization ---------------------------------------------------------------

/// (N <:n:>)^m, the product of first-order intensities at m detectors.
double g1_product(const PhotonStatistics& stats, int n_sources, int m);

/// (1/2pi) integral over one period by the periodic trapezoid rule.
double period_average(const std::function<double(double)>& g_of_phi, int nodes = 4096);

/// Divides every value by `scale` and relabels the normalization.
CorrelationCurve normalized(CorrelationCurve curve, Normalization mode, double scale);

// Shape measures ----------------------------------------------------------------

/// (max - min) / (max + min).
double visibility(const CorrelationCurve& curve);

/// Angular distance in theta2 from the central maximum at theta1 to the flanking
/// minima of the interference term (half their separation). The grid minima are
/// refined by Brent minimization of the interference ratio.
double peak_width(const CorrelationCurve& theta_curve, const SourceChain& chain, double theta1);

struct AngularAverage {
    double closed_form = 0.0;
    double quadrature = 0.0;
    double peak_ratio = 0.0;  ///< peak / average = m N / (N + m - 1)
};
AngularAverage angular_average_tls(int n_sources, int m, double nbar, int nodes = 4096);

/// 1 + sinc^2(kD sin(theta2) / 2), the continuous-source limit (theta1 = 0).
CorrelationCurve hbt_limit(double kD, std::span<const double> theta2_grid);
/// Finite chain with d = D/N: normalized two-detector thermal correlation.
CorrelationCurve hbt_chain_curve(int n_sources, double kD, std::span<const double> theta2_grid);

struct HbtComparison {
    double max_relative_deviation = 0.0;
    int points_in_region = 0;
};
/// Deviation between the chain and the limit over |kD sin(theta2)/2| <= 3 pi.
HbtComparison hbt_compare(int n_sources, double kD, std::span<const double> theta2_grid);

} // namespace srcorr
