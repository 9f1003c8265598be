#include "srcorr/correlation.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/tools/minima.hpp>

#include "srcorr/errors.hpp"

namespace srcorr {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
// below this |sin(x/2)| the ratio is replaced by its limit N^2
constexpr double kRatioSingularity = 1e-8;

void require_orders(int n_sources, int m, const char* what) {
    if (n_sources < 1) throw std::invalid_argument(std::string(what) + ": N must be >= 1");
    if (m < 1) throw std::invalid_argument(std::string(what) + ": m must be >= 1");
}

void require_mean(double nbar, const char* what) {
    if (!(nbar > 0.0) || !std::isfinite(nbar))
        throw std::invalid_argument(std::string(what) + ": nbar must be positive");
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

template <class F>
CorrelationCurve sample(std::span<const double> grid, CurveMetadata meta, F&& f) {
    CorrelationCurve c;
    c.grid.assign(grid.begin(), grid.end());
    c.values.reserve(grid.size());
    for (double x : grid) c.values.push_back(f(x));
    c.meta = std::move(meta);
    return c;
}


} // namespace

std::string to_string(Normalization n) {
    switch (n) {
        case Normalization::raw: return "raw";
        case Normalization::by_g1_product: return "g";
        case Normalization::by_angular_average: return "avg";
    }
    return "?";
}

std::string to_string(GridKind g) { return g == GridKind::phase_delta ? "phi_delta" : "theta2"; }

void CorrelationCurve::validate() const {
    if (grid.size() != values.size()) throw std::logic_error("CorrelationCurve: grid/value size mismatch");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw std::logic_error("CorrelationCurve: grid not strictly increasing");
    for (double v : values)
        if (!std::isfinite(v) || v < 0.0) throw std::logic_error("CorrelationCurve: negative or non-finite value");
}

double superradiant_ratio(int n_sources, double phi_delta) {
    const double s = std::sin(0.5 * phi_delta);
    if (std::abs(s) < kRatioSingularity) return static_cast<double>(n_sources) * n_sources;
    const double t = std::sin(0.5 * n_sources * phi_delta);
    return (t * t) / (s * s);
}

double InterferenceKernel::operator()(int n_sources, double phi_delta) const {
    return c1 + c2 * (superradiant_ratio(n_sources, phi_delta) - n_sources);
}

InterferenceKernel kernel_coefficients(const Partition& p) {
    const int n = p.width();
    InterferenceKernel k;
    for (const auto& s : distinct_permutations(p)) {
        for (int c : s.counts) k.c1 += static_cast<double>(c) * c;
        if (n >= 2) k.c2 += static_cast<double>(s.counts[0]) * s.counts[1];
    }
#ifndef NDEBUG
    // every ordered pair k != k' sees the same weight
    if (n >= 2) {
        const auto states = distinct_permutations(p);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                if (a == b) continue;
                double c2 = 0.0;
                for (const auto& s : states) c2 += static_cast<double>(s.counts[a]) * s.counts[b];
                assert(c2 == k.c2);
            }
    }
#endif
    return k;
}

std::vector<double> uniform_grid(double lo, double hi, int points) {
    if (points < 1) throw std::invalid_argument("uniform_grid: need at least one point");
    if (points == 1) return {lo};
    if (!(hi > lo)) throw std::invalid_argument("uniform_grid: hi must exceed lo");
    std::vector<double> g(static_cast<std::size_t>(points));
    const double step = (hi - lo) / (points - 1);
    for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = lo + step * i;
    g.back() = hi;
    return g;
}

std::vector<double> default_phase_grid() { return uniform_grid(-kPi, kPi, 1024); }

std::vector<double> commensurate_phase_grid(int n_sources, int points_per_lobe) {
    if (n_sources < 1 || points_per_lobe < 1) throw std::invalid_argument("commensurate_phase_grid: bad sizes");
    const int steps = n_sources * points_per_lobe;
    std::vector<double> g(static_cast<std::size_t>(steps) + 1);
    // index-based so that multiples of 2pi/N land on exact grid points
    for (int i = 0; i <= steps; ++i) g[static_cast<std::size_t>(i)] = kTwoPi * (i - steps / 2.0) / steps;
    return g;
}

// --- partition route ---------------------------------------------------------

namespace {

struct PartitionTerm {
    double weight;  // prod <:n^x:> C(m;x)^2 / m^2
    InterferenceKernel kernel;
};

std::vector<PartitionTerm> partition_terms(const PhotonStatistics& stats, int n_sources, int m) {
    std::vector<PartitionTerm> terms;
    for (const auto& p : enumerate_partitions(m, n_sources)) {
        double moments = 1.0;
        for (int x : p.parts) moments *= normally_ordered_moment(stats, x);
        if (moments == 0.0) continue;
        const double c = to_double(multinomial(m, p.parts));
        terms.push_back({moments * c * c / (static_cast<double>(m) * m), kernel_coefficients(p)});
    }
    return terms;
}

double evaluate_terms(const std::vector<PartitionTerm>& terms, int n_sources, double phi) {
    double g = 0.0;
    for (const auto& t : terms) g += t.weight * t.kernel(n_sources, phi);
    return g;
}

} // namespace

CorrelationCurve g_general(const PhotonStatistics& stats, int n_sources, int m, std::span<const double> phi_grid) {
    require_orders(n_sources, m, "g_general");
    const auto terms = partition_terms(stats, n_sources, m);
    auto curve = sample(phi_grid, {n_sources, m, stats.describe(), Normalization::raw, GridKind::phase_delta, "partition"},
                        [&](double phi) { return evaluate_terms(terms, n_sources, phi); });
    if (stats.is_single_photon() && m > n_sources)
        curve.diagnostic = "degenerate: single-photon emitters cannot supply m > N photons; G vanishes";
    return curve;
}

double g_general_at(const PhotonStatistics& stats, int n_sources, int m, double phi_delta) {
    require_orders(n_sources, m, "g_general_at");
    return evaluate_terms(partition_terms(stats, n_sources, m), n_sources, phi_delta);
}

// --- closed forms ------------------------------------------------------------

double g_tls_closed_at(int n_sources, int m, double nbar, double phi_delta) {
    require_orders(n_sources, m, "g_tls_closed");
    require_mean(nbar, "g_tls_closed");
    const double n = n_sources;
    const double prefactor = std::pow(nbar * n, m) * factorial(m - 1);
    return prefactor * (1.0 + (m - 1) / (n * n) * superradiant_ratio(n_sources, phi_delta));
}

CorrelationCurve g_tls_closed(int n_sources, int m, double nbar, std::span<const double> phi_grid) {
    require_orders(n_sources, m, "g_tls_closed");
    require_mean(nbar, "g_tls_closed");
    return sample(phi_grid,
                  {n_sources, m, PhotonStatistics::thermal(nbar).describe(), Normalization::raw, GridKind::phase_delta, "closed"},
                  [&](double phi) { return g_tls_closed_at(n_sources, m, nbar, phi); });
}

const ClsSums& cls_sums(int n_sources, int m) {
    require_orders(n_sources, m, "cls_sums");
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<ClsSums>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[{n_sources, m}];
    if (!slot) {
        BigInt diag = 0, cross = 0;
        for (const auto& s : enumerate_final_states(m, n_sources)) {
            const BigInt c = multinomial(m, s.counts);
            const BigInt c2 = c * c;
            diag += c2 * s.counts[0] * s.counts[0];
            if (n_sources >= 2) cross += c2 * s.counts[0] * s.counts[1];
        }
        slot = std::make_unique<ClsSums>(ClsSums{to_double(diag), to_double(cross)});
    }
    return *slot;
}

double g_cls_closed_at(int n_sources, int m, double nbar, double phi_delta) {
    require_mean(nbar, "g_cls_closed");
    const ClsSums& s = cls_sums(n_sources, m);
    const double n = n_sources;
    const double scale = std::pow(nbar, m) / (static_cast<double>(m) * m);
    return scale * (n * (s.diagonal - s.cross) + s.cross * superradiant_ratio(n_sources, phi_delta));
}

CorrelationCurve g_cls_closed(int n_sources, int m, double nbar, std::span<const double> phi_grid) {
    require_orders(n_sources, m, "g_cls_closed");
    require_mean(nbar, "g_cls_closed");
    cls_sums(n_sources, m);
    return sample(phi_grid,
                  {n_sources, m, PhotonStatistics::coherent(nbar).describe(), Normalization::raw, GridKind::phase_delta, "closed"},
                  [&](double phi) { return g_cls_closed_at(n_sources, m, nbar, phi); });
}

double g_cls_functional_at(int n_sources, int m, double nbar, double phi_delta) {
    require_orders(n_sources, m, "g_cls_functional");
    require_mean(nbar, "g_cls_functional");
    // the 1/(N-1) prefactor presumes N >= 2; one source is flat nbar^m
    if (n_sources == 1) return std::pow(nbar, m);
    const double n = n_sources;
    const double b_prev = to_double(bessel_moment(n_sources, m - 1));
    const double b_cur = to_double(bessel_moment(n_sources, m));
    const double s = superradiant_ratio(n_sources, phi_delta);
    return std::pow(nbar, m) / (n - 1.0) * (b_prev * (n * n - s) + b_cur * (s / n - 1.0));
}

CorrelationCurve g_cls_functional(int n_sources, int m, double nbar, std::span<const double> phi_grid) {
    require_orders(n_sources, m, "g_cls_functional");
    require_mean(nbar, "g_cls_functional");
    const auto meta = CurveMetadata{n_sources, m, PhotonStatistics::coherent(nbar).describe(), Normalization::raw,
                                    GridKind::phase_delta, "functional"};
    if (n_sources == 1) return sample(phi_grid, meta, [&](double) { return std::pow(nbar, m); });
    const double n = n_sources;
    const double b_prev = to_double(bessel_moment(n_sources, m - 1));
    const double b_cur = to_double(bessel_moment(n_sources, m));
    const double scale = std::pow(nbar, m) / (n - 1.0);
    return sample(phi_grid, meta, [&](double phi) {
        const double s = superradiant_ratio(n_sources, phi);
        return scale * (b_prev * (n * n - s) + b_cur * (s / n - 1.0));
    });
}

// --- permanent route ----------------------------------------------------------

double thermal_permanent_gm(const SourceChain& chain, std::span<const Detector> detectors, double nbar, int max_order) {
    require_mean(nbar, "thermal_permanent_gm");
    const int m = static_cast<int>(detectors.size());
    if (m < 1) throw std::invalid_argument("thermal_permanent_gm: need at least one detector");
    if (m > max_order)
        throw ResourceLimit("thermal_permanent_gm: order " + std::to_string(m) + " exceeds limit " +
                            std::to_string(max_order));
    const int n = chain.size();
    Eigen::MatrixXcd phases(n, m);
    for (int l = 0; l < n; ++l)
        for (int j = 0; j < m; ++j)
            phases(l, j) = std::polar(1.0, optical_phase(chain, l + 1, detectors[static_cast<std::size_t>(j)]));
    // Gamma_ij = nbar sum_l e^{i phi_li} e^{-i phi_lj}
    const Eigen::MatrixXcd gamma = nbar * (phases.transpose() * phases.conjugate());
    const std::complex<double> perm = permanent(gamma, max_order);
    const double tol = 1e-10 * std::max(1.0, std::abs(perm));
    if (std::abs(perm.imag()) > tol)
        throw NumericalError("thermal_permanent_gm: permanent has imaginary residue " + std::to_string(perm.imag()));
    return perm.real();
}

CorrelationCurve thermal_permanent_curve(const SourceChain& chain, int m, double nbar, double theta1,
                                         std::span<const double> phi_grid) {
    require_orders(chain.size(), m, "thermal_permanent_curve");
    return sample(phi_grid,
                  {chain.size(), m, PhotonStatistics::thermal(nbar).describe(), Normalization::raw, GridKind::phase_delta,
                   "permanent"},
                  [&](double phi) {
                      const auto dets = superradiant_detectors(m, theta1, theta2_for_phase(chain, theta1, phi));
                      return thermal_permanent_gm(chain, dets, nbar);
                  });
}

// --- normalization -------------------------------------------------------------

double g1_product(const PhotonStatistics& stats, int n_sources, int m) {
    return std::pow(n_sources * normally_ordered_moment(stats, 1), m);
}

double period_average(const std::function<double(double)>& g_of_phi, int nodes) {
    if (nodes < 1) throw std::invalid_argument("period_average: nodes must be >= 1");
    double sum = 0.0;
    for (int j = 0; j < nodes; ++j) sum += g_of_phi(-kPi + kTwoPi * j / nodes);
    return sum / nodes;
}

CorrelationCurve normalized(CorrelationCurve curve, Normalization mode, double scale) {
    if (!(scale > 0.0) || !std::isfinite(scale)) throw NumericalError("normalization scale must be positive");
    for (double& v : curve.values) v /= scale;
    curve.meta.normalization = mode;
    return curve;
}

// --- shape measures -------------------------------------------------------------

double visibility(const CorrelationCurve& curve) {
    if (curve.values.empty()) throw std::invalid_argument("visibility: empty curve");
    if (curve.meta.grid_kind == GridKind::phase_delta && curve.grid.back() - curve.grid.front() < kTwoPi - 1e-9)
        throw std::invalid_argument("visibility: phase grid must span a full period");
    const auto [lo, hi] = std::minmax_element(curve.values.begin(), curve.values.end());
    if (*hi + *lo <= 0.0) return 0.0;
    return (*hi - *lo) / (*hi + *lo);
}

double peak_width(const CorrelationCurve& theta_curve, const SourceChain& chain, double theta1) {
    const auto& g = theta_curve.grid;
    const auto& v = theta_curve.values;
    if (g.size() < 3 || g.size() != v.size()) throw std::invalid_argument("peak_width: curve too short");
    const int n = chain.size();
    const double predicted = kTwoPi / (n * chain.kd());
    double max_step = 0.0;
    for (std::size_t i = 1; i < g.size(); ++i) max_step = std::max(max_step, g[i] - g[i - 1]);
    if (max_step > predicted / 20.0)
        throw std::invalid_argument("peak_width: grid too coarse (need 20 points across 2pi/(N kd))");

    const double vmax = *std::max_element(v.begin(), v.end());
    std::size_t peak = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] >= vmax * (1.0 - 1e-9) && std::abs(g[i] - theta1) < best) {
            best = std::abs(g[i] - theta1);
            peak = i;
        }

    std::size_t left = peak;
    while (left > 0 && v[left - 1] < v[left]) --left;
    std::size_t right = peak;
    while (right + 1 < v.size() && v[right + 1] < v[right]) ++right;
    if (left == 0 || right + 1 == v.size())
        throw std::invalid_argument("peak_width: curve does not contain both flanking minima");

    const auto ratio = [&](double theta2) { return superradiant_ratio(n, delta_phase(chain, theta1, theta2)); };
    const int bits = std::numeric_limits<double>::digits / 2;
    const double theta_left = boost::math::tools::brent_find_minima(ratio, g[left - 1], g[left + 1], bits).first;
    const double theta_right = boost::math::tools::brent_find_minima(ratio, g[right - 1], g[right + 1], bits).first;
    return 0.5 * (theta_right - theta_left);
}

AngularAverage angular_average_tls(int n_sources, int m, double nbar, int nodes) {
    require_orders(n_sources, m, "angular_average_tls");
    if (nodes < 4096) throw std::invalid_argument("angular_average_tls: use at least 4096 nodes");
    const double n = n_sources;
    AngularAverage a;
    a.closed_form = std::pow(nbar * n, m) * factorial(m - 1) * (n + m - 1) / n;
    a.quadrature = period_average([&](double phi) { return g_tls_closed_at(n_sources, m, nbar, phi); }, nodes);
    a.peak_ratio = g_tls_closed_at(n_sources, m, nbar, 0.0) / a.closed_form;
    return a;
}

CorrelationCurve hbt_limit(double kD, std::span<const double> theta2_grid) {
    if (!(kD > 0.0)) throw std::invalid_argument("hbt_limit: kD must be positive");
    return sample(theta2_grid, {0, 2, "thermal", Normalization::by_g1_product, GridKind::theta2, "sinc2"},
                  [&](double theta2) {
                      const double u = 0.5 * kD * std::sin(theta2);
                      const double sinc = std::abs(u) < 1e-12 ? 1.0 : std::sin(u) / u;
                      return 1.0 + sinc * sinc;
                  });
}

CorrelationCurve hbt_chain_curve(int n_sources, double kD, std::span<const double> theta2_grid) {
    if (!(kD > 0.0)) throw std::invalid_argument("hbt_chain_curve: kD must be positive");
    const SourceChain chain = SourceChain::from_kd(n_sources, kD / n_sources);
    const double scale = std::pow(static_cast<double>(n_sources), 2);
    return sample(theta2_grid,
                  {n_sources, 2, "thermal", Normalization::by_g1_product, GridKind::theta2, "chain"},
                  [&](double theta2) {
                      return g_tls_closed_at(n_sources, 2, 1.0, delta_phase(chain, 0.0, theta2)) / scale;
                  });
}

HbtComparison hbt_compare(int n_sources, double kD, std::span<const double> theta2_grid) {
    const auto limit = hbt_limit(kD, theta2_grid);
    const auto chain = hbt_chain_curve(n_sources, kD, theta2_grid);
    HbtComparison cmp;
    for (std::size_t i = 0; i < theta2_grid.size(); ++i) {
        if (std::abs(0.5 * kD * std::sin(theta2_grid[i])) > 3.0 * kPi) continue;
        ++cmp.points_in_region;
        cmp.max_relative_deviation =
            std::max(cmp.max_relative_deviation, std::abs(chain.values[i] - limit.values[i]) / limit.values[i]);
    }
    return cmp;
}

} // namespace srcorr
