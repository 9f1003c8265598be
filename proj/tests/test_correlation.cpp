#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "srcorr/correlation.hpp"
#include "srcorr/errors.hpp"

using namespace srcorr;
using std::numbers::pi;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Oracle: the final-state sum with the explicit complex last-photon amplitude,
// (1/m^2) sum_{m_l} prod <:n^{m_l}:> C^2 |sum_l m_l e^{-i l phi}|^2.
double direct_gm(const PhotonStatistics& s, int n, int m, double phi) {
    double total = 0.0;
    for (const auto& st : enumerate_final_states(m, n)) {
        double moments = 1.0;
        for (int x : st.counts) moments *= normally_ordered_moment(s, x);
        if (moments == 0.0) continue;
        std::complex<double> amp{};
        for (int l = 0; l < n; ++l) amp += static_cast<double>(st.counts[static_cast<std::size_t>(l)]) * std::polar(1.0, -(l + 1) * phi);
        const double c = to_double(multinomial(m, st.counts));
        total += moments * c * c * std::norm(amp);
    }
    return total / (static_cast<double>(m) * m);
}

const std::vector<double> kProbe = {-pi, -2.0, -0.7, -1e-9, 0.0, 0.3, 1.1, 2.2, pi};

} // namespace

TEST_CASE("interference ratio") {
    CHECK(superradiant_ratio(5, 0.0) == 25.0);
    CHECK(superradiant_ratio(5, 2 * pi) == 25.0);
    CHECK(superradiant_ratio(5, 1e-10) == 25.0);
    CHECK(superradiant_ratio(4, 2 * pi / 4) == doctest::Approx(0.0));
    CHECK(superradiant_ratio(2, 0.8) == doctest::Approx(2 + 2 * std::cos(0.8)).epsilon(1e-14));
    // continuity across the branch
    CHECK(superradiant_ratio(7, 2e-8) == doctest::Approx(49.0).epsilon(1e-12));
}

TEST_CASE("kernel coefficients") {
    const auto a = kernel_coefficients(Partition{{1, 1}});
    CHECK(a.c1 == 2.0);
    CHECK(a.c2 == 1.0);
    const auto b = kernel_coefficients(Partition{{0, 2}});
    CHECK(b.c1 == 8.0);
    CHECK(b.c2 == 0.0);
    for (int m = 1; m <= 5; ++m) {
        const auto k = kernel_coefficients(Partition{{m}});
        CHECK(k.c1 == m * m);
        CHECK(k.c2 == 0.0);
    }
    // kernel equals the explicit permutation sum of |sum m_l e^{-i l phi}|^2
    for (const auto& p : enumerate_partitions(5, 4)) {
        const auto k = kernel_coefficients(p);
        for (double phi : kProbe) {
            double direct = 0.0;
            for (const auto& s : distinct_permutations(p)) {
                std::complex<double> amp{};
                for (int l = 0; l < 4; ++l) amp += static_cast<double>(s.counts[static_cast<std::size_t>(l)]) * std::polar(1.0, -(l + 1) * phi);
                direct += std::norm(amp);
            }
            CHECK(k(4, phi) == doctest::Approx(direct).epsilon(1e-12).scale(25));
        }
    }
}

TEST_CASE("partition route, two sources") {
    const auto grid = default_phase_grid();
    for (double nbar : {0.5, 1.0, 3.0}) {
        const auto t = g_general(PhotonStatistics::thermal(nbar), 2, 2, grid);
        const auto c = g_general(PhotonStatistics::coherent(nbar), 2, 2, grid);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double phi = grid[i];
            CHECK(rel(t.values[i] / std::pow(2 * nbar, 2), 1.5 * (1 + std::cos(phi) / 3)) < 1e-12);
            CHECK(rel(c.values[i], nbar * nbar * (4 + 2 * std::cos(phi))) < 1e-12);
        }
    }
    const auto s = g_general(PhotonStatistics::single_photon(), 2, 2, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(s.values[i] / 4.0 == doctest::Approx(0.5 * (1 + std::cos(grid[i]))).epsilon(1e-12).scale(1));
    CHECK(g_general_at(PhotonStatistics::single_photon(), 2, 2, pi) < 1e-12);
    CHECK(s.meta.route == "partition");
    CHECK(s.diagnostic.empty());
}

TEST_CASE("partition route agrees with the direct final-state sum") {
    const std::vector<PhotonStatistics> stats = {PhotonStatistics::thermal(0.7), PhotonStatistics::coherent(1.3),
                                                 PhotonStatistics::single_photon(),
                                                 PhotonStatistics::custom({0.3, 0.4, 0.2, 0.1})};
    for (const auto& s : stats)
        for (int n = 1; n <= 4; ++n)
            for (int m = 1; m <= 5; ++m) {
                if (s.is_custom() && m > 4) continue;
                for (double phi : kProbe) {
                    const double oracle = direct_gm(s, n, m, phi);
                    const double got = g_general_at(s, n, m, phi);
                    CAPTURE(s.describe());
                    CAPTURE(n);
                    CAPTURE(m);
                    CHECK(std::abs(got - oracle) <= 1e-11 * std::max(oracle, 1e-3));
                }
            }
}

TEST_CASE("single photon emitters beyond their photon content") {
    const auto c = g_general(PhotonStatistics::single_photon(), 2, 3, default_phase_grid());
    CHECK(!c.diagnostic.empty());
    CHECK(*std::max_element(c.values.begin(), c.values.end()) == 0.0);
}

TEST_CASE("thermal closed form") {
    for (int n = 1; n <= 5; ++n)
        for (int m = 1; m <= 6; ++m) {
            double fact = 1;
            for (int i = 2; i <= m; ++i) fact *= i;
            CHECK(rel(g_tls_closed_at(n, m, 0.8, 0.0), std::pow(0.8 * n, m) * fact) < 1e-13);
        }
    CHECK(g_tls_closed_at(2, 2, 1.0, pi) == doctest::Approx(4.0).epsilon(1e-14));
    const auto grid = default_phase_grid();
    for (int n = 1; n <= 5; ++n)
        for (int m = 1; m <= 6; ++m) {
            const auto a = g_tls_closed(n, m, 0.6, grid);
            const auto b = g_general(PhotonStatistics::thermal(0.6), n, m, grid);
            for (std::size_t i = 0; i < grid.size(); ++i) CHECK(rel(a.values[i], b.values[i]) < 1e-9);
        }
}

TEST_CASE("coherent closed form") {
    const auto grid = default_phase_grid();
    const auto g = g_cls_closed(2, 2, 1.0, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(rel(g.values[i], 4 + 2 * std::cos(grid[i])) < 1e-12);
    CHECK(cls_sums(2, 2).diagonal == 8.0);
    CHECK(cls_sums(2, 2).cross == 4.0);
    const auto flat = g_cls_closed(2, 1, 1.7, grid);
    for (double v : flat.values) CHECK(v == doctest::Approx(3.4).epsilon(1e-14));
    CHECK(visibility(g_cls_closed(2, 2, 1.0, commensurate_phase_grid(2))) == doctest::Approx(0.5).epsilon(1e-12));
    for (int n = 1; n <= 5; ++n)
        for (int m = 1; m <= 5; ++m)
            for (double phi : kProbe)
                CHECK(rel(g_cls_closed_at(n, m, 1.2, phi), g_general_at(PhotonStatistics::coherent(1.2), n, m, phi)) <
                      1e-9);
}

TEST_CASE("coherent functional route") {
    for (double phi : kProbe)
        CHECK(rel(g_cls_functional_at(2, 2, 1.0, phi), 2 + superradiant_ratio(2, phi)) < 1e-13);
    for (int n = 1; n <= 6; ++n)
        for (double phi : kProbe) CHECK(rel(g_cls_functional_at(n, 1, 0.9, phi), 0.9 * n) < 1e-12);
    for (int m = 1; m <= 4; ++m) CHECK(g_cls_functional_at(1, m, 2.0, 0.4) == std::pow(2.0, m));
    const auto grid = default_phase_grid();
    for (int n = 1; n <= 5; ++n)
        for (int m = 1; m <= 5; ++m) {
            const auto f = g_cls_functional(n, m, 1.0, grid);
            const auto c = g_cls_closed(n, m, 1.0, grid);
            for (std::size_t i = 0; i < grid.size(); ++i) CHECK(rel(f.values[i], c.values[i]) < 1e-9);
        }
}

TEST_CASE("permanent route") {
    const auto chain = SourceChain::from_kd(2, 2 * pi);
    const std::vector<Detector> one{Detector(0.3)};
    CHECK(thermal_permanent_gm(chain, one, 0.7) == doctest::Approx(1.4).epsilon(1e-14));
    const std::vector<Detector> coincident{Detector(0.2), Detector(0.2)};
    CHECK(thermal_permanent_gm(chain, coincident, 0.5) == doctest::Approx(8 * 0.25).epsilon(1e-13));
    CHECK(thermal_permanent_gm(chain, coincident, 0.5) ==
          doctest::Approx(g_tls_closed_at(2, 2, 0.5, 0.0)).epsilon(1e-13));
    const std::vector<Detector> many(21, Detector(0.0));
    CHECK_THROWS_AS(thermal_permanent_gm(chain, many, 1.0), ResourceLimit);

    const std::vector<double> grid = uniform_grid(-pi, pi, 33);
    for (int n = 1; n <= 5; ++n)
        for (int m = 1; m <= 6; ++m) {
            const auto ch = SourceChain::from_kd(n, 2 * pi);
            const auto p = thermal_permanent_curve(ch, m, 0.9, 0.0, grid);
            for (std::size_t i = 0; i < grid.size(); ++i)
                CHECK(rel(p.values[i], g_tls_closed_at(n, m, 0.9, grid[i])) < 1e-9);
        }
}

TEST_CASE("curve properties") {
    const auto grid = commensurate_phase_grid(60, 8);
    for (int n = 2; n <= 5; ++n)
        for (int m = 1; m <= 5; ++m) {
            for (const auto& c : {g_tls_closed(n, m, 1.0, grid), g_cls_closed(n, m, 1.0, grid),
                                  g_general(PhotonStatistics::single_photon(), n, m, grid)}) {
                CHECK_NOTHROW(c.validate());
                for (std::size_t i = 0; i < grid.size(); ++i) {
                    // even and 2pi periodic
                    CHECK(c.values[i] == doctest::Approx(c.values[grid.size() - 1 - i]).epsilon(1e-9));
                }
            }
            for (double phi : kProbe) {
                CHECK(g_tls_closed_at(n, m, 1.0, phi) == doctest::Approx(g_tls_closed_at(n, m, 1.0, phi + 2 * pi)));
                CHECK(g_tls_closed_at(n, m, 1.0, phi) > 0.0);
                CHECK(g_cls_closed_at(n, m, 1.0, phi) > 0.0);
            }
            // normalized thermal g2 bounded below by one
            if (m == 2) {
                const auto g = normalized(g_tls_closed(n, 2, 1.0, grid), Normalization::by_g1_product,
                                          g1_product(PhotonStatistics::thermal(1.0), n, 2));
                CHECK(*std::min_element(g.values.begin(), g.values.end()) >= 1.0 - 1e-12);
            }
        }
    for (int n = 2; n <= 6; ++n) {
        const auto spe = g_general(PhotonStatistics::single_photon(), n, n, commensurate_phase_grid(n));
        CHECK(*std::min_element(spe.values.begin(), spe.values.end()) < 1e-12);
    }
}

TEST_CASE("visibility") {
    CHECK(visibility(g_tls_closed(2, 2, 1.0, commensurate_phase_grid(2))) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    for (int m = 2; m <= 8; ++m) {
        const double expected = (m - 1.0) / (m + 1.0);
        for (int n = 2; n <= 6; ++n)
            CHECK(std::abs(visibility(g_tls_closed(n, m, 1.0, commensurate_phase_grid(n))) - expected) <= 1e-12);
    }
    for (int m = 2; m <= 6; ++m) {
        const auto grid = commensurate_phase_grid(m);
        const double spe = visibility(g_general(PhotonStatistics::single_photon(), m, m, grid));
        const double cls = visibility(g_cls_closed(m, m, 1.0, grid));
        const double tls = visibility(g_tls_closed(m, m, 1.0, grid));
        CHECK(spe == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(spe > cls);
        CHECK(cls > tls);
    }
    CHECK_THROWS_AS(visibility(CorrelationCurve{}), std::invalid_argument);
    CHECK_THROWS_AS(visibility(g_tls_closed(2, 2, 1.0, uniform_grid(0.0, 1.0, 10))), std::invalid_argument);
}

TEST_CASE("peak width") {
    const auto measure = [](int n, double kd) {
        const auto chain = SourceChain::from_kd(n, kd);
        const double predicted = 2 * pi / (n * kd);
        const auto theta = uniform_grid(-3 * predicted, 3 * predicted, 241);
        std::vector<double> phi;
        for (double t : theta) phi.push_back(delta_phase(chain, 0.0, t));
        auto curve = g_tls_closed(n, 3, 1.0, phi);
        curve.grid = theta;
        curve.meta.grid_kind = GridKind::theta2;
        return peak_width(curve, chain, 0.0);
    };
    const double w10 = measure(10, 2 * pi);
    CHECK(std::abs(w10 - 0.1) / 0.1 < 0.05);
    for (int n : {4, 8, 16, 32}) CHECK(std::abs(measure(n, 2 * pi) - 2 * pi / (n * 2 * pi)) / (1.0 / n) < 0.05);
    CHECK(std::abs(measure(20, 2 * pi) / w10 - 0.5) < 0.05 * 0.5);

    // N = 2: the flanking minima sit at phi = +-pi
    const auto chain2 = SourceChain::from_kd(2, 2 * pi);
    const auto theta = uniform_grid(-1.2, 1.2, 401);
    std::vector<double> phi;
    for (double t : theta) phi.push_back(delta_phase(chain2, 0.0, t));
    auto spe = g_general(PhotonStatistics::single_photon(), 2, 2, phi);
    spe.grid = theta;
    const double w2 = peak_width(spe, chain2, 0.0);
    CHECK(std::abs(delta_phase(chain2, 0.0, w2)) == doctest::Approx(pi).epsilon(1e-6));

    auto coarse = spe;
    coarse.grid = uniform_grid(-1.2, 1.2, 11);
    coarse.values.resize(11);
    CHECK_THROWS_AS(peak_width(coarse, chain2, 0.0), std::invalid_argument);
}

TEST_CASE("angular average") {
    const auto a = angular_average_tls(2, 2, 1.0);
    CHECK(a.closed_form == doctest::Approx(6.0).epsilon(1e-14));
    CHECK(a.peak_ratio == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    for (int n = 1; n <= 5; ++n)
        for (int m = 1; m <= 8; ++m) {
            const auto avg = angular_average_tls(n, m, 0.7);
            CHECK(rel(avg.quadrature, avg.closed_form) < 1e-9);
            CHECK(rel(avg.peak_ratio, static_cast<double>(m) * n / (n + m - 1)) < 1e-12);
        }
    const auto big = angular_average_tls(5, 50, 1.0);
    CHECK(big.peak_ratio == doctest::Approx(250.0 / 54.0).epsilon(1e-12));
    CHECK(std::abs(big.peak_ratio - 5.0) / 5.0 < 0.10);
    CHECK_THROWS_AS(angular_average_tls(2, 2, 1.0, 1000), std::invalid_argument);
}

TEST_CASE("normalization by period average") {
    const auto grid = commensurate_phase_grid(3);
    const double avg = period_average([](double phi) { return g_tls_closed_at(3, 3, 1.0, phi); });
    const auto c = normalized(g_tls_closed(3, 3, 1.0, grid), Normalization::by_angular_average, avg);
    CHECK(c.meta.normalization == Normalization::by_angular_average);
    CHECK(*std::max_element(c.values.begin(), c.values.end()) == doctest::Approx(9.0 / 5.0).epsilon(1e-9));
    CHECK_THROWS_AS(normalized(c, Normalization::raw, 0.0), NumericalError);
}

TEST_CASE("HBT limit") {
    const double kD = 20 * pi;
    const std::vector<double> zero{0.0};
    CHECK(hbt_limit(kD, zero).values[0] == 2.0);
    const std::vector<double> first_zero{std::asin(2 * pi / kD)};
    CHECK(hbt_limit(kD, first_zero).values[0] == doctest::Approx(1.0).epsilon(1e-14));
    const double edge = std::asin(6 * pi / kD);
    const auto grid = uniform_grid(-edge, edge, 1201);
    double prev = 1e300;
    for (int n : {50, 100, 200}) {
        const auto cmp = hbt_compare(n, kD, grid);
        CHECK(cmp.points_in_region == 1201);
        CHECK(cmp.max_relative_deviation < prev);
        prev = cmp.max_relative_deviation;
    }
    CHECK(prev < 0.01);
    CHECK(hbt_chain_curve(200, kD, zero).values[0] == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("grids") {
    const auto g = default_phase_grid();
    CHECK(g.size() == 1024);
    CHECK(g.front() == -pi);
    CHECK(g.back() == pi);
    const auto c = commensurate_phase_grid(3, 4);
    CHECK(c.size() == 13);
    CHECK(c[6] == 0.0);
    CHECK(c[10] == doctest::Approx(2 * pi / 3).epsilon(1e-15));
    CHECK_THROWS_AS(uniform_grid(1.0, 0.0, 5), std::invalid_argument);
}
