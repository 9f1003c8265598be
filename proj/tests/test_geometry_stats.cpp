#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "srcorr/geometry.hpp"
#include "srcorr/statistics.hpp"

using namespace srcorr;
using std::numbers::pi;

TEST_CASE("optical phase is l kd sin(theta)") {
    const auto chain = SourceChain::from_kd(3, 2 * pi);
    CHECK(optical_phase(chain, 1, Detector(0.0)) == 0.0);
    CHECK(optical_phase(chain, 2, Detector(pi / 6)) == doctest::Approx(2 * pi).epsilon(1e-15));
    const auto half = SourceChain::from_kd(3, pi);
    CHECK(optical_phase(half, 3, Detector(pi / 2)) == doctest::Approx(3 * pi).epsilon(1e-15));
}

TEST_CASE("physical units enter only through kd") {
    const SourceChain a(4, 3.0, 2.0);
    const SourceChain b = SourceChain::from_kd(4, 6.0);
    CHECK(a.position(4) == 12.0);
    CHECK(optical_phase(a, 4, Detector(0.3)) == doctest::Approx(optical_phase(b, 4, Detector(0.3))).epsilon(1e-15));
}

TEST_CASE("source index and geometry validation") {
    const auto chain = SourceChain::from_kd(3, 1.0);
    CHECK_THROWS_AS(optical_phase(chain, 0, Detector(0.1)), std::out_of_range);
    CHECK_THROWS_AS(optical_phase(chain, 4, Detector(0.1)), std::out_of_range);
    CHECK_THROWS_AS(SourceChain(0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(SourceChain(2, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(SourceChain(2, 1.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(Detector(2.0), std::invalid_argument);
}

TEST_CASE("delta phase") {
    const auto chain = SourceChain::from_kd(2, 2 * pi);
    CHECK(delta_phase(chain, 0.4, 0.4) == 0.0);
    CHECK(delta_phase(chain, pi / 6, 0.0) == doctest::Approx(pi).epsilon(1e-15));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> angle(-pi / 2, pi / 2);
    for (int i = 0; i < 200; ++i) {
        const double t1 = angle(rng), t2 = angle(rng);
        const double d = delta_phase(chain, t1, t2);
        CHECK(d == doctest::Approx(optical_phase(chain, 1, Detector(t1)) - optical_phase(chain, 1, Detector(t2)))
                       .epsilon(1e-12));
        CHECK(d == -delta_phase(chain, t2, t1));
        // the relative phase is the same from every source once divided by l
        const double l2 = (optical_phase(chain, 2, Detector(t1)) - optical_phase(chain, 2, Detector(t2))) / 2;
        CHECK(l2 == doctest::Approx(d).epsilon(1e-12));
    }
}

TEST_CASE("theta2 for a requested phase round-trips") {
    const auto chain = SourceChain::from_kd(5, 2 * pi);
    for (double phi : {-pi, -1.0, 0.0, 0.5, pi}) {
        const double t2 = theta2_for_phase(chain, 0.1, phi);
        CHECK(delta_phase(chain, 0.1, t2) == doctest::Approx(phi).epsilon(1e-12));
    }
    CHECK_THROWS_AS(theta2_for_phase(SourceChain::from_kd(2, 0.5), 0.0, pi), std::domain_error);
}

TEST_CASE("normally ordered moments, named values") {
    CHECK(normally_ordered_moment(PhotonStatistics::thermal(1.0), 2) == 2.0);
    CHECK(normally_ordered_moment(PhotonStatistics::coherent(1.0), 3) == 1.0);
    CHECK(normally_ordered_moment(PhotonStatistics::single_photon(), 2) == 0.0);
    CHECK(normally_ordered_moment(PhotonStatistics::single_photon(), 1) == 1.0);
    for (const auto& s : {PhotonStatistics::single_photon(), PhotonStatistics::thermal(0.3),
                          PhotonStatistics::coherent(2.0), PhotonStatistics::custom({0.2, 0.5, 0.3})})
        CHECK(normally_ordered_moment(s, 0) == 1.0);
    CHECK_THROWS_AS(normally_ordered_moment(PhotonStatistics::thermal(1.0), -1), std::invalid_argument);
}

// Independent route: materialize P(n) until the tail is below 1e-12 and sum
// the falling factorials directly.
double direct_moment(const PhotonStatistics& s, int p) {
    double sum = 0.0, mass = 0.0;
    for (int n = 0; n < 100000; ++n) {
        const double pn = s.probability(n);
        mass += pn;
        double falling = 1.0;
        for (int j = 0; j < p; ++j) falling *= n - j;
        sum += pn * falling;
        if (n > 10 && 1.0 - mass < 1e-12 && s.tail_mass(n) < 1e-12 && pn * std::pow(n + 1.0, p) < 1e-15 * sum) break;
    }
    return sum;
}

TEST_CASE("closed-form moments agree with direct table sums") {
    for (double nbar : {0.1, 0.5, 1.0, 2.5}) {
        for (int p = 0; p <= 6; ++p) {
            const auto t = PhotonStatistics::thermal(nbar);
            const auto c = PhotonStatistics::coherent(nbar);
            CHECK(normally_ordered_moment(t, p) == doctest::Approx(direct_moment(t, p)).epsilon(1e-9));
            CHECK(normally_ordered_moment(c, p) == doctest::Approx(direct_moment(c, p)).epsilon(1e-9));
        }
    }
}

TEST_CASE("thermal table follows Bose-Einstein") {
    const auto t = PhotonStatistics::thermal(0.5);
    CHECK(t.probability(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(t.probability(3) == doctest::Approx((2.0 / 3.0) * std::pow(1.0 / 3.0, 3)).epsilon(1e-14));
    CHECK(t.tail_mass(20) < 1e-10);
    CHECK(t.cutoff_for_tail(1e-10) == 20);
    CHECK(t.mean() == doctest::Approx(0.5));
}

TEST_CASE("custom statistics") {
    const auto c = PhotonStatistics::custom({0.25, 0.5, 0.25});
    CHECK(normally_ordered_moment(c, 1) == doctest::Approx(1.0));
    CHECK(normally_ordered_moment(c, 2) == doctest::Approx(0.5));
    CHECK(normally_ordered_moment(c, 3) == 0.0);
    CHECK_THROWS_AS(normally_ordered_moment(c, 4), std::out_of_range);
    CHECK_THROWS_AS(PhotonStatistics::custom({0.5, 0.4}), std::invalid_argument);
    CHECK_THROWS_AS(PhotonStatistics::custom({1.1, -0.1}), std::invalid_argument);
    CHECK_NOTHROW(PhotonStatistics::custom({0.5, 0.5 + 5e-13}));

    const auto path = std::filesystem::temp_directory_path() / "srcorr_custom_stats.txt";
    {
        std::ofstream f(path);
        f << "0.25\n0.5\n\n0.25\n";
    }
    const auto loaded = PhotonStatistics::load_custom(path);
    CHECK(loaded.is_custom());
    CHECK(loaded.probability(1) == 0.5);
    {
        std::ofstream f(path);
        f << "0.25\nabc\n";
    }
    CHECK_THROWS_AS(PhotonStatistics::load_custom(path), std::invalid_argument);
    std::filesystem::remove(path);
}

TEST_CASE("mean must be positive") {
    CHECK_THROWS_AS(PhotonStatistics::thermal(0.0), std::invalid_argument);
    CHECK_THROWS_AS(PhotonStatistics::coherent(-1.0), std::invalid_argument);
}
