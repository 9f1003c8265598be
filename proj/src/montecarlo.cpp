#include "srcorr/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>

#include "srcorr/errors.hpp"

namespace srcorr {

namespace {

// Kernel fills `acc` (one slot per estimated quantity) with sums over `count` samples.
using BatchKernel = std::function<void(McRng&, std::uint64_t count, std::span<double> acc)>;

std::vector<McEstimate> run_batches(const McConfig& cfg, std::size_t quantities, const BatchKernel& kernel) {
    cfg.validate();
    const std::uint64_t n_batches = cfg.samples / cfg.batch;
    const std::uint64_t last_extra = cfg.samples % cfg.batch;
    std::vector<double> sums(n_batches * quantities, 0.0);

    std::atomic<std::uint64_t> next{0};
    const auto work = [&] {
        for (std::uint64_t b = next++; b < n_batches; b = next++) {
            McRng rng = batch_stream(cfg.seed, b);
            const std::uint64_t count = cfg.batch + (b + 1 == n_batches ? last_extra : 0);
            kernel(rng, count, std::span<double>(sums.data() + b * quantities, quantities));
        }
    };
    unsigned workers = cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, n_batches));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }

    // fixed-order reduction
    std::vector<McEstimate> out(quantities);
    for (std::size_t q = 0; q < quantities; ++q) {
        double total = 0.0;
        for (std::uint64_t b = 0; b < n_batches; ++b) total += sums[b * quantities + q];
        const double mean = total / static_cast<double>(cfg.samples);
        if (!std::isfinite(mean)) throw std::overflow_error("Monte Carlo estimate overflowed");
        double ss = 0.0;
        for (std::uint64_t b = 0; b < n_batches; ++b) {
            const double nb = static_cast<double>(cfg.batch + (b + 1 == n_batches ? last_extra : 0));
            const double bm = sums[b * quantities + q] / nb;
            ss += nb * (bm - mean) * (bm - mean);
        }
        double se = std::numeric_limits<double>::infinity();
        if (n_batches >= 2) se = std::sqrt(ss / (static_cast<double>(n_batches - 1) * static_cast<double>(cfg.samples)));
        out[q] = {mean, se, cfg.samples};
    }
    return out;
}

void require_classical(const PhotonStatistics& stats) {
    if (!stats.is_classical())
        throw UnsupportedStatistics("Monte Carlo needs a positive P function; '" + stats.name() +
                                    "' statistics are not representable by classical amplitudes");
}

// Rough size of the largest intensity product, used to reject inputs that
// would overflow double before any sampling happens.
void guard_overflow(const PhotonStatistics& stats, int n_sources, std::size_t detectors) {
    const double typical = n_sources * n_sources * stats.mean() * 50.0;
    if (static_cast<double>(detectors) * std::log(std::max(typical, 1.0)) > 600.0)
        throw std::overflow_error("Monte Carlo: intensity products would overflow for this m and nbar");
}

std::vector<std::vector<std::complex<double>>> phase_table(const SourceChain& chain, std::span<const Detector> dets) {
    std::vector<std::vector<std::complex<double>>> t;
    t.reserve(dets.size());
    for (const auto& d : dets) {
        std::vector<std::complex<double>> row;
        for (int l = 1; l <= chain.size(); ++l) row.push_back(std::polar(1.0, optical_phase(chain, l, d)));
        t.push_back(std::move(row));
    }
    return t;
}

double intensity(std::span<const std::complex<double>> alpha, std::span<const std::complex<double>> phases) {
    std::complex<double> e{};
    for (std::size_t l = 0; l < alpha.size(); ++l) e += alpha[l] * phases[l];
    return std::norm(e);
}

void fill_amplitudes(const PhotonStatistics& stats, McRng& rng, std::normal_distribution<double>& normal,
                     std::uniform_real_distribution<double>& phase, std::span<std::complex<double>> out) {
    if (stats.is_thermal()) {
        for (auto& a : out) {
            const double re = normal(rng);
            const double im = normal(rng);
            a = {re, im};
        }
    } else {
        const double amp = std::sqrt(stats.mean());
        for (auto& a : out) a = std::polar(amp, phase(rng));
    }
}

} // namespace

void McConfig::validate() const {
    if (batch < 1) throw std::invalid_argument("McConfig: batch must be >= 1");
    if (samples < batch) throw std::invalid_argument("McConfig: samples must be >= batch");
}

McRng batch_stream(std::uint64_t seed, std::uint64_t batch_index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(batch_index), static_cast<std::uint32_t>(batch_index >> 32),
                      0x5eedu};
    return McRng(seq);
}

std::vector<std::complex<double>> sample_amplitudes(const PhotonStatistics& stats, int n_sources, McRng& rng) {
    require_classical(stats);
    if (n_sources < 1) throw std::invalid_argument("sample_amplitudes: N must be >= 1");
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5 * stats.mean()));
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::vector<std::complex<double>> a(static_cast<std::size_t>(n_sources));
    fill_amplitudes(stats, rng, normal, phase, a);
    return a;
}

std::vector<McEstimate> mc_gm_scan(const SourceChain& chain, std::span<const Detector> fixed,
                                   std::span<const Detector> scan, const PhotonStatistics& stats,
                                   const McConfig& cfg) {
    require_classical(stats);
    if (scan.empty()) throw std::invalid_argument("mc_gm_scan: no scan detectors");
    guard_overflow(stats, chain.size(), fixed.size() + 1);
    const auto fixed_phases = phase_table(chain, fixed);
    const auto scan_phases = phase_table(chain, scan);
    const int n = chain.size();
    return run_batches(cfg, scan.size(), [&](McRng& rng, std::uint64_t count, std::span<double> acc) {
        std::normal_distribution<double> normal(0.0, std::sqrt(0.5 * stats.mean()));
        std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
        std::vector<std::complex<double>> alpha(static_cast<std::size_t>(n));
        for (std::uint64_t s = 0; s < count; ++s) {
            fill_amplitudes(stats, rng, normal, phase, alpha);
            double prod = 1.0;
            for (const auto& ph : fixed_phases) prod *= intensity(alpha, ph);
            for (std::size_t j = 0; j < scan_phases.size(); ++j) acc[j] += prod * intensity(alpha, scan_phases[j]);
        }
    });
}

McEstimate mc_gm(const SourceChain& chain, std::span<const Detector> detectors, const PhotonStatistics& stats,
                 const McConfig& cfg) {
    if (detectors.empty()) throw std::invalid_argument("mc_gm: need at least one detector");
    return mc_gm_scan(chain, detectors.first(detectors.size() - 1), detectors.last(1), stats, cfg).front();
}

McEstimate mc_walk_moment(int n_sources, int m, const McConfig& cfg) {
    if (n_sources < 1 || m < 0) throw std::invalid_argument("mc_walk_moment: need N >= 1, m >= 0");
    return run_batches(cfg, 1, [&](McRng& rng, std::uint64_t count, std::span<double> acc) {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (std::uint64_t s = 0; s < count; ++s) {
            std::complex<double> z{};
            for (int k = 0; k < n_sources; ++k) z += std::polar(1.0, 2.0 * std::numbers::pi * unit(rng));
            acc[0] += std::pow(std::norm(z), m);
        }
    }).front();
}

} // namespace srcorr
