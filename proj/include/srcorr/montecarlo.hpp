#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "srcorr/geometry.hpp"
#include "srcorr/statistics.hpp"

namespace srcorr {

struct McConfig {
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 20240601;
    std::uint64_t batch = 10'000;  ///< samples per reduction block
    unsigned workers = 0;          ///< 0 = hardware concurrency

    /// Throws std::invalid_argument unless samples >= batch >= 1.
    void validate() const;
};

/// Batch-means estimate. std_error is +inf when fewer than two batches exist.
struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
};

using McRng = std::mt19937_64;

/// Independent generator for one batch, derived from (seed, batch index) only.
McRng batch_stream(std::uint64_t seed, std::uint64_t batch_index);

/// One draw of source amplitudes from the positive P distribution:
/// thermal -> circular Gaussian with <|alpha|^2> = nbar,
/// coherent -> |alpha| = sqrt(nbar) with uniform phase.
/// Throws UnsupportedStatistics for anything else.
std::vector<std::complex<double>> sample_amplitudes(const PhotonStatistics& stats, int n_sources, McRng& rng);

/// P-average of prod_j I(r_j), I(r) = |sum_l alpha_l e^{i phi_l(r)}|^2.
McEstimate mc_gm(const SourceChain& chain, std::span<const Detector> detectors, const PhotonStatistics& stats,
                 const McConfig& cfg);

/// One estimate per scan detector of <prod_fixed I * I(scan)>, all sharing the
/// same samples.
std::vector<McEstimate> mc_gm_scan(const SourceChain& chain, std::span<const Detector> fixed,
                                   std::span<const Detector> scan, const PhotonStatistics& stats,
                                   const McConfig& cfg);

/// Average of |sum_k e^{2 pi i x_k}|^(2m) over uniform x in [0,1)^N.
McEstimate mc_walk_moment(int n_sources, int m, const McConfig& cfg);

} // namespace srcorr
