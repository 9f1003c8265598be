#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace srcorr {

struct SinglePhoton {};      ///< fully excited two-level emitter, exactly one photon
struct Thermal { double mean; };
struct Coherent { double mean; };   ///< mean = |alpha|^2
struct Custom { std::vector<double> table; };  ///< P(0..n_max)

/// Photon-number distribution of one source. Identical for all sources of a chain.
class PhotonStatistics {
public:
    using Variant = std::variant<SinglePhoton, Thermal, Coherent, Custom>;

    static PhotonStatistics single_photon();
    static PhotonStatistics thermal(double mean);
    static PhotonStatistics coherent(double mean);
    static PhotonStatistics custom(std::vector<double> table);
    /// Plain text, one probability per line for n = 0, 1, 2, ...
    static PhotonStatistics load_custom(const std::filesystem::path& file);

    const Variant& variant() const noexcept { return v_; }
    bool is_single_photon() const noexcept { return std::holds_alternative<SinglePhoton>(v_); }
    bool is_thermal() const noexcept { return std::holds_alternative<Thermal>(v_); }
    bool is_coherent() const noexcept { return std::holds_alternative<Coherent>(v_); }
    bool is_custom() const noexcept { return std::holds_alternative<Custom>(v_); }
    /// Thermal or coherent, i.e. sources with a positive P representation.
    bool is_classical() const noexcept { return is_thermal() || is_coherent(); }

    double mean() const;
    /// P(n).
    double probability(int n) const;
    /// Sum of P(n) for n > n_max.
    double tail_mass(int n_max) const;
    /// Smallest n_max whose tail mass is below `bound`.
    int cutoff_for_tail(double bound) const;

    std::string name() const;     ///< spe | thermal | coherent | custom
    std::string describe() const; ///< name plus parameters

private:
    explicit PhotonStatistics(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

/// Factorial moment <:n^p:> = sum_n P(n) n(n-1)...(n-p+1).
double normally_ordered_moment(const PhotonStatistics& stats, int order);

} // namespace srcorr
