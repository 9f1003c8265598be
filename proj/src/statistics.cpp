#include "srcorr/statistics.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace srcorr {

namespace {

constexpr double kCustomSumTolerance = 1e-12;

template <class... Ts>
struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_mean(double mean, const char* what) {
    if (!(mean > 0.0) || !std::isfinite(mean))
        throw std::invalid_argument(std::string(what) + ": mean photon number must be positive");
}

double factorial(int p) {
    double f = 1.0;
    for (int i = 2; i <= p; ++i) f *= i;
    return f;
}

} // namespace

PhotonStatistics PhotonStatistics::single_photon() { return PhotonStatistics(SinglePhoton{}); }

PhotonStatistics PhotonStatistics::thermal(double mean) {
    require_mean(mean, "thermal");
    return PhotonStatistics(Thermal{mean});
}

PhotonStatistics PhotonStatistics::coherent(double mean) {
    require_mean(mean, "coherent");
    return PhotonStatistics(Coherent{mean});
}

PhotonStatistics PhotonStatistics::custom(std::vector<double> table) {
    if (table.empty()) throw std::invalid_argument("custom statistics: empty table");
    for (double p : table)
        if (!(p >= 0.0) || !std::isfinite(p))
            throw std::invalid_argument("custom statistics: probabilities must be nonnegative");
    const double total = std::accumulate(table.begin(), table.end(), 0.0);
    if (std::abs(total - 1.0) > kCustomSumTolerance) {
        std::ostringstream os;
        os.precision(17);
        os << "custom statistics: probabilities sum to " << total << ", expected 1";
        throw std::invalid_argument(os.str());
    }
    return PhotonStatistics(Custom{std::move(table)});
}

PhotonStatistics PhotonStatistics::load_custom(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::invalid_argument("custom statistics: cannot open " + file.string());
    std::vector<double> table;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::size_t used = 0;
        double p = 0.0;
        try {
            p = std::stod(line.substr(first), &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("custom statistics: bad number on line " + std::to_string(lineno));
        }
        if (line.find_first_not_of(" \t\r", first + used) != std::string::npos)
            throw std::invalid_argument("custom statistics: trailing text on line " + std::to_string(lineno));
        table.push_back(p);
    }
    return custom(std::move(table));
}

double PhotonStatistics::mean() const { return normally_ordered_moment(*this, 1); }

double PhotonStatistics::probability(int n) const {
    if (n < 0) return 0.0;
    return std::visit(overloaded{
        [n](const SinglePhoton&) { return n == 1 ? 1.0 : 0.0; },
        [n](const Thermal& t) {
            return std::pow(t.mean / (1.0 + t.mean), n) / (1.0 + t.mean);
        },
        [n](const Coherent& c) {
            return std::exp(n * std::log(c.mean) - c.mean - std::lgamma(n + 1.0));
        },
        [n](const Custom& c) {
            return static_cast<std::size_t>(n) < c.table.size() ? c.table[static_cast<std::size_t>(n)] : 0.0;
        },
    }, v_);
}

double PhotonStatistics::tail_mass(int n_max) const {
    return std::visit(overloaded{
        [n_max](const SinglePhoton&) { return n_max >= 1 ? 0.0 : 1.0; },
        [n_max](const Thermal& t) { return std::pow(t.mean / (1.0 + t.mean), n_max + 1); },
        [this, n_max](const Coherent& c) {
            // Sum the tail directly; the head sum loses everything below 1e-16.
            double tail = 0.0;
            const int stop = n_max + 1 + static_cast<int>(20.0 * c.mean + 200.0);
            for (int n = n_max + 1; n < stop; ++n) tail += probability(n);
            return tail;
        },
        [n_max](const Custom& c) {
            double tail = 0.0;
            for (std::size_t n = static_cast<std::size_t>(n_max) + 1; n < c.table.size(); ++n) tail += c.table[n];
            return tail;
        },
    }, v_);
}

int PhotonStatistics::cutoff_for_tail(double bound) const {
    if (is_single_photon()) return 1;
    if (const auto* c = std::get_if<Custom>(&v_)) {
        for (int n = 0; n < static_cast<int>(c->table.size()); ++n)
            if (tail_mass(n) < bound) return n;
        return static_cast<int>(c->table.size()) - 1;
    }
    if (const auto* t = std::get_if<Thermal>(&v_)) {
        int n = static_cast<int>(std::ceil(std::log(bound) / std::log(t->mean / (1.0 + t->mean)))) - 1;
        n = std::max(n, 0);
        while (tail_mass(n) >= bound) ++n;
        while (n > 0 && tail_mass(n - 1) < bound) --n;
        return n;
    }
    int n = 0;
    while (tail_mass(n) >= bound) ++n;
    return n;
}

std::string PhotonStatistics::name() const {
    return std::visit(overloaded{
        [](const SinglePhoton&) { return std::string("spe"); },
        [](const Thermal&) { return std::string("thermal"); },
        [](const Coherent&) { return std::string("coherent"); },
        [](const Custom&) { return std::string("custom"); },
    }, v_);
}

std::string PhotonStatistics::describe() const {
    std::ostringstream os;
    os.precision(17);
    os << name();
    if (is_thermal() || is_coherent()) os << "(nbar=" << mean() << ")";
    if (const auto* c = std::get_if<Custom>(&v_)) os << "(n_max=" << c->table.size() - 1 << ")";
    return os.str();
}

double normally_ordered_moment(const PhotonStatistics& stats, int order) {
    if (order < 0) throw std::invalid_argument("normally_ordered_moment: order must be >= 0");
    if (order == 0) return 1.0;
    return std::visit(overloaded{
        [order](const SinglePhoton&) { return order == 1 ? 1.0 : 0.0; },
        [order](const Thermal& t) { return factorial(order) * std::pow(t.mean, order); },
        [order](const Coherent& c) { return std::pow(c.mean, order); },
        [order](const Custom& c) {
            if (static_cast<std::size_t>(order) > c.table.size())
                throw std::out_of_range("normally_ordered_moment: custom table too short for order " +
                                        std::to_string(order));
            double sum = 0.0;
            for (std::size_t n = static_cast<std::size_t>(order); n < c.table.size(); ++n) {
                double falling = 1.0;
                for (int j = 0; j < order; ++j) falling *= static_cast<double>(n) - j;
                sum += c.table[n] * falling;
            }
            return sum;
        },
    }, stats.variant());
}

} // namespace srcorr
