#include "srcorr/combinatorics.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

namespace srcorr {

namespace {

void require_sizes(int m, int n_sources, const char* what) {
    if (m < 0) throw std::invalid_argument(std::string(what) + ": m must be >= 0");
    if (n_sources < 1) throw std::invalid_argument(std::string(what) + ": N must be >= 1");
}

BigInt factorial(int n) {
    BigInt f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// Ascending part lists of length `slots` with each part >= `min_part`, summing to `remaining`.
void partitions_rec(int remaining, int slots, int min_part, std::vector<int>& prefix,
                    std::vector<Partition>& out) {
    if (slots == 1) {
        if (remaining >= min_part) {
            prefix.push_back(remaining);
            out.push_back(Partition{prefix});
            prefix.pop_back();
        }
        return;
    }
    // every later part is >= the current one
    for (int part = min_part; part * slots <= remaining; ++part) {
        prefix.push_back(part);
        partitions_rec(remaining - part, slots - 1, part, prefix, out);
        prefix.pop_back();
    }
}

void compositions_rec(int remaining, int slots, std::vector<int>& prefix, std::vector<FinalState>& out) {
    if (slots == 1) {
        prefix.push_back(remaining);
        out.push_back(FinalState{prefix});
        prefix.pop_back();
        return;
    }
    for (int part = 0; part <= remaining; ++part) {
        prefix.push_back(part);
        compositions_rec(remaining - part, slots - 1, prefix, out);
        prefix.pop_back();
    }
}

} // namespace

int Partition::order() const { return std::accumulate(parts.begin(), parts.end(), 0); }
int FinalState::order() const { return std::accumulate(counts.begin(), counts.end(), 0); }

std::vector<Partition> enumerate_partitions(int m, int n_sources) {
    require_sizes(m, n_sources, "enumerate_partitions");
    std::vector<Partition> out;
    std::vector<int> prefix;
    prefix.reserve(static_cast<std::size_t>(n_sources));
    partitions_rec(m, n_sources, 0, prefix, out);
    return out;
}

std::vector<FinalState> distinct_permutations(const Partition& p) {
    std::vector<int> cur = p.parts;
    std::sort(cur.begin(), cur.end());
    std::vector<FinalState> out;
    do {
        out.push_back(FinalState{cur});
    } while (std::next_permutation(cur.begin(), cur.end()));
    return out;
}

BigInt permutation_count(const Partition& p) {
    std::map<int, int> mult;
    for (int x : p.parts) ++mult[x];
    BigInt count = factorial(p.width());
    for (const auto& [part, k] : mult) count /= factorial(k);
    return count;
}

std::vector<FinalState> enumerate_final_states(int m, int n_sources) {
    require_sizes(m, n_sources, "enumerate_final_states");
    std::vector<FinalState> out;
    std::vector<int> prefix;
    compositions_rec(m, n_sources, prefix, out);
    return out;
}

BigInt binomial(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0;
    k = std::min(k, n - k);
    BigInt r = 1;
    for (int i = 1; i <= k; ++i) {
        r *= n - k + i;
        r /= i;
    }
    return r;
}

BigInt multinomial(int m, std::span<const int> counts) {
    int total = 0;
    for (int c : counts) {
        if (c < 0) throw std::invalid_argument("multinomial: negative count");
        total += c;
    }
    if (total != m)
        throw std::invalid_argument("multinomial: counts sum to " + std::to_string(total) + ", expected " +
                                    std::to_string(m));
    // product of binomials keeps intermediates small
    BigInt r = 1;
    int running = 0;
    for (int c : counts) {
        running += c;
        r *= binomial(running, c);
    }
    return r;
}

BigInt multinomial(std::span<const int> counts) {
    return multinomial(std::accumulate(counts.begin(), counts.end(), 0), counts);
}

PathCounts path_and_state_counts(int m, int n_sources) {
    require_sizes(m, n_sources, "path_and_state_counts");
    return {binomial(n_sources + m - 1, m), boost::multiprecision::pow(BigInt(n_sources), static_cast<unsigned>(m))};
}

PathCounts path_and_state_counts_enumerated(int m, int n_sources) {
    PathCounts c{0, 0};
    for (const auto& p : enumerate_partitions(m, n_sources))
        for (const auto& s : distinct_permutations(p)) {
            c.final_states += 1;
            c.total_paths += multinomial(m, s.counts);
        }
    return c;
}

BigInt multinomial_identity(int m, int n_sources, bool same_index) {
    if (m < 1) throw std::invalid_argument("multinomial_identity: m must be >= 1");
    require_sizes(m, n_sources, "multinomial_identity");
    if (!same_index && n_sources < 2) return 0;  // no distinct pair exists
    const std::size_t k = 0;
    const std::size_t kp = same_index ? 0 : 1;
    BigInt sum = 0;
    for (const auto& s : enumerate_final_states(m, n_sources))
        sum += multinomial(m, s.counts) * s.counts[k] * s.counts[kp];
    return sum;
}

BigInt multinomial_identity_closed(int m, int n_sources, bool same_index) {
    if (m < 1) throw std::invalid_argument("multinomial_identity_closed: m must be >= 1");
    require_sizes(m, n_sources, "multinomial_identity_closed");
    if (!same_index && n_sources < 2) return 0;
    // N^(m-2) is fractional for m = 1; divide at the end instead
    const BigInt nm = boost::multiprecision::pow(BigInt(n_sources), static_cast<unsigned>(m));
    const BigInt numer = nm * (same_index ? (m + n_sources - 1) : (m - 1)) * m;
    const BigInt denom = BigInt(n_sources) * n_sources;
    if (numer % denom != 0) throw std::logic_error("multinomial_identity_closed: non-integral value");
    return numer / denom;
}

BigInt walk_moment(int n_sources, int m) {
    require_sizes(m, n_sources, "walk_moment");
    BigInt sum = 0;
    for (const auto& p : enumerate_partitions(m, n_sources)) {
        const BigInt c = multinomial(m, p.parts);
        sum += permutation_count(p) * c * c;
    }
    return sum;
}

BigInt bessel_moment(int n_sources, int m) {
    require_sizes(m, n_sources, "bessel_moment");
    std::vector<BigRational> b(static_cast<std::size_t>(m) + 1);
    b[0] = 1;
    for (int j = 1; j <= m; ++j) {
        BigRational acc = 0;
        for (int k = 1; k <= j; ++k) {
            const BigRational bracket = BigRational(BigInt(k) * (n_sources + 1), BigInt(j)) - 1;
            const BigInt c = binomial(j, k);
            acc += bracket * BigRational(c * c) * b[static_cast<std::size_t>(j - k)];
        }
        b[static_cast<std::size_t>(j)] = acc;
    }
    const BigRational& r = b.back();
    if (boost::multiprecision::denominator(r) != 1)
        throw std::logic_error("bessel_moment: recurrence produced a non-integer");
    return boost::multiprecision::numerator(r);
}

double to_double(const BigInt& v) { return v.convert_to<double>(); }

} // namespace srcorr
