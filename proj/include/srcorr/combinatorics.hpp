#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace srcorr {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// Partition of m into at most N parts, zero padded to N and sorted ascending.
struct Partition {
    std::vector<int> parts;

    int order() const;
    int width() const { return static_cast<int>(parts.size()); }
    friend bool operator==(const Partition&, const Partition&) = default;
    friend auto operator<=>(const Partition&, const Partition&) = default;
};

/// Photons emitted per source, m_1..m_N.
struct FinalState {
    std::vector<int> counts;

    int order() const;
    friend bool operator==(const FinalState&, const FinalState&) = default;
    friend auto operator<=>(const FinalState&, const FinalState&) = default;
};

/// All partitions of m into <= N parts in lexicographic order of the
/// ascending part lists. m = 0 yields the single all-zero partition.
std::vector<Partition> enumerate_partitions(int m, int n_sources);

/// Distinct arrangements of the parts over the N source slots, lexicographic.
std::vector<FinalState> distinct_permutations(const Partition& p);

/// Number of distinct arrangements, N! / prod(multiplicity!).
BigInt permutation_count(const Partition& p);

/// Every final state with sum m over N sources (all compositions), lexicographic.
std::vector<FinalState> enumerate_final_states(int m, int n_sources);

BigInt binomial(int n, int k);

/// m! / (m_1! ... m_N!). Throws std::invalid_argument if the counts do not sum to m.
BigInt multinomial(int m, std::span<const int> counts);
BigInt multinomial(std::span<const int> counts);

struct PathCounts {
    BigInt final_states;  ///< C(N+m-1, m)
    BigInt total_paths;   ///< N^m
    friend bool operator==(const PathCounts&, const PathCounts&) = default;
};

/// Closed-form counts of final states and m-photon quantum paths.
PathCounts path_and_state_counts(int m, int n_sources);
/// The same counts obtained by walking every partition and its permutations.
PathCounts path_and_state_counts_enumerated(int m, int n_sources);

/// sum over final states of multinomial(m; counts) * m_k * m_k', by brute force.
/// `same_index` selects k = k' (otherwise k = 1, k' = 2).
BigInt multinomial_identity(int m, int n_sources, bool same_index);
/// N^(m-2) (m+N-1) m  or  N^(m-2) (m-1) m.
BigInt multinomial_identity_closed(int m, int n_sources, bool same_index);

/// 2m-th moment of an N-step unit random walk, sum of squared multinomials.
BigInt walk_moment(int n_sources, int m);

/// B_m(N) from its recurrence, evaluated in exact rationals.
BigInt bessel_moment(int n_sources, int m);

double to_double(const BigInt& v);

} // namespace srcorr
