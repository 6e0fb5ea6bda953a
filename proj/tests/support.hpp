#pragma once

// Shared generators for property tests. Fixed seeds keep runs reproducible.

#include "emtower/fgab.hpp"
#include "emtower/intlin.hpp"
#include "oracles.hpp"

#include <random>
#include <vector>

namespace support {

using emtower::FgAbGroup;
using emtower::IntMatrix;
using emtower::Integer;

inline IntMatrix random_matrix(std::mt19937_64& rng, std::size_t max_dim, int bound) {
    std::uniform_int_distribution<std::size_t> dim(0, max_dim);
    std::uniform_int_distribution<int> entry(-bound, bound);
    std::size_t r = dim(rng), c = dim(rng);
    std::vector<Integer> e(r * c);
    for (auto& v : e) v = entry(rng);
    return IntMatrix(r, c, std::move(e));
}

/// Every group with torsion order <= max_order and free rank <= max_rank.
inline std::vector<FgAbGroup> group_universe(long long max_order, std::size_t max_rank) {
    std::vector<FgAbGroup> out;
    for (long long n = 1; n <= max_order; ++n) {
        std::vector<std::vector<long long>> chains;
        std::vector<long long> cur;
        oracle::chains_of_order(n, 1, cur, chains);
        for (const auto& chain : chains)
            for (std::size_t r = 0; r <= max_rank; ++r) {
                std::vector<Integer> t(chain.begin(), chain.end());
                out.push_back(FgAbGroup::from_chain(r, t));
            }
    }
    return out;
}

inline FgAbGroup random_group(std::mt19937_64& rng, long long max_order, std::size_t max_rank) {
    static thread_local std::vector<FgAbGroup> cache;
    static thread_local long long cached_order = -1;
    static thread_local std::size_t cached_rank = 0;
    if (cached_order != max_order || cached_rank != max_rank) {
        cache = group_universe(max_order, max_rank);
        cached_order = max_order;
        cached_rank = max_rank;
    }
    std::uniform_int_distribution<std::size_t> pick(0, cache.size() - 1);
    return cache[pick(rng)];
}

inline bool unimodular(const IntMatrix& m) {
    if (m.rows() != m.cols()) return false;
    Integer d = oracle::laplace_det(m);
    return d == 1 || d == -1;
}

} // namespace support
