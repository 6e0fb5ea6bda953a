// Extension enumeration. For finite abelian p-groups of types mu, nu, a
// group of type lambda has a subgroup of type mu with quotient of type nu
// exactly when the Littlewood-Richardson coefficient c^lambda_{mu nu} is
// nonzero, so candidates are assembled prime by prime.

#include "emtower/errors.hpp"
#include "emtower/fgab.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace emtower {

namespace {

const Integer kOrderCap = 1000000;

// Exponents of p in the invariant factors, as a partition.
std::vector<int> p_type(const FgAbGroup& g, const Integer& p) {
    std::vector<int> out;
    for (const auto& d : g.torsion()) {
        int e = 0;
        Integer rest = d;
        while (rest % p == 0) {
            rest /= p;
            ++e;
        }
        if (e > 0) out.push_back(e);
    }
    std::sort(out.rbegin(), out.rend());
    return out;
}

int p_valuation(Integer n, const Integer& p) {
    int e = 0;
    while (n % p == 0) {
        n /= p;
        ++e;
    }
    return e;
}

void partitions_rec(int remaining, int max_part, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (remaining == 0) {
        out.push_back(cur);
        return;
    }
    for (int k = std::min(remaining, max_part); k >= 1; --k) {
        cur.push_back(k);
        partitions_rec(remaining - k, k, cur, out);
        cur.pop_back();
    }
}

std::vector<std::vector<int>> partitions(int n) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    partitions_rec(n, n, cur, out);
    return out;
}

Integer power(const Integer& p, int e) {
    Integer r = 1;
    for (int i = 0; i < e; ++i) r *= p;
    return r;
}

// Combine one partition per prime into a canonical group.
std::vector<FgAbGroup> assemble(const std::vector<Integer>& primes,
                                const std::vector<std::vector<std::vector<int>>>& per_prime) {
    std::vector<FgAbGroup> out;
    std::vector<std::size_t> idx(primes.size(), 0);
    for (;;) {
        std::vector<Integer> coeffs;
        for (std::size_t k = 0; k < primes.size(); ++k)
            for (int e : per_prime[k][idx[k]]) coeffs.push_back(power(primes[k], e));
        std::sort(coeffs.begin(), coeffs.end());
        out.push_back(canonicalize(0, coeffs));
        std::size_t k = 0;
        while (k < idx.size()) {
            if (++idx[k] < per_prime[k].size()) break;
            idx[k] = 0;
            ++k;
        }
        if (k == idx.size()) break;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace

Integer littlewood_richardson(const std::vector<int>& lambda, const std::vector<int>& mu,
                              const std::vector<int>& nu) {
    auto size = [](const std::vector<int>& v) {
        int s = 0;
        for (int x : v) s += x;
        return s;
    };
    if (size(lambda) != size(mu) + size(nu)) return 0;
    if (mu.size() > lambda.size()) return 0;
    for (std::size_t i = 0; i < mu.size(); ++i)
        if (mu[i] > lambda[i]) return 0;

    std::size_t rows = lambda.size();
    auto mu_at = [&](std::size_t i) { return i < mu.size() ? mu[i] : 0; };
    // tableau[i][c] for c in [mu_i, lambda_i); filled row by row, right to left,
    // which is the reverse reading order checked by the lattice condition.
    std::vector<std::vector<int>> tab(rows);
    for (std::size_t i = 0; i < rows; ++i) tab[i].assign(lambda[i], 0);
    std::vector<int> content(nu.size() + 1, 0);
    Integer count = 0;

    std::function<void(std::size_t, int)> fill = [&](std::size_t i, int c) {
        if (i == rows) {
            count += 1;
            return;
        }
        if (c < mu_at(i)) {
            fill(i + 1, i + 1 < rows ? lambda[i + 1] - 1 : 0);
            return;
        }
        int hi = static_cast<int>(nu.size());
        if (c + 1 < lambda[i]) hi = std::min(hi, tab[i][c + 1]);
        int lo = 1;
        if (i > 0 && c >= mu_at(i - 1)) lo = tab[i - 1][c] + 1;
        for (int v = lo; v <= hi; ++v) {
            if (content[v] + 1 > nu[v - 1]) continue;
            if (v > 1 && content[v] + 1 > content[v - 1]) continue;
            ++content[v];
            tab[i][c] = v;
            fill(i, c - 1);
            --content[v];
        }
        tab[i][c] = 0;
    };
    if (rows == 0) return size(nu) == 0 ? 1 : 0;
    fill(0, lambda[0] - 1);
    return count;
}

std::vector<FgAbGroup> abelian_groups_of_order(const Integer& order) {
    if (order < 1) throw EngineError(ErrorCode::InvalidArgument, "group order must be positive");
    if (order == 1) return {FgAbGroup::trivial()};
    std::vector<Integer> primes = prime_factors(order);
    std::vector<std::vector<std::vector<int>>> per_prime;
    for (const auto& p : primes) per_prime.push_back(partitions(p_valuation(order, p)));
    return assemble(primes, per_prime);
}

std::vector<FgAbGroup> extension_candidates(const FgAbGroup& a, const FgAbGroup& b) {
    if (!a.is_finite() || !b.is_finite())
        throw EngineError(ErrorCode::Unsupported,
                          fmt::format("extension candidates need finite groups, got {} and {}", a.to_string(),
                                      b.to_string()));
    if (a.is_trivial()) return {b};
    if (b.is_trivial()) return {a};
    Integer total = a.order() * b.order();
    if (total > kOrderCap)
        throw EngineError(ErrorCode::Unsupported,
                          fmt::format("extension order {} exceeds the cap {}", total.str(), kOrderCap.str()));

    std::vector<Integer> primes = prime_factors(total);
    std::vector<std::vector<std::vector<int>>> per_prime;
    for (const auto& p : primes) {
        std::vector<int> mu = p_type(a, p), nu = p_type(b, p);
        std::vector<std::vector<int>> admissible;
        for (const auto& lambda : partitions(p_valuation(total, p)))
            if (littlewood_richardson(lambda, mu, nu) > 0) admissible.push_back(lambda);
        per_prime.push_back(std::move(admissible));
    }
    return assemble(primes, per_prime);
}

std::optional<std::vector<FgAbGroup>> iterated_extensions(const std::vector<FgAbGroup>& pieces) {
    if (pieces.empty()) return std::vector<FgAbGroup>{FgAbGroup::trivial()};
    std::set<FgAbGroup> current{pieces.back()};
    for (std::size_t k = pieces.size() - 1; k-- > 0;) {
        const FgAbGroup& sub = pieces[k];
        std::set<FgAbGroup> next;
        for (const auto& quot : current) {
            if (quot.is_free()) {
                next.insert(direct_sum(sub, quot));  // free quotients split
            } else if (sub.is_finite()) {
                for (const auto& x : extension_candidates(sub, quot.torsion_part()))
                    next.insert(direct_sum(x, quot.free_part()));
            } else {
                return std::nullopt;
            }
        }
        current = std::move(next);
    }
    return std::vector<FgAbGroup>(current.begin(), current.end());
}

} // namespace emtower
