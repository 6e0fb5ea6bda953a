#pragma once

// Finitely generated abelian groups in invariant-factor form, maps between
// them, and the bilinear functors used by the coefficient bridges.

#include "emtower/intlin.hpp"

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace emtower {

/// Z^free_rank + Z_{d_1} + ... + Z_{d_k} with d_i >= 2 and d_i | d_{i+1}.
/// Isomorphic groups are field-equal.
class FgAbGroup {
public:
    FgAbGroup() = default;

    static FgAbGroup trivial() { return {}; }
    static FgAbGroup free(std::size_t rank);
    /// Z_d for d >= 2, Z for d = 0, trivial for d = 1.
    static FgAbGroup cyclic(const Integer& d);
    /// Validates an already canonical chain; throws InvalidArgument otherwise.
    static FgAbGroup from_chain(std::size_t free_rank, std::vector<Integer> torsion);

    std::size_t free_rank() const noexcept { return free_rank_; }
    const std::vector<Integer>& torsion() const noexcept { return torsion_; }

    bool is_trivial() const noexcept { return free_rank_ == 0 && torsion_.empty(); }
    bool is_finite() const noexcept { return free_rank_ == 0; }
    bool is_free() const noexcept { return torsion_.empty(); }
    /// Order of a finite group; throws Unsupported for infinite groups.
    Integer order() const;
    /// Order of the torsion subgroup.
    Integer torsion_order() const;
    FgAbGroup torsion_part() const { return from_chain(0, torsion_); }
    FgAbGroup free_part() const { return free(free_rank_); }

    /// Generator orders in matrix convention: free generators (order 0)
    /// first, then torsion generators in chain order.
    std::vector<Integer> generator_orders() const;
    std::size_t generator_count() const noexcept { return free_rank_ + torsion_.size(); }

    /// `0`, `Z`, `Z^2 + Z_2 + Z_4`.
    std::string to_string() const;
    /// Torsion split into prime-power cyclic summands, e.g. `Z_2 + Z_3`.
    std::string to_primary_string() const;

    friend bool operator==(const FgAbGroup&, const FgAbGroup&) = default;
    friend std::strong_ordering operator<=>(const FgAbGroup& a, const FgAbGroup& b);

private:
    std::size_t free_rank_ = 0;
    std::vector<Integer> torsion_;
};

/// Invariant-factor form of Z^free_rank + sum Z_{c_i}. Coefficients equal
/// to 1 are dropped; coefficients below 1 are rejected.
FgAbGroup canonicalize(std::size_t free_rank, const std::vector<Integer>& coefficients);

/// Direct sum of cyclic groups given by orders, 0 standing for Z.
FgAbGroup from_cyclic_orders(const std::vector<Integer>& orders);

/// Inverse of FgAbGroup::to_string (also accepts non-canonical input such
/// as `Z_3 + Z_2`). Throws EngineError(Parse) naming the offset.
FgAbGroup parse_group(std::string_view text);

FgAbGroup direct_sum(const FgAbGroup& a, const FgAbGroup& b);
FgAbGroup tensor(const FgAbGroup& a, const FgAbGroup& b);
FgAbGroup tor(const FgAbGroup& a, const FgAbGroup& b);
FgAbGroup hom(const FgAbGroup& a, const FgAbGroup& b);
FgAbGroup ext(const FgAbGroup& a, const FgAbGroup& b);

/// Distinct prime divisors of a positive integer, ascending.
std::vector<Integer> prime_factors(Integer value);

/// Homomorphism given by its matrix on generators (codomain x domain),
/// generator order as in FgAbGroup::generator_orders. Torsion rows are
/// reduced modulo their orders so equal maps compare equal.
class GroupMap {
public:
    GroupMap(FgAbGroup domain, FgAbGroup codomain, IntMatrix matrix);

    static GroupMap zero(const FgAbGroup& domain, const FgAbGroup& codomain);
    static GroupMap identity(const FgAbGroup& group);

    const FgAbGroup& domain() const noexcept { return domain_; }
    const FgAbGroup& codomain() const noexcept { return codomain_; }
    const IntMatrix& matrix() const noexcept { return matrix_; }

    bool is_zero() const { return matrix_.is_zero(); }
    bool is_injective() const;
    bool is_surjective() const;

    friend bool operator==(const GroupMap&, const GroupMap&) = default;

private:
    FgAbGroup domain_;
    FgAbGroup codomain_;
    IntMatrix matrix_;
};

/// g after f.
GroupMap compose(const GroupMap& g, const GroupMap& f);

/// Relation matrix of a group: one column per torsion generator.
IntMatrix relation_matrix(const FgAbGroup& g);

std::pair<FgAbGroup, FgAbGroup> kernel_cokernel(const GroupMap& f);
FgAbGroup image(const GroupMap& f);

/// ker(out) / im(in) at the middle group x. Either map may be absent
/// (treated as zero). Throws InvalidArgument if out after in is nonzero.
FgAbGroup homology_at(const GroupMap* in, const FgAbGroup& x, const GroupMap* out);

/// All homomorphisms a -> b in a fixed deterministic order, or nullopt
/// when the set is infinite or larger than `cap`.
std::optional<std::vector<GroupMap>> enumerate_homs(const FgAbGroup& a, const FgAbGroup& b,
                                                    std::size_t cap = 200000);

/// Number of homomorphisms a -> b when finite and representable.
std::optional<Integer> hom_count(const FgAbGroup& a, const FgAbGroup& b);

/// All abelian groups of the given order, sorted.
std::vector<FgAbGroup> abelian_groups_of_order(const Integer& order);

/// Isomorphism classes X with 0 -> a -> X -> b -> 0 exact, sorted. Both
/// groups must be finite and |a||b| <= 10^6, else Unsupported.
std::vector<FgAbGroup> extension_candidates(const FgAbGroup& a, const FgAbGroup& b);

/// Groups X carrying a filtration whose successive subquotients are
/// pieces[0] (bottom subgroup), pieces[1], ... (top quotient). Returns
/// nullopt when the candidate set cannot be bounded by these methods
/// (an infinite piece below a finite quotient).
std::optional<std::vector<FgAbGroup>> iterated_extensions(const std::vector<FgAbGroup>& pieces);

/// Littlewood-Richardson coefficient c^lambda_{mu nu} for partitions in
/// weakly decreasing order.
Integer littlewood_richardson(const std::vector<int>& lambda, const std::vector<int>& mu,
                              const std::vector<int>& nu);

} // namespace emtower
