#pragma once

// First-quadrant cohomological spectral sequence bookkeeping: E2 assembly,
// differential targets, page turning and convergence checks.

#include "emtower/fgab.hpp"
#include "emtower/uct.hpp"

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace emtower {

struct Position {
    int p = 0;
    int q = 0;
    int total() const { return p + q; }
    std::string to_string() const;
    friend auto operator<=>(const Position&, const Position&) = default;
};

/// What an unknown group could contain: a free summand, any prime, or
/// torsion at the listed primes. Used to decide whether a map can be nonzero.
struct Profile {
    bool free = false;
    bool all_primes = false;
    std::set<Integer> primes;

    static Profile of(const FgAbGroup& g);
    static Profile all() { return {true, true, {}}; }
    /// Profile of any subquotient (Z has subquotients Z_k for every k).
    Profile subquotient() const;
    bool nonzero_capable() const { return free || all_primes || !primes.empty(); }
    Profile merged(const Profile& other) const;

    friend bool operator==(const Profile&, const Profile&) = default;
};

/// Whether a nonzero homomorphism between groups of these profiles can exist.
bool hom_possible(const Profile& source, const Profile& target);

class EntryState {
public:
    enum class Kind { Zero, Known, Variable };

    EntryState() = default;
    static EntryState zero() { return {}; }
    /// Known trivial groups normalize to Zero.
    static EntryState known(const FgAbGroup& g);
    static EntryState variable(std::string id, Profile profile = Profile::all());

    Kind kind() const noexcept { return kind_; }
    bool is_zero() const noexcept { return kind_ == Kind::Zero; }
    bool is_known() const noexcept { return kind_ == Kind::Known; }
    bool is_variable() const noexcept { return kind_ == Kind::Variable; }

    /// The group of a Known entry (trivial for Zero); throws for variables.
    const FgAbGroup& group() const;
    const std::string& id() const noexcept { return id_; }
    /// Exact profile for Known and Zero, declared profile for variables.
    Profile profile() const;

    friend bool operator==(const EntryState&, const EntryState&) = default;

private:
    Kind kind_ = Kind::Zero;
    FgAbGroup group_;
    std::string id_;
    Profile profile_;
};

struct DifferentialRecord {
    enum class Status { ForcedZero, KnownMap, Opaque };
    Status status = Status::ForcedZero;
    std::optional<GroupMap> map;
    std::string reason;
    /// Exactness fixed the source to die even though the target is an
    /// unknown (an injection into a base variable).
    bool source_dies = false;

    static DifferentialRecord forced_zero(std::string why) { return {Status::ForcedZero, std::nullopt, std::move(why), false}; }
    static DifferentialRecord known(GroupMap m, std::string why) { return {Status::KnownMap, std::move(m), std::move(why), false}; }
    static DifferentialRecord opaque(std::string why) { return {Status::Opaque, std::nullopt, std::move(why), false}; }

    /// ForcedZero or a KnownMap with zero matrix.
    bool acts_as_zero() const;
};

const char* status_name(DifferentialRecord::Status s);

struct TargetInfo {
    Position target;
    bool off_grid = false;  // outside the first quadrant
};

/// d_r : E^{p,q} -> E^{p+r, q-r+1}.
TargetInfo differential_target(int p, int q, int r);

/// One page: entries on p, q >= 0 with p + q <= cap + 1; anything not
/// stored is Zero. Differential records are keyed by source position.
class Page {
public:
    Page() = default;
    Page(int r, int cap) : r_(r), cap_(cap) {}

    int r() const noexcept { return r_; }
    int cap() const noexcept { return cap_; }
    bool in_grid(Position pos) const { return pos.p >= 0 && pos.q >= 0 && pos.total() <= cap_ + 1; }

    const EntryState& at(Position pos) const;
    const EntryState& at(int p, int q) const { return at(Position{p, q}); }
    void set(Position pos, EntryState state);

    const std::map<Position, EntryState>& entries() const noexcept { return grid_; }

    const DifferentialRecord* differential(Position source) const;
    void set_differential(Position source, DifferentialRecord rec);
    const std::map<Position, DifferentialRecord>& differentials() const noexcept { return diffs_; }

    Position target_of(Position source) const { return differential_target(source.p, source.q, r_).target; }
    std::optional<Position> source_into(Position target) const;

private:
    int r_ = 2;
    int cap_ = 0;
    std::map<Position, EntryState> grid_;
    std::map<Position, DifferentialRecord> diffs_;
};

/// E2 from base cohomology states (index = degree, 0..cap+1) and integral
/// fiber cohomology. Fiber degrees beyond its reliability become unknowns.
/// Known base columns use coefficient_cohomology; unknown pieces stay
/// symbolic: `v<p>` on the base row, `v<p>.<q>` for coefficients over an
/// unknown column, `u<p>.<q>` when only the next column is unknown,
/// `f<q>` / `f<q>.<p>` for unknown fiber groups.
Page build_e2(const std::vector<EntryState>& base, const GradedGroups& fiber, int cap);

enum class TurnMode {
    Strict,   // every nonzero differential must be known
    Partial,  // unresolved positions become unknown subquotients
};

/// E_{r+1} = ker d_r / im d_r. Strict mode throws OpaqueDifferential
/// listing the positions it cannot compute.
Page turn_page(const Page& page, TurnMode mode = TurnMode::Strict);

struct Violation {
    Position position;
    std::string detail;
};

struct ConvergenceReport {
    bool pass = true;
    std::vector<Violation> violations;
};

/// Contractible abutment: every entry of total degree 1..through is zero
/// and (0,0) is Z.
ConvergenceReport check_convergence(const Page& final_page, int through);
/// General abutment: per-degree rank and torsion-order comparison of the
/// diagonal against the given groups. A necessary condition only, since
/// the filtration extensions are not resolved.
ConvergenceReport check_convergence(const Page& final_page, const GradedGroups& abutment, int through);

/// Composite of consecutive KnownMap differentials must vanish; returns
/// the offending source positions.
std::vector<Position> check_d_squared(const Page& page);

std::string render_cell(const EntryState& e);
/// Rows q descending, columns p ascending, fixed-width cells.
std::string render_page_ascii(const Page& page);

} // namespace emtower
