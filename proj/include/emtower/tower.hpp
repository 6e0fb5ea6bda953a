#pragma once

// Path-loop tower: deduce H^*(K(Z,n); Z) from H^*(K(Z,n-1); Z) by forcing
// the spectral sequence of the contractible total space to die.

#include "emtower/ssengine.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace emtower {

enum class DegreeStatus { Determined, Ambiguous, Underdetermined, Inconsistent };

const char* degree_status_name(DegreeStatus s);
std::optional<DegreeStatus> parse_degree_status(std::string_view text);

struct DegreeRecord {
    int degree = 0;
    DegreeStatus status = DegreeStatus::Underdetermined;
    std::optional<FgAbGroup> value;       // Determined only
    std::vector<FgAbGroup> candidates;    // Ambiguous only
    std::string trace;

    friend bool operator==(const DegreeRecord&, const DegreeRecord&) = default;
};

struct TowerResult {
    int n = 0;
    int reliable_up_to = 0;
    std::vector<DegreeRecord> degrees;  // degree 0..cap

    const DegreeRecord& at(int degree) const;
    /// Longest run of Determined degrees from 0, as graded groups.
    GradedGroups determined_prefix() const;
    /// Worst status present: Inconsistent > Underdetermined/Ambiguous > Determined.
    DegreeStatus worst_status() const;

    friend bool operator==(const TowerResult&, const TowerResult&) = default;
};

struct ConstraintRecord {
    enum class Kind { MustDieOutgoing, MustDieIncoming, ThreeTermExact, FourTermExact };
    Kind kind = Kind::MustDieOutgoing;
    int page = 2;
    std::vector<Position> positions;   // in sequence order
    std::vector<FgAbGroup> flanking;   // known groups at those positions (base unknowns omitted)
    std::string note;
};

const char* constraint_kind_name(ConstraintRecord::Kind k);

struct ScheduleEntry {
    int page = 2;
    Position source;
    Position target;
    DifferentialRecord record;
};

struct SolverEvent {
    int degree = 0;
    std::string message;
};

struct TowerSolution {
    TowerResult result;
    std::vector<ScheduleEntry> schedule;        // final pass, nontrivial decisions
    std::vector<ConstraintRecord> constraints;  // final pass
    std::vector<SolverEvent> events;            // contradictions found
    std::vector<Page> pages;                    // final pass, E_2 .. E_{cap+2}
    ConvergenceReport convergence;              // final page vs contractible abutment
    int passes = 0;
};

/// Base states for degrees 0..cap+1: Z, 0, ..., 0, Z (degree n), 0, then
/// unknowns `v<t>`. Rejects n < 2.
std::vector<EntryState> hurewicz_seed(int n, int cap);

/// H^*(K(Z,1)) = H^*(S^1), exact in every degree up to cap + 1.
GradedGroups circle_cohomology(int cap);

/// Runs pages 2 .. cap+1 repeatedly, substituting newly determined base
/// groups until nothing changes. Deterministic.
TowerSolution solve_tower(int n, int cap, const GradedGroups& fiber);

struct ReplayReport {
    bool pass = true;
    int determined_through = -1;
    ConvergenceReport convergence;
    std::vector<std::string> problems;
};

/// Rebuilds E2 from the Determined prefix only, re-applies the recorded
/// schedule and checks that everything in that range dies.
ReplayReport replay_schedule(const TowerSolution& solution, const GradedGroups& fiber);

} // namespace emtower
