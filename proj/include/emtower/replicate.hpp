#pragma once

// Side-by-side audit of printed K(Z,4) and K(Z,5) tables against the engine.

#include "emtower/tower.hpp"

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace emtower {

/// Where the fiber cohomology for a tower stage comes from. The three
/// printed-table variants are kept verbatim.
enum class FiberVariant { Computed, PaperSection4, PaperCorollary, PaperSection5 };

const char* fiber_variant_name(FiberVariant v);
std::optional<FiberVariant> parse_fiber_variant(std::string_view text);

/// Printed table for a built-in variant. Computed has no table.
GradedGroups builtin_fiber(FiberVariant v);
/// n such that the table describes K(Z,n).
int builtin_fiber_space(FiberVariant v);

enum class ReplicationCase { KZ4, KZ5 };
const char* replication_case_name(ReplicationCase c);
std::optional<ReplicationCase> parse_replication_case(std::string_view text);

enum class Verdict { Match, Mismatch, PaperInternallyInconsistent };
const char* verdict_name(Verdict v);

struct ReplicationRow {
    std::string kind;      // e2, degree-claim, summary-table, column-claim, sequence
    std::string item;      // e.g. "E2(0,8)", "H^9", "column 3"
    std::string printed;
    std::string engine;
    Verdict verdict = Verdict::Match;
    std::string note;
};

struct ReplicationRun {
    FiberVariant variant = FiberVariant::PaperSection4;
    int n = 0;
    int max_degree = 0;
    TowerSolution solution;
    std::vector<ReplicationRow> rows;
};

struct ReplicationReport {
    ReplicationCase which = ReplicationCase::KZ4;
    std::vector<ReplicationRun> runs;  // primary first

    /// Every row that is not MATCH, across runs, tagged with the run variant.
    std::vector<std::pair<FiberVariant, ReplicationRow>> divergences() const;
};

ReplicationReport run_replication(ReplicationCase c);

/// Cokernels E that make 0 -> t1 -> ... -> tk -> E -> 0 exact for some
/// choice of maps. Empty set: no exact realization. nullopt: a map space
/// is infinite or too large to enumerate.
std::optional<std::set<FgAbGroup>> exact_sequence_cokernels(const std::vector<FgAbGroup>& terms);

std::string render_replication_text(const ReplicationReport& report);
std::string render_replication_json(const ReplicationReport& report);

} // namespace emtower
