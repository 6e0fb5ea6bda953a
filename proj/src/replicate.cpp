#include "emtower/replicate.hpp"

#include "emtower/errors.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <functional>
#include <map>

namespace emtower {

const char* fiber_variant_name(FiberVariant v) {
    switch (v) {
    case FiberVariant::Computed: return "computed";
    case FiberVariant::PaperSection4: return "paper-section4";
    case FiberVariant::PaperCorollary: return "paper-corollary";
    case FiberVariant::PaperSection5: return "paper-section5";
    }
    return "?";
}

std::optional<FiberVariant> parse_fiber_variant(std::string_view text) {
    for (auto v : {FiberVariant::Computed, FiberVariant::PaperSection4, FiberVariant::PaperCorollary,
                   FiberVariant::PaperSection5})
        if (text == fiber_variant_name(v)) return v;
    return std::nullopt;
}

namespace {

GradedGroups table(std::initializer_list<const char*> groups, int reliable) {
    GradedGroups g;
    for (const char* s : groups) g.entries.push_back(parse_group(s));
    g.reliable_up_to = reliable;
    return g;
}

} // namespace

GradedGroups builtin_fiber(FiberVariant v) {
    switch (v) {
    case FiberVariant::PaperSection4:  // H^*(K(Z,3)) as used for the K(Z,4) stage
        return table({"Z", "0", "0", "Z", "0", "0", "Z_2", "0", "Z_3", "Z_2"}, 9);
    case FiberVariant::PaperCorollary:  // H^*(K(Z,4)), summary table
        return table({"Z", "0", "0", "0", "Z", "0", "0", "0", "Z_2", "Z_3", "0", "0", "Z_2"}, 12);
    case FiberVariant::PaperSection5:  // H^*(K(Z,4)) as used for the K(Z,5) stage
        return table({"Z", "0", "0", "0", "Z", "0", "0", "Z_2", "Z", "Z_3", "0", "0"}, 11);
    case FiberVariant::Computed: break;
    }
    throw EngineError(ErrorCode::InvalidArgument, "the computed fiber variant has no built-in table");
}

int builtin_fiber_space(FiberVariant v) {
    switch (v) {
    case FiberVariant::PaperSection4: return 3;
    case FiberVariant::PaperCorollary:
    case FiberVariant::PaperSection5: return 4;
    case FiberVariant::Computed: break;
    }
    throw EngineError(ErrorCode::InvalidArgument, "the computed fiber variant has no built-in table");
}

const char* replication_case_name(ReplicationCase c) { return c == ReplicationCase::KZ4 ? "kz4" : "kz5"; }

std::optional<ReplicationCase> parse_replication_case(std::string_view text) {
    if (text == "kz4") return ReplicationCase::KZ4;
    if (text == "kz5") return ReplicationCase::KZ5;
    return std::nullopt;
}

const char* verdict_name(Verdict v) {
    switch (v) {
    case Verdict::Match: return "MATCH";
    case Verdict::Mismatch: return "MISMATCH";
    case Verdict::PaperInternallyInconsistent: return "PAPER-INTERNALLY-INCONSISTENT";
    }
    return "?";
}

std::vector<std::pair<FiberVariant, ReplicationRow>> ReplicationReport::divergences() const {
    std::vector<std::pair<FiberVariant, ReplicationRow>> out;
    for (const auto& run : runs)
        for (const auto& row : run.rows)
            if (row.verdict != Verdict::Match) out.emplace_back(run.variant, row);
    return out;
}

std::optional<std::set<FgAbGroup>> exact_sequence_cokernels(const std::vector<FgAbGroup>& terms) {
    std::set<FgAbGroup> out;
    if (terms.empty()) {
        out.insert(FgAbGroup::trivial());
        return out;
    }
    bool feasible = true;
    std::function<void(std::size_t, const GroupMap*)> extend = [&](std::size_t i, const GroupMap* prev) {
        if (!feasible) return;
        if (i + 1 == terms.size()) {
            out.insert(prev ? kernel_cokernel(*prev).second : terms[0]);
            return;
        }
        auto homs = enumerate_homs(terms[i], terms[i + 1]);
        if (!homs) {
            feasible = false;
            return;
        }
        for (const auto& f : *homs) {
            if (prev && !compose(f, *prev).is_zero()) continue;
            if (!homology_at(prev, terms[i], &f).is_trivial()) continue;
            extend(i + 1, &f);
        }
    };
    extend(0, nullptr);
    if (!feasible) return std::nullopt;
    return out;
}

namespace {

struct SequenceClaim {
    int degree;
    std::vector<const char*> terms;
    const char* claimed;
    int page = 0;                     // 0: not stated in a usable form
    std::vector<Position> positions;  // terms then the base entry, when stated
};

struct PrintedCase {
    int n;
    int max_degree;
    FiberVariant primary;
    std::vector<FiberVariant> secondary;
    std::vector<std::pair<Position, const char*>> e2;
    std::vector<std::pair<int, const char*>> degree_claims;
    std::vector<std::pair<int, const char*>> summary_table;
    std::vector<int> zero_columns;
    std::vector<SequenceClaim> sequences;
};

PrintedCase kz4_case() {
    PrintedCase c{4, 12, FiberVariant::PaperSection4, {}, {}, {}, {}, {}, {}};
    const char* col0[] = {"Z", "0", "0", "Z", "0", "0", "Z_2", "0", "Z_3", "Z_2"};
    for (int q = 0; q <= 9; ++q) c.e2.push_back({{0, q}, col0[q]});
    for (int p = 1; p <= 2; ++p)
        for (int q = 0; q <= 9; ++q) c.e2.push_back({{p, q}, "0"});
    for (int q = 0; q <= 4; ++q) c.e2.push_back({{3, q}, "0"});
    c.degree_claims = {{5, "0"}, {6, "0"}, {7, "0"}, {8, "Z_2"}, {9, "Z_3"}, {10, "0"}, {11, "0"}, {12, "Z_2"}};
    const char* summary[] = {"0", "0", "0", "Z", "0", "0", "0", "Z_2", "Z_3", "0", "0", "Z_2"};
    for (int d = 1; d <= 12; ++d) c.summary_table.push_back({d, summary[d - 1]});
    c.sequences.push_back({8, {"Z_2", "Z"}, "Z_2", 4, {{0, 6}, {4, 3}, {8, 0}}});
    c.sequences.push_back({9, {"Z_3"}, "Z_3", 9, {{0, 8}, {9, 0}}});
    c.sequences.push_back({12, {"Z_2", "Z_2", "Z_2"}, "Z_2", 0, {}});
    return c;
}

PrintedCase kz5_case() {
    PrintedCase c{5, 13, FiberVariant::PaperSection5, {FiberVariant::PaperCorollary}, {}, {}, {}, {}, {}};
    const char* col0[] = {"Z", "0", "0", "0", "Z", "0", "0", "Z_2", "Z", "Z_3"};
    for (int q = 0; q <= 9; ++q) c.e2.push_back({{0, q}, col0[q]});
    const char* col5[] = {"Z", "0", "0", "0", "Z", "0", "0", "0", "Z_2", "Z_3", "0", "0"};
    for (int q = 0; q <= 11; ++q) c.e2.push_back({{5, q}, col5[q]});
    c.zero_columns = {1, 2, 3, 4};
    c.degree_claims = {{6, "0"},  {7, "0"},  {8, "0"},  {9, "0"},
                       {10, "Z_3 + Z_2"}, {11, "0"}, {12, "0"}, {13, "0"}};
    c.sequences.push_back({10, {"Z_2", "Z"}, "Z_2", 0, {}});
    return c;
}

std::string engine_text(const EntryState& e) {
    if (e.is_zero()) return "0";
    if (e.is_variable()) return "unknown ?" + e.id();
    return e.group().to_string();
}

std::string record_text(const DegreeRecord& rec) {
    switch (rec.status) {
    case DegreeStatus::Determined: return rec.value->to_string();
    case DegreeStatus::Ambiguous: {
        std::vector<std::string> names;
        for (const auto& c : rec.candidates) names.push_back(c.to_string());
        return fmt::format("Ambiguous {{{}}}", fmt::join(names, ", "));
    }
    default: return degree_status_name(rec.status);
    }
}

std::string groups_text(const std::set<FgAbGroup>& gs) {
    std::vector<std::string> names;
    for (const auto& g : gs) names.push_back(g.to_string());
    return fmt::format("{}", fmt::join(names, ", "));
}

ReplicationRow e2_row(const TowerSolution& sol, Position pos, const char* printed) {
    ReplicationRow row{"e2", fmt::format("E2{}", pos.to_string()), printed, "", Verdict::Match, ""};
    const EntryState& e = sol.pages.front().at(pos);
    row.engine = engine_text(e);
    if (e.is_variable()) {
        row.verdict = Verdict::Mismatch;
        row.note = "engine entry not determined";
    } else if (!(e.group() == parse_group(printed))) {
        row.verdict = Verdict::PaperInternallyInconsistent;
        row.note = "printed value disagrees with the coefficient formula on the printed inputs";
    }
    return row;
}

ReplicationRow degree_row(const char* kind, const TowerSolution& sol, int degree, const char* printed) {
    ReplicationRow row{kind, fmt::format("H^{}", degree), printed, "", Verdict::Match, ""};
    if (degree > int(sol.result.degrees.size()) - 1) {
        row.engine = "beyond cap";
        row.verdict = Verdict::Mismatch;
        return row;
    }
    const DegreeRecord& rec = sol.result.at(degree);
    row.engine = record_text(rec);
    if (rec.status != DegreeStatus::Determined || !(*rec.value == parse_group(printed))) {
        row.verdict = Verdict::Mismatch;
        row.note = rec.trace;
    }
    return row;
}

ReplicationRow column_row(const TowerSolution& sol, int p) {
    ReplicationRow row{"column-claim", fmt::format("column {}", p), "all 0", "all 0", Verdict::Match, ""};
    const Page& e2 = sol.pages.front();
    std::vector<std::string> nonzero;
    for (int q = 0; p + q <= e2.cap() + 1; ++q)
        if (!e2.at(p, q).is_zero()) nonzero.push_back(fmt::format("({},{})={}", p, q, render_cell(e2.at(p, q))));
    if (!nonzero.empty()) {
        row.engine = fmt::format("{}", fmt::join(nonzero, " "));
        row.verdict = Verdict::Mismatch;
    }
    return row;
}

std::string chain_description(const std::vector<const char*>& terms, int degree) {
    std::string s = "0";
    for (const char* t : terms) s += fmt::format(" -> {}", t);
    return s + fmt::format(" -> E({},0) -> 0", degree);
}

std::string locate_sequence(const TowerSolution& sol, const SequenceClaim& claim,
                            const std::vector<FgAbGroup>& terms) {
    auto page_index = [&](int r) { return std::size_t(std::max(0, r - 2)); };
    if (claim.page >= 2 && page_index(claim.page) < sol.pages.size()) {
        const Page& page = sol.pages[page_index(claim.page)];
        std::vector<std::string> parts;
        for (Position pos : claim.positions) parts.push_back(fmt::format("{} {}", pos.to_string(), render_cell(page.at(pos))));
        std::string note = fmt::format("engine page {}: {}", claim.page, fmt::join(parts, ", "));
        for (std::size_t i = 0; i + 1 < claim.positions.size(); ++i) {
            const DifferentialRecord* rec = page.differential(claim.positions[i]);
            if (!rec || !(page.target_of(claim.positions[i]) == claim.positions[i + 1])) continue;
            note += fmt::format("; d{} from {}: {} ({})", claim.page, claim.positions[i].to_string(),
                                status_name(rec->status), rec->reason);
        }
        return note;
    }
    int t = claim.degree;
    int k = int(terms.size());
    for (std::size_t idx = 0; idx < sol.pages.size(); ++idx) {
        const Page& page = sol.pages[idx];
        int r = page.r();
        bool found = true;
        std::vector<std::string> where;
        for (int j = 1; j <= k && found; ++j) {
            Position pos{t - j * r, j * (r - 1)};
            const EntryState& e = page.at(pos);
            found = pos.p >= 0 && e.is_known() && e.group() == terms[k - j];
            where.push_back(pos.to_string());
        }
        if (found) return fmt::format("located on engine page {} at {}", r, fmt::join(where, " "));
    }
    return "not located on any engine page";
}

ReplicationRow sequence_row(const TowerSolution& sol, const SequenceClaim& claim) {
    std::vector<FgAbGroup> terms;
    for (const char* t : claim.terms) terms.push_back(parse_group(t));
    FgAbGroup claimed = parse_group(claim.claimed);
    ReplicationRow row{"sequence", fmt::format("degree {}: {}", claim.degree, chain_description(claim.terms, claim.degree)),
                       claim.claimed, "", Verdict::Match, ""};
    auto cokernels = exact_sequence_cokernels(terms);
    if (!cokernels) {
        row.engine = "map spaces not enumerable";
        row.verdict = Verdict::Mismatch;
    } else if (cokernels->empty()) {
        bool no_injection = true;
        if (terms.size() >= 2)
            if (auto homs = enumerate_homs(terms[0], terms[1]))
                for (const auto& f : *homs)
                    if (f.is_injective()) no_injection = false;
        row.engine = terms.size() >= 2 && no_injection
                         ? fmt::format("Inconsistent: forced injection {} -> {} does not exist", terms[0].to_string(),
                                       terms[1].to_string())
                         : "Inconsistent: no exact realization";
        row.verdict = Verdict::PaperInternallyInconsistent;
    } else if (cokernels->count(claimed)) {
        row.engine = cokernels->size() == 1 ? fmt::format("consistent; forces {}", claimed.to_string())
                                            : fmt::format("consistent; admits {}", groups_text(*cokernels));
    } else {
        row.engine = fmt::format("exactness gives {}", groups_text(*cokernels));
        row.verdict = Verdict::PaperInternallyInconsistent;
    }
    row.note = locate_sequence(sol, claim, terms);
    return row;
}

ReplicationRun make_run(const PrintedCase& pc, FiberVariant variant, bool primary) {
    ReplicationRun run;
    run.variant = variant;
    run.n = pc.n;
    run.max_degree = pc.max_degree;
    run.solution = solve_tower(pc.n, pc.max_degree, builtin_fiber(variant));
    for (const auto& [pos, printed] : pc.e2) run.rows.push_back(e2_row(run.solution, pos, printed));
    for (int p : pc.zero_columns) run.rows.push_back(column_row(run.solution, p));
    for (const auto& [d, printed] : pc.degree_claims)
        run.rows.push_back(degree_row("degree-claim", run.solution, d, printed));
    for (const auto& [d, printed] : pc.summary_table)
        run.rows.push_back(degree_row("summary-table", run.solution, d, printed));
    if (primary)
        for (const auto& claim : pc.sequences) run.rows.push_back(sequence_row(run.solution, claim));
    return run;
}

} // namespace

ReplicationReport run_replication(ReplicationCase c) {
    PrintedCase pc = c == ReplicationCase::KZ4 ? kz4_case() : kz5_case();
    ReplicationReport report;
    report.which = c;
    report.runs.push_back(make_run(pc, pc.primary, true));
    for (auto v : pc.secondary) report.runs.push_back(make_run(pc, v, false));
    return report;
}

namespace {

std::string rows_table(const std::vector<ReplicationRow>& rows, const std::string& indent) {
    std::size_t wk = 4, wi = 4, wp = 7, we = 6;
    for (const auto& r : rows) {
        wk = std::max(wk, r.kind.size());
        wi = std::max(wi, r.item.size());
        wp = std::max(wp, r.printed.size());
        we = std::max(we, r.engine.size());
    }
    std::string out = fmt::format("{}{:<{}}  {:<{}}  {:<{}}  {:<{}}  {}\n", indent, "kind", wk, "item", wi, "printed",
                                  wp, "engine", we, "verdict");
    for (const auto& r : rows)
        out += fmt::format("{}{:<{}}  {:<{}}  {:<{}}  {:<{}}  {}\n", indent, r.kind, wk, r.item, wi, r.printed, wp,
                           r.engine, we, verdict_name(r.verdict));
    return out;
}

} // namespace

std::string render_replication_text(const ReplicationReport& report) {
    const bool kz4 = report.which == ReplicationCase::KZ4;
    std::string out = fmt::format("Replication {}: K(Z,{}) from the path-loop fibration K(Z,{}) -> P -> K(Z,{})\n",
                                  replication_case_name(report.which), kz4 ? 4 : 5, kz4 ? 3 : 4, kz4 ? 4 : 5);
    std::map<Verdict, int> counts;
    for (const auto& run : report.runs) {
        out += fmt::format("\nrun: fiber {}, n = {}, max degree {}, {} pass(es)\n", fiber_variant_name(run.variant),
                           run.n, run.max_degree, run.solution.passes);
        out += rows_table(run.rows, "  ");
        out += "  engine statuses:";
        for (const auto& rec : run.solution.result.degrees)
            out += fmt::format(" {}:{}", rec.degree,
                               rec.status == DegreeStatus::Determined ? rec.value->to_string()
                                                                      : degree_status_name(rec.status));
        out += "\n";
        for (const auto& r : run.rows) ++counts[r.verdict];
    }
    auto div = report.divergences();
    out += fmt::format("\nDivergences ({})\n", div.size());
    for (const auto& [variant, row] : div) {
        out += fmt::format("  [{}] {} {}: printed {}, engine {} -> {}\n", fiber_variant_name(variant), row.kind, row.item,
                           row.printed, row.engine, verdict_name(row.verdict));
        if (!row.note.empty()) out += fmt::format("      {}\n", row.note);
    }
    out += fmt::format("\nTotals: {} MATCH, {} MISMATCH, {} PAPER-INTERNALLY-INCONSISTENT\n", counts[Verdict::Match],
                       counts[Verdict::Mismatch], counts[Verdict::PaperInternallyInconsistent]);
    return out;
}

std::string render_replication_json(const ReplicationReport& report) {
    using json = nlohmann::ordered_json;
    auto row_json = [](const ReplicationRow& r) {
        return json{{"kind", r.kind},       {"item", r.item},
                    {"printed", r.printed}, {"engine", r.engine},
                    {"verdict", verdict_name(r.verdict)}, {"note", r.note}};
    };
    json j;
    j["case"] = replication_case_name(report.which);
    j["runs"] = json::array();
    for (const auto& run : report.runs) {
        json jr;
        jr["fiber_variant"] = fiber_variant_name(run.variant);
        jr["n"] = run.n;
        jr["max_degree"] = run.max_degree;
        jr["passes"] = run.solution.passes;
        jr["rows"] = json::array();
        for (const auto& r : run.rows) jr["rows"].push_back(row_json(r));
        jr["statuses"] = json::array();
        for (const auto& rec : run.solution.result.degrees) {
            json s{{"degree", rec.degree}, {"status", degree_status_name(rec.status)}};
            s["value"] = rec.value ? json(rec.value->to_string()) : json(nullptr);
            jr["statuses"].push_back(std::move(s));
        }
        j["runs"].push_back(std::move(jr));
    }
    j["divergences"] = json::array();
    for (const auto& [variant, row] : report.divergences()) {
        json d = row_json(row);
        d["fiber_variant"] = fiber_variant_name(variant);
        j["divergences"].push_back(std::move(d));
    }
    return j.dump(2) + "\n";
}

} // namespace emtower
