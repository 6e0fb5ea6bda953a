#include "emtower/tower.hpp"

#include "emtower/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <map>

namespace emtower {

const char* degree_status_name(DegreeStatus s) {
    switch (s) {
    case DegreeStatus::Determined: return "Determined";
    case DegreeStatus::Ambiguous: return "Ambiguous";
    case DegreeStatus::Underdetermined: return "Underdetermined";
    case DegreeStatus::Inconsistent: return "Inconsistent";
    }
    return "?";
}

std::optional<DegreeStatus> parse_degree_status(std::string_view text) {
    for (auto s : {DegreeStatus::Determined, DegreeStatus::Ambiguous, DegreeStatus::Underdetermined,
                   DegreeStatus::Inconsistent})
        if (text == degree_status_name(s)) return s;
    return std::nullopt;
}

const char* constraint_kind_name(ConstraintRecord::Kind k) {
    switch (k) {
    case ConstraintRecord::Kind::MustDieOutgoing: return "MustDieOutgoing";
    case ConstraintRecord::Kind::MustDieIncoming: return "MustDieIncoming";
    case ConstraintRecord::Kind::ThreeTermExact: return "ThreeTermExact";
    case ConstraintRecord::Kind::FourTermExact: return "FourTermExact";
    }
    return "?";
}

const DegreeRecord& TowerResult::at(int degree) const {
    if (degree < 0 || degree >= int(degrees.size()))
        throw EngineError(ErrorCode::DegreeOutOfRange, fmt::format("degree {} not in the tower", degree));
    return degrees[degree];
}

GradedGroups TowerResult::determined_prefix() const {
    GradedGroups out;
    for (const auto& rec : degrees) {
        if (rec.status != DegreeStatus::Determined || !rec.value) break;
        out.entries.push_back(*rec.value);
    }
    out.reliable_up_to = int(out.entries.size()) - 1;
    return out;
}

DegreeStatus TowerResult::worst_status() const {
    DegreeStatus worst = DegreeStatus::Determined;
    for (const auto& rec : degrees) {
        if (rec.status == DegreeStatus::Inconsistent) return DegreeStatus::Inconsistent;
        if (rec.status != DegreeStatus::Determined) worst = rec.status;
    }
    return worst;
}

std::vector<EntryState> hurewicz_seed(int n, int cap) {
    if (n < 2) throw EngineError(ErrorCode::InvalidArgument, fmt::format("K(Z,{}) is not simply connected", n));
    if (cap < 0) throw EngineError(ErrorCode::InvalidArgument, "negative degree cap");
    std::vector<EntryState> base;
    for (int d = 0; d <= cap + 1; ++d) {
        if (d == 0 || d == n) base.push_back(EntryState::known(FgAbGroup::free(1)));
        else if (d <= n + 1) base.push_back(EntryState::zero());
        else base.push_back(EntryState::variable(fmt::format("v{}", d)));
    }
    return base;
}

GradedGroups circle_cohomology(int cap) {
    GradedGroups g;
    for (int d = 0; d <= std::max(cap + 1, 1); ++d)
        g.entries.push_back(d <= 1 ? FgAbGroup::free(1) : FgAbGroup::trivial());
    g.reliable_up_to = int(g.entries.size()) - 1;
    return g;
}

namespace {

const std::size_t kSolverHomCap = 20000;

struct BaseUnknown {
    std::vector<FgAbGroup> pieces;
    std::vector<std::string> notes;
    bool opaque = false;
    std::string opaque_reason;
};

struct Resolution {
    enum class Kind { Resolved, Ambiguous, Unresolved };
    Kind kind = Kind::Unresolved;
    std::vector<FgAbGroup> candidates;
    std::string trace;
};

std::string cell(const EntryState& e) { return render_cell(e); }

class Pass {
public:
    Pass(int cap, const GradedGroups& fiber, const std::vector<EntryState>& base)
        : cap_(cap), fiber_(fiber), base_(base) {}

    void run();

    std::map<int, Resolution> resolutions;
    std::vector<ScheduleEntry> schedule;
    std::vector<ConstraintRecord> constraints;
    std::vector<SolverEvent> events;
    std::vector<Page> pages;

private:
    bool has_other_partner(const Page& cur, Position pos, bool skip_out, bool skip_in) const;
    void decide(Page& cur, Position source);
    void finalize(int t);
    void record(Page& cur, Position source, Position target, DifferentialRecord rec);
    void emit_constraints(const Page& cur, Position source, Position target, std::optional<Position> in_source,
                          bool source_exact, bool target_killed);

    int cap_;
    const GradedGroups& fiber_;
    std::vector<EntryState> base_;
    std::map<int, BaseUnknown> unknowns_;
    // Per page: which decided differential fed the source of each decision.
    std::map<Position, std::optional<Position>> chain_prev_;
};

bool Pass::has_other_partner(const Page& cur, Position pos, bool skip_out, bool skip_in) const {
    const int r = cur.r();
    const EntryState& here = cur.at(pos);
    for (int s = r; s <= cap_ + 2; ++s) {
        Position t{pos.p + s, pos.q - s + 1};
        if (t.q >= 0 && !(s == r && skip_out)) {
            if (!cur.in_grid(t)) return true;
            if (s == r) {
                const DifferentialRecord* rec = cur.differential(pos);
                if (rec) {
                    if (!rec->acts_as_zero()) return true;
                } else if (hom_possible(here.profile(), cur.at(t).profile())) {
                    return true;
                }
            } else if (hom_possible(here.profile().subquotient(), cur.at(t).profile().subquotient())) {
                return true;
            }
        }
        Position src{pos.p - s, pos.q + s - 1};
        if (src.p >= 0 && !(s == r && skip_in)) {
            if (s == r) {
                const DifferentialRecord* rec = cur.differential(src);
                if (rec) {
                    if (!rec->acts_as_zero()) return true;
                } else if (hom_possible(cur.at(src).profile(), here.profile())) {
                    return true;
                }
            } else if (hom_possible(cur.at(src).profile().subquotient(), here.profile().subquotient())) {
                return true;
            }
        }
    }
    return false;
}

void Pass::record(Page& cur, Position source, Position target, DifferentialRecord rec) {
    if (rec.status != DifferentialRecord::Status::ForcedZero || rec.source_dies)
        schedule.push_back({cur.r(), source, target, rec});
    cur.set_differential(source, std::move(rec));
}

void Pass::emit_constraints(const Page& cur, Position source, Position target, std::optional<Position> in_source,
                            bool source_exact, bool target_killed) {
    auto groups_at = [&](const std::vector<Position>& ps) {
        std::vector<FgAbGroup> out;
        for (auto p : ps)
            if (cur.at(p).is_known()) out.push_back(cur.at(p).group());
        return out;
    };
    if (source_exact) {
        ConstraintRecord c;
        c.page = cur.r();
        if (!in_source) {
            c.kind = ConstraintRecord::Kind::MustDieOutgoing;
            c.positions = {source, target};
            c.note = fmt::format("{} has no other way to die", source.to_string());
        } else {
            auto prev = chain_prev_.find(*in_source);
            if (prev != chain_prev_.end() && prev->second) {
                c.kind = ConstraintRecord::Kind::FourTermExact;
                c.positions = {*prev->second, *in_source, source, target};
            } else {
                c.kind = ConstraintRecord::Kind::ThreeTermExact;
                c.positions = {*in_source, source, target};
            }
            c.note = fmt::format("exact at {}: kernel equals the incoming image", source.to_string());
        }
        c.flanking = groups_at(c.positions);
        constraints.push_back(std::move(c));
    }
    if (target_killed) {
        ConstraintRecord c;
        c.kind = ConstraintRecord::Kind::MustDieIncoming;
        c.page = cur.r();
        c.positions = {source, target};
        c.flanking = groups_at(c.positions);
        c.note = fmt::format("{} has no other killer", target.to_string());
        constraints.push_back(std::move(c));
    }
}

void Pass::decide(Page& cur, Position P) {
    const int r = cur.r();
    auto info = differential_target(P.p, P.q, r);
    if (info.off_grid) return;
    const Position Q = info.target;
    const EntryState X = cur.at(P);
    if (!cur.in_grid(Q)) {
        record(cur, P, Q, DifferentialRecord::opaque("target lies beyond the degree cap"));
        return;
    }
    const EntryState Y = cur.at(Q);
    if (Y.is_zero()) {
        cur.set_differential(P, DifferentialRecord::forced_zero("target is zero"));
        return;
    }
    if (!hom_possible(X.profile(), Y.profile())) {
        cur.set_differential(P, DifferentialRecord::forced_zero(
                                    fmt::format("no nonzero map {} -> {}", cell(X), cell(Y))));
        return;
    }

    const GroupMap* in_map = nullptr;
    std::optional<Position> in_src;
    if (auto s = cur.source_into(P)) {
        const DifferentialRecord* rec = cur.differential(*s);
        if (rec && rec->status == DifferentialRecord::Status::KnownMap && !rec->acts_as_zero()) {
            in_map = &*rec->map;
            in_src = s;
        }
    }
    const bool source_exact = !has_other_partner(cur, P, true, in_map != nullptr);
    const bool target_killed = Q.total() >= 1 && !has_other_partner(cur, Q, false, true);
    const bool base_target = Q.q == 0 && Y.is_variable() && Y.id() == fmt::format("v{}", Q.p);
    const std::string arrow = fmt::format("d{} {}->{}", r, P.to_string(), Q.to_string());

    auto fail = [&](const std::string& why) {
        events.push_back({Q.total(), fmt::format("page {}: {} {}", r, arrow, why)});
        record(cur, P, Q, DifferentialRecord::opaque("no admissible map: " + why));
    };

    if (X.is_known() && Y.is_known()) {
        if (!source_exact && !target_killed) {
            record(cur, P, Q, DifferentialRecord::opaque("several differentials can act on both ends"));
            return;
        }
        const FgAbGroup& a = X.group();
        const FgAbGroup& b = Y.group();
        if (source_exact && target_killed && !in_map) {
            if (a == b) {
                record(cur, P, Q, DifferentialRecord::known(GroupMap::identity(a), "sole escape and sole killer: isomorphism"));
                emit_constraints(cur, P, Q, in_src, true, true);
                chain_prev_[P] = in_src;
            } else {
                fail(fmt::format("must be an isomorphism {} -> {}", a.to_string(), b.to_string()));
            }
            return;
        }
        auto homs = enumerate_homs(a, b, kSolverHomCap);
        if (!homs) {
            record(cur, P, Q, DifferentialRecord::opaque(fmt::format(
                                  "maps {} -> {} not enumerable; exactness leaves the map open", a.to_string(),
                                  b.to_string())));
            return;
        }
        std::map<std::pair<FgAbGroup, FgAbGroup>, std::size_t> classes;
        for (std::size_t i = 0; i < homs->size(); ++i) {
            const GroupMap& f = (*homs)[i];
            if (in_map && !compose(f, *in_map).is_zero()) continue;
            FgAbGroup left = homology_at(in_map, a, &f);
            if (source_exact && !left.is_trivial()) continue;
            FgAbGroup right = kernel_cokernel(f).second;
            if (target_killed && !right.is_trivial()) continue;
            classes.emplace(std::make_pair(left, right), i);
        }
        if (classes.empty()) {
            std::string need = source_exact && target_killed ? "exact and surjective"
                               : source_exact                  ? (in_map ? "exact at the source" : "injective")
                                                               : "surjective";
            fail(fmt::format("no map {} -> {} is {}", a.to_string(), b.to_string(), need));
            return;
        }
        if (classes.size() > 1) {
            record(cur, P, Q, DifferentialRecord::opaque(
                                  fmt::format("{} inequivalent admissible maps {} -> {}", classes.size(),
                                              a.to_string(), b.to_string())));
            return;
        }
        const GroupMap& rep = (*homs)[classes.begin()->second];
        record(cur, P, Q, DifferentialRecord::known(rep, fmt::format("forced by exactness; cokernel {}",
                                                                        classes.begin()->first.second.to_string())));
        emit_constraints(cur, P, Q, in_src, source_exact, target_killed);
        chain_prev_[P] = in_src;
        return;
    }

    if (X.is_known() && base_target) {
        int t = Q.p;
        if (source_exact) {
            FgAbGroup piece = homology_at(in_map, X.group(), nullptr);
            DifferentialRecord rec = DifferentialRecord::opaque(
                fmt::format("injects {} into the unknown ?v{}", piece.to_string(), t));
            rec.source_dies = true;
            record(cur, P, Q, rec);
            if (!piece.is_trivial()) {
                unknowns_[t].pieces.push_back(piece);
                unknowns_[t].notes.push_back(fmt::format("page {}: {} from {}", r, piece.to_string(), P.to_string()));
            }
            emit_constraints(cur, P, Q, in_src, true, false);
            chain_prev_[P] = in_src;
            return;
        }
        auto& u = unknowns_[t];
        if (!u.opaque) {
            u.opaque = true;
            u.opaque_reason = fmt::format("page {}: {} from {} is not forced by exactness", r, arrow, cell(X));
        }
        record(cur, P, Q, DifferentialRecord::opaque("source has other ways to die"));
        return;
    }

    if (base_target) {
        auto& u = unknowns_[Q.p];
        if (!u.opaque) {
            u.opaque = true;
            u.opaque_reason = fmt::format("page {}: {} leaves the unknown {}", r, arrow, cell(X));
        }
    }
    record(cur, P, Q, DifferentialRecord::opaque("an end of the differential is unknown"));
}

void Pass::finalize(int t) {
    if (t >= int(base_.size()) || !base_[t].is_variable()) return;
    const BaseUnknown& u = unknowns_[t];
    Resolution res;
    if (u.opaque) {
        res.trace = u.opaque_reason;
        resolutions[t] = res;
        return;
    }
    std::string pieces = u.notes.empty() ? std::string("no differential can reach it")
                                         : fmt::format("{}", fmt::join(u.notes, "; "));
    std::optional<std::vector<FgAbGroup>> cands;
    try {
        cands = iterated_extensions(u.pieces);
    } catch (const EngineError& e) {
        res.trace = fmt::format("{}; extension not enumerable: {}", pieces, e.what());
        resolutions[t] = res;
        return;
    }
    if (!cands) {
        res.trace = fmt::format("{}; infinite subgroup under a torsion quotient leaves the extension open", pieces);
    } else if (cands->size() == 1) {
        res.kind = Resolution::Kind::Resolved;
        res.candidates = *cands;
        res.trace = fmt::format("{}; must die, so H^{} = {}", pieces, t, cands->front().to_string());
    } else {
        res.kind = Resolution::Kind::Ambiguous;
        res.candidates = *cands;
        std::vector<std::string> names;
        for (const auto& c : *cands) names.push_back(c.to_string());
        res.trace = fmt::format("{}; extension classes {}", pieces, fmt::join(names, ", "));
    }
    resolutions[t] = res;
}

void Pass::run() {
    Page cur = build_e2(base_, fiber_, cap_);
    for (int r = 2; r <= cap_ + 1; ++r) {
        chain_prev_.clear();
        std::vector<Position> order;
        for (const auto& [pos, e] : cur.entries()) order.push_back(pos);
        std::sort(order.begin(), order.end(), [](Position a, Position b) {
            return std::make_pair(a.total(), a.p) < std::make_pair(b.total(), b.p);
        });
        for (Position pos : order) decide(cur, pos);
        finalize(r);
        pages.push_back(cur);
        cur = turn_page(cur, TurnMode::Partial);
    }
    for (const auto& [pos, e] : cur.entries())
        if (pos.total() >= 1 && pos.total() <= cap_ && e.is_known())
            events.push_back({pos.total(), fmt::format("E^{{{},{}}} = {} survives every page", pos.p, pos.q,
                                                       e.group().to_string())});
    pages.push_back(std::move(cur));
}

} // namespace

TowerSolution solve_tower(int n, int cap, const GradedGroups& fiber) {
    std::vector<EntryState> base = hurewicz_seed(n, cap);
    std::map<int, std::string> determined_trace;
    TowerSolution sol;
    std::optional<Pass> last;
    for (;;) {
        ++sol.passes;
        Pass pass(cap, fiber, base);
        pass.run();
        bool changed = false;
        for (const auto& [t, res] : pass.resolutions) {
            if (res.kind != Resolution::Kind::Resolved || !base[t].is_variable()) continue;
            base[t] = EntryState::known(res.candidates.front());
            determined_trace[t] = fmt::format("pass {}: {}", sol.passes, res.trace);
            changed = true;
        }
        if (!changed) {
            last.emplace(std::move(pass));
            break;
        }
    }

    TowerResult& result = sol.result;
    result.n = n;
    result.reliable_up_to = std::min(cap, fiber.reliable_up_to + 1);
    for (int d = 0; d <= cap; ++d) {
        DegreeRecord rec;
        rec.degree = d;
        if (d <= n + 1) {
            rec.status = DegreeStatus::Determined;
            rec.value = base[d].is_zero() ? FgAbGroup::trivial() : base[d].group();
            rec.trace = "Hurewicz and universal coefficients";
        } else if (auto it = determined_trace.find(d); it != determined_trace.end()) {
            rec.status = DegreeStatus::Determined;
            rec.value = base[d].is_zero() ? FgAbGroup::trivial() : base[d].group();
            rec.trace = it->second;
        } else if (auto res = last->resolutions.find(d); res != last->resolutions.end()) {
            rec.status = res->second.kind == Resolution::Kind::Ambiguous ? DegreeStatus::Ambiguous
                                                                         : DegreeStatus::Underdetermined;
            if (rec.status == DegreeStatus::Ambiguous) rec.candidates = res->second.candidates;
            rec.trace = res->second.trace;
        } else {
            rec.status = DegreeStatus::Underdetermined;
            rec.trace = "not reached";
        }
        result.degrees.push_back(std::move(rec));
    }
    for (const auto& ev : last->events) {
        if (ev.degree < 0 || ev.degree > cap) continue;
        DegreeRecord& rec = result.degrees[ev.degree];
        if (rec.status != DegreeStatus::Inconsistent) {
            rec.status = DegreeStatus::Inconsistent;
            rec.value.reset();
            rec.candidates.clear();
            rec.trace = "contradiction: " + ev.message;
        } else {
            rec.trace += "; " + ev.message;
        }
    }

    sol.schedule = std::move(last->schedule);
    sol.constraints = std::move(last->constraints);
    sol.events = std::move(last->events);
    sol.pages = std::move(last->pages);
    sol.convergence = check_convergence(sol.pages.back(), cap);
    return sol;
}

ReplayReport replay_schedule(const TowerSolution& solution, const GradedGroups& fiber) {
    ReplayReport rep;
    const TowerResult& result = solution.result;
    GradedGroups prefix = result.determined_prefix();
    int top = prefix.reliable_up_to;
    rep.determined_through = top;
    if (solution.pages.empty() || top < 0) {
        rep.pass = top >= 0;
        return rep;
    }
    int cap = solution.pages.front().cap();
    std::vector<EntryState> base;
    for (int d = 0; d <= cap + 1; ++d)
        base.push_back(d <= top ? EntryState::known(prefix.entries[d]) : EntryState::variable(fmt::format("v{}", d)));

    Page page = build_e2(base, fiber, cap);
    for (int r = 2; r <= cap + 1; ++r) {
        for (const auto& step : solution.schedule) {
            if (step.page != r || step.record.status != DifferentialRecord::Status::KnownMap) continue;
            const EntryState& x = page.at(step.source);
            const EntryState& y = page.at(step.target);
            const GroupMap& m = *step.record.map;
            bool fits = x.is_known() && y.is_known() && x.group() == m.domain() && y.group() == m.codomain();
            if (!fits) {
                if (step.target.total() <= top)
                    rep.problems.push_back(fmt::format("page {}: map {} -> {} no longer fits", r,
                                                       step.source.to_string(), step.target.to_string()));
                continue;
            }
            page.set_differential(step.source, step.record);
        }
        for (const auto& [pos, e] : page.entries()) {
            if (page.differential(pos)) continue;
            auto info = differential_target(pos.p, pos.q, r);
            if (info.off_grid || !page.in_grid(info.target)) continue;
            const EntryState& y = page.at(info.target);
            if (y.is_zero() || !hom_possible(e.profile(), y.profile()))
                page.set_differential(pos, DifferentialRecord::forced_zero("replay"));
        }
        auto bad = check_d_squared(page);
        for (auto p : bad) rep.problems.push_back(fmt::format("page {}: d∘d nonzero at {}", r, p.to_string()));
        page = turn_page(page, TurnMode::Partial);
    }
    rep.convergence = check_convergence(page, top - 1);
    if (top >= 1 && !page.at(top, 0).is_zero()) {
        rep.convergence.pass = false;
        rep.convergence.violations.push_back({{top, 0}, fmt::format("{} survives", render_cell(page.at(top, 0)))});
    }
    rep.pass = rep.convergence.pass && rep.problems.empty();
    return rep;
}

} // namespace emtower
