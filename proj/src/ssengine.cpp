#include "emtower/ssengine.hpp"

#include "emtower/errors.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace emtower {

std::string Position::to_string() const { return fmt::format("({},{})", p, q); }

Profile Profile::of(const FgAbGroup& g) {
    Profile out;
    out.free = g.free_rank() > 0;
    for (const auto& d : g.torsion())
        for (const auto& p : prime_factors(d)) out.primes.insert(p);
    return out;
}

Profile Profile::subquotient() const {
    Profile out = *this;
    if (free) out.all_primes = true;
    return out;
}

Profile Profile::merged(const Profile& other) const {
    Profile out = *this;
    out.free = free || other.free;
    out.all_primes = all_primes || other.all_primes;
    out.primes.insert(other.primes.begin(), other.primes.end());
    return out;
}

bool hom_possible(const Profile& source, const Profile& target) {
    if (!source.nonzero_capable() || !target.nonzero_capable()) return false;
    if (source.free) return true;
    // Torsion source: needs a shared prime in the target's torsion.
    if (source.all_primes) return target.all_primes || !target.primes.empty();
    if (target.all_primes) return !source.primes.empty();
    for (const auto& p : source.primes)
        if (target.primes.count(p)) return true;
    return false;
}

EntryState EntryState::known(const FgAbGroup& g) {
    EntryState e;
    if (g.is_trivial()) return e;
    e.kind_ = Kind::Known;
    e.group_ = g;
    return e;
}

EntryState EntryState::variable(std::string id, Profile profile) {
    if (!profile.nonzero_capable()) return {};
    EntryState e;
    e.kind_ = Kind::Variable;
    e.id_ = std::move(id);
    e.profile_ = std::move(profile);
    return e;
}

const FgAbGroup& EntryState::group() const {
    if (kind_ == Kind::Variable)
        throw EngineError(ErrorCode::InvalidArgument, fmt::format("entry ?{} has no known group", id_));
    return group_;
}

Profile EntryState::profile() const {
    if (kind_ == Kind::Variable) return profile_;
    return Profile::of(group_);
}

bool DifferentialRecord::acts_as_zero() const {
    if (status == Status::ForcedZero) return true;
    return status == Status::KnownMap && map && map->is_zero();
}

const char* status_name(DifferentialRecord::Status s) {
    switch (s) {
    case DifferentialRecord::Status::ForcedZero: return "ForcedZero";
    case DifferentialRecord::Status::KnownMap: return "KnownMap";
    case DifferentialRecord::Status::Opaque: return "Opaque";
    }
    return "?";
}

TargetInfo differential_target(int p, int q, int r) {
    Position t{p + r, q - r + 1};
    return {t, t.p < 0 || t.q < 0};
}

namespace {
const EntryState kZeroEntry;
}

const EntryState& Page::at(Position pos) const {
    auto it = grid_.find(pos);
    return it == grid_.end() ? kZeroEntry : it->second;
}

void Page::set(Position pos, EntryState state) {
    if (!in_grid(pos))
        throw EngineError(ErrorCode::DegreeOutOfRange,
                          fmt::format("position {} outside the grid of cap {}", pos.to_string(), cap_));
    if (state.is_zero()) grid_.erase(pos);
    else grid_[pos] = std::move(state);
}

const DifferentialRecord* Page::differential(Position source) const {
    auto it = diffs_.find(source);
    return it == diffs_.end() ? nullptr : &it->second;
}

void Page::set_differential(Position source, DifferentialRecord rec) { diffs_[source] = std::move(rec); }

std::optional<Position> Page::source_into(Position target) const {
    Position s{target.p - r_, target.q + r_ - 1};
    if (s.p < 0) return std::nullopt;
    return s;
}

// ---------------------------------------------------------------------------

namespace {

Profile coefficient_profile(const Profile& hp, const FgAbGroup& m) {
    // H^p (x) M + Tor(H^{p+1}, M): torsion primes all come from M unless M
    // has a free summand, in which case H^p passes through.
    Profile out = Profile::of(m.torsion_part());
    if (m.free_rank() > 0) out = out.merged(hp);
    return out;
}

} // namespace

Page build_e2(const std::vector<EntryState>& base, const GradedGroups& fiber, int cap) {
    if (cap < 0) throw EngineError(ErrorCode::InvalidArgument, "negative degree cap");
    if (int(base.size()) < cap + 2)
        throw EngineError(ErrorCode::InvalidArgument,
                          fmt::format("base needs degrees 0..{}, got {}", cap + 1, base.size()));
    Page page(2, cap);
    for (int p = 0; p <= cap + 1; ++p) {
        const EntryState& hp = base[p];
        const EntryState* hp1 = p + 1 < int(base.size()) ? &base[p + 1] : nullptr;
        for (int q = 0; q + p <= cap + 1; ++q) {
            Position pos{p, q};
            if (!fiber.covers(q)) {
                if (p == 0) {
                    page.set(pos, EntryState::variable(fmt::format("f{}", q)));
                    continue;
                }
                bool hp_known = !hp.is_variable();
                bool hp1_known = hp1 && !hp1->is_variable();
                if (hp_known && hp1_known) {
                    const FgAbGroup& a = hp.group();
                    const FgAbGroup& b = hp1->group();
                    if (a.is_trivial() && b.torsion().empty()) continue;
                    Profile pr = Profile::of(a).subquotient().merged(Profile::of(b.torsion_part()));
                    if (a.free_rank() > 0) pr = Profile::all();
                    page.set(pos, EntryState::variable(fmt::format("f{}.{}", q, p), pr));
                } else {
                    page.set(pos, EntryState::variable(fmt::format("f{}.{}", q, p)));
                }
                continue;
            }
            FgAbGroup m = fiber.at(q);
            if (m.is_trivial()) continue;
            bool needs_next = !m.is_free();
            if (hp.is_variable()) {
                if (m == FgAbGroup::free(1) && q == 0) {
                    page.set(pos, hp);
                } else if (m == FgAbGroup::free(1)) {
                    page.set(pos, EntryState::variable(fmt::format("v{}.{}", p, q), hp.profile()));
                } else {
                    page.set(pos, EntryState::variable(fmt::format("v{}.{}", p, q),
                                                       coefficient_profile(hp.profile(), m)));
                }
                continue;
            }
            if (needs_next && (!hp1 || hp1->is_variable())) {
                Profile pr = Profile::of(tensor(hp.group(), m)).merged(Profile::of(m.torsion_part()));
                page.set(pos, EntryState::variable(fmt::format("u{}.{}", p, q), pr));
                continue;
            }
            FgAbGroup next = needs_next ? hp1->group() : FgAbGroup::trivial();
            page.set(pos, EntryState::known(coefficient_cohomology(hp.group(), next, m)));
        }
    }
    return page;
}

// ---------------------------------------------------------------------------

namespace {

struct Side {
    bool zero = true;
    bool resolved = true;
    const GroupMap* map = nullptr;
    bool kills_source = false;
};

Side outgoing_side(const Page& page, Position pos, TurnMode mode) {
    Side s;
    auto info = differential_target(pos.p, pos.q, page.r());
    if (info.off_grid) return s;
    const DifferentialRecord* rec = page.differential(pos);
    if (!page.in_grid(info.target)) {
        // Beyond the stored diagonal: implicitly zero for hand-built pages,
        // unknown for the solver unless a record says otherwise.
        if (mode == TurnMode::Strict) return s;
        if (rec && rec->acts_as_zero()) return s;
        s.zero = false;
        s.resolved = false;
        return s;
    }
    if (page.at(info.target).is_zero()) return s;
    if (!rec) {
        s.zero = false;
        s.resolved = false;
        return s;
    }
    if (rec->source_dies) {
        s.zero = false;
        s.kills_source = true;
        return s;
    }
    if (rec->acts_as_zero()) return s;
    s.zero = false;
    if (rec->status == DifferentialRecord::Status::KnownMap) s.map = &*rec->map;
    else s.resolved = false;
    return s;
}

Side incoming_side(const Page& page, Position pos) {
    Side s;
    auto src = page.source_into(pos);
    if (!src || page.at(*src).is_zero()) return s;
    const DifferentialRecord* rec = page.differential(*src);
    if (!rec) {
        s.zero = false;
        s.resolved = false;
        return s;
    }
    if (rec->acts_as_zero()) return s;
    s.zero = false;
    if (rec->status == DifferentialRecord::Status::KnownMap) s.map = &*rec->map;
    else s.resolved = false;
    return s;
}

std::string unresolved_id(const EntryState& e, Position pos) {
    if (e.is_variable()) return e.id();
    return fmt::format("e{}.{}", pos.p, pos.q);
}

} // namespace

Page turn_page(const Page& page, TurnMode mode) {
    Page next(page.r() + 1, page.cap());
    std::vector<std::string> blocked;
    for (const auto& [pos, entry] : page.entries()) {
        Side out = outgoing_side(page, pos, mode);
        Side in = incoming_side(page, pos);
        if (out.kills_source) continue;
        if (out.zero && in.zero) {
            next.set(pos, entry);
            continue;
        }
        bool computable = entry.is_known() && out.resolved && in.resolved;
        if (computable) {
            if (out.map && !(out.map->domain() == entry.group()))
                throw EngineError(ErrorCode::InvalidArgument,
                                  fmt::format("differential at {} has the wrong domain", pos.to_string()));
            if (in.map && !(in.map->codomain() == entry.group()))
                throw EngineError(ErrorCode::InvalidArgument,
                                  fmt::format("differential into {} has the wrong codomain", pos.to_string()));
            try {
                next.set(pos, EntryState::known(homology_at(in.map, entry.group(), out.map)));
                continue;
            } catch (const EngineError&) {
                if (mode == TurnMode::Strict) throw;
            }
        }
        if (mode == TurnMode::Strict) {
            blocked.push_back(pos.to_string());
            continue;
        }
        next.set(pos, EntryState::variable(unresolved_id(entry, pos), entry.profile().subquotient()));
    }
    if (!blocked.empty())
        throw EngineError(ErrorCode::OpaqueDifferential,
                          fmt::format("page {} has unresolved differentials at {}", page.r(), fmt::join(blocked, " ")));
    return next;
}

ConvergenceReport check_convergence(const Page& final_page, int through) {
    ConvergenceReport rep;
    auto violate = [&](Position pos, std::string what) {
        rep.pass = false;
        rep.violations.push_back({pos, std::move(what)});
    };
    const EntryState& origin = final_page.at(0, 0);
    if (!origin.is_known() || !(origin.group() == FgAbGroup::free(1)))
        violate({0, 0}, fmt::format("expected Z, found {}", render_cell(origin)));
    for (const auto& [pos, entry] : final_page.entries()) {
        if (pos.total() < 1 || pos.total() > through) continue;
        if (entry.is_known()) violate(pos, fmt::format("{} survives", entry.group().to_string()));
        else violate(pos, fmt::format("unresolved ?{}", entry.id()));
    }
    return rep;
}

ConvergenceReport check_convergence(const Page& final_page, const GradedGroups& abutment, int through) {
    ConvergenceReport rep;
    for (int n = 0; n <= through; ++n) {
        std::size_t rank = 0;
        Integer order = 1;
        bool unknown = false;
        for (int p = 0; p <= n; ++p) {
            const EntryState& e = final_page.at(p, n - p);
            if (e.is_variable()) {
                unknown = true;
                rep.pass = false;
                rep.violations.push_back({{p, n - p}, fmt::format("unresolved ?{}", e.id())});
                continue;
            }
            rank += e.group().free_rank();
            order *= e.group().torsion_order();
        }
        if (unknown) continue;
        FgAbGroup target = abutment.at(n);
        if (rank != target.free_rank() || order != target.torsion_order()) {
            rep.pass = false;
            rep.violations.push_back(
                {{0, n}, fmt::format("degree {}: diagonal has rank {} and torsion order {}, abutment {}", n, rank,
                                     order.str(), target.to_string())});
        }
    }
    return rep;
}

std::vector<Position> check_d_squared(const Page& page) {
    std::vector<Position> bad;
    for (const auto& [src, rec] : page.differentials()) {
        if (rec.status != DifferentialRecord::Status::KnownMap) continue;
        Position mid = page.target_of(src);
        const DifferentialRecord* next = page.differential(mid);
        if (!next || next->status != DifferentialRecord::Status::KnownMap) continue;
        if (!compose(*next->map, *rec.map).is_zero()) bad.push_back(src);
    }
    return bad;
}

std::string render_cell(const EntryState& e) {
    switch (e.kind()) {
    case EntryState::Kind::Zero: return ".";
    case EntryState::Kind::Variable: return "?" + e.id();
    case EntryState::Kind::Known: {
        std::string s = e.group().to_string();
        s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
        return s;
    }
    }
    return "";
}

std::string render_page_ascii(const Page& page) {
    int top = page.cap() + 1;
    std::size_t width = 1;
    for (const auto& [pos, e] : page.entries()) width = std::max(width, render_cell(e).size());
    width = std::max<std::size_t>(width + 1, 4);
    std::size_t label = fmt::format("{}", top).size();

    std::string out = fmt::format("E_{} page, total degree <= {}\n", page.r(), top);
    for (int q = top; q >= 0; --q) {
        std::string line = fmt::format("{:>{}} |", q, label);
        for (int p = 0; p + q <= top; ++p) line += fmt::format(" {:<{}}", render_cell(page.at(p, q)), width);
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out += line + "\n";
    }
    out += fmt::format("{:>{}} +{}\n", "", label, std::string((top + 1) * (width + 1), '-'));
    std::string axis = fmt::format("{:>{}}  ", "", label);
    for (int p = 0; p <= top; ++p) axis += fmt::format(" {:<{}}", p, width);
    while (!axis.empty() && axis.back() == ' ') axis.pop_back();
    out += axis + "\n";
    return out;
}

} // namespace emtower
