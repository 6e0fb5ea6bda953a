#include "emtower/fgab.hpp"

#include "emtower/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>

namespace emtower {

using boost::multiprecision::gcd;

FgAbGroup FgAbGroup::free(std::size_t rank) {
    FgAbGroup g;
    g.free_rank_ = rank;
    return g;
}

FgAbGroup FgAbGroup::cyclic(const Integer& d) {
    if (d == 0) return free(1);
    if (d < 0) throw EngineError(ErrorCode::InvalidArgument, "negative cyclic order");
    if (d == 1) return {};
    FgAbGroup g;
    g.torsion_.push_back(d);
    return g;
}

FgAbGroup FgAbGroup::from_chain(std::size_t free_rank, std::vector<Integer> torsion) {
    for (std::size_t i = 0; i < torsion.size(); ++i) {
        if (torsion[i] < 2)
            throw EngineError(ErrorCode::InvalidArgument,
                              fmt::format("invariant factor {} is below 2", torsion[i].str()));
        if (i > 0 && torsion[i] % torsion[i - 1] != 0)
            throw EngineError(ErrorCode::InvalidArgument,
                              fmt::format("invariant factor {} does not divide {}", torsion[i - 1].str(),
                                          torsion[i].str()));
    }
    FgAbGroup g;
    g.free_rank_ = free_rank;
    g.torsion_ = std::move(torsion);
    return g;
}

Integer FgAbGroup::order() const {
    if (free_rank_ != 0) throw EngineError(ErrorCode::Unsupported, "order of an infinite group");
    return torsion_order();
}

Integer FgAbGroup::torsion_order() const {
    Integer n = 1;
    for (const auto& d : torsion_) n *= d;
    return n;
}

std::vector<Integer> FgAbGroup::generator_orders() const {
    std::vector<Integer> out(free_rank_, Integer(0));
    out.insert(out.end(), torsion_.begin(), torsion_.end());
    return out;
}

std::string FgAbGroup::to_string() const {
    std::vector<std::string> parts;
    if (free_rank_ == 1) parts.push_back("Z");
    else if (free_rank_ > 1) parts.push_back(fmt::format("Z^{}", free_rank_));
    for (const auto& d : torsion_) parts.push_back("Z_" + d.str());
    if (parts.empty()) return "0";
    return fmt::format("{}", fmt::join(parts, " + "));
}

std::string FgAbGroup::to_primary_string() const {
    std::vector<std::string> parts;
    if (free_rank_ == 1) parts.push_back("Z");
    else if (free_rank_ > 1) parts.push_back(fmt::format("Z^{}", free_rank_));
    std::vector<std::pair<Integer, Integer>> powers;  // (prime, prime power)
    for (const auto& d : torsion_) {
        Integer rest = d;
        for (const auto& p : prime_factors(d)) {
            Integer q = 1;
            while (rest % p == 0) {
                rest /= p;
                q *= p;
            }
            powers.emplace_back(p, q);
        }
    }
    std::sort(powers.begin(), powers.end());
    for (const auto& pq : powers) parts.push_back("Z_" + pq.second.str());
    if (parts.empty()) return "0";
    return fmt::format("{}", fmt::join(parts, " + "));
}

std::strong_ordering operator<=>(const FgAbGroup& a, const FgAbGroup& b) {
    if (a.free_rank_ != b.free_rank_) return a.free_rank_ <=> b.free_rank_;
    if (a.torsion_.size() != b.torsion_.size()) return a.torsion_.size() <=> b.torsion_.size();
    for (std::size_t i = 0; i < a.torsion_.size(); ++i) {
        if (a.torsion_[i] < b.torsion_[i]) return std::strong_ordering::less;
        if (b.torsion_[i] < a.torsion_[i]) return std::strong_ordering::greater;
    }
    return std::strong_ordering::equal;
}

FgAbGroup canonicalize(std::size_t free_rank, const std::vector<Integer>& coefficients) {
    std::vector<Integer> kept;
    for (const auto& c : coefficients) {
        if (c < 1)
            throw EngineError(ErrorCode::InvalidArgument,
                              fmt::format("cyclic coefficient {} must be at least 1", c.str()));
        if (c > 1) kept.push_back(c);
    }
    bool chain = true;
    for (std::size_t i = 1; i < kept.size() && chain; ++i) chain = kept[i] % kept[i - 1] == 0;
    if (chain) return FgAbGroup::from_chain(free_rank, std::move(kept));

    SnfResult s = smith_normal_form(IntMatrix::diagonal(kept));
    std::vector<Integer> torsion;
    for (const auto& x : s.diagonal())
        if (x > 1) torsion.push_back(x);
    return FgAbGroup::from_chain(free_rank, std::move(torsion));
}

FgAbGroup from_cyclic_orders(const std::vector<Integer>& orders) {
    std::size_t free_rank = 0;
    std::vector<Integer> finite;
    for (const auto& d : orders) {
        if (d == 0) ++free_rank;
        else finite.push_back(d);
    }
    return canonicalize(free_rank, finite);
}

FgAbGroup parse_group(std::string_view text) {
    std::size_t free_rank = 0;
    std::vector<Integer> coefficients;
    std::size_t i = 0;
    auto skip_space = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    auto digits = [&](const char* what) {
        std::size_t start = i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        if (start == i) throw EngineError(ErrorCode::Parse, fmt::format("offset {}: expected {}", start, what));
        return std::string(text.substr(start, i - start));
    };

    for (;;) {
        skip_space();
        if (i >= text.size()) throw EngineError(ErrorCode::Parse, fmt::format("offset {}: expected a summand", i));
        std::size_t start = i;
        if (text[i] == '0') {
            ++i;
        } else if (text[i] == 'Z') {
            ++i;
            if (i < text.size() && text[i] == '^') {
                ++i;
                free_rank += std::stoul(digits("a rank"));
            } else if (i < text.size() && text[i] == '_') {
                ++i;
                Integer d(digits("a cyclic order"));
                if (d < 1) throw EngineError(ErrorCode::Parse, fmt::format("offset {}: cyclic order must be positive", start));
                coefficients.push_back(d);
            } else {
                ++free_rank;
            }
        } else {
            throw EngineError(ErrorCode::Parse, fmt::format("offset {}: unexpected character '{}'", i, text[i]));
        }
        skip_space();
        if (i >= text.size()) break;
        if (text[i] != '+') throw EngineError(ErrorCode::Parse, fmt::format("offset {}: expected '+'", i));
        ++i;
    }
    return canonicalize(free_rank, coefficients);
}

FgAbGroup direct_sum(const FgAbGroup& a, const FgAbGroup& b) {
    std::vector<Integer> t = a.torsion();
    t.insert(t.end(), b.torsion().begin(), b.torsion().end());
    std::sort(t.begin(), t.end());
    return canonicalize(a.free_rank() + b.free_rank(), t);
}

namespace {

// Bilinear expansion over cyclic summands; `pair` maps two orders (0 = Z)
// to the order of the summand produced, or 1 when it vanishes.
template <class Pair>
FgAbGroup expand(const FgAbGroup& a, const FgAbGroup& b, Pair pair) {
    std::vector<Integer> out;
    for (const auto& x : a.generator_orders())
        for (const auto& y : b.generator_orders()) out.push_back(pair(x, y));
    std::size_t free_rank = 0;
    std::vector<Integer> finite;
    for (const auto& d : out) {
        if (d == 0) ++free_rank;
        else if (d > 1) finite.push_back(d);
    }
    std::sort(finite.begin(), finite.end());
    return canonicalize(free_rank, finite);
}

} // namespace

FgAbGroup tensor(const FgAbGroup& a, const FgAbGroup& b) {
    return expand(a, b, [](const Integer& x, const Integer& y) -> Integer { return gcd(x, y); });
}

FgAbGroup tor(const FgAbGroup& a, const FgAbGroup& b) {
    return expand(a, b, [](const Integer& x, const Integer& y) -> Integer {
        if (x == 0 || y == 0) return 1;
        return gcd(x, y);
    });
}

FgAbGroup hom(const FgAbGroup& a, const FgAbGroup& b) {
    return expand(a, b, [](const Integer& x, const Integer& y) -> Integer {
        if (x == 0) return y;
        if (y == 0) return 1;
        return gcd(x, y);
    });
}

FgAbGroup ext(const FgAbGroup& a, const FgAbGroup& b) {
    return expand(a, b, [](const Integer& x, const Integer& y) -> Integer {
        if (x == 0) return 1;
        if (y == 0) return x;
        return gcd(x, y);
    });
}

std::vector<Integer> prime_factors(Integer value) {
    std::vector<Integer> out;
    if (value < 0) value = -value;
    for (Integer p = 2; p * p <= value; ++p) {
        if (value % p != 0) continue;
        out.push_back(p);
        while (value % p == 0) value /= p;
    }
    if (value > 1) out.push_back(value);
    return out;
}

// ---------------------------------------------------------------------------
// Maps

namespace {

Integer mod_floor(const Integer& x, const Integer& m) {
    Integer r = x % m;
    if (r < 0) r += m;
    return r;
}

} // namespace

GroupMap::GroupMap(FgAbGroup domain, FgAbGroup codomain, IntMatrix matrix)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), matrix_(std::move(matrix)) {
    if (matrix_.rows() != codomain_.generator_count() || matrix_.cols() != domain_.generator_count())
        throw EngineError(ErrorCode::IllDefinedMap,
                          fmt::format("matrix is {}x{}, expected {}x{} for {} -> {}", matrix_.rows(),
                                      matrix_.cols(), codomain_.generator_count(), domain_.generator_count(),
                                      domain_.to_string(), codomain_.to_string()));
    auto dom = domain_.generator_orders();
    auto cod = codomain_.generator_orders();
    for (std::size_t j = 0; j < dom.size(); ++j)
        for (std::size_t i = 0; i < cod.size(); ++i) {
            Integer& x = matrix_(i, j);
            if (cod[i] == 0) {
                if (dom[j] != 0 && x != 0)
                    throw EngineError(ErrorCode::IllDefinedMap,
                                      fmt::format("generator {} of order {} sent to a nonzero free coordinate", j,
                                                  dom[j].str()));
            } else {
                if (dom[j] != 0 && (dom[j] * x) % cod[i] != 0)
                    throw EngineError(ErrorCode::IllDefinedMap,
                                      fmt::format("generator {} of order {} has image {} in Z_{}", j, dom[j].str(),
                                                  x.str(), cod[i].str()));
                x = mod_floor(x, cod[i]);
            }
        }
}

GroupMap GroupMap::zero(const FgAbGroup& domain, const FgAbGroup& codomain) {
    return GroupMap(domain, codomain, IntMatrix(codomain.generator_count(), domain.generator_count()));
}

GroupMap GroupMap::identity(const FgAbGroup& group) {
    return GroupMap(group, group, IntMatrix::identity(group.generator_count()));
}

bool GroupMap::is_injective() const { return kernel_cokernel(*this).first.is_trivial(); }
bool GroupMap::is_surjective() const { return kernel_cokernel(*this).second.is_trivial(); }

GroupMap compose(const GroupMap& g, const GroupMap& f) {
    if (!(f.codomain() == g.domain()))
        throw EngineError(ErrorCode::InvalidArgument, "compose: codomain and domain differ");
    return GroupMap(f.domain(), g.codomain(), g.matrix() * f.matrix());
}

IntMatrix relation_matrix(const FgAbGroup& g) {
    std::size_t m = g.generator_count();
    IntMatrix r(m, g.torsion().size());
    for (std::size_t k = 0; k < g.torsion().size(); ++k) r(g.free_rank() + k, k) = g.torsion()[k];
    return r;
}

namespace {

// Preimage in Z^m (m = domain generators) of the codomain's zero.
IntMatrix kernel_lattice(const GroupMap& f) {
    IntMatrix combined = hconcat(f.matrix(), relation_matrix(f.codomain()));
    IntMatrix basis = kernel(combined).second;
    return basis.rows_range(0, f.domain().generator_count());
}

} // namespace

std::pair<FgAbGroup, FgAbGroup> kernel_cokernel(const GroupMap& f) {
    FgAbGroup ker = lattice_quotient(kernel_lattice(f), relation_matrix(f.domain()));
    FgAbGroup coker = cokernel(hconcat(f.matrix(), relation_matrix(f.codomain())));
    return {ker, coker};
}

FgAbGroup image(const GroupMap& f) {
    IntMatrix rel = relation_matrix(f.codomain());
    return lattice_quotient(hconcat(f.matrix(), rel), rel);
}

FgAbGroup homology_at(const GroupMap* in, const FgAbGroup& x, const GroupMap* out) {
    if (in && !(in->codomain() == x)) throw EngineError(ErrorCode::InvalidArgument, "incoming map misses entry");
    if (out && !(out->domain() == x)) throw EngineError(ErrorCode::InvalidArgument, "outgoing map misses entry");
    IntMatrix rel = relation_matrix(x);
    IntMatrix cycles = out ? kernel_lattice(*out) : IntMatrix::identity(x.generator_count());
    IntMatrix boundaries = in ? hconcat(in->matrix(), rel) : rel;
    try {
        return lattice_quotient(cycles, boundaries);
    } catch (const EngineError&) {
        throw EngineError(ErrorCode::InvalidArgument, "composite of consecutive maps is nonzero");
    }
}

std::optional<Integer> hom_count(const FgAbGroup& a, const FgAbGroup& b) {
    Integer total = 1;
    for (const auto& d : a.generator_orders()) {
        if (d == 0) {
            if (!b.is_finite()) return std::nullopt;
            total *= b.order();
        } else {
            for (const auto& e : b.torsion()) total *= gcd(d, e);
        }
    }
    return total;
}

std::optional<std::vector<GroupMap>> enumerate_homs(const FgAbGroup& a, const FgAbGroup& b, std::size_t cap) {
    auto count = hom_count(a, b);
    if (!count || *count > cap) return std::nullopt;

    auto dom = a.generator_orders();
    auto cod = b.generator_orders();
    // Per matrix cell: step and number of admissible residues.
    std::vector<Integer> step(dom.size() * cod.size(), Integer(0));
    std::vector<Integer> choices(dom.size() * cod.size(), Integer(1));
    for (std::size_t j = 0; j < dom.size(); ++j)
        for (std::size_t i = 0; i < cod.size(); ++i) {
            if (cod[i] == 0) continue;  // free coordinate: zero (domain finite here)
            Integer g = dom[j] == 0 ? cod[i] : gcd(dom[j], cod[i]);
            step[j * cod.size() + i] = cod[i] / g;
            choices[j * cod.size() + i] = g;
        }

    std::vector<GroupMap> out;
    out.reserve(static_cast<std::size_t>(*count));
    std::vector<Integer> digit(step.size(), Integer(0));
    for (;;) {
        IntMatrix m(cod.size(), dom.size());
        for (std::size_t j = 0; j < dom.size(); ++j)
            for (std::size_t i = 0; i < cod.size(); ++i) m(i, j) = digit[j * cod.size() + i] * step[j * cod.size() + i];
        out.emplace_back(a, b, std::move(m));
        std::size_t k = 0;
        while (k < digit.size()) {
            if (++digit[k] < choices[k]) break;
            digit[k] = 0;
            ++k;
        }
        if (k == digit.size()) break;
    }
    return out;
}

} // namespace emtower
