#include "emtower/towerfile.hpp"

#include "emtower/errors.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <fstream>
#include <limits>
#include <sstream>

namespace emtower {

namespace {

using json = nlohmann::ordered_json;

json integer_json(const Integer& v) {
    if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max())
        return json(static_cast<std::int64_t>(v));
    return json(v.str());
}

json torsion_json(const FgAbGroup& g) {
    json t = json::array();
    for (const auto& d : g.torsion()) t.push_back(integer_json(d));
    return t;
}

class Reader {
public:
    explicit Reader(std::string_view source) : source_(source) {}

    [[noreturn]] void fail(const std::string& pointer, const std::string& what) const {
        throw EngineError(ErrorCode::Parse, fmt::format("{}: at {}: {}", source_, pointer.empty() ? "/" : pointer, what));
    }

    const json& field(const json& obj, const std::string& pointer, const char* key) const {
        auto it = obj.find(key);
        if (it == obj.end()) fail(pointer, fmt::format("missing key \"{}\"", key));
        return *it;
    }

    long long integer(const json& v, const std::string& pointer) const {
        if (!v.is_number_integer()) fail(pointer, "expected an integer");
        return v.get<long long>();
    }

    std::string string(const json& v, const std::string& pointer) const {
        if (!v.is_string()) fail(pointer, "expected a string");
        return v.get<std::string>();
    }

    Integer big(const json& v, const std::string& pointer) const {
        if (v.is_number_integer()) return Integer(v.get<long long>());
        if (v.is_string()) {
            std::string s = v.get<std::string>();
            if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) fail(pointer, "expected digits");
            return Integer(s);
        }
        fail(pointer, "expected an integer or a decimal string");
    }

    FgAbGroup group(const json& obj, const std::string& pointer) const {
        const json& rank = field(obj, pointer, "free_rank");
        long long r = integer(rank, pointer + "/free_rank");
        if (r < 0) fail(pointer + "/free_rank", "negative rank");
        const json& tors = field(obj, pointer, "torsion");
        if (!tors.is_array()) fail(pointer + "/torsion", "expected an array");
        std::vector<Integer> chain;
        for (std::size_t i = 0; i < tors.size(); ++i) chain.push_back(big(tors[i], fmt::format("{}/torsion/{}", pointer, i)));
        try {
            return FgAbGroup::from_chain(std::size_t(r), chain);
        } catch (const EngineError& e) {
            fail(pointer + "/torsion", e.what());
        }
    }

private:
    std::string source_;
};

} // namespace

std::string tower_to_json(const TowerResult& tower) {
    json j;
    j["format_version"] = 1;
    j["space"] = json{{"family", "K"}, {"group", "Z"}, {"n", tower.n}};
    j["coefficients"] = "Z";
    j["reliable_up_to"] = tower.reliable_up_to;
    j["groups"] = json::array();
    for (const auto& rec : tower.degrees) {
        json g;
        g["degree"] = rec.degree;
        g["status"] = degree_status_name(rec.status);
        if (rec.value) {
            g["free_rank"] = rec.value->free_rank();
            g["torsion"] = torsion_json(*rec.value);
        } else {
            g["free_rank"] = nullptr;
            g["torsion"] = nullptr;
        }
        if (rec.status == DegreeStatus::Ambiguous) {
            g["candidates"] = json::array();
            for (const auto& c : rec.candidates)
                g["candidates"].push_back(json{{"free_rank", c.free_rank()}, {"torsion", torsion_json(c)}});
        }
        g["trace"] = rec.trace;
        j["groups"].push_back(std::move(g));
    }
    return j.dump(2) + "\n";
}

TowerResult tower_from_json(std::string_view text, std::string_view source) {
    Reader rd(source);
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw EngineError(ErrorCode::Parse, fmt::format("{}: byte {}: malformed JSON ({})", source, e.byte, e.what()));
    }
    if (!j.is_object()) rd.fail("", "expected an object");
    if (rd.integer(rd.field(j, "", "format_version"), "/format_version") != 1)
        rd.fail("/format_version", "unsupported version");
    const json& space = rd.field(j, "", "space");
    if (!space.is_object()) rd.fail("/space", "expected an object");
    if (rd.string(rd.field(space, "/space", "family"), "/space/family") != "K") rd.fail("/space/family", "expected \"K\"");
    if (rd.string(rd.field(space, "/space", "group"), "/space/group") != "Z") rd.fail("/space/group", "expected \"Z\"");
    if (rd.string(rd.field(j, "", "coefficients"), "/coefficients") != "Z") rd.fail("/coefficients", "expected \"Z\"");

    TowerResult tower;
    tower.n = int(rd.integer(rd.field(space, "/space", "n"), "/space/n"));
    tower.reliable_up_to = int(rd.integer(rd.field(j, "", "reliable_up_to"), "/reliable_up_to"));
    const json& groups = rd.field(j, "", "groups");
    if (!groups.is_array()) rd.fail("/groups", "expected an array");
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const std::string ptr = fmt::format("/groups/{}", i);
        const json& g = groups[i];
        if (!g.is_object()) rd.fail(ptr, "expected an object");
        DegreeRecord rec;
        rec.degree = int(rd.integer(rd.field(g, ptr, "degree"), ptr + "/degree"));
        if (rec.degree != int(i)) rd.fail(ptr + "/degree", fmt::format("expected degree {}", i));
        auto status = parse_degree_status(rd.string(rd.field(g, ptr, "status"), ptr + "/status"));
        if (!status) rd.fail(ptr + "/status", "unknown status");
        rec.status = *status;
        rec.trace = rd.string(rd.field(g, ptr, "trace"), ptr + "/trace");
        bool has_value = !rd.field(g, ptr, "free_rank").is_null() || !rd.field(g, ptr, "torsion").is_null();
        if (rec.status == DegreeStatus::Determined) {
            rec.value = rd.group(g, ptr);
        } else if (has_value) {
            rd.fail(ptr + "/free_rank", "only Determined degrees carry a value");
        }
        if (auto c = g.find("candidates"); c != g.end()) {
            if (rec.status != DegreeStatus::Ambiguous) rd.fail(ptr + "/candidates", "only Ambiguous degrees list candidates");
            if (!c->is_array()) rd.fail(ptr + "/candidates", "expected an array");
            for (std::size_t k = 0; k < c->size(); ++k) {
                std::string cptr = fmt::format("{}/candidates/{}", ptr, k);
                if (!(*c)[k].is_object()) rd.fail(cptr, "expected an object");
                rec.candidates.push_back(rd.group((*c)[k], cptr));
            }
        } else if (rec.status == DegreeStatus::Ambiguous) {
            rd.fail(ptr, "missing key \"candidates\"");
        }
        tower.degrees.push_back(std::move(rec));
    }
    return tower;
}

GradedGroups fiber_from_tower(const TowerResult& tower) {
    GradedGroups g = tower.determined_prefix();
    if (g.reliable_up_to > tower.reliable_up_to) {
        g.entries.resize(std::size_t(std::max(0, tower.reliable_up_to + 1)));
        g.reliable_up_to = tower.reliable_up_to;
    }
    return g;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw EngineError(ErrorCode::InvalidArgument, fmt::format("cannot read {}", path.string()));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw EngineError(ErrorCode::InvalidArgument, fmt::format("cannot write {}", tmp.string()));
        out << content;
        if (!out.flush()) throw EngineError(ErrorCode::InvalidArgument, fmt::format("short write to {}", tmp.string()));
    }
    fs::rename(tmp, path);
}

} // namespace emtower
