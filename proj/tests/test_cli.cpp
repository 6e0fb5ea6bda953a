#include <doctest.h>

#include "emtower/towerfile.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;
using namespace emtower;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

fs::path scratch() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / fmt::format("emtower-cli-{}", ::getpid());
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Run run(const std::string& args, const std::string& env = "") {
    fs::path out = scratch() / "stdout.txt", err = scratch() / "stderr.txt";
    std::string cmd = fmt::format("{} '{}' {} >'{}' 2>'{}'", env, EMTOWER_CLI, args, out.string(), err.string());
    int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

std::string cache_flag(const std::string& name) {
    fs::path d = scratch() / name;
    return fmt::format("--cache-dir '{}'", d.string());
}

// Cell text at (p,q) in an ASCII page dump.
std::string cell(const std::string& dump, int p, int q) {
    std::istringstream in(dump);
    std::string line;
    while (std::getline(in, line)) {
        auto bar = line.find('|');
        if (bar == std::string::npos) continue;
        std::string label = line.substr(0, bar);
        label.erase(0, label.find_first_not_of(' '));
        label.erase(label.find_last_not_of(' ') + 1);
        if (label != std::to_string(q)) continue;
        std::istringstream cells(line.substr(bar + 1));
        std::string c;
        for (int i = 0; i <= p; ++i)
            if (!(cells >> c)) return "";
        return c;
    }
    return "";
}

} // namespace

TEST_CASE("compute writes a tower file") {
    Run r = run(fmt::format("{} compute --n 2 --max-degree 12", cache_flag("c1")));
    CHECK(r.code == 0);
    TowerResult t = tower_from_json(r.out);
    REQUIRE(t.degrees.size() == 13);
    for (int d = 0; d <= 12; ++d) {
        CHECK(t.at(d).status == DegreeStatus::Determined);
        CHECK(*t.at(d).value == (d % 2 == 0 ? FgAbGroup::free(1) : FgAbGroup::trivial()));
    }
    CHECK(tower_to_json(t) == r.out);

    Run zero = run(fmt::format("{} compute --n 3 --max-degree 0", cache_flag("c1")));
    CHECK(zero.code == 0);
    TowerResult z = tower_from_json(zero.out);
    REQUIRE(z.degrees.size() == 1);
    CHECK(*z.at(0).value == FgAbGroup::free(1));

    fs::path file = scratch() / "kz2.json";
    Run to_file = run(fmt::format("{} --quiet compute --n 2 --max-degree 6 --out '{}'", cache_flag("c1"), file.string()));
    CHECK(to_file.code == 0);
    CHECK(to_file.out.empty());
    CHECK(to_file.err.empty());
    CHECK(tower_from_json(slurp(file)).n == 2);
}

TEST_CASE("exit status follows the worst degree") {
    Run three = run(fmt::format("{} compute --n 3 --max-degree 9", cache_flag("c2")));
    CHECK(three.code == 2);
    Run four = run(fmt::format("{} compute --n 4 --max-degree 12 --fiber-variant paper-section4", cache_flag("c2")));
    CHECK(four.code == 2);
    TowerResult t = tower_from_json(four.out);
    CHECK(t.worst_status() != DegreeStatus::Determined);

    CHECK(run("compute --n 1 --max-degree 4").code == 1);
    CHECK(run("compute --n 4").code == 1);
    CHECK(run("frobnicate").code == 1);
    CHECK(run(fmt::format("{} compute --n 5 --max-degree 8 --fiber-variant paper-section4", cache_flag("c2"))).code == 1);
}

TEST_CASE("stages are cached and reused") {
    std::string cache = cache_flag("c3");
    Run four = run(fmt::format("{} compute --n 4 --max-degree 8", cache));
    CHECK(four.err.find("[derive] K(Z,2) max-degree 8") != std::string::npos);
    CHECK(four.err.find("[derive] K(Z,4) max-degree 8") != std::string::npos);
    CHECK(fs::exists(scratch() / "c3" / "k_z_4.json"));
    CHECK(fs::exists(scratch() / "c3" / "k_z_4.meta.json"));

    Run five = run(fmt::format("{} compute --n 5 --max-degree 8", cache));
    for (int k = 2; k <= 4; ++k) CHECK(five.err.find(fmt::format("[derive] K(Z,{})", k)) == std::string::npos);
    CHECK(five.err.find("[cache] hit K(Z,4) max-degree 8") != std::string::npos);
    CHECK(five.err.find("[derive] K(Z,5) max-degree 8") != std::string::npos);

    // the meta sidecar, not the tower file, carries run information
    auto meta = nlohmann::json::parse(slurp(scratch() / "c3" / "k_z_4.meta.json"));
    CHECK(meta["n"] == 4);
    CHECK(meta.contains("written_at"));
    CHECK(slurp(scratch() / "c3" / "k_z_4.json").find("written_at") == std::string::npos);

    // environment variable selects the directory
    fs::path envdir = scratch() / "c4";
    Run viaenv = run("compute --n 2 --max-degree 4", fmt::format("EMTOWER_CACHE_DIR='{}'", envdir.string()));
    CHECK(viaenv.code == 0);
    CHECK(fs::exists(envdir / "k_z_2.json"));
}

TEST_CASE("fiber files") {
    std::string cache = cache_flag("c5");
    fs::path kz3 = scratch() / "kz3.json";
    run(fmt::format("{} compute --n 3 --max-degree 8 --out '{}'", cache, kz3.string()));
    Run ok = run(fmt::format("{} compute --n 4 --max-degree 8 --fiber '{}'", cache, kz3.string()));
    CHECK(ok.code != 1);
    CHECK(tower_from_json(ok.out).n == 4);

    fs::path bad = scratch() / "bad.json";
    std::ofstream(bad) << "{\"format_version\": 1, \"space\": ";
    Run broken = run(fmt::format("{} compute --n 4 --max-degree 8 --fiber '{}'", cache, bad.string()));
    CHECK(broken.code == 1);
    CHECK(broken.err.find("byte") != std::string::npos);

    fs::path schema = scratch() / "schema.json";
    std::ofstream(schema) << R"({"format_version": 1, "space": {"family": "K", "group": "Z", "n": 3},
        "coefficients": "Z", "reliable_up_to": 0, "groups": [{"degree": 0, "status": "Determined",
        "free_rank": 1, "torsion": [4, 2], "trace": ""}]})";
    Run chain = run(fmt::format("{} compute --n 4 --max-degree 8 --fiber '{}'", cache, schema.string()));
    CHECK(chain.code == 1);
    CHECK(chain.err.find("/groups/0/torsion") != std::string::npos);

    Run wrong_n = run(fmt::format("{} compute --n 5 --max-degree 8 --fiber '{}'", cache, kz3.string()));
    CHECK(wrong_n.code == 1);

    Run both = run(fmt::format("{} compute --n 4 --max-degree 8 --fiber '{}' --fiber-variant paper-section4", cache,
                               kz3.string()));
    CHECK(both.code == 1);
}

TEST_CASE("page dumps") {
    std::string cache = cache_flag("c6");
    Run four = run(fmt::format("{} page --n 4 --page 2 --max-degree 10 --fiber-variant paper-section4", cache));
    CHECK(four.code == 0);
    CHECK(cell(four.out, 0, 6) == "Z_2");
    for (int q = 0; q <= 10; ++q) CHECK(cell(four.out, 1, q) == ".");

    Run five = run(fmt::format("{} page --n 5 --page 2 --max-degree 9 --fiber-variant paper-section5", cache));
    CHECK(five.code == 0);
    CHECK(cell(five.out, 0, 4) == "Z");

    Run late = run(fmt::format("{} page --n 2 --page 40 --max-degree 4", cache));
    CHECK(late.code == 0);
    CHECK(late.err.find("[page]") != std::string::npos);
    CHECK(run(fmt::format("{} page --n 2 --page 1 --max-degree 4", cache)).code == 1);
}

TEST_CASE("replication reports") {
    Run text = run("replicate --case kz4");
    CHECK(text.code == 0);
    CHECK(text.out.find("PAPER-INTERNALLY-INCONSISTENT") != std::string::npos);
    Run js = run("replicate --case kz5 --format json");
    CHECK(js.code == 0);
    CHECK(nlohmann::json::parse(js.out).is_object());
    CHECK(run("replicate --case kz7").code == 1);
}

TEST_CASE("smith normal form command") {
    Run id = run("snf --matrix '1 0; 0 1'");
    CHECK(id.code == 0);
    CHECK(id.out.find("D = 1 0; 0 1\n") != std::string::npos);

    Run ex = run("snf --matrix '2 4; 6 8'");
    CHECK(ex.out == "U = 1 0; 3 -1\nD = 2 0; 0 4\nV = 1 -2; 0 1\n");

    CHECK(run("snf --matrix 0").out.find("D = 0\n") != std::string::npos);

    fs::path file = scratch() / "m.txt";
    std::ofstream(file) << "2 0\n;0 3\n";
    CHECK(run(fmt::format("snf --matrix '{}'", file.string())).out.find("D = 1 0; 0 6") != std::string::npos);

    Run bad = run("snf --matrix '1 2; 3'");
    CHECK(bad.code == 1);
    CHECK(bad.err.find("PARSE_ERROR: offset 4") != std::string::npos);
}
