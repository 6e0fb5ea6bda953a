// emtower: integral cohomology of K(Z,n) via path-loop spectral sequences.

#include "emtower/errors.hpp"
#include "emtower/intlin.hpp"
#include "emtower/replicate.hpp"
#include "emtower/towerfile.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace emtower;

namespace {

struct Options {
    std::string cache_dir = "cache";
    bool quiet = false;
};

void note(const Options& opt, const std::string& line) {
    if (!opt.quiet) fmt::print(stderr, "{}\n", line);
}

struct CacheKey {
    int n;
    int max_degree;
    std::string variant;
};

fs::path cache_file(const Options& opt, int n) { return fs::path(opt.cache_dir) / fmt::format("k_z_{}.json", n); }
fs::path meta_file(const Options& opt, int n) { return fs::path(opt.cache_dir) / fmt::format("k_z_{}.meta.json", n); }

std::optional<TowerResult> cache_lookup(const Options& opt, const CacheKey& key) {
    fs::path data = cache_file(opt, key.n), meta = meta_file(opt, key.n);
    if (!fs::exists(data) || !fs::exists(meta)) return std::nullopt;
    try {
        auto m = nlohmann::json::parse(read_text_file(meta));
        if (m.value("n", -1) != key.n || m.value("max_degree", -1) != key.max_degree ||
            m.value("fiber_variant", std::string()) != key.variant)
            return std::nullopt;
        TowerResult t = tower_from_json(read_text_file(data), data.string());
        note(opt, fmt::format("[cache] hit K(Z,{}) max-degree {} ({})", key.n, key.max_degree, data.string()));
        return t;
    } catch (const std::exception& e) {
        note(opt, fmt::format("[cache] ignoring unreadable entry {}: {}", data.string(), e.what()));
        return std::nullopt;
    }
}

void cache_store(const Options& opt, const CacheKey& key, const TowerResult& tower) {
    nlohmann::ordered_json m;
    m["n"] = key.n;
    m["max_degree"] = key.max_degree;
    m["fiber_variant"] = key.variant;
    m["written_at"] = std::time(nullptr);
    write_file_atomic(cache_file(opt, key.n), tower_to_json(tower));
    write_file_atomic(meta_file(opt, key.n), m.dump(2) + "\n");
}

struct StageInput {
    GradedGroups fiber;
    std::string variant;  // cache key component; empty: do not cache
};

TowerSolution solve_stage(const Options& opt, int n, int max_degree, const GradedGroups& fiber) {
    note(opt, fmt::format("[derive] K(Z,{}) max-degree {}", n, max_degree));
    return solve_tower(n, max_degree, fiber);
}

// Tower for K(Z,n) built from the circle upward, every stage cached.
TowerResult computed_tower(const Options& opt, int n, int max_degree) {
    CacheKey key{n, max_degree, fiber_variant_name(FiberVariant::Computed)};
    if (auto hit = cache_lookup(opt, key)) return *hit;
    GradedGroups fiber = n == 2 ? circle_cohomology(max_degree) : fiber_from_tower(computed_tower(opt, n - 1, max_degree));
    TowerResult t = solve_stage(opt, n, max_degree, fiber).result;
    cache_store(opt, key, t);
    return t;
}

StageInput stage_input(const Options& opt, int n, int max_degree, const std::string& fiber_path,
                       const std::string& variant_text) {
    if (n < 2) throw EngineError(ErrorCode::InvalidArgument, fmt::format("n must be at least 2, got {}", n));
    if (max_degree < 0) throw EngineError(ErrorCode::InvalidArgument, "max-degree must be non-negative");
    if (!fiber_path.empty()) {
        TowerResult t = tower_from_json(read_text_file(fiber_path), fiber_path);
        if (t.n != n - 1)
            throw EngineError(ErrorCode::InvalidArgument,
                              fmt::format("{} describes K(Z,{}), expected K(Z,{})", fiber_path, t.n, n - 1));
        return {fiber_from_tower(t), ""};
    }
    auto variant = parse_fiber_variant(variant_text);
    if (!variant) throw EngineError(ErrorCode::InvalidArgument, fmt::format("unknown fiber variant '{}'", variant_text));
    if (*variant == FiberVariant::Computed) {
        GradedGroups fiber =
            n == 2 ? circle_cohomology(max_degree) : fiber_from_tower(computed_tower(opt, n - 1, max_degree));
        return {fiber, variant_text};
    }
    if (builtin_fiber_space(*variant) != n - 1)
        throw EngineError(ErrorCode::InvalidArgument,
                          fmt::format("fiber variant {} describes K(Z,{}), expected K(Z,{})", variant_text,
                                      builtin_fiber_space(*variant), n - 1));
    return {builtin_fiber(*variant), variant_text};
}

int exit_code_for(DegreeStatus worst) {
    switch (worst) {
    case DegreeStatus::Determined: return 0;
    case DegreeStatus::Ambiguous:
    case DegreeStatus::Underdetermined: return 2;
    case DegreeStatus::Inconsistent: return 3;
    }
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Integral cohomology of Eilenberg-MacLane spaces K(Z,n) via path-loop spectral sequences"};
    app.require_subcommand(1);
    Options opt;
    app.add_option("--cache-dir", opt.cache_dir, "Directory for cached towers")->envname("EMTOWER_CACHE_DIR");
    app.add_flag("--quiet", opt.quiet, "Suppress cache and derivation notes");

    int n = 0, max_degree = 0, page_r = 2;
    std::string out_path, fiber_path, variant = "computed", case_name, format = "text", matrix;

    auto add_stage_options = [&](CLI::App* cmd) {
        cmd->add_option("--n", n, "Compute H^*(K(Z,n); Z)")->required();
        cmd->add_option("--max-degree", max_degree, "Degree cap N")->required();
        auto* f = cmd->add_option("--fiber", fiber_path, "TowerFileV1 with H^*(K(Z,n-1))");
        cmd->add_option("--fiber-variant", variant, "computed | paper-section4 | paper-corollary | paper-section5")
            ->excludes(f);
    };

    auto* compute = app.add_subcommand("compute", "Solve one tower stage and write TowerFileV1");
    add_stage_options(compute);
    compute->add_option("--out", out_path, "Output path (stdout when omitted)");

    auto* page = app.add_subcommand("page", "Print one page of the final solver pass");
    add_stage_options(page);
    page->add_option("--page", page_r, "Page index r >= 2")->required();

    auto* replicate = app.add_subcommand("replicate", "Audit the printed K(Z,4) or K(Z,5) tables");
    replicate->add_option("--case", case_name, "kz4 | kz5")->required()->check(CLI::IsMember({"kz4", "kz5"}));
    replicate->add_option("--format", format, "text | json")->check(CLI::IsMember({"text", "json"}));

    auto* snf = app.add_subcommand("snf", "Smith normal form of an integer matrix");
    snf->add_option("--matrix", matrix, "Path to a matrix file, or inline text like '2 4; 6 8'")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*compute) {
            StageInput in = stage_input(opt, n, max_degree, fiber_path, variant);
            std::optional<TowerResult> tower;
            CacheKey key{n, max_degree, in.variant};
            if (!in.variant.empty()) tower = cache_lookup(opt, key);
            if (!tower) {
                tower = solve_stage(opt, n, max_degree, in.fiber).result;
                if (!in.variant.empty()) cache_store(opt, key, *tower);
            }
            std::string text = tower_to_json(*tower);
            if (out_path.empty()) fmt::print("{}", text);
            else write_file_atomic(out_path, text);
            return exit_code_for(tower->worst_status());
        }
        if (*page) {
            if (page_r < 2) throw EngineError(ErrorCode::InvalidArgument, "pages start at r = 2");
            StageInput in = stage_input(opt, n, max_degree, fiber_path, variant);
            TowerSolution sol = solve_stage(opt, n, max_degree, in.fiber);
            std::size_t idx = std::min<std::size_t>(std::size_t(page_r - 2), sol.pages.size() - 1);
            if (idx + 2 != std::size_t(page_r))
                note(opt, fmt::format("[page] E_{} is stable; showing E_{}", page_r, sol.pages[idx].r()));
            fmt::print("{}", render_page_ascii(sol.pages[idx]));
            return 0;
        }
        if (*replicate) {
            ReplicationReport report = run_replication(*parse_replication_case(case_name));
            fmt::print("{}", format == "json" ? render_replication_json(report) : render_replication_text(report));
            return 0;
        }
        if (*snf) {
            std::string text = matrix;
            std::error_code ec;
            if (fs::is_regular_file(matrix, ec)) text = read_text_file(matrix);
            SnfResult r = smith_normal_form(parse_matrix(text));
            fmt::print("U = {}\nD = {}\nV = {}\n", r.u.to_string(), r.d.to_string(), r.v.to_string());
            return 0;
        }
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
    return 1;
}
