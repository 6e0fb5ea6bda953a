#include <doctest.h>

#include "emtower/replicate.hpp"

#include <json.hpp>

using namespace emtower;

namespace {

const ReplicationReport& kz4() {
    static const ReplicationReport r = run_replication(ReplicationCase::KZ4);
    return r;
}

const ReplicationReport& kz5() {
    static const ReplicationReport r = run_replication(ReplicationCase::KZ5);
    return r;
}

const ReplicationRow* find_row(const ReplicationRun& run, const std::string& kind, const std::string& item) {
    for (const auto& r : run.rows)
        if (r.kind == kind && r.item == item) return &r;
    return nullptr;
}

} // namespace

TEST_CASE("vocabulary round trips") {
    for (auto v : {FiberVariant::Computed, FiberVariant::PaperSection4, FiberVariant::PaperCorollary,
                   FiberVariant::PaperSection5})
        CHECK(parse_fiber_variant(fiber_variant_name(v)) == v);
    CHECK(parse_replication_case("kz4") == ReplicationCase::KZ4);
    CHECK(parse_replication_case("kz5") == ReplicationCase::KZ5);
    CHECK_FALSE(parse_replication_case("kz6"));
    CHECK(std::string(verdict_name(Verdict::PaperInternallyInconsistent)) == "PAPER-INTERNALLY-INCONSISTENT");
    CHECK(builtin_fiber_space(FiberVariant::PaperSection4) == 3);
    CHECK(builtin_fiber_space(FiberVariant::PaperSection5) == 4);
    CHECK(builtin_fiber_space(FiberVariant::PaperCorollary) == 4);
}

TEST_CASE("exact sequence cokernels") {
    auto g = [](const char* s) { return parse_group(s); };
    // 0 -> Z_2 -> Z -> E -> 0 has no realization
    auto none = exact_sequence_cokernels({g("Z_2"), g("Z")});
    REQUIRE(none);
    CHECK(none->empty());
    // 0 -> Z_2 -> Z_2 -> E -> 0 forces E = 0
    CHECK(exact_sequence_cokernels({g("Z_2"), g("Z_2")}) == std::set<FgAbGroup>{FgAbGroup::trivial()});
    // 0 -> Z_2 -> Z_4 -> E -> 0 forces E = Z_2
    CHECK(exact_sequence_cokernels({g("Z_2"), g("Z_4")}) == std::set<FgAbGroup>{g("Z_2")});
    // 0 -> Z -> Z -> E: any cyclic quotient, not enumerable
    CHECK_FALSE(exact_sequence_cokernels({g("Z"), g("Z")}));
}

TEST_CASE("printed K(Z,4) tables") {
    REQUIRE(kz4().runs.size() >= 1);
    const ReplicationRun& run = kz4().runs.front();
    CHECK(run.variant == FiberVariant::PaperSection4);

    const ReplicationRow* e08 = find_row(run, "e2", "E2(0,8)");
    REQUIRE(e08);
    CHECK(e08->verdict == Verdict::Match);
    CHECK(e08->engine == "Z_3");

    for (const auto& r : run.rows)
        if (r.kind == "e2") CHECK(r.verdict == Verdict::Match);
    for (int d : {5, 6}) {
        const ReplicationRow* row = find_row(run, "degree-claim", "H^" + std::to_string(d));
        REQUIRE(row);
        CHECK(row->verdict == Verdict::Match);
    }

    bool saw_nine = false, saw_injection = false;
    for (const auto& r : run.rows) {
        if (r.item == "H^9" && r.printed == "Z_3") saw_nine = true;
        if (r.kind == "sequence" && r.engine.find("forced injection Z_2 -> Z") != std::string::npos) {
            saw_injection = true;
            CHECK(r.verdict == Verdict::PaperInternallyInconsistent);
        }
    }
    CHECK(saw_nine);
    CHECK(saw_injection);
    CHECK_FALSE(kz4().divergences().empty());
}

TEST_CASE("printed K(Z,5) tables") {
    const ReplicationRun& run = kz5().runs.front();
    CHECK(run.variant == FiberVariant::PaperSection5);

    const ReplicationRow* e50 = find_row(run, "e2", "E2(5,0)");
    REQUIRE(e50);
    CHECK(e50->verdict == Verdict::Match);
    CHECK(e50->engine == "Z");

    const ReplicationRow* e58 = find_row(run, "e2", "E2(5,8)");
    REQUIRE(e58);
    CHECK(e58->verdict == Verdict::PaperInternallyInconsistent);

    for (int p = 1; p <= 4; ++p) {
        const ReplicationRow* col = find_row(run, "column-claim", "column " + std::to_string(p));
        REQUIRE(col);
        CHECK(col->verdict == Verdict::Match);
    }

    const ReplicationRow* ten = find_row(run, "degree-claim", "H^10");
    REQUIRE(ten);
    CHECK(ten->printed == "Z_3 + Z_2");

    // the second printed K(Z,4) column is audited as well
    bool corollary_run = false;
    for (const auto& r : kz5().runs)
        if (r.variant == FiberVariant::PaperCorollary) corollary_run = true;
    CHECK(corollary_run);
}

TEST_CASE("report rendering") {
    for (const ReplicationReport* rep : {&kz4(), &kz5()}) {
        std::string text = render_replication_text(*rep);
        CHECK(text.find("PAPER-INTERNALLY-INCONSISTENT") != std::string::npos);
        CHECK(text.find("MATCH") != std::string::npos);
        CHECK(render_replication_text(*rep) == text);

        std::string js = render_replication_json(*rep);
        auto parsed = nlohmann::json::parse(js);
        CHECK(parsed.is_object());
        CHECK(render_replication_json(*rep) == js);
    }
}
