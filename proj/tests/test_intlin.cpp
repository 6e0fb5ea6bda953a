#include <doctest.h>

#include "emtower/errors.hpp"
#include "emtower/intlin.hpp"
#include "support.hpp"

using namespace emtower;

namespace {

void check_snf(const IntMatrix& m) {
    SnfResult s = smith_normal_form(m);
    CHECK(s.u * m * s.v == s.d);
    CHECK(support::unimodular(s.u));
    CHECK(support::unimodular(s.v));
    CHECK(s.u * s.u_inv == IntMatrix::identity(m.rows()));
    CHECK(s.v * s.v_inv == IntMatrix::identity(m.cols()));
    for (std::size_t i = 0; i < s.d.rows(); ++i)
        for (std::size_t j = 0; j < s.d.cols(); ++j)
            if (i != j) CHECK(s.d(i, j) == 0);
    auto diag = s.diagonal();
    for (std::size_t i = 0; i < diag.size(); ++i) {
        CHECK(diag[i] >= 0);
        if (i + 1 < diag.size()) {
            if (diag[i] == 0) CHECK(diag[i + 1] == 0);
            else CHECK(diag[i + 1] % diag[i] == 0);
        }
    }
}

} // namespace

TEST_CASE("smith form of small fixed matrices") {
    SUBCASE("identity") {
        SnfResult s = smith_normal_form(IntMatrix::identity(2));
        CHECK(s.d == IntMatrix::identity(2));
        CHECK(s.u == IntMatrix::identity(2));
        CHECK(s.v == IntMatrix::identity(2));
    }
    SUBCASE("2 4; 6 8") {
        IntMatrix m = IntMatrix::from_rows({{2, 4}, {6, 8}});
        SnfResult s = smith_normal_form(m);
        CHECK(s.d == IntMatrix::from_rows({{2, 0}, {0, 4}}));
        CHECK(abs(oracle::laplace_det(m)) == 8);
        check_snf(m);
    }
    SUBCASE("zero 2x3") {
        IntMatrix z(2, 3);
        CHECK(smith_normal_form(z).d == z);
        check_snf(z);
    }
    SUBCASE("empty shapes") {
        check_snf(IntMatrix(0, 3));
        check_snf(IntMatrix(3, 0));
        check_snf(IntMatrix(0, 0));
    }
}

TEST_CASE("cokernel kernel and image rank examples") {
    CHECK(cokernel(IntMatrix::from_rows({{2, 0}, {0, 3}})) == FgAbGroup::cyclic(6));
    CHECK(cokernel(IntMatrix::identity(3)).is_trivial());
    CHECK(cokernel(IntMatrix(1, 0)) == FgAbGroup::free(1));

    auto [k1, basis] = kernel(IntMatrix::from_rows({{1, 1}}));
    CHECK(k1 == FgAbGroup::free(1));
    REQUIRE(basis.rows() == 2);
    REQUIRE(basis.cols() == 1);
    CHECK(basis(0, 0) == -basis(1, 0));
    CHECK(abs(basis(0, 0)) == 1);
    CHECK(kernel(IntMatrix::identity(3)).first.is_trivial());
    CHECK(kernel(IntMatrix(1, 2)).first == FgAbGroup::free(2));

    CHECK(image_rank(IntMatrix::identity(3)) == 3);
    CHECK(image_rank(IntMatrix::from_rows({{2, 4}, {6, 8}})) == 2);
    CHECK(image_rank(IntMatrix(3, 2)) == 0);
}

TEST_CASE("lattice quotient of nested spans") {
    // 2Z + 6Z inside Z: span(2) / span(6) = Z_3
    CHECK(lattice_quotient(IntMatrix::from_rows({{2}}), IntMatrix::from_rows({{6}})) == FgAbGroup::cyclic(3));
    // Z^2 / (2Z x 0) = Z_2 + Z
    IntMatrix sup = IntMatrix::identity(2);
    IntMatrix sub = IntMatrix::from_rows({{2}, {0}});
    CHECK(lattice_quotient(sup, sub) == parse_group("Z + Z_2"));
    CHECK_THROWS_AS(lattice_quotient(IntMatrix::from_rows({{2}}), IntMatrix::from_rows({{3}})), EngineError);
}

TEST_CASE("matrix text grammar") {
    CHECK(parse_matrix("1 0; 0 1") == IntMatrix::identity(2));
    CHECK(parse_matrix("  -3  +4 ;5 6 ") == IntMatrix::from_rows({{-3, 4}, {5, 6}}));
    CHECK(parse_matrix("0") == IntMatrix(1, 1));
    CHECK(parse_matrix("123456789012345678901234567890")(0, 0) == Integer("123456789012345678901234567890"));
    CHECK(IntMatrix::from_rows({{2, 4}, {6, 8}}).to_string() == "2 4; 6 8");

    auto offset_of = [](const char* text) -> std::string {
        try {
            parse_matrix(text);
        } catch (const EngineError& e) {
            CHECK(e.code() == ErrorCode::Parse);
            return e.what();
        }
        return "";
    };
    CHECK(offset_of("1 2; 3").find("offset 4") != std::string::npos);
    CHECK(offset_of("1 x").find("offset 2") != std::string::npos);
    CHECK(offset_of("1 2;; 3 4").find("offset 4") != std::string::npos);
    CHECK(offset_of("1 -").find("offset 2") != std::string::npos);
    CHECK(offset_of("").find("offset 0") != std::string::npos);
}

TEST_CASE("random matrices satisfy the smith invariants") {
    std::mt19937_64 rng(20261016);
    for (int trial = 0; trial < 300; ++trial) {
        IntMatrix m = support::random_matrix(rng, 5, 20);
        CAPTURE(m.to_string());
        check_snf(m);

        // diagonal prefix products are the determinantal divisors
        auto diag = smith_normal_form(m).diagonal();
        auto dd = oracle::determinantal_divisors(m);
        Integer prod = 1;
        for (std::size_t k = 0; k < dd.size(); ++k) {
            prod *= diag[k];
            CHECK(prod == dd[k]);
        }

        auto [ker, basis] = kernel(m);
        CHECK(ker.free_rank() + image_rank(m) == m.cols());
        if (basis.cols() > 0) CHECK((m * basis).is_zero());

        if (m.rows() == m.cols()) CHECK(determinant(m) == oracle::laplace_det(m));
    }
}

TEST_CASE("cokernel agrees with residue enumeration") {
    std::mt19937_64 rng(77);
    int compared = 0;
    for (int trial = 0; trial < 400; ++trial) {
        IntMatrix m = support::random_matrix(rng, 3, 6);
        FgAbGroup c = cokernel(m);
        auto res = oracle::residue_group(m, 1000);
        if (!res) {
            if (c.is_finite()) CHECK(c.order() > 1000);
            continue;
        }
        ++compared;
        CHECK(c.is_finite());
        CHECK(c.order() == res->order);
        auto counts = oracle::residue_torsion_counts(*res, 12);
        for (long long k = 1; k <= 12; ++k) CHECK(counts[k] == oracle::torsion_count(c, k));
    }
    CHECK(compared > 50);
}

TEST_CASE("cokernel is unchanged by unimodular changes of basis") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        IntMatrix m = support::random_matrix(rng, 4, 9);
        // random unimodular matrices from elementary operations
        auto unimod = [&](std::size_t n) {
            IntMatrix u = IntMatrix::identity(n);
            std::uniform_int_distribution<std::size_t> idx(0, n ? n - 1 : 0);
            std::uniform_int_distribution<int> k(-3, 3);
            for (int s = 0; n > 1 && s < 6; ++s) {
                std::size_t a = idx(rng), b = idx(rng);
                if (a != b) u.add_row_multiple(a, b, k(rng));
            }
            return u;
        };
        IntMatrix p = unimod(m.rows()), q = unimod(m.cols());
        CHECK(cokernel(p * m * q) == cokernel(m));
    }
}
