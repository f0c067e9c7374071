#include "doctest.h"

#include <cstdint>
#include <stdexcept>

#include "corank/arith.hpp"

namespace arith = corank::arith;
namespace f2 = corank::f2;

namespace {

// Euler criterion: a^((p-1)/2) mod p for odd prime p and a not divisible by p
int euler_symbol(int64_t a, int64_t p) {
    a = ((a % p) + p) % p;
    if (a == 0) return 0;
    int64_t e = (p - 1) / 2;
    __int128 acc = 1, base = a;
    while (e) {
        if (e & 1) acc = (acc * base) % p;
        base = (base * base) % p;
        e >>= 1;
    }
    return acc == 1 ? 1 : -1;
}

std::vector<int64_t> odd_primes_below(int64_t n) {
    std::vector<int64_t> ps;
    for (int64_t p = 3; p < n; p += 2) {
        bool prime = true;
        for (int64_t q = 3; q * q <= p && prime; q += 2)
            if (p % q == 0) prime = false;
        if (prime) ps.push_back(p);
    }
    return ps;
}

}  // namespace

TEST_CASE("kronecker symbol basics") {
    CHECK(arith::kronecker(3, 7) == -1);  // squares mod 7 are 1, 2, 4
    CHECK(arith::kronecker(2, 7) == 1);
    CHECK(arith::kronecker(0, 9) == 0);
    CHECK(arith::kronecker(5, 1) == 1);
    CHECK(arith::kronecker(-1, 1) == 1);
    // periodicity in the top argument for odd n
    for (int64_t a = -20; a <= 20; ++a)
        CHECK(arith::kronecker(a, 15) == arith::kronecker(((a % 15) + 15) % 15, 15));
    CHECK_THROWS_AS(arith::kronecker(0, 0), std::invalid_argument);
}

TEST_CASE("kronecker equals the Euler criterion on odd primes below 2000") {
    for (int64_t p : odd_primes_below(2000)) {
        for (int64_t a = 1; a < p; ++a) {
            if (arith::kronecker(a, p) != euler_symbol(a, p)) {
                REQUIRE(arith::kronecker(a, p) == euler_symbol(a, p));
            }
        }
    }
    // supplementary law: (-1 | p) = -1 iff p = 3 mod 4
    for (int64_t p : odd_primes_below(10000))
        REQUIRE(arith::kronecker(-1, p) == (p % 4 == 3 ? -1 : 1));
}

TEST_CASE("squarefree and factoring") {
    CHECK(arith::is_squarefree(21));
    CHECK(arith::is_squarefree(-30));
    CHECK_FALSE(arith::is_squarefree(12));
    CHECK_FALSE(arith::is_squarefree(0));
    CHECK(arith::prime_factors(84) == std::vector<int64_t>{2, 3, 7});
    CHECK(arith::prime_factors(-21) == std::vector<int64_t>{3, 7});
}

TEST_CASE("the matrix of d = 21") {
    auto [m, ctx] = arith::redei_matrix(21);
    CHECK(ctx.discriminant == 21);
    CHECK(ctx.t == 2);
    REQUIRE(ctx.primes == std::vector<int64_t>{3, 7});
    // recompute both symbols through the Euler oracle: (-7 | 3) and (-3 | 7)
    CHECK(euler_symbol(-7, 3) == -1);
    CHECK(euler_symbol(-3, 7) == 1);
    CHECK(m == f2::F2Matrix::from_rows({"11", "00"}));
    CHECK(f2::corank(m) == 1);
}

TEST_CASE("prime discriminants give the 1x1 zero matrix") {
    for (int64_t d : {5, 13, -3, -7, 17}) {
        auto [m, ctx] = arith::redei_matrix(d);
        REQUIRE(ctx.t == 1);
        CHECK(m.get(1, 1) == 0);
        CHECK(f2::corank(m) == 1);
    }
}

TEST_CASE("row sums vanish and corank is at least one") {
    for (int64_t mag = 2; mag <= 500; ++mag) {
        for (int sign = 0; sign < 2; ++sign) {
            int64_t d = sign ? -mag : mag;
            if (!arith::is_squarefree(d)) continue;
            auto [m, ctx] = arith::redei_matrix(d);
            for (uint32_t i = 1; i <= ctx.t; ++i) REQUIRE(m.row(i).parity() == 0);
            REQUIRE(f2::corank(m) >= 1);
        }
    }
}

TEST_CASE("reciprocity pattern on the named cases") {
    CHECK(arith::validate_reciprocity(21));  // 3 and 7 are both 3 mod 4
    CHECK(arith::validate_reciprocity(65));  // 5 and 13 are both 1 mod 4
    auto [m65, ctx65] = arith::redei_matrix(65);
    CHECK((m65.get(1, 2) ^ m65.get(2, 1)) == 0);
}

TEST_CASE("column sums characterize the sign and residue pattern") {
    // column sums all vanish iff no odd prime is 3 mod 4 (kappa_all = 0) or
    // their number is odd; for odd fundamental discriminants that number is
    // even exactly when d > 0, odd when d < 0
    auto col_sums_zero = [](const f2::F2Matrix& m) {
        for (uint32_t j = 1; j <= m.n(); ++j)
            if (m.column(j).parity()) return false;
        return true;
    };
    for (int64_t mag = 2; mag <= 10000; ++mag) {
        for (int sign = 0; sign < 2; ++sign) {
            int64_t d = sign ? -mag : mag;
            if (!arith::is_squarefree(d)) continue;
            if (((d % 4) + 4) % 4 != 1) continue;  // odd fundamental discriminant
            auto [m, ctx] = arith::redei_matrix(d);
            uint32_t kappa_all = 0;
            for (int64_t p : ctx.primes)
                if (p != 2 && p % 4 == 3) ++kappa_all;
            bool expect = kappa_all == 0 || kappa_all % 2 == 1;
            REQUIRE(col_sums_zero(m) == expect);
            if (d < 0) REQUIRE(col_sums_zero(m));  // negative case always vanishes
        }
    }
}

TEST_CASE("pell classification") {
    arith::PellClassification pc = arith::classify_pell(21, 7);
    CHECK(pc.label == "pell1");
    CHECK(pc.s == 1);
    CHECK(pc.kappa == 1);
    CHECK(pc.constraints_ok);
    // row order [7, 3]: the first row is (chi at Frob 7) = ((-3 | 7)) = +1 -> 0
    CHECK(pc.first_row_flag);

    // t = 1 degenerate case runs without crashing
    arith::PellClassification deg = arith::classify_pell(-7, -7);
    CHECK(deg.label == "pell2");
    CHECK(deg.s == 0);

    // negative l with odd discriminant (d = 1 mod 4) stays in the second family
    CHECK(arith::classify_pell(-35, -7).label == "pell2");

    // negative l with d = 3 mod 4 lands in the third family with the stated
    // (a, b) bits
    arith::PellClassification p3 = arith::classify_pell(-21, -7);
    CHECK(p3.label == "pell3");
    CHECK(p3.a == ((((-7 - 1) / 4) % 2 + 2) % 2));
    CHECK(p3.b == ((((-21 + 1) / 4) % 2 + 2) % 2));

    CHECK_THROWS_AS(arith::classify_pell(21, 5), std::invalid_argument);   // |l| = 1 mod 4
    CHECK_THROWS_AS(arith::classify_pell(22, 7), std::invalid_argument);   // l does not divide d
    CHECK_THROWS_AS(arith::classify_pell(12, 3), std::invalid_argument);   // d not squarefree
}

TEST_CASE("pell1 constraints hold for positive l with odd discriminant") {
    // spot checks: d = l * q with l = 3 mod 4 and odd discriminant
    for (int64_t d : {21, 3 * 11, 7 * 11, 3 * 5, 7 * 5, 3 * 7 * 5}) {
        if (((d % 4) + 4) % 4 != 1) continue;
        arith::PellClassification pc = arith::classify_pell(d, d % 3 == 0 ? 3 : 7);
        CHECK(pc.label == "pell1");
        CHECK(pc.constraints_ok);
    }
}

TEST_CASE("scan emits the stated columns") {
    auto rows = arith::scan(30, 3);
    REQUIRE(!rows.empty());
    bool saw21 = false;
    for (const auto& row : rows) {
        REQUIRE(arith::is_squarefree(row.d));
        REQUIRE(row.reciprocity_ok);
        if (row.d == 21) {
            saw21 = true;
            CHECK(row.t == 2);
            CHECK(row.corank == 1);
            CHECK(row.pell_label == "pell1");
        }
        if (row.d == 22) CHECK(row.pell_label.empty());
    }
    CHECK(saw21);
}

TEST_CASE("reciprocity passes in bulk") {
    for (int64_t mag = 2; mag <= 1500; ++mag)
        for (int sign = 0; sign < 2; ++sign) {
            int64_t d = sign ? -mag : mag;
            if (!arith::is_squarefree(d)) continue;
            REQUIRE(arith::validate_reciprocity(d));
        }
}
