#include "doctest.h"

#include <set>
#include <stdexcept>

#include "corank/f2.hpp"
#include "corank/rng.hpp"

namespace f2 = corank::f2;
using f2::F2Matrix;
using f2::F2Vector;
using f2::GrowthSimulator;
using f2::TransitionClass;

namespace {

// replay one (v, w, c) code at the given size
struct StepCode {
    uint32_t n;
    uint64_t code;
    F2Vector v() const {
        F2Vector x(n);
        for (uint32_t k = 0; k < n; ++k) x.set(k + 1, (code >> k) & 1);
        return x;
    }
    F2Vector w() const {
        F2Vector x(n);
        for (uint32_t k = 0; k < n; ++k) x.set(k + 1, (code >> (n + k)) & 1);
        return x;
    }
    int c() const { return (code >> (2 * n)) & 1; }
};

F2Matrix matrix_from_code(uint32_t n, uint64_t bits) {
    F2Matrix m(n);
    for (uint32_t i = 1; i <= n; ++i)
        for (uint32_t j = 1; j <= n; ++j)
            if ((bits >> ((i - 1) * n + (j - 1))) & 1) m.set(i, j, 1);
    return m;
}

}  // namespace

TEST_CASE("vector basics") {
    F2Vector h4 = F2Vector::ones(4);
    CHECK(h4.inner(h4) == 0);  // parity of 4
    CHECK(F2Vector::ones(3).inner(F2Vector::ones(3)) == 1);
    CHECK(F2Vector::ones_prefix(5, 2).to_string() == "11000");
    CHECK(F2Vector::unit(4, 3).to_string() == "0010");
    CHECK(F2Vector::from_string("0110").get(2) == 1);
    CHECK(F2Vector::from_string("0110").parity() == 0);
    F2Vector a = F2Vector::from_bits({1, 0, 1});
    a.xor_with(F2Vector::from_bits({1, 1, 1}));
    CHECK(a == F2Vector::from_bits({0, 1, 0}));
}

TEST_CASE("rank and corank on the named cases") {
    CHECK(f2::rank(F2Matrix(3)) == 0);
    CHECK(f2::corank(F2Matrix(3)) == 3);
    CHECK(f2::rank(F2Matrix::identity(4)) == 4);
    CHECK(f2::corank(F2Matrix::identity(4)) == 0);
    F2Matrix ones = F2Matrix::from_rows({"11", "11"});
    CHECK(f2::rank(ones) == 1);
    CHECK(f2::corank(ones) == 1);
    // the empty matrix is legal with rank 0, corank 0
    CHECK(f2::rank(F2Matrix()) == 0);
    CHECK(f2::corank(F2Matrix()) == 0);
}

TEST_CASE("matvec and inner") {
    F2Matrix id = F2Matrix::identity(3);
    F2Vector x = F2Vector::from_bits({1, 0, 1});
    CHECK(f2::matvec(id, x) == x);
    F2Matrix swap = F2Matrix::from_rows({"01", "10"});
    CHECK(f2::matvec(swap, F2Vector::from_bits({1, 0})) == F2Vector::from_bits({0, 1}));
    CHECK_THROWS_AS(f2::matvec(id, F2Vector(2)), std::invalid_argument);
}

TEST_CASE("in_image") {
    F2Matrix zero2(2);
    CHECK(f2::in_image(zero2, F2Vector(2)));  // zero vector always
    CHECK_FALSE(f2::in_image(zero2, F2Vector::from_bits({1, 0})));
    F2Matrix ones = F2Matrix::from_rows({"11", "11"});
    CHECK(f2::in_image(ones, F2Vector::from_bits({1, 1})));
    CHECK_FALSE(f2::in_image(ones, F2Vector::from_bits({1, 0})));
}

TEST_CASE("pairing on the named cases") {
    F2Matrix id = F2Matrix::identity(3);
    F2Vector v = F2Vector::from_bits({1, 0, 1});
    F2Vector w = F2Vector::from_bits({1, 1, 0});
    CHECK(f2::pairing(id, v, w) == v.inner(w));
    F2Matrix ones = F2Matrix::from_rows({"11", "11"});
    CHECK(f2::pairing(ones, F2Vector::from_bits({1, 1}), F2Vector::from_bits({1, 1})) == 1);
    CHECK(f2::pairing(F2Matrix::identity(1), F2Vector::from_bits({1}), F2Vector::from_bits({1})) == 1);
    CHECK_THROWS_AS(f2::pairing(F2Matrix(2), F2Vector::from_bits({1, 0}), F2Vector(2)),
                    std::domain_error);
}

TEST_CASE("pairing is independent of the chosen solution (exhaustive n <= 3)") {
    for (uint32_t n = 1; n <= 3; ++n) {
        for (uint64_t bits = 0; bits < (uint64_t(1) << (n * n)); ++bits) {
            F2Matrix a = matrix_from_code(n, bits);
            if (f2::corank(a) == 0) continue;
            F2Matrix at = a.transposed();
            for (uint64_t vc = 0; vc < (uint64_t(1) << n); ++vc) {
                F2Vector v(n);
                for (uint32_t k = 0; k < n; ++k) v.set(k + 1, (vc >> k) & 1);
                if (!f2::in_image(a, v)) continue;
                for (uint64_t wc = 0; wc < (uint64_t(1) << n); ++wc) {
                    F2Vector w(n);
                    for (uint32_t k = 0; k < n; ++k) w.set(k + 1, (wc >> k) & 1);
                    if (!f2::in_image(at, w)) continue;
                    // all solutions x of Ax = v agree on <x, w>
                    int seen = -1;
                    for (uint64_t xc = 0; xc < (uint64_t(1) << n); ++xc) {
                        F2Vector x(n);
                        for (uint32_t k = 0; k < n; ++k) x.set(k + 1, (xc >> k) & 1);
                        if (f2::matvec(a, x) != v) continue;
                        int p = x.inner(w);
                        if (seen < 0) seen = p;
                        REQUIRE(seen == p);
                    }
                    REQUIRE(seen == f2::pairing(a, v, w));
                }
            }
        }
    }
}

TEST_CASE("extend on the named cases") {
    F2Matrix seed = f2::extend(F2Matrix(), F2Vector(0), F2Vector(0), 1);
    CHECK(seed == F2Matrix::from_rows({"1"}));
    F2Matrix blk = f2::extend(F2Matrix::identity(2), F2Vector(2), F2Vector(2), 0);
    CHECK(blk.n() == 3);
    CHECK(f2::corank(blk) == 1);
    F2Matrix m = f2::extend(F2Matrix::from_rows({"0"}), F2Vector::from_bits({1}),
                            F2Vector::from_bits({1}), 0);
    CHECK(m == F2Matrix::from_rows({"01", "10"}));
    CHECK(f2::corank(m) == 0);
    CHECK_THROWS_AS(f2::extend(F2Matrix(2), F2Vector(1), F2Vector(2), 0), std::invalid_argument);
}

TEST_CASE("classify_transition on the named cases") {
    using TC = TransitionClass;
    CHECK(f2::classify_transition(F2Matrix::from_rows({"0"}), F2Vector::from_bits({1}),
                                  F2Vector::from_bits({1}), 0) == TC::Down);
    CHECK(f2::classify_transition(F2Matrix::from_rows({"1"}), F2Vector::from_bits({1}),
                                  F2Vector::from_bits({1}), 1) == TC::Up);
    CHECK(f2::classify_transition(F2Matrix::from_rows({"1"}), F2Vector::from_bits({1}),
                                  F2Vector::from_bits({1}), 0) == TC::Same);
}

TEST_CASE("classification matches recomputed coranks exhaustively (n <= 3)") {
    for (uint32_t n = 0; n <= 3; ++n) {
        uint64_t mats = uint64_t(1) << (n * n);
        uint64_t exts = uint64_t(1) << (2 * n + 1);
        for (uint64_t bits = 0; bits < mats; ++bits) {
            F2Matrix a = matrix_from_code(n, bits);
            int base = static_cast<int>(f2::corank(a));
            f2::TransitionOracle oracle(a);
            for (uint64_t code = 0; code < exts; ++code) {
                StepCode sc{n, code};
                F2Vector v = sc.v(), w = sc.w();
                int c = sc.c();
                int d = static_cast<int>(f2::corank(f2::extend(a, v, w, c))) - base;
                REQUIRE((d == -1 || d == 0 || d == 1));
                REQUIRE(f2::delta(f2::classify_transition(a, v, w, c)) == d);
                REQUIRE(f2::delta(oracle.classify(v, w, c)) == d);
            }
        }
    }
}

TEST_CASE("rank equals rank of the transpose on random matrices") {
    corank::Rng rng(42);
    for (int trial = 0; trial < 10000; ++trial) {
        uint32_t n = 1 + static_cast<uint32_t>(rng.bits(6));  // up to 64
        F2Matrix a(n);
        for (uint32_t i = 1; i <= n; ++i)
            for (uint32_t k = 0; k < n; k += 64) {
                uint64_t bits = rng.next();
                for (uint32_t j = k; j < std::min(n, k + 64); ++j)
                    a.set(i, j + 1, (bits >> (j - k)) & 1);
            }
        CHECK(f2::rank(a) == f2::rank(a.transposed()));
    }
}

TEST_CASE("kernel intersection agrees with the image-sum reformulation (n <= 3)") {
    CHECK(f2::kernel_intersection_trivial(F2Matrix::identity(3)));
    CHECK_FALSE(f2::kernel_intersection_trivial(F2Matrix(2)));
    // the two kernels of [[0,1],[0,0]] are span{(1,0)} and span{(0,1)}:
    // the intersection is trivial even though the matrix is singular
    CHECK(f2::kernel_intersection_trivial(F2Matrix::from_rows({"01", "00"})));
    CHECK_FALSE(f2::kernel_intersection_trivial(F2Matrix::from_rows({"11", "11"})));
    for (uint32_t n = 0; n <= 3; ++n) {
        for (uint64_t bits = 0; bits < (uint64_t(1) << (n * n)); ++bits) {
            F2Matrix a = matrix_from_code(n, bits);
            bool trivially = f2::kernel_intersection_trivial(a);
            CHECK(trivially == (f2::image_sum_dim(a) == n));
            // brute force: any shared nonzero kernel vector?
            bool shared = false;
            F2Matrix at = a.transposed();
            for (uint64_t xc = 1; xc < (uint64_t(1) << n); ++xc) {
                F2Vector x(n);
                for (uint32_t k = 0; k < n; ++k) x.set(k + 1, (xc >> k) & 1);
                if (f2::matvec(a, x).is_zero() && f2::matvec(at, x).is_zero()) shared = true;
            }
            CHECK(trivially == !shared);
        }
    }
}

TEST_CASE("incremental simulator agrees with fresh elimination on random growth") {
    corank::Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        uint32_t r = 1 + static_cast<uint32_t>(rng.bits(5));  // up to 32
        GrowthSimulator sim(r);
        F2Matrix m;
        for (uint32_t i = 0; i < r; ++i) {
            F2Vector v(i), w(i);
            for (uint32_t k = 1; k <= i; ++k) {
                v.set(k, static_cast<int>(rng.bits(1)));
                w.set(k, static_cast<int>(rng.bits(1)));
            }
            int c = static_cast<int>(rng.bits(1));
            TransitionClass cls = sim.step(v, w, c);
            uint32_t before = f2::corank(m);
            m.extend_inplace(v, w, c);
            REQUIRE(sim.rank() == f2::rank(m));
            REQUIRE(f2::delta(cls) == static_cast<int>(f2::corank(m)) - static_cast<int>(before));
        }
    }
}

TEST_CASE("classification at the empty matrix seeds the rules") {
    GrowthSimulator sim(4);
    CHECK(sim.step(F2Vector(0), F2Vector(0), 1) == TransitionClass::Same);
    CHECK(sim.corank() == 0);
    sim.reset();
    CHECK(sim.step(F2Vector(0), F2Vector(0), 0) == TransitionClass::Up);
    CHECK(sim.corank() == 1);
}

TEST_CASE("transpose and parse round out the matrix surface") {
    F2Matrix a = F2Matrix::parse("010;001;110");
    CHECK(a.get(3, 1) == 1);
    CHECK(a.transposed().get(1, 3) == 1);
    CHECK(a.to_string() == "010;001;110");
    CHECK(F2Matrix::parse("").n() == 0);
    std::set<std::string> cols;
    for (uint32_t j = 1; j <= 3; ++j) cols.insert(a.column(j).to_string());
    CHECK(cols.count("001"));  // first column reads down as (0,0,1)
}
