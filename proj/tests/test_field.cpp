#include <catch2/catch_amalgamated.hpp>

#include "mubforge/errorbasis.hpp"
#include "mubforge/field.hpp"

using namespace mubforge;

namespace {

// Independent irreducibility oracle for quadratics: no roots in F_p.
bool quadratic_has_root(const std::vector<int>& f, int p) {
    for (int a = 0; a < p; ++a) {
        long long v = 0;
        for (int i = static_cast<int>(f.size()) - 1; i >= 0; --i) v = (v * a + f[i]) % p;
        if (v == 0) return true;
    }
    return false;
}

std::vector<PhasePoint> all_points(int p, int e) { return enumerate_phase_points(p, e); }

}  // namespace

TEST_CASE("make_field picks the lexicographically smallest irreducible modulus") {
    CHECK(make_field(2, 1).modulus() == std::vector<int>{0, 1});  // plain x
    CHECK(make_field(2, 2).modulus() == std::vector<int>{1, 1, 1});

    // oracle: scan all 9 monic quadratics over F_3 in (c1, c0) order
    std::vector<int> expected;
    for (int c1 = 0; c1 < 3 && expected.empty(); ++c1) {
        for (int c0 = 0; c0 < 3; ++c0) {
            std::vector<int> f{c0, c1, 1};
            if (!quadratic_has_root(f, 3)) {
                expected = f;
                break;
            }
        }
    }
    REQUIRE(expected == std::vector<int>{1, 0, 1});  // x^2 + 1
    CHECK(make_field(3, 2).modulus() == expected);
}

TEST_CASE("make_field rejects bad input") {
    CHECK_THROWS_WITH(make_field(9, 1), Catch::Matchers::ContainsSubstring("divisible by 3"));
    CHECK_THROWS_AS(make_field(1, 1), std::invalid_argument);
    CHECK_THROWS_WITH(make_field(2, 40), Catch::Matchers::ContainsSubstring("2^31"));
    CHECK_THROWS_AS(make_field(2, 0), std::invalid_argument);
    CHECK_THROWS_AS(FiniteField(2, 2, {1, 0, 1}), std::invalid_argument);  // (x+1)^2
}

TEST_CASE("field arithmetic") {
    FiniteField f4 = make_field(2, 2);
    FieldElement w = f4.element({0, 1});
    CHECK(w * w == f4.element({1, 1}));  // x^2 mod (x^2+x+1) = x+1

    FiniteField f9 = make_field(3, 2);
    FieldElement x = f9.element({0, 1});
    CHECK(x * x == f9.element({2, 0}));  // x^2 = -1 = 2 mod (x^2+1)

    SECTION("a + (-a) = 0 for every element of GF(8)") {
        FiniteField f8 = make_field(2, 3);
        for (std::int64_t n = 0; n < f8.order(); ++n) {
            FieldElement a = f8.element_at(n);
            CHECK((a + (-a)).is_zero());
        }
    }

    SECTION("a * a^-1 = 1 for every nonzero element of GF(9), GF(8), GF(16)") {
        for (auto [p, e] : {std::pair{3, 2}, {2, 3}, {2, 4}}) {
            FiniteField f = make_field(p, e);
            for (std::int64_t n = 1; n < f.order(); ++n) {
                FieldElement a = f.element_at(n);
                CHECK(a * a.inverse() == f.one());
            }
        }
        CHECK_THROWS_AS(f9.zero().inverse(), std::domain_error);
    }

    SECTION("cross-field operations are rejected") {
        CHECK_THROWS_AS(f4.element({1, 0}) + f9.element({1, 0}), std::invalid_argument);
        // distinct moduli over the same prime are distinct fields
        FiniteField f8a = make_field(2, 3);   // x^3+x+1
        FiniteField f8b(2, 3, {1, 0, 1, 1});  // x^3+x^2+1
        CHECK_THROWS_AS(f8a.element_at(3) * f8b.element_at(3), std::invalid_argument);
    }
}

TEST_CASE("trace map") {
    SECTION("e = 1: trace is the identity") {
        FiniteField f5 = make_field(5, 1);
        for (int n = 0; n < 5; ++n) CHECK(f5.trace(f5.element_at(n)) == n);
    }
    FiniteField f4 = make_field(2, 2);
    FieldElement w = f4.element({0, 1});
    CHECK(f4.trace(f4.one()) == 0);
    CHECK(f4.trace(w) == 1);
    CHECK(f4.trace(w * w) == 1);

    SECTION("F_p-linearity, exhaustive for p^e <= 16") {
        for (auto [p, e] : {std::pair{2, 1}, {3, 1}, {2, 2}, {5, 1}, {7, 1}, {2, 3}, {3, 2},
                            {11, 1}, {13, 1}, {2, 4}}) {
            FiniteField f = make_field(p, e);
            for (std::int64_t i = 0; i < f.order(); ++i) {
                for (std::int64_t j = 0; j < f.order(); ++j) {
                    FieldElement a = f.element_at(i), b = f.element_at(j);
                    for (int c = 0; c < p; ++c) {
                        int lhs = f.trace(f.scalar_mul(c, a) + b);
                        int rhs = (c * f.trace(a) + f.trace(b)) % p;
                        REQUIRE(lhs == rhs);
                    }
                }
            }
        }
    }
}

TEST_CASE("dual basis") {
    SECTION("prime field: dual of {1} is {1}") {
        FiniteField f7 = make_field(7, 1);
        CHECK(f7.dual_element(1) == f7.one());
    }
    SECTION("GF(4): dual of {1, w} is {w^2, 1}") {
        FiniteField f4 = make_field(2, 2);
        FieldElement w = f4.element({0, 1});
        CHECK(f4.dual_element(1) == w * w);
        CHECK(f4.dual_element(2) == f4.one());
    }
    SECTION("defining property T(a_i b_j) = delta_ij") {
        for (auto [p, e] : {std::pair{2, 3}, {3, 2}, {2, 4}, {5, 2}}) {
            FiniteField f = make_field(p, e);
            for (int i = 1; i <= e; ++i) {
                for (int j = 1; j <= e; ++j) {
                    CHECK(f.trace(f.basis_element(i) * f.dual_element(j)) == (i == j ? 1 : 0));
                }
            }
        }
    }
}

TEST_CASE("phi identification") {
    SECTION("e = 1 is the identity map") {
        FiniteField f5 = make_field(5, 1);
        for (int a = 0; a < 5; ++a) {
            for (int b = 0; b < 5; ++b) {
                auto [alpha, beta] = f5.phi({a}, {b});
                CHECK(alpha == f5.element_at(a));
                CHECK(beta == f5.element_at(b));
            }
        }
    }
    FiniteField f4 = make_field(2, 2);
    SECTION("phi(0) = 0") {
        auto [alpha, beta] = f4.phi({0, 0}, {0, 0});
        CHECK(alpha.is_zero());
        CHECK(beta.is_zero());
    }
    SECTION("GF(4): phi((0,1),(1,0)) = (w, w^2)") {
        FieldElement w = f4.element({0, 1});
        auto [alpha, beta] = f4.phi({0, 1}, {1, 0});
        CHECK(alpha == w);
        CHECK(beta == w * w);
    }
    SECTION("bijection: phi_inverse after phi is the identity, p^e <= 16") {
        for (auto [p, e] : {std::pair{2, 2}, {3, 2}, {2, 3}, {2, 4}, {13, 1}}) {
            FiniteField f = make_field(p, e);
            for (const PhasePoint& pt : all_points(p, e)) {
                auto [alpha, beta] = f.phi(pt.x, pt.z);
                auto [x, z] = f.phi_inverse(alpha, beta);
                REQUIRE(x == pt.x);
                REQUIRE(z == pt.z);
            }
        }
    }
    CHECK_THROWS_AS(f4.phi({0}, {0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(f4.phi({0, 0, 0}, {0, 0}), std::invalid_argument);
}

TEST_CASE("symplectic form g") {
    FiniteField f2 = make_field(2, 1);
    auto u = f2.phi({1}, {0});
    auto v = f2.phi({0}, {1});
    CHECK(f2.form_g(u, v) == f2.one());

    SECTION("alternating: g(u, u) = 0") {
        FiniteField f9 = make_field(3, 2);
        for (std::int64_t a = 0; a < f9.order(); ++a) {
            for (std::int64_t b = 0; b < f9.order(); ++b) {
                auto w = std::pair{f9.element_at(a), f9.element_at(b)};
                CHECK(f9.form_g(w, w).is_zero());
            }
        }
    }

    SECTION("compatibility T(g(phi(u), phi(v))) = f(u, v), exhaustive for p^e <= 9") {
        for (auto [p, e] : {std::pair{2, 1}, {3, 1}, {2, 2}, {5, 1}, {7, 1}, {2, 3}, {3, 2}}) {
            FiniteField f = make_field(p, e);
            auto pts = all_points(p, e);
            for (const PhasePoint& up : pts) {
                for (const PhasePoint& vp : pts) {
                    int lhs = f.trace(f.form_g(f.phi(up.x, up.z), f.phi(vp.x, vp.z)));
                    REQUIRE(lhs == symplectic_f(up, vp));
                }
            }
        }
    }
}

TEST_CASE("field printing and parsing round-trips") {
    CHECK(make_field(2, 2).to_string() == "GF(2^2) mod x^2+x+1");
    CHECK(make_field(3, 2).to_string() == "GF(3^2) mod x^2+1");
    CHECK(make_field(2, 1).to_string() == "GF(2^1) mod x");
    CHECK(make_field(2, 3).to_string() == "GF(2^3) mod x^3+x+1");

    for (auto [p, e] : {std::pair{2, 1}, {2, 2}, {3, 2}, {5, 2}, {2, 4}, {7, 1}}) {
        FiniteField f = make_field(p, e);
        FiniteField back = FiniteField::parse(f.to_string());
        CHECK(back == f);
        CHECK(back.to_string() == f.to_string());
    }

    CHECK_THROWS_AS(FiniteField::parse("GF(2^2) mod x^2+1"), std::invalid_argument);
    CHECK_THROWS_AS(FiniteField::parse("GF(4^1) mod x"), std::invalid_argument);
    CHECK_THROWS_AS(FiniteField::parse("nonsense"), std::invalid_argument);
}
