#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "mubforge/detail/util.hpp"
#include "mubforge/errorbasis.hpp"

using namespace mubforge;

namespace {

ComplexMatrix matrix_power(const ComplexMatrix& m, int k) {
    ComplexMatrix acc = ComplexMatrix::identity(m.dim());
    for (int i = 0; i < k; ++i) acc = acc * m;
    return acc;
}

PhasePoint pt(int p, std::vector<int> x, std::vector<int> z) {
    return make_phase_point(p, std::move(x), std::move(z));
}

PhasePoint add_points(const PhasePoint& u, const PhasePoint& v) {
    std::vector<int> x(u.x), z(u.z);
    for (int i = 0; i < u.e; ++i) {
        x[i] = (x[i] + v.x[i]) % u.p;
        z[i] = (z[i] + v.z[i]) % u.p;
    }
    return pt(u.p, std::move(x), std::move(z));
}

}  // namespace

TEST_CASE("generalized Pauli operators at p = 2") {
    ComplexMatrix x = pauli_x(2);
    ComplexMatrix z = pauli_z(2);
    CHECK(std::abs(x.at(0, 1) - Complex(1, 0)) < 1e-15);
    CHECK(std::abs(x.at(1, 0) - Complex(1, 0)) < 1e-15);
    CHECK(std::abs(x.at(0, 0)) < 1e-15);
    CHECK(std::abs(z.at(0, 0) - Complex(1, 0)) < 1e-15);
    CHECK(std::abs(z.at(1, 1) - Complex(-1, 0)) < 1e-15);
    CHECK(std::abs(z.at(0, 1)) < 1e-15);
}

TEST_CASE("X and Z have order p") {
    for (int p : {2, 3, 5, 7}) {
        CHECK(matrix_power(pauli_x(p), p).max_abs_diff(ComplexMatrix::identity(p)) < 1e-12);
        CHECK(matrix_power(pauli_z(p), p).max_abs_diff(ComplexMatrix::identity(p)) < 1e-12);
    }
    CHECK_THROWS_AS(pauli_x(4), std::invalid_argument);
    CHECK_THROWS_AS(pauli_z(6), std::invalid_argument);
}

TEST_CASE("Weyl commutation XZ = w ZX at p = 3") {
    ComplexMatrix x = pauli_x(3);
    ComplexMatrix z = pauli_z(3);
    Complex w = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
    CHECK((x * z).max_abs_diff((z * x).scaled(w)) < 1e-12);
}

TEST_CASE("rho tensor construction") {
    SECTION("rho(0, 0) is the identity") {
        CHECK(rho(pt(2, {0, 0}, {0, 0})).max_abs_diff(ComplexMatrix::identity(4)) < 1e-15);
        CHECK(rho(pt(3, {0}, {0})).max_abs_diff(ComplexMatrix::identity(3)) < 1e-15);
    }
    SECTION("p=2, e=1: rho(1,1) = XZ") {
        ComplexMatrix m = rho(pt(2, {1}, {1}));
        CHECK(std::abs(m.at(0, 1) - Complex(-1, 0)) < 1e-15);
        CHECK(std::abs(m.at(1, 0) - Complex(1, 0)) < 1e-15);
        CHECK(std::abs(m.at(0, 0)) < 1e-15);
        CHECK(std::abs(m.at(1, 1)) < 1e-15);
    }
    SECTION("p=2, e=2: rho((1,0),(0,1)) = X tensor Z with entries in {0, +-1}") {
        ComplexMatrix m = rho(pt(2, {1, 0}, {0, 1}));
        ComplexMatrix expected = pauli_x(2).tensor(pauli_z(2));
        CHECK(m.max_abs_diff(expected) < 1e-15);
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                double re = m.at(i, j).real();
                CHECK(std::abs(m.at(i, j).imag()) < 1e-15);
                CHECK((std::abs(re) < 1e-15 || std::abs(std::abs(re) - 1.0) < 1e-15));
            }
        }
    }
}

TEST_CASE("symplectic form f") {
    SECTION("alternating") {
        for (const PhasePoint& u : enumerate_phase_points(3, 1)) CHECK(symplectic_f(u, u) == 0);
    }
    CHECK(symplectic_f(pt(2, {1}, {0}), pt(2, {0}, {1})) == 1);
    SECTION("antisymmetry f(u,v) = -f(v,u) mod p") {
        for (auto [p, e] : {std::pair{3, 1}, {2, 2}}) {
            auto pts = enumerate_phase_points(p, e);
            for (const auto& u : pts) {
                for (const auto& v : pts) {
                    CHECK((symplectic_f(u, v) + symplectic_f(v, u)) % p == 0);
                }
            }
        }
    }
    SECTION("bilinearity on random triples at p=3, e=2") {
        detail::Rng rng(7);
        auto random_point = [&] {
            std::vector<int> x(2), z(2);
            for (int i = 0; i < 2; ++i) {
                x[i] = static_cast<int>(rng.next() % 3);
                z[i] = static_cast<int>(rng.next() % 3);
            }
            return pt(3, std::move(x), std::move(z));
        };
        for (int trial = 0; trial < 200; ++trial) {
            PhasePoint u = random_point(), w = random_point(), v = random_point();
            int lhs = symplectic_f(add_points(u, w), v);
            int rhs = (symplectic_f(u, v) + symplectic_f(w, v)) % 3;
            REQUIRE(lhs == rhs);
        }
    }
    SECTION("shape mismatch is rejected") {
        CHECK_THROWS_AS(symplectic_f(pt(2, {1}, {0}), pt(3, {1}, {0})), std::invalid_argument);
        CHECK_THROWS_AS(symplectic_f(pt(2, {1}, {0}), pt(2, {1, 0}, {0, 0})),
                        std::invalid_argument);
    }
}

TEST_CASE("build_basis small instances") {
    SECTION("(2,1): the four matrices I, Z, X, XZ in lexicographic point order") {
        NiceErrorBasis neb = build_basis(2, 1);
        REQUIRE(neb.size() == 4);
        CHECK(neb.element(0).max_abs_diff(ComplexMatrix::identity(2)) < 1e-15);
        CHECK(neb.element(1).max_abs_diff(pauli_z(2)) < 1e-15);
        CHECK(neb.element(2).max_abs_diff(pauli_x(2)) < 1e-15);
        CHECK(neb.element(3).max_abs_diff(pauli_x(2) * pauli_z(2)) < 1e-15);
    }
    SECTION("(3,1): nine pairwise trace-orthogonal unitaries") {
        NiceErrorBasis neb = build_basis(3, 1);
        REQUIRE(neb.size() == 9);
        for (std::size_t i = 0; i < 9; ++i) {
            for (std::size_t j = 0; j < 9; ++j) {
                Complex t = trace_inner(neb.element(i), neb.element(j));
                if (i == j) {
                    CHECK(std::abs(t - Complex(3, 0)) < 1e-12);
                } else {
                    CHECK(std::abs(t) < 1e-12);
                }
            }
        }
    }
    SECTION("(2,2): sixteen 4x4 matrices") {
        NiceErrorBasis neb = build_basis(2, 2);
        CHECK(neb.size() == 16);
        CHECK(neb.dim() == 4);
    }
    CHECK_THROWS_AS(build_basis(4, 1), std::invalid_argument);
    CHECK_THROWS_AS(build_basis(2, 7), std::invalid_argument);  // 128 > 64
}

TEST_CASE("trace orthogonality of the full basis, d <= 9") {
    for (auto [p, e] : {std::pair{2, 2}, {3, 2}, {2, 3}}) {
        NiceErrorBasis neb = build_basis(p, e);
        const double d = neb.dim();
        for (std::size_t i = 0; i < neb.size(); ++i) {
            for (std::size_t j = i; j < neb.size(); ++j) {
                Complex t = trace_inner(neb.element(i), neb.element(j));
                double target = (i == j) ? d : 0.0;
                REQUIRE(std::abs(t - Complex(target, 0)) < 1e-10);
            }
        }
    }
}

TEST_CASE("commutes matches matrix-level commutation") {
    CHECK(commutes(pt(2, {1}, {1}), pt(2, {0}, {0})));
    SECTION("X and Z do not commute") {
        PhasePoint u = pt(2, {1}, {0}), v = pt(2, {0}, {1});
        CHECK_FALSE(commutes(u, v));
        CHECK(commutator_max_norm(rho(u), rho(v)) > 0.5);
    }
    SECTION("exhaustive agreement with the matrix oracle, d in {2, 3, 4}") {
        for (auto [p, e] : {std::pair{2, 1}, {3, 1}, {2, 2}}) {
            NiceErrorBasis neb = build_basis(p, e);
            const auto& pts = neb.points();
            for (std::size_t i = 0; i < pts.size(); ++i) {
                for (std::size_t j = 0; j < pts.size(); ++j) {
                    double comm = commutator_max_norm(neb.element(i), neb.element(j));
                    REQUIRE(commutes(pts[i], pts[j]) == (comm <= 1e-10));
                }
            }
        }
    }
}

TEST_CASE("rho is a projective representation: rho(u)rho(v) = phase * rho(u+v)") {
    for (auto [p, e] : {std::pair{2, 1}, {3, 1}, {2, 2}, {5, 1}, {7, 1}, {2, 3}, {3, 2}}) {
        auto pts = enumerate_phase_points(p, e);
        for (const auto& u : pts) {
            for (const auto& v : pts) {
                ComplexMatrix lhs = rho(u) * rho(v);
                ComplexMatrix target = rho(add_points(u, v));
                // find a reference entry of the target and read off the phase
                Complex phase = 0;
                for (int i = 0; i < target.dim() && phase == Complex{}; ++i) {
                    for (int j = 0; j < target.dim(); ++j) {
                        if (std::abs(target.at(i, j)) > 0.5) {
                            phase = lhs.at(i, j) / target.at(i, j);
                            break;
                        }
                    }
                }
                REQUIRE(std::abs(std::abs(phase) - 1.0) < 1e-12);
                REQUIRE(lhs.max_abs_diff(target.scaled(phase)) < 1e-10);
            }
        }
    }
}

TEST_CASE("phase point validation") {
    CHECK_THROWS_AS(make_phase_point(2, {2}, {0}), std::invalid_argument);
    CHECK_THROWS_AS(make_phase_point(2, {1, 0}, {0}), std::invalid_argument);
    CHECK_THROWS_AS(make_phase_point(2, {}, {}), std::invalid_argument);
}
