#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "mubforge/detail/util.hpp"

namespace mubforge {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Dense d x d complex matrix, row-major.
class ComplexMatrix {
public:
    ComplexMatrix() = default;

    explicit ComplexMatrix(int dim) : dim_(dim), a_(static_cast<std::size_t>(dim) * dim) {
        if (dim < 1) throw std::invalid_argument("matrix dimension must be >= 1");
    }

    static ComplexMatrix identity(int dim) {
        ComplexMatrix m(dim);
        for (int i = 0; i < dim; ++i) m.at(i, i) = 1.0;
        return m;
    }

    int dim() const { return dim_; }

    Complex& at(int i, int j) { return a_[static_cast<std::size_t>(i) * dim_ + j]; }
    const Complex& at(int i, int j) const { return a_[static_cast<std::size_t>(i) * dim_ + j]; }

    ComplexMatrix adjoint() const {
        ComplexMatrix r(dim_);
        for (int i = 0; i < dim_; ++i) {
            for (int j = 0; j < dim_; ++j) r.at(j, i) = std::conj(at(i, j));
        }
        return r;
    }

    ComplexMatrix operator*(const ComplexMatrix& rhs) const {
        require_same_dim(rhs, "multiply");
        ComplexMatrix r(dim_);
        for (int i = 0; i < dim_; ++i) {
            for (int k = 0; k < dim_; ++k) {
                Complex aik = at(i, k);
                if (aik == Complex{}) continue;
                for (int j = 0; j < dim_; ++j) r.at(i, j) += aik * rhs.at(k, j);
            }
        }
        return r;
    }

    ComplexMatrix operator+(const ComplexMatrix& rhs) const {
        require_same_dim(rhs, "add");
        ComplexMatrix r(dim_);
        for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] + rhs.a_[i];
        return r;
    }

    ComplexMatrix operator-(const ComplexMatrix& rhs) const {
        require_same_dim(rhs, "subtract");
        ComplexMatrix r(dim_);
        for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] - rhs.a_[i];
        return r;
    }

    ComplexMatrix scaled(Complex c) const {
        ComplexMatrix r(dim_);
        for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = c * a_[i];
        return r;
    }

    /// Kronecker product.
    ComplexMatrix tensor(const ComplexMatrix& rhs) const {
        ComplexMatrix r(dim_ * rhs.dim_);
        for (int i = 0; i < dim_; ++i) {
            for (int j = 0; j < dim_; ++j) {
                Complex aij = at(i, j);
                if (aij == Complex{}) continue;
                for (int k = 0; k < rhs.dim_; ++k) {
                    for (int l = 0; l < rhs.dim_; ++l) {
                        r.at(i * rhs.dim_ + k, j * rhs.dim_ + l) = aij * rhs.at(k, l);
                    }
                }
            }
        }
        return r;
    }

    double max_abs() const {
        double m = 0.0;
        for (const Complex& v : a_) m = std::max(m, std::abs(v));
        return m;
    }

    double max_abs_diff(const ComplexMatrix& rhs) const {
        require_same_dim(rhs, "compare");
        double m = 0.0;
        for (std::size_t i = 0; i < a_.size(); ++i) m = std::max(m, std::abs(a_[i] - rhs.a_[i]));
        return m;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const Complex& v : a_) s += std::norm(v);
        return std::sqrt(s);
    }

    bool all_finite() const {
        for (const Complex& v : a_) {
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        }
        return true;
    }

    double deviation_from_unitary() const {
        return (adjoint() * *this).max_abs_diff(identity(dim_));
    }

    double deviation_from_hermitian() const {
        double m = 0.0;
        for (int i = 0; i < dim_; ++i) {
            for (int j = 0; j < dim_; ++j) {
                m = std::max(m, std::abs(at(i, j) - std::conj(at(j, i))));
            }
        }
        return m;
    }

    ComplexVector column(int j) const {
        ComplexVector v(dim_);
        for (int i = 0; i < dim_; ++i) v[i] = at(i, j);
        return v;
    }

private:
    void require_same_dim(const ComplexMatrix& rhs, const char* op) const {
        if (dim_ != rhs.dim_) {
            throw std::invalid_argument(std::string("cannot ") + op + " matrices of dimensions " +
                                        std::to_string(dim_) + " and " + std::to_string(rhs.dim_));
        }
    }

    int dim_ = 0;
    std::vector<Complex> a_;
};

/// tr(a^dagger b)
inline Complex trace_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("trace inner product needs equal dimensions, got " +
                                    std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
    }
    Complex s = 0.0;
    for (int i = 0; i < a.dim(); ++i) {
        for (int j = 0; j < a.dim(); ++j) s += std::conj(a.at(i, j)) * b.at(i, j);
    }
    return s;
}

inline Complex inner(const ComplexVector& u, const ComplexVector& v) {
    if (u.size() != v.size()) throw std::invalid_argument("vector length mismatch");
    Complex s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += std::conj(u[i]) * v[i];
    return s;
}

inline double commutator_max_norm(const ComplexMatrix& a, const ComplexMatrix& b) {
    return (a * b).max_abs_diff(b * a);
}

/// Orthonormal basis of C^d. Vector k is column k of the stored matrix.
/// Valid instances have pairwise inner products within 1e-10 of delta_ij
/// and carry the phase convention: the first entry of largest modulus of
/// each vector is real and positive.
struct Basis {
    int dim = 0;
    std::vector<ComplexVector> vectors;

    double max_orthonormality_deviation() const {
        double m = 0.0;
        for (std::size_t i = 0; i < vectors.size(); ++i) {
            for (std::size_t j = i; j < vectors.size(); ++j) {
                Complex ip = inner(vectors[i], vectors[j]);
                double target = (i == j) ? 1.0 : 0.0;
                m = std::max(m, std::abs(ip - target));
            }
        }
        return m;
    }
};

/// Rescales v so its first entry of largest modulus is real and positive.
inline void apply_phase_convention(ComplexVector& v) {
    std::size_t k = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        double m = std::abs(v[i]);
        if (m > best) {
            best = m;
            k = i;
        }
    }
    if (best <= 0.0) return;
    Complex phase = std::conj(v[k]) / best;
    for (Complex& x : v) x *= phase;
    v[k] = Complex(std::abs(v[k]), 0.0);  // kill rounding residue in the pivot entry
}

namespace detail {

// One cyclic Jacobi pass infrastructure for complex Hermitian matrices.
// The rotation zeroing h(p,q) is the real Givens rotation of the 2x2
// [[a, |b|], [|b|, c]] conjugated by the phase of b.
struct JacobiWorkspace {
    ComplexMatrix h;
    ComplexMatrix v;
};

inline void jacobi_rotate(JacobiWorkspace& w, int p, int q) {
    const int n = w.h.dim();
    Complex b = w.h.at(p, q);
    double beta = std::abs(b);
    if (beta == 0.0) return;
    Complex phase = b / beta;  // b = beta * phase
    double a = w.h.at(p, p).real();
    double c = w.h.at(q, q).real();
    double tau = (c - a) / (2.0 * beta);
    // smaller-magnitude root of t^2 - 2*tau*t - 1 = 0 keeps |theta| <= pi/4
    double t = (tau >= 0.0) ? -1.0 / (tau + std::sqrt(1.0 + tau * tau))
                            : 1.0 / (-tau + std::sqrt(1.0 + tau * tau));
    double cs = 1.0 / std::sqrt(1.0 + t * t);
    double sn = t * cs;
    // column rotation: col_p' = cs*col_p + sn*conj(phase)*col_q
    //                  col_q' = -sn*phase*col_p + cs*col_q
    Complex sp = sn * std::conj(phase);
    Complex sq = sn * phase;
    for (int i = 0; i < n; ++i) {
        Complex hip = w.h.at(i, p);
        Complex hiq = w.h.at(i, q);
        w.h.at(i, p) = cs * hip + sp * hiq;
        w.h.at(i, q) = -sq * hip + cs * hiq;
        Complex vip = w.v.at(i, p);
        Complex viq = w.v.at(i, q);
        w.v.at(i, p) = cs * vip + sp * viq;
        w.v.at(i, q) = -sq * vip + cs * viq;
    }
    for (int j = 0; j < n; ++j) {
        Complex hpj = w.h.at(p, j);
        Complex hqj = w.h.at(q, j);
        w.h.at(p, j) = cs * hpj + std::conj(sp) * hqj;
        w.h.at(q, j) = -std::conj(sq) * hpj + cs * hqj;
    }
    w.h.at(p, q) = 0.0;
    w.h.at(q, p) = 0.0;
    w.h.at(p, p) = Complex(w.h.at(p, p).real(), 0.0);
    w.h.at(q, q) = Complex(w.h.at(q, q).real(), 0.0);
}

inline double max_off_diagonal(const ComplexMatrix& h) {
    double m = 0.0;
    for (int i = 0; i < h.dim(); ++i) {
        for (int j = 0; j < h.dim(); ++j) {
            if (i != j) m = std::max(m, std::abs(h.at(i, j)));
        }
    }
    return m;
}

}  // namespace detail

struct EigenDecomposition {
    std::vector<double> eigenvalues;  // ascending
    Basis basis;                      // matching eigenvectors
};

/// Cyclic Jacobi eigensolver for Hermitian matrices. Sweeps until every
/// off-diagonal magnitude is <= 1e-12 * ||h||_F; at most 100 sweeps.
inline EigenDecomposition hermitian_eig(const ComplexMatrix& h) {
    constexpr double kInputTol = 1e-10;
    constexpr int kMaxSweeps = 100;
    double herm_dev = h.deviation_from_hermitian();
    if (herm_dev > kInputTol) {
        throw std::invalid_argument("matrix is not Hermitian: max |h - h^dagger| = " +
                                    std::to_string(herm_dev));
    }
    const int n = h.dim();
    detail::JacobiWorkspace w{h, ComplexMatrix::identity(n)};
    // symmetrize rounding noise below the input tolerance
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            Complex avg = 0.5 * (w.h.at(i, j) + std::conj(w.h.at(j, i)));
            w.h.at(i, j) = avg;
            w.h.at(j, i) = std::conj(avg);
        }
        w.h.at(i, i) = Complex(w.h.at(i, i).real(), 0.0);
    }
    const double threshold = 1e-12 * h.frobenius_norm();
    int sweep = 0;
    while (detail::max_off_diagonal(w.h) > threshold) {
        if (++sweep > kMaxSweeps) {
            throw std::runtime_error("Jacobi eigensolver did not converge in 100 sweeps");
        }
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) detail::jacobi_rotate(w, p, q);
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
        return w.h.at(i, i).real() < w.h.at(j, j).real();
    });

    EigenDecomposition out;
    out.eigenvalues.resize(n);
    out.basis.dim = n;
    out.basis.vectors.resize(n);
    for (int k = 0; k < n; ++k) {
        out.eigenvalues[k] = w.h.at(order[k], order[k]).real();
        ComplexVector v = w.v.column(order[k]);
        apply_phase_convention(v);
        out.basis.vectors[k] = std::move(v);
    }
    return out;
}

/// Common eigenbasis of commuting unitaries: diagonalize a random
/// Hermitian combination H = sum_t (c_t U_t + conj(c_t) U_t^dagger) and
/// retry with fresh coefficients while H has an eigenvalue gap < 1e-6.
inline Basis simultaneous_eigenbasis(const std::vector<ComplexMatrix>& ms, std::uint64_t seed) {
    constexpr double kInputTol = 1e-10;
    constexpr double kGapTol = 1e-6;
    constexpr int kMaxRetries = 32;
    if (ms.empty()) throw std::invalid_argument("need at least one matrix");
    const int n = ms.front().dim();
    for (std::size_t t = 0; t < ms.size(); ++t) {
        if (ms[t].dim() != n) throw std::invalid_argument("matrices must share one dimension");
        double udev = ms[t].deviation_from_unitary();
        if (udev > kInputTol) {
            throw std::invalid_argument("matrix " + std::to_string(t) +
                                        " is not unitary: deviation " + std::to_string(udev));
        }
    }
    for (std::size_t s = 0; s < ms.size(); ++s) {
        for (std::size_t t = s + 1; t < ms.size(); ++t) {
            double c = commutator_max_norm(ms[s], ms[t]);
            if (c > kInputTol) {
                throw std::invalid_argument("matrices " + std::to_string(s) + " and " +
                                            std::to_string(t) + " do not commute: ||[U,V]|| = " +
                                            std::to_string(c));
            }
        }
    }

    std::vector<ComplexMatrix> adjoints;
    adjoints.reserve(ms.size());
    for (const auto& m : ms) adjoints.push_back(m.adjoint());

    detail::Rng rng(seed);
    for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
        ComplexMatrix h(n);
        for (std::size_t t = 0; t < ms.size(); ++t) {
            Complex c(rng.symmetric(), rng.symmetric());
            h = h + ms[t].scaled(c) + adjoints[t].scaled(std::conj(c));
        }
        EigenDecomposition eig = hermitian_eig(h);
        double min_gap = std::numeric_limits<double>::infinity();
        for (int i = 0; i + 1 < n; ++i) {
            min_gap = std::min(min_gap, eig.eigenvalues[i + 1] - eig.eigenvalues[i]);
        }
        if (n > 1 && min_gap < kGapTol) continue;
        return eig.basis;
    }
    throw std::runtime_error(
        "simultaneous diagonalization failed: eigenvalues stayed degenerate after 32 "
        "retries; try a different seed");
}

/// Max off-diagonal magnitude of B^dagger U B; small iff U is diagonal in B.
inline double off_diagonal_in_basis(const ComplexMatrix& u, const Basis& b) {
    double m = 0.0;
    for (int i = 0; i < b.dim; ++i) {
        // w = U b_i
        ComplexVector w(b.dim, Complex{});
        for (int r = 0; r < b.dim; ++r) {
            Complex s = 0.0;
            for (int c = 0; c < b.dim; ++c) s += u.at(r, c) * b.vectors[i][c];
            w[r] = s;
        }
        for (int j = 0; j < b.dim; ++j) {
            if (j == i) continue;
            m = std::max(m, std::abs(inner(b.vectors[j], w)));
        }
    }
    return m;
}

}  // namespace mubforge
