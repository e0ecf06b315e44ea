#pragma once

#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "mubforge/detail/util.hpp"
#include "mubforge/linalg.hpp"

namespace mubforge {

/// Point (x, z) of F_p^{2e}: exponent labels of one error-basis element.
struct PhasePoint {
    int p = 0;
    int e = 0;
    std::vector<int> x;
    std::vector<int> z;

    bool is_zero() const {
        for (int v : x) {
            if (v != 0) return false;
        }
        for (int v : z) {
            if (v != 0) return false;
        }
        return true;
    }

    bool operator==(const PhasePoint& rhs) const {
        return p == rhs.p && e == rhs.e && x == rhs.x && z == rhs.z;
    }

    bool operator<(const PhasePoint& rhs) const {
        if (x != rhs.x) return x < rhs.x;
        return z < rhs.z;
    }

    std::string to_string() const {
        std::string s = "(";
        for (std::size_t i = 0; i < x.size(); ++i) s += (i ? "," : "") + std::to_string(x[i]);
        s += ";";
        for (std::size_t i = 0; i < z.size(); ++i) s += (i ? "," : "") + std::to_string(z[i]);
        return s + ")";
    }
};

inline PhasePoint make_phase_point(int p, std::vector<int> x, std::vector<int> z) {
    if (x.size() != z.size() || x.empty()) {
        throw std::invalid_argument("phase point needs equal-length nonempty x and z");
    }
    for (int v : x) {
        if (v < 0 || v >= p) throw std::invalid_argument("phase point entry out of [0,p)");
    }
    for (int v : z) {
        if (v < 0 || v >= p) throw std::invalid_argument("phase point entry out of [0,p)");
    }
    return PhasePoint{p, static_cast<int>(x.size()), std::move(x), std::move(z)};
}

namespace detail {

inline void check_prime(int p) {
    if (p < 2) throw std::invalid_argument(std::to_string(p) + " is not prime");
    for (int f = 2; static_cast<long long>(f) * f <= p; ++f) {
        if (p % f == 0) {
            throw std::invalid_argument(std::to_string(p) + " is not prime (divisible by " +
                                        std::to_string(f) + ")");
        }
    }
}

inline void check_same_shape(const PhasePoint& u, const PhasePoint& v) {
    if (u.p != v.p || u.e != v.e) {
        throw std::invalid_argument("phase points have different (p, e): " + u.to_string() +
                                    " vs " + v.to_string());
    }
}

}  // namespace detail

/// Cyclic shift X = sum_k |k><k+1 mod p|.
inline ComplexMatrix pauli_x(int p) {
    detail::check_prime(p);
    ComplexMatrix m(p);
    for (int k = 0; k < p; ++k) m.at(k, (k + 1) % p) = 1.0;
    return m;
}

/// Clock Z = sum_k w^k |k><k| with w = exp(2 pi i / p).
inline ComplexMatrix pauli_z(int p) {
    detail::check_prime(p);
    ComplexMatrix m(p);
    const double step = 2.0 * std::numbers::pi / p;
    for (int k = 0; k < p; ++k) m.at(k, k) = std::polar(1.0, step * k);
    return m;
}

/// rho(x, z) = X^{x_1} Z^{z_1} (x) ... (x) X^{x_e} Z^{z_e}.
inline ComplexMatrix rho(const PhasePoint& pt) {
    ComplexMatrix x = pauli_x(pt.p);
    ComplexMatrix z = pauli_z(pt.p);
    auto power = [&](const ComplexMatrix& base, int k) {
        ComplexMatrix acc = ComplexMatrix::identity(base.dim());
        for (int i = 0; i < k; ++i) acc = acc * base;
        return acc;
    };
    ComplexMatrix out = power(x, pt.x[0]) * power(z, pt.z[0]);
    for (int i = 1; i < pt.e; ++i) {
        out = out.tensor(power(x, pt.x[i]) * power(z, pt.z[i]));
    }
    return out;
}

/// f((x,z),(x',z')) = sum_i x_i z'_i - x'_i z_i  (mod p), in [0, p).
inline int symplectic_f(const PhasePoint& u, const PhasePoint& v) {
    detail::check_same_shape(u, v);
    long long s = 0;
    for (int i = 0; i < u.e; ++i) {
        s += static_cast<long long>(u.x[i]) * v.z[i] - static_cast<long long>(v.x[i]) * u.z[i];
    }
    long long r = s % u.p;
    return static_cast<int>(r < 0 ? r + u.p : r);
}

/// rho(u) and rho(v) commute iff f(u, v) = 0.
inline bool commutes(const PhasePoint& u, const PhasePoint& v) {
    return symplectic_f(u, v) == 0;
}

/// All phase points of F_p^{2e} in lexicographic order on
/// (x_1, ..., x_e, z_1, ..., z_e).
inline std::vector<PhasePoint> enumerate_phase_points(int p, int e) {
    std::vector<PhasePoint> pts;
    std::int64_t d2 = 1;
    for (int i = 0; i < 2 * e; ++i) d2 *= p;
    pts.reserve(d2);
    std::vector<int> digits(2 * e, 0);
    for (std::int64_t n = 0; n < d2; ++n) {
        std::vector<int> x(digits.begin(), digits.begin() + e);
        std::vector<int> z(digits.begin() + e, digits.end());
        pts.push_back(PhasePoint{p, e, std::move(x), std::move(z)});
        for (int i = 2 * e - 1; i >= 0; --i) {
            if (++digits[i] < p) break;
            digits[i] = 0;
        }
    }
    return pts;
}

/// The Weyl-Heisenberg nice error basis of dimension d = p^e: the d^2
/// unitaries rho(x, z), pairwise orthogonal under the trace inner product.
class NiceErrorBasis {
public:
    /// Builds all d^2 elements and validates the defining properties
    /// (unitarity and trace orthogonality within 1e-10).
    static NiceErrorBasis build(int p, int e) {
        detail::check_prime(p);
        if (e < 1) throw std::invalid_argument("extension degree must be >= 1");
        std::int64_t d = 1;
        for (int i = 0; i < e; ++i) {
            d *= p;
            if (d > 64) throw std::invalid_argument("error basis limited to dimension <= 64");
        }
        NiceErrorBasis basis;
        basis.p_ = p;
        basis.e_ = e;
        basis.d_ = static_cast<int>(d);
        basis.points_ = enumerate_phase_points(p, e);
        basis.elements_.resize(basis.points_.size());
        detail::parallel_for(basis.points_.size(), [&](std::size_t b, std::size_t en) {
            for (std::size_t i = b; i < en; ++i) basis.elements_[i] = rho(basis.points_[i]);
        });
        basis.validate();
        return basis;
    }

    int p() const { return p_; }
    int e() const { return e_; }
    int dim() const { return d_; }
    std::size_t size() const { return elements_.size(); }

    const std::vector<PhasePoint>& points() const { return points_; }
    const ComplexMatrix& element(std::size_t i) const { return elements_.at(i); }

    const ComplexMatrix& element(const PhasePoint& pt) const {
        return elements_.at(index_of(pt));
    }

    /// Position of pt in the lexicographic element order.
    std::size_t index_of(const PhasePoint& pt) const {
        if (pt.p != p_ || pt.e != e_) throw std::invalid_argument("phase point from wrong basis");
        std::int64_t n = 0;
        for (int i = 0; i < e_; ++i) n = n * p_ + pt.x[i];
        for (int i = 0; i < e_; ++i) n = n * p_ + pt.z[i];
        return static_cast<std::size_t>(n);
    }

private:
    void validate() const {
        constexpr double kTol = 1e-10;
        if (!points_.front().is_zero() ||
            elements_.front().max_abs_diff(ComplexMatrix::identity(d_)) > kTol) {
            throw std::runtime_error("error basis construction bug: rho(0,0) != identity");
        }
        std::atomic<bool> ok{true};
        detail::parallel_for(elements_.size(), [&](std::size_t b, std::size_t en) {
            for (std::size_t i = b; i < en && ok.load(std::memory_order_relaxed); ++i) {
                if (elements_[i].deviation_from_unitary() > kTol) {
                    ok.store(false, std::memory_order_relaxed);
                }
                for (std::size_t j = i + 1; j < elements_.size(); ++j) {
                    if (std::abs(trace_inner(elements_[i], elements_[j])) > kTol) {
                        ok.store(false, std::memory_order_relaxed);
                    }
                }
                if (std::abs(trace_inner(elements_[i], elements_[i]) - Complex(d_, 0)) > kTol) {
                    ok.store(false, std::memory_order_relaxed);
                }
            }
        });
        if (!ok.load()) {
            throw std::runtime_error("error basis construction bug: invariant check failed");
        }
    }

    int p_ = 0;
    int e_ = 0;
    int d_ = 0;
    std::vector<PhasePoint> points_;
    std::vector<ComplexMatrix> elements_;
};

inline NiceErrorBasis build_basis(int p, int e) { return NiceErrorBasis::build(p, e); }

}  // namespace mubforge
