#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mubforge {

namespace detail {

// Polynomials over F_p as coefficient vectors, constant term first.
// The zero polynomial is the empty vector; otherwise the top coefficient
// is nonzero.

inline int mod_p(long long v, int p) {
    long long r = v % p;
    return static_cast<int>(r < 0 ? r + p : r);
}

inline void poly_trim(std::vector<int>& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

inline std::vector<int> poly_add(const std::vector<int>& a, const std::vector<int>& b, int p) {
    std::vector<int> r(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i) {
        long long v = (i < a.size() ? a[i] : 0) + (i < b.size() ? b[i] : 0);
        r[i] = mod_p(v, p);
    }
    poly_trim(r);
    return r;
}

inline std::vector<int> poly_scale(const std::vector<int>& a, int c, int p) {
    std::vector<int> r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = mod_p(static_cast<long long>(a[i]) * c, p);
    poly_trim(r);
    return r;
}

inline std::vector<int> poly_mul(const std::vector<int>& a, const std::vector<int>& b, int p) {
    if (a.empty() || b.empty()) return {};
    std::vector<long long> acc(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            acc[i + j] += static_cast<long long>(a[i]) * b[j];
        }
    }
    std::vector<int> r(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i) r[i] = mod_p(acc[i], p);
    poly_trim(r);
    return r;
}

inline int mod_inverse(int a, int p) {
    // extended Euclid on integers, p prime
    int t = 0, new_t = 1, r = p, new_r = mod_p(a, p);
    while (new_r != 0) {
        int q = r / new_r;
        int tmp = t - q * new_t;
        t = new_t;
        new_t = tmp;
        tmp = r - q * new_r;
        r = new_r;
        new_r = tmp;
    }
    if (r != 1) throw std::domain_error("element has no inverse mod " + std::to_string(p));
    return mod_p(t, p);
}

// a mod m, with m nonzero (not necessarily monic)
inline std::vector<int> poly_rem(std::vector<int> a, const std::vector<int>& m, int p) {
    int lead_inv = mod_inverse(m.back(), p);
    while (a.size() >= m.size() && !a.empty()) {
        int coef = mod_p(static_cast<long long>(a.back()) * lead_inv, p);
        std::size_t shift = a.size() - m.size();
        for (std::size_t i = 0; i < m.size(); ++i) {
            a[shift + i] = mod_p(a[shift + i] - static_cast<long long>(coef) * m[i], p);
        }
        poly_trim(a);
    }
    return a;
}

// Irreducibility by trial division against every monic polynomial of
// degree 1..deg/2.
inline bool poly_irreducible(const std::vector<int>& f, int p) {
    int deg = static_cast<int>(f.size()) - 1;
    if (deg <= 0) return false;
    if (deg == 1) return true;
    for (int div_deg = 1; div_deg <= deg / 2; ++div_deg) {
        // enumerate all p^div_deg monic divisor candidates
        std::vector<int> g(div_deg + 1, 0);
        g[div_deg] = 1;
        std::int64_t count = 1;
        for (int i = 0; i < div_deg; ++i) count *= p;
        for (std::int64_t n = 0; n < count; ++n) {
            std::int64_t v = n;
            for (int i = 0; i < div_deg; ++i) {
                g[i] = static_cast<int>(v % p);
                v /= p;
            }
            if (poly_rem(f, g, p).empty()) return false;
        }
    }
    return true;
}

inline std::string poly_to_string(const std::vector<int>& f) {
    if (f.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int i = static_cast<int>(f.size()) - 1; i >= 0; --i) {
        if (f[i] == 0) continue;
        if (!first) os << "+";
        first = false;
        if (i == 0) {
            os << f[i];
        } else {
            if (f[i] != 1) os << f[i];
            os << "x";
            if (i > 1) os << "^" << i;
        }
    }
    if (first) return "0";
    return os.str();
}

inline std::vector<int> poly_from_string(const std::string& text, int p) {
    std::vector<int> f;
    std::size_t pos = 0;
    auto fail = [&](const std::string& why) {
        throw std::invalid_argument("bad polynomial '" + text + "': " + why);
    };
    if (text.empty()) fail("empty");
    while (pos < text.size()) {
        if (text[pos] == '+') {
            ++pos;
            if (pos >= text.size()) fail("trailing '+'");
        }
        long long coef = 1;
        bool saw_digits = false;
        if (std::isdigit(static_cast<unsigned char>(text[pos]))) {
            coef = 0;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
                coef = coef * 10 + (text[pos] - '0');
                if (coef > (1LL << 40)) fail("coefficient overflow");
                ++pos;
            }
            saw_digits = true;
        }
        int exp = 0;
        if (pos < text.size() && text[pos] == 'x') {
            ++pos;
            exp = 1;
            if (pos < text.size() && text[pos] == '^') {
                ++pos;
                if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos]))) {
                    fail("missing exponent");
                }
                exp = 0;
                while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
                    exp = exp * 10 + (text[pos] - '0');
                    if (exp > 64) fail("exponent too large");
                    ++pos;
                }
            }
        } else if (!saw_digits) {
            fail("expected term");
        }
        if (static_cast<int>(f.size()) <= exp) f.resize(exp + 1, 0);
        f[exp] = mod_p(f[exp] + coef, p);
    }
    poly_trim(f);
    return f;
}

struct FieldData {
    int p = 0;
    int e = 0;
    std::int64_t order = 0;
    std::vector<int> modulus;               // monic, degree e, constant first
    std::vector<std::vector<int>> basis;    // power basis a_i = x^{i-1}
    std::vector<std::vector<int>> dual;     // b_i with T(a_i b_j) = delta_ij
};

}  // namespace detail

class FiniteField;

/// Element of GF(p^e): length-e residue vector (coefficient of x^0 first).
/// Carries a handle to its parent field so cross-field use is detectable.
class FieldElement {
public:
    FieldElement() = default;

    const std::vector<int>& coeffs() const { return coeffs_; }
    int p() const { return data_->p; }
    int degree_bound() const { return data_->e; }

    bool is_zero() const {
        for (int c : coeffs_) {
            if (c != 0) return false;
        }
        return true;
    }

    bool same_field(const FieldElement& other) const {
        return data_ == other.data_ ||
               (data_->p == other.data_->p && data_->modulus == other.data_->modulus);
    }

    FieldElement operator+(const FieldElement& rhs) const {
        require_same(rhs);
        std::vector<int> c(coeffs_.size());
        for (std::size_t i = 0; i < c.size(); ++i) {
            c[i] = detail::mod_p(coeffs_[i] + rhs.coeffs_[i], data_->p);
        }
        return FieldElement(data_, std::move(c));
    }

    FieldElement operator-() const {
        std::vector<int> c(coeffs_.size());
        for (std::size_t i = 0; i < c.size(); ++i) {
            c[i] = detail::mod_p(-coeffs_[i], data_->p);
        }
        return FieldElement(data_, std::move(c));
    }

    FieldElement operator-(const FieldElement& rhs) const { return *this + (-rhs); }

    FieldElement operator*(const FieldElement& rhs) const {
        require_same(rhs);
        std::vector<int> prod = detail::poly_mul(trimmed(), rhs.trimmed(), data_->p);
        return FieldElement(data_, pad(detail::poly_rem(std::move(prod), data_->modulus, data_->p)));
    }

    FieldElement inverse() const {
        if (is_zero()) throw std::domain_error("inverse of zero in " + field_name());
        // extended Euclid on (modulus, this)
        const int p = data_->p;
        std::vector<int> r0 = data_->modulus, r1 = trimmed();
        std::vector<int> t0, t1 = {1};
        while (!r1.empty()) {
            // divide r0 by r1
            std::vector<int> q;
            std::vector<int> rem = r0;
            int lead_inv = detail::mod_inverse(r1.back(), p);
            while (rem.size() >= r1.size() && !rem.empty()) {
                int coef = detail::mod_p(static_cast<long long>(rem.back()) * lead_inv, p);
                std::size_t shift = rem.size() - r1.size();
                if (q.size() < shift + 1) q.resize(shift + 1, 0);
                q[shift] = coef;
                for (std::size_t i = 0; i < r1.size(); ++i) {
                    rem[shift + i] = detail::mod_p(rem[shift + i] - static_cast<long long>(coef) * r1[i], p);
                }
                detail::poly_trim(rem);
            }
            std::vector<int> t2 = detail::poly_add(t0, detail::poly_scale(detail::poly_mul(q, t1, p), p - 1, p), p);
            r0 = r1;
            r1 = rem;
            t0 = t1;
            t1 = t2;
        }
        // r0 = gcd, nonzero constant since modulus is irreducible
        if (r0.size() != 1) throw std::runtime_error("modulus not irreducible: gcd has positive degree");
        int scale = detail::mod_inverse(r0[0], p);
        return FieldElement(data_, pad(detail::poly_scale(t0, scale, p)));
    }

    FieldElement operator/(const FieldElement& rhs) const { return *this * rhs.inverse(); }

    bool operator==(const FieldElement& rhs) const {
        return same_field(rhs) && coeffs_ == rhs.coeffs_;
    }
    bool operator!=(const FieldElement& rhs) const { return !(*this == rhs); }

    /// Frobenius power a^(p^k)
    FieldElement frobenius(int k = 1) const {
        FieldElement r = *this;
        for (int i = 0; i < k; ++i) r = r.pow_int(data_->p);
        return r;
    }

    FieldElement pow_int(std::int64_t n) const {
        FieldElement base = *this;
        FieldElement acc = one_like();
        while (n > 0) {
            if (n & 1) acc = acc * base;
            base = base * base;
            n >>= 1;
        }
        return acc;
    }

    /// Canonical enumeration index: sum of coeffs[i] * p^i.
    std::int64_t index() const {
        std::int64_t v = 0;
        for (int i = static_cast<int>(coeffs_.size()) - 1; i >= 0; --i) {
            v = v * data_->p + coeffs_[i];
        }
        return v;
    }

    std::string to_string() const { return detail::poly_to_string(trimmed()); }

private:
    friend class FiniteField;

    FieldElement(std::shared_ptr<const detail::FieldData> data, std::vector<int> coeffs)
        : data_(std::move(data)), coeffs_(std::move(coeffs)) {}

    std::vector<int> trimmed() const {
        std::vector<int> c = coeffs_;
        detail::poly_trim(c);
        return c;
    }

    std::vector<int> pad(std::vector<int> c) const {
        c.resize(data_->e, 0);
        return c;
    }

    FieldElement one_like() const {
        std::vector<int> c(data_->e, 0);
        c[0] = 1;
        return FieldElement(data_, std::move(c));
    }

    std::string field_name() const {
        return "GF(" + std::to_string(data_->p) + "^" + std::to_string(data_->e) + ")";
    }

    void require_same(const FieldElement& rhs) const {
        if (!data_ || !rhs.data_) throw std::invalid_argument("uninitialized field element");
        if (!same_field(rhs)) {
            throw std::invalid_argument("field elements belong to different fields: " +
                                        field_name() + " vs " + rhs.field_name());
        }
    }

    std::shared_ptr<const detail::FieldData> data_;
    std::vector<int> coeffs_;
};

/// GF(p^e) with a fixed monic irreducible modulus, the power basis
/// {1, x, ..., x^(e-1)} and its trace-dual basis.
class FiniteField {
public:
    /// Canonical field: modulus is the lexicographically smallest monic
    /// irreducible of degree e, comparing tuples (c_{e-1}, ..., c_0).
    FiniteField(int p, int e) : FiniteField(p, e, smallest_irreducible(p, e)) {}

    /// Field with an explicit modulus (monic irreducible of degree e).
    FiniteField(int p, int e, std::vector<int> modulus) {
        check_prime(p);
        if (e < 1) throw std::invalid_argument("extension degree must be >= 1");
        std::int64_t order = checked_order(p, e);
        detail::poly_trim(modulus);
        if (static_cast<int>(modulus.size()) != e + 1 || modulus.back() != 1) {
            throw std::invalid_argument("modulus must be monic of degree " + std::to_string(e));
        }
        for (int c : modulus) {
            if (c < 0 || c >= p) throw std::invalid_argument("modulus coefficient out of [0,p)");
        }
        if (!detail::poly_irreducible(modulus, p)) {
            throw std::invalid_argument("modulus " + detail::poly_to_string(modulus) +
                                        " is reducible over F_" + std::to_string(p));
        }
        auto data = std::make_shared<detail::FieldData>();
        data->p = p;
        data->e = e;
        data->order = order;
        data->modulus = std::move(modulus);
        for (int i = 0; i < e; ++i) {
            std::vector<int> a(e, 0);
            a[i] = 1;
            data->basis.push_back(std::move(a));
        }
        data_ = data;
        compute_dual_basis(*data);
    }

    int p() const { return data_->p; }
    int e() const { return data_->e; }
    std::int64_t order() const { return data_->order; }
    const std::vector<int>& modulus() const { return data_->modulus; }

    FieldElement element(std::vector<int> coeffs) const {
        if (static_cast<int>(coeffs.size()) != data_->e) {
            throw std::invalid_argument("coefficient list must have length " + std::to_string(data_->e));
        }
        for (int& c : coeffs) {
            if (c < 0 || c >= data_->p) throw std::invalid_argument("coefficient out of [0,p)");
        }
        return FieldElement(data_, std::move(coeffs));
    }

    FieldElement zero() const { return FieldElement(data_, std::vector<int>(data_->e, 0)); }

    FieldElement one() const {
        std::vector<int> c(data_->e, 0);
        c[0] = 1;
        return FieldElement(data_, std::move(c));
    }

    /// Element with enumeration index n (base-p digits become coefficients).
    FieldElement element_at(std::int64_t n) const {
        if (n < 0 || n >= data_->order) throw std::invalid_argument("element index out of range");
        std::vector<int> c(data_->e, 0);
        for (int i = 0; i < data_->e; ++i) {
            c[i] = static_cast<int>(n % data_->p);
            n /= data_->p;
        }
        return FieldElement(data_, std::move(c));
    }

    /// i-th element of the power basis {a_1, ..., a_e} (1-based).
    FieldElement basis_element(int i) const {
        return FieldElement(data_, data_->basis.at(i - 1));
    }

    /// i-th element of the dual basis {b_1, ..., b_e} (1-based).
    FieldElement dual_element(int i) const {
        return FieldElement(data_, data_->dual.at(i - 1));
    }

    std::vector<FieldElement> dual_basis() const {
        std::vector<FieldElement> out;
        for (int i = 1; i <= data_->e; ++i) out.push_back(dual_element(i));
        return out;
    }

    /// Trace to the prime field: T(a) = a + a^p + ... + a^(p^(e-1)),
    /// returned as an integer in [0, p).
    int trace(const FieldElement& a) const {
        require_member(a);
        FieldElement acc = a;
        FieldElement power = a;
        for (int i = 1; i < data_->e; ++i) {
            power = power.frobenius();
            acc = acc + power;
        }
        for (std::size_t i = 1; i < acc.coeffs().size(); ++i) {
            if (acc.coeffs()[i] != 0) throw std::runtime_error("trace left the prime subfield");
        }
        return acc.coeffs()[0];
    }

    /// phi: F_p^{2e} -> F_d x F_d, (x, z) -> (sum x_i a_i, sum z_i b_i).
    std::pair<FieldElement, FieldElement> phi(const std::vector<int>& x,
                                              const std::vector<int>& z) const {
        if (static_cast<int>(x.size()) != data_->e || static_cast<int>(z.size()) != data_->e) {
            throw std::invalid_argument("phi expects two residue lists of length " +
                                        std::to_string(data_->e));
        }
        FieldElement alpha = zero();
        FieldElement beta = zero();
        for (int i = 0; i < data_->e; ++i) {
            if (x[i] < 0 || x[i] >= data_->p || z[i] < 0 || z[i] >= data_->p) {
                throw std::invalid_argument("phi residue out of [0,p)");
            }
            alpha = alpha + scalar_mul(x[i], basis_element(i + 1));
            beta = beta + scalar_mul(z[i], dual_element(i + 1));
        }
        return {alpha, beta};
    }

    /// Inverse of phi: x_i = T(alpha b_i), z_i = T(beta a_i).
    std::pair<std::vector<int>, std::vector<int>> phi_inverse(const FieldElement& alpha,
                                                              const FieldElement& beta) const {
        require_member(alpha);
        require_member(beta);
        std::vector<int> x(data_->e), z(data_->e);
        for (int i = 0; i < data_->e; ++i) {
            x[i] = trace(alpha * dual_element(i + 1));
            z[i] = trace(beta * basis_element(i + 1));
        }
        return {x, z};
    }

    /// Symplectic form over F_d: g((a,b),(a',b')) = a b' - a' b.
    FieldElement form_g(const std::pair<FieldElement, FieldElement>& u,
                        const std::pair<FieldElement, FieldElement>& v) const {
        require_member(u.first);
        require_member(v.first);
        return u.first * v.second - v.first * u.second;
    }

    FieldElement scalar_mul(int c, const FieldElement& a) const {
        require_member(a);
        c = detail::mod_p(c, data_->p);
        std::vector<int> out(data_->e, 0);
        for (int i = 0; i < data_->e; ++i) {
            out[i] = detail::mod_p(static_cast<long long>(c) * a.coeffs()[i], data_->p);
        }
        return FieldElement(data_, std::move(out));
    }

    /// "GF(p^e) mod x^2+x+1"
    std::string to_string() const {
        return "GF(" + std::to_string(data_->p) + "^" + std::to_string(data_->e) + ") mod " +
               detail::poly_to_string(data_->modulus);
    }

    static FiniteField parse(const std::string& text) {
        auto fail = [&](const std::string& why) {
            throw std::invalid_argument("cannot parse field '" + text + "': " + why);
        };
        std::size_t open = text.find("GF(");
        if (open != 0) fail("expected leading GF(");
        std::size_t caret = text.find('^', 3);
        std::size_t close = text.find(')', 3);
        if (caret == std::string::npos || close == std::string::npos || caret > close) {
            fail("expected GF(p^e)");
        }
        int p = 0, e = 0;
        try {
            p = std::stoi(text.substr(3, caret - 3));
            e = std::stoi(text.substr(caret + 1, close - caret - 1));
        } catch (const std::exception&) {
            fail("p and e must be integers");
        }
        std::size_t mod_pos = text.find(" mod ", close);
        if (mod_pos == std::string::npos) fail("expected ' mod <polynomial>'");
        std::string poly = text.substr(mod_pos + 5);
        while (!poly.empty() && (poly.back() == ' ' || poly.back() == '\n' || poly.back() == '\r')) {
            poly.pop_back();
        }
        return FiniteField(p, e, detail::poly_from_string(poly, p));
    }

    bool operator==(const FiniteField& rhs) const {
        return data_->p == rhs.data_->p && data_->modulus == rhs.data_->modulus;
    }

    /// Lexicographically smallest monic irreducible of degree e over F_p;
    /// candidates ordered by the tuple (c_{e-1}, ..., c_0).
    static std::vector<int> smallest_irreducible(int p, int e) {
        check_prime(p);
        if (e < 1) throw std::invalid_argument("extension degree must be >= 1");
        std::int64_t count = checked_order(p, e);
        for (std::int64_t n = 0; n < count; ++n) {
            // most significant base-p digit of n is c_{e-1}
            std::vector<int> f(e + 1, 0);
            f[e] = 1;
            std::int64_t v = n;
            for (int i = 0; i < e; ++i) {
                f[i] = static_cast<int>(v % p);
                v /= p;
            }
            if (detail::poly_irreducible(f, p)) return f;
        }
        throw std::runtime_error("no irreducible polynomial found");  // unreachable
    }

private:
    static void check_prime(int p) {
        if (p < 2) throw std::invalid_argument(std::to_string(p) + " is not prime");
        for (int f = 2; static_cast<long long>(f) * f <= p; ++f) {
            if (p % f == 0) {
                throw std::invalid_argument(std::to_string(p) + " is not prime (divisible by " +
                                            std::to_string(f) + ")");
            }
        }
    }

    static std::int64_t checked_order(int p, int e) {
        std::int64_t order = 1;
        for (int i = 0; i < e; ++i) {
            order *= p;
            if (order > (1LL << 31)) {
                throw std::invalid_argument("field order p^e exceeds 2^31");
            }
        }
        return order;
    }

    void require_member(const FieldElement& a) const {
        if (!a.data_) throw std::invalid_argument("uninitialized field element");
        if (a.data_ != data_ && !(a.data_->p == data_->p && a.data_->modulus == data_->modulus)) {
            throw std::invalid_argument("element of " + a.field_name() + " used in " + to_string());
        }
    }

    // Solve T(a_i b_j) = delta_ij: Gram matrix M_ik = T(a_i a_k) over F_p,
    // one linear system per dual vector, Gaussian elimination mod p.
    void compute_dual_basis(detail::FieldData& data) {
        const int e = data_->e;
        const int p = data_->p;
        std::vector<std::vector<int>> gram(e, std::vector<int>(e));
        for (int i = 0; i < e; ++i) {
            for (int k = 0; k < e; ++k) {
                gram[i][k] = trace(basis_element(i + 1) * basis_element(k + 1));
            }
        }
        for (int j = 0; j < e; ++j) {
            // augmented system gram * c = e_j
            std::vector<std::vector<int>> m(e, std::vector<int>(e + 1, 0));
            for (int i = 0; i < e; ++i) {
                for (int k = 0; k < e; ++k) m[i][k] = gram[i][k];
                m[i][e] = (i == j) ? 1 : 0;
            }
            for (int col = 0, row = 0; col < e && row < e; ++col) {
                int pivot = -1;
                for (int r = row; r < e; ++r) {
                    if (m[r][col] != 0) {
                        pivot = r;
                        break;
                    }
                }
                if (pivot < 0) continue;
                std::swap(m[pivot], m[row]);
                int inv = detail::mod_inverse(m[row][col], p);
                for (int c = col; c <= e; ++c) m[row][c] = detail::mod_p(static_cast<long long>(m[row][c]) * inv, p);
                for (int r = 0; r < e; ++r) {
                    if (r == row || m[r][col] == 0) continue;
                    int factor = m[r][col];
                    for (int c = col; c <= e; ++c) {
                        m[r][c] = detail::mod_p(m[r][c] - static_cast<long long>(factor) * m[row][c], p);
                    }
                }
                ++row;
            }
            std::vector<int> coeffs(e, 0);
            for (int row = 0; row < e; ++row) {
                int lead = -1;
                for (int c = 0; c < e; ++c) {
                    if (m[row][c] != 0) {
                        lead = c;
                        break;
                    }
                }
                if (lead < 0) {
                    if (m[row][e] != 0) {
                        throw std::runtime_error("trace form is singular: extension not separable?");
                    }
                    continue;
                }
                coeffs[lead] = m[row][e];
            }
            // b_j = sum_k coeffs[k] a_k; coefficients in the power basis are the coeffs themselves
            data.dual.push_back(coeffs);
        }
        // defining property T(a_i b_j) = delta_ij
        for (int i = 1; i <= e; ++i) {
            for (int j = 1; j <= e; ++j) {
                int t = trace(basis_element(i) * dual_element(j));
                if (t != (i == j ? 1 : 0)) {
                    throw std::runtime_error("dual basis check failed at (" + std::to_string(i) +
                                             "," + std::to_string(j) + ")");
                }
            }
        }
    }

    std::shared_ptr<const detail::FieldData> data_;
};

/// make_field(p, e): canonical GF(p^e), rejecting non-prime p (naming a
/// factor) and orders beyond 2^31.
inline FiniteField make_field(int p, int e) { return FiniteField(p, e); }

}  // namespace mubforge
