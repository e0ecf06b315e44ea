#pragma once

#include <cmath>
#include <cstdio>
#include <cstdint>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mubforge/detail/util.hpp"
#include "mubforge/errorbasis.hpp"
#include "mubforge/field.hpp"
#include "mubforge/linalg.hpp"
#include "mubforge/report.hpp"

namespace mubforge {

/// Prime factorization d = prod p_i^{e_i}, primes ascending.
inline std::vector<std::pair<int, int>> factorize(std::int64_t d) {
    if (d < 2) throw std::invalid_argument("dimension must be >= 2");
    std::vector<std::pair<int, int>> factors;
    for (std::int64_t p = 2; p * p <= d; ++p) {
        if (d % p == 0) {
            int e = 0;
            while (d % p == 0) {
                d /= p;
                ++e;
            }
            factors.emplace_back(static_cast<int>(p), e);
        }
    }
    if (d > 1) factors.emplace_back(static_cast<int>(d), 1);
    return factors;
}

/// N(d) = min over primes p | d of (largest p-power dividing d) + 1.
inline int n_of_d(std::int64_t d) {
    std::int64_t best = -1;
    for (auto [p, e] : factorize(d)) {
        std::int64_t pp = 1;
        for (int i = 0; i < e; ++i) pp *= p;
        if (best < 0 || pp < best) best = pp;
    }
    return static_cast<int>(best + 1);
}

/// The d+1 lines of the symplectic F_d-plane pulled back to phase points:
/// slopes in field element order, then the vertical line at infinity.
/// Every nonzero phase point lies on exactly one line; all lines share the
/// origin.
struct LinePartition {
    FiniteField field;
    std::vector<std::vector<PhasePoint>> lines;  // lines[d] is the slope-infinity line

    std::string slope_label(std::size_t i) const {
        if (i + 1 == lines.size()) return "inf";
        return field.element_at(static_cast<std::int64_t>(i)).to_string();
    }
};

inline LinePartition line_partition(const FiniteField& field) {
    const std::int64_t d = field.order();
    LinePartition part{field, {}};
    part.lines.reserve(d + 1);
    for (std::int64_t s = 0; s < d; ++s) {
        FieldElement slope = field.element_at(s);
        std::vector<PhasePoint> line;
        line.reserve(d);
        for (std::int64_t a = 0; a < d; ++a) {
            FieldElement alpha = field.element_at(a);
            auto [x, z] = field.phi_inverse(alpha, slope * alpha);
            line.push_back(make_phase_point(field.p(), std::move(x), std::move(z)));
        }
        part.lines.push_back(std::move(line));
    }
    std::vector<PhasePoint> infinity;
    infinity.reserve(d);
    for (std::int64_t b = 0; b < d; ++b) {
        auto [x, z] = field.phi_inverse(field.zero(), field.element_at(b));
        infinity.push_back(make_phase_point(field.p(), std::move(x), std::move(z)));
    }
    part.lines.push_back(std::move(infinity));

    // partition invariant: d+1 lines of d points, pairwise meeting in the
    // origin only, covering every point
    std::vector<int> seen(static_cast<std::size_t>(d) * d, 0);
    for (const auto& line : part.lines) {
        if (static_cast<std::int64_t>(line.size()) != d) {
            throw std::runtime_error("line partition bug: line of wrong size");
        }
        bool has_origin = false;
        for (const PhasePoint& pt : line) {
            std::int64_t idx = 0;
            for (int i = 0; i < pt.e; ++i) idx = idx * pt.p + pt.x[i];
            for (int i = 0; i < pt.e; ++i) idx = idx * pt.p + pt.z[i];
            if (pt.is_zero()) {
                has_origin = true;
            } else {
                seen[idx] += 1;
            }
        }
        if (!has_origin) throw std::runtime_error("line partition bug: line misses the origin");
    }
    for (std::size_t i = 1; i < seen.size(); ++i) {
        if (seen[i] != 1) {
            throw std::runtime_error("line partition bug: point covered " +
                                     std::to_string(seen[i]) + " times");
        }
    }
    return part;
}

/// A collection of orthonormal bases of C^d built to be mutually unbiased.
struct MubCollection {
    int dim = 0;
    std::uint64_t seed = 0;
    std::string provenance;  // construction descriptor
    std::vector<Basis> bases;
};

/// Deviation summary for a MUB collection. Orthonormality compares every
/// in-basis Gram entry against delta_ij; unbiasedness compares every
/// cross-basis |overlap|^2 against 1/d.
struct MubVerification {
    int dim = 0;
    double orthonormality_tol = 1e-10;
    double unbiasedness_tol = 1e-8;
    std::vector<double> per_basis_orthonormality;
    double max_orthonormality = 0.0;
    double max_unbiasedness = 0.0;
    int worst_pair_first = -1;
    int worst_pair_second = -1;

    bool orthonormal_ok() const { return max_orthonormality <= orthonormality_tol; }
    bool unbiased_ok() const { return max_unbiasedness <= unbiasedness_tol; }
    bool passed() const { return orthonormal_ok() && unbiased_ok(); }

    Report to_report() const {
        Report r("mub-verification");
        r.fact("dim", dim);
        r.fact("bases", per_basis_orthonormality.size());
        r.fact("orthonormality_tol", orthonormality_tol);
        r.fact("unbiasedness_tol", unbiasedness_tol);
        {
            std::ostringstream os;
            os.precision(3);
            os << std::scientific << max_orthonormality;
            r.fact("max_orthonormality_deviation", os.str());
        }
        {
            std::ostringstream os;
            os.precision(3);
            os << std::scientific << max_unbiasedness;
            r.fact("max_unbiasedness_deviation", os.str());
        }
        if (worst_pair_first >= 0) {
            r.fact("worst_basis_pair", std::to_string(worst_pair_first) + "," +
                                           std::to_string(worst_pair_second));
        }
        r.check("all bases orthonormal within tolerance", orthonormal_ok());
        r.check("all cross-basis overlaps |<phi|psi>|^2 = 1/d within tolerance", unbiased_ok());
        return r;
    }
};

inline MubVerification verify_mubs(const MubCollection& mc, double orthonormality_tol = 1e-10,
                                   double unbiasedness_tol = 1e-8) {
    MubVerification v;
    v.dim = mc.dim;
    v.orthonormality_tol = orthonormality_tol;
    v.unbiasedness_tol = unbiasedness_tol;
    for (const Basis& b : mc.bases) {
        double dev = b.max_orthonormality_deviation();
        v.per_basis_orthonormality.push_back(dev);
        if (dev > v.max_orthonormality) v.max_orthonormality = dev;
    }
    const double target = 1.0 / mc.dim;
    for (std::size_t k = 0; k < mc.bases.size(); ++k) {
        for (std::size_t l = k + 1; l < mc.bases.size(); ++l) {
            double local = 0.0;
            for (const ComplexVector& u : mc.bases[k].vectors) {
                for (const ComplexVector& w : mc.bases[l].vectors) {
                    double overlap = std::norm(inner(u, w));
                    local = std::max(local, std::abs(overlap - target));
                }
            }
            if (local > v.max_unbiasedness) {
                v.max_unbiasedness = local;
                v.worst_pair_first = static_cast<int>(k);
                v.worst_pair_second = static_cast<int>(l);
            }
        }
    }
    return v;
}

namespace detail {

inline Basis class_eigenbasis(const std::vector<ComplexMatrix>& cls, std::uint64_t seed,
                              std::uint64_t salt) {
    return simultaneous_eigenbasis(cls, mix_seed(seed, salt));
}

inline void enforce_collection_invariants(const MubCollection& mc, std::size_t expected_bases) {
    if (mc.bases.size() != expected_bases) {
        throw std::runtime_error("construction bug: expected " + std::to_string(expected_bases) +
                                 " bases, built " + std::to_string(mc.bases.size()));
    }
    MubVerification v = verify_mubs(mc);
    if (!v.passed()) {
        std::ostringstream os;
        os << "construction bug: collection fails verification (orthonormality "
           << v.max_orthonormality << ", unbiasedness " << v.max_unbiasedness << ")";
        throw std::runtime_error(os.str());
    }
}

}  // namespace detail

/// d+1 mutually unbiased bases of C^d, d = p^e: one common eigenbasis per
/// commuting class of the error basis, classes indexed by line slope.
inline MubCollection build_mubs_prime_power(int p, int e, std::uint64_t seed) {
    NiceErrorBasis neb = build_basis(p, e);
    FiniteField field = make_field(p, e);
    LinePartition part = line_partition(field);
    const int d = neb.dim();

    MubCollection mc;
    mc.dim = d;
    mc.seed = seed;
    mc.provenance = "prime-power " + std::to_string(p) + "^" + std::to_string(e);
    mc.bases.resize(part.lines.size());
    detail::parallel_for(part.lines.size(), [&](std::size_t b, std::size_t en) {
        for (std::size_t k = b; k < en; ++k) {
            std::vector<ComplexMatrix> cls;
            cls.reserve(part.lines[k].size());
            for (const PhasePoint& pt : part.lines[k]) cls.push_back(neb.element(pt));
            mc.bases[k] = detail::class_eigenbasis(cls, seed, k);
        }
    });
    detail::enforce_collection_invariants(mc, static_cast<std::size_t>(d) + 1);
    return mc;
}

/// N(d) mutually unbiased bases for arbitrary d >= 2: tensor products of
/// the first N(d) commuting classes of each prime-power factor, matched by
/// class index.
inline MubCollection build_mubs_composite(std::int64_t d, std::uint64_t seed) {
    auto factors = factorize(d);
    if (factors.size() == 1) {
        auto [p, e] = factors.front();
        return build_mubs_prime_power(p, e, seed);
    }
    const int n = n_of_d(d);

    struct Factor {
        NiceErrorBasis neb;
        LinePartition part;
    };
    std::vector<Factor> parts;
    std::ostringstream prov;
    prov << "composite " << d << " =";
    for (auto [p, e] : factors) {
        std::int64_t pp = 1;
        for (int i = 0; i < e; ++i) pp *= p;
        if (pp > 64) {
            throw std::invalid_argument("prime-power factor " + std::to_string(pp) +
                                        " exceeds the d <= 64 construction limit");
        }
        parts.push_back(Factor{build_basis(p, e), line_partition(make_field(p, e))});
        prov << " " << p << "^" << e;
    }

    MubCollection mc;
    mc.dim = static_cast<int>(d);
    mc.seed = seed;
    mc.provenance = prov.str();
    mc.bases.resize(n);
    detail::parallel_for(static_cast<std::size_t>(n), [&](std::size_t b, std::size_t en) {
        for (std::size_t k = b; k < en; ++k) {
            // all tensor combinations, one element per factor class, in
            // lexicographic order over per-factor line positions
            std::vector<ComplexMatrix> cls;
            cls.reserve(static_cast<std::size_t>(d));
            std::vector<std::size_t> pos(parts.size(), 0);
            bool more = true;
            while (more) {
                ComplexMatrix m = parts[0].neb.element(parts[0].part.lines[k][pos[0]]);
                for (std::size_t i = 1; i < parts.size(); ++i) {
                    m = m.tensor(parts[i].neb.element(parts[i].part.lines[k][pos[i]]));
                }
                cls.push_back(std::move(m));
                more = false;
                for (std::size_t i = parts.size(); i > 0;) {
                    --i;
                    if (++pos[i] < parts[i].part.lines[k].size()) {
                        more = true;
                        break;
                    }
                    pos[i] = 0;
                }
            }
            mc.bases[k] = detail::class_eigenbasis(cls, seed, k);
        }
    });
    detail::enforce_collection_invariants(mc, static_cast<std::size_t>(n));
    return mc;
}

/// Result of the generic partition pipeline: the bases plus the
/// verification outcome. When the hypotheses hold but unbiasedness fails,
/// the failure is numerical and is reported rather than thrown.
struct PartitionBuildResult {
    MubCollection collection;
    MubVerification verification;
};

/// Realizes the eigenbasis construction for an arbitrary partition of
/// trace-orthogonal commuting unitary classes sharing only the identity.
inline PartitionBuildResult build_mubs_from_partition(
    const std::vector<std::vector<ComplexMatrix>>& classes, std::uint64_t seed) {
    constexpr double kTol = 1e-10;
    if (classes.empty()) throw std::invalid_argument("need at least one class");
    const int d = classes.front().empty() ? 0 : classes.front().front().dim();
    if (d == 0) throw std::invalid_argument("class 0 is empty");

    std::vector<std::size_t> identity_at(classes.size());
    ComplexMatrix eye = ComplexMatrix::identity(d);
    for (std::size_t k = 0; k < classes.size(); ++k) {
        const auto& cls = classes[k];
        if (static_cast<int>(cls.size()) != d) {
            throw std::invalid_argument("class " + std::to_string(k) + " has " +
                                        std::to_string(cls.size()) + " matrices, expected d = " +
                                        std::to_string(d));
        }
        std::size_t id_idx = cls.size();
        for (std::size_t t = 0; t < cls.size(); ++t) {
            if (cls[t].dim() != d) {
                throw std::invalid_argument("class " + std::to_string(k) +
                                            " has mixed dimensions");
            }
            double udev = cls[t].deviation_from_unitary();
            if (udev > kTol) {
                throw std::invalid_argument("class " + std::to_string(k) + ", matrix " +
                                            std::to_string(t) + " is not unitary (deviation " +
                                            std::to_string(udev) + ")");
            }
            if (cls[t].max_abs_diff(eye) <= kTol) id_idx = t;
        }
        if (id_idx == cls.size()) {
            throw std::invalid_argument("class " + std::to_string(k) +
                                        " does not contain the identity");
        }
        identity_at[k] = id_idx;
        for (std::size_t s = 0; s < cls.size(); ++s) {
            for (std::size_t t = s + 1; t < cls.size(); ++t) {
                if (commutator_max_norm(cls[s], cls[t]) > kTol) {
                    throw std::invalid_argument("class " + std::to_string(k) + ": matrices " +
                                                std::to_string(s) + " and " + std::to_string(t) +
                                                " do not commute");
                }
                if (std::abs(trace_inner(cls[s], cls[t])) > kTol) {
                    throw std::invalid_argument("class " + std::to_string(k) + ": matrices " +
                                                std::to_string(s) + " and " + std::to_string(t) +
                                                " are not trace-orthogonal");
                }
            }
        }
    }
    // cross-class orthogonality, the shared identity pair exempt
    for (std::size_t k = 0; k < classes.size(); ++k) {
        for (std::size_t l = k + 1; l < classes.size(); ++l) {
            for (std::size_t s = 0; s < classes[k].size(); ++s) {
                for (std::size_t t = 0; t < classes[l].size(); ++t) {
                    if (s == identity_at[k] && t == identity_at[l]) continue;
                    if (std::abs(trace_inner(classes[k][s], classes[l][t])) > kTol) {
                        throw std::invalid_argument(
                            "classes " + std::to_string(k) + " and " + std::to_string(l) +
                            ": matrices " + std::to_string(s) + " and " + std::to_string(t) +
                            " are not trace-orthogonal");
                    }
                }
            }
        }
    }

    PartitionBuildResult out;
    out.collection.dim = d;
    out.collection.seed = seed;
    out.collection.provenance = "partition " + std::to_string(classes.size()) + " classes";
    out.collection.bases.resize(classes.size());
    for (std::size_t k = 0; k < classes.size(); ++k) {
        out.collection.bases[k] = detail::class_eigenbasis(classes[k], seed, k);
    }
    out.verification = verify_mubs(out.collection);
    return out;
}

// -------------------------------------------------------------------------
// MUB file format: "MUB v1 dim=<d> bases=<n> seed=<s>", then per basis a
// "basis <k>" line followed by d rows of d "re:im" entries with 17
// significant digits. Round-trips bit-exactly.

inline void write_mub_file(std::ostream& os, const MubCollection& mc) {
    os << "MUB v1 dim=" << mc.dim << " bases=" << mc.bases.size() << " seed=" << mc.seed << "\n";
    char buf[64];
    for (std::size_t k = 0; k < mc.bases.size(); ++k) {
        os << "basis " << k << "\n";
        for (const ComplexVector& v : mc.bases[k].vectors) {
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) os << ' ';
                std::snprintf(buf, sizeof buf, "%.17g:%.17g", v[i].real(), v[i].imag());
                os << buf;
            }
            os << "\n";
        }
    }
}

inline std::string mub_to_string(const MubCollection& mc) {
    std::ostringstream os;
    write_mub_file(os, mc);
    return os.str();
}

inline MubCollection read_mub_file(std::istream& is) {
    auto fail = [](int line_no, const std::string& why) {
        throw std::invalid_argument("MUB file parse error at line " + std::to_string(line_no) +
                                    ": " + why);
    };
    int line_no = 0;
    std::string line;
    if (!std::getline(is, line)) fail(1, "missing header");
    ++line_no;
    int dim = 0;
    long long bases = 0;
    unsigned long long seed = 0;
    if (std::sscanf(line.c_str(), "MUB v1 dim=%d bases=%lld seed=%llu", &dim, &bases, &seed) != 3) {
        fail(line_no, "expected 'MUB v1 dim=<d> bases=<n> seed=<s>'");
    }
    if (dim < 1 || bases < 0) fail(line_no, "nonpositive dimension or negative basis count");

    MubCollection mc;
    mc.dim = dim;
    mc.seed = seed;
    mc.provenance = "file";
    for (long long k = 0; k < bases; ++k) {
        if (!std::getline(is, line)) fail(line_no + 1, "missing 'basis' marker");
        ++line_no;
        long long idx = -1;
        if (std::sscanf(line.c_str(), "basis %lld", &idx) != 1 || idx != k) {
            fail(line_no, "expected 'basis " + std::to_string(k) + "'");
        }
        Basis b;
        b.dim = dim;
        for (int r = 0; r < dim; ++r) {
            if (!std::getline(is, line)) fail(line_no + 1, "missing vector row");
            ++line_no;
            ComplexVector v;
            v.reserve(dim);
            const char* cur = line.c_str();
            for (int c = 0; c < dim; ++c) {
                while (*cur == ' ' || *cur == '\t') ++cur;
                char* end = nullptr;
                double re = std::strtod(cur, &end);
                if (end == cur || *end != ':') fail(line_no, "bad entry " + std::to_string(c));
                cur = end + 1;
                double im = std::strtod(cur, &end);
                if (end == cur) fail(line_no, "bad entry " + std::to_string(c));
                cur = end;
                if (!std::isfinite(re) || !std::isfinite(im)) {
                    fail(line_no, "non-finite entry " + std::to_string(c));
                }
                v.emplace_back(re, im);
            }
            while (*cur == ' ' || *cur == '\t' || *cur == '\r') ++cur;
            if (*cur != '\0') fail(line_no, "trailing characters after " + std::to_string(dim) +
                                                " entries");
            b.vectors.push_back(std::move(v));
        }
        mc.bases.push_back(std::move(b));
    }
    while (std::getline(is, line)) {
        ++line_no;
        bool blank = true;
        for (char ch : line) {
            if (ch != ' ' && ch != '\t' && ch != '\r') blank = false;
        }
        if (!blank) fail(line_no, "unexpected content after last basis");
    }
    return mc;
}

}  // namespace mubforge
