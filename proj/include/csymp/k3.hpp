#ifndef CSYMP_K3_HPP
#define CSYMP_K3_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "csymp/check.hpp"
#include "csymp/intlinalg.hpp"
#include "csymp/nfield.hpp"
#include "csymp/scalar.hpp"

namespace csymp {

struct IntegralLattice {
    int rank = 0;
    IMat gram;
};

/// U + U + U + E8(-1) + E8(-1): the even unimodular lattice of signature
/// (3,19). Basis order is fixed: (e1,f1,e2,f2,e3,f3) for the three
/// hyperbolic planes, then the two negated E8 blocks.
inline IntegralLattice k3_gram() {
    IntegralLattice L;
    L.rank = 22;
    L.gram.assign(22, IVec(22, BigInt(0)));
    for (int b = 0; b < 3; ++b) {
        L.gram[2 * b][2 * b + 1] = 1;
        L.gram[2 * b + 1][2 * b] = 1;
    }
    // E8 Cartan matrix (nodes 1..8; edges 1-3, 2-4, 3-4, 4-5, 5-6, 6-7, 7-8),
    // negated to make the block negative definite.
    static const int edges[][2] = {{1, 3}, {2, 4}, {3, 4}, {4, 5}, {5, 6}, {6, 7}, {7, 8}};
    for (int blk = 0; blk < 2; ++blk) {
        int off = 6 + 8 * blk;
        for (int i = 0; i < 8; ++i) L.gram[off + i][off + i] = -2;
        for (const auto& e : edges) {
            L.gram[off + e[0] - 1][off + e[1] - 1] = 1;
            L.gram[off + e[1] - 1][off + e[0] - 1] = 1;
        }
    }
    return L;
}

inline IVec unit_vector(int i, int rank = 22) {
    IVec v(rank, BigInt(0));
    v[i] = 1;
    return v;
}

/// q(u, v) = u^T gram v over the integers.
inline BigInt q_eval(const IntegralLattice& L, const IVec& u, const IVec& v) {
    if (static_cast<int>(u.size()) != L.rank || static_cast<int>(v.size()) != L.rank)
        throw std::invalid_argument("q_eval: vector length must match the lattice rank");
    BigInt acc(0);
    for (int i = 0; i < L.rank; ++i) {
        if (u[i] == 0) continue;
        BigInt row(0);
        for (int j = 0; j < L.rank; ++j)
            if (v[j] != 0) row += L.gram[i][j] * v[j];
        acc += u[i] * row;
    }
    return acc;
}

/// q(u, v) with number-field entries on the left and integers on the right.
inline NFElem q_eval(const IntegralLattice& L, const std::vector<NFElem>& u, const IVec& v) {
    if (static_cast<int>(u.size()) != L.rank || static_cast<int>(v.size()) != L.rank)
        throw std::invalid_argument("q_eval: vector length must match the lattice rank");
    NFElem acc;
    for (int i = 0; i < L.rank; ++i) {
        BigInt row(0);
        for (int j = 0; j < L.rank; ++j)
            if (v[j] != 0) row += L.gram[i][j] * v[j];
        if (row != 0) acc += BigRat(row) * u[i];
    }
    return acc;
}

inline NFElem q_eval(const IntegralLattice& L, const std::vector<NFElem>& u,
                     const std::vector<NFElem>& v) {
    if (static_cast<int>(u.size()) != L.rank || static_cast<int>(v.size()) != L.rank)
        throw std::invalid_argument("q_eval: vector length must match the lattice rank");
    NFElem acc;
    for (int i = 0; i < L.rank; ++i) {
        NFElem row;
        for (int j = 0; j < L.rank; ++j)
            if (L.gram[i][j] != 0) row += BigRat(L.gram[i][j]) * v[j];
        if (!row.is_zero()) acc += u[i] * row;
    }
    return acc;
}

struct SublatticeEmbedding {
    IMat vectors;  // rows: generators inside Z^22
    IntegralLattice induced;
};

inline IntegralLattice induced_gram(const IntegralLattice& L, const IMat& vectors) {
    IntegralLattice out;
    out.rank = imat_rows(vectors);
    out.gram.assign(out.rank, IVec(out.rank, BigInt(0)));
    for (int i = 0; i < out.rank; ++i)
        for (int j = 0; j < out.rank; ++j) out.gram[i][j] = q_eval(L, vectors[i], vectors[j]);
    return out;
}

/// The fixed H(d) copy: v = e1 (the fixed isotropic class ell), w = d f1 + e2.
/// Induced Gram [[0,d],[d,0]]; the embedding is primitive for every d >= 1.
inline SublatticeEmbedding embed_hd(int d) {
    if (d < 1) throw std::invalid_argument("embed_hd: d must be a positive integer");
    IntegralLattice k3 = k3_gram();
    SublatticeEmbedding E;
    E.vectors.push_back(unit_vector(0));
    IVec w = unit_vector(2);
    w[1] = d;
    E.vectors.push_back(std::move(w));
    E.induced = induced_gram(k3, E.vectors);
    return E;
}

/// True iff the quotient by the span is torsion-free: all elementary
/// divisors of the coordinate matrix are 1.
inline bool primitivity_check(const SublatticeEmbedding& E) {
    const int k = imat_rows(E.vectors);
    if (integer_rank(E.vectors) != k)
        throw std::invalid_argument("primitivity_check: generators are linearly dependent");
    auto divs = smith_elementary_divisors(E.vectors);
    for (const auto& d : divs)
        if (d != 1) return false;
    return true;
}

inline BigInt discriminant(const IntegralLattice& L) {
    BigInt d = det_bareiss(L.gram);
    if (d == 0) throw std::domain_error("discriminant: degenerate Gram matrix");
    return d;
}

// ---------------------------------------------------------------------------
// Periods, twistor lines, Neron-Severi
// ---------------------------------------------------------------------------

/// [Omega] = a + i b with exact coordinates in a real number field.
struct PeriodPoint {
    std::vector<NFElem> a, b;
};

struct TwistorLine {
    PeriodPoint period;
    IVec ell;
};

inline PeriodPoint rational_period(const IVec& a, const IVec& b) {
    PeriodPoint p;
    for (const auto& x : a) p.a.emplace_back(BigRat(x));
    for (const auto& x : b) p.b.emplace_back(BigRat(x));
    return p;
}

/// Exact validation of the period-domain and line conditions:
/// q(a)=q(b), q(a,b)=0, q(a)+q(b)>0, q(ell)=0, q(a,ell)=q(b,ell)=0.
inline std::vector<CheckReport> period_validate(const IntegralLattice& L, const TwistorLine& line) {
    std::vector<CheckReport> out;
    const auto& a = line.period.a;
    const auto& b = line.period.b;
    NFElem qa = q_eval(L, a, a), qb = q_eval(L, b, b), qab = q_eval(L, a, b);
    out.push_back(CheckReport::make_bool("q(a) = q(b)", "period quadric", (qa - qb).is_zero()));
    out.push_back(CheckReport::make_bool("q(a,b) = 0", "period quadric", qab.is_zero()));
    out.push_back(CheckReport::make_bool("q(a) + q(b) > 0", "period positivity", (qa + qb).sign() > 0));
    BigInt ql = q_eval(L, line.ell, line.ell);
    out.push_back(CheckReport::make_bool("q(ell) = 0", "isotropic line class", ql == 0));
    out.push_back(CheckReport::make_bool("q(a, ell) = 0", "line orthogonality",
                                         q_eval(L, a, line.ell).is_zero()));
    out.push_back(CheckReport::make_bool("q(b, ell) = 0", "line orthogonality",
                                         q_eval(L, b, line.ell).is_zero()));
    return out;
}

/// t with [Omega] + t ell orthogonal to the embedded H(d):
/// t = -q([Omega], w) / q(ell, w) for the generator w not proportional to
/// ell. Nullopt when q(ell, w) = 0 (no solution on this line). The exact
/// orthogonality postcondition is re-verified before returning.
inline std::optional<std::pair<NFElem, NFElem>> solve_td(const IntegralLattice& L,
                                                         const TwistorLine& line,
                                                         const SublatticeEmbedding& E) {
    // pick the generator with q(ell, gen) != 0
    const IVec* w = nullptr;
    for (const auto& g : E.vectors) {
        if (q_eval(L, line.ell, g) != 0) { w = &g; break; }
    }
    if (!w) return std::nullopt;
    BigInt ql = q_eval(L, line.ell, *w);
    NFElem tr = -(q_eval(L, line.period.a, *w)) / BigRat(ql);
    NFElem ti = -(q_eval(L, line.period.b, *w)) / BigRat(ql);

    // exact postcondition: both generators orthogonal to a + tr*ell, b + ti*ell
    for (const auto& g : E.vectors) {
        NFElem ra = q_eval(L, line.period.a, g) + tr * NFElem(BigRat(q_eval(L, line.ell, g)));
        NFElem rb = q_eval(L, line.period.b, g) + ti * NFElem(BigRat(q_eval(L, line.ell, g)));
        if (!ra.is_zero() || !rb.is_zero())
            throw std::logic_error("solve_td: orthogonality postcondition failed");
    }
    return std::make_pair(tr, ti);
}

struct NeronSeveri {
    IMat basis;              // rows, Hermite normal form
    IntegralLattice lattice; // induced Gram
    IMat constraints;        // integer constraint rows used for membership
};

inline bool ns_contains(const NeronSeveri& ns, const IVec& v) {
    for (const auto& row : ns.constraints) {
        BigInt acc(0);
        for (size_t i = 0; i < row.size(); ++i) acc += row[i] * v[i];
        if (acc != 0) return false;
    }
    return true;
}

/// Integral classes orthogonal to a + t_r ell and b + t_i ell: the exact
/// integer kernel of the stacked per-theta-power constraint rows, saturated
/// by construction and normalized to row Hermite form.
inline NeronSeveri neron_severi(const IntegralLattice& L, const TwistorLine& line,
                                const BigRat& t_re, const BigRat& t_im) {
    const int r = L.rank;
    std::vector<std::vector<BigRat>> rows;
    auto add_rows = [&](const std::vector<NFElem>& vec, const BigRat& t) {
        // u = gram * (vec + t*ell); one rational row per theta power
        int deg = 1;
        for (const auto& x : vec) deg = std::max(deg, static_cast<int>(x.coeffs().size()));
        std::vector<std::vector<BigRat>> comp(deg, std::vector<BigRat>(r, BigRat(0)));
        for (int i = 0; i < r; ++i) {
            const auto& c = vec[i].coeffs();
            for (size_t p = 0; p < c.size(); ++p) comp[p][i] = c[p];
            comp[0][i] += t * BigRat(line.ell[i]);
        }
        for (int p = 0; p < deg; ++p) {
            std::vector<BigRat> row(r, BigRat(0));
            bool nonzero = false;
            for (int j = 0; j < r; ++j) {
                BigRat acc(0);
                for (int i = 0; i < r; ++i)
                    if (L.gram[i][j] != 0 && comp[p][i] != 0) acc += comp[p][i] * BigRat(L.gram[i][j]);
                row[j] = acc;
                nonzero = nonzero || acc != 0;
            }
            if (nonzero) rows.push_back(std::move(row));
        }
    };
    add_rows(line.period.a, t_re);
    add_rows(line.period.b, t_im);

    // scale each row to integers
    IMat irows;
    for (const auto& row : rows) {
        BigInt lcm(1);
        for (const auto& x : row) {
            BigInt den = denominator(x);
            lcm = boost::multiprecision::lcm(lcm, den);
        }
        IVec iv(r);
        for (int j = 0; j < r; ++j) iv[j] = numerator(row[j] * BigRat(lcm));
        irows.push_back(std::move(iv));
    }

    NeronSeveri ns;
    ns.constraints = irows;
    IMat kernel = irows.empty() ? IMat{} : integer_kernel(irows);
    if (irows.empty()) {
        kernel.clear();
        for (int i = 0; i < r; ++i) kernel.push_back(unit_vector(i, r));
    }
    ns.basis = hermite_normal_form(std::move(kernel));
    ns.lattice = induced_gram(L, ns.basis);
    return ns;
}

// ---------------------------------------------------------------------------
// Projectivity search (density of rational classes)
// ---------------------------------------------------------------------------

struct ProjectivityHit {
    IVec x;
    NFElem t_re, t_im;
    long structured_n = 0;  // N when found in the u + N f1 family, else 0
};

/// Finds an integral class x with q(x) > 0, q(ell,x) != 0 and
/// |t| <= epsilon for t = (-q(a,x)/q(ell,x), -q(b,x)/q(ell,x)).
/// First walks the structured family x = u + N f1 over positive-square u,
/// then falls back to small-height enumeration over the hyperbolic blocks.
/// Not-found is an explicit empty value, not an error.
inline std::optional<ProjectivityHit> projectivity_search(const IntegralLattice& L,
                                                          const TwistorLine& line,
                                                          const BigRat& epsilon,
                                                          long height_bound) {
    if (epsilon <= 0) throw std::invalid_argument("projectivity_search: epsilon must be positive");
    BigRat eps2 = epsilon * epsilon;

    auto try_x = [&](const IVec& x) -> std::optional<ProjectivityHit> {
        BigInt qx = q_eval(L, x, x);
        if (qx <= 0) return std::nullopt;
        BigInt qlx = q_eval(L, line.ell, x);
        if (qlx == 0) return std::nullopt;
        NFElem tr = -(q_eval(L, line.period.a, x)) / BigRat(qlx);
        NFElem ti = -(q_eval(L, line.period.b, x)) / BigRat(qlx);
        NFElem mod2 = tr * tr + ti * ti;
        if ((mod2 - NFElem(eps2)).sign() > 0) return std::nullopt;
        ProjectivityHit hit;
        hit.x = x;
        hit.t_re = tr;
        hit.t_im = ti;
        return hit;
    };

    // structured family: u of positive square supported on U2, U3
    const std::vector<IVec> us = [] {
        std::vector<IVec> v;
        IVec u1 = unit_vector(2);  u1[3] = 1;             // e2 + f2, q = 2
        IVec u2 = unit_vector(4);  u2[5] = 1;             // e3 + f3, q = 2
        IVec u3 = u1;  u3[4] = 1;  u3[5] = 1;             // e2+f2+e3+f3, q = 4
        v.push_back(u1); v.push_back(u2); v.push_back(u3);
        return v;
    }();
    for (const auto& u : us) {
        for (long n = 1; n <= height_bound; ++n) {
            IVec x = u;
            x[1] += BigInt(n);  // + N f1
            if (auto hit = try_x(x)) {
                hit->structured_n = n;
                return hit;
            }
        }
    }

    // exhaustive small-height enumeration on the three hyperbolic blocks
    const long b = std::min<long>(2, height_bound);
    IVec x(22, BigInt(0));
    std::vector<long> c(6, -b);
    while (true) {
        for (int i = 0; i < 6; ++i) x[i] = BigInt(c[i]);
        if (auto hit = try_x(x)) return hit;
        int pos = 0;
        while (pos < 6 && ++c[pos] > b) c[pos++] = -b;
        if (pos == 6) break;
    }
    return std::nullopt;
}

}  // namespace csymp

#endif  // CSYMP_K3_HPP
