#ifndef CSYMP_CSYMPLECTIC_HPP
#define CSYMP_CSYMPLECTIC_HPP

#include <optional>
#include <stdexcept>
#include <vector>

#include "csymp/altform.hpp"
#include "csymp/matrix.hpp"
#include "csymp/scalar.hpp"

namespace csymp {

/// Pointwise verdict for the two algebraic C-symplectic conditions plus the
/// kernel-rank and conjugate-splitting consequences.
struct PointwiseCheckReport {
    bool power_vanishes = false;              // Omega^{n+1} = 0
    bool volume_nonzero = false;              // Omega^n ^ conj(Omega)^n != 0
    int kernel_rank = 0;
    bool kernel_conjugate_complementary = false;
    bool verdict = false;
    double max_residual = 0.0;
};

struct PointwiseTolerances {
    double power_rel = 1e-12;    // |coeff| / |Omega|^{n+1}
    double volume_rel = 1e-10;   // margin for the top coefficient
    double pivot_rel = 1e-10;    // rank decisions
};

/// Basis of {v : v -| Omega = 0} in the complexified tangent space.
template <class S>
std::vector<TangentVector<S>> kernel(const AltForm<S>& omega, double pivot_rel = 1e-10) {
    if (omega.degree() != 2) throw std::invalid_argument("kernel: expects a 2-form");
    Mat<S> m = omega.coefficient_matrix();
    auto basis = null_space(m, pivot_rel);
    std::vector<TangentVector<S>> out;
    out.reserve(basis.size());
    for (auto& v : basis) out.emplace_back(std::move(v));
    return out;
}

template <class S>
PointwiseCheckReport check_pointwise_csymplectic(const AltForm<S>& omega, int n,
                                                 const PointwiseTolerances& tol = {}) {
    using Traits = ScalarTraits<S>;
    if (omega.dim() % 4 != 0) throw std::invalid_argument("check_pointwise_csymplectic: dim must be divisible by 4");
    if (omega.dim() != 4 * n) throw std::invalid_argument("check_pointwise_csymplectic: dim != 4n");
    if (omega.degree() != 2) throw std::invalid_argument("check_pointwise_csymplectic: expects a 2-form");

    PointwiseCheckReport rep;
    const double scale = omega.norm_inf();

    AltForm<S> power = omega.pow(n + 1);
    if constexpr (Traits::exact) {
        rep.power_vanishes = power.is_zero();
        rep.max_residual = power.is_zero() ? 0.0 : 1.0;
    } else {
        double rel = scale > 0.0 ? power.norm_inf() / std::pow(scale, n + 1) : power.norm_inf();
        rep.power_vanishes = rel <= tol.power_rel;
        rep.max_residual = rel;
    }

    AltForm<S> vol = omega.pow(n).wedge(omega.conjugate().pow(n));
    if constexpr (Traits::exact) {
        rep.volume_nonzero = !vol.is_zero();
    } else {
        double margin = scale > 0.0 ? vol.norm_inf() / std::pow(scale, 2 * n) : 0.0;
        rep.volume_nonzero = margin > tol.volume_rel;
    }

    auto ker = kernel(omega, tol.pivot_rel);
    rep.kernel_rank = static_cast<int>(ker.size());

    // kernel + conjugate must span the whole complexified tangent space.
    const int d = omega.dim();
    Mat<S> stacked(d, 2 * static_cast<int>(ker.size()));
    for (size_t k = 0; k < ker.size(); ++k) {
        auto kb = ker[k].conjugate();
        for (int i = 0; i < d; ++i) {
            stacked.at(i, static_cast<int>(k)) = ker[k][i];
            stacked.at(i, static_cast<int>(ker.size() + k)) = kb[i];
        }
    }
    rep.kernel_conjugate_complementary =
        rep.kernel_rank == 2 * n && rank(stacked, tol.pivot_rel) == d;

    rep.verdict = rep.power_vanishes && rep.volume_nonzero && rep.kernel_rank == 2 * n &&
                  rep.kernel_conjugate_complementary;
    return rep;
}

/// J = omega2^{-1} o omega1 for Omega = omega1 + i omega2, both viewed as
/// maps TX -> T*X by contraction. The -i eigenspace of J is the kernel of
/// Omega and Omega is of type (2,0) for J.
template <class S>
Mat<typename ScalarTraits<S>::Real> recover_complex_structure(const AltForm<S>& omega) {
    using Traits = ScalarTraits<S>;
    using R = typename Traits::Real;
    if (omega.degree() != 2) throw std::invalid_argument("recover_complex_structure: expects a 2-form");
    Mat<R> m1 = omega.real_part_matrix();
    Mat<R> m2 = omega.imag_part_matrix();
    auto inv = inverse(m2);
    if (!inv) throw std::domain_error("recover_complex_structure: Im(Omega) is degenerate; input is not C-symplectic");
    return (*inv) * m1;
}

/// Columns form a basis of the +i eigenspace of J (the (1,0) tangent space).
template <class S>
std::vector<TangentVector<S>> holomorphic_frame(const Mat<typename ScalarTraits<S>::Real>& j,
                                                double pivot_rel = 1e-10) {
    using Traits = ScalarTraits<S>;
    const int d = j.rows();
    Mat<S> a(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) {
            a.at(r, c) = Traits::from_real(j.at(r, c));
            if (r == c) a.at(r, c) = a.at(r, c) - Traits::imaginary_unit();
        }
    auto basis = null_space(a, pivot_rel);
    std::vector<TangentVector<S>> out;
    out.reserve(basis.size());
    for (auto& v : basis) out.emplace_back(std::move(v));
    return out;
}

namespace detail {

/// All size-k subsets of {0..d-1} as bitmasks, increasing numeric order.
inline std::vector<IndexMask> k_subsets(int d, int k) {
    std::vector<IndexMask> out;
    if (k < 0 || k > d) return out;
    if (k == 0) return {IndexMask{0}};
    IndexMask t = (IndexMask{1} << k) - 1;
    IndexMask limit = IndexMask{1} << d;
    while (t < limit) {
        out.push_back(t);
        IndexMask c = t & (~t + 1);
        IndexMask r = t + c;
        if (r >= limit || r == 0) break;
        t = (((r ^ t) >> 2) / c) | r;
    }
    return out;
}

/// Determinant by elimination; for the small minors used in hodge_project.
template <class S>
S det_small(Mat<S> m) {
    using Traits = FieldTraits<S>;
    const int n = m.rows();
    S det = Traits::one();
    for (int c = 0; c < n; ++c) {
        int best = -1;
        if constexpr (FieldTraits<S>::exact) {
            for (int i = c; i < n; ++i)
                if (!FieldTraits<S>::is_zero(m.at(i, c))) { best = i; break; }
        } else {
            double bm = 0.0;
            for (int i = c; i < n; ++i) {
                double v = FieldTraits<S>::magnitude(m.at(i, c));
                if (v > bm) { bm = v; best = i; }
            }
        }
        if (best < 0) return Traits::zero();
        if (best != c) {
            for (int j = 0; j < n; ++j) std::swap(m.at(c, j), m.at(best, j));
            det = Traits::zero() - det;
        }
        det = det * m.at(c, c);
        for (int i = c + 1; i < n; ++i) {
            if (FieldTraits<S>::is_zero(m.at(i, c))) continue;
            S f = m.at(i, c) / m.at(c, c);
            for (int j = c; j < n; ++j) m.at(i, j) = m.at(i, j) - f * m.at(c, j);
        }
    }
    return det;
}

template <class S>
Mat<S> submatrix(const Mat<S>& m, const std::vector<int>& rows, const std::vector<int>& cols) {
    Mat<S> out(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
    for (size_t r = 0; r < rows.size(); ++r)
        for (size_t c = 0; c < cols.size(); ++c) out.at(static_cast<int>(r), static_cast<int>(c)) = m.at(rows[r], cols[c]);
    return out;
}

inline std::vector<int> mask_indices(IndexMask m) {
    std::vector<int> idx;
    while (m) {
        idx.push_back(std::countr_zero(m));
        m &= m - 1;
    }
    return idx;
}

}  // namespace detail

/// (p,q)-component of a k-form with respect to the complex structure J.
/// The form is expanded in a holomorphic frame; terms with p unbarred and q
/// barred factors are kept and mapped back to coordinates. Cost grows as
/// C(dim,k)^2, fine for the low degrees this is used at.
template <class S>
AltForm<S> hodge_project(const AltForm<S>& a, const Mat<typename ScalarTraits<S>::Real>& j,
                         int p, int q) {
    using Traits = ScalarTraits<S>;
    if (p < 0 || q < 0 || p + q != a.degree())
        throw std::invalid_argument("hodge_project: p+q must equal the form degree");
    const int d = a.dim();
    if (j.rows() != d || j.cols() != d)
        throw std::invalid_argument("hodge_project: J dimension mismatch");
    const int k = a.degree();
    if (k == 0) return a;

    auto holo = holomorphic_frame<S>(j);
    const int m = d / 2;
    if (static_cast<int>(holo.size()) != m)
        throw std::domain_error("hodge_project: J has no half-dimensional holomorphic frame");

    // Frame matrix H: first m columns holomorphic, last m their conjugates.
    Mat<S> h(d, d);
    for (int c = 0; c < m; ++c) {
        auto hb = holo[c].conjugate();
        for (int r = 0; r < d; ++r) {
            h.at(r, c) = holo[c][r];
            h.at(r, m + c) = hb[r];
        }
    }
    auto hinv = inverse(h);
    if (!hinv) throw std::domain_error("hodge_project: frame is degenerate");

    const auto coord_subsets = detail::k_subsets(d, k);
    AltForm<S> out(k, d);
    for (IndexMask t : coord_subsets) {  // frame-index subsets, same enumeration
        int unbarred = mask_popcount(t & ((IndexMask{1} << m) - 1));
        if (unbarred != p) continue;
        auto sel = detail::mask_indices(t);
        // coefficient of the frame term: a evaluated on the selected columns of H
        S coeff = Traits::zero();
        for (const auto& [mask, v] : a.terms()) {
            auto rows = detail::mask_indices(mask);
            coeff = coeff + v * detail::det_small(detail::submatrix(h, rows, sel));
        }
        if (Traits::is_zero(coeff)) continue;
        // map back through the dual covectors (rows of H^{-1})
        for (IndexMask smask : coord_subsets) {
            auto cols = detail::mask_indices(smask);
            S dv = detail::det_small(detail::submatrix(*hinv, sel, cols));
            if (!Traits::is_zero(dv)) out.add_term(smask, coeff * dv);
        }
    }
    return out;
}

}  // namespace csymp

#endif  // CSYMP_CSYMPLECTIC_HPP
