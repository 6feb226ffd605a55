#ifndef CSYMP_SEMIFLAT_HPP
#define CSYMP_SEMIFLAT_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "csymp/altform.hpp"
#include "csymp/check.hpp"
#include "csymp/csymplectic.hpp"
#include "csymp/expr.hpp"
#include "csymp/formfield.hpp"
#include "csymp/matrix.hpp"
#include "csymp/sampling.hpp"
#include "csymp/scalar.hpp"

namespace csymp {

// ---------------------------------------------------------------------------
// Model description
// ---------------------------------------------------------------------------

enum class EtaKind { Zero, FubiniStudy, Polynomial };

/// One monomial term of a polynomial base 2-form:
/// coeff * z^z_exp * zbar^zbar_exp * (factor two-form).
struct PolyEtaTerm {
    enum class Factor { HoloHolo, HoloAnti, AntiAnti };  // dz^dz, dz^dzbar, dzbar^dzbar
    Factor factor = Factor::HoloAnti;
    int i = 0, j = 0;
    std::vector<int> z_exp, zbar_exp;  // one exponent per complex base coordinate
    GaussianRational coeff{BigRat(1)};
};

struct EtaSpec {
    EtaKind kind = EtaKind::Zero;
    std::vector<PolyEtaTerm> terms;

    static EtaSpec zero() { return {}; }
    static EtaSpec fubini_study() { return {EtaKind::FubiniStudy, {}}; }
    static EtaSpec polynomial(std::vector<PolyEtaTerm> t) {
        return {EtaKind::Polynomial, std::move(t)};
    }
};

namespace detail {

/// z_j (or its conjugate) as an expression in the interleaved real coordinates.
inline Expr complex_coordinate(int j, bool bar) {
    Expr x = Expr::var(2 * j), y = Expr::var(2 * j + 1);
    return bar ? x - Expr::i() * y : x + Expr::i() * y;
}

inline Expr monomial_expr(const std::vector<int>& z_exp, const std::vector<int>& zbar_exp) {
    Expr acc = Expr::constant(1);
    for (size_t j = 0; j < z_exp.size(); ++j)
        if (z_exp[j] > 0) acc = acc * complex_coordinate(static_cast<int>(j), false).pow(z_exp[j]);
    for (size_t j = 0; j < zbar_exp.size(); ++j)
        if (zbar_exp[j] > 0) acc = acc * complex_coordinate(static_cast<int>(j), true).pow(zbar_exp[j]);
    return acc;
}

inline Expr fs_potential(int n) {
    Expr s = Expr::constant(1);
    for (int j = 0; j < n; ++j) {
        Expr x = Expr::var(2 * j), y = Expr::var(2 * j + 1);
        s = s + x * x + y * y;
    }
    return Expr::log(s);
}

}  // namespace detail

/// Builds the base 2-form for a given spec on an n-dimensional base.
inline FormField build_eta(int n, const EtaSpec& spec) {
    const int dim = 2 * n;
    switch (spec.kind) {
        case EtaKind::Zero:
            return FormField(2, dim);
        case EtaKind::FubiniStudy: {
            // i * d(dbar potential); the (0,2)-part cancels identically.
            auto phi = FormField::function(detail::fs_potential(n), dim);
            return phi.dbar().d().scaled(Expr::i());
        }
        case EtaKind::Polynomial: {
            FormField acc(2, dim);
            for (const auto& t : spec.terms) {
                if (t.i < 0 || t.i >= n || t.j < 0 || t.j >= n)
                    throw std::invalid_argument("build_eta: factor index out of range");
                bool bar_i = t.factor == PolyEtaTerm::Factor::AntiAnti;
                bool bar_j = t.factor != PolyEtaTerm::Factor::HoloHolo;
                FormField fac = FormField::wirtinger_covector(t.i, bar_i, dim)
                                    .wedge(FormField::wirtinger_covector(t.j, bar_j, dim));
                Expr c = Expr::constant(t.coeff) * detail::monomial_expr(t.z_exp, t.zbar_exp);
                acc = acc + fac.scaled(c);
            }
            return acc;
        }
    }
    throw std::logic_error("build_eta: unreachable");
}

/// Omega = sum_j dz_j ^ dw_j on the total space (z first, w second).
template <class S>
AltForm<S> standard_omega(int n) {
    AltForm<S> om(2, 4 * n);
    for (int j = 0; j < n; ++j) {
        auto dz = AltForm<S>::wirtinger_covector(j, false, 4 * n);
        auto dw = AltForm<S>::wirtinger_covector(n + j, false, 4 * n);
        om = om + dz.wedge(dw);
    }
    return om;
}

/// Standard base complex structure J_S on R^{2n} (interleaved coordinates).
template <class R>
Mat<R> standard_base_j(int n) {
    Mat<R> j(2 * n, 2 * n);
    for (int k = 0; k < n; ++k) {
        j.at(2 * k, 2 * k + 1) = FieldTraits<R>::zero() - FieldTraits<R>::one();
        j.at(2 * k + 1, 2 * k) = FieldTraits<R>::one();
    }
    return j;
}

/// Holomorphic Lagrangian torus fibration over a polydisc chart with
/// Omega = sum dz_j^dw_j and a closed base 2-form eta of type (2,0)+(1,1).
class SemiFlatModel {
 public:
    SemiFlatModel() = default;

    int n() const { return n_; }
    int base_dim() const { return 2 * n_; }
    int total_dim() const { return 4 * n_; }
    double base_radius() const { return base_radius_; }
    const Mat<ComplexD>& tau() const { return tau_; }
    EtaKind eta_kind() const { return eta_kind_; }
    const FormField& eta() const { return eta_; }
    const FormField& eta_total() const { return eta_total_; }

    template <class S>
    AltForm<S> omega() const {
        return standard_omega<S>(n_);
    }

    bool in_base_domain(double x, double y) const {
        return x * x + y * y < base_radius_ * base_radius_;
    }

    template <class S>
    void require_in_domain(const RealPoint<S>& pt) const {
        using Traits = ScalarTraits<S>;
        if (static_cast<int>(pt.size()) < 2 * n_)
            throw std::invalid_argument("point has too few coordinates");
        for (int j = 0; j < n_; ++j) {
            double x = Traits::real_to_double(pt[2 * j]);
            double y = Traits::real_to_double(pt[2 * j + 1]);
            if (!in_base_domain(x, y))
                throw std::invalid_argument("point lies outside the base polydisc");
        }
    }

    friend SemiFlatModel build_model(int n, double base_radius, Mat<ComplexD> tau,
                                     const EtaSpec& spec);

 private:
    int n_ = 0;
    double base_radius_ = 0.0;
    Mat<ComplexD> tau_;
    EtaKind eta_kind_ = EtaKind::Zero;
    FormField eta_;
    FormField eta_total_;
};

/// Validates the model data and the field-level invariants: Im(tau) positive
/// definite, d(eta) = 0 symbolically, vanishing (0,2)-part of eta at sample
/// points, Omega restricted to fiber tangent spaces zero at sample points.
inline SemiFlatModel build_model(int n, double base_radius, Mat<ComplexD> tau,
                                 const EtaSpec& spec) {
    if (n < 1 || n > 7) throw std::invalid_argument("build_model: n out of supported range");
    if (base_radius <= 0.0) throw std::invalid_argument("build_model: base_radius must be positive");
    if (tau.rows() != n || tau.cols() != n) throw std::invalid_argument("build_model: tau must be n x n");

    // Sylvester criterion on Im(tau).
    for (int k = 1; k <= n; ++k) {
        Mat<double> minor(k, k);
        for (int r = 0; r < k; ++r)
            for (int c = 0; c < k; ++c) minor.at(r, c) = tau.at(r, c).imag();
        if (detail::det_small(minor) <= 0.0)
            throw std::invalid_argument("build_model: Im(tau) is not positive definite");
    }

    SemiFlatModel m;
    m.n_ = n;
    m.base_radius_ = base_radius;
    m.tau_ = std::move(tau);
    m.eta_kind_ = spec.kind;
    m.eta_ = build_eta(n, spec);
    m.eta_total_ = m.eta_.pullback_to(4 * n);

    if (!m.eta_.d().is_zero_symbolic())
        throw std::invalid_argument("build_model: eta is not closed");

    // Pointwise validation at deterministic sample points.
    SampleRng rng(0x5eedbeefULL);
    auto jbase = standard_base_j<double>(n);
    auto om = m.omega<ComplexD>();
    for (int s = 0; s < 20; ++s) {
        auto bp = rng.polydisc_point(n, 0.9 * base_radius);
        auto eta_x = m.eta_.eval<ComplexD>(bp);
        auto anti = hodge_project(eta_x, jbase, 0, 2);
        double scale = std::max(1.0, eta_x.norm_inf());
        if (anti.norm_inf() > 1e-10 * scale)
            throw std::invalid_argument("build_model: eta has a nonzero (0,2)-component");
    }
    // Omega has constant coefficients; its fiber restriction vanishing is a
    // one-shot check.
    for (int a = 2 * n; a < 4 * n; ++a)
        for (int b = a + 1; b < 4 * n; ++b) {
            auto va = TangentVector<ComplexD>::basis(a, 4 * n);
            auto vb = TangentVector<ComplexD>::basis(b, 4 * n);
            if (std::abs(om.evaluate({va, vb})) > 1e-14)
                throw std::logic_error("build_model: Omega does not vanish on fibers");
        }
    return m;
}

// ---------------------------------------------------------------------------
// The family Omega_t = Omega + t pi*eta and its pointwise checks
// ---------------------------------------------------------------------------

template <class S>
AltForm<S> eval_family_form(const SemiFlatModel& m, const S& t, const RealPoint<S>& x) {
    m.require_in_domain<S>(x);
    AltForm<S> om = m.omega<S>();
    AltForm<S> pe = m.eta_total().eval<S>(x);
    return om + t * pe;
}

/// Omega-dual frame at a point: vertical e_j = d/dw_j, horizontal f_j with
/// Omega(e_j, f_k) = delta_jk, plus the coefficients of pi*eta in the frame:
/// pi*eta = sum a_jk f*_j^f*_k + b_jk f*_j^fbar*_k.
template <class S>
struct DarbouxFrame {
    std::vector<TangentVector<S>> e, f;
    Mat<S> a, b;
};

template <class S>
DarbouxFrame<S> darboux_frame(const SemiFlatModel& m, const RealPoint<S>& x) {
    using Traits = ScalarTraits<S>;
    m.require_in_domain<S>(x);
    const int n = m.n(), d = m.total_dim();
    DarbouxFrame<S> fr;
    fr.a = Mat<S>(n, n);
    fr.b = Mat<S>(n, n);
    S minus_one = Traits::zero() - Traits::one();
    for (int j = 0; j < n; ++j) {
        fr.e.push_back(TangentVector<S>::wirtinger(n + j, false, d));
        fr.f.push_back(minus_one * TangentVector<S>::wirtinger(j, false, d));
    }
    AltForm<S> pe = m.eta_total().eval<S>(x);
    S half = Traits::one() / Traits::from_int(2);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            fr.a.at(j, k) = half * pe.evaluate({fr.f[j], fr.f[k]});
            fr.b.at(j, k) = pe.evaluate({fr.f[j], fr.f[k].conjugate()});
        }
    return fr;
}

/// Rebuilds pi*eta from the frame coefficients (the extraction inverse).
template <class S>
AltForm<S> darboux_reconstruct(const SemiFlatModel& m, const DarbouxFrame<S>& fr) {
    const int n = m.n(), d = m.total_dim();
    using Traits = ScalarTraits<S>;
    S minus_one = Traits::zero() - Traits::one();
    std::vector<AltForm<S>> fstar, fbarstar;
    for (int j = 0; j < n; ++j) {
        fstar.push_back(minus_one * AltForm<S>::wirtinger_covector(j, false, d));
        fbarstar.push_back(minus_one * AltForm<S>::wirtinger_covector(j, true, d));
    }
    AltForm<S> acc(2, d);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            acc = acc + fr.a.at(j, k) * fstar[j].wedge(fstar[k]);
            acc = acc + fr.b.at(j, k) * fstar[j].wedge(fbarstar[k]);
        }
    return acc;
}

/// Omega^k ^ pi*alpha at a point; must vanish when p + k > n.
template <class S>
CheckReport vanishing_lemma_check(const SemiFlatModel& m, int k, const FormField& alpha,
                                  int p, int q, const RealPoint<S>& x, double tol = 1e-12) {
    using Traits = ScalarTraits<S>;
    if (p + q != alpha.degree() || alpha.dim() != m.base_dim())
        throw std::invalid_argument("vanishing_lemma_check: alpha must be a base (p,q)-form");
    AltForm<S> om = m.omega<S>();
    AltForm<S> pa = alpha.pullback_to(m.total_dim()).eval<S>(x);
    AltForm<S> prod = om.pow(k).wedge(pa);
    double scale = std::max(1.0, om.norm_inf() * pa.norm_inf());
    double measured;
    if constexpr (Traits::exact) {
        measured = prod.is_zero() ? 0.0 : 1.0;
    } else {
        measured = prod.norm_inf() / scale;
    }
    if (p + k > m.n())
        return CheckReport::make("vanishing: Omega^k ^ pi*alpha", "wedge vanishing lemma",
                                 measured, Traits::exact ? 0.0 : tol);
    return CheckReport::skip("vanishing: no constraint (p+k <= n)", "wedge vanishing lemma",
                             measured);
}

/// Omega_t^n ^ conj(Omega_t)^n = Omega^n ^ conj(Omega)^n, exactly in the
/// rational backend and to relative tolerance in float.
template <class S>
CheckReport volume_invariance_check(const SemiFlatModel& m, const S& t, const RealPoint<S>& x,
                                    double tol = 1e-10) {
    using Traits = ScalarTraits<S>;
    const int n = m.n();
    AltForm<S> omt = eval_family_form<S>(m, t, x);
    AltForm<S> om = m.omega<S>();
    AltForm<S> left = omt.pow(n).wedge(omt.conjugate().pow(n));
    AltForm<S> right = om.pow(n).wedge(om.conjugate().pow(n));
    IndexMask top = m.total_dim() >= 31 ? 0 : (IndexMask{1} << m.total_dim()) - 1;
    S lv = left.coeff(top), rv = right.coeff(top);
    if constexpr (Traits::exact) {
        bool eq = Traits::is_zero(lv - rv);
        CheckReport r = CheckReport::make_bool("volume invariance", "top-power conservation", eq);
        return r;
    } else {
        double denom = std::max(1e-300, Traits::abs_value(rv));
        double dev = Traits::abs_value(lv - rv) / denom;
        return CheckReport::make("volume invariance", "top-power conservation", dev, tol);
    }
}

/// Kernel of Omega_t(x) versus the predicted spanning set
/// {ebar_j} u {fbar_j + t sum_l b_lj e_l}.
template <class S>
CheckReport kernel_formula_check(const SemiFlatModel& m, const S& t, const RealPoint<S>& x,
                                 double tol = 1e-10) {
    using Traits = ScalarTraits<S>;
    const int n = m.n(), d = m.total_dim();
    AltForm<S> omt = eval_family_form<S>(m, t, x);
    auto fr = darboux_frame<S>(m, x);

    std::vector<TangentVector<S>> predicted;
    for (int j = 0; j < n; ++j) predicted.push_back(fr.e[j].conjugate());
    for (int j = 0; j < n; ++j) {
        TangentVector<S> v = fr.f[j].conjugate();
        for (int l = 0; l < n; ++l) v = v + (t * fr.b.at(l, j)) * fr.e[l];
        predicted.push_back(v);
    }

    double worst = 0.0;
    for (const auto& v : predicted) {
        AltForm<S> c = omt.contract(v);
        double scale = std::max(1e-300, v.norm_inf() * std::max(1.0, omt.norm_inf()));
        worst = std::max(worst, c.norm_inf() / scale);
    }

    auto ker = kernel(omt);
    if (static_cast<int>(ker.size()) != 2 * n)
        return CheckReport::make("kernel formula: rank", "kernel spanning set", 1.0, 0.0);

    if constexpr (Traits::exact) {
        // span equality by exact rank comparisons
        Mat<S> kmat(d, 2 * n);
        for (int c = 0; c < 2 * n; ++c)
            for (int r = 0; r < d; ++r) kmat.at(r, c) = ker[c][r];
        bool ok = worst == 0.0;
        for (const auto& v : predicted) {
            Mat<S> ext(d, 2 * n + 1);
            for (int c = 0; c < 2 * n; ++c)
                for (int r = 0; r < d; ++r) ext.at(r, c) = ker[c][r];
            for (int r = 0; r < d; ++r) ext.at(r, 2 * n) = v[r];
            if (rank(ext) != 2 * n) ok = false;
        }
        return CheckReport::make_bool("kernel formula", "kernel spanning set", ok);
    } else {
        // mutual containment via orthonormal projectors
        auto resid = [d](const std::vector<TangentVector<S>>& basis,
                         const std::vector<TangentVector<S>>& probes) {
            // modified Gram-Schmidt on basis
            std::vector<std::vector<ComplexD>> q;
            for (const auto& bv : basis) {
                std::vector<ComplexD> v(d);
                for (int i = 0; i < d; ++i) v[i] = ScalarTraits<S>::to_complex_double(bv[i]);
                for (const auto& qq : q) {
                    ComplexD dot = 0;
                    for (int i = 0; i < d; ++i) dot += std::conj(qq[i]) * v[i];
                    for (int i = 0; i < d; ++i) v[i] -= dot * qq[i];
                }
                double nr = 0;
                for (int i = 0; i < d; ++i) nr += std::norm(v[i]);
                nr = std::sqrt(nr);
                if (nr > 1e-14) {
                    for (int i = 0; i < d; ++i) v[i] /= nr;
                    q.push_back(v);
                }
            }
            double worst_local = 0.0;
            for (const auto& pv : probes) {
                std::vector<ComplexD> v(d);
                double nv = 0;
                for (int i = 0; i < d; ++i) {
                    v[i] = ScalarTraits<S>::to_complex_double(pv[i]);
                    nv += std::norm(v[i]);
                }
                nv = std::sqrt(nv);
                for (const auto& qq : q) {
                    ComplexD dot = 0;
                    for (int i = 0; i < d; ++i) dot += std::conj(qq[i]) * v[i];
                    for (int i = 0; i < d; ++i) v[i] -= dot * qq[i];
                }
                double rem = 0;
                for (int i = 0; i < d; ++i) rem += std::norm(v[i]);
                worst_local = std::max(worst_local, std::sqrt(rem) / std::max(nv, 1e-300));
            }
            return worst_local;
        };
        double r1 = resid(ker, predicted);
        double r2 = resid(predicted, ker);
        double measured = std::max({worst, r1, r2});
        return CheckReport::make("kernel formula", "kernel spanning set", measured, tol);
    }
}

/// dpi o I_t = J_S o dpi (the projection is holomorphic for I_t) and
/// Omega_t vanishes on fiber tangent vectors.
template <class S>
CheckReport holomorphy_check(const SemiFlatModel& m, const S& t, const RealPoint<S>& x,
                             double tol = 1e-10) {
    using Traits = ScalarTraits<S>;
    using R = typename Traits::Real;
    const int n = m.n(), d = m.total_dim();
    AltForm<S> omt = eval_family_form<S>(m, t, x);
    Mat<R> it = recover_complex_structure(omt);
    Mat<R> jbase = standard_base_j<R>(n);

    double res = 0.0;
    // top 2n rows of I_t must equal [J_S | 0]
    for (int r = 0; r < 2 * n; ++r)
        for (int c = 0; c < d; ++c) {
            R want = c < 2 * n ? jbase.at(r, c) : Traits::real_zero();
            res = std::max(res, Traits::real_abs(it.at(r, c) - want));
        }
    // I_t^2 = -id
    Mat<R> sq = it * it;
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) {
            R want = r == c ? (Traits::real_zero() - Traits::real_one()) : Traits::real_zero();
            res = std::max(res, Traits::real_abs(sq.at(r, c) - want));
        }
    // Omega_t restricted to the fiber tangent space
    for (int a = 2 * n; a < d; ++a)
        for (int b = a + 1; b < d; ++b) {
            auto va = TangentVector<S>::basis(a, d);
            auto vb = TangentVector<S>::basis(b, d);
            res = std::max(res, Traits::abs_value(omt.evaluate({va, vb})));
        }
    return CheckReport::make("holomorphy of the projection", "fibration holomorphy",
                             res, Traits::exact ? 0.0 : tol);
}

}  // namespace csymp

#endif  // CSYMP_SEMIFLAT_HPP
