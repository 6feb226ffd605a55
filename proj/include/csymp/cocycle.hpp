#ifndef CSYMP_COCYCLE_HPP
#define CSYMP_COCYCLE_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "csymp/check.hpp"
#include "csymp/formfield.hpp"
#include "csymp/moser.hpp"
#include "csymp/sampling.hpp"
#include "csymp/semiflat.hpp"

namespace csymp {

/// Two affine charts of the projective line, coordinates z and zeta = 1/z,
/// each carrying the semi-flat model with the chart's Fubini-Study form.
/// Fiber coordinates glue by w_1 = -z^2 w_0, which keeps dz^dw global.
struct P1Atlas {
    SemiFlatModel chart[2];
    double overlap_inner = 0.0;  // annulus r < |z| < R in either coordinate
    double overlap_outer = 0.0;
};

inline P1Atlas build_p1_atlas(double chart_radius, ComplexD tau) {
    if (chart_radius <= 1.0)
        throw std::invalid_argument("build_p1_atlas: chart radius must exceed 1 so the charts overlap");
    Mat<ComplexD> t(1, 1);
    t.at(0, 0) = tau;
    P1Atlas atlas;
    atlas.chart[0] = build_model(1, chart_radius, t, EtaSpec::fubini_study());
    atlas.chart[1] = build_model(1, chart_radius, t, EtaSpec::fubini_study());
    atlas.overlap_inner = 1.0 / chart_radius;
    atlas.overlap_outer = chart_radius;
    return atlas;
}

/// Fiber-translation transition between the two chart trivializations. The
/// shift is a function of the chart-i coordinate; it preserves the
/// projection and the symplectic form and is holomorphic on the overlap.
struct CocycleElement {
    int chart_i = 0, chart_j = 1;
    Expr shift;                       // complex-valued, in chart_i coordinates
    double cr_residual = 0.0;         // d/dzbar of the shift at the samples
    double flow_match_residual = 0.0; // flow-computed shift vs closed form
    bool omega_preserved_symbolic = false;
};

namespace detail {

/// Difference of the two chart primitives expressed in local coordinates:
/// -i t1 d^{1,0} log|z|^2, with coefficient -i t1 / z on the overlap.
inline FormField overlap_primitive_difference(ComplexD t1) {
    Expr x = Expr::var(0), y = Expr::var(1);
    Expr pot = Expr::log(x * x + y * y);
    auto f = FormField::function(pot, 2);
    return f.del().scaled(Expr::constant(ComplexD(0, -1) * t1));
}

/// Pullback of a constant-coefficient total-space form under the fiber
/// translation (z, w) -> (z, w + sigma(z)); symbolic and exact.
inline FormField fiber_translation_pullback(const FormField& omega_total, const Expr& sigma) {
    const int d = omega_total.dim();
    if (d != 4) throw std::invalid_argument("fiber_translation_pullback: expects a 1-dimensional fiber chart");
    Expr half = Expr::constant(GaussianRational(BigRat(1, 2)));
    Expr re_s = half * (sigma + sigma.conjugate());
    Expr im_s = (half / Expr::i()) * (sigma - sigma.conjugate());
    // images of the coordinate covectors
    std::vector<FormField> img;
    for (int i = 0; i < d; ++i) img.push_back(FormField::basis_covector(i, d));
    // du -> du + d(Re sigma), dv -> dv + d(Im sigma); Re/Im sigma depend on base vars only
    for (int v = 0; v < 2; ++v) {
        img[2].add_term(IndexMask{1} << v, re_s.derivative(v));
        img[3].add_term(IndexMask{1} << v, im_s.derivative(v));
    }
    FormField out(omega_total.degree(), d);
    for (const auto& [mask, e] : omega_total.terms()) {
        FormField acc = FormField::function(e, d);
        IndexMask mm = mask;
        while (mm) {
            int i = std::countr_zero(mm);
            mm &= mm - 1;
            acc = acc.wedge(img[i]);
        }
        out = out + acc;
    }
    return out;
}

}  // namespace detail

/// Builds psi_{ij} = phi_j^{-1} o phi_i on the overlap by flowing the
/// difference of the two chart primitives; certifies holomorphy and exact
/// Omega-preservation of the resulting fiber translation.
inline CocycleElement build_cocycle(const P1Atlas& atlas, ComplexD t1, int chart_i, int chart_j,
                                    int n_samples = 20, std::uint64_t seed = 7) {
    if ((chart_i != 0 && chart_i != 1) || (chart_j != 0 && chart_j != 1) || chart_i == chart_j)
        throw std::invalid_argument("build_cocycle: chart indices must be {0,1} in some order");

    CocycleElement el;
    el.chart_i = chart_i;
    el.chart_j = chart_j;

    // In chart-i coordinates the difference alpha_i - alpha_j is
    // -i t1 d^{1,0} log|z|^2 for either order of the charts.
    FormField dalpha = detail::overlap_primitive_difference(t1);
    el.shift = dalpha.coeff(IndexMask{1} << 0);  // dz-coefficient c(z): shift = c

    // The difference form is closed, so Omega_s = Omega along the path; the
    // flow is the fiber translation by c(z).
    if (!dalpha.d().is_zero_symbolic())
        throw std::logic_error("build_cocycle: primitive difference is not closed");

    const auto& model = atlas.chart[chart_i];
    MoserPath path(model, dalpha);

    SampleRng rng(seed);
    double worst_flow = 0.0, worst_cr = 0.0;
    Expr dbar_shift = Expr::constant(GaussianRational(BigRat(1, 2))) *
                      (el.shift.derivative(0) + Expr::i() * el.shift.derivative(1));
    for (int k = 0; k < n_samples; ++k) {
        double rr = rng.uniform(atlas.overlap_inner * 1.05, std::min(atlas.overlap_outer * 0.95, 1.8));
        double th = rng.uniform(0.0, 2 * 3.14159265358979323846);
        std::vector<double> x = {rr * std::cos(th), rr * std::sin(th), rng.uniform01(), rng.uniform01()};
        auto flow = integrate_flow(path, {x}, 64);
        const auto& end = flow.samples[0].xs_raw;
        ComplexD shift_flow{end[2] - x[2], end[3] - x[3]};
        ComplexD shift_closed = el.shift.eval_d(std::span<const double>(x.data(), 2));
        worst_flow = std::max(worst_flow, std::abs(shift_flow - shift_closed));
        worst_cr = std::max(worst_cr, std::abs(dbar_shift.eval_d(std::span<const double>(x.data(), 2))));
    }
    el.flow_match_residual = worst_flow;
    el.cr_residual = worst_cr;

    // Symbolic Omega-preservation: dz ^ d(w + sigma) = dz ^ dw because
    // sigma is holomorphic and dz ^ dz = 0.
    FormField omega_total(2, 4);
    {
        auto dz = FormField::wirtinger_covector(0, false, 4);
        auto dw = FormField::wirtinger_covector(1, false, 4);
        omega_total = dz.wedge(dw);
    }
    FormField pulled = detail::fiber_translation_pullback(omega_total, el.shift);
    el.omega_preserved_symbolic = (pulled - omega_total).is_zero_symbolic();
    return el;
}

/// Evaluates the inverse-composition identity psi_ij o psi_ji = id at sample
/// points of the overlap: the chart-j shift converts to chart-i coordinates
/// through the fiber transition w_i = -z_j^2 ... and must cancel shift_ij.
inline CheckReport cocycle_inverse_check(const P1Atlas& atlas, const CocycleElement& ij,
                                         const CocycleElement& ji, int n_samples = 20,
                                         std::uint64_t seed = 11, double tol = 1e-10) {
    SampleRng rng(seed);
    double worst = 0.0;
    for (int k = 0; k < n_samples; ++k) {
        double rr = rng.uniform(atlas.overlap_inner * 1.05, std::min(atlas.overlap_outer * 0.95, 1.8));
        double th = rng.uniform(0.0, 2 * 3.14159265358979323846);
        ComplexD z = std::polar(rr, th);
        ComplexD zeta = 1.0 / z;
        double zi[2] = {z.real(), z.imag()};
        double ze[2] = {zeta.real(), zeta.imag()};
        ComplexD s_ij = ij.shift.eval_d(std::span<const double>(zi, 2));
        ComplexD s_ji = ji.shift.eval_d(std::span<const double>(ze, 2));
        // translation by s in chart j equals translation by -s/z^2 in chart i
        ComplexD composed = s_ij + (-s_ji / (z * z));
        worst = std::max(worst, std::abs(composed));
    }
    return CheckReport::make("cocycle inverse composition", "cocycle identity", worst, tol);
}

/// Fiber translations form an abelian group: composing two shifts in either
/// order agrees exactly.
inline bool cocycle_commutes(const CocycleElement& a, const CocycleElement& b,
                             const std::vector<double>& base_point) {
    std::span<const double> sp(base_point.data(), 2);
    ComplexD sa = a.shift.eval_d(sp), sb = b.shift.eval_d(sp);
    return sa + sb == sb + sa;
}

}  // namespace csymp

#endif  // CSYMP_COCYCLE_HPP
