#ifndef CSYMP_MOSER_HPP
#define CSYMP_MOSER_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "csymp/check.hpp"
#include "csymp/formfield.hpp"
#include "csymp/matrix.hpp"
#include "csymp/semiflat.hpp"

namespace csymp {

/// alpha = -i t1 d^{1,0} log(1 + sum |z_j|^2): the primitive whose exterior
/// derivative is t1 times the Fubini-Study form of the chart.
inline FormField fs_primitive(int n, ComplexD t1) {
    auto phi = FormField::function(detail::fs_potential(n), 2 * n);
    return phi.del().scaled(Expr::constant(ComplexD(0, -1) * t1));
}

/// Constant-coefficient base 1-form c dz_j (dalpha = 0, exact translation flow).
inline FormField constant_primitive(int n, int j, ComplexD c) {
    return FormField::wirtinger_covector(j, false, 2 * n).scaled(Expr::constant(c));
}

/// Path of C-symplectic structures Omega_s = Omega + s pi*(d alpha), s in
/// [0,1]; the deformation target t1 is absorbed into alpha. Caches the
/// symbolic spatial derivatives needed by the variational equation.
class MoserPath {
 public:
    /// Base 1-form of type (1,0); validated at sample points.
    MoserPath(SemiFlatModel model, const FormField& base_alpha)
        : MoserPath(std::move(model), base_alpha, /*validate=*/true) {}

    /// Unvalidated total-space 1-form; for negative controls in tests.
    static MoserPath raw_total(SemiFlatModel model, FormField total_alpha) {
        MoserPath p(std::move(model));
        if (total_alpha.dim() != p.model_.total_dim() || total_alpha.degree() != 1)
            throw std::invalid_argument("MoserPath: total alpha must be a 1-form on the total space");
        p.alpha_total_ = std::move(total_alpha);
        p.dalpha_total_ = p.alpha_total_.d();
        p.finish_setup();
        return p;
    }

    const SemiFlatModel& model() const { return model_; }
    const FormField& alpha_total() const { return alpha_total_; }
    const FormField& dalpha_total() const { return dalpha_total_; }

    /// Coefficient matrix of Omega_s at x plus the pulled-back alpha vector.
    void assemble(double s, const std::vector<double>& x, Mat<ComplexD>& m_out,
                  std::vector<ComplexD>& alpha_out) const {
        const int d = model_.total_dim();
        AltForm<ComplexD> da = dalpha_total_.eval<ComplexD>(x);
        Mat<ComplexD> mda = da.coefficient_matrix();
        m_out = Mat<ComplexD>(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) m_out.at(i, j) = m_const_.at(i, j) + s * mda.at(i, j);
        AltForm<ComplexD> av = alpha_total_.eval<ComplexD>(x);
        alpha_out.assign(d, ComplexD{});
        for (int i = 0; i < d; ++i) alpha_out[i] = av.coeff(IndexMask{1} << i);
    }

    const FormField& alpha_partial(int v) const { return alpha_dx_[v]; }
    const FormField& dalpha_partial(int v) const { return dalpha_dx_[v]; }

 private:
    explicit MoserPath(SemiFlatModel model) : model_(std::move(model)) {}

    MoserPath(SemiFlatModel model, const FormField& base_alpha, bool validate)
        : model_(std::move(model)) {
        if (base_alpha.dim() != model_.base_dim() || base_alpha.degree() != 1)
            throw std::invalid_argument("MoserPath: alpha must be a base 1-form");
        if (validate) {
            SampleRng rng(0xa1fa5eedULL);
            auto jb = standard_base_j<double>(model_.n());
            for (int k = 0; k < 12; ++k) {
                auto bp = rng.polydisc_point(model_.n(), 0.9 * model_.base_radius());
                AltForm<ComplexD> ax;
                try {
                    ax = base_alpha.eval<ComplexD>(bp);
                } catch (const std::domain_error&) {
                    continue;  // sample hit a pole of the primitive
                }
                auto anti = hodge_project(ax, jb, 0, 1);
                if (anti.norm_inf() > 1e-10 * std::max(1.0, ax.norm_inf()))
                    throw std::invalid_argument("MoserPath: alpha has a nonzero (0,1)-component");
            }
        }
        alpha_total_ = base_alpha.pullback_to(model_.total_dim());
        dalpha_total_ = base_alpha.d().pullback_to(model_.total_dim());
        finish_setup();
    }

    void finish_setup() {
        const int d = model_.total_dim();
        m_const_ = standard_omega<ComplexD>(model_.n()).coefficient_matrix();
        alpha_dx_.clear();
        dalpha_dx_.clear();
        for (int v = 0; v < d; ++v) {
            alpha_dx_.push_back(alpha_total_.partial(v));
            dalpha_dx_.push_back(dalpha_total_.partial(v));
        }
    }

    SemiFlatModel model_;
    FormField alpha_total_;
    FormField dalpha_total_;
    Mat<ComplexD> m_const_;
    std::vector<FormField> alpha_dx_;
    std::vector<FormField> dalpha_dx_;
};

struct MoserFieldSample {
    std::vector<double> v;   // real Moser vector field at (s, x)
    Mat<double> dv;          // spatial Jacobian of the field
    double residual = 0.0;   // defining-equation residual, relative
};

/// Solves V -| Omega_s(x) = -pi*alpha for the real field V. The system is
/// stacked into 8n real equations in 4n unknowns; it is consistent exactly
/// when alpha is of type (1,0) for I_s, and the reported residual certifies
/// that. The spatial Jacobian comes from differentiating the linear system.
inline MoserFieldSample moser_field(const MoserPath& path, double s, const std::vector<double>& x,
                                    bool with_jacobian = true) {
    const int d = path.model().total_dim();
    Mat<ComplexD> m;
    std::vector<ComplexD> alpha;
    path.assemble(s, x, m, alpha);

    // Real stacked system A V = b with A = [Re M^T; Im M^T].
    Mat<double> a(2 * d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            ComplexD mt = m.at(j, i);
            a.at(i, j) = mt.real();
            a.at(d + i, j) = mt.imag();
        }
    double alpha_scale = 1.0;
    for (const auto& z : alpha) alpha_scale = std::max(alpha_scale, std::abs(z));

    const int ncols = with_jacobian ? 1 + d : 1;
    Mat<double> rhs(2 * d, ncols);
    for (int i = 0; i < d; ++i) {
        rhs.at(i, 0) = -alpha[i].real();
        rhs.at(d + i, 0) = -alpha[i].imag();
    }

    MoserFieldSample out;
    if (!with_jacobian) {
        auto sol = solve_consistent_multi(a, rhs);
        out.v.resize(d);
        for (int i = 0; i < d; ++i) out.v[i] = sol.x.at(i, 0);
        out.residual = sol.residual / alpha_scale;
        return out;
    }

    // First pass for V itself (needed in the derivative right-hand sides).
    Mat<double> rhs0(2 * d, 1);
    for (int i = 0; i < d; ++i) {
        rhs0.at(i, 0) = -alpha[i].real();
        rhs0.at(d + i, 0) = -alpha[i].imag();
    }
    auto sol0 = solve_consistent_multi(a, rhs0);
    std::vector<double> v(d);
    for (int i = 0; i < d; ++i) v[i] = sol0.x.at(i, 0);

    // d/dx_k (A V = b): A dV = db - dA V.
    for (int k = 0; k < d; ++k) {
        AltForm<ComplexD> dda = path.dalpha_partial(k).eval<ComplexD>(x);
        Mat<ComplexD> dm = dda.coefficient_matrix();
        AltForm<ComplexD> dav = path.alpha_partial(k).eval<ComplexD>(x);
        for (int i = 0; i < d; ++i) {
            ComplexD dai = dav.coeff(IndexMask{1} << i);
            ComplexD dAv{};
            for (int j = 0; j < d; ++j) dAv += s * dm.at(j, i) * v[j];
            rhs.at(i, 1 + k) = -dai.real() - dAv.real();
            rhs.at(d + i, 1 + k) = -dai.imag() - dAv.imag();
        }
    }
    for (int i = 0; i < d; ++i) {
        rhs.at(i, 0) = rhs0.at(i, 0);
        rhs.at(d + i, 0) = rhs0.at(d + i, 0);
    }
    auto sol = solve_consistent_multi(a, rhs);
    out.v.resize(d);
    out.dv = Mat<double>(d, d);
    for (int i = 0; i < d; ++i) {
        out.v[i] = sol.x.at(i, 0);
        for (int k = 0; k < d; ++k) out.dv.at(i, k) = sol.x.at(i, 1 + k);
    }
    out.residual = sol0.residual / alpha_scale;
    return out;
}

struct FlowSample {
    std::vector<double> x0;      // start point
    std::vector<double> xs;      // end point, fiber coordinates lattice-reduced
    std::vector<double> xs_raw;  // end point in the covering coordinates
    Mat<double> jac;             // transported Jacobian of the flow map
    double s = 1.0;
    double pullback_error = 0.0;
    double log_det_jac = 0.0;
};

struct FlowResult {
    std::vector<FlowSample> samples;
    double max_pullback_error = 0.0;
    int steps = 0;
    double step_size = 0.0;
    double max_z_drift = 0.0;
    double max_field_residual = 0.0;
};

namespace detail {

/// Reduce fiber coordinates modulo Z^n + tau Z^n; base part untouched.
inline std::vector<double> lattice_reduce(const SemiFlatModel& m, std::vector<double> x) {
    const int n = m.n();
    Mat<double> basis(2 * n, 2 * n);
    for (int j = 0; j < n; ++j) {
        basis.at(2 * j, j) = 1.0;  // generator e_j: w_j += 1
        for (int ii = 0; ii < n; ++ii) {
            basis.at(2 * ii, n + j) = m.tau().at(ii, j).real();
            basis.at(2 * ii + 1, n + j) = m.tau().at(ii, j).imag();
        }
    }
    auto inv = inverse(basis);
    if (!inv) throw std::logic_error("lattice_reduce: degenerate lattice basis");
    std::vector<double> w(2 * n);
    for (int i = 0; i < 2 * n; ++i) w[i] = x[2 * n + i];
    auto c = inv->apply(w);
    for (auto& ci : c) ci -= std::floor(ci);
    auto wr = basis.apply(c);
    for (int i = 0; i < 2 * n; ++i) x[2 * n + i] = wr[i];
    return x;
}

}  // namespace detail

/// Classical 4th-order one-step integration of dx/ds = V(s,x) together with
/// the variational equation dJ/ds = DV(s,x) J, J(0) = id. Torus reduction is
/// applied only to the reported coordinates; the field is lattice-periodic,
/// so integrating in the cover is safe and keeps J free of branch jumps.
inline FlowResult integrate_flow(const MoserPath& path, const std::vector<std::vector<double>>& samples,
                                 int steps) {
    if (steps < 1) throw std::invalid_argument("integrate_flow: steps must be >= 1");
    const auto& model = path.model();
    const int d = model.total_dim();
    const int n = model.n();
    const double h = 1.0 / steps;

    FlowResult result;
    result.steps = steps;
    result.step_size = h;

    Mat<ComplexD> m_end;
    std::vector<ComplexD> alpha_end_unused;

    for (const auto& start : samples) {
        if (static_cast<int>(start.size()) != d)
            throw std::invalid_argument("integrate_flow: sample has wrong dimension");
        model.require_in_domain<ComplexD>(start);

        std::vector<double> x = start;
        Mat<double> jac = Mat<double>::identity(d);

        struct Deriv {
            std::vector<double> dx;
            Mat<double> dj;
        };
        auto eval_field = [&](double s, const std::vector<double>& xx, const Mat<double>& jj) {
            auto f = moser_field(path, s, xx, /*with_jacobian=*/true);
            result.max_field_residual = std::max(result.max_field_residual, f.residual);
            Deriv out;
            out.dx = f.v;
            out.dj = f.dv * jj;
            return out;
        };

        for (int k = 0; k < steps; ++k) {
            double s = k * h;
            auto k1 = eval_field(s, x, jac);
            auto advance = [&](const Deriv& kd, double frac) {
                std::vector<double> xx(d);
                for (int i = 0; i < d; ++i) xx[i] = x[i] + frac * h * kd.dx[i];
                Mat<double> jj(d, d);
                for (int r = 0; r < d; ++r)
                    for (int c = 0; c < d; ++c) jj.at(r, c) = jac.at(r, c) + frac * h * kd.dj.at(r, c);
                return std::make_pair(xx, jj);
            };
            auto [x2, j2] = advance(k1, 0.5);
            auto k2 = eval_field(s + 0.5 * h, x2, j2);
            auto [x3, j3] = advance(k2, 0.5);
            auto k3 = eval_field(s + 0.5 * h, x3, j3);
            auto [x4, j4] = advance(k3, 1.0);
            auto k4 = eval_field(s + h, x4, j4);
            for (int i = 0; i < d; ++i)
                x[i] += h / 6.0 * (k1.dx[i] + 2 * k2.dx[i] + 2 * k3.dx[i] + k4.dx[i]);
            for (int r = 0; r < d; ++r)
                for (int c = 0; c < d; ++c)
                    jac.at(r, c) += h / 6.0 * (k1.dj.at(r, c) + 2 * k2.dj.at(r, c) +
                                               2 * k3.dj.at(r, c) + k4.dj.at(r, c));
            for (double xi : x)
                if (!std::isfinite(xi))
                    throw std::runtime_error("integrate_flow: non-finite state (step-size failure)");
        }

        double drift = 0.0;
        for (int i = 0; i < 2 * n; ++i) drift = std::max(drift, std::abs(x[i] - start[i]));
        result.max_z_drift = std::max(result.max_z_drift, drift);
        if (drift > 1e-9)
            throw std::logic_error("integrate_flow: flow left the fiber (z-coordinate drift)");

        // pullback error: J^T M(Omega_1)(x1) J - M(Omega_0)(x0), entrywise max
        Mat<ComplexD> m1;
        std::vector<ComplexD> avec;
        path.assemble(1.0, x, m1, avec);
        Mat<double> m1re(d, d), m1im(d, d);
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) {
                m1re.at(r, c) = m1.at(r, c).real();
                m1im.at(r, c) = m1.at(r, c).imag();
            }
        Mat<double> jt = jac.transposed();
        Mat<double> pre = jt * m1re * jac;
        Mat<double> pim = jt * m1im * jac;
        Mat<ComplexD> m0;
        path.assemble(0.0, start, m0, avec);
        double err = 0.0;
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) {
                ComplexD got{pre.at(r, c), pim.at(r, c)};
                err = std::max(err, std::abs(got - m0.at(r, c)));
            }

        FlowSample fs;
        fs.x0 = start;
        fs.xs_raw = x;
        fs.xs = detail::lattice_reduce(model, x);
        fs.jac = jac;
        fs.pullback_error = err;
        fs.log_det_jac = log_abs_det(jac);
        result.samples.push_back(std::move(fs));
        result.max_pullback_error = std::max(result.max_pullback_error, err);
    }
    return result;
}

/// max |dpi(V)| over an (s, x) grid plus the field residual; the Moser field
/// of a pulled-back primitive must be vertical.
inline CheckReport verify_verticality(const MoserPath& path, const std::vector<double>& s_grid,
                                      const std::vector<std::vector<double>>& sample_grid,
                                      double tol = 1e-10) {
    const int n = path.model().n();
    double worst = 0.0;
    for (double s : s_grid)
        for (const auto& x : sample_grid) {
            auto f = moser_field(path, s, x, /*with_jacobian=*/false);
            double vert = 0.0;
            for (int i = 0; i < 2 * n; ++i) vert = std::max(vert, std::abs(f.v[i]));
            worst = std::max({worst, vert, f.residual});
        }
    return CheckReport::make("moser field verticality", "vertical flow field", worst, tol);
}

}  // namespace csymp

#endif  // CSYMP_MOSER_HPP
