#ifndef CSYMP_FORMFIELD_HPP
#define CSYMP_FORMFIELD_HPP

#include <map>
#include <stdexcept>
#include <vector>

#include "csymp/altform.hpp"
#include "csymp/expr.hpp"
#include "csymp/scalar.hpp"

namespace csymp {

/// Differential form on a chart whose coefficients are Expr trees over the
/// real coordinates. Exterior derivative is exact and symbolic; evaluation
/// at a point produces an AltForm in either scalar backend.
class FormField {
 public:
    FormField() = default;
    FormField(int degree, int dim) : degree_(degree), dim_(dim) {
        if (degree < 0 || dim < 0 || dim > kMaxDim || degree > dim)
            throw std::invalid_argument("FormField: bad degree/dim");
    }

    static FormField function(const Expr& f, int dim) {
        FormField ff(0, dim);
        ff.add_term(0, f);
        return ff;
    }

    static FormField basis_covector(int i, int dim) {
        FormField ff(1, dim);
        ff.add_term(IndexMask{1} << i, Expr::constant(1));
        return ff;
    }

    /// dzeta_j (or its conjugate) in the interleaved real coordinate order.
    static FormField wirtinger_covector(int j, bool bar, int dim) {
        FormField ff(1, dim);
        ff.add_term(IndexMask{1} << (2 * j), Expr::constant(1));
        ff.add_term(IndexMask{1} << (2 * j + 1), bar ? -Expr::i() : Expr::i());
        return ff;
    }

    int degree() const { return degree_; }
    int dim() const { return dim_; }
    const std::map<IndexMask, Expr>& terms() const { return t_; }

    void add_term(IndexMask mask, const Expr& e) {
        if (mask_popcount(mask) != degree_ || (mask >> dim_) != 0)
            throw std::invalid_argument("FormField::add_term: mask does not match degree/dim");
        auto it = t_.find(mask);
        if (it == t_.end()) {
            if (!e.is_structural_zero()) t_.emplace(mask, e);
        } else {
            Expr s = it->second + e;
            if (s.is_structural_zero()) t_.erase(it);
            else it->second = s;
        }
    }

    Expr coeff(IndexMask mask) const {
        auto it = t_.find(mask);
        return it == t_.end() ? Expr::constant(0) : it->second;
    }

    friend FormField operator+(const FormField& a, const FormField& b) {
        if (a.degree_ != b.degree_ || a.dim_ != b.dim_)
            throw std::invalid_argument("FormField: shape mismatch");
        FormField r = a;
        for (const auto& [m, e] : b.t_) r.add_term(m, e);
        return r;
    }
    friend FormField operator-(const FormField& a, const FormField& b) {
        if (a.degree_ != b.degree_ || a.dim_ != b.dim_)
            throw std::invalid_argument("FormField: shape mismatch");
        FormField r = a;
        for (const auto& [m, e] : b.t_) r.add_term(m, -e);
        return r;
    }

    FormField scaled(const Expr& s) const {
        FormField r(degree_, dim_);
        for (const auto& [m, e] : t_) r.add_term(m, s * e);
        return r;
    }

    FormField conjugate() const {
        FormField r(degree_, dim_);
        for (const auto& [m, e] : t_) r.add_term(m, e.conjugate());
        return r;
    }

    FormField wedge(const FormField& b) const {
        if (dim_ != b.dim_) throw std::invalid_argument("FormField::wedge: dimension mismatch");
        int deg = degree_ + b.degree_;
        if (deg > dim_) return FormField(dim_, dim_);  // identically zero
        FormField r(deg, dim_);
        for (const auto& [ma, ea] : t_)
            for (const auto& [mb, eb] : b.t_) {
                if (ma & mb) continue;
                int sg = merge_sign(ma, mb);
                Expr prod = ea * eb;
                r.add_term(ma | mb, sg > 0 ? prod : -prod);
            }
        return r;
    }

    /// Symbolic exterior derivative.
    FormField d() const {
        if (degree_ + 1 > dim_) return FormField(dim_, dim_);
        FormField r(degree_ + 1, dim_);
        for (const auto& [m, e] : t_) {
            for (int v = 0; v < dim_; ++v) {
                IndexMask vb = IndexMask{1} << v;
                if (m & vb) continue;
                Expr de = e.derivative(v);
                if (de.is_structural_zero()) continue;
                int sg = merge_sign(vb, m);
                r.add_term(vb | m, sg > 0 ? de : -de);
            }
        }
        return r;
    }

    /// (1,0)-part of df for a function (degree 0), as a coordinate 1-form.
    FormField del() const {
        require_function("del");
        const Expr& f = coeff(0);
        FormField r(1, dim_);
        Expr half = Expr::constant(GaussianRational(BigRat(1, 2)));
        for (int j = 0; 2 * j + 1 < dim_; ++j) {
            Expr fx = f.derivative(2 * j), fy = f.derivative(2 * j + 1);
            // (df/dzeta_j) dzeta_j = 1/2 (fx - i fy)(dx + i dy)
            Expr w = half * (fx - Expr::i() * fy);
            r.add_term(IndexMask{1} << (2 * j), w);
            r.add_term(IndexMask{1} << (2 * j + 1), Expr::i() * w);
        }
        return r;
    }

    /// (0,1)-part of df for a function (degree 0).
    FormField dbar() const {
        require_function("dbar");
        const Expr& f = coeff(0);
        FormField r(1, dim_);
        Expr half = Expr::constant(GaussianRational(BigRat(1, 2)));
        for (int j = 0; 2 * j + 1 < dim_; ++j) {
            Expr fx = f.derivative(2 * j), fy = f.derivative(2 * j + 1);
            // (df/dzetabar_j) dzetabar_j = 1/2 (fx + i fy)(dx - i dy)
            Expr w = half * (fx + Expr::i() * fy);
            r.add_term(IndexMask{1} << (2 * j), w);
            r.add_term(IndexMask{1} << (2 * j + 1), -(Expr::i() * w));
        }
        return r;
    }

    /// Coefficient-wise partial derivative (not the exterior derivative).
    FormField partial(int v) const {
        FormField r(degree_, dim_);
        for (const auto& [m, e] : t_) r.add_term(m, e.derivative(v));
        return r;
    }

    /// Reinterpret a base form as a form on a larger total space whose first
    /// coordinates are the base coordinates (pullback along the projection).
    FormField pullback_to(int total_dim) const {
        if (total_dim < dim_) throw std::invalid_argument("FormField::pullback_to: smaller dimension");
        FormField r(degree_, total_dim);
        for (const auto& [m, e] : t_) r.add_term(m, e);
        return r;
    }

    template <class S>
    AltForm<S> eval(const RealPoint<S>& pt) const {
        AltForm<S> out(degree_, dim_);
        std::span<const typename ScalarTraits<S>::Real> sp(pt.data(), pt.size());
        for (const auto& [m, e] : t_) out.add_term(m, e.template eval<S>(sp));
        return out;
    }

    bool is_zero_symbolic() const {
        for (const auto& [m, e] : t_)
            if (!e.is_zero_symbolic()) return false;
        return true;
    }

 private:
    void require_function(const char* who) const {
        if (degree_ != 0) throw std::invalid_argument(std::string(who) + ": expects a degree-0 field");
    }

    int degree_ = 0;
    int dim_ = 0;
    std::map<IndexMask, Expr> t_;
};

}  // namespace csymp

#endif  // CSYMP_FORMFIELD_HPP
