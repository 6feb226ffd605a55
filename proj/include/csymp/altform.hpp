#ifndef CSYMP_ALTFORM_HPP
#define CSYMP_ALTFORM_HPP

#include <bit>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "csymp/matrix.hpp"
#include "csymp/scalar.hpp"

namespace csymp {

// Index subsets of {0..dim-1} are stored as bitmasks, which keeps every key
// canonically sorted and makes form equality a map comparison.
using IndexMask = std::uint32_t;

constexpr int kMaxDim = 31;

inline int mask_popcount(IndexMask m) { return std::popcount(m); }

/// Sign of reordering e_A ^ e_B into the canonical order of A|B for disjoint
/// masks: parity of the number of pairs (a in A, b in B) with a > b.
inline int merge_sign(IndexMask a, IndexMask b) {
    int inv = 0;
    IndexMask bb = b;
    while (bb) {
        int j = std::countr_zero(bb);
        bb &= bb - 1;
        inv += std::popcount(a >> (j + 1));
    }
    return (inv & 1) ? -1 : 1;
}

/// Complexified tangent vector on a 2m-dimensional real tangent space.
template <class S>
class TangentVector {
 public:
    using Traits = ScalarTraits<S>;

    TangentVector() = default;
    explicit TangentVector(int dim) : c_(dim, Traits::zero()) {}
    explicit TangentVector(std::vector<S> components) : c_(std::move(components)) {}

    static TangentVector basis(int i, int dim) {
        TangentVector v(dim);
        v.c_[i] = Traits::one();
        return v;
    }
    /// Holomorphic coordinate vector d/dzeta_j = (d/dx - i d/dy)/2 in the
    /// interleaved real coordinate convention (x_j = 2j, y_j = 2j+1);
    /// `bar` gives the conjugate d/dzetabar_j.
    static TangentVector wirtinger(int j, bool bar, int dim) {
        TangentVector v(dim);
        S half = Traits::one() / Traits::from_int(2);
        S half_i = Traits::imaginary_unit() / Traits::from_int(2);
        v.c_[2 * j] = half;
        v.c_[2 * j + 1] = bar ? half_i : (Traits::zero() - half_i);
        return v;
    }

    int dim() const { return static_cast<int>(c_.size()); }
    const S& operator[](int i) const { return c_[i]; }
    S& operator[](int i) { return c_[i]; }
    const std::vector<S>& components() const { return c_; }

    TangentVector conjugate() const {
        TangentVector v(dim());
        for (int i = 0; i < dim(); ++i) v.c_[i] = Traits::conjugate(c_[i]);
        return v;
    }

    friend TangentVector operator+(const TangentVector& a, const TangentVector& b) {
        TangentVector v(a.dim());
        for (int i = 0; i < a.dim(); ++i) v.c_[i] = a.c_[i] + b.c_[i];
        return v;
    }
    friend TangentVector operator*(const S& s, const TangentVector& a) {
        TangentVector v(a.dim());
        for (int i = 0; i < a.dim(); ++i) v.c_[i] = s * a.c_[i];
        return v;
    }

    double norm_inf() const {
        double m = 0.0;
        for (const auto& x : c_) m = std::max(m, Traits::abs_value(x));
        return m;
    }

 private:
    std::vector<S> c_;
};

/// Complexified alternating k-form with coefficients over canonical index
/// subsets. Immutable in spirit: operations return new forms.
template <class S>
class AltForm {
 public:
    using Traits = ScalarTraits<S>;

    AltForm() = default;
    // degree > dim is admitted only as the canonical zero form (no index
    // subset of that size exists), so wedge can keep degree bookkeeping exact.
    AltForm(int degree, int dim) : degree_(degree), dim_(dim) {
        if (degree < 0 || dim < 0 || dim > kMaxDim)
            throw std::invalid_argument("AltForm: bad degree/dim");
    }

    static AltForm zero(int degree, int dim) { return AltForm(degree, dim); }

    /// dx_i as a 1-form.
    static AltForm basis_covector(int i, int dim) {
        AltForm f(1, dim);
        f.add_term(IndexMask{1} << i, Traits::one());
        return f;
    }

    /// dzeta_j = dx_j + i dy_j (or the conjugate) in the interleaved convention.
    static AltForm wirtinger_covector(int j, bool bar, int dim) {
        AltForm f(1, dim);
        f.add_term(IndexMask{1} << (2 * j), Traits::one());
        S i_unit = Traits::imaginary_unit();
        f.add_term(IndexMask{1} << (2 * j + 1), bar ? (Traits::zero() - i_unit) : i_unit);
        return f;
    }

    int degree() const { return degree_; }
    int dim() const { return dim_; }
    const std::map<IndexMask, S>& terms() const { return t_; }
    bool empty() const { return t_.empty(); }

    void add_term(IndexMask mask, const S& v) {
        if (mask_popcount(mask) != degree_ || (dim_ < kMaxDim && (mask >> dim_) != 0))
            throw std::invalid_argument("AltForm::add_term: mask does not match degree/dim");
        auto it = t_.find(mask);
        if (it == t_.end()) {
            if (!Traits::is_zero(v)) t_.emplace(mask, v);
        } else {
            it->second = it->second + v;
            if (Traits::is_zero(it->second)) t_.erase(it);
        }
    }

    S coeff(IndexMask mask) const {
        auto it = t_.find(mask);
        return it == t_.end() ? Traits::zero() : it->second;
    }

    friend AltForm operator+(const AltForm& a, const AltForm& b) {
        a.check_same_shape(b);
        AltForm r = a;
        for (const auto& [m, v] : b.t_) r.add_term(m, v);
        return r;
    }
    friend AltForm operator-(const AltForm& a, const AltForm& b) {
        a.check_same_shape(b);
        AltForm r = a;
        for (const auto& [m, v] : b.t_) r.add_term(m, Traits::zero() - v);
        return r;
    }
    friend AltForm operator*(const S& s, const AltForm& a) {
        AltForm r(a.degree_, a.dim_);
        if (Traits::is_zero(s)) return r;
        for (const auto& [m, v] : a.t_) r.add_term(m, s * v);
        return r;
    }

    AltForm conjugate() const {
        AltForm r(degree_, dim_);
        for (const auto& [m, v] : t_) r.add_term(m, Traits::conjugate(v));
        return r;
    }

    /// Multilinear alternating product with shuffle signs; the zero form of
    /// clamped degree when the degree would exceed the dimension.
    AltForm wedge(const AltForm& b) const {
        if (dim_ != b.dim_) throw std::invalid_argument("wedge: dimension mismatch");
        int deg = degree_ + b.degree_;
        if (deg > dim_) return AltForm(deg, dim_);
        AltForm r(deg, dim_);
        for (const auto& [ma, va] : t_)
            for (const auto& [mb, vb] : b.t_) {
                if (ma & mb) continue;
                int sg = merge_sign(ma, mb);
                S prod = va * vb;
                r.add_term(ma | mb, sg > 0 ? prod : Traits::zero() - prod);
            }
        return r;
    }

    AltForm pow(int k) const {
        if (k < 0) throw std::invalid_argument("AltForm::pow: negative exponent");
        AltForm acc(0, dim_);
        acc.add_term(0, Traits::one());
        for (int i = 0; i < k; ++i) acc = acc.wedge(*this);
        return acc;
    }

    /// Interior product v -| a; degree drops by one.
    AltForm contract(const TangentVector<S>& v) const {
        if (v.dim() != dim_) throw std::invalid_argument("contract: dimension mismatch");
        if (degree_ < 1) throw std::invalid_argument("contract: degree-0 form");
        AltForm r(degree_ - 1, dim_);
        for (const auto& [m, c] : t_) {
            IndexMask mm = m;
            int pos = 0;
            while (mm) {
                int i = std::countr_zero(mm);
                mm &= mm - 1;
                const S& vi = v[i];
                if (!Traits::is_zero(vi)) {
                    S val = vi * c;
                    r.add_term(m & ~(IndexMask{1} << i), (pos & 1) ? Traits::zero() - val : val);
                }
                ++pos;
            }
        }
        return r;
    }

    /// Value on a tuple of k vectors (via iterated contraction).
    S evaluate(const std::vector<TangentVector<S>>& vs) const {
        if (static_cast<int>(vs.size()) != degree_)
            throw std::invalid_argument("evaluate: wrong number of vectors");
        AltForm cur = *this;
        for (const auto& v : vs) {
            if (cur.degree_ == 0) break;
            cur = cur.contract(v);
        }
        return cur.coeff(0);
    }

    /// Antisymmetric coefficient matrix M[i][j] = a(d_i, d_j) of a 2-form.
    Mat<S> coefficient_matrix() const {
        if (degree_ != 2) throw std::invalid_argument("coefficient_matrix: degree must be 2");
        Mat<S> m(dim_, dim_);
        for (const auto& [mask, v] : t_) {
            int i = std::countr_zero(mask);
            int j = std::countr_zero(mask & (mask - 1));
            m.at(i, j) = v;
            m.at(j, i) = Traits::zero() - v;
        }
        return m;
    }

    double norm_inf() const {
        double m = 0.0;
        for (const auto& [mask, v] : t_) m = std::max(m, Traits::abs_value(v));
        return m;
    }

    bool is_zero() const { return t_.empty(); }

    /// Real and imaginary parts as real matrices (2-forms), for the complex
    /// structure recovery I = omega2^{-1} o omega1.
    Mat<typename Traits::Real> real_part_matrix() const {
        return part_matrix(/*imag=*/false);
    }
    Mat<typename Traits::Real> imag_part_matrix() const {
        return part_matrix(/*imag=*/true);
    }

 private:
    void check_same_shape(const AltForm& b) const {
        if (degree_ != b.degree_ || dim_ != b.dim_)
            throw std::invalid_argument("AltForm: shape mismatch");
    }

    Mat<typename Traits::Real> part_matrix(bool imag) const {
        if (degree_ != 2) throw std::invalid_argument("part_matrix: degree must be 2");
        Mat<typename Traits::Real> m(dim_, dim_);
        for (const auto& [mask, v] : t_) {
            int i = std::countr_zero(mask);
            int j = std::countr_zero(mask & (mask - 1));
            auto r = imag ? Traits::imag_part(v) : Traits::real_part(v);
            m.at(i, j) = r;
            m.at(j, i) = Traits::real_zero() - r;
        }
        return m;
    }

    int degree_ = 0;
    int dim_ = 0;
    std::map<IndexMask, S> t_;
};

template <class S>
AltForm<S> contract(const TangentVector<S>& v, const AltForm<S>& a) {
    return a.contract(v);
}

template <class S>
AltForm<S> wedge(const AltForm<S>& a, const AltForm<S>& b) {
    return a.wedge(b);
}

/// Max |coefficient difference|; forms must share degree and dim.
template <class S>
double form_distance(const AltForm<S>& a, const AltForm<S>& b) {
    AltForm<S> d = a - b;
    return d.norm_inf();
}

}  // namespace csymp

#endif  // CSYMP_ALTFORM_HPP
