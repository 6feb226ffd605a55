#ifndef CSYMP_NFIELD_HPP
#define CSYMP_NFIELD_HPP

#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "csymp/scalar.hpp"

namespace csymp {

// Univariate polynomials over the rationals, ascending coefficients.
using QPoly = std::vector<BigRat>;

namespace qp {

inline void trim(QPoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

inline int degree(const QPoly& p) { return static_cast<int>(p.size()) - 1; }

inline BigRat eval(const QPoly& p, const BigRat& x) {
    BigRat acc(0);
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
    return acc;
}

inline QPoly derivative(const QPoly& p) {
    QPoly d;
    for (size_t i = 1; i < p.size(); ++i) d.push_back(BigRat(static_cast<long>(i)) * p[i]);
    return d;
}

inline QPoly negate(QPoly p) {
    for (auto& c : p) c = -c;
    return p;
}

/// Remainder of the euclidean division a mod b.
inline QPoly rem(QPoly a, const QPoly& b) {
    if (b.empty()) throw std::invalid_argument("qp::rem: division by zero polynomial");
    while (degree(a) >= degree(b)) {
        BigRat f = a.back() / b.back();
        int shift = degree(a) - degree(b);
        for (size_t i = 0; i < b.size(); ++i) a[i + shift] -= f * b[i];
        trim(a);
        if (a.empty()) break;
    }
    return a;
}

inline QPoly gcd(QPoly a, QPoly b) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        QPoly r = rem(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

/// Sturm chain p, p', -rem(...), ...
inline std::vector<QPoly> sturm_chain(const QPoly& p) {
    std::vector<QPoly> chain;
    QPoly a = p;
    trim(a);
    chain.push_back(a);
    QPoly b = derivative(a);
    trim(b);
    while (!b.empty()) {
        chain.push_back(b);
        QPoly r = negate(rem(chain[chain.size() - 2], b));
        trim(r);
        b = std::move(r);
    }
    return chain;
}

inline int sign_changes(const std::vector<QPoly>& chain, const BigRat& x) {
    int changes = 0, prev = 0;
    for (const auto& p : chain) {
        BigRat v = eval(p, x);
        int s = v == 0 ? 0 : (v > 0 ? 1 : -1);
        if (s != 0) {
            if (prev != 0 && s != prev) ++changes;
            prev = s;
        }
    }
    return changes;
}

/// Number of distinct real roots in (a, b]; requires p(a) != 0 and p(b) != 0.
inline int roots_in_interval(const std::vector<QPoly>& chain, const BigRat& a, const BigRat& b) {
    return sign_changes(chain, a) - sign_changes(chain, b);
}

}  // namespace qp

/// Real number field Q(theta) with a designated real root of a monic,
/// square-free integer minimal polynomial, isolated by a rational interval.
class NumberField {
 public:
    NumberField(std::vector<BigInt> min_poly, BigRat lo, BigRat hi)
        : min_poly_(std::move(min_poly)), lo_(std::move(lo)), hi_(std::move(hi)) {
        if (min_poly_.size() < 2) throw std::invalid_argument("NumberField: minimal polynomial must have degree >= 1");
        if (min_poly_.back() != 1) throw std::invalid_argument("NumberField: minimal polynomial must be monic");
        if (lo_ >= hi_) throw std::invalid_argument("NumberField: empty root interval");
        for (const auto& c : min_poly_) p_.push_back(BigRat(c));
        QPoly g = qp::gcd(p_, qp::derivative(p_));
        if (qp::degree(g) > 0)
            throw std::invalid_argument("NumberField: minimal polynomial is not square-free");
        if (qp::eval(p_, lo_) == 0 || qp::eval(p_, hi_) == 0)
            throw std::invalid_argument("NumberField: interval endpoints must not be roots");
        chain_ = qp::sturm_chain(p_);
        if (qp::roots_in_interval(chain_, lo_, hi_) != 1)
            throw std::invalid_argument("NumberField: interval does not isolate exactly one real root");
    }

    /// The rationals, as the degree-1 field with theta = 0.
    static std::shared_ptr<const NumberField> rationals() {
        static const auto q = std::make_shared<const NumberField>(
            std::vector<BigInt>{BigInt(0), BigInt(1)}, BigRat(-1, 2), BigRat(1, 2));
        return q;
    }

    int degree() const { return static_cast<int>(min_poly_.size()) - 1; }
    const std::vector<BigInt>& min_poly() const { return min_poly_; }
    const QPoly& min_poly_q() const { return p_; }

    /// Shrink the isolating interval below the given width (bisection; the
    /// root is simple, so the sign change tracks it).
    std::pair<BigRat, BigRat> refined_interval(const BigRat& width) const {
        BigRat lo = lo_, hi = hi_;
        BigRat flo = qp::eval(p_, lo);
        while (hi - lo > width) {
            BigRat mid = (lo + hi) / 2;
            BigRat fm = qp::eval(p_, mid);
            if (fm == 0) {
                // rational root: collapse to a tiny interval around it
                BigRat eps = width / 4;
                return {mid - eps, mid + eps};
            }
            if ((flo > 0) != (fm > 0)) {
                hi = mid;
            } else {
                lo = mid;
                flo = fm;
            }
        }
        return {lo, hi};
    }

    bool operator==(const NumberField& o) const { return min_poly_ == o.min_poly_ && lo_ == o.lo_ && hi_ == o.hi_; }

 private:
    std::vector<BigInt> min_poly_;
    BigRat lo_, hi_;
    QPoly p_;
    std::vector<QPoly> chain_;
};

using NumberFieldPtr = std::shared_ptr<const NumberField>;

/// Element of Q(theta): rational coefficient vector in powers of theta,
/// arithmetic reduced modulo the minimal polynomial, exact sign decisions by
/// interval refinement against the designated root.
class NFElem {
 public:
    NFElem() : k_(NumberField::rationals()), c_(1, BigRat(0)) {}
    explicit NFElem(BigRat r) : k_(NumberField::rationals()), c_(1, std::move(r)) {}
    NFElem(NumberFieldPtr k, std::vector<BigRat> coeffs) : k_(std::move(k)), c_(std::move(coeffs)) {
        if (static_cast<int>(c_.size()) != k_->degree())
            throw std::invalid_argument("NFElem: coefficient vector must have length = field degree");
    }

    static NFElem theta(NumberFieldPtr k) {
        std::vector<BigRat> c(k->degree(), BigRat(0));
        if (k->degree() == 1) {
            // theta is the rational root itself
            c[0] = -BigRat(k->min_poly()[0]);
        } else {
            c[1] = 1;
        }
        return NFElem(std::move(k), std::move(c));
    }

    const NumberFieldPtr& field() const { return k_; }
    const std::vector<BigRat>& coeffs() const { return c_; }

    bool is_zero() const {
        for (const auto& x : c_)
            if (x != 0) return false;
        return true;
    }
    bool is_rational() const {
        for (size_t i = 1; i < c_.size(); ++i)
            if (c_[i] != 0) return false;
        return true;
    }
    const BigRat& rational_value() const {
        if (!is_rational()) throw std::domain_error("NFElem: value is not rational");
        return c_[0];
    }

    friend NFElem operator+(const NFElem& a, const NFElem& b) {
        auto [x, y] = promote(a, b);
        for (size_t i = 0; i < y.c_.size(); ++i) x.c_[i] += y.c_[i];
        return x;
    }
    friend NFElem operator-(const NFElem& a, const NFElem& b) {
        auto [x, y] = promote(a, b);
        for (size_t i = 0; i < y.c_.size(); ++i) x.c_[i] -= y.c_[i];
        return x;
    }
    friend NFElem operator-(const NFElem& a) {
        NFElem r = a;
        for (auto& x : r.c_) x = -x;
        return r;
    }
    friend NFElem operator*(const NFElem& a, const NFElem& b) {
        auto [x, y] = promote(a, b);
        const int d = x.k_->degree();
        std::vector<BigRat> prod(2 * d - 1, BigRat(0));
        for (int i = 0; i < d; ++i) {
            if (x.c_[i] == 0) continue;
            for (int j = 0; j < d; ++j) {
                if (y.c_[j] == 0) continue;
                prod[i + j] += x.c_[i] * y.c_[j];
            }
        }
        // reduce modulo the monic minimal polynomial
        const auto& mp = x.k_->min_poly();
        for (int i = 2 * d - 2; i >= d; --i) {
            if (prod[i] == 0) continue;
            BigRat f = prod[i];
            prod[i] = 0;
            for (int j = 0; j < d; ++j) prod[i - d + j] -= f * BigRat(mp[j]);
        }
        prod.resize(d);
        return NFElem(x.k_, std::move(prod));
    }
    NFElem& operator+=(const NFElem& b) { return *this = *this + b; }
    NFElem& operator-=(const NFElem& b) { return *this = *this - b; }

    friend NFElem operator*(const BigRat& s, const NFElem& a) {
        NFElem r = a;
        for (auto& x : r.c_) x *= s;
        return r;
    }
    NFElem operator/(const BigRat& s) const {
        if (s == 0) throw std::domain_error("NFElem: division by zero");
        NFElem r = *this;
        for (auto& x : r.c_) x /= s;
        return r;
    }

    friend bool operator==(const NFElem& a, const NFElem& b) { return (a - b).is_zero(); }

    /// Exact sign: -1, 0, +1. Nonzero elements are separated from zero by
    /// refining the root interval until interval evaluation excludes zero.
    int sign() const {
        if (is_zero()) return 0;
        if (is_rational()) return c_[0] > 0 ? 1 : -1;
        BigRat width = BigRat(1, 2);
        for (int iter = 0; iter < 4096; ++iter) {
            auto [lo, hi] = k_->refined_interval(width);
            auto [vlo, vhi] = interval_eval(lo, hi);
            if (vlo > 0) return 1;
            if (vhi < 0) return -1;
            width /= 16;
        }
        throw std::logic_error("NFElem::sign: interval refinement did not separate (is the element zero?)");
    }

    bool operator>(const NFElem& b) const { return (*this - b).sign() > 0; }
    bool operator<(const NFElem& b) const { return (*this - b).sign() < 0; }

    double to_double() const {
        auto [lo, hi] = k_->refined_interval(BigRat(1, 1000000));
        BigRat mid = (lo + hi) / 2;
        BigRat acc(0);
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * mid + *it;
        return to_double_rat(acc);
    }

    std::string to_string() const {
        if (is_rational()) return rat_to_string(c_[0]);
        std::ostringstream os;
        os << "[";
        for (size_t i = 0; i < c_.size(); ++i) {
            if (i) os << ",";
            os << rat_to_string(c_[i]);
        }
        os << "]";
        return os.str();
    }

 private:
    static double to_double_rat(const BigRat& r) { return static_cast<double>(r); }

    /// Evaluate the coefficient polynomial over [lo, hi] with exact rational
    /// interval arithmetic (Horner).
    std::pair<BigRat, BigRat> interval_eval(const BigRat& lo, const BigRat& hi) const {
        BigRat alo(0), ahi(0);
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
            // [alo,ahi] * [lo,hi]
            BigRat p1 = alo * lo, p2 = alo * hi, p3 = ahi * lo, p4 = ahi * hi;
            BigRat mn = std::min(std::min(p1, p2), std::min(p3, p4));
            BigRat mx = std::max(std::max(p1, p2), std::max(p3, p4));
            alo = mn + *it;
            ahi = mx + *it;
        }
        return {alo, ahi};
    }

    static std::pair<NFElem, NFElem> promote(const NFElem& a, const NFElem& b) {
        if (a.k_ == b.k_ || *a.k_ == *b.k_) return {a, b};
        if (a.k_->degree() == 1 && a.is_rational()) {
            std::vector<BigRat> c(b.k_->degree(), BigRat(0));
            c[0] = a.c_[0];
            return {NFElem(b.k_, std::move(c)), b};
        }
        if (b.k_->degree() == 1 && b.is_rational()) {
            std::vector<BigRat> c(a.k_->degree(), BigRat(0));
            c[0] = b.c_[0];
            return {a, NFElem(a.k_, std::move(c))};
        }
        throw std::invalid_argument("NFElem: elements live in different number fields");
    }

    NumberFieldPtr k_;
    std::vector<BigRat> c_;
};

}  // namespace csymp

#endif  // CSYMP_NFIELD_HPP
