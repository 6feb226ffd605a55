#ifndef CSYMP_SCALAR_HPP
#define CSYMP_SCALAR_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <complex>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace csymp {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

inline double to_double(const BigRat& r) {
    return static_cast<double>(r);
}

/// Exact conversion: every finite double is a dyadic rational.
inline BigRat rat_from_double(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("rat_from_double: non-finite value");
    return BigRat(x);
}

/// Parses "p/q", "p", or a decimal literal into an exact rational.
inline BigRat rat_from_string(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) {
        if (s.find('.') != std::string::npos || s.find('e') != std::string::npos ||
            s.find('E') != std::string::npos)
            return rat_from_double(std::stod(s));
        return BigRat(BigInt(s));
    }
    BigInt num(s.substr(0, slash));
    BigInt den(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("rat_from_string: zero denominator in " + s);
    return BigRat(num, den);
}

inline std::string rat_to_string(const BigRat& r) {
    std::ostringstream os;
    os << numerator(r);
    if (denominator(r) != 1) os << "/" << denominator(r);
    return os.str();
}

/// Complex number with exact rational real and imaginary parts.
/// All coefficients appearing in the algebraic identity tests (powers of the
/// symplectic form, type decompositions, lattice pairings) live here.
class GaussianRational {
 public:
    GaussianRational() = default;
    GaussianRational(int v) : re_(v) {}            // NOLINT: implicit by design
    GaussianRational(BigRat re) : re_(std::move(re)) {}
    GaussianRational(BigRat re, BigRat im) : re_(std::move(re)), im_(std::move(im)) {}

    static GaussianRational from_complex_double(std::complex<double> z) {
        return {rat_from_double(z.real()), rat_from_double(z.imag())};
    }
    static GaussianRational i() { return {BigRat(0), BigRat(1)}; }

    const BigRat& real() const { return re_; }
    const BigRat& imag() const { return im_; }

    bool is_zero() const { return re_ == 0 && im_ == 0; }
    bool is_real() const { return im_ == 0; }

    GaussianRational conj() const { return {re_, -im_}; }

    std::complex<double> to_complex_double() const {
        return {to_double(re_), to_double(im_)};
    }

    friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b) {
        return {a.re_ + b.re_, a.im_ + b.im_};
    }
    friend GaussianRational operator-(const GaussianRational& a, const GaussianRational& b) {
        return {a.re_ - b.re_, a.im_ - b.im_};
    }
    friend GaussianRational operator-(const GaussianRational& a) { return {-a.re_, -a.im_}; }
    friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
        return {a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_};
    }
    friend GaussianRational operator/(const GaussianRational& a, const GaussianRational& b) {
        BigRat n = b.re_ * b.re_ + b.im_ * b.im_;
        if (n == 0) throw std::domain_error("GaussianRational: division by zero");
        return {(a.re_ * b.re_ + a.im_ * b.im_) / n, (a.im_ * b.re_ - a.re_ * b.im_) / n};
    }
    GaussianRational& operator+=(const GaussianRational& b) { return *this = *this + b; }
    GaussianRational& operator-=(const GaussianRational& b) { return *this = *this - b; }
    GaussianRational& operator*=(const GaussianRational& b) { return *this = *this * b; }

    friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend bool operator!=(const GaussianRational& a, const GaussianRational& b) {
        return !(a == b);
    }

    std::string to_string() const {
        return rat_to_string(re_) + (im_ >= 0 ? "+" : "") + rat_to_string(im_) + "i";
    }

 private:
    BigRat re_{0};
    BigRat im_{0};
};

/// Uniform access to the two scalar backends: float64 complex numbers for
/// flows and sweeps, Gaussian rationals for exact identity checks.
template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<std::complex<double>> {
    using Scalar = std::complex<double>;
    using Real = double;
    static constexpr bool exact = false;

    static Scalar zero() { return {0.0, 0.0}; }
    static Scalar one() { return {1.0, 0.0}; }
    static Scalar imaginary_unit() { return {0.0, 1.0}; }
    static Scalar from_int(long v) { return {static_cast<double>(v), 0.0}; }
    static Scalar from_real(Real r) { return {r, 0.0}; }
    static Scalar from_parts(Real re, Real im) { return {re, im}; }
    static Scalar conjugate(Scalar z) { return std::conj(z); }
    static bool is_zero(Scalar z) { return z == Scalar{0.0, 0.0}; }
    static double abs_value(Scalar z) { return std::abs(z); }
    static Real real_part(Scalar z) { return z.real(); }
    static Real imag_part(Scalar z) { return z.imag(); }
    static std::complex<double> to_complex_double(Scalar z) { return z; }

    static Real real_zero() { return 0.0; }
    static Real real_one() { return 1.0; }
    static bool real_is_zero(Real r) { return r == 0.0; }
    static double real_abs(Real r) { return std::abs(r); }
    static double real_to_double(Real r) { return r; }
};

template <>
struct ScalarTraits<GaussianRational> {
    using Scalar = GaussianRational;
    using Real = BigRat;
    static constexpr bool exact = true;

    static Scalar zero() { return {}; }
    static Scalar one() { return {BigRat(1)}; }
    static Scalar imaginary_unit() { return GaussianRational::i(); }
    static Scalar from_int(long v) { return {BigRat(v)}; }
    static Scalar from_real(Real r) { return {std::move(r)}; }
    static Scalar from_parts(Real re, Real im) { return {std::move(re), std::move(im)}; }
    static Scalar conjugate(const Scalar& z) { return z.conj(); }
    static bool is_zero(const Scalar& z) { return z.is_zero(); }
    static double abs_value(const Scalar& z) { return std::abs(z.to_complex_double()); }
    static Real real_part(const Scalar& z) { return z.real(); }
    static Real imag_part(const Scalar& z) { return z.imag(); }
    static std::complex<double> to_complex_double(const Scalar& z) { return z.to_complex_double(); }

    static Real real_zero() { return BigRat(0); }
    static Real real_one() { return BigRat(1); }
    static bool real_is_zero(const Real& r) { return r == 0; }
    static double real_abs(const Real& r) { return std::abs(to_double(r)); }
    static double real_to_double(const Real& r) { return to_double(r); }
};

using ComplexD = std::complex<double>;

/// Evaluation point: list of real coordinate values in the backend's real type.
template <class S>
using RealPoint = std::vector<typename ScalarTraits<S>::Real>;

}  // namespace csymp

#endif  // CSYMP_SCALAR_HPP
