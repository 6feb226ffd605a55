#ifndef CSYMP_SAMPLING_HPP
#define CSYMP_SAMPLING_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "csymp/scalar.hpp"

namespace csymp {

/// Deterministic sample-point source. The generator is std::mt19937_64 (its
/// output sequence is fixed by the standard) and doubles are derived by the
/// explicit 53-bit construction, so identical seeds give identical points on
/// every platform.
class SampleRng {
 public:
    explicit SampleRng(std::uint64_t seed) : g_(seed) {}

    std::uint64_t next_u64() { return g_(); }

    double uniform01() { return static_cast<double>(g_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(g_() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    /// Point in the complex polydisc |z_j| < r, interleaved real coordinates.
    std::vector<double> polydisc_point(int n, double r) {
        std::vector<double> p(2 * n);
        for (int j = 0; j < n; ++j) {
            double x, y;
            do {
                x = uniform(-r, r);
                y = uniform(-r, r);
            } while (x * x + y * y >= r * r);
            p[2 * j] = x;
            p[2 * j + 1] = y;
        }
        return p;
    }

    /// Total-space point: base in the polydisc, fiber coordinates in [0,1)^2n
    /// (a fundamental square of the covering coordinates).
    std::vector<double> total_point(int n, double base_r) {
        std::vector<double> p = polydisc_point(n, base_r);
        p.resize(4 * n);
        for (int j = 0; j < 2 * n; ++j) p[2 * n + j] = uniform01();
        return p;
    }

    /// Small rational with |value| <= max_num/1 and denominator <= max_den.
    BigRat small_rational(int max_num = 4, int max_den = 5) {
        int num = uniform_int(-max_num, max_num);
        int den = uniform_int(1, max_den);
        return BigRat(num, den);
    }

    /// Rational point in the polydisc of radius r (componentwise rejection).
    std::vector<BigRat> rational_polydisc_point(int n, const BigRat& r) {
        std::vector<BigRat> p(2 * n);
        BigRat r2 = r * r;
        for (int j = 0; j < n; ++j) {
            BigRat x, y;
            do {
                x = small_rational() * r / 5;
                y = small_rational() * r / 5;
            } while (x * x + y * y >= r2);
            p[2 * j] = x;
            p[2 * j + 1] = y;
        }
        return p;
    }

    std::vector<BigRat> rational_total_point(int n, const BigRat& base_r) {
        std::vector<BigRat> p = rational_polydisc_point(n, base_r);
        p.resize(4 * n, BigRat(0));
        for (int j = 0; j < 2 * n; ++j) {
            p[2 * n + j] = BigRat(uniform_int(0, 7), 8);
        }
        return p;
    }

 private:
    std::mt19937_64 g_;
};

}  // namespace csymp

#endif  // CSYMP_SAMPLING_HPP
