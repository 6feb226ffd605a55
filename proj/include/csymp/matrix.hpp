#ifndef CSYMP_MATRIX_HPP
#define CSYMP_MATRIX_HPP

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "csymp/scalar.hpp"

namespace csymp {

/// Field element access used by the elimination routines. Float-like fields
/// pivot on magnitude with a relative threshold; exact fields pivot on the
/// first nonzero entry and never discard.
template <class E>
struct FieldTraits;

template <>
struct FieldTraits<double> {
    static constexpr bool exact = false;
    static double zero() { return 0.0; }
    static double one() { return 1.0; }
    static bool is_zero(double x) { return x == 0.0; }
    static double magnitude(double x) { return std::abs(x); }
};

template <>
struct FieldTraits<std::complex<double>> {
    static constexpr bool exact = false;
    static std::complex<double> zero() { return {0.0, 0.0}; }
    static std::complex<double> one() { return {1.0, 0.0}; }
    static bool is_zero(std::complex<double> x) { return x == std::complex<double>{}; }
    static double magnitude(std::complex<double> x) { return std::abs(x); }
};

template <>
struct FieldTraits<BigRat> {
    static constexpr bool exact = true;
    static BigRat zero() { return BigRat(0); }
    static BigRat one() { return BigRat(1); }
    static bool is_zero(const BigRat& x) { return x == 0; }
    static double magnitude(const BigRat& x) { return std::abs(to_double(x)); }
};

template <>
struct FieldTraits<GaussianRational> {
    static constexpr bool exact = true;
    static GaussianRational zero() { return {}; }
    static GaussianRational one() { return GaussianRational(1); }
    static bool is_zero(const GaussianRational& x) { return x.is_zero(); }
    static double magnitude(const GaussianRational& x) { return std::abs(x.to_complex_double()); }
};

template <class E>
class Mat {
 public:
    Mat() = default;
    Mat(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, FieldTraits<E>::zero()) {}

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = FieldTraits<E>::one();
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    E& at(int r, int c) { return a_[static_cast<size_t>(r) * cols_ + c]; }
    const E& at(int r, int c) const { return a_[static_cast<size_t>(r) * cols_ + c]; }

    Mat transposed() const {
        Mat t(cols_, rows_);
        for (int r = 0; r < rows_; ++r)
            for (int c = 0; c < cols_; ++c) t.at(c, r) = at(r, c);
        return t;
    }

    friend Mat operator*(const Mat& x, const Mat& y) {
        if (x.cols_ != y.rows_) throw std::invalid_argument("Mat: dimension mismatch in product");
        Mat z(x.rows_, y.cols_);
        for (int i = 0; i < x.rows_; ++i)
            for (int k = 0; k < x.cols_; ++k) {
                const E& v = x.at(i, k);
                if (FieldTraits<E>::is_zero(v)) continue;
                for (int j = 0; j < y.cols_; ++j) z.at(i, j) = z.at(i, j) + v * y.at(k, j);
            }
        return z;
    }

    friend Mat operator+(const Mat& x, const Mat& y) {
        Mat z(x.rows_, x.cols_);
        for (size_t i = 0; i < x.a_.size(); ++i) z.a_[i] = x.a_[i] + y.a_[i];
        return z;
    }
    friend Mat operator-(const Mat& x, const Mat& y) {
        Mat z(x.rows_, x.cols_);
        for (size_t i = 0; i < x.a_.size(); ++i) z.a_[i] = x.a_[i] - y.a_[i];
        return z;
    }

    std::vector<E> apply(const std::vector<E>& v) const {
        if (static_cast<int>(v.size()) != cols_) throw std::invalid_argument("Mat::apply: size mismatch");
        std::vector<E> out(rows_, FieldTraits<E>::zero());
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) out[i] = out[i] + at(i, j) * v[j];
        return out;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& v : a_) m = std::max(m, FieldTraits<E>::magnitude(v));
        return m;
    }

 private:
    int rows_ = 0, cols_ = 0;
    std::vector<E> a_;
};

namespace detail {

/// Forward elimination with row pivoting. Returns the pivot (row, col) list.
/// `tol` is an absolute threshold below which float pivots count as zero;
/// ignored for exact fields.
template <class E>
std::vector<std::pair<int, int>> echelonize(Mat<E>& m, double tol) {
    std::vector<std::pair<int, int>> pivots;
    int r = 0;
    for (int c = 0; c < m.cols() && r < m.rows(); ++c) {
        int best = -1;
        if constexpr (FieldTraits<E>::exact) {
            for (int i = r; i < m.rows(); ++i)
                if (!FieldTraits<E>::is_zero(m.at(i, c))) { best = i; break; }
        } else {
            double bm = tol;
            for (int i = r; i < m.rows(); ++i) {
                double v = FieldTraits<E>::magnitude(m.at(i, c));
                if (v > bm) { bm = v; best = i; }
            }
        }
        if (best < 0) continue;
        if (best != r)
            for (int j = 0; j < m.cols(); ++j) std::swap(m.at(r, j), m.at(best, j));
        for (int i = r + 1; i < m.rows(); ++i) {
            if (FieldTraits<E>::is_zero(m.at(i, c))) continue;
            E f = m.at(i, c) / m.at(r, c);
            m.at(i, c) = FieldTraits<E>::zero();
            for (int j = c + 1; j < m.cols(); ++j) m.at(i, j) = m.at(i, j) - f * m.at(r, j);
        }
        pivots.emplace_back(r, c);
        ++r;
    }
    return pivots;
}

}  // namespace detail

/// Rank with the scale-invariant pivot rule: threshold = rel_tol * max entry.
template <class E>
int rank(Mat<E> m, double rel_tol = 1e-10) {
    double tol = FieldTraits<E>::exact ? 0.0 : rel_tol * m.max_abs();
    return static_cast<int>(detail::echelonize(m, tol).size());
}

/// Basis of {v : M v = 0}. Deterministic: free columns in increasing order,
/// each contributing one basis vector with unit entry at the free column.
template <class E>
std::vector<std::vector<E>> null_space(Mat<E> m, double rel_tol = 1e-10) {
    const int n = m.cols();
    double tol = FieldTraits<E>::exact ? 0.0 : rel_tol * m.max_abs();
    auto pivots = detail::echelonize(m, tol);

    std::vector<int> pivot_col_of_row(pivots.size());
    std::vector<bool> is_pivot_col(n, false);
    for (size_t k = 0; k < pivots.size(); ++k) {
        pivot_col_of_row[k] = pivots[k].second;
        is_pivot_col[pivots[k].second] = true;
    }

    std::vector<std::vector<E>> basis;
    for (int fc = 0; fc < n; ++fc) {
        if (is_pivot_col[fc]) continue;
        std::vector<E> v(n, FieldTraits<E>::zero());
        v[fc] = FieldTraits<E>::one();
        // Back-substitute through pivot rows above.
        for (int k = static_cast<int>(pivots.size()) - 1; k >= 0; --k) {
            auto [pr, pc] = pivots[k];
            if (pc > fc) continue;
            E s = FieldTraits<E>::zero();
            for (int j = pc + 1; j < n; ++j) s = s + m.at(pr, j) * v[j];
            v[pc] = (FieldTraits<E>::zero() - s) / m.at(pr, pc);
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

template <class E>
struct LinearSolveResult {
    std::vector<E> x;
    double residual = 0.0;  // max |Ax - b| over all equations
};

/// Solves a consistent (possibly overdetermined) system A x = b by
/// elimination on the augmented matrix; the residual over all equations is
/// reported so callers can detect inconsistent input.
template <class E>
LinearSolveResult<E> solve_consistent(const Mat<E>& a, const std::vector<E>& b) {
    if (static_cast<int>(b.size()) != a.rows())
        throw std::invalid_argument("solve_consistent: rhs size mismatch");
    const int n = a.cols();
    Mat<E> aug(a.rows(), n + 1);
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < n; ++j) aug.at(i, j) = a.at(i, j);
        aug.at(i, n) = b[i];
    }
    double tol = FieldTraits<E>::exact ? 0.0 : 1e-13 * std::max(1.0, aug.max_abs());
    // Restrict pivoting to the coefficient columns.
    std::vector<std::pair<int, int>> pivots;
    {
        int r = 0;
        for (int c = 0; c < n && r < aug.rows(); ++c) {
            int best = -1;
            if constexpr (FieldTraits<E>::exact) {
                for (int i = r; i < aug.rows(); ++i)
                    if (!FieldTraits<E>::is_zero(aug.at(i, c))) { best = i; break; }
            } else {
                double bm = tol;
                for (int i = r; i < aug.rows(); ++i) {
                    double v = FieldTraits<E>::magnitude(aug.at(i, c));
                    if (v > bm) { bm = v; best = i; }
                }
            }
            if (best < 0) continue;
            if (best != r)
                for (int j = 0; j <= n; ++j) std::swap(aug.at(r, j), aug.at(best, j));
            for (int i = r + 1; i < aug.rows(); ++i) {
                if (FieldTraits<E>::is_zero(aug.at(i, c))) continue;
                E f = aug.at(i, c) / aug.at(r, c);
                aug.at(i, c) = FieldTraits<E>::zero();
                for (int j = c + 1; j <= n; ++j) aug.at(i, j) = aug.at(i, j) - f * aug.at(r, j);
            }
            pivots.emplace_back(r, c);
            ++r;
        }
    }
    if (static_cast<int>(pivots.size()) < n)
        throw std::domain_error("solve_consistent: coefficient matrix is rank-deficient");

    std::vector<E> x(n, FieldTraits<E>::zero());
    for (int k = n - 1; k >= 0; --k) {
        auto [pr, pc] = pivots[k];
        E s = aug.at(pr, n);
        for (int j = pc + 1; j < n; ++j) s = s - aug.at(pr, j) * x[j];
        x[pc] = s / aug.at(pr, pc);
    }

    LinearSolveResult<E> res;
    res.x = std::move(x);
    for (int i = 0; i < a.rows(); ++i) {
        E s = FieldTraits<E>::zero();
        for (int j = 0; j < n; ++j) s = s + a.at(i, j) * res.x[j];
        res.residual = std::max(res.residual, FieldTraits<E>::magnitude(s - b[i]));
    }
    return res;
}

template <class E>
struct MultiSolveResult {
    Mat<E> x;
    double residual = 0.0;
};

/// Solves A X = B column-by-column with a single elimination of the shared
/// coefficient matrix; A may be overdetermined but must be consistent.
template <class E>
MultiSolveResult<E> solve_consistent_multi(const Mat<E>& a, const Mat<E>& b) {
    if (b.rows() != a.rows()) throw std::invalid_argument("solve_consistent_multi: rhs rows mismatch");
    const int n = a.cols(), r = b.cols();
    Mat<E> aug(a.rows(), n + r);
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < n; ++j) aug.at(i, j) = a.at(i, j);
        for (int j = 0; j < r; ++j) aug.at(i, n + j) = b.at(i, j);
    }
    double tol = FieldTraits<E>::exact ? 0.0 : 1e-13 * std::max(1.0, aug.max_abs());
    std::vector<std::pair<int, int>> pivots;
    {
        int row = 0;
        for (int c = 0; c < n && row < aug.rows(); ++c) {
            int best = -1;
            if constexpr (FieldTraits<E>::exact) {
                for (int i = row; i < aug.rows(); ++i)
                    if (!FieldTraits<E>::is_zero(aug.at(i, c))) { best = i; break; }
            } else {
                double bm = tol;
                for (int i = row; i < aug.rows(); ++i) {
                    double v = FieldTraits<E>::magnitude(aug.at(i, c));
                    if (v > bm) { bm = v; best = i; }
                }
            }
            if (best < 0) continue;
            if (best != row)
                for (int j = 0; j < n + r; ++j) std::swap(aug.at(row, j), aug.at(best, j));
            for (int i = row + 1; i < aug.rows(); ++i) {
                if (FieldTraits<E>::is_zero(aug.at(i, c))) continue;
                E f = aug.at(i, c) / aug.at(row, c);
                aug.at(i, c) = FieldTraits<E>::zero();
                for (int j = c + 1; j < n + r; ++j) aug.at(i, j) = aug.at(i, j) - f * aug.at(row, j);
            }
            pivots.emplace_back(row, c);
            ++row;
        }
    }
    if (static_cast<int>(pivots.size()) < n)
        throw std::domain_error("solve_consistent_multi: coefficient matrix is rank-deficient");

    MultiSolveResult<E> out;
    out.x = Mat<E>(n, r);
    for (int col = 0; col < r; ++col) {
        for (int k = n - 1; k >= 0; --k) {
            auto [pr, pc] = pivots[k];
            E s = aug.at(pr, n + col);
            for (int j = pc + 1; j < n; ++j) s = s - aug.at(pr, j) * out.x.at(j, col);
            out.x.at(pc, col) = s / aug.at(pr, pc);
        }
    }
    for (int i = 0; i < a.rows(); ++i)
        for (int col = 0; col < r; ++col) {
            E s = FieldTraits<E>::zero();
            for (int j = 0; j < n; ++j) s = s + a.at(i, j) * out.x.at(j, col);
            out.residual = std::max(out.residual, FieldTraits<E>::magnitude(s - b.at(i, col)));
        }
    return out;
}

template <class E>
std::optional<Mat<E>> inverse(Mat<E> m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("inverse: matrix not square");
    const int n = m.rows();
    Mat<E> inv = Mat<E>::identity(n);
    double tol = FieldTraits<E>::exact ? 0.0 : 1e-13 * std::max(1.0, m.max_abs());
    for (int c = 0; c < n; ++c) {
        int best = -1;
        if constexpr (FieldTraits<E>::exact) {
            for (int i = c; i < n; ++i)
                if (!FieldTraits<E>::is_zero(m.at(i, c))) { best = i; break; }
        } else {
            double bm = tol;
            for (int i = c; i < n; ++i) {
                double v = FieldTraits<E>::magnitude(m.at(i, c));
                if (v > bm) { bm = v; best = i; }
            }
        }
        if (best < 0) return std::nullopt;
        if (best != c)
            for (int j = 0; j < n; ++j) {
                std::swap(m.at(c, j), m.at(best, j));
                std::swap(inv.at(c, j), inv.at(best, j));
            }
        E p = m.at(c, c);
        for (int j = 0; j < n; ++j) {
            m.at(c, j) = m.at(c, j) / p;
            inv.at(c, j) = inv.at(c, j) / p;
        }
        for (int i = 0; i < n; ++i) {
            if (i == c || FieldTraits<E>::is_zero(m.at(i, c))) continue;
            E f = m.at(i, c);
            for (int j = 0; j < n; ++j) {
                m.at(i, j) = m.at(i, j) - f * m.at(c, j);
                inv.at(i, j) = inv.at(i, j) - f * inv.at(c, j);
            }
        }
    }
    return inv;
}

/// log|det| via LU; float fields only (used for flow Jacobian diagnostics).
inline double log_abs_det(Mat<double> m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("log_abs_det: matrix not square");
    const int n = m.rows();
    double acc = 0.0;
    for (int c = 0; c < n; ++c) {
        int best = c;
        for (int i = c + 1; i < n; ++i)
            if (std::abs(m.at(i, c)) > std::abs(m.at(best, c))) best = i;
        if (m.at(best, c) == 0.0) return -std::numeric_limits<double>::infinity();
        if (best != c)
            for (int j = 0; j < n; ++j) std::swap(m.at(c, j), m.at(best, j));
        acc += std::log(std::abs(m.at(c, c)));
        for (int i = c + 1; i < n; ++i) {
            double f = m.at(i, c) / m.at(c, c);
            for (int j = c; j < n; ++j) m.at(i, j) -= f * m.at(c, j);
        }
    }
    return acc;
}

}  // namespace csymp

#endif  // CSYMP_MATRIX_HPP
