#ifndef CSYMP_INTLINALG_HPP
#define CSYMP_INTLINALG_HPP

#include <algorithm>
#include <stdexcept>
#include <utility>
#include <vector>

#include "csymp/scalar.hpp"

namespace csymp {

using IVec = std::vector<BigInt>;
using IMat = std::vector<IVec>;  // row-major

inline int imat_rows(const IMat& m) { return static_cast<int>(m.size()); }
inline int imat_cols(const IMat& m) { return m.empty() ? 0 : static_cast<int>(m[0].size()); }

/// Fraction-free determinant (Bareiss).
inline BigInt det_bareiss(IMat m) {
    const int n = imat_rows(m);
    if (n == 0) return BigInt(1);
    if (imat_cols(m) != n) throw std::invalid_argument("det_bareiss: matrix not square");
    BigInt prev(1);
    int sign = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (m[k][k] == 0) {
            int sw = -1;
            for (int i = k + 1; i < n; ++i)
                if (m[i][k] != 0) { sw = i; break; }
            if (sw < 0) return BigInt(0);
            std::swap(m[k], m[sw]);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j) {
                BigInt num = m[i][j] * m[k][k] - m[i][k] * m[k][j];
                m[i][j] = num / prev;  // exact division by the Bareiss identity
            }
        prev = m[k][k];
    }
    return sign > 0 ? m[n - 1][n - 1] : -m[n - 1][n - 1];
}

/// Elementary divisors d_1 | d_2 | ... (nonnegative) of an integer matrix.
inline std::vector<BigInt> smith_elementary_divisors(IMat m) {
    const int rows = imat_rows(m), cols = imat_cols(m);
    std::vector<BigInt> divs;
    int top = 0;
    while (top < rows && top < cols) {
        // find a nonzero pivot in the lower-right block
        int pr = -1, pc = -1;
        for (int i = top; i < rows && pr < 0; ++i)
            for (int j = top; j < cols; ++j)
                if (m[i][j] != 0) { pr = i; pc = j; break; }
        if (pr < 0) break;
        std::swap(m[top], m[pr]);
        for (int i = top; i < rows; ++i) std::swap(m[i][top], m[i][pc]);

        bool clean = false;
        while (!clean) {
            clean = true;
            // clear the pivot column
            for (int i = top + 1; i < rows; ++i) {
                while (m[i][top] != 0) {
                    BigInt q = m[i][top] / m[top][top];
                    for (int j = top; j < cols; ++j) m[i][j] -= q * m[top][j];
                    if (m[i][top] != 0) {
                        std::swap(m[top], m[i]);
                        clean = false;
                    }
                }
            }
            // clear the pivot row
            for (int j = top + 1; j < cols; ++j) {
                while (m[top][j] != 0) {
                    BigInt q = m[top][j] / m[top][top];
                    for (int i = top; i < rows; ++i) m[i][j] -= q * m[i][top];
                    if (m[top][j] != 0) {
                        for (int i = top; i < rows; ++i) std::swap(m[i][top], m[i][j]);
                        clean = false;
                    }
                }
            }
        }
        // enforce divisibility: pivot must divide every remaining entry
        bool redo = false;
        for (int i = top + 1; i < rows && !redo; ++i)
            for (int j = top + 1; j < cols; ++j)
                if (m[i][j] % m[top][top] != 0) {
                    for (int jj = top; jj < cols; ++jj) m[top][jj] += m[i][jj];
                    redo = true;
                    break;
                }
        if (redo) continue;
        divs.push_back(abs(m[top][top]));
        ++top;
    }
    return divs;
}

/// Basis of {x in Z^n : A x = 0} as rows; the kernel of an integer matrix is
/// automatically saturated. Column-style Hermite reduction with a tracked
/// unimodular transform.
inline IMat integer_kernel(IMat a) {
    const int rows = imat_rows(a), cols = imat_cols(a);
    IMat u(cols, IVec(cols, BigInt(0)));
    for (int i = 0; i < cols; ++i) u[i][i] = 1;

    auto col_addmul = [&](int dst, int src, const BigInt& q) {
        for (int i = 0; i < rows; ++i) a[i][dst] -= q * a[i][src];
        for (int i = 0; i < cols; ++i) u[i][dst] -= q * u[i][src];
    };
    auto col_swap = [&](int x, int y) {
        for (int i = 0; i < rows; ++i) std::swap(a[i][x], a[i][y]);
        for (int i = 0; i < cols; ++i) std::swap(u[i][x], u[i][y]);
    };

    int lead = 0;
    for (int r = 0; r < rows && lead < cols; ++r) {
        // gcd-reduce row r across columns >= lead
        while (true) {
            int nz = -1, cnt = 0;
            for (int c = lead; c < cols; ++c)
                if (a[r][c] != 0) { ++cnt; if (nz < 0 || abs(a[r][c]) < abs(a[r][nz])) nz = c; }
            if (cnt == 0) { nz = -1; break; }
            if (cnt == 1) {
                col_swap(lead, nz);
                break;
            }
            for (int c = lead; c < cols; ++c) {
                if (c == nz || a[r][c] == 0) continue;
                BigInt q = a[r][c] / a[r][nz];
                col_addmul(c, nz, q);
            }
        }
        if (a[r][lead] != 0) ++lead;
    }

    IMat kernel;
    for (int c = lead; c < cols; ++c) {
        // column c of a is zero on all processed rows; verify fully zero
        bool zero = true;
        for (int i = 0; i < rows; ++i)
            if (a[i][c] != 0) { zero = false; break; }
        if (!zero) throw std::logic_error("integer_kernel: reduction left a nonzero trailing column");
        IVec v(cols);
        for (int i = 0; i < cols; ++i) v[i] = u[i][c];
        kernel.push_back(std::move(v));
    }
    return kernel;
}

/// Row-style Hermite normal form: pivots positive, entries above each pivot
/// reduced into [0, pivot); zero rows dropped. Canonical for a given row span.
inline IMat hermite_normal_form(IMat m) {
    const int rows = imat_rows(m), cols = imat_cols(m);
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        // gcd-combine entries of column c below row r
        while (true) {
            int best = -1;
            for (int i = r; i < rows; ++i)
                if (m[i][c] != 0 && (best < 0 || abs(m[i][c]) < abs(m[best][c]))) best = i;
            if (best < 0) break;
            std::swap(m[r], m[best]);
            bool done = true;
            for (int i = r + 1; i < rows; ++i) {
                if (m[i][c] == 0) continue;
                BigInt q = m[i][c] / m[r][c];
                for (int j = 0; j < cols; ++j) m[i][j] -= q * m[r][j];
                if (m[i][c] != 0) done = false;
            }
            if (done) break;
        }
        if (r < rows && m[r][c] != 0) {
            if (m[r][c] < 0)
                for (int j = 0; j < cols; ++j) m[r][j] = -m[r][j];
            for (int i = 0; i < r; ++i) {
                // floor division so reduced entries land in [0, pivot)
                BigInt q = m[i][c] / m[r][c];
                if (m[i][c] % m[r][c] != 0 && (m[i][c] < 0) != (m[r][c] < 0)) q -= 1;
                if (q != 0)
                    for (int j = 0; j < cols; ++j) m[i][j] -= q * m[r][j];
            }
            ++r;
        }
    }
    m.resize(r);
    return m;
}

/// Signature (positive, negative, zero inertia) of a symmetric integer
/// matrix by exact rational congruence diagonalization.
inline std::tuple<int, int, int> inertia(const IMat& gram) {
    const int n = imat_rows(gram);
    std::vector<std::vector<BigRat>> m(n, std::vector<BigRat>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m[i][j] = BigRat(gram[i][j]);

    int pos = 0, neg = 0, zero = 0;
    for (int k = 0; k < n; ++k) {
        if (m[k][k] == 0) {
            int j = -1;
            for (int c = k + 1; c < n; ++c)
                if (m[k][c] != 0) { j = c; break; }
            if (j < 0) { ++zero; continue; }
            // congruence: add row/col j into k to create a nonzero diagonal;
            // if 2 m_kj + m_jj happens to vanish the minus combination cannot.
            for (int c = k; c < n; ++c) m[k][c] += m[j][c];
            for (int r = k; r < n; ++r) m[r][k] += m[r][j];
            if (m[k][k] == 0) {
                for (int c = k; c < n; ++c) m[k][c] -= 2 * m[j][c];
                for (int r = k; r < n; ++r) m[r][k] -= 2 * m[r][j];
            }
        }
        if (m[k][k] > 0) ++pos; else ++neg;
        for (int i = k + 1; i < n; ++i) {
            if (m[i][k] == 0) continue;
            BigRat f = m[i][k] / m[k][k];
            for (int j = k; j < n; ++j) m[i][j] -= f * m[k][j];
            for (int j = k; j < n; ++j) m[j][i] -= f * m[j][k];
        }
    }
    return {pos, neg, zero};
}

inline int integer_rank(IMat m) {
    const int rows = imat_rows(m), cols = imat_cols(m);
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        while (true) {
            int best = -1;
            for (int i = r; i < rows; ++i)
                if (m[i][c] != 0 && (best < 0 || abs(m[i][c]) < abs(m[best][c]))) best = i;
            if (best < 0) break;
            std::swap(m[r], m[best]);
            bool done = true;
            for (int i = r + 1; i < rows; ++i) {
                if (m[i][c] == 0) continue;
                BigInt q = m[i][c] / m[r][c];
                for (int j = c; j < cols; ++j) m[i][j] -= q * m[r][j];
                if (m[i][c] != 0) done = false;
            }
            if (done) break;
        }
        if (r < rows && m[r][c] != 0) ++r;
    }
    return r;
}

}  // namespace csymp

#endif  // CSYMP_INTLINALG_HPP
