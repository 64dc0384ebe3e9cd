#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "kalspan/scalar.hpp"

namespace kalspan {

/// Dense row-major matrix of exact scalars (rationals, or elements of one Q(sqrt(n))).
using Matrix = std::vector<std::vector<Scalar>>;

inline std::size_t columnCount(const Matrix& m) { return m.empty() ? 0 : m.front().size(); }

/// Pads ragged rows with zeros to a common width.
inline Matrix rectangular(Matrix m, std::size_t cols) {
    for (auto& row : m) row.resize(cols);
    return m;
}

inline void requireExact(const Matrix& m) {
    for (const auto& row : m) {
        for (const Scalar& s : row) {
            if (!s.isExact()) throw InexactEntries("exact linear algebra got an interval constant");
        }
    }
}

inline Matrix transpose(const Matrix& m) {
    Matrix t(columnCount(m), std::vector<Scalar>(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = 0; j < m[i].size(); ++j) t[j][i] = m[i][j];
    }
    return t;
}

/// Reduced row echelon form. Row `k` of `reduced` (k < rank) descends from original row
/// `rowOrigin[k]`; the rows rowOrigin[0..rank) are independent.
struct Echelon {
    Matrix reduced;
    std::vector<std::size_t> pivotCols;
    std::vector<std::size_t> rowOrigin;

    std::size_t rank() const { return pivotCols.size(); }
};

/// Gauss-Jordan elimination over the field. The pivot in each column is the first remaining
/// row with a nonzero entry, which keeps the result deterministic.
inline Echelon echelon(Matrix m) {
    requireExact(m);
    Echelon e;
    const std::size_t rows = m.size();
    const std::size_t cols = columnCount(m);
    e.rowOrigin.resize(rows);
    for (std::size_t i = 0; i < rows; ++i) e.rowOrigin[i] = i;

    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && m[p][c].isZero()) ++p;
        if (p == rows) continue;
        std::swap(m[p], m[r]);
        std::swap(e.rowOrigin[p], e.rowOrigin[r]);
        const Scalar inv = Scalar(1) / m[r][c];
        for (std::size_t j = c; j < cols; ++j) m[r][j] = m[r][j] * inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || m[i][c].isZero()) continue;
            const Scalar f = m[i][c];
            for (std::size_t j = c; j < cols; ++j) m[i][j] = m[i][j] - f * m[r][j];
        }
        e.pivotCols.push_back(c);
        ++r;
    }
    e.reduced = std::move(m);
    return e;
}

inline Scalar determinant(Matrix m) {
    requireExact(m);
    const std::size_t n = m.size();
    if (columnCount(m) != n) throw PreconditionViolation("determinant of a non-square matrix");
    Scalar det(1);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && m[p][c].isZero()) ++p;
        if (p == n) return Scalar();
        if (p != c) {
            std::swap(m[p], m[c]);
            det = -det;
        }
        det = det * m[c][c];
        const Scalar inv = Scalar(1) / m[c][c];
        for (std::size_t i = c + 1; i < n; ++i) {
            if (m[i][c].isZero()) continue;
            const Scalar f = m[i][c] * inv;
            for (std::size_t j = c; j < n; ++j) m[i][j] = m[i][j] - f * m[c][j];
        }
    }
    return det;
}

/// Some solution of A x = b with every free variable set to zero, or nullopt when inconsistent.
inline std::optional<std::vector<Scalar>> solve(const Matrix& a, const std::vector<Scalar>& b) {
    if (a.size() != b.size()) throw PreconditionViolation("solve: row count mismatch");
    const std::size_t n = columnCount(a);
    Matrix aug = a;
    for (std::size_t i = 0; i < aug.size(); ++i) {
        aug[i].resize(n);
        aug[i].push_back(b[i]);
    }
    const Echelon e = echelon(std::move(aug));
    std::vector<Scalar> x(n);
    for (std::size_t k = 0; k < e.rank(); ++k) {
        if (e.pivotCols[k] == n) return std::nullopt;
        x[e.pivotCols[k]] = e.reduced[k][n];
    }
    return x;
}

/// Basis of {x : A x = 0}, one vector per free column (that column set to 1).
inline std::vector<std::vector<Scalar>> nullspace(const Matrix& a, std::size_t cols) {
    const Echelon e = echelon(a);
    std::vector<bool> isPivot(cols, false);
    for (std::size_t c : e.pivotCols) isPivot[c] = true;
    std::vector<std::vector<Scalar>> basis;
    for (std::size_t f = 0; f < cols; ++f) {
        if (isPivot[f]) continue;
        std::vector<Scalar> v(cols);
        v[f] = Scalar(1);
        for (std::size_t k = 0; k < e.rank(); ++k) v[e.pivotCols[k]] = -e.reduced[k][f];
        basis.push_back(std::move(v));
    }
    return basis;
}

inline std::optional<Matrix> inverse(const Matrix& m) {
    const std::size_t n = m.size();
    if (columnCount(m) != n) throw PreconditionViolation("inverse of a non-square matrix");
    if (n == 0) return Matrix{};
    Matrix aug = m;
    for (std::size_t i = 0; i < n; ++i) {
        aug[i].resize(2 * n);
        aug[i][n + i] = Scalar(1);
    }
    const Echelon e = echelon(std::move(aug));
    if (e.rank() < n || e.pivotCols[n - 1] >= n) return std::nullopt;
    Matrix inv(n, std::vector<Scalar>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) inv[i][j] = e.reduced[i][n + j];
    }
    return inv;
}

inline Scalar dot(const std::vector<Scalar>& x, const std::vector<Scalar>& y) {
    Scalar s;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (!x[i].isZero() && !y[i].isZero()) s = s + x[i] * y[i];
    }
    return s;
}

}  // namespace kalspan
