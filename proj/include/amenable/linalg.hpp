#pragma once

// Small dense linear algebra: row-major matrices, Gauss-Jordan inversion,
// cyclic Jacobi eigenvalues, rank-revealing bases, deterministic summation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "amenable/config.hpp"

namespace amenable {

using Vector = std::vector<double>;

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_) throw InputError("matrix data size does not match shape");
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static Matrix from_rows(const std::vector<Vector>& rows) {
        const std::size_t r = rows.size();
        const std::size_t c = r == 0 ? 0 : rows.front().size();
        Matrix m(r, c);
        for (std::size_t i = 0; i < r; ++i) {
            if (rows[i].size() != c) throw InputError("ragged matrix rows");
            std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    Vector column(std::size_t j) const {
        Vector c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// ---- vector helpers -------------------------------------------------------

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

inline Vector add(std::span<const double> a, std::span<const double> b) {
    Vector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vector sub(std::span<const double> a, std::span<const double> b) {
    Vector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vector scale(std::span<const double> a, double s) {
    Vector r(a.begin(), a.end());
    for (double& v : r) v *= s;
    return r;
}

/// Entrywise division; exact means of repeated values stay exact.
inline Vector divide(std::span<const double> a, double s) {
    Vector r(a.begin(), a.end());
    for (double& v : r) v /= s;
    return r;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return max_abs_diff(a.data(), b.data()); }

// ---- matrix products ------------------------------------------------------

inline Vector matvec(const Matrix& m, std::span<const double> x) {
    if (m.cols() != x.size()) throw InputError("matvec: dimension mismatch");
    Vector y(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) y[i] = dot(m.row(i), x);
    return y;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw InputError("matmul: dimension mismatch");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

inline Matrix matadd(const Matrix& a, const Matrix& b) {
    return Matrix(a.rows(), a.cols(), add(a.data(), b.data()));
}

inline Matrix matsub(const Matrix& a, const Matrix& b) {
    return Matrix(a.rows(), a.cols(), sub(a.data(), b.data()));
}

inline Matrix matscale(const Matrix& a, double s) { return Matrix(a.rows(), a.cols(), scale(a.data(), s)); }

/// Gauss-Jordan inverse with partial pivoting. Throws NumericError when singular.
inline Matrix inverse(const Matrix& m, double pivot_tol = 1e-12) {
    if (!m.square()) throw InputError("inverse: matrix is not square");
    const std::size_t n = m.rows();
    Matrix a = m;
    Matrix inv = Matrix::identity(n);
    double scale_ref = std::max(1.0, norm_inf(m.data()));
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a(r, c)) > std::abs(a(p, c))) p = r;
        if (std::abs(a(p, c)) <= pivot_tol * scale_ref) throw NumericError("inverse: singular matrix");
        if (p != c) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a(p, j), a(c, j));
                std::swap(inv(p, j), inv(c, j));
            }
        }
        const double d = a(c, c);
        for (std::size_t j = 0; j < n; ++j) {
            a(c, j) /= d;
            inv(c, j) /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = a(r, c);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                a(r, j) -= f * a(c, j);
                inv(r, j) -= f * inv(c, j);
            }
        }
    }
    return inv;
}

/// Integer power by repeated squaring; negative exponents use the inverse.
inline Matrix matpow(const Matrix& m, long long e) {
    Matrix base = e < 0 ? inverse(m) : m;
    unsigned long long k = e < 0 ? static_cast<unsigned long long>(-e) : static_cast<unsigned long long>(e);
    Matrix result = Matrix::identity(m.rows());
    while (k > 0) {
        if (k & 1ULL) result = matmul(result, base);
        k >>= 1ULL;
        if (k > 0) base = matmul(base, base);
    }
    return result;
}

inline bool is_symmetric(const Matrix& m, double tol = 0.0) {
    if (!m.square()) return false;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i + 1; j < m.cols(); ++j)
            if (std::abs(m(i, j) - m(j, i)) > tol) return false;
    return true;
}

// ---- eigenvalues ----------------------------------------------------------

struct EigenDecomposition {
    Vector values;   // ascending
    Matrix vectors;  // column k is the eigenvector for values[k]
};

/// Cyclic Jacobi rotations on a symmetric matrix until the off-diagonal mass
/// drops below `off_tol` (relative to the Frobenius norm).
inline EigenDecomposition jacobi_eigen(const Matrix& sym, double off_tol = 1e-12, int max_sweeps = 100) {
    if (!sym.square()) throw InputError("jacobi_eigen: matrix is not square");
    const std::size_t n = sym.rows();
    Matrix a = sym;
    Matrix v = Matrix::identity(n);
    double frob = 0.0;
    for (double x : a.data()) frob += x * x;
    frob = std::sqrt(frob);
    const double target = off_tol * std::max(frob, 1e-300);

    auto off_mass = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    for (int sweep = 0; sweep < max_sweeps && off_mass() > target; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    if (off_mass() > target * 10.0) throw NumericError("jacobi_eigen: no convergence");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
    EigenDecomposition out{Vector(n), Matrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

inline double min_eigenvalue(const Matrix& sym) {
    if (sym.rows() == 0) return 0.0;
    return jacobi_eigen(sym).values.front();
}

// ---- subspaces ------------------------------------------------------------

/// Orthonormal basis of the column space, by modified Gram-Schmidt with
/// column pivoting. Columns whose residual norm is <= tol are dropped.
inline std::vector<Vector> orthonormal_range(const Matrix& m, double tol = 1e-9) {
    std::vector<Vector> cols;
    for (std::size_t j = 0; j < m.cols(); ++j) cols.push_back(m.column(j));
    std::vector<Vector> basis;
    std::vector<bool> used(cols.size(), false);
    while (true) {
        std::size_t best = cols.size();
        double best_norm = tol;
        for (std::size_t j = 0; j < cols.size(); ++j) {
            if (used[j]) continue;
            const double nj = norm2(cols[j]);
            if (nj > best_norm) {
                best_norm = nj;
                best = j;
            }
        }
        if (best == cols.size()) break;
        used[best] = true;
        Vector q = scale(cols[best], 1.0 / best_norm);
        // Re-orthogonalise once against the accepted basis.
        for (const auto& b : basis) {
            const double c = dot(q, b);
            for (std::size_t i = 0; i < q.size(); ++i) q[i] -= c * b[i];
        }
        q = scale(q, 1.0 / norm2(q));
        for (std::size_t j = 0; j < cols.size(); ++j) {
            if (used[j]) continue;
            const double c = dot(cols[j], q);
            for (std::size_t i = 0; i < q.size(); ++i) cols[j][i] -= c * q[i];
        }
        basis.push_back(std::move(q));
    }
    return basis;
}

/// Basis of {x : A x = 0} from reduced row echelon form with pivot tolerance.
/// Each basis vector has a unit entry at one free column.
inline std::vector<Vector> nullspace(const Matrix& m, double pivot_tol = 1e-10) {
    Matrix a = m;
    const std::size_t rows = a.rows();
    const std::size_t cols = a.cols();
    std::vector<std::size_t> pivot_cols;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        for (std::size_t i = r + 1; i < rows; ++i)
            if (std::abs(a(i, c)) > std::abs(a(p, c))) p = i;
        if (std::abs(a(p, c)) <= pivot_tol) {
            for (std::size_t i = r; i < rows; ++i) a(i, c) = 0.0;
            continue;
        }
        if (p != r)
            for (std::size_t j = 0; j < cols; ++j) std::swap(a(p, j), a(r, j));
        const double d = a(r, c);
        for (std::size_t j = 0; j < cols; ++j) a(r, j) /= d;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r) continue;
            const double f = a(i, c);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < cols; ++j) a(i, j) -= f * a(r, j);
        }
        pivot_cols.push_back(c);
        ++r;
    }
    std::vector<bool> is_pivot(cols, false);
    for (auto c : pivot_cols) is_pivot[c] = true;
    std::vector<Vector> basis;
    for (std::size_t free = 0; free < cols; ++free) {
        if (is_pivot[free]) continue;
        Vector v(cols, 0.0);
        v[free] = 1.0;
        for (std::size_t k = 0; k < pivot_cols.size(); ++k) v[pivot_cols[k]] = -a(k, free);
        basis.push_back(std::move(v));
    }
    return basis;
}

inline std::size_t rank(const Matrix& m, double pivot_tol = 1e-10) {
    return m.cols() - nullspace(m, pivot_tol).size();
}

/// Solve a square system; throws NumericError when singular.
inline Vector solve(const Matrix& a, std::span<const double> b, double pivot_tol = 1e-12) {
    return matvec(inverse(a, pivot_tol), b);
}

// ---- deterministic summation ---------------------------------------------

/// Pairwise (cascade) summation of a stream of equally sized vectors. Blocks of
/// power-of-two size are merged as they complete, so the reduction tree for the
/// first n items depends only on n. Reading the total after each push therefore
/// gives the same bits as a fresh reduction over the prefix.
class CascadeSum {
public:
    explicit CascadeSum(std::size_t dim) : dim_(dim) {}

    void push(Vector v) {
        if (v.size() != dim_) throw InputError("CascadeSum: dimension mismatch");
        std::size_t level = 0;
        while (!stack_.empty() && stack_.back().first == level) {
            Vector merged = add(stack_.back().second, v);
            stack_.pop_back();
            v = std::move(merged);
            ++level;
        }
        stack_.emplace_back(level, std::move(v));
        ++count_;
    }

    std::size_t count() const { return count_; }

    Vector total() const {
        if (stack_.empty()) return Vector(dim_, 0.0);
        Vector acc = stack_.back().second;
        for (std::size_t k = stack_.size() - 1; k-- > 0;) acc = add(stack_[k].second, acc);
        return acc;
    }

private:
    std::size_t dim_;
    std::size_t count_ = 0;
    std::vector<std::pair<std::size_t, Vector>> stack_;
};

/// Sum of a multiset of scalars in ascending order; the result depends only on
/// the multiset, not on the order the values were produced in.
inline double sorted_sum(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    double s = 0.0;
    for (double v : values) s += v;
    return s;
}

inline double sorted_mean(std::vector<double> values) {
    const double n = static_cast<double>(values.size());
    return sorted_sum(std::move(values)) / n;
}

}  // namespace amenable
