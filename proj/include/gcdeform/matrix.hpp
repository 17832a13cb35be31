#pragma once

// Exact dense linear algebra over Q[i]: RREF, rank, kernel bases in canonical
// form, solving, and quotient dimensions (the computational substrate for
// every cohomology group in the library).

#include <optional>
#include <stdexcept>
#include <vector>

#include "gcdeform/rational.hpp"

namespace gcdef {

using Vec = std::vector<QI>;

class ExactMatrix {
public:
    int rows = 0, cols = 0;
    std::vector<QI> a;  // row-major

    ExactMatrix() = default;
    ExactMatrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}

    static ExactMatrix identity(int n) {
        ExactMatrix m(n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = QI(1);
        return m;
    }
    static ExactMatrix from_rows(const std::vector<Vec>& rows_in, int cols_hint = -1) {
        int r = static_cast<int>(rows_in.size());
        int c = r ? static_cast<int>(rows_in[0].size()) : std::max(cols_hint, 0);
        ExactMatrix m(r, c);
        for (int i = 0; i < r; ++i) {
            if ((int)rows_in[i].size() != c) throw std::invalid_argument("ragged rows");
            for (int j = 0; j < c; ++j) m.at(i, j) = rows_in[i][j];
        }
        return m;
    }

    QI& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    const QI& at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    Vec row(int i) const {
        Vec v(cols);
        for (int j = 0; j < cols; ++j) v[j] = at(i, j);
        return v;
    }

    ExactMatrix operator*(const ExactMatrix& o) const {
        if (cols != o.rows) throw std::invalid_argument("matrix shape mismatch");
        ExactMatrix r(rows, o.cols);
        for (int i = 0; i < rows; ++i)
            for (int k = 0; k < cols; ++k) {
                if (at(i, k).is_zero()) continue;
                for (int j = 0; j < o.cols; ++j) r.at(i, j) += at(i, k) * o.at(k, j);
            }
        return r;
    }
    Vec apply(const Vec& v) const {
        if ((int)v.size() != cols) throw std::invalid_argument("vector length mismatch");
        Vec r(rows);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j)
                if (!at(i, j).is_zero()) r[i] += at(i, j) * v[j];
        return r;
    }
    ExactMatrix operator+(const ExactMatrix& o) const {
        if (rows != o.rows || cols != o.cols) throw std::invalid_argument("shape mismatch");
        ExactMatrix r = *this;
        for (size_t k = 0; k < a.size(); ++k) r.a[k] += o.a[k];
        return r;
    }
    ExactMatrix operator-() const {
        ExactMatrix r = *this;
        for (auto& x : r.a) x = -x;
        return r;
    }
    ExactMatrix operator-(const ExactMatrix& o) const { return *this + (-o); }
    ExactMatrix scaled(const QI& s) const {
        ExactMatrix r = *this;
        for (auto& x : r.a) x = x * s;
        return r;
    }
    ExactMatrix transpose() const {
        ExactMatrix r(cols, rows);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) r.at(j, i) = at(i, j);
        return r;
    }
    bool operator==(const ExactMatrix& o) const {
        return rows == o.rows && cols == o.cols && a == o.a;
    }
    bool is_zero() const {
        for (const auto& x : a)
            if (!x.is_zero()) return false;
        return true;
    }

    // In-place reduced row echelon form; returns pivot columns.
    std::vector<int> rref() {
        std::vector<int> pivots;
        int prow = 0;
        for (int col = 0; col < cols && prow < rows; ++col) {
            int sel = -1;
            for (int i = prow; i < rows; ++i)
                if (!at(i, col).is_zero()) { sel = i; break; }
            if (sel < 0) continue;
            if (sel != prow)
                for (int j = 0; j < cols; ++j) std::swap(at(sel, j), at(prow, j));
            QI inv = QI(1) / at(prow, col);
            for (int j = 0; j < cols; ++j) at(prow, j) = at(prow, j) * inv;
            for (int i = 0; i < rows; ++i) {
                if (i == prow || at(i, col).is_zero()) continue;
                QI f = at(i, col);
                for (int j = 0; j < cols; ++j) at(i, j) -= f * at(prow, j);
            }
            pivots.push_back(col);
            ++prow;
        }
        return pivots;
    }

    int rank() const {
        ExactMatrix m = *this;
        return static_cast<int>(m.rref().size());
    }

    // Canonical basis of the null space: the standard free-variable basis of
    // the RREF, itself row-reduced so representatives are reproducible.
    std::vector<Vec> kernel_basis() const {
        ExactMatrix m = *this;
        std::vector<int> pivots = m.rref();
        std::vector<char> is_pivot(cols, 0);
        for (int c : pivots) is_pivot[c] = 1;
        std::vector<Vec> basis;
        for (int free = 0; free < cols; ++free) {
            if (is_pivot[free]) continue;
            Vec v(cols);
            v[free] = QI(1);
            for (size_t pi = 0; pi < pivots.size(); ++pi)
                v[pivots[pi]] = -m.at(static_cast<int>(pi), free);
            basis.push_back(std::move(v));
        }
        ExactMatrix k = ExactMatrix::from_rows(basis, cols);
        k.rref();
        std::vector<Vec> out;
        for (int i = 0; i < k.rows; ++i) {
            Vec v = k.row(i);
            bool nz = false;
            for (auto& x : v)
                if (!x.is_zero()) nz = true;
            if (nz) out.push_back(std::move(v));
        }
        return out;
    }

    // Solve M x = b exactly; empty optional when inconsistent. Returns the
    // canonical solution with free variables set to zero.
    std::optional<Vec> solve(const Vec& b) const {
        if ((int)b.size() != rows) throw std::invalid_argument("rhs length mismatch");
        ExactMatrix aug(rows, cols + 1);
        for (int i = 0; i < rows; ++i) {
            for (int j = 0; j < cols; ++j) aug.at(i, j) = at(i, j);
            aug.at(i, cols) = b[i];
        }
        std::vector<int> pivots = aug.rref();
        for (int c : pivots)
            if (c == cols) return std::nullopt;  // inconsistent
        Vec x(cols);
        for (size_t pi = 0; pi < pivots.size(); ++pi)
            x[pivots[pi]] = aug.at(static_cast<int>(pi), cols);
        return x;
    }
};

// Is v in the row span of gens?
inline bool in_span(const std::vector<Vec>& gens, const Vec& v) {
    ExactMatrix m = ExactMatrix::from_rows(gens, static_cast<int>(v.size()));
    ExactMatrix m2 = m;
    std::vector<Vec> all = gens;
    all.push_back(v);
    ExactMatrix mv = ExactMatrix::from_rows(all, static_cast<int>(v.size()));
    return m2.rank() == mv.rank();
}

struct QuotientResult {
    int dim = 0;
    std::vector<Vec> representatives;  // complete an im-basis to a ker-basis
};

// dim(span(ker_gens)/span(im_gens)) with canonical representatives.
// Throws when span(im) is not contained in span(ker) — a broken complex.
inline QuotientResult quotient_dim(const std::vector<Vec>& im_gens,
                                   const std::vector<Vec>& ker_gens, int ambient_cols) {
    for (const Vec& v : im_gens)
        if (!in_span(ker_gens, v))
            throw std::domain_error("quotient_dim: image not contained in kernel (D^2 != 0?)");
    ExactMatrix im = ExactMatrix::from_rows(im_gens, ambient_cols);
    int rim = im.rank();
    ExactMatrix ker = ExactMatrix::from_rows(ker_gens, ambient_cols);
    int rker = ker.rank();
    QuotientResult res;
    res.dim = rker - rim;
    // Greedily complete: canonicalize kernel rows first for determinism.
    ExactMatrix kk = ker;
    kk.rref();
    std::vector<Vec> chosen = im_gens;
    for (int i = 0; i < kk.rows && (int)res.representatives.size() < res.dim; ++i) {
        Vec v = kk.row(i);
        bool nz = false;
        for (auto& x : v)
            if (!x.is_zero()) nz = true;
        if (!nz) continue;
        if (!in_span(chosen, v)) {
            chosen.push_back(v);
            res.representatives.push_back(v);
        }
    }
    return res;
}

}  // namespace gcdef
