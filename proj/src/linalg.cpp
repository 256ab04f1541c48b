#include "parthines/linalg.hpp"

#include <cassert>
#include <cmath>
#include <cstdlib>

namespace parthines {

namespace {

constexpr double kSingularRelTol = 1e-14;

[[noreturn]] void singular(const std::string& stage_id, int row) {
    throw StageFailure(stage_id, "singular stage matrix (pivot " + std::to_string(row) + ")");
}

}  // namespace

StructuredMatrix StructuredMatrix::diagonal_matrix(Vec d) {
    StructuredMatrix m;
    m.shape = MatrixShape::diagonal;
    m.n = static_cast<int>(d.size());
    m.diag = std::move(d);
    return m;
}

StructuredMatrix StructuredMatrix::tridiagonal_matrix(Vec lo, Vec d, Vec up) {
    StructuredMatrix m;
    m.shape = MatrixShape::tridiagonal;
    m.n = static_cast<int>(d.size());
    assert(lo.size() + 1 == d.size() && up.size() + 1 == d.size());
    m.diag = std::move(d);
    m.lower = std::move(lo);
    m.upper = std::move(up);
    return m;
}

StructuredMatrix StructuredMatrix::dense_matrix(int n, Vec rowmajor) {
    StructuredMatrix m;
    m.shape = MatrixShape::dense;
    m.n = n;
    assert(static_cast<int>(rowmajor.size()) == n * n);
    m.dense = std::move(rowmajor);
    return m;
}

double StructuredMatrix::entry(int i, int j) const {
    switch (shape) {
        case MatrixShape::diagonal:
            return i == j ? diag[i] : 0.0;
        case MatrixShape::tridiagonal:
            if (i == j) return diag[i];
            if (i == j + 1) return lower[j];
            if (j == i + 1) return upper[i];
            return 0.0;
        case MatrixShape::dense:
            return dense[static_cast<size_t>(i) * n + j];
    }
    return 0.0;
}

void StructuredMatrix::apply(std::span<const double> v, std::span<double> out) const {
    assert(static_cast<int>(v.size()) == n && static_cast<int>(out.size()) == n);
    switch (shape) {
        case MatrixShape::diagonal:
            for (int i = 0; i < n; ++i) out[i] = diag[i] * v[i];
            return;
        case MatrixShape::tridiagonal:
            for (int i = 0; i < n; ++i) {
                double s = diag[i] * v[i];
                if (i > 0) s += lower[i - 1] * v[i - 1];
                if (i + 1 < n) s += upper[i] * v[i + 1];
                out[i] = s;
            }
            return;
        case MatrixShape::dense:
            for (int i = 0; i < n; ++i) {
                double s = 0.0;
                const double* row = dense.data() + static_cast<size_t>(i) * n;
                for (int j = 0; j < n; ++j) s += row[j] * v[j];
                out[i] = s;
            }
            return;
    }
}

Vec lu_solve(Vec A, Vec rhs, const std::string& stage_id) {
    const int n = static_cast<int>(rhs.size());
    assert(static_cast<int>(A.size()) == n * n);
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;

    double scale = 0.0;
    for (double v : A) scale = std::max(scale, std::abs(v));
    const double tiny = kSingularRelTol * std::max(scale, 1.0);

    for (int k = 0; k < n; ++k) {
        int p = k;
        double best = std::abs(A[static_cast<size_t>(perm[k]) * n + k]);
        for (int i = k + 1; i < n; ++i) {
            double v = std::abs(A[static_cast<size_t>(perm[i]) * n + k]);
            if (v > best) {
                best = v;
                p = i;
            }
        }
        if (best <= tiny) singular(stage_id, k);
        std::swap(perm[k], perm[p]);
        const double pivot = A[static_cast<size_t>(perm[k]) * n + k];
        for (int i = k + 1; i < n; ++i) {
            double* rowi = A.data() + static_cast<size_t>(perm[i]) * n;
            const double* rowk = A.data() + static_cast<size_t>(perm[k]) * n;
            const double m = rowi[k] / pivot;
            rowi[k] = m;
            for (int j = k + 1; j < n; ++j) rowi[j] -= m * rowk[j];
        }
    }

    Vec x(n);
    for (int i = 0; i < n; ++i) {
        double s = rhs[perm[i]];
        const double* row = A.data() + static_cast<size_t>(perm[i]) * n;
        for (int j = 0; j < i; ++j) s -= row[j] * x[j];
        x[i] = s;
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = x[i];
        const double* row = A.data() + static_cast<size_t>(perm[i]) * n;
        for (int j = i + 1; j < n; ++j) s -= row[j] * x[j];
        x[i] = s / row[i];
    }
    return x;
}

Vec solve_identity_minus(const StructuredMatrix& M, double s, const Vec& rhs,
                         const std::string& stage_id) {
    const int n = M.n;
    assert(static_cast<int>(rhs.size()) == n);

    switch (M.shape) {
        case MatrixShape::diagonal: {
            Vec x(n);
            for (int i = 0; i < n; ++i) {
                const double d = 1.0 - s * M.diag[i];
                if (std::abs(d) <= kSingularRelTol * (1.0 + std::abs(s * M.diag[i])))
                    singular(stage_id, i);
                x[i] = rhs[i] / d;
            }
            return x;
        }
        case MatrixShape::tridiagonal: {
            // Thomas sweep on (I - s*M).
            Vec d(n), up(n > 0 ? n - 1 : 0), r = rhs;
            for (int i = 0; i < n; ++i) d[i] = 1.0 - s * M.diag[i];
            for (int i = 0; i + 1 < n; ++i) up[i] = -s * M.upper[i];
            for (int i = 1; i < n; ++i) {
                const double lo = -s * M.lower[i - 1];
                if (std::abs(d[i - 1]) <= kSingularRelTol * (1.0 + std::abs(s * M.diag[i - 1])))
                    singular(stage_id, i - 1);
                const double m = lo / d[i - 1];
                d[i] -= m * up[i - 1];
                r[i] -= m * r[i - 1];
            }
            if (std::abs(d[n - 1]) <= kSingularRelTol * (1.0 + std::abs(s * M.diag[n - 1])))
                singular(stage_id, n - 1);
            Vec x(n);
            x[n - 1] = r[n - 1] / d[n - 1];
            for (int i = n - 2; i >= 0; --i) x[i] = (r[i] - up[i] * x[i + 1]) / d[i];
            return x;
        }
        case MatrixShape::dense: {
            Vec A(static_cast<size_t>(n) * n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    A[static_cast<size_t>(i) * n + j] =
                        (i == j ? 1.0 : 0.0) - s * M.dense[static_cast<size_t>(i) * n + j];
            return lu_solve(std::move(A), rhs, stage_id);
        }
    }
    std::abort();
}

}  // namespace parthines
