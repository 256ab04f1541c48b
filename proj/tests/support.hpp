#pragma once

#include <cmath>
#include <memory>
#include <random>
#include <utility>
#include <vector>

#include "parthines/core.hpp"
#include "parthines/stability.hpp"

namespace parthines::testing {

/// Exact 2x2 matrix exponential by diagonalization-free scaling and
/// squaring of the truncated series; independent oracle for the linear
/// flows used throughout the tests.
inline Mat2 expm2(Mat2 A) {
    double norm = std::max(std::abs(A.a11) + std::abs(A.a12), std::abs(A.a21) + std::abs(A.a22));
    int squarings = 0;
    while (norm > 0.5) {
        norm *= 0.5;
        ++squarings;
    }
    const double scale = std::ldexp(1.0, -squarings);
    A.a11 *= scale;
    A.a12 *= scale;
    A.a21 *= scale;
    A.a22 *= scale;

    Mat2 result{1.0, 0.0, 0.0, 1.0};
    Mat2 term{1.0, 0.0, 0.0, 1.0};
    for (int k = 1; k <= 24; ++k) {
        term = term * A;
        const double inv = 1.0 / k;
        term.a11 *= inv;
        term.a12 *= inv;
        term.a21 *= inv;
        term.a22 *= inv;
        result.a11 += term.a11;
        result.a12 += term.a12;
        result.a21 += term.a21;
        result.a22 += term.a22;
    }
    for (int s = 0; s < squarings; ++s) result = result * result;
    return result;
}

/// Exact flow of x' = mu x + a y, y' = b x + lambda y over time h.
inline std::pair<double, double> linear_flow(const TestSystemParams& p, double x0, double y0,
                                             double h) {
    const Mat2 E = expm2(Mat2{h * p.mu, h * p.a, h * p.b, h * p.lambda});
    return {E.a11 * x0 + E.a12 * y0, E.a21 * x0 + E.a22 * y0};
}

/// Uniform draw in [lo, hi) from the same generator convention the library
/// uses for its randomized checks.
inline double uniform(std::mt19937& rng, double lo, double hi) {
    return lo + (hi - lo) * (rng() * 0x1p-32);
}

/// Random admissible test-system parameters (negative rates, gamma < 1).
inline TestSystemParams random_admissible(std::mt19937& rng) {
    while (true) {
        TestSystemParams p;
        p.mu = -std::exp(uniform(rng, -2.0, 2.0));
        p.lambda = -std::exp(uniform(rng, -2.0, 2.0));
        p.a = uniform(rng, -4.0, 4.0);
        p.b = uniform(rng, -4.0, 4.0);
        if (p.admissible()) return p;
    }
}

/// Random fully nonlinear partitioned system with matching declared
/// semilinear structure: f = A(y) x + b(y,t) with dense A, g diagonal-linear
/// in y with x-dependent coefficients. Coefficients are smooth, bounded and
/// mildly contractive so 100 moderate steps stay well-scaled.
inline PartitionedSystem random_semilinear(std::mt19937& rng, int nx, int ny) {
    struct Coeffs {
        std::vector<double> amp;     // nx*nx
        std::vector<double> phase;   // nx*nx
        std::vector<double> wy;      // nx*nx, index of y component driving entry
        std::vector<double> bamp;    // nx
        std::vector<double> drate;   // ny
        std::vector<double> damp;    // ny
        std::vector<double> cw;      // ny
        int nx = 0, ny = 0;
    };
    auto c = std::make_shared<Coeffs>();
    c->nx = nx;
    c->ny = ny;
    c->amp.resize(static_cast<size_t>(nx) * nx);
    c->phase.resize(static_cast<size_t>(nx) * nx);
    c->wy.resize(static_cast<size_t>(nx) * nx);
    c->bamp.resize(nx);
    c->drate.resize(ny);
    c->damp.resize(ny);
    c->cw.resize(ny);
    for (int i = 0; i < nx * nx; ++i) {
        c->amp[i] = uniform(rng, -0.5, 0.5);
        c->phase[i] = uniform(rng, 0.0, 6.2831853);
        c->wy[i] = std::floor(uniform(rng, 0.0, static_cast<double>(ny)));
    }
    for (int i = 0; i < nx; ++i) c->bamp[i] = uniform(rng, -1.0, 1.0);
    for (int j = 0; j < ny; ++j) {
        c->drate[j] = uniform(rng, -2.0, -0.2);
        c->damp[j] = uniform(rng, -0.5, 0.5);
        c->cw[j] = uniform(rng, 0.5, 2.0);
    }

    auto a_entry = [c](const Vec& y, int i, int j) {
        const size_t k = static_cast<size_t>(i) * c->nx + j;
        const double yj = y[static_cast<size_t>(c->wy[k])];
        double v = c->amp[k] * std::sin(yj + c->phase[k]);
        if (i == j) v -= 1.0;  // diagonal dominance keeps the flow bounded
        return v;
    };
    auto b_entry = [c](const Vec& y, double t, int i) {
        return c->bamp[i] * std::cos(t + y[i % c->ny]);
    };
    auto d_entry = [c](const Vec& x, int j) {
        return c->drate[j] + c->damp[j] * std::sin(x[j % c->nx]);
    };
    auto c_entry = [c](const Vec& x, double t, int j) {
        return std::sin(c->cw[j] * t) + 0.3 * std::cos(x[(j + 1) % c->nx]);
    };

    PartitionedSystem sys;
    sys.name = "random_semilinear";
    sys.nx = nx;
    sys.ny = ny;
    sys.eval_f = [a_entry, b_entry, nx](const Vec& x, const Vec& y, double t, Vec& f) {
        for (int i = 0; i < nx; ++i) {
            double tot = b_entry(y, t, i);
            for (int j = 0; j < nx; ++j) tot += a_entry(y, i, j) * x[j];
            f[i] = tot;
        }
    };
    sys.eval_g = [d_entry, c_entry, ny](const Vec& x, const Vec& y, double t, Vec& g) {
        for (int j = 0; j < ny; ++j) g[j] = c_entry(x, t, j) + d_entry(x, j) * y[j];
    };

    SemilinearData sl;
    XBlockLinear xb;
    xb.a_shape = MatrixShape::dense;
    xb.A_of_y = [a_entry, nx](const Vec& y, StructuredMatrix& A) {
        Vec rowmajor(static_cast<size_t>(nx) * nx);
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < nx; ++j) rowmajor[static_cast<size_t>(i) * nx + j] = a_entry(y, i, j);
        A = StructuredMatrix::dense_matrix(nx, std::move(rowmajor));
    };
    xb.b_of_yt = [b_entry, nx](const Vec& y, double t, Vec& b) {
        for (int i = 0; i < nx; ++i) b[i] = b_entry(y, t, i);
    };
    sl.x_block = std::move(xb);
    YBlockLinear yb;
    yb.d_shape = MatrixShape::diagonal;
    yb.D_of_x = [d_entry, ny](const Vec& x, StructuredMatrix& D) {
        Vec d(ny);
        for (int j = 0; j < ny; ++j) d[j] = d_entry(x, j);
        D = StructuredMatrix::diagonal_matrix(std::move(d));
    };
    yb.c_of_xt = [c_entry, ny](const Vec& x, double t, Vec& cvec) {
        for (int j = 0; j < ny; ++j) cvec[j] = c_entry(x, t, j);
    };
    sl.y_block = std::move(yb);
    sys.semilinear = std::move(sl);

    sys.typical_size.assign(nx + ny, 1.0);
    sys.box_lo_x.assign(nx, -1.0);
    sys.box_hi_x.assign(nx, 1.0);
    sys.box_lo_y.assign(ny, -1.0);
    sys.box_hi_y.assign(ny, 1.0);
    sys.box_t_hi = 10.0;
    return sys;
}

/// Random state inside [-1,1]^dim.
inline SplitState random_state(std::mt19937& rng, int nx, int ny) {
    SplitState s;
    s.t = 0.0;
    s.x.resize(nx);
    s.y.resize(ny);
    for (auto& v : s.x) v = uniform(rng, -1.0, 1.0);
    for (auto& v : s.y) v = uniform(rng, -1.0, 1.0);
    return s;
}

/// System with f = 0 and g = 0; every scheme must reproduce the initial
/// state exactly.
inline PartitionedSystem zero_system(int nx, int ny) {
    PartitionedSystem sys;
    sys.name = "zero";
    sys.nx = nx;
    sys.ny = ny;
    sys.eval_f = [](const Vec&, const Vec&, double, Vec& f) {
        for (auto& v : f) v = 0.0;
    };
    sys.eval_g = [](const Vec&, const Vec&, double, Vec& g) {
        for (auto& v : g) v = 0.0;
    };
    sys.typical_size.assign(nx + ny, 1.0);
    sys.box_lo_x.assign(nx, -1.0);
    sys.box_hi_x.assign(nx, 1.0);
    sys.box_lo_y.assign(ny, -1.0);
    sys.box_hi_y.assign(ny, 1.0);
    return sys;
}

}  // namespace parthines::testing
