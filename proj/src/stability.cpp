#include "parthines/stability.hpp"

#include <cmath>

namespace parthines {

namespace {

void require_admissible(const TestSystemParams& p, const char* where) {
    if (!p.admissible())
        throw DomainError(std::string(where) +
                          ": requires mu < 0, lambda < 0 and a*b < mu*lambda");
}

double trapezoidal_factor(double z) {  // (1+z/2)/(1-z/2)
    return (1.0 + 0.5 * z) / (1.0 - 0.5 * z);
}

/// Positive bound value B(h) with stability interval gamma in (-B(h), 1).
/// Monotonically decreasing in h for negative rates; its limits are
/// +infinity (h -> 0) and 0 (discrete) respectively 1 (strang) as h -> inf.
double gamma_bound(const TestSystemParams& p, double h, StabilityFlavor flavor) {
    if (flavor == StabilityFlavor::strang) {
        const double ea = std::exp(p.mu * h), eb = std::exp(p.lambda * h);
        return (1.0 + ea) * (1.0 + eb) / ((ea - 1.0) * (eb - 1.0));
    }
    // (1+alpha)(1+beta)/((1-alpha)(1-beta)) collapses to 4/(h^2*mu*lambda).
    return 4.0 / (h * h * p.mu * p.lambda);
}

}  // namespace

Mat2 operator*(const Mat2& l, const Mat2& r) {
    return {l.a11 * r.a11 + l.a12 * r.a21, l.a11 * r.a12 + l.a12 * r.a22,
            l.a21 * r.a11 + l.a22 * r.a21, l.a21 * r.a12 + l.a22 * r.a22};
}

StabilityFunctions stability_functions(const TestSystemParams& p, double h,
                                       StabilityFlavor flavor) {
    if (h <= 0.0) throw DomainError("stability_functions: requires h > 0");
    if (p.mu == 0.0 || p.lambda == 0.0)
        throw DomainError("stability_functions: requires mu != 0 and lambda != 0");
    if (flavor == StabilityFlavor::strang)
        return {std::exp(p.mu * h), std::exp(p.lambda * h)};
    if (h * p.mu == 2.0 || h * p.lambda == 2.0)
        throw DomainError("stability_functions: trapezoidal factor pole at h*rate = 2");
    return {trapezoidal_factor(h * p.mu), trapezoidal_factor(h * p.lambda)};
}

Mat2 recursion_matrix(const TestSystemParams& p, double h, StabilityFlavor flavor) {
    const auto [alpha, beta] = stability_functions(p, h, flavor);
    const double gamma = p.gamma();

    switch (flavor) {
        case StabilityFlavor::modified: {
            const double dm = 1.0 - 0.5 * h * p.mu;
            const double dl = 1.0 - 0.5 * h * p.lambda;
            Mat2 c;
            c.a11 = alpha * (1.0 + gamma * (0.5 * h * p.mu) * (beta - 1.0));
            c.a12 = h * p.a * (1.0 / (dm * dl) + 0.25 * gamma * (alpha - 1.0) * (beta - 1.0));
            c.a21 = h * p.b * (1.0 + 0.5 * h * p.mu) / dl;
            c.a22 = beta + gamma * (beta - 1.0) * (0.5 * h * p.mu);
            return c;
        }
        case StabilityFlavor::hines: {
            const double dm = 1.0 - 0.5 * h * p.mu;
            const double dl = 1.0 - 0.5 * h * p.lambda;
            Mat2 c;
            c.a11 = alpha;
            c.a12 = h * p.a / dm;
            c.a21 = alpha * h * p.b / dl;
            c.a22 = beta + gamma * (1.0 - alpha) * (1.0 - beta);
            return c;
        }
        case StabilityFlavor::strang: {
            const double root = std::exp(0.5 * p.mu * h);  // alpha^{1/2}
            const double T = gamma * (root - 1.0) * (beta - 1.0);
            Mat2 c;
            c.a11 = alpha + root * T;
            c.a12 = (p.a / p.mu) * (root - 1.0) * (root + T + beta);
            c.a21 = (p.b / p.lambda) * root * (beta - 1.0);
            c.a22 = T + beta;
            return c;
        }
    }
    throw DomainError("recursion_matrix: unknown flavor");
}

Mat2 recursion_matrix_from_stages(const TestSystemParams& p, double h) {
    const double hm = 0.5 * h * p.mu, hl = 0.5 * h * p.lambda;
    // Stage form A*u_{n+1} = B*u_n of the one-step scheme on the test system.
    const Mat2 A{1.0 - hm, -0.5 * h * p.a, 0.0, 1.0 - hl};
    const Mat2 B{1.0 + hm, 0.5 * h * p.a, h * p.b * (1.0 + hm),
                 1.0 + hl + 0.5 * p.a * p.b * h * h};
    const double det = A.a11 * A.a22 - A.a12 * A.a21;
    if (std::abs(det) < 1e-300)
        throw DomainError("recursion_matrix_from_stages: singular stage matrix");
    const Mat2 Ainv{A.a22 / det, -A.a12 / det, -A.a21 / det, A.a11 / det};
    return Ainv * B;
}

std::pair<double, double> char_poly(double alpha, double beta, double gamma) {
    return {-(alpha + beta + gamma * (alpha - 1.0) * (beta - 1.0)), alpha * beta};
}

std::pair<double, double> char_roots_modulus(double a1, double a0) {
    const double disc = a1 * a1 - 4.0 * a0;
    if (disc < 0.0) {
        const double m = std::sqrt(a0);  // conjugate pair, |s|^2 = a0
        return {m, m};
    }
    const double sq = std::sqrt(disc);
    // Sign-aware form avoids cancellation in the smaller root.
    const double q = -0.5 * (a1 >= 0.0 ? a1 + sq : a1 - sq);
    const double r1 = q;
    const double r2 = (q != 0.0) ? a0 / q : -a1 - q;
    return {std::abs(r1), std::abs(r2)};
}

double spectral_radius(const Mat2& C) {
    const auto [m1, m2] = char_roots_modulus(-C.trace(), C.det());
    return std::max(m1, m2);
}

double stability_lower_bound(double alpha, double beta) {
    if (alpha == 1.0 || beta == 1.0)
        throw DomainError("stability_lower_bound: requires alpha != 1 and beta != 1");
    return -(1.0 + alpha) * (1.0 + beta) / ((1.0 - alpha) * (1.0 - beta));
}

StabilityVerdict is_stable(double alpha, double beta, double gamma) {
    if (std::abs(alpha) >= 1.0 || std::abs(beta) >= 1.0)
        throw DomainError("is_stable: requires |alpha| < 1 and |beta| < 1");
    const double lo = stability_lower_bound(alpha, beta);
    const double margin = std::min(gamma - lo, 1.0 - gamma);
    return {margin > 0.0, margin};
}

std::optional<double> stability_boundary_h(const TestSystemParams& p, StabilityFlavor flavor) {
    require_admissible(p, "stability_boundary_h");
    if (flavor == StabilityFlavor::hines) flavor = StabilityFlavor::modified;
    const double gamma = p.gamma();
    const double limit = flavor == StabilityFlavor::strang ? -1.0 : 0.0;
    if (gamma >= limit) return std::nullopt;

    // gamma_bound is monotone decreasing; the crossing gamma = -bound(h) is
    // unique. Expand a bracket geometrically, then bisect.
    const auto excess = [&](double h) { return -gamma_bound(p, h, flavor) - gamma; };
    double lo = 1e-8, hi = 1e-8;
    if (excess(lo) > 0.0) return lo;  // already unstable at the bracket floor
    while (excess(hi) <= 0.0) {
        hi *= 2.0;
        if (hi > 1e8)
            throw DomainError("stability_boundary_h: no crossing found below h = 1e8");
    }
    lo = hi * 0.5;
    while ((hi - lo) > 1e-12 * hi) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) <= 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::pair<double, double> monotonicity_nu(const TestSystemParams& p) {
    return {0.5 * (p.mu + std::sqrt(p.mu * p.mu + p.a * p.a)),
            0.5 * (p.lambda + std::sqrt(p.lambda * p.lambda + p.b * p.b))};
}

}  // namespace parthines
