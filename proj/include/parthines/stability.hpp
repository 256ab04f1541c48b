#pragma once

#include <optional>
#include <utility>

#include "parthines/linalg.hpp"

namespace parthines {

/// 2x2 matrix used by the stability analytics.
struct Mat2 {
    double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;
    [[nodiscard]] double trace() const { return a11 + a22; }
    [[nodiscard]] double det() const { return a11 * a22 - a12 * a21; }
};

Mat2 operator*(const Mat2& l, const Mat2& r);

/// Coupled linear test system x' = mu*x + a*y, y' = b*x + lambda*y.
struct TestSystemParams {
    double mu = -1.0;
    double lambda = -1.0;
    double a = 0.0;
    double b = 0.0;

    /// Coupling strength gamma = a*b/(mu*lambda).
    [[nodiscard]] double gamma() const { return a * b / (mu * lambda); }

    /// Negative rates and subcritical coupling (gamma < 1).
    [[nodiscard]] bool admissible() const {
        return mu < 0.0 && lambda < 0.0 && a * b < mu * lambda;
    }
};

enum class StabilityFlavor { modified, hines, strang };

/// Per-block amplification factors: the trapezoidal rational function
/// (1+z/2)/(1-z/2) for the discrete flavors, the exponential for strang.
struct StabilityFunctions {
    double alpha = 0.0;
    double beta = 0.0;
};

StabilityFunctions stability_functions(const TestSystemParams& p, double h,
                                       StabilityFlavor flavor);

/// One-step recursion matrix of the chosen scheme on the test system,
/// assembled from the closed-form entries.
Mat2 recursion_matrix(const TestSystemParams& p, double h, StabilityFlavor flavor);

/// Recursion matrix of the modified scheme assembled as A^{-1}B from the
/// stage-form matrices; used to cross-check the closed form.
Mat2 recursion_matrix_from_stages(const TestSystemParams& p, double h);

/// Characteristic polynomial s^2 + a1*s + a0 shared by all three flavors:
/// a1 = -(alpha + beta + gamma*(alpha-1)*(beta-1)), a0 = alpha*beta.
std::pair<double, double> char_poly(double alpha, double beta, double gamma);

/// Moduli of the two (possibly complex) roots of s^2 + a1*s + a0.
std::pair<double, double> char_roots_modulus(double a1, double a0);

/// Largest root modulus of the characteristic polynomial of C.
double spectral_radius(const Mat2& C);

struct StabilityVerdict {
    bool stable = false;
    /// Signed distance of gamma to the admissible interval
    /// (lower_bound, 1): positive inside, negative outside.
    double margin = 0.0;
};

/// Lower stability bound -(1+alpha)(1+beta)/((1-alpha)(1-beta)).
/// Requires alpha != 1 and beta != 1.
double stability_lower_bound(double alpha, double beta);

/// Root condition max(|s1|,|s2|) < 1 expressed through the interval
/// lower_bound < gamma < 1. Requires |alpha| < 1 and |beta| < 1.
StabilityVerdict is_stable(double alpha, double beta, double gamma);

/// Smallest h at which the scheme loses stability for the given parameters,
/// found by bisection on the monotone bound; nullopt when the scheme is
/// stable for every h ("unbounded"). Discrete flavors are unbounded for
/// gamma >= 0, strang for gamma >= -1. Requires admissible parameters.
std::optional<double> stability_boundary_h(const TestSystemParams& p, StabilityFlavor flavor);

/// One-sided Lipschitz (logarithmic norm) constants of the split right-hand
/// sides: nu_f = (mu + sqrt(mu^2 + a^2))/2, nu_g = (lambda + sqrt(lambda^2 + b^2))/2.
std::pair<double, double> monotonicity_nu(const TestSystemParams& p);

}  // namespace parthines
