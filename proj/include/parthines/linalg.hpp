#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace parthines {

using Vec = std::vector<double>;

/// Base class for all library failures.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A right-hand side produced a non-finite value or had the wrong dimension.
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// An implicit stage could not be solved (singular matrix or Newton divergence).
class StageFailure : public Error {
public:
    StageFailure(const std::string& stage, const std::string& what)
        : Error("stage '" + stage + "': " + what), stage_id(stage) {}
    std::string stage_id;
};

/// The step-size controller was driven below its minimum step size.
class StepSizeUnderflow : public Error {
public:
    StepSizeUnderflow(double t_fail, const std::string& what)
        : Error(what), t(t_fail) {}
    double t;
};

/// Invalid parameter combination for an analytic formula.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed model configuration input.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Reference-solution cross-validation failed its certification threshold.
class ReferenceFailure : public Error {
public:
    using Error::Error;
};

enum class MatrixShape { diagonal, tridiagonal, dense };

/// Square matrix with an explicit sparsity structure. The structure decides
/// which linear-solve kernel the implicit stages use.
struct StructuredMatrix {
    MatrixShape shape = MatrixShape::diagonal;
    int n = 0;
    Vec diag;          // diagonal / tridiagonal: main diagonal, size n
    Vec lower;         // tridiagonal: subdiagonal, size n-1
    Vec upper;         // tridiagonal: superdiagonal, size n-1
    Vec dense;         // dense: row-major, size n*n

    static StructuredMatrix diagonal_matrix(Vec d);
    static StructuredMatrix tridiagonal_matrix(Vec lo, Vec d, Vec up);
    static StructuredMatrix dense_matrix(int n, Vec rowmajor);

    [[nodiscard]] double entry(int i, int j) const;

    /// out = M * v
    void apply(std::span<const double> v, std::span<double> out) const;
};

/// Solves (I - s*M) u = rhs, exploiting the structure of M.
/// Throws StageFailure(stage_id) when the shifted matrix is numerically singular.
Vec solve_identity_minus(const StructuredMatrix& M, double s, const Vec& rhs,
                         const std::string& stage_id);

/// Dense LU solve with partial pivoting; A is row-major n*n and is overwritten.
/// Throws StageFailure(stage_id) on a vanishing pivot.
Vec lu_solve(Vec A, Vec rhs, const std::string& stage_id);

}  // namespace parthines
