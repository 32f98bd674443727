#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pzshell::eig {

using SparseMat = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// Symmetric-definite generalized pencil (K, M). K may be available only as
/// an operator; the dense path materializes it column by column. Shift-invert
/// additionally needs a solve with (K - sigma M), supplied by the owner of
/// the pencil (typically a sparse block factorization).
struct SymmetricPencil {
    int n = 0;
    std::function<Vector(const Vector&)> apply_K;
    const SparseMat* M = nullptr;
    /// Factory returning a solver for (K - sigma M); required for shift-invert.
    std::function<std::function<Vector(const Vector&)>(double sigma)> shifted_solver;
    /// Optional explicit dense K (skips the column-by-column materialization).
    std::optional<Matrix> K_dense;
};

struct Spectrum {
    Vector values;    // ascending
    Matrix vectors;   // M-orthonormal columns, sign-fixed
    Vector residuals; // ||K x - xi M x|| / ||K x|| per pair
};

enum class SolveMode { Dense, ShiftInvert };

struct SolveOptions {
    int dense_cap = 4000;
    double tol = 1e-10;
    int max_iter = 0;  // 0 = automatic
};

/// First m_count eigenpairs of K x = xi M x, ascending, M-orthonormal.
/// Deterministic for fixed (pencil, seed). Dense mode requires n <= dense_cap.
Spectrum solve(const SymmetricPencil& pencil, int m_count, SolveMode mode,
               std::uint64_t seed, const SolveOptions& opts = {});

struct MinMaxEntry {
    int subspace_index = 0;
    int dimension = 0;
    double max_rayleigh = 0.0;
    double bound = 0.0;  // xi^m for m = dimension
    bool holds = false;  // max_rayleigh >= bound - tol
};

struct MinMaxReport {
    std::vector<MinMaxEntry> entries;
    bool all_hold = true;
};

/// For each trial subspace W (columns span an m-dimensional admissible space),
/// checks the variational lower bound: max over W of the Rayleigh quotient is
/// at least the m-th eigenvalue.
MinMaxReport minmax_check(const SymmetricPencil& pencil, const Spectrum& spectrum,
                          const std::vector<Matrix>& trial_subspaces, double tol = 1e-8);

/// Deterministic uniform draw in [-1,1]^n (splitmix-free; used for start
/// vectors and randomized property tests).
Vector deterministic_vector(int n, std::uint64_t seed);

}  // namespace pzshell::eig
