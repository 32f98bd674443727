#include <doctest.h>

#include "pzshell/eigsolve.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <memory>
#include <random>

using namespace pzshell;
using eig::Matrix;
using eig::SparseMat;
using eig::Vector;

namespace {

// Pencil wrapper around explicit matrices with an LDLT-based shifted solver.
struct DensePencil {
    Matrix K;
    SparseMat M;
    eig::SymmetricPencil pencil;

    DensePencil(Matrix k, Matrix m) : K(std::move(k)) {
        M = m.sparseView();
        M.makeCompressed();
        pencil.n = static_cast<int>(K.rows());
        pencil.M = &M;
        const Matrix* Kp = &K;
        pencil.apply_K = [Kp](const Vector& x) { return Vector((*Kp) * x); };
        pencil.K_dense = K;
        const SparseMat* Mp = &M;
        pencil.shifted_solver = [Kp, Mp](double sigma) {
            auto lu = std::make_shared<Eigen::PartialPivLU<Matrix>>(*Kp - sigma * Matrix(*Mp));
            return [lu](const Vector& rhs) { return Vector(lu->solve(rhs)); };
        };
    }
};

Matrix random_spd(int n, std::uint64_t seed, double shift) {
    std::mt19937_64 rng(seed);
    Matrix A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            A(i, j) = 2.0 * (static_cast<double>(rng() >> 11) / 9007199254740992.0) - 1.0;
    return A * A.transpose() + shift * Matrix::Identity(n, n);
}

}  // namespace

TEST_CASE("diagonal pencil returns the diagonal entries and basis vectors") {
    Matrix K = Vector::LinSpaced(3, 1.0, 3.0).asDiagonal();
    DensePencil p(K, Matrix::Identity(3, 3));
    for (auto mode : {eig::SolveMode::Dense, eig::SolveMode::ShiftInvert}) {
        const auto s = eig::solve(p.pencil, 3, mode, 99);
        CHECK(s.values[0] == doctest::Approx(1.0));
        CHECK(s.values[1] == doctest::Approx(2.0));
        CHECK(s.values[2] == doctest::Approx(3.0));
        for (int c = 0; c < 3; ++c) {
            Vector e = Vector::Zero(3);
            e[c] = 1.0;
            CHECK((s.vectors.col(c) - e).cwiseAbs().maxCoeff() <= 1e-9);
        }
    }
}

TEST_CASE("random SPD pencil matches the dense full-spectrum oracle") {
    const int n = 50;
    const Matrix K = random_spd(n, 1, 1.0);
    const Matrix M = random_spd(n, 2, double(n));
    DensePencil p(K, M);

    // independent oracle: full dense generalized eigendecomposition
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(K, M);
    const auto s = eig::solve(p.pencil, 8, eig::SolveMode::ShiftInvert, 5);
    for (int c = 0; c < 8; ++c)
        CHECK(std::abs(s.values[c] - ges.eigenvalues()[c]) <=
              1e-9 * std::abs(ges.eigenvalues()[c]));
    CHECK(s.residuals.maxCoeff() <= 1e-8);
}

TEST_CASE("dense and shift-invert paths agree on the first five pairs") {
    const int n = 80;
    const Matrix K = random_spd(n, 11, 2.0);
    const Matrix M = random_spd(n, 12, double(n));
    DensePencil p(K, M);
    const auto sd = eig::solve(p.pencil, 5, eig::SolveMode::Dense, 7);
    const auto ss = eig::solve(p.pencil, 5, eig::SolveMode::ShiftInvert, 7);
    for (int c = 0; c < 5; ++c) {
        CHECK(std::abs(sd.values[c] - ss.values[c]) <= 1e-8 * std::abs(sd.values[c]));
        const double align = std::abs(sd.vectors.col(c).dot(M * ss.vectors.col(c)));
        CHECK(align == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("solver output is deterministic for a fixed seed") {
    const int n = 40;
    const Matrix K = random_spd(n, 21, 1.0);
    const Matrix M = random_spd(n, 22, double(n));
    DensePencil p(K, M);
    const auto a = eig::solve(p.pencil, 4, eig::SolveMode::ShiftInvert, 1234);
    const auto b = eig::solve(p.pencil, 4, eig::SolveMode::ShiftInvert, 1234);
    CHECK((a.values - b.values).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.vectors - b.vectors).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("a constructed double eigenvalue is resolved with a clean eigenspace") {
    // K has eigenvalue 2 with multiplicity two inside a larger spectrum
    const int n = 30;
    Matrix Q = random_spd(n, 31, 0.5);
    Eigen::SelfAdjointEigenSolver<Matrix> qes(Q);
    const Matrix U = qes.eigenvectors();
    Vector d(n);
    for (int i = 0; i < n; ++i) d[i] = 3.0 + i;
    d[0] = 2.0;
    d[1] = 2.0;
    const Matrix K = U * d.asDiagonal() * U.transpose();
    DensePencil p(K, Matrix::Identity(n, n));
    const auto s = eig::solve(p.pencil, 3, eig::SolveMode::ShiftInvert, 77);
    CHECK(s.values[0] == doctest::Approx(2.0));
    CHECK(s.values[1] == doctest::Approx(2.0));
    // the two-dimensional eigenspace matches span(U.col(0), U.col(1))
    const Matrix basis = U.leftCols(2);
    Matrix proj = basis.transpose() * s.vectors.leftCols(2);
    Matrix gram = proj.transpose() * proj;
    CHECK((gram - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-7);
}

TEST_CASE("M-Gram of the returned vectors is the identity") {
    const int n = 35;
    const Matrix K = random_spd(n, 51, 1.0);
    const Matrix M = random_spd(n, 52, double(n));
    DensePencil p(K, M);
    for (auto mode : {eig::SolveMode::Dense, eig::SolveMode::ShiftInvert}) {
        const auto s = eig::solve(p.pencil, 6, mode, 3);
        const Matrix g = s.vectors.transpose() * Matrix(p.M) * s.vectors;
        CHECK((g - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff() <= 1e-8);
    }
}

TEST_CASE("variational lower bound holds for trial subspaces") {
    const int n = 40;
    const Matrix K = random_spd(n, 61, 1.0);
    const Matrix M = random_spd(n, 62, double(n));
    DensePencil p(K, M);
    const auto s = eig::solve(p.pencil, 6, eig::SolveMode::Dense, 9);

    SUBCASE("the eigenvector span achieves equality") {
        std::vector<Matrix> trials{s.vectors.leftCols(3)};
        const auto rep = eig::minmax_check(p.pencil, s, trials);
        CHECK(rep.all_hold);
        CHECK(rep.entries[0].max_rayleigh == doctest::Approx(s.values[2]).epsilon(1e-8));
    }
    SUBCASE("one hundred seeded random subspaces stay above the bound") {
        std::vector<Matrix> trials;
        for (int t = 0; t < 100; ++t) {
            Matrix W(n, 3);
            for (int c = 0; c < 3; ++c)
                W.col(c) = eig::deterministic_vector(n, 1000 + 3 * t + c);
            trials.push_back(W);
        }
        const auto rep = eig::minmax_check(p.pencil, s, trials);
        CHECK(rep.all_hold);
    }
}

TEST_CASE("input validation") {
    const Matrix K = random_spd(8, 71, 1.0);
    DensePencil p(K, Matrix::Identity(8, 8));
    CHECK_THROWS_AS(eig::solve(p.pencil, 9, eig::SolveMode::Dense, 1), eig::SolverError);
    CHECK_THROWS_AS(eig::solve(p.pencil, 0, eig::SolveMode::Dense, 1), eig::SolverError);

    // indefinite M must be rejected by the dense path
    Matrix Mbad = Matrix::Identity(8, 8);
    Mbad(0, 0) = -1.0;
    DensePencil pb(K, Mbad);
    CHECK_THROWS_AS(eig::solve(pb.pencil, 2, eig::SolveMode::Dense, 1), eig::SolverError);

    // dense cap
    eig::SolveOptions opts;
    opts.dense_cap = 4;
    CHECK_THROWS_AS(eig::solve(p.pencil, 2, eig::SolveMode::Dense, 1, opts), eig::SolverError);
}
