#include "pzshell/material.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace pzshell::material {

Mat3 ElasticTensor::contract(const Mat3& m) const {
    Mat3 r = Mat3::Zero();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) s += (*this)(i, j, k, l) * m(k, l);
            r(i, j) = s;
        }
    return r;
}

Eigen::Matrix<double, 6, 6> ElasticTensor::symmetric_representation() const {
    // Orthonormal basis of symmetric matrices: e_ii and (e_ij + e_ji)/sqrt(2).
    static const int idx[6][2] = {{0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}};
    const double s2 = std::sqrt(2.0);
    Eigen::Matrix<double, 6, 6> rep;
    for (int I = 0; I < 6; ++I)
        for (int J = 0; J < 6; ++J) {
            const double wi = I < 3 ? 1.0 : s2;
            const double wj = J < 3 ? 1.0 : s2;
            rep(I, J) = wi * wj * (*this)(idx[I][0], idx[I][1], idx[J][0], idx[J][1]);
        }
    return rep;
}

geom::Vec3 PiezoTensor::contract(const Mat3& m) const {
    geom::Vec3 r = geom::Vec3::Zero();
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r[k] += (*this)(k, i, j) * m(i, j);
    return r;
}

void MaterialConstants::validate() const {
    if (!(mu > 0.0)) throw MaterialError("material: mu must be positive");
    if (!(3.0 * lambda + 2.0 * mu > 0.0))
        throw MaterialError("material: 3*lambda + 2*mu must be positive");
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (P_hat(k, i, j) != P_hat(k, j, i))
                    throw MaterialError("material: P_hat must be symmetric in its strain indices");
    if ((E_hat - E_hat.transpose()).cwiseAbs().maxCoeff() > 0.0)
        throw MaterialError("material: E_hat must be symmetric");
    Eigen::SelfAdjointEigenSolver<Mat3> es(E_hat);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw MaterialError("material: E_hat must be positive definite");
}

ElasticTensor isotropic_elasticity(double lambda, double mu) {
    if (!(mu > 0.0) || !(3.0 * lambda + 2.0 * mu > 0.0))
        throw MaterialError("isotropic_elasticity: moduli violate positivity");
    ElasticTensor A;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l)
                    A(i, j, k, l) = lambda * (i == j) * (k == l) +
                                    mu * ((i == k) * (j == l) + (i == l) * (j == k));
    return A;
}

TransformedTensors transform_tensors(const PointFrame& frame, const MaterialConstants& mat) {
    TransformedTensors t;
    const Mat3& mc = frame.metric_con;
    for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q)
            for (int r = 0; r < 3; ++r)
                for (int s = 0; s < 3; ++s)
                    t.A(p, q, r, s) = mat.lambda * mc(p, q) * mc(r, s) +
                                      mat.mu * (mc(p, r) * mc(q, s) + mc(p, s) * mc(q, r));
    const Mat3& G = frame.g_con;  // rows are g^p
    for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q)
            for (int r = 0; r < 3; ++r) {
                double s = 0.0;
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j)
                        for (int k = 0; k < 3; ++k)
                            s += mat.P_hat(i, j, k) * G(p, i) * G(q, j) * G(r, k);
                t.P(p, q, r) = s;
            }
    t.E = G * mat.E_hat * G.transpose();
    return t;
}

LimitCoefficients limit_coefficients(const MaterialConstants& mat, BendingMode mode) {
    mat.validate();
    const double lambda = mat.lambda;
    const double mu = mat.mu;
    if (!(lambda + 2.0 * mu > 0.0))
        throw MaterialError("limit_coefficients: lambda + 2*mu must be positive");
    if (!(lambda + 4.0 * mu > 0.0))
        throw MaterialError("limit_coefficients: lambda + 4*mu must be positive");

    LimitCoefficients c;
    c.mode = mode;
    const auto& P = mat.P_hat;
    c.p33 = (P(2, 0, 2) * P(2, 0, 2) + P(2, 1, 2) * P(2, 1, 2)) / mu +
            P(2, 2, 2) * P(2, 2, 2) / (lambda + 2.0 * mu) + mat.E_hat(2, 2);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            c.p3ab(a, b) = P(2, a, b) - lambda / (lambda + 2.0 * mu) * P(2, 2, 2) * (a == b);

    const double denom = (mode == BendingMode::Standard) ? (lambda + 2.0 * mu)
                                                         : (lambda + 4.0 * mu);
    c.bend_lapl = 4.0 * lambda * mu / (3.0 * denom);
    c.bend_hess = 4.0 * mu / 3.0;
    c.mem_trace = 4.0 * lambda * mu / (lambda + 2.0 * mu);
    c.mem_dev = 4.0 * mu;
    return c;
}

Mat2 bending_tensor(const LimitCoefficients& coeffs, const Mat2& z3_hessian) {
    const double lapl = z3_hessian.trace();
    return -(coeffs.bend_lapl * lapl * Mat2::Identity() + coeffs.bend_hess * z3_hessian);
}

Mat2 membrane_tensor(const MaterialConstants& mat, const Mat2& etilde) {
    const double c1 = 4.0 * mat.lambda * mat.mu / (mat.lambda + 2.0 * mat.mu);
    const double c2 = 4.0 * mat.mu;
    return c1 * etilde.trace() * Mat2::Identity() + c2 * etilde;
}

}  // namespace pzshell::material
