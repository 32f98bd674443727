#pragma once

#include "pzshell/geometry.hpp"

#include <Eigen/Dense>

#include <array>
#include <stdexcept>

namespace pzshell::material {

using geom::Mat2;
using geom::Mat3;
using geom::PointFrame;

class MaterialError : public std::runtime_error {
public:
    explicit MaterialError(const std::string& what) : std::runtime_error(what) {}
};

/// Rank-4 elasticity tensor with full index access.
struct ElasticTensor {
    std::array<double, 81> a{};

    double& operator()(int i, int j, int k, int l) {
        return a[static_cast<std::size_t>(((i * 3 + j) * 3 + k) * 3 + l)];
    }
    double operator()(int i, int j, int k, int l) const {
        return a[static_cast<std::size_t>(((i * 3 + j) * 3 + k) * 3 + l)];
    }

    /// Double contraction A : M over the last index pair.
    Mat3 contract(const Mat3& m) const;
    /// Representation on the 6-dimensional space of symmetric matrices with an
    /// orthonormal basis; its eigenvalues are the coercivity constants.
    Eigen::Matrix<double, 6, 6> symmetric_representation() const;
};

/// Piezoelectric tensor P[k][i][j], symmetric in (i,j).
struct PiezoTensor {
    std::array<double, 27> a{};
    double& operator()(int k, int i, int j) {
        return a[static_cast<std::size_t>((k * 3 + i) * 3 + j)];
    }
    double operator()(int k, int i, int j) const {
        return a[static_cast<std::size_t>((k * 3 + i) * 3 + j)];
    }
    /// Contraction over (i,j): returns vector with components P[k] : M.
    geom::Vec3 contract(const Mat3& m) const;
};

/// Homogeneous material data: Lame constants plus the constant piezoelectric
/// and dielectric tensors.
struct MaterialConstants {
    double lambda = 0.0;
    double mu = 0.0;
    PiezoTensor P_hat;
    Mat3 E_hat = Mat3::Identity();

    /// Enforces mu > 0, 3*lambda + 2*mu > 0, symmetric positive definite
    /// E_hat and the (i,j) symmetry of P_hat. Throws MaterialError.
    void validate() const;
};

/// Flat-limit isotropic elasticity tensor
///   A^{ijkl} = lambda d^{ij} d^{kl} + mu (d^{ik} d^{jl} + d^{il} d^{jk}).
ElasticTensor isotropic_elasticity(double lambda, double mu);

/// Material tensors transformed to the parametric domain at one point:
/// elasticity from the contravariant metric, P and E contracted against the
/// contravariant basis vectors.
struct TransformedTensors {
    ElasticTensor A;
    PiezoTensor P;
    Mat3 E;
};

TransformedTensors transform_tensors(const PointFrame& frame, const MaterialConstants& mat);

/// Coefficient set of the two-dimensional limit model. The bending pair is
///   m_ab(z) = -(bend_lapl * lapl(z3) d_ab + bend_hess * d_ab z3)
/// and the membrane pair
///   n_ab(z) = mem_trace * tr(et) d_ab + mem_dev * et_ab.
enum class BendingMode { AsPrinted, Standard };

struct LimitCoefficients {
    double p33 = 0.0;
    Mat2 p3ab = Mat2::Zero();
    double bend_lapl = 0.0;   // 4*lambda*mu / (3*(lambda+4*mu)) or /(3*(lambda+2*mu))
    double bend_hess = 0.0;   // 4*mu/3
    double mem_trace = 0.0;   // 4*lambda*mu/(lambda+2*mu)
    double mem_dev = 0.0;     // 4*mu
    BendingMode mode = BendingMode::Standard;
};

LimitCoefficients limit_coefficients(const MaterialConstants& mat,
                                     BendingMode mode = BendingMode::Standard);

/// Limit bending moment tensor m_ab from the Hessian of the deflection.
Mat2 bending_tensor(const LimitCoefficients& coeffs, const Mat2& z3_hessian);

/// Limit membrane stress tensor n_ab from a midsurface strain.
Mat2 membrane_tensor(const MaterialConstants& mat, const Mat2& etilde);

}  // namespace pzshell::material
