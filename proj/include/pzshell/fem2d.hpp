#pragma once

#include "pzshell/eigsolve.hpp"
#include "pzshell/fem3d.hpp"
#include "pzshell/geometry.hpp"
#include "pzshell/material.hpp"
#include "pzshell/mesh.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <memory>
#include <vector>

namespace pzshell::fem2d {

using eig::Matrix;
using eig::SparseMat;
using eig::Vector;
using geom::Mat2;
using geom::MidsurfaceGeometry;
using geom::Vec2;
using material::LimitCoefficients;
using material::MaterialConstants;
using mesh::Mesh2;

class LimitError : public std::runtime_error {
public:
    explicit LimitError(const std::string& what) : std::runtime_error(what) {}
};

/// Free-DOF numbering of the two discrete spaces: the C1 bicubic deflection
/// space (per-node w, w_x, w_y, w_xy) and the bilinear membrane space.
struct DofMap2 {
    std::vector<int> v3_index;  // 4*node+type -> free index or -1
    std::vector<int> vh_index;  // 2*node+comp -> free index or -1
    int n3 = 0;
    int nh = 0;

    static DofMap2 build(const Mesh2& m);
};

/// Assembled limit-model blocks on free DOFs. K3 carries bending, the
/// piezoelectric stiffening and the deflection-deflection membrane part;
/// the in-plane membrane block and its coupling to the deflection complete
/// the coupled quadratic form whose Schur complement is the condensed
/// bending operator.
struct LimitSystem {
    Mesh2 mesh;
    MidsurfaceGeometry geometry = MidsurfaceGeometry::flat();
    MaterialConstants material;
    LimitCoefficients coeffs;
    DofMap2 dofs;
    SparseMat K3;    // n3 x n3
    SparseMat K_hh;  // nh x nh, SPD
    SparseMat K_h3;  // nh x n3 coupling (membrane test, deflection trial)
    SparseMat M3;    // n3 x n3 deflection mass, SPD
};

LimitSystem assemble_limit(const Mesh2& m, const LimitCoefficients& coeffs,
                           const MaterialConstants& mat, const MidsurfaceGeometry& geom);

/// Condensed bending operator b = K3 - K_h3^T K_hh^{-1} K_h3 applied through a
/// sparse factorization of the membrane block.
class CondensedBending {
public:
    explicit CondensedBending(const LimitSystem& sys);

    int n() const { return sys_->dofs.n3; }
    Vector apply(const Vector& z3) const;
    /// Horizontal minimizer for a given deflection (free membrane DOFs).
    Vector recover_membrane(const Vector& z3) const;
    const LimitSystem& system() const { return *sys_; }

    eig::SymmetricPencil pencil() const;
    Matrix dense(int cap = 4000) const;
    double symmetry_residual(int cap = 4000) const;

private:
    const LimitSystem* sys_;
    Eigen::SimplicialLLT<SparseMat> Khh_llt_;
};

/// Right-hand-side convention of the membrane problem. The covariant form
/// pairs with the curvature-deflection coupling used in the condensed
/// operator; the gradient-product form is the alternative printed shape of
/// the same equation (the two solutions sum to the elliptic projection of
/// z3 * grad theta).
enum class MembraneRhs { GradientProduct, Covariant };

/// Solves the membrane problem for a given deflection (full nodal deflection
/// DOF vector); returns the full nodal membrane vector (constrained entries
/// zero).
Vector membrane_solve(const Mesh2& m, const MaterialConstants& mat,
                      const MidsurfaceGeometry& geom, const Vector& z3_nodal,
                      MembraneRhs rhs = MembraneRhs::GradientProduct);

/// Residual of the discrete membrane equation for a candidate solution.
double membrane_residual(const Mesh2& m, const MaterialConstants& mat,
                         const MidsurfaceGeometry& geom, const Vector& z3_nodal,
                         const Vector& zh_nodal, MembraneRhs rhs);

struct LimitEigenReport {
    Vector xi;                      // eigenvalues of the condensed plate problem
    Vector xi_bulk;                 // same eigenvalues in the thickness-integrated
                                    // mass normalization (factor 1/2)
    std::vector<Vector> z3_modes;   // full nodal deflection DOF vectors
    std::vector<Vector> zh_modes;   // full nodal membrane vectors (covariant recovery)
    double gram_residual = 0.0;     // max |z3_m . M3 z3_n - delta| over pairs
    Vector solver_residuals;
};

LimitEigenReport solve_limit_eigen(const LimitSystem& sys, int m_count,
                                   eig::SolveMode mode = eig::SolveMode::ShiftInvert,
                                   std::uint64_t seed = 1);

/// Pointwise evaluator of a bicubic nodal field (value, gradient, Hessian).
class DeflectionField {
public:
    DeflectionField(const Mesh2& m, Vector nodal);
    double value(double x, double y) const;
    Vec2 gradient(double x, double y) const;
    Mat2 hessian(double x, double y) const;
    const Vector& nodal() const { return nodal_; }

private:
    Mesh2 mesh_;
    Vector nodal_;
};

/// Pointwise evaluator of a bilinear nodal vector field.
class MembraneField {
public:
    MembraneField(const Mesh2& m, Vector nodal);
    Vec2 value(double x, double y) const;
    Mat2 gradient(double x, double y) const;  // (c, d) = d_d u_c
    const Vector& nodal() const { return nodal_; }

private:
    Mesh2 mesh_;
    Vector nodal_;
};

/// Limit displacement reconstruction u = (z_a - x3 d_a z3, z3) with full
/// gradient evaluation on the scaled domain.
struct KLField {
    std::shared_ptr<DeflectionField> z3;
    std::shared_ptr<MembraneField> zh;

    geom::Vec3 value(const geom::Vec3& x) const;
    geom::Mat3 gradient(const geom::Vec3& x) const;  // (c, j) = d_j u_c
};

KLField reconstruct_kl(const Mesh2& m, const Vector& zh_nodal, const Vector& z3_nodal);

/// Which closed form of the limit potential to evaluate. The compact form is
/// quadratic in x3 with coefficient p3ab/p33; the constructed form follows the
/// antiderivative of the limit gradient relation together with its boundary
/// constants, which halves the coefficient. Both vanish at x3 = +-1.
enum class PotentialVariant { Compact, Constructed };

struct PotentialField {
    std::shared_ptr<DeflectionField> z3;
    LimitCoefficients coeffs;
    PotentialVariant variant = PotentialVariant::Constructed;

    double value(const geom::Vec3& x) const;
    double d3(const geom::Vec3& x) const;
};

PotentialField reconstruct_potential(const LimitCoefficients& coeffs, const Mesh2& m,
                                     const Vector& z3_nodal,
                                     PotentialVariant variant = PotentialVariant::Constructed);

/// L2 residuals of the limit constitutive relations evaluated on a scaled 3D
/// eigensolution: the shear relation mu K_a3 + P(2,a,2) d3(phi) = 0 and the
/// thickness relation (lam+2mu) K_33 + P(2,2,2) d3(phi) + lam K_bb = 0
/// (reported in its normalized form). Strains are taken from the element's
/// assumed-strain field.
struct StrainRelationReport {
    double shear_residual = 0.0;
    double thickness_residual = 0.0;
    double trace_identity_residual = 0.0;  // lam K_bb + (lam+2mu) K_33 + P333 d3 phi
    double shear_norm = 0.0;               // norm of K_a3 itself
    double thickness_target_norm = 0.0;
};

StrainRelationReport limit_strain_relations(const fem3d::CoupledSystem& sys,
                                            const Vector& u_free, const Vector& phi_free);

}  // namespace pzshell::fem2d
