#pragma once

#include "pzshell/eigsolve.hpp"
#include "pzshell/geometry.hpp"
#include "pzshell/material.hpp"
#include "pzshell/mesh.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <array>
#include <memory>
#include <vector>

namespace pzshell::fem3d {

using eig::Matrix;
using eig::SparseMat;
using eig::Vector;
using geom::Mat3;
using geom::MidsurfaceGeometry;
using geom::PointFrame;
using geom::Vec3;
using material::MaterialConstants;
using mesh::Mesh3;

class AssemblyError : public std::runtime_error {
public:
    explicit AssemblyError(const std::string& what) : std::runtime_error(what) {}
};

/// Free-DOF numbering after symmetric elimination of the essential conditions:
/// displacements vanish on the clamped lateral faces, the potential on both
/// horizontal faces and the electrode sides.
struct DofMap3 {
    std::vector<int> u_index;    // 3*node+comp -> free index or -1
    std::vector<int> phi_index;  // node -> free index or -1
    std::vector<int> u_node;     // free u index -> node
    std::vector<int> u_comp;     // free u index -> component
    std::vector<int> phi_node;   // free phi index -> node
    int n_u = 0;
    int n_phi = 0;

    static DofMap3 build(const Mesh3& m);
};

struct AssemblyOptions {
    /// Tensor Gauss order per direction; 0 selects 2 for flat shapes and 3 otherwise.
    int quadrature = 0;
    /// Assumed transverse-shear interpolation plus an enhanced thickness
    /// strain; needed for thin-limit sweeps on coarse meshes. Disable to get
    /// the plain fully integrated trilinear element.
    bool assumed_strain = true;
};

/// Trilinear shape data at one local point (coordinates in [0,1]^3);
/// derivatives are with respect to the scaled physical coordinates.
struct ShapeEval {
    Eigen::Matrix<double, 8, 1> N;
    Eigen::Matrix<double, 8, 3> dN;
};

ShapeEval shape_trilinear(const Mesh3& m, double xi, double eta, double zeta);

/// Scaled covariant strain rows for the 24 element displacement DOFs
/// (node-major, component-minor) at one quadrature point.
using StrainRows = std::array<Mat3, 24>;
StrainRows strain_rows(const PointFrame& frame, double eps, const ShapeEval& se);

/// Per-element quadrature cache: frames, transformed tensors, weights, strain
/// rows with the assumed-strain substitutions applied, and the enhanced
/// thickness-strain coupling blocks. Shared by assembly and by the
/// postprocessing diagnostics so both see the same discrete strain field.
class ElementKernel {
public:
    ElementKernel(const Mesh3& m, const MidsurfaceGeometry& geom,
                  const MaterialConstants& mat, double eps, int ei, int ej, int ek,
                  const AssemblyOptions& opts);

    int nq() const { return nq_; }
    int points() const { return nq_ * nq_ * nq_; }
    int flat_index(int q1, int q2, int q3) const { return (q3 * nq_ + q2) * nq_ + q1; }

    const PointFrame& frame(int q) const { return frames_[static_cast<std::size_t>(q)]; }
    const material::TransformedTensors& tensors(int q) const {
        return tensors_[static_cast<std::size_t>(q)];
    }
    double weight(int q) const { return weights_[static_cast<std::size_t>(q)]; }  // includes sqrt g
    const StrainRows& rows(int q) const { return rows_[static_cast<std::size_t>(q)]; }
    const ShapeEval& shape(int q) const { return shapes_[static_cast<std::size_t>(q)]; }
    Vec3 point(int q) const { return points_[static_cast<std::size_t>(q)]; }
    /// Local quadrature coordinates in [0,1]^3.
    Vec3 local(int q) const { return locals_[static_cast<std::size_t>(q)]; }

    bool enhanced() const { return enhanced_; }
    /// Values of the four enhanced thickness-strain modes at a quadrature point.
    Eigen::Vector4d enhanced_modes(int q) const;
    const Eigen::Matrix<double, 24, 4>& K_ua() const { return K_ua_; }
    const Eigen::Matrix4d& K_aa() const { return K_aa_; }
    /// Internal mode amplitudes recovered from element displacements.
    Eigen::Vector4d recover_modes(const Eigen::Matrix<double, 24, 1>& ue) const;

    /// Element matrices: stiffness (EAS-condensed), piezo coupling, dielectric,
    /// mass with the thickness-graded component weights.
    void element_matrices(Eigen::Matrix<double, 24, 24>& Ke, Eigen::Matrix<double, 24, 8>& Ce,
                          Eigen::Matrix<double, 8, 8>& Ee,
                          Eigen::Matrix<double, 24, 24>& Me) const;

    /// eps-graded potential gradient rows (eps d_1, eps d_2, d_3) per phi DOF.
    Eigen::Matrix<double, 8, 3> graded_phi_gradients(int q) const;

private:
    double eps_;
    int nq_;
    bool enhanced_;
    const MaterialConstants* mat_;
    std::vector<PointFrame> frames_;
    std::vector<material::TransformedTensors> tensors_;
    std::vector<double> weights_;
    std::vector<StrainRows> rows_;
    std::vector<ShapeEval> shapes_;
    std::vector<Vec3> points_;
    std::vector<Vec3> locals_;
    Eigen::Matrix<double, 24, 4> K_ua_ = Eigen::Matrix<double, 24, 4>::Zero();
    Eigen::Matrix4d K_aa_ = Eigen::Matrix4d::Zero();
};

/// Assembled coupled blocks on free DOFs, all symmetric-eliminated:
///   A_uu (elastic), E_phph (dielectric, SPD), C_uph (coupling), M (mass).
struct CoupledSystem {
    Mesh3 mesh;
    MidsurfaceGeometry geometry = MidsurfaceGeometry::flat();
    MaterialConstants material;
    double eps = 0.0;
    AssemblyOptions options;
    DofMap3 dofs;
    SparseMat A_uu;
    SparseMat E_phph;
    SparseMat C_uph;
    SparseMat M;
};

CoupledSystem assemble_coupled(const Mesh3& m, const MidsurfaceGeometry& geom,
                               const MaterialConstants& mat, double eps,
                               const AssemblyOptions& opts = {});

/// Condensed displacement operator B = A + C E^{-1} C^T realized through a
/// sparse Cholesky factorization of the dielectric block, with the potential
/// recovery map u -> E^{-1} C^T u.
class CondensedOperator {
public:
    explicit CondensedOperator(const CoupledSystem& sys);

    int n() const { return sys_->dofs.n_u; }
    Vector apply(const Vector& u) const;
    Vector recover_potential(const Vector& u) const;
    const SparseMat& mass() const { return sys_->M; }
    const CoupledSystem& system() const { return *sys_; }

    /// Pencil with a block-factorized shifted solver for shift-invert.
    eig::SymmetricPencil pencil() const;

    Matrix dense(int cap = 4000) const;
    /// max|B - B^T| / max|B| on the densified operator.
    double symmetry_residual(int cap = 4000) const;
    /// Smallest pivot of the dielectric factorization (diagnostic).
    double smallest_dielectric_pivot() const { return smallest_pivot_; }

private:
    const CoupledSystem* sys_;
    Eigen::SimplicialLLT<SparseMat> E_llt_;
    double smallest_pivot_ = 0.0;
};

CondensedOperator condense_potential(const CoupledSystem& sys);

/// One eigenpair of the scaled problem together with its recovered potential.
struct ScaledEigenpair {
    double xi = 0.0;
    Vector u;    // free displacement DOFs
    Vector phi;  // free potential DOFs
};

/// Same data in physical-domain scaling: eigenvalue by eps^2; in-plane
/// displacement components by eps^2, the transverse one by eps, the potential
/// by eps^3.
struct PhysicalEigenpair {
    double xi = 0.0;
    Vector u;
    Vector phi;
};

PhysicalEigenpair unscale(const DofMap3& dofs, const ScaledEigenpair& pair, double eps);
ScaledEigenpair rescale(const DofMap3& dofs, const PhysicalEigenpair& pair, double eps);

/// Rayleigh quotient v^T B v / v^T M v of the condensed pencil.
double rayleigh_quotient(const CondensedOperator& op, const Vector& v);

/// Scalar plate field with first derivatives, used to build bending-type test
/// displacements (-x3 w_x, -x3 w_y, w) on the 3D mesh nodes.
struct PlateField {
    std::function<double(double, double)> value;
    std::function<geom::Vec2(double, double)> gradient;
};

Vector kirchhoff_test_field(const CoupledSystem& sys, const PlateField& w);

/// Smallest generalized eigenvalue of the leading-strain Gram against the
/// full H1 Gram over the clamped displacement space; its inverse square root
/// is the empirical constant of the generalized Korn inequality.
double korn_smallest_eigenvalue(const Mesh3& m, const MidsurfaceGeometry& geom,
                                std::uint64_t seed = 1);

}  // namespace pzshell::fem3d
