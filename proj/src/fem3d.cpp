#include "pzshell/fem3d.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace pzshell::fem3d {

namespace {

struct GaussRule {
    std::array<double, 3> p{};
    std::array<double, 3> w{};
    int n = 0;
};

GaussRule gauss01(int n) {
    GaussRule r;
    r.n = n;
    if (n == 2) {
        const double a = 0.5 - 0.5 / std::sqrt(3.0);
        r.p = {a, 1.0 - a, 0.0};
        r.w = {0.5, 0.5, 0.0};
    } else if (n == 3) {
        const double b = 0.5 * std::sqrt(3.0 / 5.0);
        r.p = {0.5 - b, 0.5, 0.5 + b};
        r.w = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
    } else {
        throw AssemblyError("gauss01: unsupported order " + std::to_string(n));
    }
    return r;
}

}  // namespace

DofMap3 DofMap3::build(const Mesh3& m) {
    DofMap3 d;
    d.u_index.assign(static_cast<std::size_t>(3 * m.node_count()), -1);
    d.phi_index.assign(static_cast<std::size_t>(m.node_count()), -1);
    for (int k = 0; k <= m.nz; ++k)
        for (int j = 0; j <= m.ny; ++j)
            for (int i = 0; i <= m.nx; ++i) {
                const int n = m.node(i, j, k);
                if (!m.node_clamped(i, j)) {
                    for (int c = 0; c < 3; ++c) {
                        d.u_index[static_cast<std::size_t>(3 * n + c)] = d.n_u++;
                        d.u_node.push_back(n);
                        d.u_comp.push_back(c);
                    }
                }
                if (!m.node_grounded(i, j, k)) {
                    d.phi_index[static_cast<std::size_t>(n)] = d.n_phi++;
                    d.phi_node.push_back(n);
                }
            }
    return d;
}

ShapeEval shape_trilinear(const Mesh3& m, double xi, double eta, double zeta) {
    ShapeEval s;
    const double h[3] = {m.hx(), m.hy(), m.hz()};
    for (int a = 0; a < 8; ++a) {
        const int dx = a & 1, dy = (a >> 1) & 1, dz = a >> 2;
        const double fx = dx ? xi : 1.0 - xi;
        const double fy = dy ? eta : 1.0 - eta;
        const double fz = dz ? zeta : 1.0 - zeta;
        const double gx = dx ? 1.0 : -1.0;
        const double gy = dy ? 1.0 : -1.0;
        const double gz = dz ? 1.0 : -1.0;
        s.N[a] = fx * fy * fz;
        s.dN(a, 0) = gx * fy * fz / h[0];
        s.dN(a, 1) = fx * gy * fz / h[1];
        s.dN(a, 2) = fx * fy * gz / h[2];
    }
    return s;
}

StrainRows strain_rows(const PointFrame& frame, double eps, const ShapeEval& se) {
    StrainRows rows;
    for (int a = 0; a < 8; ++a)
        for (int c = 0; c < 3; ++c) {
            Vec3 v = Vec3::Zero();
            v[c] = se.N[a];
            Mat3 grad = Mat3::Zero();
            grad.row(c) = se.dN.row(a);
            rows[static_cast<std::size_t>(3 * a + c)] =
                geom::scaled_strain_kernel(frame, eps, v, grad);
        }
    return rows;
}

ElementKernel::ElementKernel(const Mesh3& m, const MidsurfaceGeometry& geom,
                             const MaterialConstants& mat, double eps, int ei, int ej,
                             int ek, const AssemblyOptions& opts)
    : eps_(eps), mat_(&mat) {
    nq_ = opts.quadrature > 0 ? opts.quadrature : (geom.is_flat() ? 2 : 3);
    enhanced_ = opts.assumed_strain;
    const GaussRule g = gauss01(nq_);
    const double x0 = ei * m.hx(), y0 = ej * m.hy(), z0 = -1.0 + ek * m.hz();
    const int np = points();
    frames_.reserve(static_cast<std::size_t>(np));
    tensors_.reserve(static_cast<std::size_t>(np));
    weights_.reserve(static_cast<std::size_t>(np));
    rows_.reserve(static_cast<std::size_t>(np));
    shapes_.reserve(static_cast<std::size_t>(np));
    points_.reserve(static_cast<std::size_t>(np));
    locals_.reserve(static_cast<std::size_t>(np));

    // Tying rows for the assumed transverse shear, one set per thickness level:
    // e_13 at the midpoints of the eta = 0,1 edges (linear in eta), e_23 at the
    // midpoints of the xi = 0,1 edges (linear in xi).
    std::vector<std::array<Eigen::Matrix<double, 24, 1>, 2>> tie13(
        static_cast<std::size_t>(nq_));
    std::vector<std::array<Eigen::Matrix<double, 24, 1>, 2>> tie23(
        static_cast<std::size_t>(nq_));
    if (enhanced_) {
        for (int q3 = 0; q3 < nq_; ++q3) {
            const double x3 = z0 + g.p[static_cast<std::size_t>(q3)] * m.hz();
            auto shear_row = [&](double txi, double teta, int comp) {
                const ShapeEval se = shape_trilinear(m, txi, teta, g.p[static_cast<std::size_t>(q3)]);
                const PointFrame fr = geom::chart_frame(
                    geom, eps, Vec3(x0 + txi * m.hx(), y0 + teta * m.hy(), x3));
                const StrainRows rw = strain_rows(fr, eps, se);
                Eigen::Matrix<double, 24, 1> row;
                for (int d = 0; d < 24; ++d) row[d] = rw[static_cast<std::size_t>(d)](comp, 2);
                return row;
            };
            tie13[static_cast<std::size_t>(q3)] = {shear_row(0.5, 0.0, 0),
                                                   shear_row(0.5, 1.0, 0)};
            tie23[static_cast<std::size_t>(q3)] = {shear_row(0.0, 0.5, 1),
                                                   shear_row(1.0, 0.5, 1)};
        }
    }

    for (int q3 = 0; q3 < nq_; ++q3)
        for (int q2 = 0; q2 < nq_; ++q2)
            for (int q1 = 0; q1 < nq_; ++q1) {
                const double lx = g.p[static_cast<std::size_t>(q1)];
                const double ly = g.p[static_cast<std::size_t>(q2)];
                const double lz = g.p[static_cast<std::size_t>(q3)];
                const Vec3 x(x0 + lx * m.hx(), y0 + ly * m.hy(), z0 + lz * m.hz());
                const PointFrame fr = geom::chart_frame(geom, eps, x);
                const double w = g.w[static_cast<std::size_t>(q1)] *
                                 g.w[static_cast<std::size_t>(q2)] *
                                 g.w[static_cast<std::size_t>(q3)] * m.hx() * m.hy() *
                                 m.hz() * fr.sqrt_det;
                const ShapeEval se = shape_trilinear(m, lx, ly, lz);
                StrainRows rows = strain_rows(fr, eps, se);
                if (enhanced_) {
                    const auto& t13 = tie13[static_cast<std::size_t>(q3)];
                    const auto& t23 = tie23[static_cast<std::size_t>(q3)];
                    for (int d = 0; d < 24; ++d) {
                        const double v13 = (1.0 - ly) * t13[0][d] + ly * t13[1][d];
                        const double v23 = (1.0 - lx) * t23[0][d] + lx * t23[1][d];
                        auto& e = rows[static_cast<std::size_t>(d)];
                        e(0, 2) = e(2, 0) = v13;
                        e(1, 2) = e(2, 1) = v23;
                    }
                }
                frames_.push_back(fr);
                tensors_.push_back(material::transform_tensors(fr, mat));
                weights_.push_back(w);
                rows_.push_back(rows);
                shapes_.push_back(se);
                points_.push_back(x);
                locals_.push_back(Vec3(lx, ly, lz));
            }

    if (enhanced_) {
        for (int q = 0; q < np; ++q) {
            const auto modes = enhanced_modes(q);
            const auto& A = tensors_[static_cast<std::size_t>(q)].A;
            const double w = weights_[static_cast<std::size_t>(q)];
            // A : (mode e_33 unit tensor); only the (.,.,3,3) slice is needed.
            Mat3 A33 = Mat3::Zero();
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) A33(i, j) = A(i, j, 2, 2);
            const double a3333 = A33(2, 2);
            for (int d = 0; d < 24; ++d) {
                double s = 0.0;
                const Mat3& e = rows_[static_cast<std::size_t>(q)][static_cast<std::size_t>(d)];
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) s += e(i, j) * A33(i, j);
                for (int mmode = 0; mmode < 4; ++mmode)
                    K_ua_(d, mmode) += w * s * modes[mmode];
            }
            K_aa_ += w * a3333 * modes * modes.transpose();
        }
    }
}

Eigen::Vector4d ElementKernel::enhanced_modes(int q) const {
    const Vec3 l = locals_[static_cast<std::size_t>(q)];
    const double ell = 2.0 * l[2] - 1.0;
    const double X = 2.0 * l[0] - 1.0;
    const double Y = 2.0 * l[1] - 1.0;
    return Eigen::Vector4d(ell, ell * X, ell * Y, ell * X * Y);
}

Eigen::Vector4d ElementKernel::recover_modes(const Eigen::Matrix<double, 24, 1>& ue) const {
    if (!enhanced_) return Eigen::Vector4d::Zero();
    return -K_aa_.ldlt().solve(K_ua_.transpose() * ue);
}

Eigen::Matrix<double, 8, 3> ElementKernel::graded_phi_gradients(int q) const {
    const ShapeEval& se = shapes_[static_cast<std::size_t>(q)];
    Eigen::Matrix<double, 8, 3> g;
    g.col(0) = eps_ * se.dN.col(0);
    g.col(1) = eps_ * se.dN.col(1);
    g.col(2) = se.dN.col(2);
    return g;
}

void ElementKernel::element_matrices(Eigen::Matrix<double, 24, 24>& Ke,
                                     Eigen::Matrix<double, 24, 8>& Ce,
                                     Eigen::Matrix<double, 8, 8>& Ee,
                                     Eigen::Matrix<double, 24, 24>& Me) const {
    Ke.setZero();
    Ce.setZero();
    Ee.setZero();
    Me.setZero();
    const double eps2 = eps_ * eps_;
    for (int q = 0; q < points(); ++q) {
        const double w = weights_[static_cast<std::size_t>(q)];
        const auto& T = tensors_[static_cast<std::size_t>(q)];
        const auto& rw = rows_[static_cast<std::size_t>(q)];
        std::array<Mat3, 24> stress;
        for (int d = 0; d < 24; ++d)
            stress[static_cast<std::size_t>(d)] = T.A.contract(rw[static_cast<std::size_t>(d)]);
        for (int d = 0; d < 24; ++d)
            for (int e = d; e < 24; ++e) {
                double s = 0.0;
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j)
                        s += stress[static_cast<std::size_t>(d)](i, j) *
                             rw[static_cast<std::size_t>(e)](i, j);
                Ke(d, e) += w * s;
                if (e != d) Ke(e, d) += w * s;
            }
        const Eigen::Matrix<double, 8, 3> gp = graded_phi_gradients(q);
        for (int b = 0; b < 8; ++b) {
            // P^{mij} (graded grad psi_b)_m
            Mat3 pg = Mat3::Zero();
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    for (int mdir = 0; mdir < 3; ++mdir)
                        pg(i, j) += T.P(mdir, i, j) * gp(b, mdir);
            for (int d = 0; d < 24; ++d) {
                double s = 0.0;
                const Mat3& e = rw[static_cast<std::size_t>(d)];
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) s += pg(i, j) * e(i, j);
                Ce(d, b) += w * s;
            }
        }
        Ee += w * gp * T.E * gp.transpose();
        const ShapeEval& se = shapes_[static_cast<std::size_t>(q)];
        for (int a = 0; a < 8; ++a)
            for (int b = 0; b < 8; ++b) {
                const double nn = w * se.N[a] * se.N[b];
                Me(3 * a + 0, 3 * b + 0) += eps2 * nn;
                Me(3 * a + 1, 3 * b + 1) += eps2 * nn;
                Me(3 * a + 2, 3 * b + 2) += nn;
            }
    }
    if (enhanced_) Ke -= K_ua_ * K_aa_.ldlt().solve(K_ua_.transpose());
}

CoupledSystem assemble_coupled(const Mesh3& m, const MidsurfaceGeometry& geom,
                               const MaterialConstants& mat, double eps,
                               const AssemblyOptions& opts) {
    if (!(eps > 0.0)) throw AssemblyError("assemble_coupled: eps must be positive");
    mat.validate();
    CoupledSystem sys;
    sys.mesh = m;
    sys.geometry = geom;
    sys.material = mat;
    sys.eps = eps;
    sys.options = opts;
    sys.dofs = DofMap3::build(m);

    using Trip = Eigen::Triplet<double>;
    std::vector<Trip> tA, tE, tC, tM;

    Eigen::Matrix<double, 24, 24> Ke, Me;
    Eigen::Matrix<double, 24, 8> Ce;
    Eigen::Matrix<double, 8, 8> Ee;
    std::array<int, 24> umap{};
    std::array<int, 8> pmap{};

    for (int ek = 0; ek < m.nz; ++ek)
        for (int ej = 0; ej < m.ny; ++ej)
            for (int ei = 0; ei < m.nx; ++ei) {
                const ElementKernel kern(m, geom, mat, eps, ei, ej, ek, opts);
                kern.element_matrices(Ke, Ce, Ee, Me);
                for (int a = 0; a < 8; ++a) {
                    const int n = m.element_node(ei, ej, ek, a);
                    for (int c = 0; c < 3; ++c)
                        umap[static_cast<std::size_t>(3 * a + c)] =
                            sys.dofs.u_index[static_cast<std::size_t>(3 * n + c)];
                    pmap[static_cast<std::size_t>(a)] =
                        sys.dofs.phi_index[static_cast<std::size_t>(n)];
                }
                for (int d = 0; d < 24; ++d) {
                    if (umap[static_cast<std::size_t>(d)] < 0) continue;
                    for (int e = 0; e < 24; ++e) {
                        if (umap[static_cast<std::size_t>(e)] < 0) continue;
                        tA.emplace_back(umap[static_cast<std::size_t>(d)],
                                        umap[static_cast<std::size_t>(e)], Ke(d, e));
                        tM.emplace_back(umap[static_cast<std::size_t>(d)],
                                        umap[static_cast<std::size_t>(e)], Me(d, e));
                    }
                    for (int b = 0; b < 8; ++b) {
                        if (pmap[static_cast<std::size_t>(b)] < 0) continue;
                        tC.emplace_back(umap[static_cast<std::size_t>(d)],
                                        pmap[static_cast<std::size_t>(b)], Ce(d, b));
                    }
                }
                for (int a = 0; a < 8; ++a) {
                    if (pmap[static_cast<std::size_t>(a)] < 0) continue;
                    for (int b = 0; b < 8; ++b) {
                        if (pmap[static_cast<std::size_t>(b)] < 0) continue;
                        tE.emplace_back(pmap[static_cast<std::size_t>(a)],
                                        pmap[static_cast<std::size_t>(b)], Ee(a, b));
                    }
                }
            }

    sys.A_uu.resize(sys.dofs.n_u, sys.dofs.n_u);
    sys.A_uu.setFromTriplets(tA.begin(), tA.end());
    sys.M.resize(sys.dofs.n_u, sys.dofs.n_u);
    sys.M.setFromTriplets(tM.begin(), tM.end());
    sys.C_uph.resize(sys.dofs.n_u, sys.dofs.n_phi);
    sys.C_uph.setFromTriplets(tC.begin(), tC.end());
    sys.E_phph.resize(sys.dofs.n_phi, sys.dofs.n_phi);
    sys.E_phph.setFromTriplets(tE.begin(), tE.end());
    return sys;
}

CondensedOperator::CondensedOperator(const CoupledSystem& sys) : sys_(&sys) {
    if (sys.dofs.n_phi > 0) {
        E_llt_.compute(sys.E_phph);
        if (E_llt_.info() != Eigen::Success)
            throw AssemblyError(
                "condense_potential: dielectric block factorization failed; "
                "meas(Gamma_eD)=0 or SPD invariant broken");
        smallest_pivot_ = E_llt_.matrixL().nestedExpression().diagonal().minCoeff();
        smallest_pivot_ *= smallest_pivot_;
        if (!(smallest_pivot_ > 0.0))
            throw AssemblyError("condense_potential: nonpositive pivot " +
                                std::to_string(smallest_pivot_) + " in dielectric block");
    }
}

Vector CondensedOperator::apply(const Vector& u) const {
    Vector r = sys_->A_uu * u;
    if (sys_->dofs.n_phi > 0)
        r += sys_->C_uph * E_llt_.solve(sys_->C_uph.transpose() * u);
    return r;
}

Vector CondensedOperator::recover_potential(const Vector& u) const {
    if (sys_->dofs.n_phi == 0) return Vector::Zero(0);
    return E_llt_.solve(sys_->C_uph.transpose() * u);
}

eig::SymmetricPencil CondensedOperator::pencil() const {
    eig::SymmetricPencil p;
    p.n = sys_->dofs.n_u;
    p.M = &sys_->M;
    p.apply_K = [this](const Vector& x) { return apply(x); };
    const CoupledSystem* sys = sys_;
    p.shifted_solver = [sys](double sigma) {
        // Block system [[A - sigma M, C], [C^T, -E]]; its u-part solve realizes
        // (B - sigma M)^{-1}. Quasi-definite, so an LDL^T without pivoting holds.
        const int nu = sys->dofs.n_u;
        const int nphi = sys->dofs.n_phi;
        SparseMat block(nu + nphi, nu + nphi);
        std::vector<Eigen::Triplet<double>> trips;
        auto add_block = [&trips](const SparseMat& mat, int r0, int c0, double scale) {
            for (int k = 0; k < mat.outerSize(); ++k)
                for (SparseMat::InnerIterator it(mat, k); it; ++it)
                    trips.emplace_back(r0 + static_cast<int>(it.row()),
                                       c0 + static_cast<int>(it.col()), scale * it.value());
        };
        add_block(sys->A_uu, 0, 0, 1.0);
        add_block(sys->M, 0, 0, -sigma);
        add_block(sys->C_uph, 0, nu, 1.0);
        SparseMat Ct = sys->C_uph.transpose();
        add_block(Ct, nu, 0, 1.0);
        add_block(sys->E_phph, nu, nu, -1.0);
        block.setFromTriplets(trips.begin(), trips.end());
        auto ldlt = std::make_shared<Eigen::SimplicialLDLT<SparseMat>>(block);
        if (ldlt->info() != Eigen::Success)
            throw eig::SolverError("fem3d: block factorization for shift-invert failed");
        return [ldlt, nu, nphi](const Vector& rhs) {
            Vector full = Vector::Zero(nu + nphi);
            full.head(nu) = rhs;
            Vector sol = ldlt->solve(full);
            return Vector(sol.head(nu));
        };
    };
    return p;
}

Matrix CondensedOperator::dense(int cap) const {
    const int nu = sys_->dofs.n_u;
    if (nu > cap)
        throw AssemblyError("CondensedOperator::dense: n=" + std::to_string(nu) +
                            " above cap " + std::to_string(cap));
    Matrix B = Matrix(sys_->A_uu);
    if (sys_->dofs.n_phi > 0) {
        Matrix Ct = Matrix(SparseMat(sys_->C_uph.transpose()));
        Matrix X = E_llt_.solve(Ct);
        B += Matrix(sys_->C_uph) * X;
    }
    return B;
}

double CondensedOperator::symmetry_residual(int cap) const {
    const Matrix B = dense(cap);
    const double denom = B.cwiseAbs().maxCoeff();
    return (B - B.transpose()).cwiseAbs().maxCoeff() / std::max(denom, 1e-300);
}

CondensedOperator condense_potential(const CoupledSystem& sys) {
    return CondensedOperator(sys);
}

PhysicalEigenpair unscale(const DofMap3& dofs, const ScaledEigenpair& pair, double eps) {
    PhysicalEigenpair out;
    out.xi = eps * eps * pair.xi;
    out.u = pair.u;
    for (int i = 0; i < out.u.size(); ++i)
        out.u[i] *= (dofs.u_comp[static_cast<std::size_t>(i)] < 2) ? eps * eps : eps;
    out.phi = eps * eps * eps * pair.phi;
    return out;
}

ScaledEigenpair rescale(const DofMap3& dofs, const PhysicalEigenpair& pair, double eps) {
    ScaledEigenpair out;
    out.xi = pair.xi / (eps * eps);
    out.u = pair.u;
    for (int i = 0; i < out.u.size(); ++i)
        out.u[i] /= (dofs.u_comp[static_cast<std::size_t>(i)] < 2) ? eps * eps : eps;
    out.phi = pair.phi / (eps * eps * eps);
    return out;
}

double rayleigh_quotient(const CondensedOperator& op, const Vector& v) {
    const double denom = v.dot(op.mass() * v);
    if (!(denom > 0.0))
        throw AssemblyError("rayleigh_quotient: zero mass norm");
    return v.dot(op.apply(v)) / denom;
}

Vector kirchhoff_test_field(const CoupledSystem& sys, const PlateField& w) {
    const Mesh3& m = sys.mesh;
    Vector v = Vector::Zero(sys.dofs.n_u);
    for (int k = 0; k <= m.nz; ++k)
        for (int j = 0; j <= m.ny; ++j)
            for (int i = 0; i <= m.nx; ++i) {
                const int n = m.node(i, j, k);
                const auto xyz = m.coords(i, j, k);
                const double wv = w.value(xyz[0], xyz[1]);
                const geom::Vec2 g = w.gradient(xyz[0], xyz[1]);
                const double val[3] = {-xyz[2] * g[0], -xyz[2] * g[1], wv};
                for (int c = 0; c < 3; ++c) {
                    const int idx = sys.dofs.u_index[static_cast<std::size_t>(3 * n + c)];
                    if (idx >= 0) v[idx] = val[c];
                }
            }
    return v;
}

double korn_smallest_eigenvalue(const Mesh3& m, const MidsurfaceGeometry& geom,
                                std::uint64_t seed) {
    const DofMap3 dofs = DofMap3::build(m);
    using Trip = Eigen::Triplet<double>;
    std::vector<Trip> tG, tH;
    const GaussRule g = gauss01(2);
    for (int ek = 0; ek < m.nz; ++ek)
        for (int ej = 0; ej < m.ny; ++ej)
            for (int ei = 0; ei < m.nx; ++ei) {
                Eigen::Matrix<double, 24, 24> Ge = Eigen::Matrix<double, 24, 24>::Zero();
                Eigen::Matrix<double, 24, 24> He = Eigen::Matrix<double, 24, 24>::Zero();
                const double x0 = ei * m.hx(), y0 = ej * m.hy();
                for (int q3 = 0; q3 < 2; ++q3)
                    for (int q2 = 0; q2 < 2; ++q2)
                        for (int q1 = 0; q1 < 2; ++q1) {
                            const double lx = g.p[static_cast<std::size_t>(q1)];
                            const double ly = g.p[static_cast<std::size_t>(q2)];
                            const double lz = g.p[static_cast<std::size_t>(q3)];
                            const double w = 0.125 * m.hx() * m.hy() * m.hz();
                            const ShapeEval se = shape_trilinear(m, lx, ly, lz);
                            const geom::Mat2 th =
                                geom.hessian(x0 + lx * m.hx(), y0 + ly * m.hy());
                            std::array<Mat3, 24> et;
                            for (int a = 0; a < 8; ++a)
                                for (int c = 0; c < 3; ++c) {
                                    Vec3 v = Vec3::Zero();
                                    v[c] = se.N[a];
                                    Mat3 grad = Mat3::Zero();
                                    grad.row(c) = se.dN.row(a);
                                    et[static_cast<std::size_t>(3 * a + c)] =
                                        geom::leading_strain_kernel(th, v, grad);
                                }
                            for (int d = 0; d < 24; ++d)
                                for (int e = 0; e < 24; ++e) {
                                    double s = 0.0;
                                    for (int i = 0; i < 3; ++i)
                                        for (int j = 0; j < 3; ++j)
                                            s += et[static_cast<std::size_t>(d)](i, j) *
                                                 et[static_cast<std::size_t>(e)](i, j);
                                    Ge(d, e) += w * s;
                                }
                            for (int a = 0; a < 8; ++a)
                                for (int b = 0; b < 8; ++b) {
                                    const double hh =
                                        w * (se.N[a] * se.N[b] + se.dN.row(a).dot(se.dN.row(b)));
                                    for (int c = 0; c < 3; ++c) He(3 * a + c, 3 * b + c) += hh;
                                }
                        }
                for (int a = 0; a < 8; ++a)
                    for (int b = 0; b < 8; ++b) {
                        const int na = m.element_node(ei, ej, ek, a);
                        const int nb = m.element_node(ei, ej, ek, b);
                        for (int ca = 0; ca < 3; ++ca)
                            for (int cb = 0; cb < 3; ++cb) {
                                const int ia =
                                    dofs.u_index[static_cast<std::size_t>(3 * na + ca)];
                                const int ib =
                                    dofs.u_index[static_cast<std::size_t>(3 * nb + cb)];
                                if (ia < 0 || ib < 0) continue;
                                tG.emplace_back(ia, ib, Ge(3 * a + ca, 3 * b + cb));
                                tH.emplace_back(ia, ib, He(3 * a + ca, 3 * b + cb));
                            }
                    }
            }
    SparseMat G(dofs.n_u, dofs.n_u), H(dofs.n_u, dofs.n_u);
    G.setFromTriplets(tG.begin(), tG.end());
    H.setFromTriplets(tH.begin(), tH.end());
    (void)seed;
    const Matrix Gd(G);
    const Matrix Hd(H);
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(Gd, Hd);
    if (ges.info() != Eigen::Success)
        throw AssemblyError("korn_smallest_eigenvalue: dense solve failed");
    return ges.eigenvalues().minCoeff();
}

}  // namespace pzshell::fem3d
