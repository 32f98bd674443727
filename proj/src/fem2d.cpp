#include "pzshell/fem2d.hpp"

#include <algorithm>
#include <cmath>

namespace pzshell::fem2d {

namespace {

struct Hermite1D {
    // basis order: (w at 0, w' at 0, w at 1, w' at 1); x = h * xi
    Eigen::Vector4d H, dH, ddH;
};

Hermite1D hermite1d(double xi, double h) {
    Hermite1D r;
    r.H << 1 - 3 * xi * xi + 2 * xi * xi * xi, h * (xi - 2 * xi * xi + xi * xi * xi),
        3 * xi * xi - 2 * xi * xi * xi, h * (-xi * xi + xi * xi * xi);
    r.dH << (-6 * xi + 6 * xi * xi) / h, (1 - 4 * xi + 3 * xi * xi),
        (6 * xi - 6 * xi * xi) / h, (-2 * xi + 3 * xi * xi);
    r.ddH << (-6 + 12 * xi) / (h * h), (-4 + 6 * xi) / h, (6 - 12 * xi) / (h * h),
        (-2 + 6 * xi) / h;
    return r;
}

// Bicubic tables for the 16 element DOFs at one local point: value, first and
// second derivatives. Element DOF order: node-major (00,10,01,11), per node
// (w, w_x, w_y, w_xy).
struct BfsEval {
    Eigen::Matrix<double, 16, 1> V, Dx, Dy, Dxx, Dyy, Dxy;
};

BfsEval bfs_eval(double xi, double eta, double hx, double hy) {
    const Hermite1D X = hermite1d(xi, hx);
    const Hermite1D Y = hermite1d(eta, hy);
    BfsEval r;
    for (int a = 0; a < 4; ++a) {
        const int ax = a % 2, ay = a / 2;
        for (int t = 0; t < 4; ++t) {
            const int tx = (t == 1 || t == 3) ? 1 : 0;
            const int ty = (t == 2 || t == 3) ? 1 : 0;
            const int ix = 2 * ax + tx, iy = 2 * ay + ty;
            const int k = 4 * a + t;
            r.V[k] = X.H[ix] * Y.H[iy];
            r.Dx[k] = X.dH[ix] * Y.H[iy];
            r.Dy[k] = X.H[ix] * Y.dH[iy];
            r.Dxx[k] = X.ddH[ix] * Y.H[iy];
            r.Dyy[k] = X.H[ix] * Y.ddH[iy];
            r.Dxy[k] = X.dH[ix] * Y.dH[iy];
        }
    }
    return r;
}

struct Q1Eval {
    Eigen::Vector4d N;
    Eigen::Matrix<double, 4, 2> dN;
};

Q1Eval q1_eval(double xi, double eta, double hx, double hy) {
    Q1Eval r;
    r.N << (1 - xi) * (1 - eta), xi * (1 - eta), (1 - xi) * eta, xi * eta;
    r.dN << -(1 - eta) / hx, -(1 - xi) / hy, (1 - eta) / hx, -xi / hy, -eta / hx,
        (1 - xi) / hy, eta / hx, xi / hy;
    return r;
}

struct Gauss1D {
    std::array<double, 4> p, w;
};

Gauss1D gauss4() {
    const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
    const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
    const double wa = (18.0 + std::sqrt(30.0)) / 36.0;
    const double wb = (18.0 - std::sqrt(30.0)) / 36.0;
    Gauss1D g;
    g.p = {0.5 * (1 - b), 0.5 * (1 - a), 0.5 * (1 + a), 0.5 * (1 + b)};
    g.w = {0.5 * wb, 0.5 * wa, 0.5 * wa, 0.5 * wb};
    return g;
}

// c1 tr(g) I + c2 g with the membrane coefficients
Mat2 membrane_map(const MaterialConstants& mat, const Mat2& g) {
    const double c1 = 4.0 * mat.lambda * mat.mu / (mat.lambda + 2.0 * mat.mu);
    const double c2 = 4.0 * mat.mu;
    return c1 * g.trace() * Mat2::Identity() + c2 * g;
}

int find_cell(double x, double h, int n) {
    int i = static_cast<int>(std::floor(x / h));
    return std::min(std::max(i, 0), n - 1);
}

}  // namespace

DofMap2 DofMap2::build(const Mesh2& m) {
    DofMap2 d;
    d.v3_index.assign(static_cast<std::size_t>(4 * m.node_count()), -1);
    d.vh_index.assign(static_cast<std::size_t>(2 * m.node_count()), -1);
    for (int j = 0; j <= m.ny; ++j)
        for (int i = 0; i <= m.nx; ++i) {
            const int n = m.node(i, j);
            const auto c3 = m.deflection_constraints(i, j);
            for (int t = 0; t < 4; ++t)
                if (!c3[static_cast<std::size_t>(t)])
                    d.v3_index[static_cast<std::size_t>(4 * n + t)] = d.n3++;
            const auto ch = m.membrane_constraints(i, j);
            for (int c = 0; c < 2; ++c)
                if (!ch[static_cast<std::size_t>(c)])
                    d.vh_index[static_cast<std::size_t>(2 * n + c)] = d.nh++;
        }
    return d;
}

LimitSystem assemble_limit(const Mesh2& m, const LimitCoefficients& coeffs,
                           const MaterialConstants& mat, const MidsurfaceGeometry& geom) {
    if (!(coeffs.p33 > 0.0)) throw LimitError("assemble_limit: p33 must be positive");
    LimitSystem sys;
    sys.mesh = m;
    sys.geometry = geom;
    sys.material = mat;
    sys.coeffs = coeffs;
    sys.dofs = DofMap2::build(m);

    const Gauss1D g = gauss4();
    const double hx = m.hx(), hy = m.hy();

    // local tables are identical for every element of the uniform mesh
    struct GP {
        double xi, eta, w;
        BfsEval b;
        Q1Eval q;
    };
    std::vector<GP> gps;
    for (int q2 = 0; q2 < 4; ++q2)
        for (int q1 = 0; q1 < 4; ++q1)
            gps.push_back({g.p[static_cast<std::size_t>(q1)], g.p[static_cast<std::size_t>(q2)],
                           g.w[static_cast<std::size_t>(q1)] * g.w[static_cast<std::size_t>(q2)] * hx * hy,
                           bfs_eval(g.p[static_cast<std::size_t>(q1)], g.p[static_cast<std::size_t>(q2)], hx, hy),
                           q1_eval(g.p[static_cast<std::size_t>(q1)], g.p[static_cast<std::size_t>(q2)], hx, hy)});

    using Trip = Eigen::Triplet<double>;
    std::vector<Trip> t3, thh, th3, tm;

    std::array<Mat2, 8> eh;  // membrane strain per membrane DOF
    for (int ej = 0; ej < m.ny; ++ej)
        for (int ei = 0; ei < m.nx; ++ei) {
            Eigen::Matrix<double, 16, 16> K3e = Eigen::Matrix<double, 16, 16>::Zero();
            Eigen::Matrix<double, 16, 16> Me = Eigen::Matrix<double, 16, 16>::Zero();
            Eigen::Matrix<double, 8, 8> Khhe = Eigen::Matrix<double, 8, 8>::Zero();
            Eigen::Matrix<double, 8, 16> Kh3e = Eigen::Matrix<double, 8, 16>::Zero();
            const double x0 = ei * hx, y0 = ej * hy;
            for (const auto& gp : gps) {
                const double x = x0 + gp.xi * hx, y = y0 + gp.eta * hy;
                const Mat2 th = geom.hessian(x, y);
                const auto& b = gp.b;
                const Eigen::Matrix<double, 16, 1> lap = b.Dxx + b.Dyy;
                K3e += gp.w * (coeffs.bend_lapl * (lap * lap.transpose()) +
                               coeffs.bend_hess * (b.Dxx * b.Dxx.transpose() +
                                                   b.Dyy * b.Dyy.transpose() +
                                                   2.0 * (b.Dxy * b.Dxy.transpose())));
                const Eigen::Matrix<double, 16, 1> pz =
                    coeffs.p3ab(0, 0) * b.Dxx + coeffs.p3ab(1, 1) * b.Dyy +
                    2.0 * coeffs.p3ab(0, 1) * b.Dxy;
                K3e += gp.w * (2.0 / (3.0 * coeffs.p33)) * (pz * pz.transpose());
                Me += gp.w * (b.V * b.V.transpose());

                for (int a = 0; a < 4; ++a)
                    for (int c = 0; c < 2; ++c) {
                        Mat2 grad = Mat2::Zero();
                        grad.row(c) = gp.q.dN.row(a);
                        eh[static_cast<std::size_t>(2 * a + c)] = 0.5 * (grad + grad.transpose());
                    }
                const double th_th = (membrane_map(mat, th).cwiseProduct(th)).sum();
                for (int d = 0; d < 8; ++d) {
                    const Mat2 Ce = membrane_map(mat, eh[static_cast<std::size_t>(d)]);
                    for (int e = 0; e < 8; ++e)
                        Khhe(d, e) += gp.w * (Ce.cwiseProduct(eh[static_cast<std::size_t>(e)])).sum();
                    // coupling against the deflection curvature term -z3 * hess(theta)
                    const double cth = (Ce.cwiseProduct(th)).sum();
                    for (int e = 0; e < 16; ++e) Kh3e(d, e) += gp.w * (-b.V[e] * cth);
                }
                // deflection-deflection membrane part: (z3 th, C[z3 th])
                K3e += gp.w * th_th * (b.V * b.V.transpose());
            }

            std::array<int, 16> map3{};
            std::array<int, 8> maph{};
            for (int a = 0; a < 4; ++a) {
                const int n = m.node(ei + a % 2, ej + a / 2);
                for (int t = 0; t < 4; ++t)
                    map3[static_cast<std::size_t>(4 * a + t)] =
                        sys.dofs.v3_index[static_cast<std::size_t>(4 * n + t)];
                for (int c = 0; c < 2; ++c)
                    maph[static_cast<std::size_t>(2 * a + c)] =
                        sys.dofs.vh_index[static_cast<std::size_t>(2 * n + c)];
            }
            for (int d = 0; d < 16; ++d) {
                if (map3[static_cast<std::size_t>(d)] < 0) continue;
                for (int e = 0; e < 16; ++e) {
                    if (map3[static_cast<std::size_t>(e)] < 0) continue;
                    t3.emplace_back(map3[static_cast<std::size_t>(d)],
                                    map3[static_cast<std::size_t>(e)], K3e(d, e));
                    tm.emplace_back(map3[static_cast<std::size_t>(d)],
                                    map3[static_cast<std::size_t>(e)], Me(d, e));
                }
            }
            for (int d = 0; d < 8; ++d) {
                if (maph[static_cast<std::size_t>(d)] < 0) continue;
                for (int e = 0; e < 8; ++e) {
                    if (maph[static_cast<std::size_t>(e)] < 0) continue;
                    thh.emplace_back(maph[static_cast<std::size_t>(d)],
                                     maph[static_cast<std::size_t>(e)], Khhe(d, e));
                }
                for (int e = 0; e < 16; ++e) {
                    if (map3[static_cast<std::size_t>(e)] < 0) continue;
                    th3.emplace_back(maph[static_cast<std::size_t>(d)],
                                     map3[static_cast<std::size_t>(e)], Kh3e(d, e));
                }
            }
        }

    sys.K3.resize(sys.dofs.n3, sys.dofs.n3);
    sys.K3.setFromTriplets(t3.begin(), t3.end());
    sys.M3.resize(sys.dofs.n3, sys.dofs.n3);
    sys.M3.setFromTriplets(tm.begin(), tm.end());
    sys.K_hh.resize(sys.dofs.nh, sys.dofs.nh);
    sys.K_hh.setFromTriplets(thh.begin(), thh.end());
    sys.K_h3.resize(sys.dofs.nh, sys.dofs.n3);
    sys.K_h3.setFromTriplets(th3.begin(), th3.end());
    return sys;
}

CondensedBending::CondensedBending(const LimitSystem& sys) : sys_(&sys) {
    if (sys.dofs.nh > 0) {
        Khh_llt_.compute(sys.K_hh);
        if (Khh_llt_.info() != Eigen::Success)
            throw LimitError("membrane block factorization failed (empty clamp set?)");
    }
}

Vector CondensedBending::apply(const Vector& z3) const {
    Vector r = sys_->K3 * z3;
    if (sys_->dofs.nh > 0)
        r -= sys_->K_h3.transpose() * Khh_llt_.solve(sys_->K_h3 * z3);
    return r;
}

Vector CondensedBending::recover_membrane(const Vector& z3) const {
    if (sys_->dofs.nh == 0) return Vector::Zero(0);
    return -Khh_llt_.solve(sys_->K_h3 * z3);
}

eig::SymmetricPencil CondensedBending::pencil() const {
    eig::SymmetricPencil p;
    p.n = sys_->dofs.n3;
    p.M = &sys_->M3;
    p.apply_K = [this](const Vector& x) { return apply(x); };
    const LimitSystem* sys = sys_;
    p.shifted_solver = [sys](double sigma) {
        const int n3 = sys->dofs.n3;
        const int nh = sys->dofs.nh;
        SparseMat block(n3 + nh, n3 + nh);
        std::vector<Eigen::Triplet<double>> trips;
        auto add_block = [&trips](const SparseMat& mat, int r0, int c0, double scale) {
            for (int k = 0; k < mat.outerSize(); ++k)
                for (SparseMat::InnerIterator it(mat, k); it; ++it)
                    trips.emplace_back(r0 + static_cast<int>(it.row()),
                                       c0 + static_cast<int>(it.col()), scale * it.value());
        };
        add_block(sys->K3, 0, 0, 1.0);
        add_block(sys->M3, 0, 0, -sigma);
        SparseMat K3h = sys->K_h3.transpose();
        add_block(K3h, 0, n3, 1.0);
        add_block(sys->K_h3, n3, 0, 1.0);
        add_block(sys->K_hh, n3, n3, 1.0);
        block.setFromTriplets(trips.begin(), trips.end());
        auto ldlt = std::make_shared<Eigen::SimplicialLDLT<SparseMat>>(block);
        if (ldlt->info() != Eigen::Success)
            throw eig::SolverError("fem2d: block factorization for shift-invert failed");
        return [ldlt, n3, nh](const Vector& rhs) {
            Vector full = Vector::Zero(n3 + nh);
            full.head(n3) = rhs;
            Vector sol = ldlt->solve(full);
            return Vector(sol.head(n3));
        };
    };
    return p;
}

Matrix CondensedBending::dense(int cap) const {
    if (sys_->dofs.n3 > cap)
        throw LimitError("CondensedBending::dense: size above cap");
    Matrix B = Matrix(sys_->K3);
    if (sys_->dofs.nh > 0) {
        Matrix Kh3 = Matrix(sys_->K_h3);
        Matrix X = Khh_llt_.solve(Kh3);
        B -= Kh3.transpose() * X;
    }
    return B;
}

double CondensedBending::symmetry_residual(int cap) const {
    const Matrix B = dense(cap);
    return (B - B.transpose()).cwiseAbs().maxCoeff() /
           std::max(B.cwiseAbs().maxCoeff(), 1e-300);
}

namespace {

// Membrane load vector on free DOFs for a given deflection.
Vector membrane_rhs(const LimitSystem& sys, const MaterialConstants& mat,
                    const MidsurfaceGeometry& geom, const Vector& z3_nodal,
                    MembraneRhs rhs) {
    const Mesh2& m = sys.mesh;
    Vector b = Vector::Zero(sys.dofs.nh);
    if (rhs == MembraneRhs::Covariant) {
        // right side -K_h3 z3 in the covariant coupling convention
        Vector z3f = Vector::Zero(sys.dofs.n3);
        for (int i = 0; i < static_cast<int>(sys.dofs.v3_index.size()); ++i) {
            const int f = sys.dofs.v3_index[static_cast<std::size_t>(i)];
            if (f >= 0) z3f[f] = z3_nodal[i];
        }
        b = -(sys.K_h3 * z3f);
        return b;
    }
    // gradient-product right side, assembled from sym(grad theta x grad z3)
    const Gauss1D g = gauss4();
    const double hx = m.hx(), hy = m.hy();
    const DeflectionField zf(m, z3_nodal);
    for (int ej = 0; ej < m.ny; ++ej)
        for (int ei = 0; ei < m.nx; ++ei) {
            const double x0 = ei * hx, y0 = ej * hy;
            for (int q2 = 0; q2 < 4; ++q2)
                for (int q1 = 0; q1 < 4; ++q1) {
                    const double x = x0 + g.p[static_cast<std::size_t>(q1)] * hx;
                    const double y = y0 + g.p[static_cast<std::size_t>(q2)] * hy;
                    const double w = g.w[static_cast<std::size_t>(q1)] *
                                     g.w[static_cast<std::size_t>(q2)] * hx * hy;
                    const Vec2 gt = geom.gradient(x, y);
                    const Vec2 gz = zf.gradient(x, y);
                    Mat2 s = 0.5 * (gt * gz.transpose() + gz * gt.transpose());
                    const Mat2 Cs = membrane_map(mat, s);
                    const Q1Eval q = q1_eval(g.p[static_cast<std::size_t>(q1)],
                                             g.p[static_cast<std::size_t>(q2)], hx, hy);
                    for (int a = 0; a < 4; ++a) {
                        const int n = m.node(ei + a % 2, ej + a / 2);
                        for (int c = 0; c < 2; ++c) {
                            const int f =
                                sys.dofs.vh_index[static_cast<std::size_t>(2 * n + c)];
                            if (f < 0) continue;
                            Mat2 grad = Mat2::Zero();
                            grad.row(c) = q.dN.row(a);
                            const Mat2 e = 0.5 * (grad + grad.transpose());
                            b[f] += w * (Cs.cwiseProduct(e)).sum();
                        }
                    }
                }
        }
    return b;
}

}  // namespace

Vector membrane_solve(const Mesh2& m, const MaterialConstants& mat,
                      const MidsurfaceGeometry& geom, const Vector& z3_nodal,
                      MembraneRhs rhs) {
    const LimitCoefficients coeffs = material::limit_coefficients(mat);
    const LimitSystem sys = assemble_limit(m, coeffs, mat, geom);
    if (sys.dofs.nh == 0) throw LimitError("membrane_solve: empty membrane space");
    Eigen::SimplicialLLT<SparseMat> llt(sys.K_hh);
    if (llt.info() != Eigen::Success)
        throw LimitError("membrane_solve: singular membrane matrix (empty clamp set?)");
    const Vector b = membrane_rhs(sys, mat, geom, z3_nodal, rhs);
    const Vector sol = llt.solve(b);
    Vector full = Vector::Zero(2 * m.node_count());
    for (int i = 0; i < static_cast<int>(sys.dofs.vh_index.size()); ++i) {
        const int f = sys.dofs.vh_index[static_cast<std::size_t>(i)];
        if (f >= 0) full[i] = sol[f];
    }
    return full;
}

double membrane_residual(const Mesh2& m, const MaterialConstants& mat,
                         const MidsurfaceGeometry& geom, const Vector& z3_nodal,
                         const Vector& zh_nodal, MembraneRhs rhs) {
    const LimitCoefficients coeffs = material::limit_coefficients(mat);
    const LimitSystem sys = assemble_limit(m, coeffs, mat, geom);
    Vector zh = Vector::Zero(sys.dofs.nh);
    for (int i = 0; i < static_cast<int>(sys.dofs.vh_index.size()); ++i) {
        const int f = sys.dofs.vh_index[static_cast<std::size_t>(i)];
        if (f >= 0) zh[f] = zh_nodal[i];
    }
    const Vector b = membrane_rhs(sys, mat, geom, z3_nodal, rhs);
    const Vector r = sys.K_hh * zh - b;
    return r.norm() / std::max(b.norm(), 1e-300);
}

LimitEigenReport solve_limit_eigen(const LimitSystem& sys, int m_count,
                                   eig::SolveMode mode, std::uint64_t seed) {
    if (m_count < 1 || m_count > sys.dofs.n3)
        throw LimitError("solve_limit_eigen: m_count exceeds deflection DOF count");
    const CondensedBending op(sys);
    const eig::Spectrum spec = eig::solve(op.pencil(), m_count, mode, seed);
    LimitEigenReport rep;
    rep.xi = spec.values;
    rep.xi_bulk = 0.5 * spec.values;
    rep.solver_residuals = spec.residuals;
    Matrix gram = spec.vectors.transpose() * Matrix(sys.M3) * spec.vectors;
    rep.gram_residual = (gram - Matrix::Identity(m_count, m_count)).cwiseAbs().maxCoeff();
    for (int c = 0; c < m_count; ++c) {
        Vector z3f = spec.vectors.col(c);
        Vector zhf = op.recover_membrane(z3f);
        Vector z3full = Vector::Zero(4 * sys.mesh.node_count());
        for (int i = 0; i < static_cast<int>(sys.dofs.v3_index.size()); ++i) {
            const int f = sys.dofs.v3_index[static_cast<std::size_t>(i)];
            if (f >= 0) z3full[i] = z3f[f];
        }
        Vector zhfull = Vector::Zero(2 * sys.mesh.node_count());
        for (int i = 0; i < static_cast<int>(sys.dofs.vh_index.size()); ++i) {
            const int f = sys.dofs.vh_index[static_cast<std::size_t>(i)];
            if (f >= 0) zhfull[i] = zhf[f];
        }
        rep.z3_modes.push_back(z3full);
        rep.zh_modes.push_back(zhfull);
    }
    return rep;
}

DeflectionField::DeflectionField(const Mesh2& m, Vector nodal)
    : mesh_(m), nodal_(std::move(nodal)) {
    if (nodal_.size() != 4 * mesh_.node_count())
        throw LimitError("DeflectionField: nodal vector size mismatch");
}

namespace {

template <typename Out>
void bfs_gather(const Mesh2& m, const Vector& nodal, double x, double y, Out&& out) {
    const int ei = find_cell(x, m.hx(), m.nx);
    const int ej = find_cell(y, m.hy(), m.ny);
    const double xi = x / m.hx() - ei, eta = y / m.hy() - ej;
    const BfsEval b = bfs_eval(xi, eta, m.hx(), m.hy());
    for (int a = 0; a < 4; ++a) {
        const int n = m.node(ei + a % 2, ej + a / 2);
        for (int t = 0; t < 4; ++t) {
            const double c = nodal[4 * n + t];
            out(c, 4 * a + t, b);
        }
    }
}

}  // namespace

double DeflectionField::value(double x, double y) const {
    double v = 0.0;
    bfs_gather(mesh_, nodal_, x, y,
               [&](double c, int k, const BfsEval& b) { v += c * b.V[k]; });
    return v;
}

Vec2 DeflectionField::gradient(double x, double y) const {
    Vec2 g = Vec2::Zero();
    bfs_gather(mesh_, nodal_, x, y, [&](double c, int k, const BfsEval& b) {
        g[0] += c * b.Dx[k];
        g[1] += c * b.Dy[k];
    });
    return g;
}

Mat2 DeflectionField::hessian(double x, double y) const {
    Mat2 h = Mat2::Zero();
    bfs_gather(mesh_, nodal_, x, y, [&](double c, int k, const BfsEval& b) {
        h(0, 0) += c * b.Dxx[k];
        h(1, 1) += c * b.Dyy[k];
        h(0, 1) += c * b.Dxy[k];
    });
    h(1, 0) = h(0, 1);
    return h;
}

MembraneField::MembraneField(const Mesh2& m, Vector nodal)
    : mesh_(m), nodal_(std::move(nodal)) {
    if (nodal_.size() != 2 * mesh_.node_count())
        throw LimitError("MembraneField: nodal vector size mismatch");
}

Vec2 MembraneField::value(double x, double y) const {
    const int ei = find_cell(x, mesh_.hx(), mesh_.nx);
    const int ej = find_cell(y, mesh_.hy(), mesh_.ny);
    const double xi = x / mesh_.hx() - ei, eta = y / mesh_.hy() - ej;
    const Q1Eval q = q1_eval(xi, eta, mesh_.hx(), mesh_.hy());
    Vec2 v = Vec2::Zero();
    for (int a = 0; a < 4; ++a) {
        const int n = mesh_.node(ei + a % 2, ej + a / 2);
        for (int c = 0; c < 2; ++c) v[c] += nodal_[2 * n + c] * q.N[a];
    }
    return v;
}

Mat2 MembraneField::gradient(double x, double y) const {
    const int ei = find_cell(x, mesh_.hx(), mesh_.nx);
    const int ej = find_cell(y, mesh_.hy(), mesh_.ny);
    const double xi = x / mesh_.hx() - ei, eta = y / mesh_.hy() - ej;
    const Q1Eval q = q1_eval(xi, eta, mesh_.hx(), mesh_.hy());
    Mat2 g = Mat2::Zero();
    for (int a = 0; a < 4; ++a) {
        const int n = mesh_.node(ei + a % 2, ej + a / 2);
        for (int c = 0; c < 2; ++c) g.row(c) += nodal_[2 * n + c] * q.dN.row(a);
    }
    return g;
}

geom::Vec3 KLField::value(const geom::Vec3& x) const {
    const Vec2 zh_v = zh->value(x[0], x[1]);
    const Vec2 g = z3->gradient(x[0], x[1]);
    return geom::Vec3(zh_v[0] - x[2] * g[0], zh_v[1] - x[2] * g[1], z3->value(x[0], x[1]));
}

geom::Mat3 KLField::gradient(const geom::Vec3& x) const {
    const Mat2 gh = zh->gradient(x[0], x[1]);
    const Vec2 g = z3->gradient(x[0], x[1]);
    const Mat2 h = z3->hessian(x[0], x[1]);
    geom::Mat3 out = geom::Mat3::Zero();
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) out(a, b) = gh(a, b) - x[2] * h(a, b);
        out(a, 2) = -g[a];
        out(2, a) = g[a];
    }
    return out;
}

KLField reconstruct_kl(const Mesh2& m, const Vector& zh_nodal, const Vector& z3_nodal) {
    KLField f;
    f.z3 = std::make_shared<DeflectionField>(m, z3_nodal);
    f.zh = std::make_shared<MembraneField>(m, zh_nodal);
    return f;
}

double PotentialField::value(const geom::Vec3& x) const {
    const Mat2 h = z3->hessian(x[0], x[1]);
    const double pz = (coeffs.p3ab.cwiseProduct(h)).sum();
    const double scale = (variant == PotentialVariant::Compact) ? 1.0 : 0.5;
    return scale * (1.0 - x[2] * x[2]) * pz / coeffs.p33;
}

double PotentialField::d3(const geom::Vec3& x) const {
    const Mat2 h = z3->hessian(x[0], x[1]);
    const double pz = (coeffs.p3ab.cwiseProduct(h)).sum();
    const double scale = (variant == PotentialVariant::Compact) ? 1.0 : 0.5;
    return scale * (-2.0 * x[2]) * pz / coeffs.p33;
}

PotentialField reconstruct_potential(const LimitCoefficients& coeffs, const Mesh2& m,
                                     const Vector& z3_nodal, PotentialVariant variant) {
    if (!(coeffs.p33 > 0.0)) throw LimitError("reconstruct_potential: p33 must be positive");
    PotentialField f;
    f.z3 = std::make_shared<DeflectionField>(m, z3_nodal);
    f.coeffs = coeffs;
    f.variant = variant;
    return f;
}

StrainRelationReport limit_strain_relations(const fem3d::CoupledSystem& sys,
                                            const Vector& u_free, const Vector& phi_free) {
    const mesh::Mesh3& m = sys.mesh;
    const MaterialConstants& mat = sys.material;
    const double lam = mat.lambda, mu = mat.mu;
    const double eps = sys.eps;
    StrainRelationReport rep;
    double r_sh = 0.0, r_th = 0.0, r_tr = 0.0, n_sh = 0.0, n_tg = 0.0;
    for (int ek = 0; ek < m.nz; ++ek)
        for (int ej = 0; ej < m.ny; ++ej)
            for (int ei = 0; ei < m.nx; ++ei) {
                const fem3d::ElementKernel kern(m, sys.geometry, mat, eps, ei, ej, ek,
                                                sys.options);
                Eigen::Matrix<double, 24, 1> ue;
                Eigen::Matrix<double, 8, 1> pe;
                for (int a = 0; a < 8; ++a) {
                    const int n = m.element_node(ei, ej, ek, a);
                    for (int c = 0; c < 3; ++c) {
                        const int f = sys.dofs.u_index[static_cast<std::size_t>(3 * n + c)];
                        ue[3 * a + c] = (f >= 0) ? u_free[f] : 0.0;
                    }
                    const int fp = sys.dofs.phi_index[static_cast<std::size_t>(n)];
                    pe[a] = (fp >= 0) ? phi_free[fp] : 0.0;
                }
                const Eigen::Vector4d modes = kern.recover_modes(ue);
                for (int q = 0; q < kern.points(); ++q) {
                    const double w = kern.weight(q);
                    const auto& se = kern.shape(q);
                    const geom::Vec3 x = kern.point(q);
                    const geom::Vec3 uh = (ue.reshaped(3, 8) * se.N).eval();
                    const geom::Mat3 guh = (ue.reshaped(3, 8) * se.dN).eval();
                    const double dphi3 = pe.dot(se.dN.col(2));
                    const geom::Mat2 th = sys.geometry.hessian(x[0], x[1]);
                    // midsurface-corrected in-plane strain
                    const double Kbb = guh(0, 0) + guh(1, 1) - uh[2] * (th(0, 0) + th(1, 1));
                    // assumed scaled shear plus the curvature correction gives
                    // the graded shear strain (1/eps) et_a3
                    const auto& rows = kern.rows(q);
                    double Ka3[2];
                    for (int a = 0; a < 2; ++a) {
                        double v = 0.0;
                        for (int d = 0; d < 24; ++d)
                            v += rows[static_cast<std::size_t>(d)](a, 2) * ue[d];
                        const auto& fr = kern.frame(q);
                        v += fr.gamma[0][a][2] * uh[0] + fr.gamma[1][a][2] * uh[1];
                        Ka3[a] = v;
                    }
                    const double K33 = guh(2, 2) / (eps * eps) +
                                       modes.dot(kern.enhanced_modes(q));
                    const double sh0 = Ka3[0] + mat.P_hat(2, 0, 2) * dphi3 / mu;
                    const double sh1 = Ka3[1] + mat.P_hat(2, 1, 2) * dphi3 / mu;
                    const double tgt = (mat.P_hat(2, 2, 2) * dphi3 + lam * Kbb) / (lam + 2 * mu);
                    const double th_res = K33 + tgt;
                    const double tr_res = lam * Kbb + (lam + 2 * mu) * K33 +
                                          mat.P_hat(2, 2, 2) * dphi3;
                    r_sh += w * (sh0 * sh0 + sh1 * sh1);
                    r_th += w * th_res * th_res;
                    r_tr += w * tr_res * tr_res;
                    n_sh += w * (Ka3[0] * Ka3[0] + Ka3[1] * Ka3[1]);
                    n_tg += w * tgt * tgt;
                }
            }
    rep.shear_residual = std::sqrt(r_sh);
    rep.thickness_residual = std::sqrt(r_th);
    rep.trace_identity_residual = std::sqrt(r_tr);
    rep.shear_norm = std::sqrt(n_sh);
    rep.thickness_target_norm = std::sqrt(n_tg);
    return rep;
}

}  // namespace pzshell::fem2d
