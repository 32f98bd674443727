#include "pzshell/geometry.hpp"

#include <cmath>
#include <memory>
#include <random>

namespace pzshell::geom {

MidsurfaceGeometry MidsurfaceGeometry::flat() {
    return MidsurfaceGeometry(Family::Flat, {});
}

MidsurfaceGeometry MidsurfaceGeometry::paraboloid(double c1, double c2) {
    return MidsurfaceGeometry(Family::Paraboloid, {{2, 0, c1}, {0, 2, c2}});
}

MidsurfaceGeometry MidsurfaceGeometry::saddle(double c) {
    return MidsurfaceGeometry(Family::Saddle, {{1, 1, c}});
}

MidsurfaceGeometry MidsurfaceGeometry::polynomial(std::vector<Monomial> terms) {
    return MidsurfaceGeometry(Family::Polynomial, std::move(terms));
}

namespace {

inline double ipow(double x, int n) {
    if (n < 0) return 0.0;
    double r = 1.0;
    for (int k = 0; k < n; ++k) r *= x;
    return r;
}

// d^n/dx^n of x^i evaluated as factorial prefactor times x^(i-n)
inline double dmono(double x, int i, int n) {
    if (i < n) return 0.0;
    double f = 1.0;
    for (int k = 0; k < n; ++k) f *= static_cast<double>(i - k);
    return f * ipow(x, i - n);
}

}  // namespace

double MidsurfaceGeometry::value(double x, double y) const {
    double v = 0.0;
    for (const auto& t : terms_) v += t.c * ipow(x, t.i) * ipow(y, t.j);
    return v;
}

Vec2 MidsurfaceGeometry::gradient(double x, double y) const {
    Vec2 g = Vec2::Zero();
    for (const auto& t : terms_) {
        g[0] += t.c * dmono(x, t.i, 1) * ipow(y, t.j);
        g[1] += t.c * ipow(x, t.i) * dmono(y, t.j, 1);
    }
    return g;
}

Mat2 MidsurfaceGeometry::hessian(double x, double y) const {
    Mat2 h = Mat2::Zero();
    for (const auto& t : terms_) {
        h(0, 0) += t.c * dmono(x, t.i, 2) * ipow(y, t.j);
        h(1, 1) += t.c * ipow(x, t.i) * dmono(y, t.j, 2);
        h(0, 1) += t.c * dmono(x, t.i, 1) * dmono(y, t.j, 1);
    }
    h(1, 0) = h(0, 1);
    return h;
}

std::array<double, 4> MidsurfaceGeometry::third(double x, double y) const {
    std::array<double, 4> d{0.0, 0.0, 0.0, 0.0};  // d111, d112, d122, d222
    for (const auto& t : terms_) {
        d[0] += t.c * dmono(x, t.i, 3) * ipow(y, t.j);
        d[1] += t.c * dmono(x, t.i, 2) * dmono(y, t.j, 1);
        d[2] += t.c * dmono(x, t.i, 1) * dmono(y, t.j, 2);
        d[3] += t.c * ipow(x, t.i) * dmono(y, t.j, 3);
    }
    return d;
}

Vec3 chart_map(const MidsurfaceGeometry& geom, double eps, const Vec3& x) {
    const double z = eps * x[2];
    const Vec2 g1 = geom.gradient(x[0], x[1]);
    Vec3 n(-eps * g1[0], -eps * g1[1], 1.0);
    const Vec3 a = n.normalized();
    return Vec3(x[0], x[1], eps * geom.value(x[0], x[1])) + z * a;
}

PointFrame chart_frame(const MidsurfaceGeometry& geom, double eps, const Vec3& x,
                       double degenerate_tol) {
    const double z = eps * x[2];
    const Vec2 t1 = geom.gradient(x[0], x[1]);
    const Mat2 t2 = geom.hessian(x[0], x[1]);
    const auto t3 = geom.third(x[0], x[1]);

    const Vec3 n(-eps * t1[0], -eps * t1[1], 1.0);
    // n_a = d_a n, n_ab = d_ab n; the normal direction has no in-plane tilt
    // derivatives beyond those of theta.
    const Vec3 na[2] = {Vec3(-eps * t2(0, 0), -eps * t2(1, 0), 0.0),
                        Vec3(-eps * t2(0, 1), -eps * t2(1, 1), 0.0)};
    // third-derivative table indices: (1,ab): d_{1ab} theta, (2,ab): d_{2ab} theta
    auto theta3 = [&](int c, int a, int b) {
        const int ones = (c == 0 ? 1 : 0) + (a == 0 ? 1 : 0) + (b == 0 ? 1 : 0);
        return t3[static_cast<std::size_t>(3 - ones)];
    };
    Vec3 nab[2][2];
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            nab[a][b] = Vec3(-eps * theta3(0, a, b), -eps * theta3(1, a, b), 0.0);

    const double s = n.norm();
    const Vec3 a3 = n / s;
    const double s3 = s * s * s;
    const double s5 = s3 * s * s;
    Vec3 da[2];
    for (int al = 0; al < 2; ++al)
        da[al] = na[al] / s - n * (n.dot(na[al])) / s3;
    Vec3 dab[2][2];
    for (int al = 0; al < 2; ++al)
        for (int be = 0; be < 2; ++be) {
            dab[al][be] = nab[al][be] / s - na[al] * (n.dot(na[be])) / s3 -
                          na[be] * (n.dot(na[al])) / s3 -
                          n * (na[al].dot(na[be]) + n.dot(nab[al][be])) / s3 +
                          3.0 * n * (n.dot(na[al])) * (n.dot(na[be])) / s5;
        }

    PointFrame f;
    f.g_cov.row(0) = (Vec3(1.0, 0.0, eps * t1[0]) + z * da[0]).transpose();
    f.g_cov.row(1) = (Vec3(0.0, 1.0, eps * t1[1]) + z * da[1]).transpose();
    f.g_cov.row(2) = a3.transpose();

    const double detJ = f.g_cov.determinant();
    f.det_metric = detJ * detJ;
    // the chart must stay an orientation-preserving diffeomorphism; a signed
    // Jacobian at or below the tolerance also covers inverted configurations
    if (detJ <= degenerate_tol) {
        throw GeometryDegenerate("chart_frame: degenerate metric, det(g_ij)=" +
                                 std::to_string(f.det_metric) + " (signed Jacobian " +
                                 std::to_string(detJ) + ") at point (" + std::to_string(x[0]) +
                                 ", " + std::to_string(x[1]) + ", " + std::to_string(x[2]) +
                                 "), eps=" + std::to_string(eps));
    }
    f.sqrt_det = std::abs(detJ);
    f.g_con = f.g_cov.inverse().transpose();
    f.metric_cov = f.g_cov * f.g_cov.transpose();
    f.metric_con = f.g_con * f.g_con.transpose();

    // dg[i][j] = d_j g_i assembled from the closed-form pieces
    Vec3 dg[3][3];
    for (int al = 0; al < 2; ++al) {
        for (int be = 0; be < 2; ++be)
            dg[al][be] = Vec3(0.0, 0.0, eps * t2(al, be)) + z * dab[al][be];
        dg[al][2] = da[al];
        dg[2][al] = da[al];
    }
    dg[2][2] = Vec3::Zero();

    for (int p = 0; p < 3; ++p)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                f.gamma[p][i][j] = f.g_con.row(p).dot(dg[i][j]);
    return f;
}

Mat3 scaled_strain_kernel(const PointFrame& frame, double eps, const Vec3& v,
                          const Mat3& grad) {
    Mat3 e = Mat3::Zero();
    for (int a = 0; a < 2; ++a) {
        for (int b = a; b < 2; ++b) {
            double val = 0.5 * (grad(a, b) + grad(b, a));
            val -= frame.gamma[0][a][b] * v[0] + frame.gamma[1][a][b] * v[1];
            val -= frame.gamma[2][a][b] * v[2] / eps;
            e(a, b) = e(b, a) = val;
        }
        double val = 0.5 * (grad(2, a) + grad(a, 2)) / eps;
        val -= frame.gamma[0][a][2] * v[0] + frame.gamma[1][a][2] * v[1];
        e(a, 2) = e(2, a) = val;
    }
    e(2, 2) = grad(2, 2) / (eps * eps);
    return e;
}

ScaledStrainSample scaled_strain(const MidsurfaceGeometry& geom, double eps,
                                 const DisplacementField& v, const Vec3& x) {
    const PointFrame f = chart_frame(geom, eps, x);
    return {scaled_strain_kernel(f, eps, v.value(x), v.gradient(x))};
}

Mat3 leading_strain_kernel(const Mat2& theta_hess, const Vec3& v, const Mat3& grad) {
    Mat3 e = Mat3::Zero();
    for (int a = 0; a < 2; ++a) {
        for (int b = a; b < 2; ++b) {
            e(a, b) = e(b, a) =
                0.5 * (grad(a, b) + grad(b, a)) - v[2] * theta_hess(a, b);
        }
        e(a, 2) = e(2, a) = 0.5 * (grad(2, a) + grad(a, 2));
    }
    e(2, 2) = grad(2, 2);
    return e;
}

Mat3 leading_strain(const MidsurfaceGeometry& geom, const DisplacementField& v,
                    const Vec3& x) {
    return leading_strain_kernel(geom.hessian(x[0], x[1]), v.value(x), v.gradient(x));
}

std::pair<double, double> loglog_slope(const std::vector<double>& x,
                                       const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        syy += ly * ly;
    }
    const double dn = static_cast<double>(n);
    const double cov = sxy - sx * sy / dn;
    const double varx = sxx - sx * sx / dn;
    const double vary = syy - sy * sy / dn;
    const double slope = cov / varx;
    const double r2 = (vary > 0.0) ? (cov * cov) / (varx * vary) : 1.0;
    return {slope, r2};
}

const SlopeFit& SlopeReport::fit(const std::string& quantity) const {
    for (const auto& f : fits)
        if (f.quantity == quantity) return f;
    throw std::out_of_range("SlopeReport: no fit named " + quantity);
}

namespace {

// Smooth polynomial sample field with nonzero coupling between all derivatives.
DisplacementField sample_field(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto coef = [&rng]() {
        // deterministic uniform in [-0.5, 0.5]
        return (static_cast<double>(rng() >> 11) / 9007199254740992.0) - 0.5;
    };
    struct Coeffs {
        double q[3][6];  // per component: x^2, y^2, z^2, xy, yz, xz
    };
    auto c = std::make_shared<Coeffs>();
    for (auto& row : c->q)
        for (double& v : row) v = coef();
    DisplacementField f;
    f.value = [c](const Vec3& x) {
        Vec3 v;
        for (int k = 0; k < 3; ++k) {
            const auto& q = c->q[k];
            v[k] = q[0] * x[0] * x[0] + q[1] * x[1] * x[1] + q[2] * x[2] * x[2] +
                   q[3] * x[0] * x[1] + q[4] * x[1] * x[2] + q[5] * x[0] * x[2];
        }
        return v;
    };
    f.gradient = [c](const Vec3& x) {
        Mat3 g;
        for (int k = 0; k < 3; ++k) {
            const auto& q = c->q[k];
            g(k, 0) = 2 * q[0] * x[0] + q[3] * x[1] + q[5] * x[2];
            g(k, 1) = 2 * q[1] * x[1] + q[3] * x[0] + q[4] * x[2];
            g(k, 2) = 2 * q[2] * x[2] + q[4] * x[1] + q[5] * x[0];
        }
        return g;
    };
    return f;
}

SlopeFit make_fit(std::string name, const std::vector<double>& eps_list,
                  std::vector<double> residuals) {
    SlopeFit fit;
    fit.quantity = std::move(name);
    fit.residuals = std::move(residuals);
    double max_res = 0.0;
    for (double r : fit.residuals) max_res = std::max(max_res, r);
    if (max_res < 1e-14) {
        fit.exact = true;
        fit.slope = 0.0;
        fit.r_squared = 1.0;
        return fit;
    }
    auto [slope, r2] = loglog_slope(eps_list, fit.residuals);
    fit.slope = slope;
    fit.r_squared = r2;
    fit.conclusive = r2 >= 0.9;
    return fit;
}

}  // namespace

SlopeReport expansion_residual_slopes(const MidsurfaceGeometry& geom,
                                      const std::vector<double>& eps_list,
                                      const std::vector<TensorDeviationProbe>& tensor_probes,
                                      std::uint64_t seed, int sample_count) {
    if (eps_list.size() < 4)
        throw std::invalid_argument("expansion_residual_slopes: need at least 4 eps values");
    for (std::size_t i = 1; i < eps_list.size(); ++i)
        if (!(eps_list[i] < eps_list[i - 1]))
            throw std::invalid_argument("expansion_residual_slopes: eps_list must decrease");

    std::mt19937_64 rng(seed);
    auto uni = [&rng](double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(rng() >> 11) / 9007199254740992.0);
    };
    std::vector<Vec3> pts;
    pts.reserve(static_cast<std::size_t>(sample_count));
    for (int i = 0; i < sample_count; ++i)
        pts.emplace_back(uni(0.0, 1.0), uni(0.0, 1.0), uni(-1.0, 1.0));
    const DisplacementField field = sample_field(seed + 1);

    const std::size_t ne = eps_list.size();
    std::vector<double> r_eab(ne, 0.0), r_ea3(ne, 0.0), r_g(ne, 0.0);
    std::vector<std::vector<double>> r_tensor(tensor_probes.size(),
                                              std::vector<double>(ne, 0.0));

    for (std::size_t ie = 0; ie < ne; ++ie) {
        const double eps = eps_list[ie];
        for (const auto& x : pts) {
            const PointFrame f = chart_frame(geom, eps, x);
            const Vec3 v = field.value(x);
            const Mat3 grad = field.gradient(x);
            const Mat3 e = scaled_strain_kernel(f, eps, v, grad);
            const Mat3 et = leading_strain_kernel(geom.hessian(x[0], x[1]), v, grad);
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b)
                    r_eab[ie] = std::max(r_eab[ie], std::abs(e(a, b) - et(a, b)));
                // the 1/eps structure of the shear column is removed first
                r_ea3[ie] = std::max(r_ea3[ie], std::abs(eps * e(a, 2) - et(a, 2)));
            }
            r_g[ie] = std::max(r_g[ie], std::abs(f.det_metric - 1.0));
            for (std::size_t t = 0; t < tensor_probes.size(); ++t)
                r_tensor[t][ie] = std::max(r_tensor[t][ie], tensor_probes[t].deviation(f));
        }
    }

    SlopeReport report;
    report.eps_list = eps_list;
    report.fits.push_back(make_fit("strain_inplane_remainder", eps_list, r_eab));
    report.fits.push_back(make_fit("strain_shear_remainder", eps_list, r_ea3));
    report.fits.push_back(make_fit("volume_factor", eps_list, r_g));
    for (std::size_t t = 0; t < tensor_probes.size(); ++t)
        report.fits.push_back(make_fit(tensor_probes[t].name, eps_list, r_tensor[t]));
    return report;
}

}  // namespace pzshell::geom
