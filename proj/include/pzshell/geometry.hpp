#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pzshell::geom {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

/// Thrown when the chart metric degenerates (det g below tolerance).
class GeometryDegenerate : public std::runtime_error {
public:
    explicit GeometryDegenerate(const std::string& what) : std::runtime_error(what) {}
};

/// Analytic midsurface shape function theta(x1,x2) with exact derivatives
/// through third order. Only closed-form families are supported so that
/// curvature terms entering the strain are exact.
class MidsurfaceGeometry {
public:
    enum class Family { Flat, Paraboloid, Saddle, Polynomial };

    /// Monomial term c * x1^i * x2^j of a polynomial shape.
    struct Monomial {
        int i = 0;
        int j = 0;
        double c = 0.0;
    };

    static MidsurfaceGeometry flat();
    static MidsurfaceGeometry paraboloid(double c1, double c2);
    static MidsurfaceGeometry saddle(double c);
    static MidsurfaceGeometry polynomial(std::vector<Monomial> terms);

    Family family() const { return family_; }
    bool is_flat() const { return family_ == Family::Flat; }

    double value(double x, double y) const;
    /// (d1, d2)
    Vec2 gradient(double x, double y) const;
    /// Symmetric Hessian (d11, d12; d12, d22)
    Mat2 hessian(double x, double y) const;
    /// Third derivatives (d111, d112, d122, d222)
    std::array<double, 4> third(double x, double y) const;

    const std::vector<Monomial>& terms() const { return terms_; }

private:
    MidsurfaceGeometry(Family f, std::vector<Monomial> terms)
        : family_(f), terms_(std::move(terms)) {}

    Family family_;
    std::vector<Monomial> terms_;  // all families are stored as monomial tables
};

/// Covariant/contravariant frame data of the shell chart at one point of the
/// scaled domain Omega = omega x (-1,1). All quantities are evaluated at the
/// physical point (x1, x2, eps*x3).
struct PointFrame {
    Mat3 g_cov;        // rows are the covariant basis vectors g_i
    Mat3 g_con;        // rows are the contravariant basis vectors g^i
    Mat3 metric_cov;   // g_ij
    Mat3 metric_con;   // g^ij
    double gamma[3][3][3];  // Christoffel symbols Gamma^p_{ij}
    double det_metric = 0.0;  // det(g_ij)
    double sqrt_det = 0.0;    // volume factor sqrt(det g_ij) = |det J|
};

/// Image of the scaled point x under the shell chart.
Vec3 chart_map(const MidsurfaceGeometry& geom, double eps, const Vec3& x);

/// Frame (bases, metrics, Christoffels) at the scaled point x.
/// Throws GeometryDegenerate if det(g_ij) <= tol.
PointFrame chart_frame(const MidsurfaceGeometry& geom, double eps, const Vec3& x,
                       double degenerate_tol = 1e-10);

/// A displacement field on the scaled domain given by point values and
/// first derivatives. Used by the strain evaluation entry points; finite
/// element assembly uses the same kernels on shape-function data.
struct DisplacementField {
    std::function<Vec3(const Vec3&)> value;
    /// gradient(x)(c, j) = d_j v_c
    std::function<Mat3(const Vec3&)> gradient;
};

struct ScaledStrainSample {
    Mat3 e;  // scaled covariant strain e_{i||j}(eps; v), symmetric
};

/// Kernel shared by field evaluation and element assembly: scaled covariant
/// strain from point values/derivatives of the scaled field and the frame
/// at the corresponding physical point.
///
///   e_{ab}(eps;v) = sym(dv)_ab - Gamma^s_ab v_s - (1/eps) Gamma^3_ab v_3
///   e_{a3}(eps;v) = (1/(2 eps))(d_a v_3 + d_3 v_a) - Gamma^s_a3 v_s
///   e_{33}(eps;v) = (1/eps^2) d_3 v_3
///
/// This is the exact strain of the unscaled field, rescaled; no expansion
/// in eps is performed.
Mat3 scaled_strain_kernel(const PointFrame& frame, double eps, const Vec3& v,
                          const Mat3& grad);

ScaledStrainSample scaled_strain(const MidsurfaceGeometry& geom, double eps,
                                 const DisplacementField& v, const Vec3& x);

/// Leading-order strain parts:
///   et_ab = sym(dv)_ab - v3 * d_ab theta,  et_a3 = (d_a v3 + d_3 v_a)/2,
///   et_33 = d_3 v_3.
Mat3 leading_strain(const MidsurfaceGeometry& geom, const DisplacementField& v,
                    const Vec3& x);
Mat3 leading_strain_kernel(const Mat2& theta_hess, const Vec3& v, const Mat3& grad);

/// Result of the thin-limit residual sweep: per-quantity max residuals over
/// sample points for each eps, with a log-log slope fit.
struct SlopeFit {
    std::string quantity;
    std::vector<double> residuals;  // one per eps
    double slope = 0.0;
    double r_squared = 0.0;
    bool exact = false;        // residuals at rounding level; no fit attempted
    bool conclusive = true;    // fit with R^2 >= 0.9
};

struct SlopeReport {
    std::vector<double> eps_list;
    std::vector<SlopeFit> fits;
    const SlopeFit& fit(const std::string& quantity) const;
};

/// Measures how fast the frame-dependent quantities approach their flat-plate
/// limits as eps decreases: strain remainders against the leading parts,
/// |g - 1|, and the deviation of the transformed material tensors. Material
/// tensors are supplied via callables so this header stays independent of the
/// material module.
struct TensorDeviationProbe {
    // max over components of |T(frame) - T(flat)| at one point
    std::function<double(const PointFrame&)> deviation;
    std::string name;
};

SlopeReport expansion_residual_slopes(const MidsurfaceGeometry& geom,
                                      const std::vector<double>& eps_list,
                                      const std::vector<TensorDeviationProbe>& tensor_probes,
                                      std::uint64_t seed,
                                      int sample_count = 40);

/// Least-squares slope of log(y) against log(x); returns {slope, r_squared}.
std::pair<double, double> loglog_slope(const std::vector<double>& x,
                                       const std::vector<double>& y);

}  // namespace pzshell::geom
