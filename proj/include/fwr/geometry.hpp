#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

namespace fwr {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Riemannian structure of the operator: a(x), its inverse and a square
/// root sigma with sigma*sigma^T = a(x). theta is the uniform ellipticity
/// bound theta^2 |xi|^2 <= xi^T a xi <= theta^-2 |xi|^2.
struct MetricField {
    std::function<Mat(const Vec&)> a;
    std::function<Mat(const Vec&)> a_inv;
    std::function<Mat(const Vec&)> sigma;
    double theta = 1.0;
    bool is_identity = false;

    static MetricField identity(int dim);
    /// Builds a_inv and sigma numerically (eigendecomposition per call).
    static MetricField from_a(std::function<Mat(const Vec&)> a, double theta);
};

struct Box {
    Vec lo, hi;
};

/// Closed domain [D] described by a signed distance function: negative
/// inside, zero on the boundary, positive outside.
struct DomainSpec {
    std::function<double(const Vec&)> signed_distance;
    int dimension = 2;
    Box bounding_box;
    double boundary_tolerance = 1e-9;

    bool contains(const Vec& x) const { return signed_distance(x) <= boundary_tolerance; }
    bool on_boundary(const Vec& x) const {
        double s = signed_distance(x);
        return s >= -boundary_tolerance && s <= boundary_tolerance;
    }
    double diameter() const { return (bounding_box.hi - bounding_box.lo).norm(); }

    static DomainSpec unit_disk();
    static DomainSpec ellipse(double a, double b);
    static DomainSpec unit_ball(int d);
    /// Parses "unit_disk", "ellipse(a,b)", "unit_ball(d)".
    static DomainSpec named(const std::string& name);
};

/// Central finite-difference gradient of the signed distance.
Vec sd_gradient(const DomainSpec& dom, const Vec& x, double h = 1e-6);

/// Inward Euclidean unit normal at a boundary point (-grad sd, normalized).
Vec inward_normal(const DomainSpec& dom, const Vec& x);

/// Inward co-normal: the a(x)-image of the inward normal, normalized to
/// Euclidean length 1. Orthogonal to the boundary tangent space under
/// the a^-1(x) inner product.
Vec co_normal(const DomainSpec& dom, const MetricField& metric, const Vec& x);

/// Identity inside [D]; otherwise damped gradient steps on the signed
/// distance until |sd| <= boundary_tolerance.
Vec project_to_closure(const DomainSpec& dom, const Vec& x, int max_iter = 200);

/// Nearest-boundary projection for points on either side of the boundary.
Vec project_to_boundary(const DomainSpec& dom, const Vec& x, int max_iter = 200);

}  // namespace fwr
