#include "fwr/geometry.hpp"

#include <cmath>
#include <cstdlib>

#include "fwr/errors.hpp"

namespace fwr {

MetricField MetricField::identity(int dim) {
    MetricField m;
    Mat id = Mat::Identity(dim, dim);
    m.a = [id](const Vec&) { return id; };
    m.a_inv = m.a;
    m.sigma = m.a;
    m.theta = 1.0;
    m.is_identity = true;
    return m;
}

MetricField MetricField::from_a(std::function<Mat(const Vec&)> a, double theta) {
    MetricField m;
    m.a = a;
    m.a_inv = [a](const Vec& x) { return Mat(a(x).inverse()); };
    m.sigma = [a](const Vec& x) {
        Eigen::SelfAdjointEigenSolver<Mat> es(a(x));
        return Mat(es.operatorSqrt());
    };
    m.theta = theta;
    return m;
}

namespace {

// Eberly's robust bisection for the distance from a first-quadrant point
// to the ellipse (x/a)^2 + (y/b)^2 = 1 with a >= b.
double ellipse_distance_quadrant(double a, double b, double p0, double p1) {
    if (p1 > 0.0) {
        if (p0 > 0.0) {
            double z0 = p0 / a, z1 = p1 / b;
            double g = z0 * z0 + z1 * z1 - 1.0;
            if (std::abs(g) < 1e-15) return 0.0;
            // root of F(t) in (-b^2, inf)
            double t0 = -b * b + b * p1;
            double t1 = -b * b + std::hypot(a * p0, b * p1);
            double t = 0.0;
            for (int it = 0; it < 200; ++it) {
                t = 0.5 * (t0 + t1);
                double r0 = a * p0 / (t + a * a);
                double r1 = b * p1 / (t + b * b);
                double f = r0 * r0 + r1 * r1 - 1.0;
                if (f > 0.0)
                    t0 = t;
                else
                    t1 = t;
                if (t1 - t0 < 1e-15 * (1.0 + std::abs(t))) break;
            }
            double x = a * a * p0 / (t + a * a);
            double y = b * b * p1 / (t + b * b);
            double d = std::hypot(x - p0, y - p1);
            double inside = (p0 / a) * (p0 / a) + (p1 / b) * (p1 / b) - 1.0;
            return inside < 0.0 ? -d : d;
        }
        // on the minor axis
        double d = p1 - b;
        return d;
    }
    // on the major axis
    if (p0 < (a * a - b * b) / a) {
        double x = a * a * p0 / (a * a - b * b);
        double y = b * std::sqrt(std::max(0.0, 1.0 - (x / a) * (x / a)));
        return -std::hypot(x - p0, y);
    }
    return p0 - a;
}

}  // namespace

DomainSpec DomainSpec::unit_disk() {
    DomainSpec d;
    d.dimension = 2;
    d.signed_distance = [](const Vec& x) { return x.norm() - 1.0; };
    d.bounding_box.lo = Vec::Constant(2, -1.0);
    d.bounding_box.hi = Vec::Constant(2, 1.0);
    return d;
}

DomainSpec DomainSpec::ellipse(double a, double b) {
    DomainSpec d;
    d.dimension = 2;
    if (a < b) std::swap(a, b);  // quadrant solver assumes a >= b
    d.signed_distance = [a, b](const Vec& x) {
        return ellipse_distance_quadrant(a, b, std::abs(x[0]), std::abs(x[1]));
    };
    d.bounding_box.lo = Vec(2);
    d.bounding_box.hi = Vec(2);
    d.bounding_box.lo << -a, -b;
    d.bounding_box.hi << a, b;
    return d;
}

DomainSpec DomainSpec::unit_ball(int dim) {
    DomainSpec d;
    d.dimension = dim;
    d.signed_distance = [](const Vec& x) { return x.norm() - 1.0; };
    d.bounding_box.lo = Vec::Constant(dim, -1.0);
    d.bounding_box.hi = Vec::Constant(dim, 1.0);
    return d;
}

DomainSpec DomainSpec::named(const std::string& name) {
    if (name == "unit_disk") return unit_disk();
    auto paren = name.find('(');
    if (paren != std::string::npos && name.back() == ')') {
        std::string head = name.substr(0, paren);
        std::string args = name.substr(paren + 1, name.size() - paren - 2);
        if (head == "ellipse") {
            auto comma = args.find(',');
            if (comma == std::string::npos)
                throw ConfigInvalid("ellipse(a,b) needs two parameters: " + name);
            return ellipse(std::stod(args.substr(0, comma)), std::stod(args.substr(comma + 1)));
        }
        if (head == "unit_ball") return unit_ball(std::stoi(args));
    }
    throw ConfigInvalid("unknown domain: " + name);
}

Vec sd_gradient(const DomainSpec& dom, const Vec& x, double h) {
    Vec g(x.size());
    Vec p = x;
    for (int i = 0; i < x.size(); ++i) {
        p[i] = x[i] + h;
        double fp = dom.signed_distance(p);
        p[i] = x[i] - h;
        double fm = dom.signed_distance(p);
        p[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

Vec inward_normal(const DomainSpec& dom, const Vec& x) {
    if (!dom.on_boundary(x))
        throw NotOnBoundary("inward_normal: point is not on the boundary, sd = " +
                            std::to_string(dom.signed_distance(x)));
    Vec g = sd_gradient(dom, x);
    double n = g.norm();
    if (n == 0.0) throw NotOnBoundary("inward_normal: degenerate signed-distance gradient");
    return Vec(-g / n);
}

Vec co_normal(const DomainSpec& dom, const MetricField& metric, const Vec& x) {
    Vec n = inward_normal(dom, x);
    if (metric.is_identity) return n;
    Vec g = metric.a(x) * n;
    g /= g.norm();
    if (g.dot(n) < 0.0) g = -g;
    return g;
}

Vec project_to_closure(const DomainSpec& dom, const Vec& x, int max_iter) {
    double s = dom.signed_distance(x);
    if (s <= dom.boundary_tolerance) return x;
    return project_to_boundary(dom, x, max_iter);
}

Vec project_to_boundary(const DomainSpec& dom, const Vec& x, int max_iter) {
    Vec p = x;
    double s = dom.signed_distance(p);
    for (int it = 0; it < max_iter; ++it) {
        if (std::abs(s) <= dom.boundary_tolerance) return p;
        Vec g = sd_gradient(dom, p);
        double gn2 = g.squaredNorm();
        if (gn2 < 1e-14)
            throw ProjectionDiverged("project_to_boundary: vanishing gradient");
        // damped Newton step on sd; sd is 1-Lipschitz so this converges
        // for points within the reach of the boundary
        Vec trial = p - (s / gn2) * g;
        double st = dom.signed_distance(trial);
        double damp = 1.0;
        int backtrack = 0;
        while (std::abs(st) > std::abs(s) && backtrack < 30) {
            damp *= 0.5;
            trial = p - damp * (s / gn2) * g;
            st = dom.signed_distance(trial);
            ++backtrack;
        }
        if (backtrack >= 30)
            throw ProjectionDiverged("project_to_boundary: no progress");
        p = trial;
        s = st;
    }
    throw ProjectionDiverged("project_to_boundary: iteration cap reached, |sd| = " +
                             std::to_string(std::abs(s)));
}

}  // namespace fwr
