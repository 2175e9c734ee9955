#include "fwr/action.hpp"

#include <cmath>

#include "fwr/errors.hpp"

namespace fwr {

namespace {

// A segment counts as boundary-sliding when both endpoints sit on dD
// (within the tolerance band). Its midpoint is then evaluated on the
// boundary itself: the chord midpoint of a sliding path sags inside by
// O(|dx|^2), where bbar jumps, so evaluating the raw midpoint would not
// converge to the continuum integral.
bool sliding_segment(const DomainSpec& dom, const Vec& x0, const Vec& x1) {
    double band = 10.0 * dom.boundary_tolerance;
    return std::abs(dom.signed_distance(x0)) <= band &&
           std::abs(dom.signed_distance(x1)) <= band;
}

struct SegmentContext {
    Vec midpoint;
    bool boundary;
};

SegmentContext segment_context(const DomainSpec& dom, const Vec& x0, const Vec& x1) {
    SegmentContext ctx;
    ctx.boundary = sliding_segment(dom, x0, x1);
    Vec m = 0.5 * (x0 + x1);
    ctx.midpoint = ctx.boundary ? project_to_boundary(dom, m) : project_to_closure(dom, m);
    return ctx;
}

template <typename Integrand>
double quadrature(const DiscretePath& path, const DriftField& f, Integrand&& integrand) {
    if (path.size() < 2) return 0.0;
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        double dt = path.times[k + 1] - path.times[k];
        if (dt <= 0.0) throw DegenerateSegment("action: non-increasing times at segment " +
                                               std::to_string(k));
        Vec v = (path.points[k + 1] - path.points[k]) / dt;
        SegmentContext ctx = segment_context(f.domain, path.points[k], path.points[k + 1]);
        total += integrand(v, ctx) * dt;
    }
    return total;
}

double segment_cost_bbar(const DriftField& f, const Vec& v, const SegmentContext& ctx) {
    Vec bb = modified_drift(f, ctx.midpoint);
    Vec r = v - bb;
    return 0.5 * r.dot(f.metric.a_inv(ctx.midpoint) * r);
}

}  // namespace

double segment_action_bbar(const DriftField& f, const Vec& x0, const Vec& x1, double dt) {
    if (dt <= 0.0) throw DegenerateSegment("segment_action_bbar: dt <= 0");
    Vec v = (x1 - x0) / dt;
    SegmentContext ctx = segment_context(f.domain, x0, x1);
    return segment_cost_bbar(f, v, ctx) * dt;
}

double action_bbar(const DiscretePath& path, const DriftField& f) {
    return quadrature(path, f, [&f](const Vec& v, const SegmentContext& ctx) {
        return segment_cost_bbar(f, v, ctx);
    });
}

std::vector<double> action_segments_bbar(const DiscretePath& path, const DriftField& f) {
    std::vector<double> out;
    if (path.size() < 2) return out;
    out.reserve(path.size() - 1);
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        double dt = path.times[k + 1] - path.times[k];
        if (dt <= 0.0) throw DegenerateSegment("action: non-increasing times");
        Vec v = (path.points[k + 1] - path.points[k]) / dt;
        SegmentContext ctx = segment_context(f.domain, path.points[k], path.points[k + 1]);
        out.push_back(segment_cost_bbar(f, v, ctx) * dt);
    }
    return out;
}

double action_omega(const DiscretePath& path, const DriftField& f) {
    return quadrature(path, f, [&f](const Vec& v, const SegmentContext& ctx) {
        Vec b = f.b(ctx.midpoint);
        Mat ainv = f.metric.a_inv(ctx.midpoint);
        Vec r = v - b;
        if (ctx.boundary) {
            Vec gamma = co_normal(f.domain, f.metric, ctx.midpoint);
            double g2 = gamma.dot(ainv * gamma);
            double omega = std::max(0.0, r.dot(ainv * gamma) / g2);
            r -= omega * gamma;
        }
        return 0.5 * r.dot(ainv * r);
    });
}

DiscretePath connector(const Vec& x, const Vec& y, const DomainSpec& dom, double locality_radius,
                       int n_nodes) {
    double dist = (y - x).norm();
    if (dist > locality_radius)
        throw TooFar("connector: |x-y| exceeds the locality radius");
    DiscretePath path;
    if (dist == 0.0) {
        path.times = {0.0};
        path.points = {x};
        return path;
    }
    double T = dist;  // horizon equal to the chord length
    path.times.reserve(n_nodes);
    path.points.reserve(n_nodes);
    for (int k = 0; k < n_nodes; ++k) {
        double s = static_cast<double>(k) / (n_nodes - 1);
        path.times.push_back(s * T);
        path.points.push_back(project_to_closure(dom, Vec(x + s * (y - x))));
    }
    return path;
}

}  // namespace fwr
