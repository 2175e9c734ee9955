#include "fwr/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "fwr/errors.hpp"
#include "fwr/rng.hpp"

namespace fwr {

Vec modified_drift(const DriftField& f, const Vec& x) {
    double s = f.domain.signed_distance(x);
    double tol = f.domain.boundary_tolerance;
    if (s > tol)
        throw OutsideDomain("modified_drift: point outside [D], sd = " + std::to_string(s));
    Vec b = f.b(x);
    if (s < -tol) return b;  // interior
    Vec gamma = co_normal(f.domain, f.metric, x);
    Mat ainv = f.metric.a_inv(x);
    double bg = b.dot(ainv * gamma);
    if (bg >= 0.0) return b;  // b not pointing outward in the co-normal sense
    double g2 = gamma.dot(ainv * gamma);
    return Vec(b - (bg / g2) * gamma);
}

BoundarySide classify_boundary(const DriftField& f, const Vec& x) {
    if (!f.domain.on_boundary(x))
        throw NotOnBoundary("classify_boundary: not a boundary point");
    Vec gamma = co_normal(f.domain, f.metric, x);
    double bg = f.b(x).dot(f.metric.a_inv(x) * gamma);
    return bg < 0.0 ? BoundarySide::Outward : BoundarySide::Inward;
}

DiscretePath flow(const DriftField& f, const Vec& x0, double t_max, double dt) {
    if (!f.domain.contains(x0)) throw OutsideDomain("flow: x0 outside [D]");
    if (dt <= 0.0) throw DegenerateSegment("flow: dt must be positive");
    DiscretePath path;
    auto steps = static_cast<std::size_t>(std::llround(t_max / dt));
    path.times.reserve(steps + 1);
    path.points.reserve(steps + 1);
    Vec x = project_to_closure(f.domain, x0);
    path.times.push_back(0.0);
    path.points.push_back(x);
    try {
        for (std::size_t k = 1; k <= steps; ++k) {
            Vec k1 = modified_drift(f, x);
            Vec raw_mid = x + 0.5 * dt * k1;
            bool sliding = f.domain.signed_distance(raw_mid) > f.domain.boundary_tolerance;
            Vec xm = sliding ? project_to_boundary(f.domain, raw_mid) : raw_mid;
            Vec k2 = modified_drift(f, xm);
            // when the midpoint stage exits, the step is in the sliding
            // regime: pin the endpoint to the boundary instead of letting
            // it hover an O(dt) layer inside
            Vec cand = x + dt * k2;
            x = sliding ? project_to_boundary(f.domain, cand) : project_to_closure(f.domain, cand);
            path.times.push_back(static_cast<double>(k) * dt);
            path.points.push_back(x);
        }
    } catch (const ProjectionDiverged& e) {
        throw StepRejected(std::string("flow: projection failed: ") + e.what());
    }
    return path;
}

namespace {

Vec tangential_component(const DomainSpec& dom, const Vec& x, const Vec& v) {
    Vec n = inward_normal(dom, x);
    return Vec(v - v.dot(n) * n);
}

// Integrates the boundary-restricted flow of bbar (sign = +1 forward,
// -1 backward) and returns the settled point, or throws NoConvergence.
Vec settle_on_boundary(const DriftField& f, const Vec& seed, double sign,
                       const EquilibriumOptions& opts) {
    Vec x = project_to_boundary(f.domain, seed);
    double settle_rate = 1e-8 * std::max(1.0, f.domain.diameter());
    int quiet = 0;
    auto steps = static_cast<std::size_t>(std::llround(opts.t_max / opts.dt));
    for (std::size_t k = 0; k < steps; ++k) {
        Vec v = tangential_component(f.domain, x, modified_drift(f, x));
        Vec xn = project_to_boundary(f.domain, Vec(x + sign * opts.dt * v));
        double moved = (xn - x).norm();
        x = xn;
        if (moved < settle_rate * opts.dt) {
            if (++quiet >= 10) return x;
        } else {
            quiet = 0;
        }
    }
    throw NoConvergence("find_equilibria: seed did not settle within t_max");
}

bool classify_stable(const DriftField& f, const Vec& x, const EquilibriumOptions& opts) {
    const DomainSpec& dom = f.domain;
    int d = dom.dimension;
    Vec n = inward_normal(dom, x);
    if (d == 2) {
        Vec t(2);
        t << -n[1], n[0];
        auto tangential_speed = [&](const Vec& p) {
            Vec np = inward_normal(dom, p);
            Vec tp(2);
            tp << -np[1], np[0];
            if (tp.dot(t) < 0.0) tp = -tp;  // keep orientation consistent
            return modified_drift(f, p).dot(tp);
        };
        Vec xp = project_to_boundary(dom, Vec(x + opts.fd_step * t));
        Vec xm = project_to_boundary(dom, Vec(x - opts.fd_step * t));
        double deriv = (tangential_speed(xp) - tangential_speed(xm)) / (2.0 * opts.fd_step);
        return deriv < 0.0;
    }
    // d > 2: eigenvalues of the tangential Jacobian of bbar
    Eigen::FullPivLU<Mat> lu(n.transpose());
    Mat tb = lu.kernel();  // d x (d-1) tangent basis
    Mat jac(d - 1, d - 1);
    for (int j = 0; j < d - 1; ++j) {
        Vec dir = tb.col(j).normalized();
        Vec xp = project_to_boundary(dom, Vec(x + opts.fd_step * dir));
        Vec xm = project_to_boundary(dom, Vec(x - opts.fd_step * dir));
        Vec dv = (tangential_component(dom, xp, modified_drift(f, xp)) -
                  tangential_component(dom, xm, modified_drift(f, xm))) /
                 (2.0 * opts.fd_step);
        for (int i = 0; i < d - 1; ++i) jac(i, j) = dv.dot(tb.col(i).normalized());
    }
    Eigen::EigenSolver<Mat> es(jac);
    for (int i = 0; i < d - 1; ++i)
        if (es.eigenvalues()[i].real() >= 0.0) return false;
    return true;
}

}  // namespace

std::vector<Vec> boundary_seeds(const DomainSpec& dom, int count) {
    std::vector<Vec> seeds;
    seeds.reserve(count);
    Vec center = 0.5 * (dom.bounding_box.lo + dom.bounding_box.hi);
    double radius = dom.diameter();
    if (dom.dimension == 2) {
        for (int k = 0; k < count; ++k) {
            double th = 2.0 * M_PI * k / count;
            Vec dir(2);
            dir << std::cos(th), std::sin(th);
            seeds.push_back(project_to_boundary(dom, Vec(center + radius * dir)));
        }
    } else {
        auto rng = derived_stream(7261u, 0);
        std::normal_distribution<double> normal;
        for (int k = 0; k < count; ++k) {
            Vec dir(dom.dimension);
            for (int i = 0; i < dom.dimension; ++i) dir[i] = normal(rng);
            dir.normalize();
            seeds.push_back(project_to_boundary(dom, Vec(center + radius * dir)));
        }
    }
    return seeds;
}

std::vector<Equilibrium> find_equilibria(const DriftField& f, const std::vector<Vec>& seeds,
                                         const EquilibriumOptions& opts_in) {
    EquilibriumOptions opts = opts_in;
    if (opts.merge_radius <= 0.0) opts.merge_radius = 1e-4 * f.domain.diameter();

    std::vector<Vec> limits;
    for (const Vec& seed : seeds) {
        for (double sign : {1.0, -1.0}) {
            Vec x = settle_on_boundary(f, seed, sign, opts);
            if (modified_drift(f, x).norm() > opts.equilibrium_tolerance) continue;
            limits.push_back(x);
        }
    }
    if (limits.empty()) throw NoConvergence("find_equilibria: no equilibria found");

    // cluster within the merge radius
    std::vector<Vec> reps;
    std::vector<int> counts;
    for (const Vec& p : limits) {
        bool merged = false;
        for (std::size_t i = 0; i < reps.size(); ++i) {
            if ((reps[i] - p).norm() <= opts.merge_radius) {
                reps[i] = (reps[i] * counts[i] + p) / (counts[i] + 1);
                ++counts[i];
                merged = true;
                break;
            }
        }
        if (!merged) {
            reps.push_back(p);
            counts.push_back(1);
        }
    }

    // stable index order: by boundary angle for d=2, lexicographic otherwise
    Vec center = 0.5 * (f.domain.bounding_box.lo + f.domain.bounding_box.hi);
    std::sort(reps.begin(), reps.end(), [&](const Vec& u, const Vec& v) {
        if (f.domain.dimension == 2) {
            double au = std::atan2(u[1] - center[1], u[0] - center[0]);
            double av = std::atan2(v[1] - center[1], v[0] - center[0]);
            if (au < 0) au += 2.0 * M_PI;
            if (av < 0) av += 2.0 * M_PI;
            return au < av;
        }
        return std::lexicographical_compare(u.data(), u.data() + u.size(), v.data(),
                                            v.data() + v.size());
    });

    std::vector<Equilibrium> out;
    for (std::size_t i = 0; i < reps.size(); ++i) {
        Equilibrium e;
        e.index = static_cast<int>(i) + 1;
        e.location = reps[i];
        e.stable = classify_stable(f, reps[i], opts);
        out.push_back(std::move(e));
    }
    return out;
}

int first_attractor(const DriftField& f, const Vec& x, const std::vector<Equilibrium>& equilibria,
                    double capture_radius, const FlowOptions& opts) {
    if (!f.domain.contains(x)) throw OutsideDomain("first_attractor: x outside [D]");
    Vec p = project_to_closure(f.domain, x);
    auto steps = static_cast<std::size_t>(std::llround(opts.t_max / opts.dt));
    for (std::size_t k = 0; k <= steps; ++k) {
        for (const Equilibrium& e : equilibria)
            if (e.stable && (p - e.location).norm() <= capture_radius) return e.index;
        Vec k1 = modified_drift(f, p);
        Vec pm = project_to_closure(f.domain, Vec(p + 0.5 * opts.dt * k1));
        p = project_to_closure(f.domain, Vec(p + opts.dt * modified_drift(f, pm)));
    }
    throw NoConvergence("first_attractor: flow did not reach any stable equilibrium");
}

double time_to_neighborhoods(const DriftField& f, const Vec& x,
                             const std::vector<Equilibrium>& equilibria, double alpha,
                             const FlowOptions& opts) {
    if (!f.domain.contains(x)) throw OutsideDomain("time_to_neighborhoods: x outside [D]");
    Vec p = project_to_closure(f.domain, x);
    double radius = 0.5 * alpha;
    auto steps = static_cast<std::size_t>(std::llround(opts.t_max / opts.dt));
    for (std::size_t k = 0; k <= steps; ++k) {
        for (const Equilibrium& e : equilibria)
            if ((p - e.location).norm() <= radius) return static_cast<double>(k) * opts.dt;
        Vec k1 = modified_drift(f, p);
        Vec pm = project_to_closure(f.domain, Vec(p + 0.5 * opts.dt * k1));
        p = project_to_closure(f.domain, Vec(p + opts.dt * modified_drift(f, pm)));
    }
    throw NoConvergence("time_to_neighborhoods: neighborhoods not reached within t_max");
}

}  // namespace fwr
