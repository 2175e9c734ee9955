#include "fwr/quasipotential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "fwr/errors.hpp"

namespace fwr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Penalty {
    std::vector<Vec> centers;
    double radius = 0.0;
    double weight = 0.0;

    double operator()(const Vec& p) const {
        if (weight == 0.0 || centers.empty()) return 0.0;
        double s = 0.0;
        for (const Vec& c : centers) {
            double gap = radius - (p - c).norm();
            if (gap > 0.0) s += gap * gap;
        }
        return weight * s;
    }
};

// Fixed-horizon path functional: midpoint-rule action plus the clearance
// penalty integrated along the nodes.
struct PathProblem {
    const DriftField* f;
    double dt;
    Penalty penalty;

    double segment(const Vec& a, const Vec& b) const {
        return segment_action_bbar(*f, a, b, dt) + 0.5 * dt * ((penalty)(a) + (penalty)(b));
    }
    double total(const std::vector<Vec>& pts) const {
        double s = 0.0;
        for (std::size_t k = 0; k + 1 < pts.size(); ++k) s += segment(pts[k], pts[k + 1]);
        return s;
    }
};

// central finite differences, touching only the two segments adjacent to
// each perturbed node
void gradient(const PathProblem& prob, const std::vector<Vec>& pts, double h,
              std::vector<Vec>& g) {
    int n = static_cast<int>(pts.size());
    int d = static_cast<int>(pts.front().size());
    g.assign(n, Vec::Zero(d));
    for (int k = 1; k + 1 < n; ++k) {
        Vec p = pts[k];
        for (int c = 0; c < d; ++c) {
            double saved = p[c];
            p[c] = saved + h;
            double up = prob.segment(pts[k - 1], p) + prob.segment(p, pts[k + 1]);
            p[c] = saved - h;
            double dn = prob.segment(pts[k - 1], p) + prob.segment(p, pts[k + 1]);
            p[c] = saved;
            g[k][c] = (up - dn) / (2.0 * h);
        }
    }
}

void project_nodes(const DomainSpec& dom, std::vector<Vec>& pts) {
    for (std::size_t k = 1; k + 1 < pts.size(); ++k) pts[k] = project_to_closure(dom, pts[k]);
}

// Redistributes nodes along the polyline at equal increments of travel
// time under the locally optimal speed |bbar|_{a^-1} (the horizon-free
// minimizer moves at that speed). Plain equal-arc-length spacing would
// force a constant-speed profile, which the finite-horizon action cannot
// represent near equilibria; this keeps nodes spread without destroying
// the temporal profile. The speed is floored to keep the measure finite
// where bbar vanishes.
void reparametrize(const DriftField& f, std::vector<Vec>& pts) {
    int n = static_cast<int>(pts.size());
    std::vector<double> speed(n, 0.0);
    double max_speed = 0.0;
    for (int k = 0; k < n; ++k) {
        Vec bb = modified_drift(f, pts[k]);
        speed[k] = std::sqrt(bb.dot(f.metric.a_inv(pts[k]) * bb));
        max_speed = std::max(max_speed, speed[k]);
    }
    double floor = std::max(1e-2 * max_speed, 1e-12);
    std::vector<double> cum(n, 0.0);
    for (int k = 1; k < n; ++k) {
        double w = std::max(0.5 * (speed[k - 1] + speed[k]), floor);
        cum[k] = cum[k - 1] + (pts[k] - pts[k - 1]).norm() / w;
    }
    if (cum.back() <= 0.0) return;
    std::vector<Vec> out(n);
    out.front() = pts.front();
    out.back() = pts.back();
    int j = 0;
    for (int k = 1; k + 1 < n; ++k) {
        double target = cum.back() * k / (n - 1);
        while (j + 1 < n && cum[j + 1] < target) ++j;
        double span = cum[j + 1] - cum[j];
        double w = span > 0.0 ? (target - cum[j]) / span : 0.0;
        out[k] = project_to_closure(f.domain, Vec((1.0 - w) * pts[j] + w * pts[j + 1]));
    }
    pts = std::move(out);
}

double norm_of(const std::vector<Vec>& v) {
    double s = 0.0;
    for (const Vec& x : v) s += x.squaredNorm();
    return std::sqrt(s);
}

// Barzilai-Borwein descent with a backtracking acceptance test.
double minimize_fixed_horizon(const PathProblem& prob, const DomainSpec& dom,
                              std::vector<Vec>& pts, const MinimizeOptions& opt) {
    double h = opt.fd_step * dom.diameter();
    double value = prob.total(pts);
    std::vector<Vec> g, g_prev, pts_prev;
    gradient(prob, pts, h, g);
    double alpha = 1e-2 * dom.diameter() / (norm_of(g) + 1e-12);
    double window_best = value;
    int since_check = 0;

    for (int it = 0; it < opt.max_iterations; ++it) {
        double gnorm2 = 0.0;
        for (const Vec& gk : g) gnorm2 += gk.squaredNorm();
        if (gnorm2 <= 1e-24) break;

        double step = alpha;
        std::vector<Vec> cand;
        double cand_value = value;
        bool accepted = false;
        for (int bt = 0; bt < 30; ++bt) {
            cand = pts;
            for (std::size_t k = 1; k + 1 < cand.size(); ++k) cand[k] -= step * g[k];
            project_nodes(dom, cand);
            cand_value = prob.total(cand);
            if (cand_value <= value - 1e-4 * step * gnorm2) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;

        pts_prev = pts;
        g_prev = g;
        pts = std::move(cand);
        value = cand_value;

        if (opt.reparam_every > 0 && (it + 1) % opt.reparam_every == 0) {
            reparametrize(*prob.f, pts);
            value = prob.total(pts);
        }

        gradient(prob, pts, h, g);
        double sy = 0.0, ss = 0.0;
        for (std::size_t k = 0; k < pts.size(); ++k) {
            Vec s = pts[k] - pts_prev[k];
            ss += s.squaredNorm();
            sy += s.dot(g[k] - g_prev[k]);
        }
        alpha = sy > 1e-16 * ss ? ss / sy : 2.0 * step;
        alpha = std::clamp(alpha, 1e-10, 1e3 * dom.diameter());

        if (++since_check >= opt.stall_window) {
            if (window_best - value <= opt.rel_tolerance * (1.0 + std::abs(window_best))) break;
            window_best = value;
            since_check = 0;
        }
    }
    return value;
}

std::vector<Vec> chord_nodes(const DomainSpec& dom, const Vec& x, const Vec& y, int n) {
    std::vector<Vec> pts(n);
    for (int k = 0; k < n; ++k) {
        double s = static_cast<double>(k) / (n - 1);
        pts[k] = project_to_closure(dom, Vec(x + s * (y - x)));
    }
    return pts;
}

// For planar star-shaped domains: boundary arcs from x to y via angular
// interpolation around the box center, in both senses.
std::vector<std::vector<Vec>> boundary_arcs(const DomainSpec& dom, const Vec& x, const Vec& y,
                                            int n) {
    std::vector<std::vector<Vec>> arcs;
    if (dom.dimension != 2 || !dom.on_boundary(x) || !dom.on_boundary(y)) return arcs;
    Vec c = 0.5 * (dom.bounding_box.lo + dom.bounding_box.hi);
    double tx = std::atan2(x[1] - c[1], x[0] - c[0]);
    double ty = std::atan2(y[1] - c[1], y[0] - c[0]);
    double ccw = ty - tx;
    while (ccw <= 0.0) ccw += 2.0 * M_PI;
    double rho = dom.diameter();
    for (double span : {ccw, ccw - 2.0 * M_PI}) {
        std::vector<Vec> pts(n);
        pts.front() = x;
        pts.back() = y;
        bool ok = true;
        for (int k = 1; k + 1 < n; ++k) {
            double th = tx + span * k / (n - 1);
            Vec ray(2);
            ray << c[0] + rho * std::cos(th), c[1] + rho * std::sin(th);
            try {
                pts[k] = project_to_boundary(dom, ray);
            } catch (const Error&) {
                ok = false;
                break;
            }
        }
        if (ok) arcs.push_back(std::move(pts));
    }
    return arcs;
}

struct HorizonSearchResult {
    double action = kInf;
    double horizon = 0.0;
    std::vector<Vec> pts;
};

HorizonSearchResult search_horizons(const DriftField& f, const Vec& x, const Vec& y,
                                    const Penalty& pen, const MinimizeOptions& opt) {
    const DomainSpec& dom = f.domain;
    int n = opt.nodes;
    if (n < 3) throw ConfigInvalid("minimize_action: need at least 3 nodes");

    std::vector<std::vector<Vec>> starts;
    starts.push_back(chord_nodes(dom, x, y, n));
    for (auto& arc : boundary_arcs(dom, x, y, n)) starts.push_back(std::move(arc));

    double t0 = std::max((y - x).norm(), 0.1 * dom.diameter());
    std::vector<double> horizons;
    for (int k = 0; k < opt.coarse_horizons; ++k) {
        double s = opt.coarse_horizons == 1
                       ? 0.0
                       : -1.0 + 2.0 * k / (opt.coarse_horizons - 1.0);
        horizons.push_back(t0 * std::pow(opt.horizon_span, s));
    }

    HorizonSearchResult best;
    auto run = [&](double T, const std::vector<Vec>& init) {
        PathProblem prob{&f, T / (n - 1), pen};
        std::vector<Vec> pts = init;
        double v = minimize_fixed_horizon(prob, dom, pts, opt);
        if (v < best.action) {
            best.action = v;
            best.horizon = T;
            best.pts = std::move(pts);
        }
    };

    int best_coarse = -1;
    for (std::size_t hi = 0; hi < horizons.size(); ++hi) {
        double before = best.action;
        for (const auto& init : starts) run(horizons[hi], init);
        if (!best.pts.empty() && best.action < before) best_coarse = static_cast<int>(hi);
        if (!best.pts.empty()) run(horizons[hi], best.pts);  // warm start carried over
        if (best.action < before) best_coarse = static_cast<int>(hi);
    }
    if (best.pts.empty()) throw NoConvergence("minimize_action: every start failed");

    // golden-section refinement of the horizon around the coarse minimum
    int i = std::clamp(best_coarse, 1, static_cast<int>(horizons.size()) - 2);
    double lo = horizons[i - 1], hi = horizons[i + 1];
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    auto eval = [&](double T) {
        double before = best.action;
        run(T, best.pts);
        run(T, starts.front());
        return std::min(before, best.action);
    };
    double a = hi - gr * (hi - lo), b = lo + gr * (hi - lo);
    double fa = eval(a), fb = eval(b);
    for (int it = 0; it < opt.refine_iterations; ++it) {
        if (fa <= fb) {
            hi = b;
            b = a;
            fb = fa;
            a = hi - gr * (hi - lo);
            fa = eval(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + gr * (hi - lo);
            fb = eval(b);
        }
    }
    return best;
}

PathResult package(const HorizonSearchResult& r) {
    PathResult out;
    out.action = r.action;
    out.horizon = r.horizon;
    int n = static_cast<int>(r.pts.size());
    out.path.times.resize(n);
    out.path.points = r.pts;
    for (int k = 0; k < n; ++k) out.path.times[k] = r.horizon * k / (n - 1);
    return out;
}

}  // namespace

PathResult minimize_action(const DriftField& f, const Vec& x, const Vec& y,
                           const MinimizeOptions& opt) {
    if (!f.domain.contains(x) || !f.domain.contains(y))
        throw OutsideDomain("minimize_action: endpoints must lie in [D]");
    Penalty none;
    return package(search_horizons(f, x, y, none, opt));
}

PathResult minimize_action_avoiding(const DriftField& f, const Vec& x, const Vec& y,
                                    const std::vector<Vec>& avoid, const MinimizeOptions& opt) {
    if (!f.domain.contains(x) || !f.domain.contains(y))
        throw OutsideDomain("minimize_action_avoiding: endpoints must lie in [D]");
    double radius = opt.avoid_radius > 0.0 ? opt.avoid_radius : 0.05 * f.domain.diameter();

    // drop avoided points indistinguishable from the endpoints
    Penalty pen;
    pen.radius = radius;
    for (const Vec& c : avoid)
        if ((c - x).norm() > radius && (c - y).norm() > radius) pen.centers.push_back(c);
    if (pen.centers.empty()) return minimize_action(f, x, y, opt);

    HorizonSearchResult best;
    for (double w = 10.0; w <= opt.penalty_max; w *= 10.0) {
        pen.weight = w;
        MinimizeOptions inner = opt;
        if (!best.pts.empty()) {
            // warm continuation: keep the horizon scan tight around the
            // previous solution
            inner.coarse_horizons = 3;
            inner.horizon_span = 2.0;
        }
        HorizonSearchResult r = search_horizons(f, x, y, pen, inner);
        best = std::move(r);
        double clearance = kInf;
        for (std::size_t k = 1; k + 1 < best.pts.size(); ++k)
            for (const Vec& c : pen.centers)
                clearance = std::min(clearance, (best.pts[k] - c).norm());
        if (clearance >= 0.5 * radius) {
            PathResult out = package(best);
            out.action = action_bbar(out.path, f);  // penalty-free value
            return out;
        }
    }
    throw NoFeasiblePath("minimize_action_avoiding: penalty escalation never cleared the "
                         "avoided set");
}

namespace {

struct GridGraph {
    std::vector<Vec> nodes;
    std::vector<char> boundary;                       // node sits on dD
    std::vector<std::vector<int>> adjacency;          // undirected neighbor lists
};

double edge_weight(const DriftField& f, const GridGraph& g, int p, int q) {
    Vec e = g.nodes[q] - g.nodes[p];
    Vec m = 0.5 * (g.nodes[p] + g.nodes[q]);
    m = (g.boundary[p] && g.boundary[q]) ? project_to_boundary(f.domain, m)
                                         : project_to_closure(f.domain, m);
    Mat ainv = f.metric.a_inv(m);
    Vec bb = modified_drift(f, m);
    double w = std::sqrt(e.dot(ainv * e)) * std::sqrt(bb.dot(ainv * bb)) - bb.dot(ainv * e);
    return std::max(0.0, w);
}

GridGraph build_grid(const DriftField& f, const std::vector<Vec>& extra,
                     const std::vector<Vec>& avoid, double avoid_radius,
                     const OracleOptions& opt) {
    const DomainSpec& dom = f.domain;
    if (dom.dimension != 2)
        throw ConfigInvalid("oracle_dijkstra: the grid oracle is planar only");
    int R = opt.resolution;
    if (R < 8) throw ConfigInvalid("oracle_dijkstra: resolution too small");
    double hx = (dom.bounding_box.hi[0] - dom.bounding_box.lo[0]) / (R - 1);
    double hy = (dom.bounding_box.hi[1] - dom.bounding_box.lo[1]) / (R - 1);
    double h = std::max(hx, hy);

    auto excluded = [&](const Vec& p) {
        for (const Vec& c : avoid)
            if ((p - c).norm() < avoid_radius) return true;
        return false;
    };

    GridGraph g;
    std::vector<int> interior_id(R * R, -1), boundary_id(R * R, -1);
    for (int iy = 0; iy < R; ++iy) {
        for (int ix = 0; ix < R; ++ix) {
            Vec p(2);
            p << dom.bounding_box.lo[0] + ix * hx, dom.bounding_box.lo[1] + iy * hy;
            double sd = dom.signed_distance(p);
            if (sd <= dom.boundary_tolerance && !excluded(p)) {
                interior_id[iy * R + ix] = static_cast<int>(g.nodes.size());
                g.nodes.push_back(p);
                g.boundary.push_back(0);
            }
            if (std::abs(sd) <= 1.2 * h) {
                try {
                    Vec q = project_to_boundary(dom, p);
                    if (!excluded(q)) {
                        boundary_id[iy * R + ix] = static_cast<int>(g.nodes.size());
                        g.nodes.push_back(q);
                        g.boundary.push_back(1);
                    }
                } catch (const Error&) {
                }
            }
        }
    }
    g.adjacency.resize(g.nodes.size());
    auto link = [&](int a, int b) {
        if (a < 0 || b < 0 || a == b) return;
        g.adjacency[a].push_back(b);
        g.adjacency[b].push_back(a);
    };
    for (int iy = 0; iy < R; ++iy) {
        for (int ix = 0; ix < R; ++ix) {
            int cell = iy * R + ix;
            link(interior_id[cell], boundary_id[cell]);
            for (int dy = 0; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dy == 0 && dx <= 0) continue;  // undirected: forward half only
                    int nx = ix + dx, ny = iy + dy;
                    if (nx < 0 || nx >= R || ny >= R) continue;
                    int other = ny * R + nx;
                    link(interior_id[cell], interior_id[other]);
                    link(interior_id[cell], boundary_id[other]);
                    link(boundary_id[cell], interior_id[other]);
                    if (boundary_id[cell] >= 0 && boundary_id[other] >= 0 &&
                        (g.nodes[boundary_id[cell]] - g.nodes[boundary_id[other]]).norm() <=
                            1.6 * h)
                        link(boundary_id[cell], boundary_id[other]);
                }
            }
        }
    }
    // terminal nodes attach to everything nearby
    for (const Vec& p : extra) {
        int id = static_cast<int>(g.nodes.size());
        g.nodes.push_back(p);
        g.boundary.push_back(dom.on_boundary(p) ? 1 : 0);
        g.adjacency.emplace_back();
        for (int q = 0; q < id; ++q)
            if ((g.nodes[q] - p).norm() <= 1.6 * h) link(id, q);
        if (g.adjacency[id].empty())
            throw UnreachableTarget("oracle_dijkstra: a terminal node has no grid neighbors");
    }
    return g;
}

double grid_dijkstra(const DriftField& f, const GridGraph& g, int src, int dst) {
    std::vector<double> dist(g.nodes.size(), kInf);
    using QE = std::pair<double, int>;
    std::priority_queue<QE, std::vector<QE>, std::greater<>> q;
    dist[src] = 0.0;
    q.push({0.0, src});
    while (!q.empty()) {
        auto [d, u] = q.top();
        q.pop();
        if (d > dist[u]) continue;
        if (u == dst) return d;
        for (int v : g.adjacency[u]) {
            double nd = d + edge_weight(f, g, u, v);
            if (nd < dist[v]) {
                dist[v] = nd;
                q.push({nd, v});
            }
        }
    }
    throw UnreachableTarget("oracle_dijkstra: target unreachable on the grid");
}

}  // namespace

double oracle_dijkstra(const DriftField& f, const Vec& x, const Vec& y,
                       const OracleOptions& opt) {
    GridGraph g = build_grid(f, {x, y}, {}, 0.0, opt);
    int n = static_cast<int>(g.nodes.size());
    return grid_dijkstra(f, g, n - 2, n - 1);
}

double oracle_dijkstra_avoiding(const DriftField& f, const Vec& x, const Vec& y,
                                const std::vector<Vec>& avoid, const OracleOptions& opt) {
    double radius = opt.avoid_radius > 0.0 ? opt.avoid_radius : 0.05 * f.domain.diameter();
    std::vector<Vec> kept;
    for (const Vec& c : avoid)
        if ((c - x).norm() > radius && (c - y).norm() > radius) kept.push_back(c);
    GridGraph g = build_grid(f, {x, y}, kept, radius, opt);
    int n = static_cast<int>(g.nodes.size());
    return grid_dijkstra(f, g, n - 2, n - 1);
}

QuasipotentialMatrix build_matrix(const DriftField& f,
                                  const std::vector<Equilibrium>& equilibria, Variant variant,
                                  const MatrixOptions& opt) {
    std::vector<Equilibrium> stable;
    for (const Equilibrium& e : equilibria)
        if (e.stable) stable.push_back(e);
    if (stable.empty()) throw ConfigInvalid("build_matrix: no stable equilibria");

    QuasipotentialMatrix out;
    out.variant = variant;
    out.provenance = opt.use_oracle ? Provenance::Oracle : Provenance::Optimized;
    out.equilibria = stable;
    int l = static_cast<int>(stable.size());
    out.values = Mat::Zero(l, l);
    for (const Equilibrium& e : stable) out.labels.push_back("O_" + std::to_string(e.index));

    for (int i = 0; i < l; ++i) {
        for (int j = 0; j < l; ++j) {
            if (i == j) continue;
            const Vec& x = stable[i].location;
            const Vec& y = stable[j].location;
            std::vector<Vec> avoid;
            if (variant == Variant::Avoiding)
                for (const Equilibrium& e : equilibria)
                    if ((e.location - x).norm() > 1e-12 && (e.location - y).norm() > 1e-12)
                        avoid.push_back(e.location);
            double v;
            if (opt.use_oracle) {
                v = variant == Variant::Avoiding
                        ? oracle_dijkstra_avoiding(f, x, y, avoid, opt.oracle)
                        : oracle_dijkstra(f, x, y, opt.oracle);
            } else {
                MinimizeOptions mo = opt.minimize;
                if (mo.avoid_radius <= 0.0 && opt.oracle.avoid_radius > 0.0)
                    mo.avoid_radius = opt.oracle.avoid_radius;
                v = variant == Variant::Avoiding
                        ? minimize_action_avoiding(f, x, y, avoid, mo).action
                        : minimize_action(f, x, y, mo).action;
            }
            out.values(i, j) = v;
        }
    }
    out.validate(1e-6);
    return out;
}

}  // namespace fwr
