#include "fwr/reflect_sde.hpp"

#include <cmath>
#include <limits>

#include "fwr/errors.hpp"
#include "fwr/rng.hpp"

namespace fwr {

std::pair<DiscretePath, std::vector<double>> skorokhod_half_space(const DiscretePath& psi) {
    if (psi.size() == 0) return {psi, {}};
    if (psi.points[0][0] < 0.0)
        throw Error("skorokhod_half_space: first coordinate must start nonnegative");
    DiscretePath out = psi;
    std::vector<double> local_time(psi.size());
    double running_min = 0.0;
    for (std::size_t k = 0; k < psi.size(); ++k) {
        running_min = std::min(running_min, psi.points[k][0]);
        double deficit = -std::min(0.0, running_min);
        out.points[k][0] = psi.points[k][0] + deficit;
        local_time[k] = deficit;
    }
    return {std::move(out), std::move(local_time)};
}

namespace {

struct Stepper {
    const DriftField& f;
    const SimConfig& cfg;
    std::mt19937_64 rng;
    std::normal_distribution<double> gauss;

    Stepper(const DriftField& field, const SimConfig& c, std::uint64_t traj_index)
        : f(field), cfg(c), rng(derived_stream(c.seed, traj_index)) {}

    // One Euler-Maruyama substep of size dt; reflects if the proposal
    // leaves [D]. Returns the local-time increment.
    double substep(Vec& x, double dt, int depth) {
        const DomainSpec& dom = f.domain;
        Vec prop = x + dt * f.b(x);
        if (cfg.epsilon > 0.0) {
            Vec z(x.size());
            for (int i = 0; i < x.size(); ++i) z[i] = gauss(rng);
            double amp = cfg.epsilon * std::sqrt(dt);
            if (f.metric.is_identity)
                prop += amp * z;
            else
                prop += amp * (f.metric.sigma(x) * z);
        }
        double s = dom.signed_distance(prop);
        if (s <= dom.boundary_tolerance) {
            x = prop;
            return 0.0;
        }
        double dxi = 0.0;
        if (!reflect(prop, s, dxi)) {
            if (depth >= cfg.max_step_splits)
                throw StepRejected("simulate: reflection failed after step-halving cap");
            // retry the move as two half steps with fresh noise
            double a = substep(x, 0.5 * dt, depth + 1);
            double b = substep(x, 0.5 * dt, depth + 1);
            return a + b;
        }
        x = prop;
        return dxi;
    }

    // Pulls prop back into [D] along the co-normal at the nearest boundary
    // point. On success updates prop in place and sets dxi to the Euclidean
    // length of the correction.
    bool reflect(Vec& prop, double sd_prop, double& dxi) const {
        const DomainSpec& dom = f.domain;
        Vec xb;
        try {
            xb = project_to_boundary(dom, prop);
        } catch (const ProjectionDiverged&) {
            return false;
        }
        Vec n = inward_normal(dom, xb);
        Vec gamma = co_normal(dom, f.metric, xb);
        double slope = gamma.dot(n);
        if (slope < 1e-8) return false;  // co-normal nearly tangent: reject the step

        if (cfg.scheme == Scheme::HalfSpaceLocal) {
            // boundary-adapted coordinates: first coordinate is -sd, the
            // correction is the exact half-space map applied to one step
            double c = sd_prop / slope;
            Vec cand = prop + c * gamma;
            if (dom.signed_distance(cand) > dom.boundary_tolerance)
                cand = project_to_closure(dom, cand);
            prop = cand;
            dxi = c;
            return true;
        }

        // Projection scheme: smallest c >= 0 with prop + c*gamma on dD
        double c_lo = 0.0;
        double c_hi = sd_prop / slope;
        double cap = 64.0 * (c_hi + dom.boundary_tolerance);
        while (dom.signed_distance(Vec(prop + c_hi * gamma)) > 0.0) {
            c_lo = c_hi;
            c_hi *= 1.5;
            if (c_hi > cap) return false;
        }
        for (int it = 0; it < 200; ++it) {
            double c = 0.5 * (c_lo + c_hi);
            double s = dom.signed_distance(Vec(prop + c * gamma));
            if (std::abs(s) <= dom.boundary_tolerance) {
                prop += c * gamma;
                dxi = c;
                return true;
            }
            (s > 0.0 ? c_lo : c_hi) = c;
        }
        double c = 0.5 * (c_lo + c_hi);
        prop += c * gamma;
        if (dom.signed_distance(prop) > dom.boundary_tolerance) return false;
        dxi = c;
        return true;
    }
};

}  // namespace

void simulate_visit(const DriftField& f, const SimConfig& cfg, const Vec& x0,
                    std::uint64_t trajectory_index, const StepVisitor& visit) {
    if (!f.domain.contains(x0)) throw OutsideDomain("simulate: x0 outside [D]");
    if (cfg.dt <= 0.0 || cfg.t_max < 0.0)
        throw ConfigInvalid("simulate: need dt > 0 and t_max >= 0");
    Stepper stepper(f, cfg, trajectory_index);
    Vec x = project_to_closure(f.domain, x0);
    double xi = 0.0;
    double tol = f.domain.boundary_tolerance;
    visit(0.0, x, xi, std::abs(f.domain.signed_distance(x)) <= tol);
    auto steps = static_cast<std::size_t>(std::llround(cfg.t_max / cfg.dt));
    for (std::size_t k = 1; k <= steps; ++k) {
        double dxi = stepper.substep(x, cfg.dt, 0);
        xi += dxi;
        bool on_bd = dxi > 0.0 || std::abs(f.domain.signed_distance(x)) <= tol;
        visit(static_cast<double>(k) * cfg.dt, x, xi, on_bd);
    }
}

ReflectedTrajectory simulate(const DriftField& f, const SimConfig& cfg, const Vec& x0,
                             std::uint64_t trajectory_index) {
    ReflectedTrajectory traj;
    auto steps = static_cast<std::size_t>(std::llround(cfg.t_max / cfg.dt));
    traj.times.reserve(steps + 1);
    traj.states.reserve(steps + 1);
    traj.local_time.reserve(steps + 1);
    traj.boundary_flags.reserve(steps + 1);
    simulate_visit(f, cfg, x0, trajectory_index,
                   [&traj](double t, const Vec& x, double xi, bool on_bd) {
                       traj.times.push_back(t);
                       traj.states.push_back(x);
                       traj.local_time.push_back(xi);
                       traj.boundary_flags.push_back(on_bd ? 1 : 0);
                   });
    return traj;
}

double hitting_time_neighborhoods(const ReflectedTrajectory& traj,
                                  const std::vector<Equilibrium>& equilibria, double alpha) {
    for (std::size_t k = 0; k < traj.states.size(); ++k)
        for (const Equilibrium& e : equilibria)
            if ((traj.states[k] - e.location).norm() <= alpha) return traj.times[k];
    return std::numeric_limits<double>::infinity();
}

ChainTracker::ChainTracker(ChainConfig cfg) : cfg_(std::move(cfg)) {
    if (!(0.0 < cfg_.rho1 && cfg_.rho1 < cfg_.rho2 && cfg_.rho2 < cfg_.rho0))
        throw ConfigInvalid("ChainConfig: need 0 < rho1 < rho2 < rho0");
    for (std::size_t i = 0; i < cfg_.equilibria.size(); ++i)
        for (std::size_t j = i + 1; j < cfg_.equilibria.size(); ++j)
            if ((cfg_.equilibria[i].location - cfg_.equilibria[j].location).norm() <=
                2.0 * cfg_.rho0)
                throw ConfigInvalid("ChainConfig: rho0-neighborhoods overlap");
}

void ChainTracker::feed(double t, const Vec& x) {
    if (events_.empty()) {
        events_.push_back({t, -1});  // Z_0 = starting point
        return;
    }
    if (waiting_sigma_) {
        bool in_C = true;
        for (const Equilibrium& e : cfg_.equilibria)
            if ((x - e.location).norm() < cfg_.rho0) {
                in_C = false;
                break;
            }
        if (in_C) {
            waiting_sigma_ = false;
            saw_sigma_ = true;
        }
        return;
    }
    for (const Equilibrium& e : cfg_.equilibria) {
        if ((x - e.location).norm() <= cfg_.rho1) {
            events_.push_back({t, e.index});
            waiting_sigma_ = true;
            return;
        }
    }
}

std::vector<ChainEvent> extract_chain(const ReflectedTrajectory& traj, const ChainConfig& cfg) {
    ChainTracker tracker(cfg);
    for (std::size_t k = 0; k < traj.states.size(); ++k) tracker.feed(traj.times[k], traj.states[k]);
    if (!tracker.saw_sigma0())
        throw ChainEmpty("extract_chain: trajectory never entered the set C");
    return tracker.events();
}

}  // namespace fwr
