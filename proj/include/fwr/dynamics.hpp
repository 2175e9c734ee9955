#pragma once

#include <vector>

#include "fwr/geometry.hpp"
#include "fwr/path.hpp"

namespace fwr {

/// Drift b together with the domain and metric it lives on.
struct DriftField {
    std::function<Vec(const Vec&)> b;
    DomainSpec domain;
    MetricField metric;
};

enum class BoundarySide { Outward, Inward };  // Outward = part of d1D, Inward = d2D

struct Equilibrium {
    int index = 0;  // 1-based, matching O_1..O_l
    Vec location;
    bool stable = false;
};

struct FlowOptions {
    double dt = 1e-3;
    double t_max = 100.0;
    double settle_tolerance = 1e-9;  // |bbar| below which the flow is considered settled
};

struct EquilibriumOptions {
    double dt = 1e-3;
    double t_max = 200.0;
    double merge_radius = -1.0;          // default 1e-4 * diam(D)
    double equilibrium_tolerance = 1e-6;  // |bbar(O_i)| bound
    double fd_step = 1e-5;                // tangential derivative step (d = 2)
};

/// bbar(x): equals b(x) in the interior; on the boundary the outward
/// co-normal component (under the a^-1 inner product) is removed.
Vec modified_drift(const DriftField& f, const Vec& x);

/// Outward iff (b, gamma)_{a^-1} < 0 at x.
BoundarySide classify_boundary(const DriftField& f, const Vec& x);

/// Explicit midpoint (RK2) integration of xdot = bbar(x) with projection
/// into [D] after every stage.
DiscretePath flow(const DriftField& f, const Vec& x0, double t_max, double dt);

/// Boundary equilibria of bbar found by integrating the tangential flow
/// (forward and backward) from each seed, then clustering the limits.
std::vector<Equilibrium> find_equilibria(const DriftField& f, const std::vector<Vec>& seeds,
                                         const EquilibriumOptions& opts = {});

/// Uniform angular seed grid on the boundary of a planar domain.
std::vector<Vec> boundary_seeds(const DomainSpec& dom, int count);

/// Index of the first stable equilibrium whose capture radius the flow
/// from x enters.
int first_attractor(const DriftField& f, const Vec& x, const std::vector<Equilibrium>& equilibria,
                    double capture_radius, const FlowOptions& opts = {});

/// Deterministic time for the flow from x to enter the union of the
/// (alpha/2)-neighborhoods of the equilibria.
double time_to_neighborhoods(const DriftField& f, const Vec& x,
                             const std::vector<Equilibrium>& equilibria, double alpha,
                             const FlowOptions& opts = {});

}  // namespace fwr
