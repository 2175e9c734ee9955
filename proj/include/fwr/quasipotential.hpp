#pragma once

#include <vector>

#include "fwr/action.hpp"
#include "fwr/dynamics.hpp"
#include "fwr/qmatrix.hpp"

namespace fwr {

struct MinimizeOptions {
    int nodes = 101;               // path discretization, endpoints included
    int max_iterations = 800;      // gradient iterations per horizon
    double rel_tolerance = 1e-8;   // relative decrease over stall_window
    int stall_window = 60;
    int reparam_every = 25;        // arc-length reparametrization cadence
    int coarse_horizons = 7;       // log-spaced horizon scan
    double horizon_span = 16.0;    // scan covers [T0/span, T0*span]
    int refine_iterations = 10;    // golden-section steps on the horizon
    double fd_step = 1e-6;         // gradient finite-difference step (times diam)
    double avoid_radius = -1.0;    // avoiding variant; default 0.05 * diam
    double penalty_max = 1e6;
};

struct PathResult {
    double action = 0.0;
    double horizon = 0.0;
    DiscretePath path;
};

/// V+(x,y): minimum of the action over paths x -> y in [D], over the
/// discretized path and the horizon. Gradient descent with
/// Barzilai-Borwein steps and several geometric initial paths.
PathResult minimize_action(const DriftField& f, const Vec& x, const Vec& y,
                           const MinimizeOptions& opt = {});

/// Vtilde+(x,y): as above, but the path must keep clearance avoid_radius
/// from every point in `avoid` (quadratic penalty, escalated until the
/// clearance holds). Throws NoFeasiblePath if no admissible path is found.
PathResult minimize_action_avoiding(const DriftField& f, const Vec& x, const Vec& y,
                                    const std::vector<Vec>& avoid,
                                    const MinimizeOptions& opt = {});

struct OracleOptions {
    int resolution = 120;          // grid nodes per axis over the bounding box
    double avoid_radius = -1.0;    // exclusion radius for avoided points
};

/// Independent shortest-path estimate of V+(x,y): Dijkstra on a grid graph
/// over [D] with the geometric-action edge weight
/// ||e||_{a^-1} ||bbar(m)||_{a^-1} - (bbar(m), e)_{a^-1}.
double oracle_dijkstra(const DriftField& f, const Vec& x, const Vec& y,
                       const OracleOptions& opt = {});

/// Oracle for the avoiding variant: grid nodes within avoid_radius of an
/// avoided point are removed before the Dijkstra pass.
double oracle_dijkstra_avoiding(const DriftField& f, const Vec& x, const Vec& y,
                                const std::vector<Vec>& avoid, const OracleOptions& opt = {});

struct MatrixOptions {
    MinimizeOptions minimize;
    bool use_oracle = false;  // grid oracle instead of the path optimizer
    OracleOptions oracle;
};

/// Pairwise quasipotential table over the stable equilibria. The avoiding
/// variant excludes the other stable equilibria from each connecting path.
QuasipotentialMatrix build_matrix(const DriftField& f,
                                  const std::vector<Equilibrium>& equilibria, Variant variant,
                                  const MatrixOptions& opt = {});

}  // namespace fwr
