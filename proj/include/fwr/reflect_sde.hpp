#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "fwr/dynamics.hpp"
#include "fwr/path.hpp"

namespace fwr {

enum class Scheme { Projection, HalfSpaceLocal };

struct SimConfig {
    double epsilon = 0.0;
    double dt = 1e-3;
    double t_max = 1.0;
    std::uint64_t seed = 0;
    Scheme scheme = Scheme::Projection;
    int max_step_splits = 24;  // recursive step-halving cap for rejected steps
};

struct ReflectedTrajectory {
    std::vector<double> times;
    std::vector<Vec> states;
    std::vector<double> local_time;
    std::vector<std::uint8_t> boundary_flags;
};

/// Half-space Skorokhod map: confines the first coordinate to be
/// nonnegative by adding the running deficit. Returns the reflected path
/// and the nondecreasing local-time path.
std::pair<DiscretePath, std::vector<double>> skorokhod_half_space(const DiscretePath& psi);

/// Per-step observer for streaming simulation (long runs where storing the
/// trajectory is wasteful). Called once per accepted grid point.
using StepVisitor = std::function<void(double t, const Vec& x, double xi, bool on_boundary)>;

/// Euler-Maruyama simulation of the reflected SDE. The trajectory index
/// selects an independent RNG stream derived from cfg.seed.
ReflectedTrajectory simulate(const DriftField& f, const SimConfig& cfg, const Vec& x0,
                             std::uint64_t trajectory_index = 0);

/// Streaming variant of simulate.
void simulate_visit(const DriftField& f, const SimConfig& cfg, const Vec& x0,
                    std::uint64_t trajectory_index, const StepVisitor& visit);

/// First grid time the state enters the closed alpha-neighborhood of any
/// equilibrium; +infinity if never.
double hitting_time_neighborhoods(const ReflectedTrajectory& traj,
                                  const std::vector<Equilibrium>& equilibria, double alpha);

struct ChainConfig {
    double rho0 = 0.3;  // neighborhoods removed to form the set C
    double rho1 = 0.1;  // the g_i neighborhoods the chain lands in
    double rho2 = 0.2;  // intermediate radius, rho1 < rho2 < rho0
    std::vector<Equilibrium> equilibria;
};

struct ChainEvent {
    double tau = 0.0;
    int label = -1;  // equilibrium index (1-based); -1 for the start state Z_0
};

/// Incremental tracker for the boundary-neighborhood chain Z_n: feeds on
/// grid points and records the alternating Gamma_i / dg_i crossings.
class ChainTracker {
public:
    explicit ChainTracker(ChainConfig cfg);
    void feed(double t, const Vec& x);
    const std::vector<ChainEvent>& events() const { return events_; }
    bool saw_sigma0() const { return saw_sigma_; }

private:
    ChainConfig cfg_;
    bool waiting_sigma_ = true;  // true: next crossing we look for is into C
    bool saw_sigma_ = false;
    std::vector<ChainEvent> events_;
};

/// Crossing times and labels of the chain Z_n extracted from a stored
/// trajectory. events[0] is the start state (label -1).
std::vector<ChainEvent> extract_chain(const ReflectedTrajectory& traj, const ChainConfig& cfg);

}  // namespace fwr
