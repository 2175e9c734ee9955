#pragma once

#include <functional>
#include <vector>

#include "fwr/hierarchy.hpp"
#include "fwr/qmatrix.hpp"
#include "fwr/reflect_sde.hpp"

namespace fwr {

struct MCOptions {
    int n_paths = 10000;
    int threads = 0;                     // 0: hardware concurrency
    double max_reject_fraction = 0.01;   // abort beyond this step-rejection rate
};

struct MCEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    int n = 0;                 // successful trajectories
    double reject_fraction = 0.0;
};

/// u(x, t_max) = E_x g(X_{t_max}) by Monte Carlo over independent
/// per-trajectory RNG streams. The reduction order is fixed by trajectory
/// index, so results do not depend on the thread count.
MCEstimate estimate_u(const DriftField& f, const SimConfig& cfg, const Vec& x0,
                      const std::function<double(const Vec&)>& g, const MCOptions& opt = {});

struct FDOptions {
    int nr = 64;
    int ntheta = 64;
    double dt = 1e-3;
    bool implicit = true;  // explicit stepping available, guarded by a CFL check
};

/// Finite-difference solution of u_t = (eps^2/2) Lap u + b . grad u on the
/// unit disk with a zero-normal-derivative boundary condition, polar grid,
/// implicit Euler in time. Identity metric only.
class FDSolution {
public:
    double value_at(const Vec& x) const;  // bilinear in (r, theta)

    int nr = 0, ntheta = 0;
    double center = 0.0;
    std::vector<double> values;  // ring-major: values[(i-1)*ntheta + j], i = 1..nr
};

FDSolution fd_oracle(const DriftField& f, double epsilon, double t,
                     const std::function<double(const Vec&)>& g, const FDOptions& opt = {});

struct LongTimeCheck {
    double epsilon = 0.0;
    double lambda = 0.0;
    double horizon = 0.0;        // exp(lambda / epsilon^2)
    MCEstimate estimate;
    int metastable_position = -1;  // position into the matrix ordering
    double target = 0.0;           // g at the predicted metastable equilibrium
    double gap = 0.0;              // |mean - target|
};

/// Runs the simulation out to t = exp(lambda / eps^2) and compares
/// E_x g(X_t) against g evaluated at the predicted metastable state.
/// Throws HorizonInfeasible when the required step count exceeds budget.
LongTimeCheck check_long_time_limit(const DriftField& f, const CycleNode& tree,
                                    const QuasipotentialMatrix& V, const Vec& x0,
                                    int start_position, double epsilon, double lambda,
                                    const std::function<double(const Vec&)>& g, SimConfig sim,
                                    const MCOptions& mc = {}, double step_budget = 5e9);

}  // namespace fwr
