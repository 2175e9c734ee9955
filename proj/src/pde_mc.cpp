#include "fwr/pde_mc.hpp"

#include <Eigen/Sparse>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "fwr/errors.hpp"

namespace fwr {

namespace {

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int k = 0; k < n; ++k) body(k);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&]() {
            for (int k = next.fetch_add(1); k < n; k = next.fetch_add(1)) body(k);
        });
    for (auto& th : pool) th.join();
}

}  // namespace

MCEstimate estimate_u(const DriftField& f, const SimConfig& cfg, const Vec& x0,
                      const std::function<double(const Vec&)>& g, const MCOptions& opt) {
    if (opt.n_paths <= 1) throw ConfigInvalid("estimate_u: need at least 2 paths");
    std::vector<double> samples(opt.n_paths, std::numeric_limits<double>::quiet_NaN());

    parallel_for(opt.n_paths, opt.threads, [&](int k) {
        Vec last = x0;
        try {
            simulate_visit(f, cfg, x0, static_cast<std::uint64_t>(k),
                           [&last](double, const Vec& x, double, bool) { last = x; });
            samples[k] = g(last);
        } catch (const StepRejected&) {
            // left as NaN; counted below
        }
    });

    MCEstimate est;
    double sum = 0.0, sum2 = 0.0;
    int rejected = 0;
    for (double s : samples) {
        if (std::isnan(s)) {
            ++rejected;
            continue;
        }
        sum += s;
        sum2 += s * s;
        ++est.n;
    }
    est.reject_fraction = static_cast<double>(rejected) / opt.n_paths;
    if (est.reject_fraction > opt.max_reject_fraction)
        throw NoConvergence("estimate_u: step-rejection rate " +
                            std::to_string(est.reject_fraction) + " exceeds the budget");
    est.mean = sum / est.n;
    double var = std::max(0.0, (sum2 - est.n * est.mean * est.mean) / (est.n - 1));
    est.std_error = std::sqrt(var / est.n);
    return est;
}

double FDSolution::value_at(const Vec& x) const {
    double r = std::hypot(x[0], x[1]);
    if (r > 1.0 + 1e-9) throw OutsideDomain("FDSolution::value_at: point outside the disk");
    r = std::min(r, 1.0);
    double dr = 1.0 / nr;
    double dth = 2.0 * M_PI / ntheta;
    double th = std::atan2(x[1], x[0]);
    if (th < 0.0) th += 2.0 * M_PI;
    int j = static_cast<int>(th / dth) % ntheta;
    double wj = th / dth - std::floor(th / dth);
    auto at = [&](int i, int jj) {
        return values[(i - 1) * static_cast<std::size_t>(ntheta) + (jj % ntheta + ntheta) % ntheta];
    };
    auto ring = [&](int i) {  // angular interpolation on ring i (or the center)
        if (i == 0) return center;
        return (1.0 - wj) * at(i, j) + wj * at(i, j + 1);
    };
    int i = static_cast<int>(r / dr);
    i = std::min(i, nr - 1);
    double wi = r / dr - i;
    return (1.0 - wi) * ring(i) + wi * ring(i + 1);
}

FDSolution fd_oracle(const DriftField& f, double epsilon, double t,
                     const std::function<double(const Vec&)>& g, const FDOptions& opt) {
    if (!f.metric.is_identity)
        throw ConfigInvalid("fd_oracle: only the identity metric is supported");
    if (opt.nr < 4 || opt.ntheta < 8) throw ConfigInvalid("fd_oracle: grid too coarse");
    const int nr = opt.nr, nth = opt.ntheta;
    const double dr = 1.0 / nr;
    const double dth = 2.0 * M_PI / nth;
    const double nu = 0.5 * epsilon * epsilon;
    const int n = 1 + nr * nth;  // center + rings

    auto idx = [&](int i, int j) { return 1 + (i - 1) * nth + ((j % nth) + nth) % nth; };

    // generator L: Lu = nu * Lap u + b . grad u on the polar grid
    std::vector<Eigen::Triplet<double>> trip;
    auto add = [&](int row, int col, double v) { trip.emplace_back(row, col, v); };

    // center node: Lap u(0) ~ 4 (mean ring-1 - u0) / dr^2, grad via Fourier
    {
        double diag = -4.0 * nu / (dr * dr);
        add(0, 0, diag);
        Vec origin = Vec::Zero(2);
        Vec b0 = f.b(origin);
        for (int j = 0; j < nth; ++j) {
            double th = j * dth;
            double lap_w = 4.0 * nu / (dr * dr) / nth;
            double grad_w =
                (b0[0] * std::cos(th) + b0[1] * std::sin(th)) * 2.0 / (nth * dr);
            add(0, idx(1, j), lap_w + grad_w);
        }
    }

    double max_diag = 4.0 * nu / (dr * dr);
    for (int i = 1; i <= nr; ++i) {
        double r = i * dr;
        for (int j = 0; j < nth; ++j) {
            double th = j * dth;
            Vec p(2);
            p << r * std::cos(th), r * std::sin(th);
            Vec b = f.b(p);
            double br = b[0] * std::cos(th) + b[1] * std::sin(th);
            double bth = -b[0] * std::sin(th) + b[1] * std::cos(th);
            int row = idx(i, j);

            double c_in, c_out, c_diag_r;
            if (i < nr) {
                // Lap radial part + drift u_r, central differences
                c_in = nu / (dr * dr) - (nu / r + br) / (2.0 * dr);
                c_out = nu / (dr * dr) + (nu / r + br) / (2.0 * dr);
                c_diag_r = -2.0 * nu / (dr * dr);
            } else {
                // r = 1: mirror ghost enforces u_r = 0, so the first-order
                // terms cancel and the second difference folds inward
                c_in = 2.0 * nu / (dr * dr);
                c_out = 0.0;
                c_diag_r = -2.0 * nu / (dr * dr);
            }
            double c_th = nu / (r * r * dth * dth);
            double c_th_drift = bth / (r * 2.0 * dth);

            add(row, row, c_diag_r - 2.0 * c_th);
            add(row, idx(i, j + 1), c_th + c_th_drift);
            add(row, idx(i, j - 1), c_th - c_th_drift);
            if (i >= 2)
                add(row, idx(i - 1, j), c_in);
            else
                add(row, 0, c_in);
            if (c_out != 0.0) add(row, idx(i + 1, j), c_out);
            max_diag = std::max(max_diag, std::abs(c_diag_r - 2.0 * c_th));
        }
    }

    Eigen::SparseMatrix<double> L(n, n);
    L.setFromTriplets(trip.begin(), trip.end());

    int nsteps = std::max(1, static_cast<int>(std::ceil(t / opt.dt)));
    double dt = t / nsteps;

    Eigen::VectorXd u(n);
    u[0] = g(Vec(Vec::Zero(2)));
    for (int i = 1; i <= nr; ++i)
        for (int j = 0; j < nth; ++j) {
            Vec p(2);
            p << i * dr * std::cos(j * dth), i * dr * std::sin(j * dth);
            u[idx(i, j)] = g(p);
        }

    if (opt.implicit) {
        Eigen::SparseMatrix<double> I(n, n);
        I.setIdentity();
        Eigen::SparseMatrix<double> A = I - dt * L;
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(A);
        if (lu.info() != Eigen::Success)
            throw NoConvergence("fd_oracle: implicit Euler factorization failed");
        for (int s = 0; s < nsteps; ++s) u = lu.solve(u);
    } else {
        if (dt * max_diag > 1.0)
            throw CFLViolation("fd_oracle: explicit step dt exceeds the stability bound");
        for (int s = 0; s < nsteps; ++s) u = u + dt * (L * u);
    }

    FDSolution sol;
    sol.nr = nr;
    sol.ntheta = nth;
    sol.center = u[0];
    sol.values.assign(u.data() + 1, u.data() + n);
    return sol;
}

LongTimeCheck check_long_time_limit(const DriftField& f, const CycleNode& tree,
                                    const QuasipotentialMatrix& V, const Vec& x0,
                                    int start_position, double epsilon, double lambda,
                                    const std::function<double(const Vec&)>& g, SimConfig sim,
                                    const MCOptions& mc, double step_budget) {
    LongTimeCheck out;
    out.epsilon = epsilon;
    out.lambda = lambda;
    out.horizon = std::exp(lambda / (epsilon * epsilon));
    double total_steps = out.horizon / sim.dt * mc.n_paths;
    if (!std::isfinite(total_steps) || total_steps > step_budget)
        throw HorizonInfeasible("check_long_time_limit: " + std::to_string(total_steps) +
                                " steps exceed the budget");
    out.metastable_position = metastable_state(tree, V, start_position, lambda);
    out.target = g(V.equilibria.at(out.metastable_position).location);

    sim.epsilon = epsilon;
    sim.t_max = out.horizon;
    out.estimate = estimate_u(f, sim, x0, g, mc);
    out.gap = std::abs(out.estimate.mean - out.target);
    return out;
}

}  // namespace fwr
