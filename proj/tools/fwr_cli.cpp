#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "fwr/errors.hpp"
#include "fwr/fields.hpp"
#include "fwr/hierarchy.hpp"
#include "fwr/io.hpp"
#include "fwr/pde_mc.hpp"
#include "fwr/quasipotential.hpp"
#include "fwr/reflect_sde.hpp"

namespace {

using fwr::Json;

constexpr int kSchemaVersion = 1;

struct Ctx {
    Json cfg = Json::object();
    std::string out = ".";
    std::uint64_t seed = 0;
    int threads = 0;
    std::string break_ties = "error";
    bool compute_v = false;
    bool monte_carlo = false;

    double tie_tolerance() const { return break_ties == "lowest-index" ? -1.0 : 1e-9; }
};

template <typename T>
T require(const Json& j, const std::string& key) {
    if (!j.contains(key))
        throw fwr::ConfigInvalid("missing required key \"" + key + "\"");
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception&) {
        throw fwr::ConfigInvalid("key \"" + key + "\" has the wrong type");
    }
}

fwr::DriftField drift_from_config(const Json& cfg) {
    if (!cfg.contains("drift")) throw fwr::ConfigInvalid("missing required key \"drift\"");
    const Json& d = cfg.at("drift");
    std::string name = require<std::string>(d, "name");
    fwr::NamedDrift nd = fwr::named_drift(name, d.value("amplitude", 1.0),
                                          d.value("radial_strength", 1.0), d.value("skew", 0.5));
    if (cfg.contains("domain"))
        nd.field.domain = fwr::DomainSpec::named(require<std::string>(cfg.at("domain"), "name"));
    return nd.field;
}

fwr::Vec point_from(const Json& j, int dim) {
    auto v = j.get<std::vector<double>>();
    if (static_cast<int>(v.size()) != dim)
        throw fwr::ConfigInvalid("point has wrong dimension");
    return Eigen::Map<const fwr::Vec>(v.data(), dim);
}

std::function<double(const fwr::Vec&)> g_from_config(const Json& cfg) {
    // affine observable g(x) = c0 + c . x
    double c0 = 0.0;
    std::vector<double> c = {1.0, 0.0};
    if (cfg.contains("g")) {
        c0 = cfg.at("g").value("constant", 0.0);
        if (cfg.at("g").contains("linear")) c = cfg.at("g").at("linear").get<std::vector<double>>();
    }
    return [c0, c](const fwr::Vec& x) {
        double s = c0;
        for (int k = 0; k < x.size() && k < static_cast<int>(c.size()); ++k) s += c[k] * x[k];
        return s;
    };
}

std::vector<fwr::Equilibrium> locate_equilibria(const fwr::DriftField& f, const Json& cfg) {
    int n_seeds = cfg.value("equilibrium_seeds", 48);
    return fwr::find_equilibria(f, fwr::boundary_seeds(f.domain, n_seeds));
}

void emit(const Ctx& ctx, const std::string& file, const Json& body) {
    Json wrapped = body;
    wrapped["schema_version"] = kSchemaVersion;
    wrapped["config"] = ctx.cfg;
    wrapped["seed"] = ctx.seed;
    std::filesystem::create_directories(ctx.out);
    fwr::atomic_write((std::filesystem::path(ctx.out) / file).string(), wrapped.dump(2) + "\n");
}

// ----------------------------------------------------------------------

int run_simulate(const Ctx& ctx) {
    fwr::DriftField f = drift_from_config(ctx.cfg);
    fwr::SimConfig sim;
    sim.epsilon = require<double>(ctx.cfg, "epsilon");
    if (sim.epsilon < 0.0) throw fwr::ConfigInvalid("key \"epsilon\" must be >= 0");
    sim.dt = ctx.cfg.value("dt", 1e-3);
    sim.t_max = ctx.cfg.value("t_max", 1.0);
    sim.seed = ctx.seed;
    if (ctx.cfg.value("scheme", "projection") == "half_space_local")
        sim.scheme = fwr::Scheme::HalfSpaceLocal;

    fwr::Vec x0 = ctx.cfg.contains("x0") ? point_from(ctx.cfg.at("x0"), f.domain.dimension)
                                         : fwr::Vec(fwr::Vec::Zero(f.domain.dimension));
    fwr::ReflectedTrajectory traj = fwr::simulate(f, sim, x0);

    std::filesystem::create_directories(ctx.out);
    fwr::atomic_write((std::filesystem::path(ctx.out) / "trajectory.csv").string(),
                      fwr::trajectory_csv(traj));
    Json report;
    report["steps"] = traj.times.size();
    report["final_local_time"] = traj.local_time.back();
    report["final_state"] = std::vector<double>(traj.states.back().data(),
                                                traj.states.back().data() +
                                                    traj.states.back().size());
    emit(ctx, "simulate.json", report);
    std::printf("simulate: %zu grid points, final xi = %.6g\n", traj.times.size(),
                traj.local_time.back());
    return 0;
}

int run_quasipotential(const Ctx& ctx) {
    fwr::DriftField f = drift_from_config(ctx.cfg);
    std::vector<fwr::Equilibrium> eq = locate_equilibria(f, ctx.cfg);
    fwr::MatrixOptions opt;
    opt.use_oracle = ctx.cfg.value("use_oracle", false);
    opt.minimize.nodes = ctx.cfg.value("path_nodes", opt.minimize.nodes);
    opt.oracle.resolution = ctx.cfg.value("grid_resolution", opt.oracle.resolution);
    fwr::Variant variant = ctx.cfg.value("variant", "plain") == "avoiding"
                               ? fwr::Variant::Avoiding
                               : fwr::Variant::Plain;
    fwr::QuasipotentialMatrix m = fwr::build_matrix(f, eq, variant, opt);
    emit(ctx, "matrix.json", Json{{"matrix", fwr::matrix_to_json(m)}});
    std::printf("quasipotential: %d stable states\n", m.size());
    for (int i = 0; i < m.size(); ++i) {
        std::printf("  %-4s", m.labels[i].c_str());
        for (int j = 0; j < m.size(); ++j) std::printf(" %8.4f", m.values(i, j));
        std::printf("\n");
    }
    return 0;
}

Json hierarchy_report(const fwr::QuasipotentialMatrix& m, int start, double tie_tol) {
    fwr::CycleNode tree = fwr::build_cycle_tree(m, tie_tol);
    fwr::MetastableProfile profile = fwr::metastable_profile(tree, m, start, tie_tol);
    Json report;
    report["matrix"] = fwr::matrix_to_json(m);
    report["tree"] = fwr::tree_to_json(tree, m.labels);
    report["profile"] = fwr::profile_to_json(profile, m.labels);
    Json w = Json::object();
    for (int i = 0; i < m.size(); ++i) w[m.labels[i]] = fwr::w_value(m, i);
    report["w_values"] = w;
    return report;
}

int print_profile(const fwr::QuasipotentialMatrix& m, const Json& report) {
    const Json& profile = report.at("profile");
    auto states = profile.at("states").get<std::vector<std::string>>();
    auto thresholds = profile.at("thresholds").get<std::vector<double>>();
    std::printf("metastable profile from %s:\n",
                profile.at("start").get<std::string>().c_str());
    for (std::size_t k = 0; k < states.size(); ++k) {
        if (k == 0 && thresholds.empty())
            std::printf("  λ>0 → g(%s)\n", states[k].c_str());
        else if (k == 0)
            std::printf("  λ<%g → g(%s)\n", thresholds[0], states[k].c_str());
        else if (k < thresholds.size())
            std::printf("  %g≤λ<%g → g(%s)\n", thresholds[k - 1], thresholds[k],
                        states[k].c_str());
        else
            std::printf("  λ≥%g → g(%s)\n", thresholds[k - 1], states[k].c_str());
    }
    (void)m;
    return 0;
}

int run_hierarchy(const Ctx& ctx) {
    fwr::QuasipotentialMatrix m;
    if (ctx.cfg.contains("matrix_file"))
        m = fwr::matrix_from_json(fwr::load_config(require<std::string>(ctx.cfg, "matrix_file")));
    else if (ctx.cfg.contains("matrix"))
        m = fwr::matrix_from_json(ctx.cfg.at("matrix"));
    else
        throw fwr::ConfigInvalid("missing required key \"matrix_file\"");
    int start = 0;
    if (ctx.cfg.contains("start")) {
        std::string label = require<std::string>(ctx.cfg, "start");
        auto it = std::find(m.labels.begin(), m.labels.end(), label);
        if (it == m.labels.end())
            throw fwr::ConfigInvalid("key \"start\": unknown label " + label);
        start = static_cast<int>(it - m.labels.begin());
    }
    Json report = hierarchy_report(m, start, ctx.tie_tolerance());
    emit(ctx, "hierarchy.json", report);
    return print_profile(m, report);
}

int run_pde(const Ctx& ctx) {
    fwr::DriftField f = drift_from_config(ctx.cfg);
    double epsilon = require<double>(ctx.cfg, "epsilon");
    double t = require<double>(ctx.cfg, "t");
    auto g = g_from_config(ctx.cfg);
    fwr::Vec x0 = ctx.cfg.contains("x0") ? point_from(ctx.cfg.at("x0"), f.domain.dimension)
                                         : fwr::Vec(fwr::Vec::Zero(f.domain.dimension));

    fwr::SimConfig sim;
    sim.epsilon = epsilon;
    sim.t_max = t;
    sim.dt = ctx.cfg.value("dt", 1e-3);
    sim.seed = ctx.seed;
    fwr::MCOptions mc;
    mc.n_paths = ctx.cfg.value("n_paths", 10000);
    mc.threads = ctx.threads;
    fwr::MCEstimate est = fwr::estimate_u(f, sim, x0, g, mc);

    Json report;
    report["estimate"] = est.mean;
    report["std_error"] = est.std_error;
    report["n_paths"] = est.n;
    if (ctx.cfg.value("fd_compare", true)) {
        fwr::FDOptions fd;
        fd.nr = ctx.cfg.value("fd_nr", fd.nr);
        fd.ntheta = ctx.cfg.value("fd_ntheta", fd.ntheta);
        fwr::FDSolution sol = fwr::fd_oracle(f, epsilon, t, g, fd);
        report["fd_value"] = sol.value_at(x0);
        report["gap"] = std::abs(est.mean - sol.value_at(x0));
    }
    emit(ctx, "pde.json", report);
    std::printf("pde: estimate %.6g ± %.2g", est.mean, est.std_error);
    if (report.contains("fd_value"))
        std::printf(", grid solver %.6g", report["fd_value"].get<double>());
    std::printf("\n");
    return 0;
}

fwr::QuasipotentialMatrix example_matrix() {
    fwr::QuasipotentialMatrix m;
    m.values = fwr::Mat{{0.0, 1.0, 6.0}, {2.0, 0.0, 4.0}, {7.0, 3.0, 0.0}};
    m.labels = {"O_1", "O_3", "O_5"};
    m.provenance = fwr::Provenance::UserSupplied;
    m.variant = fwr::Variant::Avoiding;
    return m;
}

int run_example_disk(Ctx ctx) {
    fwr::QuasipotentialMatrix m = example_matrix();
    Json report = hierarchy_report(m, 0, ctx.tie_tolerance());

    fwr::DriftField f = fwr::disk_six_equilibria();
    std::vector<fwr::Equilibrium> eq;
    if (ctx.compute_v || ctx.monte_carlo) eq = locate_equilibria(f, ctx.cfg);

    if (ctx.compute_v) {
        fwr::MatrixOptions opt;
        opt.minimize.nodes = ctx.cfg.value("path_nodes", 101);
        fwr::QuasipotentialMatrix computed =
            fwr::build_matrix(f, eq, fwr::Variant::Plain, opt);
        report["computed_matrix"] = fwr::matrix_to_json(computed);
    }
    if (ctx.monte_carlo) {
        // feasible-lambda ladder: horizons exp(lambda/eps^2) within the budget
        fwr::QuasipotentialMatrix mm = m;
        for (const fwr::Equilibrium& e : eq)
            if (e.stable) mm.equilibria.push_back(e);
        fwr::CycleNode tree = fwr::build_cycle_tree(mm, 1e-9);
        auto g = [](const fwr::Vec& x) { return x[0] + 2.0 * x[1]; };
        fwr::SimConfig sim;
        sim.dt = ctx.cfg.value("dt", 2e-3);
        sim.seed = ctx.seed;
        fwr::MCOptions mc;
        mc.n_paths = ctx.cfg.value("n_paths", 400);
        mc.threads = ctx.threads;
        Json rows = Json::array();
        for (double eps : {0.6, 0.5}) {
            for (double lambda : {0.4, 0.8}) {
                Json row;
                row["epsilon"] = eps;
                row["lambda"] = lambda;
                try {
                    fwr::LongTimeCheck chk = fwr::check_long_time_limit(
                        f, tree, mm, mm.equilibria.front().location, 0, eps, lambda, g, sim,
                        mc, 5e8);
                    row["t"] = chk.horizon;
                    row["estimate"] = chk.estimate.mean;
                    row["std_error"] = chk.estimate.std_error;
                    row["target"] = chk.target;
                    row["gap"] = chk.gap;
                } catch (const fwr::HorizonInfeasible&) {
                    row["infeasible"] = true;
                }
                rows.push_back(row);
            }
        }
        report["long_time_rows"] = rows;
    }
    emit(ctx, "example_disk.json", report);
    print_profile(m, report);
    std::printf("λ<1 → g(O_1)\nλ≥1 → g(O_3)\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reflected-diffusion metastability toolkit"};
    app.require_subcommand(1);
    Ctx ctx;
    std::string config_path;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "configuration file (.json or .toml)");
        sub->add_option("--seed", ctx.seed, "top-level RNG seed");
        sub->add_option("--out", ctx.out, "output directory");
        sub->add_option("--threads", ctx.threads, "worker threads (0 = hardware)");
        sub->add_option("--break-ties", ctx.break_ties, "error|lowest-index")
            ->check(CLI::IsMember({"error", "lowest-index"}));
    };

    CLI::App* simulate = app.add_subcommand("simulate", "integrate one reflected trajectory");
    CLI::App* quasi = app.add_subcommand("quasipotential", "pairwise transition costs");
    CLI::App* hier = app.add_subcommand("hierarchy", "cycle tree and metastable profile");
    CLI::App* pde = app.add_subcommand("pde", "Monte Carlo vs grid solver");
    CLI::App* example = app.add_subcommand("example-disk", "end-to-end disk walkthrough");
    for (CLI::App* s : {simulate, quasi, hier, pde, example}) add_common(s);
    example->add_flag("--compute-v", ctx.compute_v, "also run the path optimizer");
    example->add_flag("--monte-carlo", ctx.monte_carlo, "also run long-time trend rows");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_path.empty()) ctx.cfg = fwr::load_config(config_path);
        if (simulate->parsed()) return run_simulate(ctx);
        if (quasi->parsed()) return run_quasipotential(ctx);
        if (hier->parsed()) return run_hierarchy(ctx);
        if (pde->parsed()) return run_pde(ctx);
        if (example->parsed()) return run_example_disk(ctx);
    } catch (const fwr::Error& e) {
        Json err{{"error", e.what()}};
        std::cerr << err.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        Json err{{"error", e.what()}};
        std::cerr << err.dump() << "\n";
        return 2;
    }
    return 0;
}
