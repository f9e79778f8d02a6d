#include "hjbi/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <ostream>
#include <thread>

#include "hjbi/mc.hpp"
#include "hjbi/solver.hpp"

namespace hjbi {

namespace {

namespace fs = std::filesystem;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double min_of(const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); }

struct SolveSummary {
    SolveResult result;
    std::vector<Interval> omega1;
    double min_phi = 0.0;
};

SolveSummary run_solve(const RunConfig& cfg, const ProblemSpec& spec, std::span<const double> snapshots = {},
                       const StepObserver& observer = {}) {
    const Discretization disc(spec, build_mesh(cfg.n_cells), cfg.n_quad);
    const TimeGrid grid(cfg.dt, spec.horizon);
    SolveSummary out;
    out.result = solve_backward(disc, grid, cfg.policy, snapshots, observer);
    out.omega1 = switching_points(out.result.final_controls.q_star, disc.mesh(), spec.q_max / 2.0);
    out.min_phi = min_of(out.result.final_value.values);
    return out;
}

std::string path_in(const RunConfig& cfg, const char* name) { return (fs::path(cfg.output_dir) / name).string(); }

void print_references(std::ostream& log, const RunConfig& cfg, const SolveSummary& s) {
    const bool controlled = cfg.preset == "paper_controlled";
    log << "E_mean   = " << format_number(s.result.ergodic.E_mean) << "   (published reference "
        << ReferenceValues::ergodic_constant << ", uncontrolled)\n";
    log << "E_spread = " << format_number(s.result.ergodic.E_spread) << "\n";
    log << "min Phi  = " << format_number(s.min_phi) << "   (published reference "
        << (controlled ? ReferenceValues::min_phi_controlled : ReferenceValues::min_phi_uncontrolled)
        << (controlled ? ", controlled)\n" : ", uncontrolled)\n");
    log << "Omega1   =";
    if (s.omega1.empty()) log << " (empty)";
    for (const auto& iv : s.omega1) log << " [" << iv.left << ", " << iv.right << "]";
    log << "\n";
}

int command_solve(const RunConfig& cfg, std::ostream& log, bool quiet) {
    const std::string prov = provenance_line(cfg);
    const SolveSummary s = run_solve(cfg, cfg.spec, cfg.snapshot_times);
    const Mesh mesh = build_mesh(cfg.n_cells);
    const auto& phi = s.result.final_value.values;
    const auto& c = s.result.final_controls;

    std::vector<std::vector<double>> rows;
    for (int i = 0; i < mesh.size(); ++i) rows.push_back({mesh.node(i), phi[static_cast<std::size_t>(i)]});
    write_csv(path_in(cfg, "value.csv"), prov, {"x", "phi"}, rows);

    rows.clear();
    for (int i = 0; i < mesh.size(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        rows.push_back({mesh.node(i), c.q_star[k], c.lambda_star[k], c.theta1_star[k], c.theta2_star[k]});
    }
    write_csv(path_in(cfg, "controls.csv"), prov, {"x", "q_star", "lambda_star", "theta1_star", "theta2_star"}, rows);

    write_csv(path_in(cfg, "ergodic.csv"), prov, {"E_mean", "E_spread"},
              {{s.result.ergodic.E_mean, s.result.ergodic.E_spread}});

    rows.clear();
    for (const auto& iv : s.omega1) rows.push_back({iv.left, iv.right});
    write_csv(path_in(cfg, "omega1.csv"), prov, {"left", "right"}, rows);

    if (!s.result.snapshots.empty()) {
        std::vector<std::size_t> order(s.result.snapshots.size());
        for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return s.result.snapshots[a].time < s.result.snapshots[b].time;
        });
        rows.clear();
        for (std::size_t k : order) {
            const auto& v = s.result.snapshots[k];
            const auto& ctl = s.result.control_snapshots[k];
            for (int i = 0; i < mesh.size(); ++i) {
                const auto j = static_cast<std::size_t>(i);
                rows.push_back({v.time, mesh.node(i), v.values[j], ctl.q_star[j], ctl.lambda_star[j],
                                ctl.theta1_star[j], ctl.theta2_star[j]});
            }
        }
        write_csv(path_in(cfg, "snapshots.csv"), prov,
                  {"t", "x", "phi", "q_star", "lambda_star", "theta1_star", "theta2_star"}, rows);
    }

    if (!quiet) {
        log << "solve: " << mesh.size() << " nodes, dt = " << cfg.dt << ", T = " << cfg.spec.horizon << "\n";
        print_references(log, cfg, s);
    }
    return kExitOk;
}

int command_sweep(const RunConfig& cfg, std::ostream& log, bool quiet) {
    const SweepAxis& axis = *cfg.sweep;
    const std::size_t n = axis.values.size();
    std::vector<SolveSummary> results(n);

    // Independent solves; at most hardware_concurrency in flight.
    const std::size_t width = std::max<std::size_t>(1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
    for (std::size_t begin = 0; begin < n; begin += width) {
        std::vector<std::future<SolveSummary>> batch;
        for (std::size_t k = begin; k < std::min(n, begin + width); ++k) {
            ProblemSpec spec = cfg.spec;
            set_parameter(spec, axis.param, axis.values[k]);
            batch.push_back(std::async(width == 1 ? std::launch::deferred : std::launch::async,
                                       [&cfg, spec]() { return run_solve(cfg, spec); }));
        }
        for (std::size_t k = 0; k < batch.size(); ++k) results[begin + k] = batch[k].get();
    }

    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < n; ++k) {
        const auto& s = results[k];
        const double left = s.omega1.empty() ? kNaN : s.omega1.front().left;
        const double right = s.omega1.empty() ? kNaN : s.omega1.front().right;
        rows.push_back({axis.values[k], s.result.ergodic.E_mean, s.result.ergodic.E_spread, s.min_phi,
                        static_cast<double>(s.omega1.size()), left, right});
        if (!quiet) {
            log << axis.param << " = " << axis.values[k] << ": E_mean = " << format_number(s.result.ergodic.E_mean)
                << ", min Phi = " << format_number(s.min_phi) << ", Omega1 intervals = " << s.omega1.size() << "\n";
        }
    }
    write_csv(path_in(cfg, "sweep.csv"), provenance_line(cfg),
              {axis.param, "E_mean", "E_spread", "min_phi", "omega1_count", "omega1_left", "omega1_right"}, rows);
    return kExitOk;
}

int command_mc_check(const RunConfig& cfg, std::ostream& log, bool quiet) {
    const Discretization disc(cfg.spec, build_mesh(cfg.n_cells), cfg.n_quad);
    const TimeGrid grid(cfg.dt, cfg.spec.horizon);
    if (!(cfg.mc.start_t >= 0.0 && cfg.mc.start_t < cfg.spec.horizon)) {
        throw ConfigError("mc.start_t must lie in [0, T)");
    }

    std::vector<ControlField> slices;
    const double earliest = std::floor(cfg.mc.start_t / cfg.dt + 1e-9) * cfg.dt - 1e-9;
    const StepObserver keep = [&](const ValueField&, const ControlField& c, int) {
        if (c.time >= earliest) slices.push_back(c);
    };
    const std::vector<double> at{cfg.mc.start_t};
    const SolveResult pde = solve_backward(disc, grid, cfg.policy, at, keep);
    const double pde_value = interpolate(disc.mesh(), pde.snapshots.front().values, cfg.mc.start_x);

    SimConfig sim;
    sim.dt_sim = cfg.mc.dt_sim;
    sim.n_paths = cfg.mc.n_paths;
    sim.master_seed = cfg.mc.seed;
    sim.start_x = cfg.mc.start_x;
    sim.start_t = cfg.mc.start_t;
    sim.n_threads = cfg.mc.threads;
    const ControlSchedule schedule(disc.mesh(), cfg.dt, std::move(slices));
    const ValueEstimate est = simulate_value(cfg.spec, schedule, sim);

    const double diff = std::abs(est.mean - pde_value);
    const double allowed = 3.0 * est.std_err + cfg.mc.tolerance;
    const bool pass = diff <= allowed;
    write_csv(path_in(cfg, "mc_check.csv"), provenance_line(cfg),
              {"start_t", "start_x", "pde_value", "mc_mean", "mc_std_err", "n_paths", "abs_diff", "allowed", "pass"},
              {{cfg.mc.start_t, cfg.mc.start_x, pde_value, est.mean, est.std_err, static_cast<double>(est.n_paths),
                diff, allowed, pass ? 1.0 : 0.0}});
    if (!quiet) {
        log << "mc-check: PDE Phi(" << cfg.mc.start_t << ", " << cfg.mc.start_x << ") = " << format_number(pde_value)
            << ", MC = " << format_number(est.mean) << " +- " << format_number(est.std_err) << " (" << est.n_paths
            << " paths)\n";
        log << "|diff| = " << format_number(diff) << " <= " << format_number(allowed) << " : "
            << (pass ? "PASS" : "FAIL") << "\n";
    }
    return pass ? kExitOk : kExitGateFailure;
}

}  // namespace

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(const std::string& path, const std::string& provenance, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << provenance << '\n';
    for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << format_number(row[k]);
        out << '\n';
    }
}

int execute(const RunConfig& cfg, std::ostream& log, bool quiet) {
    try {
        switch (cfg.command) {
        case Command::Solve: return command_solve(cfg, log, quiet);
        case Command::Sweep: return command_sweep(cfg, log, quiet);
        case Command::McCheck: return command_mc_check(cfg, log, quiet);
        }
    } catch (const IterationFailure& e) {
        log << "solver failure: " << e.what() << "\n";
        return kExitSolverFailure;
    } catch (const SingularSystemError& e) {
        log << "solver failure: " << e.what() << "\n";
        return kExitSolverFailure;
    } catch (const ConfigError& e) {
        log << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        log << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace hjbi
