#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "hjbi/cli.hpp"
#include "hjbi/config.hpp"
#include "hjbi/mc.hpp"
#include "hjbi/solver.hpp"

namespace py = pybind11;
using namespace hjbi;

namespace {

JumpTransform transform_from(const std::string& kind) {
    if (kind == "down") return JumpTransform::Down;
    if (kind == "up") return JumpTransform::Up;
    throw py::value_error("transform must be 'down' or 'up'");
}

py::dict controls_dict(const ControlField& c) {
    py::dict d;
    d["time"] = c.time;
    d["q_star"] = c.q_star;
    d["lambda_star"] = c.lambda_star;
    d["theta1_star"] = c.theta1_star;
    d["theta2_star"] = c.theta2_star;
    return d;
}

py::dict solve_py(const ProblemSpec& spec, int n_cells, double dt, int n_quad, double tol, int max_iter,
                  const std::vector<double>& snapshot_times) {
    SolveResult r;
    Mesh mesh = build_mesh(n_cells);
    {
        py::gil_scoped_release release;
        const Discretization disc(spec, mesh, n_quad);
        r = solve_backward(disc, TimeGrid(dt, spec.horizon), PolicyConfig{tol, max_iter}, snapshot_times);
    }
    py::dict out;
    out["x"] = std::vector<double>(mesh.nodes().begin(), mesh.nodes().end());
    out["phi"] = r.final_value.values;
    out["controls"] = controls_dict(r.final_controls);
    out["E_mean"] = r.ergodic.E_mean;
    out["E_spread"] = r.ergodic.E_spread;
    out["iteration_counts"] = r.iteration_counts;
    py::list omega;
    for (const auto& iv : switching_points(r.final_controls.q_star, mesh, spec.q_max / 2.0)) {
        omega.append(py::make_tuple(iv.left, iv.right));
    }
    out["omega1"] = omega;
    py::list snaps;
    for (std::size_t k = 0; k < r.snapshots.size(); ++k) {
        py::dict s;
        s["time"] = r.snapshots[k].time;
        s["phi"] = r.snapshots[k].values;
        s["controls"] = controls_dict(r.control_snapshots[k]);
        snaps.append(s);
    }
    out["snapshots"] = snaps;
    return out;
}

py::dict mc_check_py(const ProblemSpec& spec, int n_cells, double dt, long n_paths, double dt_sim,
                     std::uint64_t seed, double start_x, int threads) {
    double pde = 0.0;
    ValueEstimate est;
    {
        py::gil_scoped_release release;
        const Discretization disc(spec, build_mesh(n_cells));
        std::vector<ControlField> slices;
        const auto r = solve_backward(disc, TimeGrid(dt, spec.horizon), {}, {},
                                      [&](const ValueField&, const ControlField& c, int) { slices.push_back(c); });
        pde = interpolate(disc.mesh(), r.final_value.values, start_x);
        SimConfig cfg;
        cfg.n_paths = n_paths;
        cfg.dt_sim = dt_sim;
        cfg.master_seed = seed;
        cfg.start_x = start_x;
        cfg.n_threads = threads;
        est = simulate_value(spec, ControlSchedule(disc.mesh(), dt, std::move(slices)), cfg);
    }
    py::dict out;
    out["pde_value"] = pde;
    out["mc_mean"] = est.mean;
    out["mc_std_err"] = est.std_err;
    out["n_paths"] = est.n_paths;
    return out;
}

}  // namespace

PYBIND11_MODULE(_hjbi, m) {
    m.doc() = "Finite-difference HJBI solver and Monte Carlo oracle";

    py::register_exception<IterationFailure>(m, "IterationFailure", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<Coefficient>(m, "Coefficient")
        .def_static("constant", &Coefficient::constant)
        .def_static("affine", &Coefficient::affine)
        .def_static("logistic", &Coefficient::logistic, py::arg("scale") = 1.0)
        .def_static("tent", &Coefficient::tent)
        .def_static("table", &Coefficient::table)
        .def("__call__", &Coefficient::operator());

    py::class_<JumpDensity>(m, "JumpDensity")
        .def_static("uniform", &JumpDensity::uniform)
        .def_static("table", &JumpDensity::table)
        .def_property_readonly("support", [](const JumpDensity& d) { return py::make_tuple(d.support_lo(), d.support_hi()); })
        .def("__call__", &JumpDensity::operator())
        .def("quantile", &JumpDensity::quantile)
        .def("total_mass", &JumpDensity::total_mass);

    py::class_<ProblemSpec>(m, "ProblemSpec")
        .def(py::init<>())
        .def_readwrite("sigma", &ProblemSpec::sigma)
        .def_readwrite("gamma0", &ProblemSpec::gamma0)
        .def_readwrite("gamma1", &ProblemSpec::gamma1)
        .def_readwrite("nu1", &ProblemSpec::nu1)
        .def_readwrite("nu2", &ProblemSpec::nu2)
        .def_readwrite("psi0", &ProblemSpec::psi0)
        .def_readwrite("psi1", &ProblemSpec::psi1)
        .def_readwrite("psi2", &ProblemSpec::psi2)
        .def_readwrite("lambda_max", &ProblemSpec::lambda_max)
        .def_readwrite("theta_max", &ProblemSpec::theta_max)
        .def_readwrite("q_max", &ProblemSpec::q_max)
        .def_readwrite("horizon", &ProblemSpec::horizon)
        .def_readwrite("q_grid_size", &ProblemSpec::q_grid_size)
        .def_readwrite("growth_a", &ProblemSpec::growth_a)
        .def_readwrite("growth_rate_r", &ProblemSpec::growth_rate_r)
        .def_readwrite("cost_h", &ProblemSpec::cost_h)
        .def_readwrite("disutility_f", &ProblemSpec::disutility_f)
        .def_readwrite("jump_density_1", &ProblemSpec::jump_density_1)
        .def_readwrite("jump_density_2", &ProblemSpec::jump_density_2);

    m.def("paper_spec", &make_paper_spec, py::arg("with_control") = false);
    m.def("validate_spec", [](const ProblemSpec& s) { return validate_spec(s).violations; },
          "List of violated constraints; empty when the spec is valid.");

    m.def("interp_weights", [](int n_cells, double y) {
        const auto w = interp_weights(build_mesh(n_cells), y);
        return py::make_tuple(w.index, w.left, w.right);
    });
    m.def("apply_expectation",
          [](const std::vector<double>& phi, const JumpDensity& d, const std::string& kind, int n_quad) {
              const Mesh mesh = build_mesh(static_cast<int>(phi.size()) - 1);
              return apply_expectation(build_jump_quadrature(mesh, d, transform_from(kind), n_quad), phi);
          },
          py::arg("phi"), py::arg("density"), py::arg("transform"), py::arg("n_quad") = 64);
    m.def("apply_nonlocal",
          [](const std::vector<double>& phi, const JumpDensity& d, const std::string& kind, double nu, double psi,
             double theta_max, int n_quad) {
              const Mesh mesh = build_mesh(static_cast<int>(phi.size()) - 1);
              const auto t = apply_nonlocal(build_jump_quadrature(mesh, d, transform_from(kind), n_quad), phi, nu,
                                            psi, theta_max);
              py::dict out;
              out["values"] = t.values;
              out["delta"] = t.delta;
              out["theta_star"] = t.theta_star;
              return out;
          },
          py::arg("phi"), py::arg("density"), py::arg("transform"), py::arg("nu"), py::arg("psi"),
          py::arg("theta_max") = 100.0, py::arg("n_quad") = 64);

    m.def("optimal_lambda", [](const ProblemSpec& s, double x, double p) {
        const auto r = optimal_lambda(s, x, p);
        return py::make_tuple(r.lambda_star, r.min_value);
    });
    m.def("optimal_q", [](const ProblemSpec& s, double x, double p) {
        const auto r = optimal_q(s, x, p);
        return py::make_tuple(r.q_star, r.max_value);
    });
    m.def("hamiltonian", &hamiltonian);

    m.def("solve", &solve_py, py::arg("spec"), py::arg("n_cells") = 500, py::arg("dt") = 0.005,
          py::arg("n_quad") = 64, py::arg("tol") = 1e-9, py::arg("max_iter") = 50,
          py::arg("snapshot_times") = std::vector<double>{},
          "Backward solve from Phi(T, .) = 0 to t = 0.");
    m.def("mc_check", &mc_check_py, py::arg("spec"), py::arg("n_cells") = 200, py::arg("dt") = 0.005,
          py::arg("n_paths") = 10000, py::arg("dt_sim") = 5e-4, py::arg("seed") = 12345, py::arg("start_x") = 0.5,
          py::arg("threads") = 0,
          "PDE value at (0, start_x) and a Monte Carlo estimate under the PDE's optimal controls.");

    m.def("run_config",
          [](const std::string& text, const std::string& out_dir, const std::vector<std::string>& overrides) {
              ConfigMap map = parse_config(text);
              for (const auto& o : overrides) apply_override(map, o);
              map["output.dir"] = out_dir;
              const RunConfig cfg = resolve_config(map);
              std::ostringstream log;
              int code = 0;
              {
                  py::gil_scoped_release release;
                  code = execute(cfg, log);
              }
              return py::make_tuple(code, log.str());
          },
          py::arg("text"), py::arg("out_dir"), py::arg("overrides") = std::vector<std::string>{},
          "Runs a configuration as the command-line tool would; returns (exit code, log).");
}
