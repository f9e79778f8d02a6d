#include "hjbi/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hjbi {

namespace {

std::string iteration_message(double time, double residual, int iterations) {
    std::ostringstream os;
    os.precision(10);
    os << "policy iteration did not converge at t = " << time << " after " << iterations
       << " iterations (last change " << residual << ")";
    return os.str();
}

double penalty(const ProblemSpec& spec, double lambda, double theta1, double theta2) {
    return lambda * lambda / (2.0 * spec.psi0) + (spec.nu1 / spec.psi1) * entropy_kernel(theta1) +
           (spec.nu2 / spec.psi2) * entropy_kernel(theta2);
}

}  // namespace

IterationFailure::IterationFailure(double time, double residual, int iterations)
    : std::runtime_error(iteration_message(time, residual, iterations)),
      time_(time),
      residual_(residual),
      iterations_(iterations) {}

Discretization::Discretization(ProblemSpec spec, Mesh mesh, int n_quad)
    : spec_(std::move(spec)),
      mesh_(std::move(mesh)),
      down_(build_jump_quadrature(mesh_, spec_.jump_density_1, JumpTransform::Down, n_quad)),
      up_(build_jump_quadrature(mesh_, spec_.jump_density_2, JumpTransform::Up, n_quad)),
      q_grid_(spec_),
      f_max_(0.0) {
    const auto n = static_cast<std::size_t>(mesh_.size());
    a_.resize(n);
    f_.resize(n);
    diffusion_.resize(n);
    migration_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = mesh_.node(static_cast<int>(i));
        a_[i] = spec_.growth_a(x);
        f_[i] = spec_.disutility_f(x);
        diffusion_[i] = 0.5 * spec_.sigma * spec_.sigma * a_[i] * a_[i];
        migration_[i] = spec_.gamma1 - (spec_.gamma0 + spec_.gamma1) * x;
        f_max_ = std::max(f_max_, f_[i]);
    }
}

double Discretization::drift(int i, double r_of_q, double lambda) const {
    const auto k = static_cast<std::size_t>(i);
    return migration_[k] + r_of_q * a_[k] + spec_.sigma * lambda * a_[k];
}

Stencil choose_stencil(int i, int last, double diffusion, double drift, double dx) {
    if (i == 0) return drift > 0.0 ? Stencil::Forward : Stencil::None;
    if (i == last) return drift < 0.0 ? Stencil::Backward : Stencil::None;
    if (2.0 * diffusion / dx >= std::abs(drift)) return Stencil::Central;
    return drift > 0.0 ? Stencil::Forward : Stencil::Backward;
}

double gradient(Stencil s, std::span<const double> phi, int i, double dx) {
    const auto k = static_cast<std::size_t>(i);
    switch (s) {
    case Stencil::Central: return (phi[k + 1] - phi[k - 1]) / (2.0 * dx);
    case Stencil::Forward: return (phi[k + 1] - phi[k]) / dx;
    case Stencil::Backward: return (phi[k] - phi[k - 1]) / dx;
    case Stencil::None: return 0.0;
    }
    return 0.0;
}

TridiagonalSystem assemble_system(const Discretization& disc, double dt, const ControlField& controls,
                                  std::span<const double> phi_next, std::span<const double> expect_down,
                                  std::span<const double> expect_up) {
    const int n = disc.size();
    const auto un = static_cast<std::size_t>(n);
    if (controls.size() != un || phi_next.size() != un || expect_down.size() != un || expect_up.size() != un) {
        throw std::invalid_argument("assemble_system: fields are not on the discretization mesh");
    }
    const ProblemSpec& spec = disc.spec();
    const double dx = disc.mesh().dx();
    const double inv_dt = 1.0 / dt;

    TridiagonalSystem sys(un);
    for (int i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const double q = controls.q_star[k];
        const double lambda = controls.lambda_star[k];
        const double th1 = controls.theta1_star[k];
        const double th2 = controls.theta2_star[k];
        const double diff = (i == 0 || i == n - 1) ? 0.0 : disc.diffusion(i);
        const double b = disc.drift(i, spec.growth_rate_r(q), lambda);

        double lower = 0.0;
        double upper = 0.0;
        if (diff > 0.0) {
            lower -= diff / (dx * dx);
            upper -= diff / (dx * dx);
        }
        switch (choose_stencil(i, n - 1, diff, b, dx)) {
        case Stencil::Central:
            lower += b / (2.0 * dx);
            upper -= b / (2.0 * dx);
            break;
        case Stencil::Forward: upper -= b / dx; break;
        case Stencil::Backward: lower += b / dx; break;
        case Stencil::None: break;
        }
        const double jump_rate = spec.nu1 * th1 + spec.nu2 * th2;
        sys.lower[k] = lower;
        sys.upper[k] = upper;
        sys.diag[k] = inv_dt - lower - upper + jump_rate;
        sys.rhs[k] = phi_next[k] * inv_dt + disc.f(i) + spec.cost_h(q) - penalty(spec, lambda, th1, th2) +
                     spec.nu1 * th1 * expect_down[k] + spec.nu2 * th2 * expect_up[k];
    }
    check_m_matrix(sys, dt);
    return sys;
}

TridiagonalSystem assemble_system(const Discretization& disc, double dt, const ControlField& controls,
                                  const ValueField& phi_next, const ValueField& phi_lagged) {
    if (phi_lagged.values.size() != static_cast<std::size_t>(disc.size())) {
        throw std::invalid_argument("assemble_system: lagged field is not on the discretization mesh");
    }
    const auto expect_down = apply_expectation(disc.down(), phi_lagged.values);
    const auto expect_up = apply_expectation(disc.up(), phi_lagged.values);
    return assemble_system(disc, dt, controls, phi_next.values, expect_down, expect_up);
}

void check_m_matrix(const TridiagonalSystem& sys, double dt) {
    const double inv_dt = 1.0 / dt;
    for (std::size_t i = 0; i < sys.size(); ++i) {
        const bool ok = sys.lower[i] <= 0.0 && sys.upper[i] <= 0.0 && sys.diag[i] >= inv_dt &&
                        sys.diag[i] >= std::abs(sys.lower[i]) + std::abs(sys.upper[i]);
        if (!ok) {
            std::ostringstream os;
            os << "row " << i << " is not an M-matrix row (lower " << sys.lower[i] << ", diag "
               << sys.diag[i] << ", upper " << sys.upper[i] << ")";
            throw SchemeError(os.str());
        }
    }
    if (!sys.lower.empty() && (sys.lower.front() != 0.0 || sys.upper.back() != 0.0)) {
        throw SchemeError("tridiagonal system couples past its first or last row");
    }
}

std::vector<double> thomas_solve(const TridiagonalSystem& sys) {
    const std::size_t n = sys.size();
    if (sys.lower.size() != n || sys.upper.size() != n || sys.rhs.size() != n) {
        throw std::invalid_argument("thomas_solve: inconsistent band sizes");
    }
    std::vector<double> c(n);
    std::vector<double> x(n);
    double pivot = sys.diag.empty() ? 0.0 : sys.diag[0];
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) pivot = sys.diag[i] - sys.lower[i] * c[i - 1];
        if (pivot == 0.0 || !std::isfinite(pivot)) {
            throw SingularSystemError("zero pivot in tridiagonal solve at row " + std::to_string(i));
        }
        c[i] = sys.upper[i] / pivot;
        x[i] = (sys.rhs[i] - (i > 0 ? sys.lower[i] * x[i - 1] : 0.0)) / pivot;
    }
    for (std::size_t i = n; i-- > 1;) x[i - 1] -= c[i - 1] * x[i];
    return x;
}

StepResult step_backward(const Discretization& disc, double dt, const ValueField& phi_next,
                         const PolicyConfig& cfg) {
    const int n = disc.size();
    const auto un = static_cast<std::size_t>(n);
    if (phi_next.values.size() != un) {
        throw std::invalid_argument("step_backward: field is not on the discretization mesh");
    }
    const ProblemSpec& spec = disc.spec();
    const QGrid& qs = disc.q_grid();
    const double dx = disc.mesh().dx();
    const double time = phi_next.time - dt;

    StepResult out;
    out.controls = ControlField(n, time);
    std::vector<double> phi = phi_next.values;
    std::vector<double> expect_down(un);
    std::vector<double> expect_up(un);

    // Stencil choice for the gradient follows the drift of the previous
    // iterate; the first iterate uses the drift without intervention or
    // distortion.
    std::vector<double> drift(un);
    for (int i = 0; i < n; ++i) drift[static_cast<std::size_t>(i)] = disc.drift(i, qs.r(0), 0.0);

    double change = 0.0;
    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
        ControlField& ctl = out.controls;
        for (int i = 0; i < n; ++i) {
            const auto k = static_cast<std::size_t>(i);
            const double diff = (i == 0 || i == n - 1) ? 0.0 : disc.diffusion(i);
            const double p = gradient(choose_stencil(i, n - 1, diff, drift[k], dx), phi, i, dx);
            const double ap = disc.a(i) * p;
            ctl.q_star[k] = qs.argmax(ap).q_star;
            ctl.lambda_star[k] = optimal_lambda(spec.sigma, spec.psi0, spec.lambda_max, disc.a(i), p).lambda_star;
        }
        disc.down().apply(phi, expect_down);
        disc.up().apply(phi, expect_up);
        for (std::size_t k = 0; k < un; ++k) {
            ctl.theta1_star[k] = std::min(std::exp(-spec.psi1 * (phi[k] - expect_down[k])), spec.theta_max);
            ctl.theta2_star[k] = std::min(std::exp(-spec.psi2 * (phi[k] - expect_up[k])), spec.theta_max);
        }

        const TridiagonalSystem sys = assemble_system(disc, dt, ctl, phi_next.values, expect_down, expect_up);
        std::vector<double> next = thomas_solve(sys);

        change = 0.0;
        for (std::size_t k = 0; k < un; ++k) change = std::max(change, std::abs(next[k] - phi[k]));
        phi = std::move(next);
        for (int i = 0; i < n; ++i) {
            const auto k = static_cast<std::size_t>(i);
            drift[k] = disc.drift(i, spec.growth_rate_r(ctl.q_star[k]), ctl.lambda_star[k]);
        }
        if (change <= cfg.tol) {
            out.phi = ValueField{std::move(phi), time};
            out.n_iters = iter;
            return out;
        }
    }
    throw IterationFailure(time, change, cfg.max_iter);
}

ErgodicReport ergodic_estimate(const ValueField& phi_t0, const ValueField& phi_t1, double dt) {
    if (phi_t0.values.size() != phi_t1.values.size() || phi_t0.values.empty()) {
        throw std::invalid_argument("ergodic_estimate: slices are on different meshes");
    }
    if (!(dt > 0.0)) throw std::invalid_argument("ergodic_estimate: dt must be > 0");
    ErgodicReport out;
    const std::size_t n = phi_t0.values.size();
    out.per_node_E.resize(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out.per_node_E[i] = (phi_t0.values[i] - phi_t1.values[i]) / dt;
        sum += out.per_node_E[i];
    }
    out.E_mean = sum / static_cast<double>(n);
    for (double e : out.per_node_E) out.E_spread = std::max(out.E_spread, std::abs(e - out.E_mean));
    return out;
}

SolveResult solve_backward(const Discretization& disc, const TimeGrid& time_grid, const PolicyConfig& cfg,
                           std::span<const double> snapshot_times, const StepObserver& observer) {
    if (std::abs(time_grid.horizon() - disc.spec().horizon) > 1e-10 * disc.spec().horizon) {
        throw std::invalid_argument("time grid horizon differs from the problem horizon");
    }
    const int n_steps = time_grid.n_steps();
    const double dt = time_grid.dt();

    // Map each requested time to its nearest level.
    std::vector<int> wanted;
    for (double t : snapshot_times) {
        const double level = std::clamp(std::round(t / dt), 0.0, static_cast<double>(n_steps));
        wanted.push_back(static_cast<int>(level));
    }

    SolveResult result;
    ValueField current{std::vector<double>(static_cast<std::size_t>(disc.size()), 0.0), time_grid.horizon()};
    ValueField previous;
    ControlField controls(disc.size(), time_grid.horizon());
    if (std::find(wanted.begin(), wanted.end(), n_steps) != wanted.end()) {
        result.snapshots.push_back(current);
        result.control_snapshots.push_back(controls);
    }
    result.iteration_counts.reserve(static_cast<std::size_t>(n_steps));

    for (int level = n_steps - 1; level >= 0; --level) {
        StepResult step = step_backward(disc, dt, current, cfg);
        step.phi.time = time_grid.time(level);
        step.controls.time = step.phi.time;
        result.iteration_counts.push_back(step.n_iters);
        if (observer) observer(step.phi, step.controls, step.n_iters);
        if (std::find(wanted.begin(), wanted.end(), level) != wanted.end()) {
            result.snapshots.push_back(step.phi);
            result.control_snapshots.push_back(step.controls);
        }
        previous = std::move(current);
        current = std::move(step.phi);
        controls = std::move(step.controls);
    }

    result.ergodic = ergodic_estimate(current, previous, dt);
    result.final_value = std::move(current);
    result.final_controls = std::move(controls);
    return result;
}

double bounds_violation(const Discretization& disc, const ValueField& phi) {
    const double f_max = disc.f_max();
    const double upper = (disc.spec().horizon - phi.time) * f_max;
    double worst = 0.0;
    for (double v : phi.values) {
        worst = std::max(worst, -v);
        worst = std::max(worst, v - upper);
    }
    return worst;
}

std::vector<Interval> switching_points(std::span<const double> q_field, const Mesh& mesh,
                                       double q_threshold) {
    if (q_field.size() != static_cast<std::size_t>(mesh.size())) {
        throw std::invalid_argument("switching_points: field is not on the mesh");
    }
    std::vector<Interval> out;
    int start = -1;
    const int n = mesh.size();
    for (int i = 0; i <= n; ++i) {
        const bool active = i < n && q_field[static_cast<std::size_t>(i)] > q_threshold;
        if (active && start < 0) start = i;
        if (!active && start >= 0) {
            out.push_back({mesh.node(start), mesh.node(i - 1)});
            start = -1;
        }
    }
    return out;
}

}  // namespace hjbi
