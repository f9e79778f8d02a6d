#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hjbi/fields.hpp"
#include "hjbi/grid.hpp"
#include "hjbi/localops.hpp"
#include "hjbi/model.hpp"
#include "hjbi/nonlocal.hpp"

namespace hjbi {

/// Raised when a tridiagonal elimination meets a zero pivot.
class SingularSystemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when an assembled row breaks the M-matrix structure. Always a bug.
class SchemeError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Raised when policy iteration does not reach its tolerance.
class IterationFailure : public std::runtime_error {
public:
    IterationFailure(double time, double residual, int iterations);
    double time() const { return time_; }
    double residual() const { return residual_; }
    int iterations() const { return iterations_; }

private:
    double time_;
    double residual_;
    int iterations_;
};

struct PolicyConfig {
    double tol = 1e-9;
    int max_iter = 50;
};

/// Problem data sampled on a mesh: coefficients at the nodes, the two jump
/// quadratures and the candidate intervention grid. Immutable and shareable.
class Discretization {
public:
    Discretization(ProblemSpec spec, Mesh mesh, int n_quad = 64);

    const ProblemSpec& spec() const { return spec_; }
    const Mesh& mesh() const { return mesh_; }
    const JumpQuadrature& down() const { return down_; }
    const JumpQuadrature& up() const { return up_; }
    const QGrid& q_grid() const { return q_grid_; }
    int size() const { return mesh_.size(); }

    double a(int i) const { return a_[static_cast<std::size_t>(i)]; }
    double f(int i) const { return f_[static_cast<std::size_t>(i)]; }
    /// sigma^2 a(x)^2 / 2
    double diffusion(int i) const { return diffusion_[static_cast<std::size_t>(i)]; }
    /// gamma1 - (gamma0 + gamma1) x
    double migration_drift(int i) const { return migration_[static_cast<std::size_t>(i)]; }
    /// Full controlled drift gamma1 - (gamma0 + gamma1) x + r(q) a + sigma lambda a.
    double drift(int i, double r_of_q, double lambda) const;
    double f_max() const { return f_max_; }

private:
    ProblemSpec spec_;
    Mesh mesh_;
    JumpQuadrature down_;
    JumpQuadrature up_;
    QGrid q_grid_;
    std::vector<double> a_;
    std::vector<double> f_;
    std::vector<double> diffusion_;
    std::vector<double> migration_;
    double f_max_;
};

/// Rows hold (lower_i, diag_i, upper_i); lower_0 and upper_{n-1} are zero.
struct TridiagonalSystem {
    std::vector<double> lower;
    std::vector<double> diag;
    std::vector<double> upper;
    std::vector<double> rhs;

    explicit TridiagonalSystem(std::size_t n = 0) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0), rhs(n, 0.0) {}
    std::size_t size() const { return diag.size(); }
};

/// How the first derivative is discretized at one node.
enum class Stencil : std::uint8_t { Central, Forward, Backward, None };

/// Central differencing whenever 2 D / dx >= |b|, otherwise upwind in the
/// direction of b. Boundary nodes only look inward.
Stencil choose_stencil(int i, int last, double diffusion, double drift, double dx);

/// Discrete derivative of phi at node i under the given stencil.
double gradient(Stencil s, std::span<const double> phi, int i, double dx);

/// Fully implicit step for fixed controls, with the jump expectations of
/// phi_lagged moved to the right-hand side. Throws SchemeError when a row is
/// not an M-matrix row.
TridiagonalSystem assemble_system(const Discretization& disc, double dt, const ControlField& controls,
                                  const ValueField& phi_next, const ValueField& phi_lagged);

/// Same, with the jump expectations W1 phi_lagged and W2 phi_lagged precomputed.
TridiagonalSystem assemble_system(const Discretization& disc, double dt, const ControlField& controls,
                                  std::span<const double> phi_next, std::span<const double> expect_down,
                                  std::span<const double> expect_up);

/// Throws SchemeError unless every row has nonpositive off-diagonals and a
/// diagonal of at least max(1/dt, |lower| + |upper|).
void check_m_matrix(const TridiagonalSystem& sys, double dt);

/// Thomas elimination without pivoting. Throws SingularSystemError on a zero pivot.
std::vector<double> thomas_solve(const TridiagonalSystem& sys);

struct StepResult {
    ValueField phi;
    ControlField controls;
    int n_iters = 0;
};

/// One backward time step by policy iteration from phi_next (at time t + dt)
/// to time t = phi_next.time - dt.
StepResult step_backward(const Discretization& disc, double dt, const ValueField& phi_next,
                         const PolicyConfig& cfg = {});

struct ErgodicReport {
    double E_mean = 0.0;
    double E_spread = 0.0;
    std::vector<double> per_node_E;
};

/// Backward-difference estimate of -dPhi/dt from two consecutive slices,
/// phi_t0 being the earlier one.
ErgodicReport ergodic_estimate(const ValueField& phi_t0, const ValueField& phi_t1, double dt);

struct SolveResult {
    ValueField final_value;
    ControlField final_controls;
    ErgodicReport ergodic;
    std::vector<int> iteration_counts;  // per step, in order of computation (t = T - dt first)
    std::vector<ValueField> snapshots;
    std::vector<ControlField> control_snapshots;
};

/// Called after every step with the new slice, its controls and the
/// policy-iteration count.
using StepObserver = std::function<void(const ValueField&, const ControlField&, int)>;

/// Marches from Phi(T, .) = 0 back to t = 0. Snapshots are taken at the time
/// level nearest to each requested time.
SolveResult solve_backward(const Discretization& disc, const TimeGrid& time_grid,
                           const PolicyConfig& cfg = {}, std::span<const double> snapshot_times = {},
                           const StepObserver& observer = {});

/// Largest amount by which phi leaves [0, (T - t) f_max] (0 if inside).
double bounds_violation(const Discretization& disc, const ValueField& phi);

struct Interval {
    double left;
    double right;
};

/// Maximal runs of consecutive nodes with q > q_threshold, as node coordinates.
std::vector<Interval> switching_points(std::span<const double> q_field, const Mesh& mesh,
                                       double q_threshold);

}  // namespace hjbi
