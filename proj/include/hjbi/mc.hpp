#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "hjbi/fields.hpp"
#include "hjbi/grid.hpp"
#include "hjbi/localops.hpp"
#include "hjbi/model.hpp"

namespace hjbi {

using Rng = std::mt19937_64;

/// Seed of the independent stream for one path.
std::uint64_t path_seed(std::uint64_t master_seed, std::uint64_t path);

/// Markov control fields indexed by time. The slice labelled t_n governs
/// [t_n, t_n + dt); inside a slice controls are interpolated linearly in x.
class ControlSchedule {
public:
    ControlSchedule(Mesh mesh, double dt, std::vector<ControlField> slices);

    /// One spatially constant control on [0, horizon).
    static ControlSchedule constant(const Mesh& mesh, double horizon, const ControlSample& c);

    double start_time() const { return slices_.front().time; }
    double end_time() const { return slices_.back().time + dt_; }
    const Mesh& mesh() const { return mesh_; }
    std::size_t size() const { return slices_.size(); }

    ControlSample at(double t, double x) const;

private:
    Mesh mesh_;
    double dt_;
    std::vector<ControlField> slices_;
};

struct SimConfig {
    double dt_sim = 5e-4;
    long n_paths = 10000;
    std::uint64_t master_seed = 12345;
    double start_x = 0.5;
    double start_t = 0.0;
    /// Drop the entropic penalties from the running cost (diagnostics only).
    bool include_penalties = true;
    /// 0 picks the hardware concurrency.
    int n_threads = 0;
};

struct ValueEstimate {
    double mean = 0.0;
    double std_err = 0.0;
    long n_paths = 0;
};

struct SimulationReport {
    ValueEstimate value;
    double mean_down_jumps = 0.0;  // accepted type-1 events per path
    double mean_up_jumps = 0.0;    // accepted type-2 events per path
    double min_state = 1.0;
    double max_state = 0.0;
};

/// Euler-Maruyama for the distorted dynamics with exact thinning of the
/// state-dependent jump intensities, accumulating the running cost by the
/// left-endpoint rule. Deterministic for a fixed SimConfig regardless of the
/// thread count.
SimulationReport simulate(const ProblemSpec& spec, const ControlSchedule& controls, const SimConfig& cfg);

ValueEstimate simulate_value(const ProblemSpec& spec, const ControlSchedule& controls, const SimConfig& cfg);

/// Inverse-CDF draw from the jump-size density.
double sample_jump_size(const JumpDensity& density, Rng& rng);

/// Pairwise (cascade) summation; result independent of thread scheduling.
double pairwise_sum(const double* data, std::size_t n);

}  // namespace hjbi
