#pragma once

#include <span>
#include <vector>

namespace hjbi {

/// Uniform mesh on [0, 1] with n_cells cells and n_cells + 1 nodes.
class Mesh {
public:
    explicit Mesh(int n_cells);

    int n_cells() const { return n_cells_; }
    int size() const { return n_cells_ + 1; }
    double dx() const { return dx_; }
    double node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
    std::span<const double> nodes() const { return nodes_; }

    bool operator==(const Mesh& other) const { return n_cells_ == other.n_cells_; }

private:
    int n_cells_;
    double dx_;
    std::vector<double> nodes_;
};

/// Throws std::invalid_argument for n_cells < 2.
Mesh build_mesh(int n_cells);

/// Backward time levels t_n = n * dt, n = 0..n_steps, with t_{n_steps} = horizon.
class TimeGrid {
public:
    TimeGrid(double dt, double horizon);

    double dt() const { return dt_; }
    double horizon() const { return horizon_; }
    int n_steps() const { return n_steps_; }
    double time(int n) const;

private:
    double dt_;
    double horizon_;
    int n_steps_;
};

struct InterpWeights {
    int index;          // left node
    double left;        // weight on node index
    double right;       // weight on node index + 1
};

/// Linear interpolation weights of y in [0, 1]. Node hits resolve to
/// (i, 1, 0); y = 1 resolves to (N - 1, 0, 1).
InterpWeights interp_weights(const Mesh& mesh, double y);

/// Piecewise-linear interpolation of nodal values at y.
double interpolate(const Mesh& mesh, std::span<const double> values, double y);

}  // namespace hjbi
