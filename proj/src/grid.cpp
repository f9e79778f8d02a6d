#include "hjbi/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace hjbi {

Mesh::Mesh(int n_cells) : n_cells_(n_cells), dx_(0.0) {
    if (n_cells < 2) {
        throw std::invalid_argument("mesh needs at least 2 cells, got " + std::to_string(n_cells));
    }
    dx_ = 1.0 / static_cast<double>(n_cells);
    nodes_.resize(static_cast<std::size_t>(n_cells) + 1);
    for (int i = 0; i <= n_cells; ++i) {
        nodes_[static_cast<std::size_t>(i)] = static_cast<double>(i) / static_cast<double>(n_cells);
    }
}

Mesh build_mesh(int n_cells) { return Mesh(n_cells); }

TimeGrid::TimeGrid(double dt, double horizon) : dt_(dt), horizon_(horizon), n_steps_(0) {
    if (!(dt > 0.0) || !(horizon > 0.0)) {
        throw std::invalid_argument("time grid needs dt > 0 and horizon > 0");
    }
    const double steps = std::round(horizon / dt);
    if (steps < 1.0 || std::abs(steps * dt - horizon) > 1e-10 * horizon) {
        throw std::invalid_argument("horizon must be an integer multiple of dt");
    }
    n_steps_ = static_cast<int>(steps);
}

double TimeGrid::time(int n) const {
    if (n == n_steps_) return horizon_;
    return static_cast<double>(n) * dt_;
}

InterpWeights interp_weights(const Mesh& mesh, double y) {
    if (!(y >= 0.0 && y <= 1.0)) {
        throw std::invalid_argument("interpolation point outside [0, 1]");
    }
    const int n = mesh.n_cells();
    if (y == 1.0) return {n - 1, 0.0, 1.0};

    const double s = y * static_cast<double>(n);
    const double nearest = std::round(s);
    if (std::abs(s - nearest) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, s)) {
        const int i = static_cast<int>(nearest);
        if (i >= n) return {n - 1, 0.0, 1.0};
        return {i, 1.0, 0.0};
    }
    int i = static_cast<int>(std::floor(s));
    if (i >= n) i = n - 1;
    const double right = s - static_cast<double>(i);
    return {i, 1.0 - right, right};
}

double interpolate(const Mesh& mesh, std::span<const double> values, double y) {
    const InterpWeights w = interp_weights(mesh, y);
    const auto i = static_cast<std::size_t>(w.index);
    return w.left * values[i] + w.right * values[i + 1];
}

}  // namespace hjbi
