#pragma once

#include <vector>

namespace hjbi {

/// Value function at the mesh nodes at one time level.
struct ValueField {
    std::vector<double> values;
    double time = 0.0;
};

/// Optimal controls at the mesh nodes at one time level.
struct ControlField {
    std::vector<double> q_star;
    std::vector<double> lambda_star;
    std::vector<double> theta1_star;
    std::vector<double> theta2_star;
    double time = 0.0;

    ControlField() = default;
    ControlField(int n_nodes, double time_label)
        : q_star(static_cast<std::size_t>(n_nodes), 0.0),
          lambda_star(static_cast<std::size_t>(n_nodes), 0.0),
          theta1_star(static_cast<std::size_t>(n_nodes), 1.0),
          theta2_star(static_cast<std::size_t>(n_nodes), 1.0),
          time(time_label) {}

    std::size_t size() const { return q_star.size(); }
};

}  // namespace hjbi
