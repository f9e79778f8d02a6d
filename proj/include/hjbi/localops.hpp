#pragma once

#include <vector>

#include "hjbi/model.hpp"

namespace hjbi {

/// One admissible control tuple at a point.
struct ControlSample {
    double q = 0.0;
    double lambda = 0.0;
    double theta1 = 1.0;
    double theta2 = 1.0;
};

struct LambdaOptimum {
    double lambda_star;
    double min_value;  // min over lambda of -sigma lambda a p + lambda^2 / (2 psi0)
};

struct QOptimum {
    double q_star;
    double max_value;  // max over q of -r(q) a p - h(q)
};

/// Discretized intervention set with r and h tabulated at each candidate q.
class QGrid {
public:
    explicit QGrid(const ProblemSpec& spec);

    int size() const { return static_cast<int>(q_.size()); }
    double q(int k) const { return q_[static_cast<std::size_t>(k)]; }
    double r(int k) const { return r_[static_cast<std::size_t>(k)]; }
    double h(int k) const { return h_[static_cast<std::size_t>(k)]; }
    double r_max() const;

    /// Enumerates the candidates in ascending q; ties keep the smallest q.
    QOptimum argmax(double a_times_p) const;

private:
    std::vector<double> q_;
    std::vector<double> r_;
    std::vector<double> h_;
};

/// Closed-form maximizer of nature's drift distortion, clamped to
/// [-lambda_max, lambda_max].
LambdaOptimum optimal_lambda(const ProblemSpec& spec, double x, double p);
LambdaOptimum optimal_lambda(double sigma, double psi0, double lambda_max, double a, double p);

QOptimum optimal_q(const ProblemSpec& spec, double x, double p);

/// H(x, p) = f(x) - max_q{-r(q) a p - h(q)} - min_lambda{-sigma lambda a p + lambda^2 / (2 psi0)}.
double hamiltonian(const ProblemSpec& spec, double x, double p);

}  // namespace hjbi
