#include "hjbi/localops.hpp"

#include <algorithm>
#include <stdexcept>

namespace hjbi {

QGrid::QGrid(const ProblemSpec& spec) {
    if (spec.q_grid_size < 2) throw std::invalid_argument("q_grid_size must be >= 2");
    const auto n = static_cast<std::size_t>(spec.q_grid_size);
    q_.resize(n);
    r_.resize(n);
    h_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        q_[k] = spec.q_point(static_cast<int>(k));
        r_[k] = spec.growth_rate_r(q_[k]);
        h_[k] = spec.cost_h(q_[k]);
    }
}

double QGrid::r_max() const { return *std::max_element(r_.begin(), r_.end()); }

QOptimum QGrid::argmax(double a_times_p) const {
    QOptimum best{q_[0], -r_[0] * a_times_p - h_[0]};
    for (std::size_t k = 1; k < q_.size(); ++k) {
        const double value = -r_[k] * a_times_p - h_[k];
        if (value > best.max_value) best = {q_[k], value};
    }
    return best;
}

LambdaOptimum optimal_lambda(double sigma, double psi0, double lambda_max, double a, double p) {
    const double slope = sigma * a * p;
    const double lambda = std::clamp(psi0 * slope, -lambda_max, lambda_max);
    return {lambda, -lambda * slope + lambda * lambda / (2.0 * psi0)};
}

LambdaOptimum optimal_lambda(const ProblemSpec& spec, double x, double p) {
    return optimal_lambda(spec.sigma, spec.psi0, spec.lambda_max, spec.growth_a(x), p);
}

QOptimum optimal_q(const ProblemSpec& spec, double x, double p) {
    return QGrid(spec).argmax(spec.growth_a(x) * p);
}

double hamiltonian(const ProblemSpec& spec, double x, double p) {
    return spec.disutility_f(x) - optimal_q(spec, x, p).max_value -
           optimal_lambda(spec, x, p).min_value;
}

}  // namespace hjbi
