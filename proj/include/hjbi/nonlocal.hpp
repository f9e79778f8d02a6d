#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "hjbi/grid.hpp"
#include "hjbi/model.hpp"

namespace hjbi {

/// Post-jump state map: Down sends x to (1 - z) x, Up sends x to z + (1 - z) x.
enum class JumpTransform { Down, Up };

double apply_transform(JumpTransform kind, double z, double x);

/// Sparse row-stochastic matrix W with (W phi)_i ~ int g(z) phi(transform(z, x_i)) dz.
///
/// Stored in CSR form with columns ascending inside each row. Every weight is
/// nonnegative and every row sums to one up to rounding.
class JumpQuadrature {
public:
    JumpQuadrature(JumpTransform kind, int n_nodes, std::vector<int> row_ptr, std::vector<int> cols,
                   std::vector<double> weights);

    JumpTransform kind() const { return kind_; }
    int n_nodes() const { return n_nodes_; }
    std::span<const int> row_cols(int i) const;
    std::span<const double> row_weights(int i) const;
    std::size_t nonzeros() const { return weights_.size(); }

    /// out = W phi; out must already have n_nodes entries.
    void apply(std::span<const double> phi, std::span<double> out) const;

private:
    JumpTransform kind_;
    int n_nodes_;
    std::vector<int> row_ptr_;
    std::vector<int> cols_;
    std::vector<double> weights_;
};

/// Midpoint rule with n_quad points in z over the density support; each
/// transformed point is spread onto its two bracketing nodes and rows are
/// renormalized to sum to one.
JumpQuadrature build_jump_quadrature(const Mesh& mesh, const JumpDensity& density,
                                     JumpTransform kind, int n_quad = 64);

std::vector<double> apply_expectation(const JumpQuadrature& quad, std::span<const double> phi);

/// Worst-case jump terms for one jump channel.
struct NonlocalTerms {
    std::vector<double> values;      // min over theta of nu theta delta + (nu / psi)(theta ln theta + 1 - theta);
                                     // (nu / psi) (1 - exp(-psi delta)) unless theta_star is clamped
    std::vector<double> delta;       // phi - W phi
    std::vector<double> theta_star;  // min(exp(-psi delta), theta_max)
};

NonlocalTerms apply_nonlocal(const JumpQuadrature& quad, std::span<const double> phi, double nu,
                             double psi, double theta_max);

/// Relative-entropy penalty kernel theta ln theta + 1 - theta, with 0 ln 0 = 0.
inline double entropy_kernel(double theta) {
    if (theta <= 0.0) return 1.0;
    return theta * std::log(theta) + 1.0 - theta;
}

}  // namespace hjbi
