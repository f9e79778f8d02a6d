#include "hjbi/nonlocal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hjbi {

double apply_transform(JumpTransform kind, double z, double x) {
    if (kind == JumpTransform::Down) return (1.0 - z) * x;
    return z + (1.0 - z) * x;
}

JumpQuadrature::JumpQuadrature(JumpTransform kind, int n_nodes, std::vector<int> row_ptr,
                               std::vector<int> cols, std::vector<double> weights)
    : kind_(kind),
      n_nodes_(n_nodes),
      row_ptr_(std::move(row_ptr)),
      cols_(std::move(cols)),
      weights_(std::move(weights)) {
    if (row_ptr_.size() != static_cast<std::size_t>(n_nodes_) + 1 || cols_.size() != weights_.size()) {
        throw std::invalid_argument("malformed jump quadrature storage");
    }
}

std::span<const int> JumpQuadrature::row_cols(int i) const {
    const auto b = static_cast<std::size_t>(row_ptr_[static_cast<std::size_t>(i)]);
    const auto e = static_cast<std::size_t>(row_ptr_[static_cast<std::size_t>(i) + 1]);
    return std::span<const int>(cols_).subspan(b, e - b);
}

std::span<const double> JumpQuadrature::row_weights(int i) const {
    const auto b = static_cast<std::size_t>(row_ptr_[static_cast<std::size_t>(i)]);
    const auto e = static_cast<std::size_t>(row_ptr_[static_cast<std::size_t>(i) + 1]);
    return std::span<const double>(weights_).subspan(b, e - b);
}

void JumpQuadrature::apply(std::span<const double> phi, std::span<double> out) const {
    if (phi.size() != static_cast<std::size_t>(n_nodes_) || out.size() != phi.size()) {
        throw std::invalid_argument("field size does not match the quadrature mesh");
    }
    for (int i = 0; i < n_nodes_; ++i) {
        double acc = 0.0;
        for (int k = row_ptr_[static_cast<std::size_t>(i)]; k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k) {
            acc += weights_[static_cast<std::size_t>(k)] * phi[static_cast<std::size_t>(cols_[static_cast<std::size_t>(k)])];
        }
        out[static_cast<std::size_t>(i)] = acc;
    }
}

JumpQuadrature build_jump_quadrature(const Mesh& mesh, const JumpDensity& density,
                                     JumpTransform kind, int n_quad) {
    if (n_quad < 2) throw std::invalid_argument("n_quad must be >= 2");
    const double lo = density.support_lo();
    const double hi = density.support_hi();
    if (!(lo > 0.0 && lo <= hi && hi < 1.0)) {
        throw std::invalid_argument("jump density support must lie inside (0, 1)");
    }

    // Quadrature nodes and weights in z, shared by every row.
    std::vector<double> z(static_cast<std::size_t>(n_quad));
    std::vector<double> wz(static_cast<std::size_t>(n_quad));
    const double dz = (hi - lo) / n_quad;
    double mass = 0.0;
    for (int k = 0; k < n_quad; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        if (density.is_point_mass()) {
            z[kk] = lo;
            wz[kk] = 1.0 / n_quad;
        } else {
            z[kk] = lo + (k + 0.5) * dz;
            wz[kk] = density(z[kk]) * dz;
        }
        if (!(wz[kk] >= 0.0)) throw std::invalid_argument("jump density must be nonnegative");
        mass += wz[kk];
    }
    if (!(mass > 0.0)) throw std::invalid_argument("jump density has no mass on its support");

    const int n_nodes = mesh.size();
    std::vector<int> row_ptr{0};
    std::vector<int> cols;
    std::vector<double> weights;
    row_ptr.reserve(static_cast<std::size_t>(n_nodes) + 1);

    std::vector<double> scratch(static_cast<std::size_t>(n_nodes), 0.0);
    std::vector<int> touched;
    for (int i = 0; i < n_nodes; ++i) {
        const double x = mesh.node(i);
        touched.clear();
        auto deposit = [&](int j, double w) {
            if (w == 0.0) return;
            auto& slot = scratch[static_cast<std::size_t>(j)];
            if (slot == 0.0) touched.push_back(j);
            slot += w;
        };
        for (int k = 0; k < n_quad; ++k) {
            const double y = std::clamp(apply_transform(kind, z[static_cast<std::size_t>(k)], x), 0.0, 1.0);
            const InterpWeights iw = interp_weights(mesh, y);
            deposit(iw.index, wz[static_cast<std::size_t>(k)] * iw.left);
            deposit(iw.index + 1, wz[static_cast<std::size_t>(k)] * iw.right);
        }
        std::sort(touched.begin(), touched.end());
        double row_sum = 0.0;
        for (int j : touched) row_sum += scratch[static_cast<std::size_t>(j)];
        for (int j : touched) {
            cols.push_back(j);
            weights.push_back(scratch[static_cast<std::size_t>(j)] / row_sum);
            scratch[static_cast<std::size_t>(j)] = 0.0;
        }
        row_ptr.push_back(static_cast<int>(cols.size()));
    }
    return JumpQuadrature(kind, n_nodes, std::move(row_ptr), std::move(cols), std::move(weights));
}

std::vector<double> apply_expectation(const JumpQuadrature& quad, std::span<const double> phi) {
    std::vector<double> out(phi.size());
    quad.apply(phi, out);
    return out;
}

NonlocalTerms apply_nonlocal(const JumpQuadrature& quad, std::span<const double> phi, double nu,
                             double psi, double theta_max) {
    if (!(psi > 0.0)) throw std::invalid_argument("ambiguity aversion psi must be > 0");
    NonlocalTerms out;
    out.delta = apply_expectation(quad, phi);
    out.values.resize(phi.size());
    out.theta_star.resize(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const double delta = phi[i] - out.delta[i];
        const double decay = std::exp(-psi * delta);
        out.delta[i] = delta;
        if (decay <= theta_max) {
            out.values[i] = (nu / psi) * (1.0 - decay);
            out.theta_star[i] = decay;
        } else {
            // Minimizer pinned at theta_max; evaluate the objective there.
            out.values[i] = nu * theta_max * delta + (nu / psi) * entropy_kernel(theta_max);
            out.theta_star[i] = theta_max;
        }
    }
    return out;
}

}  // namespace hjbi
