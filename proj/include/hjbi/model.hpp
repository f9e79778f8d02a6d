#pragma once

#include <string>
#include <utility>
#include <vector>

namespace hjbi {

/// A scalar coefficient function on a compact interval.
///
/// Coefficients are either one of a few built-in closed forms or a table of
/// (x, value) samples interpolated piecewise-linearly (and held constant
/// outside the sampled range). Tables let a config file describe arbitrary
/// shapes without code injection.
class Coefficient {
public:
    enum class Kind { Constant, Affine, Logistic, Tent, Table };

    Coefficient() = default;

    static Coefficient constant(double c);
    /// c0 + c1 * x
    static Coefficient affine(double c0, double c1);
    /// scale * x * (1 - x)
    static Coefficient logistic(double scale = 1.0);
    /// max{2x - 1, 1 - 2x}
    static Coefficient tent();
    static Coefficient table(std::vector<std::pair<double, double>> samples);

    double operator()(double x) const;

    Kind kind() const { return kind_; }
    const std::vector<double>& params() const { return params_; }
    const std::vector<std::pair<double, double>>& samples() const { return samples_; }

    static const char* kind_name(Kind kind);
    /// Builds from a preset name ("constant", "affine", "logistic", "tent", "table").
    static Coefficient from_name(const std::string& name, const std::vector<double>& params,
                                 const std::vector<std::pair<double, double>>& samples);

private:
    Kind kind_ = Kind::Constant;
    std::vector<double> params_{0.0};
    std::vector<std::pair<double, double>> samples_;
};

/// Jump-size density with compact support [lo, hi] inside (0, 1).
///
/// A uniform density with lo == hi is a point mass; it is accepted by the
/// quadrature and the sampler but has no pointwise density.
class JumpDensity {
public:
    enum class Kind { Uniform, Table };

    JumpDensity() = default;

    static JumpDensity uniform(double lo, double hi);
    /// Piecewise-linear density through (z, g) samples. The support is the
    /// sampled range; samples must be strictly increasing in z.
    static JumpDensity table(std::vector<std::pair<double, double>> samples);

    Kind kind() const { return kind_; }
    double support_lo() const { return lo_; }
    double support_hi() const { return hi_; }
    bool is_point_mass() const { return kind_ == Kind::Uniform && lo_ == hi_; }
    const std::vector<std::pair<double, double>>& samples() const { return samples_; }

    /// g(z); zero outside the support.
    double operator()(double z) const;
    /// Numerical total mass (exact for both kinds up to rounding).
    double total_mass() const;
    /// Inverse CDF for u in [0, 1].
    double quantile(double u) const;

private:
    Kind kind_ = Kind::Uniform;
    double lo_ = 0.1;
    double hi_ = 0.9;
    std::vector<std::pair<double, double>> samples_;
    std::vector<double> cdf_;  // cumulative mass at each sample (table kind)
};

/// Every coefficient and parameter of the controlled, ambiguity-distorted
/// population model. Immutable once handed to a solver.
struct ProblemSpec {
    double sigma = 1.0;
    double gamma0 = 0.0;
    double gamma1 = 0.0;
    double nu1 = 1.0;
    double nu2 = 1.0;
    double psi0 = 0.5;
    double psi1 = 0.5;
    double psi2 = 0.5;
    double lambda_max = 100.0;
    double theta_max = 100.0;
    double q_max = 1.0;
    double horizon = 50.0;

    Coefficient growth_a = Coefficient::logistic();
    Coefficient growth_rate_r = Coefficient::constant(0.0);
    Coefficient cost_h = Coefficient::constant(0.0);
    Coefficient disutility_f = Coefficient::tent();

    JumpDensity jump_density_1 = JumpDensity::uniform(0.1, 0.9);
    JumpDensity jump_density_2 = JumpDensity::uniform(0.1, 0.9);

    int q_grid_size = 2;

    /// The i-th of q_grid_size equally spaced points of [0, q_max].
    double q_point(int i) const;
};

/// Reference configuration of the numerical experiments.
///
/// sigma = 1, a = x(1 - x), nu1 = nu2 = 1, psi0 = psi1 = psi2 = 0.5, tent f,
/// T = 50, theta_max = lambda_max = 100, no migration (gamma0 = gamma1 = 0)
/// and uniform jump sizes on [0.1, 0.9].
///
/// Without control the intervention is absent (h = 0) and the growth term
/// r a(x) is switched off, so the problem is mirror symmetric about x = 0.5.
/// With control, r(q) = 1 - q and h(q) = 0.1 q on Q = [0, 1].
ProblemSpec make_paper_spec(bool with_control);

struct ValidationResult {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// Checks boundary degeneracy of a, nonnegativity of f and h on sample grids,
/// scalar sign constraints and jump-density normalization. Never throws.
ValidationResult validate_spec(const ProblemSpec& spec);

}  // namespace hjbi
