#include "hjbi/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hjbi {

namespace {

double interpolate_table(const std::vector<std::pair<double, double>>& samples, double x) {
    if (x <= samples.front().first) return samples.front().second;
    if (x >= samples.back().first) return samples.back().second;
    auto it = std::upper_bound(samples.begin(), samples.end(), x,
                               [](double v, const auto& s) { return v < s.first; });
    const auto& [x1, y1] = *it;
    const auto& [x0, y0] = *(it - 1);
    const double w = (x - x0) / (x1 - x0);
    return (1.0 - w) * y0 + w * y1;
}

void require_increasing(const std::vector<std::pair<double, double>>& samples, const char* what) {
    if (samples.size() < 2) {
        throw std::invalid_argument(std::string(what) + ": table needs at least two samples");
    }
    for (std::size_t i = 1; i < samples.size(); ++i) {
        if (!(samples[i].first > samples[i - 1].first)) {
            throw std::invalid_argument(std::string(what) +
                                        ": table abscissae must be strictly increasing");
        }
    }
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

Coefficient Coefficient::constant(double c) {
    Coefficient out;
    out.kind_ = Kind::Constant;
    out.params_ = {c};
    return out;
}

Coefficient Coefficient::affine(double c0, double c1) {
    Coefficient out;
    out.kind_ = Kind::Affine;
    out.params_ = {c0, c1};
    return out;
}

Coefficient Coefficient::logistic(double scale) {
    Coefficient out;
    out.kind_ = Kind::Logistic;
    out.params_ = {scale};
    return out;
}

Coefficient Coefficient::tent() {
    Coefficient out;
    out.kind_ = Kind::Tent;
    out.params_.clear();
    return out;
}

Coefficient Coefficient::table(std::vector<std::pair<double, double>> samples) {
    require_increasing(samples, "coefficient");
    Coefficient out;
    out.kind_ = Kind::Table;
    out.params_.clear();
    out.samples_ = std::move(samples);
    return out;
}

double Coefficient::operator()(double x) const {
    switch (kind_) {
    case Kind::Constant: return params_[0];
    case Kind::Affine: return params_[0] + params_[1] * x;
    case Kind::Logistic: return params_[0] * x * (1.0 - x);
    case Kind::Tent: return std::max(2.0 * x - 1.0, 1.0 - 2.0 * x);
    case Kind::Table: return interpolate_table(samples_, x);
    }
    return 0.0;
}

const char* Coefficient::kind_name(Kind kind) {
    switch (kind) {
    case Kind::Constant: return "constant";
    case Kind::Affine: return "affine";
    case Kind::Logistic: return "logistic";
    case Kind::Tent: return "tent";
    case Kind::Table: return "table";
    }
    return "?";
}

Coefficient Coefficient::from_name(const std::string& name, const std::vector<double>& params,
                                   const std::vector<std::pair<double, double>>& samples) {
    auto need = [&](std::size_t n) {
        if (params.size() != n) {
            throw std::invalid_argument("coefficient preset '" + name + "' expects " +
                                        std::to_string(n) + " params, got " +
                                        std::to_string(params.size()));
        }
    };
    if (name == "constant") { need(1); return constant(params[0]); }
    if (name == "affine") { need(2); return affine(params[0], params[1]); }
    if (name == "logistic") {
        if (params.empty()) return logistic();
        need(1);
        return logistic(params[0]);
    }
    if (name == "tent") { need(0); return tent(); }
    if (name == "table") return table(samples);
    throw std::invalid_argument("unknown coefficient preset '" + name + "'");
}

JumpDensity JumpDensity::uniform(double lo, double hi) {
    if (!(lo > 0.0 && lo <= hi && hi < 1.0)) {
        throw std::invalid_argument("jump density support must satisfy 0 < lo <= hi < 1, got [" +
                                    fmt(lo) + ", " + fmt(hi) + "]");
    }
    JumpDensity out;
    out.kind_ = Kind::Uniform;
    out.lo_ = lo;
    out.hi_ = hi;
    return out;
}

JumpDensity JumpDensity::table(std::vector<std::pair<double, double>> samples) {
    require_increasing(samples, "jump density");
    const double lo = samples.front().first;
    const double hi = samples.back().first;
    if (!(lo > 0.0 && hi < 1.0)) {
        throw std::invalid_argument("jump density support must lie inside (0, 1)");
    }
    for (const auto& [z, g] : samples) {
        if (g < 0.0) throw std::invalid_argument("jump density must be nonnegative");
    }
    JumpDensity out;
    out.kind_ = Kind::Table;
    out.lo_ = lo;
    out.hi_ = hi;
    out.samples_ = std::move(samples);
    out.cdf_.assign(out.samples_.size(), 0.0);
    for (std::size_t i = 1; i < out.samples_.size(); ++i) {
        const auto& [z0, g0] = out.samples_[i - 1];
        const auto& [z1, g1] = out.samples_[i];
        out.cdf_[i] = out.cdf_[i - 1] + 0.5 * (g0 + g1) * (z1 - z0);
    }
    return out;
}

double JumpDensity::operator()(double z) const {
    if (z < lo_ || z > hi_) return 0.0;
    if (kind_ == Kind::Uniform) return lo_ == hi_ ? 0.0 : 1.0 / (hi_ - lo_);
    return interpolate_table(samples_, z);
}

double JumpDensity::total_mass() const {
    if (kind_ == Kind::Uniform) return 1.0;
    return cdf_.back();
}

double JumpDensity::quantile(double u) const {
    u = std::clamp(u, 0.0, 1.0);
    if (kind_ == Kind::Uniform) return lo_ + u * (hi_ - lo_);

    // Invert the piecewise-quadratic CDF of the piecewise-linear density.
    const double target = u * cdf_.back();
    auto it = std::lower_bound(cdf_.begin() + 1, cdf_.end(), target);
    if (it == cdf_.end()) return hi_;
    const std::size_t k = static_cast<std::size_t>(it - cdf_.begin());
    const auto& [z0, g0] = samples_[k - 1];
    const auto& [z1, g1] = samples_[k];
    const double width = z1 - z0;
    const double slope = (g1 - g0) / width;
    const double mass = target - cdf_[k - 1];
    if (!(mass > 0.0)) return z0;
    double t;
    if (std::abs(slope) * width < 1e-12 * std::max(g0, 1e-300)) {
        t = g0 > 0.0 ? mass / g0 : 0.0;
    } else {
        // g0 t + slope t^2 / 2 = mass, stable root.
        const double disc = std::max(g0 * g0 + 2.0 * slope * mass, 0.0);
        t = 2.0 * mass / (g0 + std::sqrt(disc));
    }
    return std::clamp(z0 + t, z0, z1);
}

double ProblemSpec::q_point(int i) const {
    if (q_grid_size <= 1) return 0.0;
    if (i == q_grid_size - 1) return q_max;
    return q_max * static_cast<double>(i) / static_cast<double>(q_grid_size - 1);
}

ProblemSpec make_paper_spec(bool with_control) {
    ProblemSpec spec;
    spec.sigma = 1.0;
    spec.growth_a = Coefficient::logistic();
    spec.nu1 = spec.nu2 = 1.0;
    spec.psi0 = 0.5;
    spec.psi1 = spec.psi2 = 0.5;
    spec.disutility_f = Coefficient::tent();
    spec.horizon = 50.0;
    spec.theta_max = spec.lambda_max = 100.0;
    spec.gamma0 = spec.gamma1 = 0.0;
    spec.jump_density_1 = JumpDensity::uniform(0.1, 0.9);
    spec.jump_density_2 = JumpDensity::uniform(0.1, 0.9);
    spec.q_max = 1.0;
    spec.q_grid_size = 2;
    if (with_control) {
        spec.growth_rate_r = Coefficient::affine(1.0, -1.0);
        spec.cost_h = Coefficient::affine(0.0, 0.1);
    } else {
        spec.growth_rate_r = Coefficient::constant(0.0);
        spec.cost_h = Coefficient::constant(0.0);
    }
    return spec;
}

ValidationResult validate_spec(const ProblemSpec& spec) {
    ValidationResult out;
    auto& v = out.violations;

    auto positive = [&](double value, const char* name) {
        if (!(value > 0.0)) v.push_back(std::string(name) + " must be > 0 (got " + fmt(value) + ")");
    };
    auto nonnegative = [&](double value, const char* name) {
        if (!(value >= 0.0)) v.push_back(std::string(name) + " must be >= 0 (got " + fmt(value) + ")");
    };

    nonnegative(spec.sigma, "sigma");
    nonnegative(spec.gamma0, "gamma0");
    nonnegative(spec.gamma1, "gamma1");
    nonnegative(spec.nu1, "nu1");
    nonnegative(spec.nu2, "nu2");
    positive(spec.psi0, "psi0");
    positive(spec.psi1, "psi1");
    positive(spec.psi2, "psi2");
    positive(spec.lambda_max, "lambda_max");
    positive(spec.theta_max, "theta_max");
    positive(spec.q_max, "q_max");
    positive(spec.horizon, "horizon");
    if (spec.q_grid_size < 2) {
        v.push_back("q_grid_size must be >= 2 (got " + std::to_string(spec.q_grid_size) + ")");
    }

    // Degenerate growth at the boundary keeps the population inside [0, 1].
    constexpr double kBoundaryTol = 1e-14;
    const double a0 = spec.growth_a(0.0);
    const double a1 = spec.growth_a(1.0);
    if (std::abs(a0) > kBoundaryTol) v.push_back("growth_a(0) must be 0 (got " + fmt(a0) + ")");
    if (std::abs(a1) > kBoundaryTol) v.push_back("growth_a(1) must be 0 (got " + fmt(a1) + ")");

    constexpr int kSamples = 1000;
    for (int i = 1; i < kSamples; ++i) {
        const double x = static_cast<double>(i) / kSamples;
        if (!(spec.growth_a(x) > 0.0)) {
            v.push_back("growth_a must be > 0 inside (0, 1) (fails at x = " + fmt(x) + ")");
            break;
        }
    }
    for (int i = 0; i <= kSamples; ++i) {
        const double x = static_cast<double>(i) / kSamples;
        if (!(spec.disutility_f(x) >= 0.0)) {
            v.push_back("disutility_f must be >= 0 (fails at x = " + fmt(x) + ")");
            break;
        }
    }
    if (spec.q_max > 0.0) {
        for (int i = 0; i <= kSamples; ++i) {
            const double q = spec.q_max * static_cast<double>(i) / kSamples;
            if (!(spec.cost_h(q) >= 0.0)) {
                v.push_back("cost_h must be >= 0 (fails at q = " + fmt(q) + ")");
                break;
            }
        }
    }

    auto check_density = [&](const JumpDensity& g, const char* name) {
        if (!(g.support_lo() > 0.0 && g.support_lo() <= g.support_hi() && g.support_hi() < 1.0)) {
            v.push_back(std::string(name) + " support must satisfy 0 < lo <= hi < 1");
        }
        if (!g.is_point_mass() && std::abs(g.total_mass() - 1.0) > 1e-10) {
            v.push_back(std::string(name) + " must integrate to 1 (got " + fmt(g.total_mass()) + ")");
        }
    };
    check_density(spec.jump_density_1, "jump_density_1");
    check_density(spec.jump_density_2, "jump_density_2");
    return out;
}

}  // namespace hjbi
