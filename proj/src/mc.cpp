#include "hjbi/mc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "hjbi/nonlocal.hpp"

namespace hjbi {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

struct PathOutcome {
    double cost = 0.0;
    int down_jumps = 0;
    int up_jumps = 0;
    double min_state = 1.0;
    double max_state = 0.0;
};

double lerp_at(const std::vector<double>& v, const InterpWeights& w) {
    const auto i = static_cast<std::size_t>(w.index);
    return w.left * v[i] + w.right * v[i + 1];
}

class PathSimulator {
public:
    PathSimulator(const ProblemSpec& spec, const ControlSchedule& controls, const SimConfig& cfg)
        : spec_(spec), controls_(controls), cfg_(cfg) {
        n_steps_ = static_cast<long>(std::ceil((spec.horizon - cfg.start_t) / cfg.dt_sim - 1e-9));
        rate_down_ = spec.nu1 * spec.theta_max;
        rate_up_ = spec.nu2 * spec.theta_max;
    }

    PathOutcome run(long path) const {
        Rng rng(path_seed(cfg_.master_seed, static_cast<std::uint64_t>(path)));
        std::normal_distribution<double> normal(0.0, 1.0);
        std::uniform_real_distribution<double> uniform(0.0, 1.0);
        auto next_candidate = [&](double from, double rate) {
            if (!(rate > 0.0)) return std::numeric_limits<double>::infinity();
            return from + std::exponential_distribution<double>(rate)(rng);
        };

        PathOutcome out;
        double x = cfg_.start_x;
        double t = cfg_.start_t;
        out.min_state = out.max_state = x;
        double next_down = next_candidate(t, rate_down_);
        double next_up = next_candidate(t, rate_up_);

        for (long k = 0; k < n_steps_; ++k) {
            const double t_end = (k + 1 == n_steps_) ? spec_.horizon : cfg_.start_t + static_cast<double>(k + 1) * cfg_.dt_sim;
            while (t < t_end) {
                const double t_stop = std::min({t_end, next_down, next_up});
                const double tau = t_stop - t;
                const ControlSample c = controls_.at(t, x);
                out.cost += running_cost(x, c) * tau;

                const double a = spec_.growth_a(x);
                const double drift = a * spec_.growth_rate_r(c.q) + spec_.sigma * c.lambda * a + spec_.gamma1 -
                                     (spec_.gamma0 + spec_.gamma1) * x;
                x += drift * tau + spec_.sigma * a * std::sqrt(tau) * normal(rng);
                x = std::clamp(x, 0.0, 1.0);
                t = t_stop;

                if (t_stop == next_down) {
                    const ControlSample pre = controls_.at(t, x);
                    if (uniform(rng) * spec_.theta_max < pre.theta1) {
                        x = (1.0 - sample_jump_size(spec_.jump_density_1, rng)) * x;
                        ++out.down_jumps;
                    }
                    next_down = next_candidate(t, rate_down_);
                } else if (t_stop == next_up) {
                    const ControlSample pre = controls_.at(t, x);
                    if (uniform(rng) * spec_.theta_max < pre.theta2) {
                        const double z = sample_jump_size(spec_.jump_density_2, rng);
                        x = z + (1.0 - z) * x;
                        ++out.up_jumps;
                    }
                    next_up = next_candidate(t, rate_up_);
                }
                x = std::clamp(x, 0.0, 1.0);
                out.min_state = std::min(out.min_state, x);
                out.max_state = std::max(out.max_state, x);
            }
        }
        return out;
    }

private:
    double running_cost(double x, const ControlSample& c) const {
        double cost = spec_.disutility_f(x) + spec_.cost_h(c.q);
        if (cfg_.include_penalties) {
            cost -= c.lambda * c.lambda / (2.0 * spec_.psi0) + (spec_.nu1 / spec_.psi1) * entropy_kernel(c.theta1) +
                    (spec_.nu2 / spec_.psi2) * entropy_kernel(c.theta2);
        }
        return cost;
    }

    const ProblemSpec& spec_;
    const ControlSchedule& controls_;
    const SimConfig& cfg_;
    long n_steps_ = 0;
    double rate_down_ = 0.0;
    double rate_up_ = 0.0;
};

}  // namespace

std::uint64_t path_seed(std::uint64_t master_seed, std::uint64_t path) {
    return splitmix64(splitmix64(master_seed) ^ (path * 0xD1B54A32D192ED03ULL));
}

ControlSchedule::ControlSchedule(Mesh mesh, double dt, std::vector<ControlField> slices)
    : mesh_(std::move(mesh)), dt_(dt), slices_(std::move(slices)) {
    if (slices_.empty()) throw std::invalid_argument("control schedule needs at least one slice");
    if (!(dt_ > 0.0)) throw std::invalid_argument("control schedule needs dt > 0");
    std::sort(slices_.begin(), slices_.end(),
              [](const ControlField& a, const ControlField& b) { return a.time < b.time; });
    for (const auto& s : slices_) {
        if (s.size() != static_cast<std::size_t>(mesh_.size())) {
            throw std::invalid_argument("control slice is not on the schedule mesh");
        }
    }
    for (std::size_t k = 1; k < slices_.size(); ++k) {
        if (std::abs(slices_[k].time - slices_[k - 1].time - dt_) > 1e-9 * std::max(1.0, slices_[k].time)) {
            throw std::invalid_argument("control slices must be spaced by dt");
        }
    }
}

ControlSchedule ControlSchedule::constant(const Mesh& mesh, double horizon, const ControlSample& c) {
    ControlField field(mesh.size(), 0.0);
    std::fill(field.q_star.begin(), field.q_star.end(), c.q);
    std::fill(field.lambda_star.begin(), field.lambda_star.end(), c.lambda);
    std::fill(field.theta1_star.begin(), field.theta1_star.end(), c.theta1);
    std::fill(field.theta2_star.begin(), field.theta2_star.end(), c.theta2);
    return ControlSchedule(mesh, horizon, {std::move(field)});
}

ControlSample ControlSchedule::at(double t, double x) const {
    const double offset = (t - slices_.front().time) / dt_;
    auto n = static_cast<long>(std::floor(offset + 1e-9));
    n = std::clamp(n, 0L, static_cast<long>(slices_.size()) - 1);
    const ControlField& s = slices_[static_cast<std::size_t>(n)];
    const InterpWeights w = interp_weights(mesh_, std::clamp(x, 0.0, 1.0));
    return {lerp_at(s.q_star, w), lerp_at(s.lambda_star, w), lerp_at(s.theta1_star, w),
            lerp_at(s.theta2_star, w)};
}

double sample_jump_size(const JumpDensity& density, Rng& rng) {
    if (density.is_point_mass()) return density.support_lo();
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    return density.quantile(uniform(rng));
}

double pairwise_sum(const double* data, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += data[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

SimulationReport simulate(const ProblemSpec& spec, const ControlSchedule& controls, const SimConfig& cfg) {
    if (!(cfg.dt_sim > 0.0)) throw std::invalid_argument("dt_sim must be > 0");
    if (cfg.n_paths < 1) throw std::invalid_argument("n_paths must be >= 1");
    if (!(cfg.start_x >= 0.0 && cfg.start_x <= 1.0)) throw std::invalid_argument("start_x must lie in [0, 1]");
    if (!(cfg.start_t >= 0.0 && cfg.start_t < spec.horizon)) {
        throw std::invalid_argument("start_t must lie in [0, T)");
    }
    const double slack = 1e-9 * std::max(1.0, spec.horizon);
    if (controls.start_time() > cfg.start_t + slack || controls.end_time() < spec.horizon - slack) {
        throw std::invalid_argument("control schedule does not cover [start_t, T]");
    }

    const PathSimulator sim(spec, controls, cfg);
    const auto n = static_cast<std::size_t>(cfg.n_paths);
    std::vector<PathOutcome> outcomes(n);

    unsigned threads = cfg.n_threads > 0 ? static_cast<unsigned>(cfg.n_threads) : std::thread::hardware_concurrency();
    threads = std::clamp(threads, 1U, static_cast<unsigned>(std::min<std::size_t>(n, 256)));
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) outcomes[p] = sim.run(static_cast<long>(p));
    };
    if (threads == 1) {
        work(0, n);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (n + threads - 1) / threads;
        for (unsigned k = 0; k < threads; ++k) {
            const std::size_t b = k * chunk;
            const std::size_t e = std::min(n, b + chunk);
            if (b < e) pool.emplace_back(work, b, e);
        }
        for (auto& th : pool) th.join();
    }

    std::vector<double> buf(n);
    for (std::size_t p = 0; p < n; ++p) buf[p] = outcomes[p].cost;
    const double mean = pairwise_sum(buf.data(), n) / static_cast<double>(n);
    for (std::size_t p = 0; p < n; ++p) buf[p] = (outcomes[p].cost - mean) * (outcomes[p].cost - mean);
    const double var = n > 1 ? pairwise_sum(buf.data(), n) / static_cast<double>(n - 1) : 0.0;

    SimulationReport report;
    report.value = {mean, std::sqrt(var / static_cast<double>(n)), cfg.n_paths};
    for (std::size_t p = 0; p < n; ++p) buf[p] = outcomes[p].down_jumps;
    report.mean_down_jumps = pairwise_sum(buf.data(), n) / static_cast<double>(n);
    for (std::size_t p = 0; p < n; ++p) buf[p] = outcomes[p].up_jumps;
    report.mean_up_jumps = pairwise_sum(buf.data(), n) / static_cast<double>(n);
    for (const auto& o : outcomes) {
        report.min_state = std::min(report.min_state, o.min_state);
        report.max_state = std::max(report.max_state, o.max_state);
    }
    return report;
}

ValueEstimate simulate_value(const ProblemSpec& spec, const ControlSchedule& controls, const SimConfig& cfg) {
    return simulate(spec, controls, cfg).value;
}

}  // namespace hjbi
