#include "holobf/baselines_oracles.hpp"

#include <cmath>
#include <json.hpp>
#include <limits>

#include "holobf/rng.hpp"

namespace holobf {

namespace {

using cd = std::complex<double>;

// Weighted sum-MSE from a gains matrix laid out like EffectiveGains, written
// without mse_core so the oracles stay an independent route.
double wsm_from_gains(const Eigen::MatrixXcd& g, const Eigen::VectorXcd& f,
                      const Eigen::VectorXd& noise_vars, const Eigen::VectorXd& weights) {
    double total = 0.0;
    for (Eigen::Index d = 0; d < g.rows(); ++d) {
        double row_power = noise_vars[d];
        for (Eigen::Index l = 0; l < g.cols(); ++l) row_power += std::norm(g(d, l));
        const double mse = std::norm(f[d]) * row_power -
                           2.0 * std::real(std::conj(f[d]) * g(d, d)) + 1.0;
        total += weights[d] * mse;
    }
    return total;
}

Eigen::MatrixXcd gains_by_accumulation(const ObjectiveContext& ctx) {
    const Eigen::Index d_total = ctx.channels.cols();
    const Eigen::Index k_total = ctx.phi.cols();
    const Eigen::Index m_total = ctx.phi.rows();
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(d_total, d_total);
    for (Eigen::Index d = 0; d < d_total; ++d) {
        for (Eigen::Index l = 0; l < d_total; ++l) {
            cd acc{0.0, 0.0};
            for (Eigen::Index m = 0; m < m_total; ++m) {
                cd row{0.0, 0.0};
                for (Eigen::Index k = 0; k < k_total; ++k)
                    row += ctx.phi(m, k) * ctx.digital(k, l);
                acc += std::conj(ctx.channels(m, d)) * ctx.holo_weights[m] * row;
            }
            g(d, l) = acc;
        }
    }
    return g;
}

}  // namespace

std::string oracle_report_json(const OracleReport& report) {
    nlohmann::json doc{{"max_abs_discrepancy", report.max_abs_discrepancy},
                       {"location", report.location},
                       {"samples_checked", report.samples_checked}};
    return doc.dump(2);
}

ObjectiveContext make_context(const ChannelSet& channels, const PhaseMatrix& phase,
                              const BeamformingState& state,
                              const Eigen::VectorXd& noise_vars) {
    return ObjectiveContext{channels.channels, phase.phi,     state.digital,
                            state.holo_weights, state.combiners, state.mse_weights,
                            noise_vars};
}

double direct_weighted_sum_mse(const ObjectiveContext& ctx) {
    return wsm_from_gains(gains_by_accumulation(ctx), ctx.combiners, ctx.noise_vars,
                          ctx.mse_weights);
}

std::pair<BeamformingState, double> random_w_baseline(const SystemConfig& config,
                                                      const ChannelSet& channels,
                                                      const PhaseMatrix& phase,
                                                      std::uint64_t seed) {
    config.validate();
    const int m_total = config.num_elements();
    Rng rng(seed);

    BeamformingState state;
    state.holo_weights.resize(m_total);
    for (int m = 0; m < m_total; ++m) state.holo_weights[m] = rng.uniform();

    state.digital.resize(config.num_feeds, config.num_users);
    for (int d = 0; d < config.num_users; ++d)
        for (int k = 0; k < config.num_feeds; ++k) state.digital(k, d) = rng.complex_normal();
    {
        Eigen::MatrixXcd wv = phase.phi * state.digital;
        wv.array().colwise() *= state.holo_weights.array().cast<cd>();
        state.digital *= std::sqrt(config.power_budget / wv.squaredNorm());
    }

    constexpr double tol = 1e-4;
    constexpr int max_iters = 100;
    EffectiveGains gains = compute_gains(channels, state.holo_weights, phase, state.digital);
    double rate = sum_rate(gains, config.noise_vars);
    for (int t = 0; t < max_iters; ++t) {
        state.combiners = mmse_combiner(gains, config.noise_vars);
        state.mse_weights =
            mse_weights(mse_per_user(gains, state.combiners, config.noise_vars));
        // No signal reaches any user: the digital objective is flat, stop.
        if (state.combiners.cwiseAbs().maxCoeff() == 0.0) break;
        state.digital = update_digital(channels, phase, state.holo_weights, state.combiners,
                                       state.mse_weights, config.power_budget);
        gains = compute_gains(channels, state.holo_weights, phase, state.digital);
        const double new_rate = sum_rate(gains, config.noise_vars);
        const bool done = std::abs(new_rate - rate) <= tol * std::max(1.0, rate);
        rate = new_rate;
        if (done) break;
    }
    state.combiners = mmse_combiner(gains, config.noise_vars);
    state.mse_weights = mse_weights(mse_per_user(gains, state.combiners, config.noise_vars));
    return {std::move(state), rate};
}

double grid_oracle_w(const ObjectiveContext& ctx, int m_index, double step) {
    if (!(step > 0.0) || step > 0.1) throw ConfigError("step: must lie in (0, 0.1]");
    if (m_index < 0 || m_index >= ctx.phi.rows()) throw ConfigError("m_index: out of range");
    const Eigen::Index d_total = ctx.channels.cols();
    const Eigen::Index m_total = ctx.phi.rows();

    // Phi V does not depend on w; the m-sum below is redone in full for
    // every candidate value.
    const Eigen::MatrixXcd t = ctx.phi * ctx.digital;  // M x D
    Eigen::MatrixXcd g(d_total, d_total);

    double best_value = 0.0;
    double best_objective = std::numeric_limits<double>::infinity();
    const long num_steps = static_cast<long>(std::floor(1.0 / step));
    for (long i = 0; i <= num_steps + 1; ++i) {
        const double candidate = (i <= num_steps) ? i * step : 1.0;
        if (candidate > 1.0) break;
        if (i == num_steps + 1 && candidate <= num_steps * step) break;  // 1.0 already on grid

        for (Eigen::Index d = 0; d < d_total; ++d) {
            for (Eigen::Index l = 0; l < d_total; ++l) {
                cd acc{0.0, 0.0};
                for (Eigen::Index m = 0; m < m_total; ++m) {
                    const double wm = (m == m_index) ? candidate : ctx.holo_weights[m];
                    acc += std::conj(ctx.channels(m, d)) * wm * t(m, l);
                }
                g(d, l) = acc;
            }
        }
        const double objective = wsm_from_gains(g, ctx.combiners, ctx.noise_vars, ctx.mse_weights);
        if (objective < best_objective) {
            best_objective = objective;
            best_value = candidate;
        }
    }
    return best_value;
}

std::pair<double, double> mc_mse_oracle(const Eigen::VectorXcd& gains_row,
                                        int desired_index,
                                        std::complex<double> combiner,
                                        double noise_var,
                                        long num_samples,
                                        std::uint64_t seed) {
    if (num_samples < 10000) throw ConfigError("num_samples: need at least 10^4");
    if (desired_index < 0 || desired_index >= gains_row.size())
        throw ConfigError("desired_index: out of range");
    if (!(noise_var > 0.0)) throw ConfigError("noise_var: must be > 0");

    Rng rng(seed);
    const double noise_amp = std::sqrt(noise_var);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (long n = 0; n < num_samples; ++n) {
        cd y{0.0, 0.0};
        cd desired{0.0, 0.0};
        for (Eigen::Index k = 0; k < gains_row.size(); ++k) {
            const cd s = rng.complex_normal();
            if (k == desired_index) desired = s;
            y += gains_row[k] * s;
        }
        y += noise_amp * rng.complex_normal();
        const double err = std::norm(std::conj(combiner) * y - desired);
        sum += err;
        sum_sq += err * err;
    }
    const double mean = sum / static_cast<double>(num_samples);
    const double var = std::max(0.0, sum_sq / static_cast<double>(num_samples) - mean * mean);
    const double std_err = std::sqrt(var / static_cast<double>(num_samples));
    return {mean, std_err};
}

Eigen::VectorXd fd_gradient_oracle(const ObjectiveContext& ctx, FdVariable variable,
                                   int index, double step) {
    if (!(step > 0.0) || step > 1e-3) throw ConfigError("step: must lie in (0, 1e-3]");
    ObjectiveContext probe = ctx;

    const auto central = [&](auto&& set_param, double base) {
        set_param(base + step);
        const double hi = direct_weighted_sum_mse(probe);
        set_param(base - step);
        const double lo = direct_weighted_sum_mse(probe);
        set_param(base);
        return (hi - lo) / (2.0 * step);
    };

    switch (variable) {
        case FdVariable::combiner: {
            if (index < 0 || index >= ctx.combiners.size())
                throw ConfigError("index: combiner index out of range");
            Eigen::VectorXd grad(2);
            const cd f = ctx.combiners[index];
            grad[0] = central(
                [&](double x) { probe.combiners[index] = cd(x, f.imag()); }, f.real());
            grad[1] = central(
                [&](double x) { probe.combiners[index] = cd(f.real(), x); }, f.imag());
            return grad;
        }
        case FdVariable::digital: {
            const Eigen::Index k_total = ctx.digital.rows();
            const Eigen::Index d_total = ctx.digital.cols();
            Eigen::VectorXd grad(2 * k_total * d_total);
            Eigen::Index pos = 0;
            for (Eigen::Index d = 0; d < d_total; ++d) {
                for (Eigen::Index k = 0; k < k_total; ++k) {
                    const cd v = ctx.digital(k, d);
                    grad[pos++] = central(
                        [&](double x) { probe.digital(k, d) = cd(x, v.imag()); }, v.real());
                    grad[pos++] = central(
                        [&](double x) { probe.digital(k, d) = cd(v.real(), x); }, v.imag());
                }
            }
            return grad;
        }
        case FdVariable::holo_weight: {
            if (index < 0 || index >= ctx.holo_weights.size())
                throw ConfigError("index: holo weight index out of range");
            Eigen::VectorXd grad(1);
            grad[0] = central([&](double x) { probe.holo_weights[index] = x; },
                              ctx.holo_weights[index]);
            return grad;
        }
    }
    throw ConfigError("variable: unknown selector");
}

}  // namespace holobf
