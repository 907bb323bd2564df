#include "holobf/optimizer.hpp"

#include <cmath>

#include "holobf/rng.hpp"

namespace holobf {

namespace {

using cd = std::complex<double>;

double effective_power(const PhaseMatrix& phase, const Eigen::VectorXd& w,
                       const Eigen::MatrixXcd& v) {
    Eigen::MatrixXcd wv = phase.phi * v;
    wv.array().colwise() *= w.array().cast<cd>();
    return wv.squaredNorm();
}

}  // namespace

BeamformingState initialize(const SystemConfig& config,
                            const ChannelSet& channels,
                            const PhaseMatrix& phase,
                            const OptimizerSettings& settings,
                            std::uint64_t seed) {
    config.validate();
    if (!(settings.tol > 0.0)) throw ConfigError("tol: must be > 0");
    if (settings.max_iters < 1) throw ConfigError("max_iters: must be >= 1");
    const int m_total = config.num_elements();
    const int k_total = config.num_feeds;
    const int d_total = config.num_users;

    Rng rng(seed);
    BeamformingState state;
    switch (settings.init_mode) {
        case InitMode::ones:
            state.holo_weights = Eigen::VectorXd::Ones(m_total);
            break;
        case InitMode::half:
            state.holo_weights = Eigen::VectorXd::Constant(m_total, 0.5);
            break;
        case InitMode::uniform_random:
            state.holo_weights.resize(m_total);
            for (int m = 0; m < m_total; ++m) state.holo_weights[m] = rng.uniform();
            break;
    }

    state.digital.resize(k_total, d_total);
    for (int d = 0; d < d_total; ++d)
        for (int k = 0; k < k_total; ++k) state.digital(k, d) = rng.complex_normal();
    const double power = effective_power(phase, state.holo_weights, state.digital);
    state.digital *= std::sqrt(config.power_budget / power);

    const EffectiveGains gains = compute_gains(channels, state.holo_weights, phase, state.digital);
    state.combiners = mmse_combiner(gains, config.noise_vars);
    state.mse_weights = mse_weights(mse_per_user(gains, state.combiners, config.noise_vars));
    return state;
}

std::pair<BeamformingState, RunTrace> run(const SystemConfig& config,
                                          const ChannelSet& channels,
                                          const PhaseMatrix& phase,
                                          const OptimizerSettings& settings) {
    BeamformingState state =
        initialize(config, channels, phase, settings, run_initialization_seed(config.seed));
    RunTrace trace;
    trace.iterations.reserve(settings.max_iters);

    EffectiveGains gains = compute_gains(channels, state.holo_weights, phase, state.digital);
    double prev_rate = sum_rate(gains, config.noise_vars);

    for (int t = 0; t < settings.max_iters; ++t) {
        state.combiners = mmse_combiner(gains, config.noise_vars);
        state.mse_weights =
            mse_weights(mse_per_user(gains, state.combiners, config.noise_vars));

        // The scaled digital update keeps the sweep anchored at the feasible
        // power level; without it the subsequent per-element updates see an
        // over-powered precoder and leave the weights essentially untouched.
        state.digital = update_digital(channels, phase, state.holo_weights, state.combiners,
                                       state.mse_weights, config.power_budget,
                                       settings.ridge_scale);
        gains = compute_gains(channels, state.holo_weights, phase, state.digital);
        const double wsm_digital = weighted_sum_mse(gains, state.combiners, config.noise_vars,
                                                    state.mse_weights);

        state.holo_weights = update_holo_all(channels, phase, state.digital, state.combiners,
                                             state.mse_weights, state.holo_weights);
        gains = compute_gains(channels, state.holo_weights, phase, state.digital);
        const double wsm_holo = weighted_sum_mse(gains, state.combiners, config.noise_vars,
                                                 state.mse_weights);

        // The sweep moved w, so the published iterate needs one more joint
        // rescale to sit exactly on the power budget; the factor tends to 1
        // as w settles.
        const double power = effective_power(phase, state.holo_weights, state.digital);
        if (!(power > 0.0))
            throw SingularSystemError("updates drove the transmit power to zero");
        state.digital *= std::sqrt(config.power_budget / power);
        gains = compute_gains(channels, state.holo_weights, phase, state.digital);

        IterationRecord rec;
        rec.sum_rate = sum_rate(gains, config.noise_vars);
        rec.weighted_sum_mse = wsm_holo;
        rec.weighted_sum_mse_after_digital = wsm_digital;
        rec.power_used = effective_power(phase, state.holo_weights, state.digital);
        rec.max_w = state.holo_weights.maxCoeff();
        rec.min_w = state.holo_weights.minCoeff();
        trace.iterations.push_back(rec);
        trace.iterations_run = t + 1;

        if (std::abs(rec.sum_rate - prev_rate) <= settings.tol * std::max(1.0, prev_rate)) {
            trace.converged = true;
            break;
        }
        prev_rate = rec.sum_rate;
    }

    // Final combiners/weights consistent with the returned beamformers.
    state.combiners = mmse_combiner(gains, config.noise_vars);
    state.mse_weights = mse_weights(mse_per_user(gains, state.combiners, config.noise_vars));
    return {std::move(state), std::move(trace)};
}

}  // namespace holobf
