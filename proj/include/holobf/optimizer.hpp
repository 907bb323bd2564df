#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "holobf/beamformer_updates.hpp"
#include "holobf/rng.hpp"

namespace holobf {

enum class InitMode { ones, half, uniform_random };

struct OptimizerSettings {
    double tol = 1e-4;          // relative sum-rate change threshold
    int max_iters = 100;
    double ridge_scale = 1e-8;  // passed through to the digital update
    InitMode init_mode = InitMode::ones;
};

// One row of the per-iteration evidence trail. weighted_sum_mse values are
// taken with that iteration's frozen MSE weights: after_digital right after
// the scaled digital update, the plain field after the holographic sweep;
// the sweep never undoes the digital step, so weighted_sum_mse <=
// weighted_sum_mse_after_digital holds per iteration. sum_rate and
// power_used describe the published iterate after the feasibility rescale
// that closes the iteration.
struct IterationRecord {
    double sum_rate = 0.0;
    double weighted_sum_mse = 0.0;
    double weighted_sum_mse_after_digital = 0.0;
    double power_used = 0.0;
    double max_w = 0.0;
    double min_w = 0.0;
};

struct RunTrace {
    std::vector<IterationRecord> iterations;
    int iterations_run = 0;
    bool converged = false;
};

// Seed run() hands to initialize(); exposed so callers can reconstruct the
// exact starting state of a run.
inline std::uint64_t run_initialization_seed(std::uint64_t config_seed) {
    return splitmix64(config_seed ^ 0x696E6974ull);
}

// w per init_mode; V i.i.d. complex Gaussian scaled so tr(W V V^H W^H)
// equals the power budget exactly; combiners and MSE weights derived from
// that state. Bit-reproducible for a fixed seed.
BeamformingState initialize(const SystemConfig& config,
                            const ChannelSet& channels,
                            const PhaseMatrix& phase,
                            const OptimizerSettings& settings,
                            std::uint64_t seed);

// Alternating loop: combiner -> MSE weights -> scaled digital update ->
// per-element holographic sweep, closed by the joint precoder rescale that
// puts every published iterate exactly on the power budget. Stops when
// |rate_t - rate_{t-1}| <= tol * max(1, rate_{t-1}) or after max_iters
// iterations. The init seed is derived from config.seed.
std::pair<BeamformingState, RunTrace> run(const SystemConfig& config,
                                          const ChannelSet& channels,
                                          const PhaseMatrix& phase,
                                          const OptimizerSettings& settings);

}  // namespace holobf
