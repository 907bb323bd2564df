#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <utility>

#include "holobf/optimizer.hpp"

namespace holobf {

// Worst case found by an oracle comparison pass.
struct OracleReport {
    double max_abs_discrepancy = 0.0;
    std::string location;  // e.g. "m=13" or "d=2"
    long samples_checked = 0;
};

// JSON object in the same dialect as the experiment summary files.
std::string oracle_report_json(const OracleReport& report);

// Everything needed to evaluate the weighted sum-MSE objective standalone.
// Owns copies so oracles can perturb freely.
struct ObjectiveContext {
    Eigen::MatrixXcd channels;      // M x D
    Eigen::MatrixXcd phi;           // M x K
    Eigen::MatrixXcd digital;       // K x D
    Eigen::VectorXd holo_weights;   // M
    Eigen::VectorXcd combiners;     // D
    Eigen::VectorXd mse_weights;    // D
    Eigen::VectorXd noise_vars;     // D
};

ObjectiveContext make_context(const ChannelSet& channels, const PhaseMatrix& phase,
                              const BeamformingState& state,
                              const Eigen::VectorXd& noise_vars);

// Weighted sum-MSE evaluated with plain accumulation loops, sharing no code
// with the closed-form update paths it is used to check.
double direct_weighted_sum_mse(const ObjectiveContext& ctx);

// Benchmark: holographic weights drawn i.i.d. uniform on [0, 1] and frozen;
// the digital precoder optimized by the combiner/weight/digital loop until
// its sum rate stabilizes. Returns the final state and its sum rate.
std::pair<BeamformingState, double> random_w_baseline(const SystemConfig& config,
                                                      const ChannelSet& channels,
                                                      const PhaseMatrix& phase,
                                                      std::uint64_t seed);

// Brute-force argmin of the true objective over w_m in {0, step, 2 step, ..., 1}
// with every other variable frozen. step must lie in (0, 0.1].
double grid_oracle_w(const ObjectiveContext& ctx, int m_index, double step);

// Empirical (mean, standard error) of |conj(f) y - s|^2 over num_samples
// draws of unit-power circular Gaussian symbols and CN(0, noise_var) noise,
// where y = gains_row . s + n and s = symbols[desired_index].
// num_samples must be at least 10^4.
std::pair<double, double> mc_mse_oracle(const Eigen::VectorXcd& gains_row,
                                        int desired_index,
                                        std::complex<double> combiner,
                                        double noise_var,
                                        long num_samples,
                                        std::uint64_t seed);

enum class FdVariable { combiner, digital, holo_weight };

// Central-difference gradient of the weighted sum-MSE. step must lie in
// (0, 1e-3]. Selected parameters:
//   combiner    -> (d/dRe f_index, d/dIm f_index), length 2
//   digital     -> Re/Im of every entry of V, length 2*K*D (index ignored)
//   holo_weight -> d/dw_index, length 1
Eigen::VectorXd fd_gradient_oracle(const ObjectiveContext& ctx, FdVariable variable,
                                   int index, double step);

}  // namespace holobf
