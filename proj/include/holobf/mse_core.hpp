#pragma once

#include <Eigen/Dense>

#include "holobf/geometry_channel.hpp"

namespace holobf {

// Full beamforming state of one instance.
//
// Conventions used throughout the library:
//   W = diag(w) * Phi                      (M x K analog stage)
//   g(d, l) = h_d^H * W * v_l              (effective gain, user d, stream l)
//   shat_d  = conj(f_d) * y_d              (baseband combining)
//   MSE_d   = |f_d|^2 (sum_l |g(d,l)|^2 + sigma_d^2)
//             - 2 Re(conj(f_d) g(d,d)) + 1
struct BeamformingState {
    Eigen::MatrixXcd digital;      // V, K x D, column d = v_d
    Eigen::VectorXd holo_weights;  // w, length M, each in [0, 1]
    Eigen::VectorXcd combiners;    // f, length D
    Eigen::VectorXd mse_weights;   // m, length D, strictly positive
};

// g(d, l) = h_d^H W v_l; row = user, column = stream.
struct EffectiveGains {
    Eigen::MatrixXcd g;  // D x D
};

// diag(w) * Phi.
Eigen::MatrixXcd effective_matrix(const Eigen::VectorXd& holo_weights,
                                  const PhaseMatrix& phase);

EffectiveGains compute_gains(const ChannelSet& channels,
                             const Eigen::VectorXd& holo_weights,
                             const PhaseMatrix& phase,
                             const Eigen::MatrixXcd& digital);

// Per-user scalar minimizing MSE_d: f_d = g(d,d) / (sum_l |g(d,l)|^2 + sigma_d^2).
Eigen::VectorXcd mmse_combiner(const EffectiveGains& gains,
                               const Eigen::VectorXd& noise_vars);

Eigen::VectorXd mse_per_user(const EffectiveGains& gains,
                             const Eigen::VectorXcd& combiners,
                             const Eigen::VectorXd& noise_vars);

// Rate/MSE weight rule: m_d = 1 / (MSE_d * ln 2). Rejects nonpositive MSEs.
Eigen::VectorXd mse_weights(const Eigen::VectorXd& mse);

// sum_d log2(1 + |g(d,d)|^2 / (sum_{l != d} |g(d,l)|^2 + sigma_d^2)).
double sum_rate(const EffectiveGains& gains, const Eigen::VectorXd& noise_vars);

// sum_d m_d * MSE_d for the given combiners.
double weighted_sum_mse(const EffectiveGains& gains,
                        const Eigen::VectorXcd& combiners,
                        const Eigen::VectorXd& noise_vars,
                        const Eigen::VectorXd& weights);

}  // namespace holobf
