#pragma once

#include <Eigen/Dense>

#include "holobf/mse_core.hpp"

namespace holobf {

// Coefficients of the weighted sum-MSE restricted to one holographic weight:
// J(w_m) = a_m w_m^2 - 2 b_m w_m + const, with a_m >= 0 always.
struct ElementQuadratic {
    double a = 0.0;
    double b = 0.0;
};

// Bulk form over all M elements.
struct QuadraticCoeffs {
    Eigen::VectorXd a;
    Eigen::VectorXd b;
};

// Ridge-regularized normal-equations solve for all digital columns:
//   (A + delta I) v_d = m_d f_d W^H h_d,  A = sum_k m_k |f_k|^2 W^H h_k h_k^H W,
// delta = ridge_scale * tr(A) / K. No power scaling applied.
// Throws SingularSystemError when the regularized system has condition
// estimate above 1e14 (in particular when A vanishes entirely).
Eigen::MatrixXcd update_digital_unscaled(const ChannelSet& channels,
                                         const PhaseMatrix& phase,
                                         const Eigen::VectorXd& holo_weights,
                                         const Eigen::VectorXcd& combiners,
                                         const Eigen::VectorXd& weights,
                                         double ridge_scale = 1e-8);

// Unscaled solve followed by the joint rescale of all columns so that
// tr(W V V^H W^H) = power_budget exactly. Column directions are unchanged.
Eigen::MatrixXcd update_digital(const ChannelSet& channels,
                                const PhaseMatrix& phase,
                                const Eigen::VectorXd& holo_weights,
                                const Eigen::VectorXcd& combiners,
                                const Eigen::VectorXd& weights,
                                double power_budget,
                                double ridge_scale = 1e-8);

// Exact quadratic coefficients of the weighted sum-MSE in w_m, everything
// else held at its current value. Includes the cross terms coupling element
// m to the rest of the aperture, so the identity
// J(w_m) = a w_m^2 - 2 b w_m + const holds to rounding.
ElementQuadratic extract_quadratic(const ChannelSet& channels,
                                   const PhaseMatrix& phase,
                                   const Eigen::MatrixXcd& digital,
                                   const Eigen::VectorXcd& combiners,
                                   const Eigen::VectorXd& weights,
                                   const Eigen::VectorXd& holo_weights,
                                   int m_index);

QuadraticCoeffs extract_quadratic_all(const ChannelSet& channels,
                                      const PhaseMatrix& phase,
                                      const Eigen::MatrixXcd& digital,
                                      const Eigen::VectorXcd& combiners,
                                      const Eigen::VectorXd& weights,
                                      const Eigen::VectorXd& holo_weights);

// clamp(b/a, 0, 1) when a is meaningfully positive; keeps w_prev when the
// objective is flat in this coordinate (a below 1e-14 * (1 + |b|)).
double update_holo_element(double a, double b, double w_prev);

// One Gauss-Seidel sweep m = 0..M-1, each coordinate minimized exactly with
// the latest weights. Never increases the weighted sum-MSE. Equivalent to
// extract_quadratic + update_holo_element per element; implemented with
// incrementally maintained gains so a sweep costs O(M D (D + K)).
Eigen::VectorXd update_holo_all(const ChannelSet& channels,
                                const PhaseMatrix& phase,
                                const Eigen::MatrixXcd& digital,
                                const Eigen::VectorXcd& combiners,
                                const Eigen::VectorXd& weights,
                                const Eigen::VectorXd& holo_weights);

}  // namespace holobf
