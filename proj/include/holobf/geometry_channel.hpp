#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "holobf/system_config.hpp"

namespace holobf {

// Planar element grid plus feed points, all in meters.
struct RhsGeometry {
    Eigen::Matrix3Xd element_positions;  // 3 x M
    Eigen::Matrix3Xd feed_positions;     // 3 x K
};

// Fixed reference-wave matrix: phi(m, k) = exp(-j * |k_s| * r_m^k) where
// r_m^k is the feed-k-to-element-m distance inside the waveguide.
struct PhaseMatrix {
    Eigen::MatrixXcd phi;  // M x K, unit-modulus entries
};

// Per-user downlink channels, column d = h_d.
struct ChannelSet {
    Eigen::MatrixXcd channels;  // M x D
    std::uint64_t seed_used = 0;
};

// One propagation path of the pathwise channel model.
struct PathParams {
    std::complex<double> gain;  // beta
    double azimuth = 0.0;       // theta, rad
    double elevation = 0.0;     // phi, rad
};

// Elements on a centered grid in the z = 0 plane with the configured
// spacing; feeds on a parallel line one spacing below the grid's lower edge,
// centered and spaced like the elements.
RhsGeometry build_geometry(const SystemConfig& config);

PhaseMatrix build_phase_matrix(const RhsGeometry& geom, double k_surface_mag);

// UPA response to a plane wave from (azimuth, elevation). Convention:
// a_m = exp(+j * k_free * p_m . u) with u = (cos(el)sin(az), sin(el),
// cos(el)cos(az)), so a(0, 0) is the all-ones vector for the z = 0 grid.
Eigen::VectorXcd upa_steering(const RhsGeometry& geom, double k_free_mag,
                              double azimuth, double elevation);

// h = sqrt(1/I) * sum_i beta_i * a(theta_i, phi_i).
Eigen::VectorXcd synthesize_channel(const RhsGeometry& geom, double k_free_mag,
                                    const std::vector<PathParams>& paths);

// Pathwise channels with i.i.d. CN(0,1) gains and angles uniform in
// [-pi/2, pi/2]. Path parameters are drawn before any steering vector is
// formed, in (user, path) order, so two configs differing only in RHS size
// share per-path randomness for equal seeds.
ChannelSet generate_channels(const SystemConfig& config, const RhsGeometry& geom);

}  // namespace holobf
