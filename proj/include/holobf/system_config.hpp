#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace holobf {

// Raised when a linear system inside an update is numerically unsolvable.
class SingularSystemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised by config/spec validation; the message names the offending field.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Scenario scalars for one RHS-assisted multi-user downlink instance.
//
// The surface has rhs_rows x rhs_cols radiating elements (M total) fed by
// num_feeds waveguide feeds; one RF chain per feed. num_users single-antenna
// receivers each get one stream, so num_feeds >= num_users must hold.
struct SystemConfig {
    int num_users = 0;                 // D
    int num_feeds = 0;                 // K (= RF chains)
    int rhs_rows = 0;
    int rhs_cols = 0;
    double carrier_freq_hz = 30.0e9;
    double element_spacing_m = 0.0025;
    double k_free_mag = 628.3185307179586477;     // 200*pi, rad/m
    double k_surface_mag = 1088.2796185405306;    // 200*sqrt(3)*pi, rad/m
    Eigen::VectorXd noise_vars;        // per-user sigma_d^2, length D
    double power_budget = 1.0;         // alpha
    int num_paths = 5;                 // I
    std::uint64_t seed = 0;

    int num_elements() const { return rhs_rows * rhs_cols; }

    // Throws ConfigError naming the violated field.
    void validate() const;
};

// Transmit-SNR convention: power budget alpha fixed, noise variance adjusted.
inline double noise_variance_from_snr_db(double power_budget, double snr_db) {
    return power_budget * std::pow(10.0, -snr_db / 10.0);
}

}  // namespace holobf
