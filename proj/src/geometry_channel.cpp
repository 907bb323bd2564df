#include "holobf/geometry_channel.hpp"

#include <cmath>
#include <complex>

#include "holobf/rng.hpp"

namespace holobf {

RhsGeometry build_geometry(const SystemConfig& config) {
    config.validate();
    const int rows = config.rhs_rows;
    const int cols = config.rhs_cols;
    const int m_total = config.num_elements();
    const double s = config.element_spacing_m;

    RhsGeometry geom;
    geom.element_positions.resize(3, m_total);
    const double x0 = -0.5 * (cols - 1) * s;
    const double y0 = -0.5 * (rows - 1) * s;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const int m = r * cols + c;
            geom.element_positions.col(m) = Eigen::Vector3d(x0 + c * s, y0 + r * s, 0.0);
        }
    }

    // Feeds sit one spacing below the lower element edge, centered, with the
    // element pitch; keeps every feed-to-element distance >= s.
    const int k_total = config.num_feeds;
    geom.feed_positions.resize(3, k_total);
    const double fx0 = -0.5 * (k_total - 1) * s;
    for (int k = 0; k < k_total; ++k)
        geom.feed_positions.col(k) = Eigen::Vector3d(fx0 + k * s, y0 - s, 0.0);
    return geom;
}

PhaseMatrix build_phase_matrix(const RhsGeometry& geom, double k_surface_mag) {
    const Eigen::Index m_total = geom.element_positions.cols();
    const Eigen::Index k_total = geom.feed_positions.cols();
    PhaseMatrix phase;
    phase.phi.resize(m_total, k_total);
    for (Eigen::Index k = 0; k < k_total; ++k) {
        for (Eigen::Index m = 0; m < m_total; ++m) {
            const double r = (geom.element_positions.col(m) - geom.feed_positions.col(k)).norm();
            phase.phi(m, k) = std::polar(1.0, -k_surface_mag * r);
        }
    }
    return phase;
}

Eigen::VectorXcd upa_steering(const RhsGeometry& geom, double k_free_mag,
                              double azimuth, double elevation) {
    const Eigen::Vector3d u(std::cos(elevation) * std::sin(azimuth),
                            std::sin(elevation),
                            std::cos(elevation) * std::cos(azimuth));
    const Eigen::Index m_total = geom.element_positions.cols();
    Eigen::VectorXcd a(m_total);
    for (Eigen::Index m = 0; m < m_total; ++m)
        a[m] = std::polar(1.0, k_free_mag * geom.element_positions.col(m).dot(u));
    return a;
}

Eigen::VectorXcd synthesize_channel(const RhsGeometry& geom, double k_free_mag,
                                    const std::vector<PathParams>& paths) {
    if (paths.empty()) throw ConfigError("num_paths: channel needs at least one path");
    Eigen::VectorXcd h = Eigen::VectorXcd::Zero(geom.element_positions.cols());
    for (const PathParams& p : paths)
        h += p.gain * upa_steering(geom, k_free_mag, p.azimuth, p.elevation);
    h *= std::sqrt(1.0 / static_cast<double>(paths.size()));
    return h;
}

ChannelSet generate_channels(const SystemConfig& config, const RhsGeometry& geom) {
    config.validate();
    if (geom.element_positions.cols() != config.num_elements())
        throw ConfigError("rhs_rows/rhs_cols: geometry does not match config");

    Rng rng(config.seed);
    constexpr double half_pi = 1.5707963267948966192;

    // All path parameters are drawn up front in (user, path) order; the
    // draw sequence is independent of M.
    std::vector<std::vector<PathParams>> paths(config.num_users);
    for (int d = 0; d < config.num_users; ++d) {
        paths[d].resize(config.num_paths);
        for (int i = 0; i < config.num_paths; ++i) {
            paths[d][i].gain = rng.complex_normal();
            paths[d][i].azimuth = rng.uniform(-half_pi, half_pi);
            paths[d][i].elevation = rng.uniform(-half_pi, half_pi);
        }
    }

    ChannelSet out;
    out.seed_used = config.seed;
    out.channels.resize(config.num_elements(), config.num_users);
    for (int d = 0; d < config.num_users; ++d)
        out.channels.col(d) = synthesize_channel(geom, config.k_free_mag, paths[d]);
    return out;
}

}  // namespace holobf
