#include "holobf/mse_core.hpp"

#include <cmath>

namespace holobf {

namespace {
constexpr double kLn2 = 0.6931471805599453094;
}

Eigen::MatrixXcd effective_matrix(const Eigen::VectorXd& holo_weights,
                                  const PhaseMatrix& phase) {
    if (holo_weights.size() != phase.phi.rows())
        throw ConfigError("holo_weights: length must equal phase-matrix rows");
    return holo_weights.asDiagonal() * phase.phi;
}

EffectiveGains compute_gains(const ChannelSet& channels,
                             const Eigen::VectorXd& holo_weights,
                             const PhaseMatrix& phase,
                             const Eigen::MatrixXcd& digital) {
    const Eigen::Index m_total = phase.phi.rows();
    if (channels.channels.rows() != m_total || holo_weights.size() != m_total)
        throw ConfigError("channels/holo_weights: row count must equal phase-matrix rows");
    if (digital.rows() != phase.phi.cols())
        throw ConfigError("digital: row count must equal phase-matrix columns");

    // g = H^H diag(w) Phi V, evaluated as H^H (w o (Phi V)).
    Eigen::MatrixXcd t = phase.phi * digital;  // M x D
    t.array().colwise() *= holo_weights.array().cast<std::complex<double>>();
    return EffectiveGains{channels.channels.adjoint() * t};
}

Eigen::VectorXcd mmse_combiner(const EffectiveGains& gains,
                               const Eigen::VectorXd& noise_vars) {
    const Eigen::Index d_total = gains.g.rows();
    if (noise_vars.size() != d_total)
        throw ConfigError("noise_vars: need one variance per user");
    Eigen::VectorXcd f(d_total);
    for (Eigen::Index d = 0; d < d_total; ++d) {
        const double denom = gains.g.row(d).squaredNorm() + noise_vars[d];
        f[d] = gains.g(d, d) / denom;
    }
    return f;
}

Eigen::VectorXd mse_per_user(const EffectiveGains& gains,
                             const Eigen::VectorXcd& combiners,
                             const Eigen::VectorXd& noise_vars) {
    const Eigen::Index d_total = gains.g.rows();
    if (combiners.size() != d_total || noise_vars.size() != d_total)
        throw ConfigError("combiners/noise_vars: need one entry per user");
    Eigen::VectorXd mse(d_total);
    for (Eigen::Index d = 0; d < d_total; ++d) {
        const double denom = gains.g.row(d).squaredNorm() + noise_vars[d];
        mse[d] = std::norm(combiners[d]) * denom -
                 2.0 * std::real(std::conj(combiners[d]) * gains.g(d, d)) + 1.0;
    }
    return mse;
}

Eigen::VectorXd mse_weights(const Eigen::VectorXd& mse) {
    Eigen::VectorXd w(mse.size());
    for (Eigen::Index d = 0; d < mse.size(); ++d) {
        if (!(mse[d] > 0.0))
            throw ConfigError("mse[" + std::to_string(d) + "]: weight rule needs MSE > 0");
        w[d] = 1.0 / (mse[d] * kLn2);
    }
    return w;
}

double sum_rate(const EffectiveGains& gains, const Eigen::VectorXd& noise_vars) {
    const Eigen::Index d_total = gains.g.rows();
    if (noise_vars.size() != d_total)
        throw ConfigError("noise_vars: need one variance per user");
    double rate = 0.0;
    for (Eigen::Index d = 0; d < d_total; ++d) {
        const double desired = std::norm(gains.g(d, d));
        const double interference = gains.g.row(d).squaredNorm() - desired;
        rate += std::log2(1.0 + desired / (interference + noise_vars[d]));
    }
    return rate;
}

double weighted_sum_mse(const EffectiveGains& gains,
                        const Eigen::VectorXcd& combiners,
                        const Eigen::VectorXd& noise_vars,
                        const Eigen::VectorXd& weights) {
    return weights.dot(mse_per_user(gains, combiners, noise_vars));
}

}  // namespace holobf
