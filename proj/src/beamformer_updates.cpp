#include "holobf/beamformer_updates.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace holobf {

namespace {

using cd = std::complex<double>;

void check_update_inputs(const ChannelSet& channels, const PhaseMatrix& phase,
                         const Eigen::VectorXd& holo_weights,
                         const Eigen::VectorXcd& combiners,
                         const Eigen::VectorXd& weights) {
    const Eigen::Index m_total = phase.phi.rows();
    const Eigen::Index d_total = channels.channels.cols();
    if (channels.channels.rows() != m_total || holo_weights.size() != m_total)
        throw ConfigError("channels/holo_weights: row count must equal phase-matrix rows");
    if (combiners.size() != d_total || weights.size() != d_total)
        throw ConfigError("combiners/mse_weights: need one entry per user");
    for (Eigen::Index d = 0; d < d_total; ++d)
        if (!(weights[d] > 0.0))
            throw ConfigError("mse_weights[" + std::to_string(d) + "]: must be > 0");
}

}  // namespace

Eigen::MatrixXcd update_digital_unscaled(const ChannelSet& channels,
                                         const PhaseMatrix& phase,
                                         const Eigen::VectorXd& holo_weights,
                                         const Eigen::VectorXcd& combiners,
                                         const Eigen::VectorXd& weights,
                                         double ridge_scale) {
    check_update_inputs(channels, phase, holo_weights, combiners, weights);
    if (ridge_scale < 0.0) throw ConfigError("ridge_scale: must be >= 0");
    const Eigen::Index k_total = phase.phi.cols();
    const Eigen::Index d_total = channels.channels.cols();

    // u_d = W^H h_d for all users at once: U = Phi^H diag(w) H, K x D.
    const Eigen::MatrixXcd u =
        phase.phi.adjoint() *
        (channels.channels.array().colwise() * holo_weights.array().cast<cd>()).matrix();

    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(k_total, k_total);
    for (Eigen::Index d = 0; d < d_total; ++d)
        a.noalias() += (weights[d] * std::norm(combiners[d])) * (u.col(d) * u.col(d).adjoint());

    const double trace = a.trace().real();
    const double delta = ridge_scale * trace / static_cast<double>(k_total);
    Eigen::MatrixXcd regularized = a;
    regularized.diagonal().array() += delta;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(regularized);
    const double lambda_min = eig.eigenvalues().minCoeff();
    const double lambda_max = eig.eigenvalues().maxCoeff();
    if (!(lambda_min > 0.0) || lambda_max / lambda_min > 1e14)
        throw SingularSystemError("digital update: regularized normal matrix is numerically singular");

    Eigen::MatrixXcd rhs(k_total, d_total);
    for (Eigen::Index d = 0; d < d_total; ++d)
        rhs.col(d) = (weights[d] * combiners[d]) * u.col(d);
    return regularized.llt().solve(rhs);
}

Eigen::MatrixXcd update_digital(const ChannelSet& channels,
                                const PhaseMatrix& phase,
                                const Eigen::VectorXd& holo_weights,
                                const Eigen::VectorXcd& combiners,
                                const Eigen::VectorXd& weights,
                                double power_budget,
                                double ridge_scale) {
    if (!(power_budget > 0.0)) throw ConfigError("power_budget: must be > 0");
    Eigen::MatrixXcd v =
        update_digital_unscaled(channels, phase, holo_weights, combiners, weights, ridge_scale);
    Eigen::MatrixXcd wv = phase.phi * v;
    wv.array().colwise() *= holo_weights.array().cast<cd>();
    const double power = wv.squaredNorm();
    if (!(power > 0.0))
        throw SingularSystemError("digital update: solution carries no power, cannot scale");
    v *= std::sqrt(power_budget / power);
    return v;
}

ElementQuadratic extract_quadratic(const ChannelSet& channels,
                                   const PhaseMatrix& phase,
                                   const Eigen::MatrixXcd& digital,
                                   const Eigen::VectorXcd& combiners,
                                   const Eigen::VectorXd& weights,
                                   const Eigen::VectorXd& holo_weights,
                                   int m_index) {
    check_update_inputs(channels, phase, holo_weights, combiners, weights);
    if (m_index < 0 || m_index >= phase.phi.rows())
        throw ConfigError("m_index: out of range");

    const Eigen::Index d_total = channels.channels.cols();
    const EffectiveGains gains = compute_gains(channels, holo_weights, phase, digital);
    const Eigen::RowVectorXcd t = phase.phi.row(m_index) * digital;  // 1 x D

    // J(w_m) = a w_m^2 - 2 b w_m + const. The desired-signal part of b comes
    // from the -2 Re(conj(f_d) g(d,d)) term; the remaining part couples
    // element m's contribution c(d,l) = conj(h_d[m]) t_l to the gain of the
    // rest of the aperture r(d,l) = g(d,l) - w_m c(d,l).
    ElementQuadratic q;
    const double t2 = t.squaredNorm();
    for (Eigen::Index d = 0; d < d_total; ++d) {
        const cd hc = std::conj(channels.channels(m_index, d));
        const double f2 = std::norm(combiners[d]);
        q.a += weights[d] * f2 * std::norm(hc) * t2;

        double cross = 0.0;
        for (Eigen::Index l = 0; l < d_total; ++l) {
            const cd c = hc * t[l];
            const cd r = gains.g(d, l) - holo_weights[m_index] * c;
            cross += std::real(c * std::conj(r));
        }
        q.b += weights[d] * (std::real(std::conj(combiners[d]) * (hc * t[d])) - f2 * cross);
    }
    return q;
}

QuadraticCoeffs extract_quadratic_all(const ChannelSet& channels,
                                      const PhaseMatrix& phase,
                                      const Eigen::MatrixXcd& digital,
                                      const Eigen::VectorXcd& combiners,
                                      const Eigen::VectorXd& weights,
                                      const Eigen::VectorXd& holo_weights) {
    const Eigen::Index m_total = phase.phi.rows();
    QuadraticCoeffs out;
    out.a.resize(m_total);
    out.b.resize(m_total);
    for (Eigen::Index m = 0; m < m_total; ++m) {
        const ElementQuadratic q = extract_quadratic(channels, phase, digital, combiners,
                                                     weights, holo_weights, static_cast<int>(m));
        out.a[m] = q.a;
        out.b[m] = q.b;
    }
    return out;
}

double update_holo_element(double a, double b, double w_prev) {
    if (a < 0.0) throw ConfigError("a: quadratic coefficient must be >= 0");
    if (a <= 1e-14 * (1.0 + std::abs(b))) return w_prev;  // objective flat in w_m
    return std::clamp(b / a, 0.0, 1.0);
}

Eigen::VectorXd update_holo_all(const ChannelSet& channels,
                                const PhaseMatrix& phase,
                                const Eigen::MatrixXcd& digital,
                                const Eigen::VectorXcd& combiners,
                                const Eigen::VectorXd& weights,
                                const Eigen::VectorXd& holo_weights) {
    check_update_inputs(channels, phase, holo_weights, combiners, weights);
    const Eigen::Index m_total = phase.phi.rows();
    const Eigen::Index d_total = channels.channels.cols();

    const Eigen::MatrixXcd t = phase.phi * digital;  // M x D, w-independent
    Eigen::MatrixXcd g = (channels.channels.adjoint() *
                          (t.array().colwise() * holo_weights.array().cast<cd>()).matrix());

    Eigen::VectorXd w = holo_weights;
    Eigen::VectorXcd c(d_total * d_total);
    for (Eigen::Index m = 0; m < m_total; ++m) {
        const double t2 = t.row(m).squaredNorm();
        double a = 0.0;
        double b = 0.0;
        for (Eigen::Index d = 0; d < d_total; ++d) {
            const cd hc = std::conj(channels.channels(m, d));
            const double f2 = std::norm(combiners[d]);
            a += weights[d] * f2 * std::norm(hc) * t2;

            double cross = 0.0;
            for (Eigen::Index l = 0; l < d_total; ++l) {
                const cd cl = hc * t(m, l);
                c[d * d_total + l] = cl;
                cross += std::real(cl * std::conj(g(d, l) - w[m] * cl));
            }
            b += weights[d] * (std::real(std::conj(combiners[d]) * (hc * t(m, d))) - f2 * cross);
        }

        const double w_new = update_holo_element(a, b, w[m]);
        const double delta = w_new - w[m];
        if (delta != 0.0) {
            for (Eigen::Index d = 0; d < d_total; ++d)
                for (Eigen::Index l = 0; l < d_total; ++l)
                    g(d, l) += delta * c[d * d_total + l];
            w[m] = w_new;
        }
    }
    return w;
}

}  // namespace holobf
