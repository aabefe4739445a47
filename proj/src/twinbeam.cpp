#include "nlqfi/twinbeam.hpp"

#include <cmath>
#include <stdexcept>

namespace nlqfi {

void LossChannel::validate() const {
    if (!(eta_s >= 0.0 && eta_s <= 1.0) || !(eta_i >= 0.0 && eta_i <= 1.0)) {
        throw std::invalid_argument("LossChannel: transmissions must lie in [0, 1]");
    }
    if (!std::isfinite(phi_s) || !std::isfinite(phi_i)) {
        throw std::invalid_argument("LossChannel: phases must be finite");
    }
}

LossChannel LossChannel::idler_only(double eta_i) {
    LossChannel ch;
    ch.eta_i = eta_i;
    ch.validate();
    return ch;
}

namespace {

// Returns {cos(νz/2), sin(νz/2)/ν}; both are even in ν so the branch of the root is irrelevant.
std::pair<cplx, cplx> trig_pair(cplx nu, double z) {
    if (std::abs(nu * z) < kSeriesThreshold) {
        const cplx x2 = 0.25 * nu * nu * z * z;
        const cplx c = 1.0 - x2 / 2.0 + x2 * x2 / 24.0;
        const cplx s = 0.5 * z * (1.0 - x2 / 6.0 + x2 * x2 / 120.0);
        return {c, s};
    }
    const cplx half = 0.5 * nu * z;
    return {std::cos(half), std::sin(half) / nu};
}

Propagator assemble(cplx delta_K, cplx sigma_K, cplx nu, cplx gamma, double length) {
    if (!(length > 0.0)) {
        throw std::invalid_argument("propagator: length must be positive");
    }
    const auto [c, s] = trig_pair(nu, length);
    const cplx i{0.0, 1.0};
    const cplx phase = std::exp(i * delta_K * length / 2.0);
    Propagator p;
    p.u_ss = phase * (c + i * sigma_K * s);
    p.u_ii = phase * (c - i * sigma_K * s);
    p.u_si = 2.0 * i * gamma * phase * s;
    p.u_is = gamma == cplx{} ? cplx{} : -(std::conj(gamma) / gamma) * p.u_si;
    return p;
}

}  // namespace

Propagator propagator(const PhaseMatching& pm, cplx gamma, double length) {
    const double g2 = std::norm(gamma);
    const cplx nu2_expected = pm.sigma_K * pm.sigma_K - 4.0 * g2;
    const double scale = pm.sigma_K * pm.sigma_K + 4.0 * g2;
    if (std::abs(pm.nu * pm.nu - nu2_expected) > 1e-10 * scale) {
        throw std::invalid_argument("propagator: PhaseMatching.nu was not evaluated for this |gamma|");
    }
    return assemble(pm.delta_K, pm.sigma_K, pm.nu, gamma, length);
}

Propagator propagator(cplx delta_K, cplx sigma_K, cplx gamma, double length) {
    const cplx nu = std::sqrt(sigma_K * sigma_K - 4.0 * std::norm(gamma));
    return assemble(delta_K, sigma_K, nu, gamma, length);
}

Moments vacuum_moments(const Propagator& p) {
    Moments out;
    out.n_s = std::norm(p.u_si);
    out.n_i = std::norm(p.u_is);
    out.m = p.u_ss * std::conj(p.u_is);
    return out;
}

Moments seeded_moments(const Propagator& p, const Moments& input, cplx gamma) {
    const Moments vac = vacuum_moments(p);
    const double nv = vac.n_s;
    const cplx mv = vac.m;

    if (nv == 0.0) {
        // No pair generation: the pass only rotates phases. (U^II)* U^SS is the analytic
        // limit of the −(γ*/γ)[M^V]²/N^V coefficient.
        Moments out = input;
        out.m = std::conj(p.u_ii) * p.u_ss * input.m;
        return out;
    }

    const cplx ratio = std::conj(gamma) / gamma;  // γ*/γ
    const double cross = 2.0 * std::real(ratio * mv * input.m);

    Moments out;
    out.n_s = input.n_s * (1.0 + nv) + nv * (1.0 + input.n_i) - cross;
    out.n_i = input.n_i * (1.0 + nv) + nv * (1.0 + input.n_s) - cross;
    out.m = mv * (1.0 + input.n_s) + mv * input.n_i - (1.0 / ratio) * nv * std::conj(input.m) -
            ratio * (mv * mv / nv) * input.m;
    return out;
}

Moments apply_loss(const Moments& input, const LossChannel& ch) {
    ch.validate();
    Moments out;
    out.n_s = ch.eta_s * input.n_s;
    out.n_i = ch.eta_i * input.n_i;
    out.m = std::sqrt(ch.eta_s * ch.eta_i) * std::polar(1.0, ch.phi_s + ch.phi_i) * input.m;
    return out;
}

}  // namespace nlqfi
