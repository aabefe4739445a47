#include "nlqfi/configurations.hpp"

#include "nlqfi/errors.hpp"

#include <gsl/gsl_integration.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace nlqfi {

GainSpec::GainSpec(double n_peak, double length)
    : GainSpec(n_peak, length, std::asinh(std::sqrt(n_peak)) / length) {}

GainSpec::GainSpec(double n_peak, double length, double gamma_abs)
    : n_peak_(n_peak), length_(length), gamma_abs_(gamma_abs) {
    if (!(n_peak >= 0.0) || !std::isfinite(n_peak)) {
        throw std::invalid_argument("GainSpec: n_peak must be finite and non-negative");
    }
    if (!(length > 0.0) || !std::isfinite(length)) {
        throw std::invalid_argument("GainSpec: length must be positive");
    }
}

GainSpec GainSpec::from_gamma(double gamma_abs, double length) {
    if (!(gamma_abs >= 0.0)) throw std::invalid_argument("GainSpec: gamma_abs must be non-negative");
    const double s = std::sinh(gamma_abs * length);
    return GainSpec(s * s, length, gamma_abs);
}

void DLParams::validate() const {
    if (!(kappa_s >= 0.0) || !(kappa_i >= 0.0) || !std::isfinite(kappa_s) || !std::isfinite(kappa_i)) {
        throw std::invalid_argument("DLParams: decay rates must be finite and non-negative");
    }
    if (!(length > 0.0)) throw std::invalid_argument("DLParams: length must be positive");
    if (quadrature_points < 32) throw std::invalid_argument("DLParams: quadrature_points must be >= 32");
}

double eta_from_kappa(double kappa, double length) {
    if (!(kappa >= 0.0)) throw std::invalid_argument("eta_from_kappa: kappa must be non-negative");
    if (!(length > 0.0)) throw std::invalid_argument("eta_from_kappa: length must be positive");
    return std::exp(-kappa * length);
}

double kappa_from_eta(double eta, double length) {
    if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("kappa_from_eta: eta must lie in (0, 1]");
    if (!(length > 0.0)) throw std::invalid_argument("kappa_from_eta: length must be positive");
    return -std::log(eta) / length;
}

Moments single_pass_moments(const GainSpec& gain, const PhaseMatching& pm) {
    return vacuum_moments(propagator(pm, cplx{gain.gamma_abs(), 0.0}, gain.length()));
}

namespace {

cplx pumped(double gamma_abs, double phi_p) { return std::polar(gamma_abs, -phi_p); }

double wrap_phase(double phi) {
    const double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(phi, two_pi);
    if (r < 0.0) r += two_pi;
    return r;
}

}  // namespace

Moments su11_moments(const GainSpec& gain, const PhaseMatching& pm, const LossChannel& ch, double phi_p2) {
    const Moments first = single_pass_moments(gain, pm);
    const Moments lossy = apply_loss(first, ch);
    const cplx gamma2 = pumped(gain.gamma_abs(), phi_p2);
    return seeded_moments(propagator(pm, gamma2, gain.length()), lossy, gamma2);
}

Moments su11_closed_form(const GainSpec& gain, const PhaseMatching& pm, const LossChannel& ch, double phi_p2) {
    ch.validate();
    const Moments v = single_pass_moments(gain, pm);
    const double n = v.n_s;
    if (n == 0.0) return {};
    const cplx m = v.m;
    const double eta_sum = ch.eta_s + ch.eta_i;
    const double root = std::sqrt(ch.eta_s * ch.eta_i);
    const double theta = ch.phi_s + ch.phi_i;

    const double interference = 2.0 * root * std::real(std::polar(1.0, theta + phi_p2) * m * m);
    Moments out;
    out.n_s = n * (1.0 + ch.eta_s) + n * n * eta_sum - interference;
    out.n_i = n * (1.0 + ch.eta_i) + n * n * eta_sum - interference;
    out.m = std::polar(1.0, -phi_p2) * m * (1.0 + n * eta_sum) -
            root * std::polar(1.0, -(theta + 2.0 * phi_p2)) * n * std::conj(m) -
            root * std::polar(1.0, theta) * m * m * m / n;
    return out;
}

double anti_squeeze_phase(const GainSpec& gain, const PhaseMatching& pm, const LossChannel& ch) {
    const Moments v = single_pass_moments(gain, pm);
    // Phase of [M^V]² measured from its phase-matched value −|M^V|².
    const double psi = std::arg(-(v.m * v.m));
    return wrap_phase(std::numbers::pi - (ch.phi_s + ch.phi_i) - psi);
}

ICMoments ic_moments(const GainSpec& gain, const PhaseMatching& pm, const LossChannel& ch, double phi_p2) {
    ch.validate();
    const Propagator p = propagator(pm, cplx{gain.gamma_abs(), 0.0}, gain.length());
    const Moments v = vacuum_moments(p);
    const double n = v.n_s;
    const double root = std::sqrt(ch.eta_s * ch.eta_i);
    const double theta = ch.phi_s + ch.phi_i;

    ICMoments out;
    out.n_s = ch.eta_s * n;
    out.n_i = n + ch.eta_i * n * (1.0 + n);
    out.n_a = n * (1.0 + ch.eta_i * n);
    out.n_sa = root * std::polar(1.0, -(theta + phi_p2)) * n * p.u_ii;
    out.m_si = root * std::polar(1.0, theta) * v.m * std::conj(p.u_ii);
    out.m_ai = std::polar(1.0, -phi_p2) * v.m * (1.0 + ch.eta_i * n);
    return out;
}

double ic_optimal_phase(const GainSpec& gain, const PhaseMatching& pm, const LossChannel& ch) {
    const Propagator p = propagator(pm, cplx{gain.gamma_abs(), 0.0}, gain.length());
    return wrap_phase(std::arg(p.u_ii) - (ch.phi_s + ch.phi_i) - std::numbers::pi / 2.0);
}

double ic_balanced_bs(const ICMoments& ic, int sign) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("ic_balanced_bs: sign must be +1 or -1");
    const double value = 0.5 * (ic.n_s + ic.n_a + 2.0 * sign * std::imag(ic.n_sa));
    return value < 0.0 ? 0.0 : value;
}

Moments dl_vacuum_moments(const GainSpec& gain, const PhaseMatching& pm, double kappa_s, double kappa_i,
                          double z) {
    const cplx i{0.0, 1.0};
    const cplx delta_K = pm.delta_K + i * (kappa_s + kappa_i) / 2.0;
    const cplx sigma_K = pm.sigma_K + i * (kappa_s - kappa_i) / 2.0;
    const Propagator p = propagator(delta_K, sigma_K, cplx{gain.gamma_abs(), 0.0}, z);
    Moments out;
    out.n_s = std::norm(p.u_si);
    out.n_i = out.n_s;
    out.m = p.u_ss * std::conj(p.u_is);
    return out;
}

namespace {

struct LegendreRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

std::shared_ptr<const LegendreRule> legendre_rule(int n) {
    static std::mutex mutex;
    static std::map<int, std::shared_ptr<const LegendreRule>> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    auto* table = gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(n));
    if (table == nullptr) throw std::runtime_error("legendre_rule: GSL table allocation failed");
    auto rule = std::make_shared<LegendreRule>();
    rule->nodes.resize(n);
    rule->weights.resize(n);
    for (int k = 0; k < n; ++k) {
        gsl_integration_glfixed_point(-1.0, 1.0, static_cast<std::size_t>(k), &rule->nodes[k],
                                      &rule->weights[k], table);
    }
    gsl_integration_glfixed_table_free(table);
    cache.emplace(n, rule);
    return rule;
}

struct BathIntegrals {
    double n = 0.0;
    cplx m{};
};

BathIntegrals integrate_bath(const GainSpec& gain, const PhaseMatching& pm, const DLParams& dl, int nodes) {
    const auto rule = legendre_rule(nodes);
    const double half = 0.5 * dl.length;
    BathIntegrals acc;
    for (int k = 0; k < nodes; ++k) {
        const double z = half * (rule->nodes[k] + 1.0);
        if (z <= 0.0) continue;
        const Moments v = dl_vacuum_moments(gain, pm, dl.kappa_s, dl.kappa_i, z);
        acc.n += rule->weights[k] * v.n_s;
        acc.m += rule->weights[k] * v.m;
    }
    acc.n *= half;
    acc.m *= half;
    return acc;
}

Moments combine(const GainSpec& gain, const PhaseMatching& pm, const DLParams& dl, const BathIntegrals& bath) {
    const Moments end = dl_vacuum_moments(gain, pm, dl.kappa_s, dl.kappa_i, dl.length);
    Moments out;
    out.n_s = end.n_s + dl.kappa_i * bath.n;
    out.n_i = end.n_s + dl.kappa_s * bath.n;
    out.m = end.m + dl.kappa_s * bath.m;
    return out;
}

bool agrees(double a, double b) { return std::abs(a - b) <= 1e-10 * std::abs(b); }
bool agrees(cplx a, cplx b) { return std::abs(a - b) <= 1e-10 * std::abs(b); }

}  // namespace

Moments dl_moments_fixed(const GainSpec& gain, const PhaseMatching& pm, const DLParams& dl, int nodes) {
    dl.validate();
    if (nodes < 1) throw std::invalid_argument("dl_moments_fixed: nodes must be positive");
    return combine(gain, pm, dl, integrate_bath(gain, pm, dl, nodes));
}

DLEvaluation dl_moments_adaptive(const GainSpec& gain, const PhaseMatching& pm, const DLParams& dl) {
    dl.validate();
    if (std::abs(gain.length() - dl.length) > 1e-12 * dl.length) {
        throw std::invalid_argument("dl_moments: GainSpec and DLParams lengths differ");
    }
    int nodes = dl.quadrature_points;
    BathIntegrals coarse = integrate_bath(gain, pm, dl, nodes);
    for (int doubling = 0; doubling < 6; ++doubling) {
        const BathIntegrals fine = integrate_bath(gain, pm, dl, 2 * nodes);
        nodes *= 2;
        if (agrees(coarse.n, fine.n) && agrees(coarse.m, fine.m)) {
            return {combine(gain, pm, dl, fine), nodes};
        }
        coarse = fine;
    }
    throw QuadratureNotConverged("dl_moments: bath integrals did not converge after 6 doublings");
}

Moments dl_moments(const GainSpec& gain, const PhaseMatching& pm, const DLParams& dl) {
    return dl_moments_adaptive(gain, pm, dl).moments;
}

}  // namespace nlqfi
