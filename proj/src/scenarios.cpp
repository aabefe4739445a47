#include "nlqfi/scenarios.hpp"

#include "nlqfi/errors.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace nlqfi {

void Scenario::validate() const {
    if (!(length > 0.0) || !std::isfinite(length)) throw std::invalid_argument("Scenario: length must be positive");
    if (!(kappa_s >= 0.0)) throw std::invalid_argument("Scenario: kappa_s must be non-negative");
    if (quadrature_points < 32) throw std::invalid_argument("Scenario: quadrature_points must be >= 32");
    if (phi_p2 && !std::isfinite(*phi_p2)) throw std::invalid_argument("Scenario: phi_p2 must be finite");
}

PhaseMatching phase_matching(const Scenario& setup, const GainSpec& gain) {
    return evaluate_mismatch(setup.dispersion, setup.omega, gain.gamma_abs());
}

LossChannel loss_channel(const Scenario& setup, double kappa_i) {
    LossChannel ch;
    ch.eta_s = eta_from_kappa(setup.kappa_s, setup.length);
    ch.eta_i = eta_from_kappa(kappa_i, setup.length);
    ch.phi_s = setup.phi_s;
    ch.phi_i = setup.phi_i;
    return ch;
}

double second_pass_phase(Model model, const Scenario& setup, const GainSpec& gain) {
    if (setup.phi_p2) return *setup.phi_p2;
    // The automatic phases do not depend on the transmissions.
    const PhaseMatching pm = phase_matching(setup, gain);
    const LossChannel ch = loss_channel(setup, 0.0);
    return model == Model::ic ? ic_optimal_phase(gain, pm, ch) : anti_squeeze_phase(gain, pm, ch);
}

namespace {

DLParams dl_params(const Scenario& setup, double kappa_i) {
    DLParams dl;
    dl.kappa_s = setup.kappa_s;
    dl.kappa_i = kappa_i;
    dl.length = setup.length;
    dl.quadrature_points = setup.quadrature_points;
    return dl;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

QfiResult divergent_result(Estimand estimand, Access access, Method method) {
    QfiResult r;
    r.value = kInf;
    r.status = QfiStatus::divergent;
    r.estimand = estimand;
    r.access = access;
    r.method = method;
    return r;
}

// Maps the estimand value ε to κ_I.
double kappa_of(Estimand estimand, double epsilon, double length) {
    return estimand == Estimand::kappa_i ? epsilon : kappa_from_eta(epsilon, length);
}

// Central-difference step around ε that keeps both stencil ends inside the domain.
double stencil_step(Estimand estimand, double epsilon) {
    double h = default_fd_step(epsilon);
    if (estimand == Estimand::kappa_i) {
        if (h >= 0.5 * epsilon) h = 0.25 * epsilon;
    } else if (epsilon + h >= 1.0) {
        h = 0.25 * (1.0 - epsilon);
    }
    return h;
}

// κ_I → single-mode occupation, with the DL quadrature rule pinned at kappa_centre.
std::function<double(double)> occupation_map(Model model, const Scenario& setup, double n_peak, double kappa_centre) {
    if (model != Model::dl) {
        return [=](double k) { return single_mode_occupation(model, setup, n_peak, k); };
    }
    const GainSpec gain(n_peak, setup.length);
    const PhaseMatching pm = phase_matching(setup, gain);
    const int nodes = dl_moments_adaptive(gain, pm, dl_params(setup, kappa_centre)).quadrature_points;
    return [=](double k) { return dl_moments_fixed(gain, pm, dl_params(setup, k), nodes).n_s; };
}

}  // namespace

Moments full_access_moments(Model model, const Scenario& setup, double n_peak, double kappa_i) {
    const GainSpec gain(n_peak, setup.length);
    const PhaseMatching pm = phase_matching(setup, gain);
    if (model == Model::dl) return dl_moments(gain, pm, dl_params(setup, kappa_i));
    return apply_loss(single_pass_moments(gain, pm), loss_channel(setup, kappa_i));
}

double single_mode_occupation(Model model, const Scenario& setup, double n_peak, double kappa_i) {
    const GainSpec gain(n_peak, setup.length);
    const PhaseMatching pm = phase_matching(setup, gain);
    switch (model) {
        case Model::su11:
            return su11_moments(gain, pm, loss_channel(setup, kappa_i), second_pass_phase(model, setup, gain)).n_s;
        case Model::ic:
            return ic_balanced_bs(
                ic_moments(gain, pm, loss_channel(setup, kappa_i), second_pass_phase(model, setup, gain)), -1);
        case Model::dl:
            return dl_moments(gain, pm, dl_params(setup, kappa_i)).n_s;
    }
    throw std::invalid_argument("single_mode_occupation: unknown model");
}

CovarianceTwoMode ic_two_mode_covariance(const Scenario& setup, double n_peak, double kappa_i) {
    const GainSpec gain(n_peak, setup.length);
    const PhaseMatching pm = phase_matching(setup, gain);
    return covariance_ic(
        ic_moments(gain, pm, loss_channel(setup, kappa_i), second_pass_phase(Model::ic, setup, gain)));
}

bool analytic_available(Model model, Access access, const Scenario& setup) {
    if (setup.kappa_s != 0.0) return false;
    if (access == Access::all_modes) return model == Model::su11 || model == Model::ic;
    if (access == Access::ic_two_mode) {
        if (model != Model::ic) return false;
        const PhaseMatching pm = evaluate_mismatch(setup.dispersion, setup.omega, 0.0);
        return pm.sigma_K == 0.0;
    }
    return false;
}

QfiResult analytic_qfi(Model model, Access access, Estimand estimand, const Scenario& setup, double n_peak,
                       double kappa_i) {
    if (!analytic_available(model, access, setup)) {
        throw std::invalid_argument("analytic_qfi: no closed form for this model/access/setup");
    }
    if (!(kappa_i >= 0.0)) throw std::invalid_argument("analytic_qfi: kappa_i must be non-negative");
    if (kappa_i == 0.0) return divergent_result(estimand, access, Method::analytic);

    const double length = setup.length;
    const GainSpec gain(n_peak, length);
    const double n = single_pass_moments(gain, phase_matching(setup, gain)).n_s;
    const double eta = eta_from_kappa(kappa_i, length);
    const double one_minus_eta = -std::expm1(-kappa_i * length);

    QfiResult r;
    r.estimand = Estimand::kappa_i;
    r.access = access;
    r.method = Method::analytic;
    // H_κ = L² N / (e^{κL} − 1)
    r.value = length * length * n / std::expm1(kappa_i * length);
    if (access == Access::ic_two_mode) {
        r.value *= (1.0 + n * one_minus_eta) / (2.0 + n * (2.0 - eta));
    }
    if (estimand == Estimand::eta_i) r = reparametrize(r, eta, length);
    return r;
}

QfiResult numeric_qfi(Model model, Access access, Estimand estimand, const Scenario& setup, double n_peak,
                      double kappa_i) {
    setup.validate();
    if (!(kappa_i >= 0.0)) throw std::invalid_argument("numeric_qfi: kappa_i must be non-negative");
    if (access == Access::ic_two_mode && model != Model::ic) {
        throw std::invalid_argument("numeric_qfi: ic_two_mode access requires the IC model");
    }
    if (kappa_i == 0.0) {
        if (access != Access::single_mode) return divergent_result(estimand, access, Method::numeric);
        throw std::invalid_argument("numeric_qfi: single-mode QFI needs kappa_i > 0");
    }

    const double length = setup.length;
    const double epsilon = estimand == Estimand::kappa_i ? kappa_i : eta_from_kappa(kappa_i, length);
    const double h = stencil_step(estimand, epsilon);
    const QfiTag tag{estimand, access};

    if (access == Access::single_mode) {
        const auto occupation = occupation_map(model, setup, n_peak, kappa_i);
        auto n_of = [&](double e) { return occupation(kappa_of(estimand, e, length)); };
        return qfi_single_mode(n_of, epsilon, h, tag);
    }
    if (access == Access::ic_two_mode) {
        auto sigma_of = [&](double e) { return ic_two_mode_covariance(setup, n_peak, kappa_of(estimand, e, length)); };
        return qfi_two_mode(sigma_of, epsilon, h, tag);
    }
    if (model == Model::dl) {
        // Pin one quadrature rule for every stencil point.
        const GainSpec gain(n_peak, length);
        const PhaseMatching pm = phase_matching(setup, gain);
        const int nodes = dl_moments_adaptive(gain, pm, dl_params(setup, kappa_i)).quadrature_points;
        auto sigma_of = [&](double e) {
            return covariance_from_moments(dl_moments_fixed(gain, pm, dl_params(setup, kappa_of(estimand, e, length)), nodes));
        };
        return qfi_two_mode(sigma_of, epsilon, h, tag);
    }
    auto sigma_of = [&](double e) {
        return covariance_from_moments(full_access_moments(model, setup, n_peak, kappa_of(estimand, e, length)));
    };
    return qfi_two_mode(sigma_of, epsilon, h, tag);
}

QfiResult evaluate_qfi(Model model, Access access, Estimand estimand, Method method, const Scenario& setup,
                       double n_peak, double kappa_i) {
    if (method == Method::analytic) return analytic_qfi(model, access, estimand, setup, n_peak, kappa_i);
    return numeric_qfi(model, access, estimand, setup, n_peak, kappa_i);
}

IntensityDiffError evaluate_intensity_diff(Model model, const Scenario& setup, double n_peak, double kappa_i) {
    setup.validate();
    if (model == Model::ic) {
        throw std::invalid_argument("evaluate_intensity_diff: defined for the SU(1,1) and DL models only");
    }
    if (!(kappa_i > 0.0)) throw std::invalid_argument("evaluate_intensity_diff: kappa_i must be positive");
    const GainSpec gain(n_peak, setup.length);
    const PhaseMatching pm = phase_matching(setup, gain);
    std::function<Moments(double)> moments_of;
    if (model == Model::su11) {
        const double phi_p2 = second_pass_phase(model, setup, gain);
        moments_of = [&, phi_p2](double k) { return su11_moments(gain, pm, loss_channel(setup, k), phi_p2); };
    } else {
        const int nodes = dl_moments_adaptive(gain, pm, dl_params(setup, kappa_i)).quadrature_points;
        moments_of = [&, nodes](double k) { return dl_moments_fixed(gain, pm, dl_params(setup, k), nodes); };
    }
    return intensity_diff_error(moments_of, kappa_i, stencil_step(Estimand::kappa_i, kappa_i));
}

double evaluate_single_mode_intensity_error(Model model, const Scenario& setup, double n_peak, double kappa_i) {
    setup.validate();
    if (!(kappa_i > 0.0)) throw std::invalid_argument("evaluate_single_mode_intensity_error: kappa_i must be positive");
    const auto n_of = occupation_map(model, setup, n_peak, kappa_i);
    return single_mode_intensity_error(n_of, kappa_i, stencil_step(Estimand::kappa_i, kappa_i));
}

double dl_inverse_ratio(const Scenario& setup, double n_peak, double kappa_i, Estimand estimand) {
    const Moments m = full_access_moments(Model::dl, setup, n_peak, kappa_i);
    const QfiResult q = numeric_qfi(Model::dl, Access::all_modes, estimand, setup, n_peak, kappa_i);
    if (q.divergent()) return 0.0;
    return (m.n_s - m.n_i) / q.value;
}

FitReport fit_dl_alpha(const std::vector<std::pair<double, double>>& grid, double length) {
    if (grid.size() < 2) throw std::invalid_argument("fit_dl_alpha: grid must contain more than one point");
    Scenario setup;
    setup.length = length;
    std::vector<InverseRatioSample> samples;
    samples.reserve(grid.size());
    for (const auto& [kappa, gain] : grid) {
        if (!(kappa > 0.0)) throw std::invalid_argument("fit_dl_alpha: kappa_i must be positive");
        samples.push_back({kappa, gain, dl_inverse_ratio(setup, gain, kappa, Estimand::kappa_i)});
    }
    return fit_inverse_ratio(samples);
}

}  // namespace nlqfi
