#pragma once

// Model-level evaluation: which state each (model, access) pair refers to, how the
// loss parameter enters it, and the QFI / intensity-difference quantities built on it.

#include "nlqfi/configurations.hpp"
#include "nlqfi/qfi.hpp"
#include "nlqfi/spectral.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace nlqfi {

struct Scenario {
    double length = kDefaultLengthNm;
    DispersionProfile dispersion;
    double omega = 0.0;                 // evaluated detuning
    double kappa_s = 0.0;
    double phi_s = 0.0;
    double phi_i = 0.0;
    std::optional<double> phi_p2;       // empty: anti-squeezing (SU(1,1)) / optimal arm phase (IC)
    int quadrature_points = 32;

    void validate() const;
};

PhaseMatching phase_matching(const Scenario& setup, const GainSpec& gain);
LossChannel loss_channel(const Scenario& setup, double kappa_i);
double second_pass_phase(Model model, const Scenario& setup, const GainSpec& gain);

/// State carrying all the information about κ_I: before the second pass for SU(1,1)
/// and IC, at the crystal output for DL.
Moments full_access_moments(Model model, const Scenario& setup, double n_peak, double kappa_i);

/// Occupation of the single detected mode: SU(1,1) signal after the second pass, DL
/// signal, IC "−" beamsplitter arm.
double single_mode_occupation(Model model, const Scenario& setup, double n_peak, double kappa_i);

CovarianceTwoMode ic_two_mode_covariance(const Scenario& setup, double n_peak, double kappa_i);

bool analytic_available(Model model, Access access, const Scenario& setup);

/// Closed-form QFI for SU(1,1)/IC full access (idler-only loss) and the phase-matched
/// two-mode IC state. Throws std::invalid_argument when no closed form applies.
QfiResult analytic_qfi(Model model, Access access, Estimand estimand, const Scenario& setup, double n_peak,
                       double kappa_i);

QfiResult numeric_qfi(Model model, Access access, Estimand estimand, const Scenario& setup, double n_peak,
                      double kappa_i);

QfiResult evaluate_qfi(Model model, Access access, Estimand estimand, Method method, const Scenario& setup,
                       double n_peak, double kappa_i);

/// Signal–idler intensity-difference error for estimating κ_I (SU(1,1) and DL).
IntensityDiffError evaluate_intensity_diff(Model model, const Scenario& setup, double n_peak, double kappa_i);

/// Δ²κ_I from counting photons in the single detected mode.
double evaluate_single_mode_intensity_error(Model model, const Scenario& setup, double n_peak, double kappa_i);

/// DL (N_S − N_I)/H_ε for the chosen estimand.
double dl_inverse_ratio(const Scenario& setup, double n_peak, double kappa_i, Estimand estimand);

/// Fits (N_S − N_I)/H_κ ≈ α κ² for the phase-matched DL model over (κ_I, N^P) points.
FitReport fit_dl_alpha(const std::vector<std::pair<double, double>>& grid, double length);

}  // namespace nlqfi
