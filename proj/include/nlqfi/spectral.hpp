#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace nlqfi {

// Units used throughout: lengths in nm, wavevectors and decay rates in nm^-1,
// frequency detunings in rad/s.

class FrequencyGrid {
public:
    FrequencyGrid(double omega0, double delta_omega, std::size_t n_points);

    double omega0() const noexcept { return omega0_; }
    double delta_omega() const noexcept { return delta_omega_; }
    std::size_t size() const noexcept { return n_points_; }

    // omega0 + n * delta_omega, evaluated directly rather than by accumulation.
    double point(std::size_t n) const;
    double front() const noexcept { return omega0_; }
    double back() const noexcept { return point(n_points_ - 1); }

private:
    double omega0_;
    double delta_omega_;
    std::size_t n_points_;
};

/// Detuned dispersion relations Δk_S(ω), Δk_I(ω) as truncated Taylor series in the
/// detuning. Coefficient k multiplies ω^k; the constant term must be zero so that
/// both relations vanish at the central frequency.
class DispersionProfile {
public:
    DispersionProfile() = default;
    DispersionProfile(std::vector<double> taylor_s, std::vector<double> taylor_i);

    const std::vector<double>& taylor_s() const noexcept { return taylor_s_; }
    const std::vector<double>& taylor_i() const noexcept { return taylor_i_; }

    double delta_k_s(double omega) const;
    double delta_k_i(double omega) const;

    // Taylor coefficients of Σ_K(ω) = Δk_S(ω) + Δk_I(−ω).
    std::vector<double> sigma_coefficients() const;

private:
    std::vector<double> taylor_s_;
    std::vector<double> taylor_i_;
};

struct PhaseMatching {
    double delta_K = 0.0;         // Δk_S(ω) − Δk_I(−ω)
    double sigma_K = 0.0;         // Δk_S(ω) + Δk_I(−ω)
    std::complex<double> nu{};    // principal sqrt(Σ_K² − 4|γ|²)
};

PhaseMatching evaluate_mismatch(const DispersionProfile& profile, double omega, double gamma_abs);

/// Root of Σ_K nearest ω = 0 within [grid.front(), grid.back()]. Returns 0 when Σ_K
/// vanishes identically. Throws NoPhaseMatchedPoint when Σ_K keeps one strict sign on
/// every grid point.
double phase_matched_frequency(const DispersionProfile& profile, const FrequencyGrid& grid);

// Horner evaluation of sum_k c[k] x^k.
double evaluate_taylor(const std::vector<double>& coefficients, double x);

}  // namespace nlqfi
