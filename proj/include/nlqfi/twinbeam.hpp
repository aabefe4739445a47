#pragma once

#include "nlqfi/spectral.hpp"

#include <complex>

namespace nlqfi {

using cplx = std::complex<double>;

/// Block elements of the 2x2 transfer matrix acting on (a_S(ω), a_I†(−ω)).
struct Propagator {
    cplx u_ss{1.0, 0.0};
    cplx u_ii{1.0, 0.0};
    cplx u_si{};
    cplx u_is{};
};

/// Second-order moments of a signal/idler pair: occupations N_S = <a_S† a_S>,
/// N_I = <a_I† a_I> and the phase-sensitive correlator M = <a_S a_I>.
/// Moments are per-mode occupation numbers (the grid rescaling a = c·sqrt(Δω) is
/// already absorbed).
struct Moments {
    double n_s = 0.0;
    double n_i = 0.0;
    cplx m{};
};

/// Beamsplitter loss with extra phases between the two squeezers.
struct LossChannel {
    double eta_s = 1.0;
    double eta_i = 1.0;
    double phi_s = 0.0;
    double phi_i = 0.0;

    void validate() const;
    // Idler-only loss with no added phases.
    static LossChannel idler_only(double eta_i);
};

// |νL| below this switches sin(νL/2)/ν and cos(νL/2) to their Taylor series.
inline constexpr double kSeriesThreshold = 1e-4;

/// Lossless propagator U = exp(iQL) from the closed-form block elements. `pm.nu`
/// must have been evaluated for |gamma|.
Propagator propagator(const PhaseMatching& pm, cplx gamma, double length);

/// Same closed form with complex mismatch quantities; this is how distributed loss
/// enters (Δk_S → Δk_S + iκ_S/2, Δk_I → Δk_I − iκ_I/2). ν is recomputed here.
Propagator propagator(cplx delta_K, cplx sigma_K, cplx gamma, double length);

Moments vacuum_moments(const Propagator& p);

/// Moments after a lossless pass seeded with `input`. `gamma` is the complex coupling
/// the propagator was built with (its phase carries the pump phase).
Moments seeded_moments(const Propagator& p, const Moments& input, cplx gamma);

Moments apply_loss(const Moments& input, const LossChannel& ch);

}  // namespace nlqfi
