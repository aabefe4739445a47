#pragma once

#include "nlqfi/spectral.hpp"
#include "nlqfi/twinbeam.hpp"

namespace nlqfi {

enum class Model { su11, ic, dl };

// Default interaction length, 40 mm.
inline constexpr double kDefaultLengthNm = 4e7;

/// Gain expressed as the peak single-pass signal occupation N^P_S = sinh²(|γ|L).
class GainSpec {
public:
    GainSpec(double n_peak, double length);
    static GainSpec from_gamma(double gamma_abs, double length);

    double n_peak() const noexcept { return n_peak_; }
    double length() const noexcept { return length_; }
    double gamma_abs() const noexcept { return gamma_abs_; }

private:
    GainSpec(double n_peak, double length, double gamma_abs);

    double n_peak_;
    double length_;
    double gamma_abs_;
};

/// Output moments of the induced-coherence setup. n_sa = <a_S† a_A>, m_si = <a_S a_I>,
/// m_ai = <a_A a_I>.
struct ICMoments {
    double n_s = 0.0;
    double n_i = 0.0;
    double n_a = 0.0;
    cplx n_sa{};
    cplx m_si{};
    cplx m_ai{};
};

struct DLParams {
    double kappa_s = 0.0;
    double kappa_i = 0.0;
    double length = kDefaultLengthNm;
    int quadrature_points = 32;

    void validate() const;
};

double eta_from_kappa(double kappa, double length);
double kappa_from_eta(double eta, double length);

/// Vacuum moments of a single lossless pass at |γ| (pump phase zero).
Moments single_pass_moments(const GainSpec& gain, const PhaseMatching& pm);

// SU(1,1): first pass at pump phase 0, loss channel, second pass at pump phase phi_p2.
// su11_moments composes the twin-beam pipeline; su11_closed_form evaluates the
// equivalent closed expressions directly.
Moments su11_moments(const GainSpec& gain, const PhaseMatching& pm, const LossChannel& ch, double phi_p2);
Moments su11_closed_form(const GainSpec& gain, const PhaseMatching& pm, const LossChannel& ch, double phi_p2);

/// Second-pass pump phase for which the second squeezer undoes the first one
/// (minimal signal output at unit transmission). Returns π at phase matching with no
/// added phases. Result lies in [0, 2π).
double anti_squeeze_phase(const GainSpec& gain, const PhaseMatching& pm, const LossChannel& ch);

ICMoments ic_moments(const GainSpec& gain, const PhaseMatching& pm, const LossChannel& ch, double phi_p2);

/// Pump phase maximising Im(n_sa), i.e. sin(ΔK L/2 − Φ) = 1 in the beamsplitter arms.
double ic_optimal_phase(const GainSpec& gain, const PhaseMatching& pm, const LossChannel& ch);

/// Occupation of the ± output arm after mixing signal and ancilla on a 50:50 splitter.
double ic_balanced_bs(const ICMoments& ic, int sign);

/// N^{Dist,V}(z) and M^{Dist,V}(z): the vacuum-driven part of a lossy pass of length z.
Moments dl_vacuum_moments(const GainSpec& gain, const PhaseMatching& pm, double kappa_s, double kappa_i,
                          double z);

struct DLEvaluation {
    Moments moments;
    int quadrature_points = 0;  // node count of the accepted rule
};

/// Distributed-loss output moments. Bath integrals use Gauss–Legendre rules starting at
/// dl.quadrature_points and doubling until successive estimates agree to 1e-10
/// relative; throws QuadratureNotConverged after six doublings.
Moments dl_moments(const GainSpec& gain, const PhaseMatching& pm, const DLParams& dl);
DLEvaluation dl_moments_adaptive(const GainSpec& gain, const PhaseMatching& pm, const DLParams& dl);
// Single fixed rule; used where neighbouring evaluations must share their nodes.
Moments dl_moments_fixed(const GainSpec& gain, const PhaseMatching& pm, const DLParams& dl, int nodes);

}  // namespace nlqfi
