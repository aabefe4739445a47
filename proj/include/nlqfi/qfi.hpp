#pragma once

#include "nlqfi/configurations.hpp"
#include "nlqfi/twinbeam.hpp"

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <type_traits>
#include <vector>

namespace nlqfi {

enum class Estimand { eta_i, kappa_i };
enum class Access { all_modes, ic_two_mode, single_mode };
enum class Method { analytic, numeric };
enum class QfiStatus { ok, divergent };

/// QFI value: dimensionless for the η estimand, nm² for the κ estimand. Divergent
/// results carry +inf.
struct QfiResult {
    double value = 0.0;
    Estimand estimand = Estimand::eta_i;
    Access access = Access::all_modes;
    Method method = Method::numeric;
    QfiStatus status = QfiStatus::ok;

    bool divergent() const noexcept { return status == QfiStatus::divergent; }
};

struct QfiTag {
    Estimand estimand = Estimand::eta_i;
    Access access = Access::all_modes;
};

using Matrix4c = Eigen::Matrix<cplx, 4, 4>;

// Lower bound accepted for a symplectic eigenvalue of a physical state.
inline constexpr double kPhysicalityTolerance = 1e-9;
// Symplectic eigenvalues closer than this to 1 are treated as pure directions.
inline constexpr double kPureStateGuard = 1e-7;

/// Two-mode covariance in the ordering (a_S, a_I, a_S†, a_I†) with
/// σ_ij = <r_i r_j† + r_j† r_i> (no factor ½; vacuum is the identity).
class CovarianceTwoMode {
public:
    /// Throws UnphysicalState if σ is not Hermitian or violates the uncertainty relation.
    explicit CovarianceTwoMode(const Matrix4c& sigma);

    const Matrix4c& sigma() const noexcept { return sigma_; }
    /// Γ = Ωσ with Ω = diag(1, 1, −1, −1).
    Matrix4c gamma() const;
    /// Positive eigenvalues of Γ, descending.
    std::array<double, 2> symplectic_eigenvalues() const;

private:
    Matrix4c sigma_;
};

struct CovarianceSingleMode {
    double n = 0.0;
    Eigen::Matrix2d sigma() const { return (2.0 * n + 1.0) * Eigen::Matrix2d::Identity(); }
};

std::array<double, 2> symplectic_eigenvalues(const Matrix4c& sigma);

CovarianceTwoMode covariance_from_moments(const Moments& m);
/// Signal/ancilla covariance of the IC output with the idler traced out.
CovarianceTwoMode covariance_ic(const ICMoments& ic);

/// Step policy for central differences: max(1e-6·|ε|, 1e-12).
double default_fd_step(double epsilon);

/// Central difference at steps h and h/2 combined by one Richardson extrapolation.
template <class F>
auto richardson_derivative(const F& f, double x, double h) {
    using T = std::decay_t<decltype(f(x))>;
    const T coarse = (f(x + h) - f(x - h)) / (2.0 * h);
    const T fine = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h;
    return T((4.0 * fine - coarse) / 3.0);
}

using CovarianceMap = std::function<CovarianceTwoMode(double)>;

/// Two-mode Gaussian QFI of a zero-mean state family σ(ε). Throws IllConditioned when
/// cond(1 + Γ²) exceeds 1e12. A state with both symplectic eigenvalues at 1 yields a
/// divergent result.
QfiResult qfi_two_mode(const CovarianceMap& sigma_of, double epsilon, double fd_step, QfiTag tag = {});

/// Thermal single-mode QFI Ṅ²/(N(N+1)); divergent when N vanishes while Ṅ does not.
QfiResult qfi_single_mode(const std::function<double(double)>& n_of, double epsilon, double fd_step,
                          QfiTag tag = {Estimand::eta_i, Access::single_mode});

/// General single-mode Gaussian QFI from σ and dσ/dε through the purity P = |σ|^{-1/2}.
double single_mode_qfi_purity(const Eigen::Matrix2d& sigma, const Eigen::Matrix2d& sigma_dot);

/// Converts between the η and κ estimands: H_κ = H_η · L² · η².
QfiResult reparametrize(const QfiResult& q, double eta, double length);

/// Var(N̂_S − N̂_I) = N_S(N_S+1) + N_I(N_I+1) − 2|M|².
double intensity_diff_variance(const Moments& m);

struct IntensityDiffError {
    double delta2_kappa = 0.0;         // +inf when flagged
    double derivative = 0.0;           // ∂(N_S − N_I)/∂κ_I
    bool vanishing_derivative = false;

    double inverse() const noexcept { return vanishing_derivative ? 0.0 : 1.0 / delta2_kappa; }
};

inline constexpr double kVanishingDerivative = 1e-30;

/// Photon-counting error on a thermal single mode: Δ²ε = N(N+1)/(∂N/∂ε)².
double single_mode_intensity_error(const std::function<double(double)>& n_of, double epsilon, double fd_step);

IntensityDiffError intensity_diff_error(const Moments& m, const Moments& dm_dkappa);
IntensityDiffError intensity_diff_error(const std::function<Moments(double)>& moments_of_kappa, double kappa,
                                        double fd_step);

struct FitReport {
    double alpha = 0.0;
    double r_squared = 0.0;                 // mean of the per-gain values
    std::vector<double> r_squared_per_gain;
    std::vector<double> residuals;
};

/// One point of (N_S − N_I)/H_κ against κ.
struct InverseRatioSample {
    double kappa = 0.0;
    double gain = 0.0;
    double inverse_ratio = 0.0;
};

/// Least-squares fit of inverse_ratio = α κ² pooled over all gains; R² is computed per
/// gain level as 1 − SS_res/SS_tot and averaged.
FitReport fit_inverse_ratio(const std::vector<InverseRatioSample>& samples);

}  // namespace nlqfi
