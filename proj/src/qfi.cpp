#include "nlqfi/qfi.hpp"

#include "nlqfi/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace nlqfi {

namespace {

Matrix4c omega_matrix() {
    Matrix4c omega = Matrix4c::Zero();
    omega(0, 0) = omega(1, 1) = 1.0;
    omega(2, 2) = omega(3, 3) = -1.0;
    return omega;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

std::array<double, 2> symplectic_eigenvalues(const Matrix4c& sigma) {
    Eigen::ComplexEigenSolver<Matrix4c> solver(omega_matrix() * sigma, false);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("symplectic_eigenvalues: eigen decomposition failed");
    }
    std::array<double, 4> re{};
    for (int k = 0; k < 4; ++k) re[k] = solver.eigenvalues()(k).real();
    std::sort(re.begin(), re.end(), std::greater<>());
    return {re[0], re[1]};
}

CovarianceTwoMode::CovarianceTwoMode(const Matrix4c& sigma) : sigma_(sigma) {
    const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
    if ((sigma - sigma.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw UnphysicalState("covariance is not Hermitian");
    }
    const auto lambda = nlqfi::symplectic_eigenvalues(sigma);
    if (lambda[1] < 1.0 - kPhysicalityTolerance) {
        throw UnphysicalState("covariance violates the uncertainty relation (symplectic eigenvalue " +
                              std::to_string(lambda[1]) + " < 1)");
    }
}

Matrix4c CovarianceTwoMode::gamma() const { return omega_matrix() * sigma_; }

std::array<double, 2> CovarianceTwoMode::symplectic_eigenvalues() const {
    return nlqfi::symplectic_eigenvalues(sigma_);
}

CovarianceTwoMode covariance_from_moments(const Moments& m) {
    Matrix4c s = Matrix4c::Zero();
    s(0, 0) = s(2, 2) = 2.0 * m.n_s + 1.0;
    s(1, 1) = s(3, 3) = 2.0 * m.n_i + 1.0;
    s(0, 3) = s(1, 2) = 2.0 * m.m;
    s(2, 1) = s(3, 0) = 2.0 * std::conj(m.m);
    return CovarianceTwoMode(s);
}

CovarianceTwoMode covariance_ic(const ICMoments& ic) {
    Matrix4c s = Matrix4c::Zero();
    s(0, 0) = s(2, 2) = 2.0 * ic.n_s + 1.0;
    s(1, 1) = s(3, 3) = 2.0 * ic.n_a + 1.0;
    s(0, 1) = 2.0 * std::conj(ic.n_sa);
    s(1, 0) = 2.0 * ic.n_sa;
    s(2, 3) = 2.0 * ic.n_sa;
    s(3, 2) = 2.0 * std::conj(ic.n_sa);
    return CovarianceTwoMode(s);
}

double default_fd_step(double epsilon) { return std::max(1e-6 * std::abs(epsilon), 1e-12); }

QfiResult qfi_two_mode(const CovarianceMap& sigma_of, double epsilon, double fd_step, QfiTag tag) {
    if (!(fd_step > 0.0)) throw std::invalid_argument("qfi_two_mode: fd_step must be positive");

    QfiResult result;
    result.estimand = tag.estimand;
    result.access = tag.access;
    result.method = Method::numeric;

    const CovarianceTwoMode centre = sigma_of(epsilon);
    const Matrix4c g = centre.gamma();
    const auto lambda = centre.symplectic_eigenvalues();

    const bool pure1 = std::abs(lambda[0] - 1.0) < kPureStateGuard;
    const bool pure2 = std::abs(lambda[1] - 1.0) < kPureStateGuard;
    if (pure1 && pure2) {
        result.status = QfiStatus::divergent;
        result.value = kInf;
        return result;
    }

    auto gamma_at = [&](double e) -> Matrix4c { return sigma_of(e).gamma(); };
    auto lambda_at = [&](double e) -> Eigen::Vector2d {
        const auto l = sigma_of(e).symplectic_eigenvalues();
        return {l[0], l[1]};
    };
    const Matrix4c g_dot = richardson_derivative(gamma_at, epsilon, fd_step);
    const Eigen::Vector2d lambda_dot = richardson_derivative(lambda_at, epsilon, fd_step);

    const Matrix4c id = Matrix4c::Identity();
    const Matrix4c a = id + g * g;
    const Eigen::JacobiSVD<Matrix4c> svd(a);
    const auto& sv = svd.singularValues();
    if (sv(3) <= 0.0 || sv(0) / sv(3) > 1e12) {
        throw IllConditioned("qfi_two_mode: 1 + Gamma^2 is ill-conditioned");
    }

    const double det_g = g.determinant().real();
    const Matrix4c g_inv_dot = g.partialPivLu().solve(g_dot);
    const Matrix4c a_inv_dot = a.partialPivLu().solve(g_dot);
    const double term_g = det_g * (g_inv_dot * g_inv_dot).trace().real();
    const double term_a = std::sqrt(std::abs(a.determinant())) * (a_inv_dot * a_inv_dot).trace().real();

    double bracket = 0.0;
    if (!pure1) bracket -= lambda_dot(0) * lambda_dot(0) / (std::pow(lambda[0], 4) - 1.0);
    if (!pure2) bracket += lambda_dot(1) * lambda_dot(1) / (std::pow(lambda[1], 4) - 1.0);
    const double term_lambda = 4.0 * (lambda[0] * lambda[0] - lambda[1] * lambda[1]) * bracket;

    result.value = (term_g + term_a + term_lambda) / (2.0 * (det_g - 1.0));
    if (result.value < 0.0 && result.value > -1e-12 * (std::abs(term_g) + std::abs(term_a))) {
        result.value = 0.0;
    }
    return result;
}

double single_mode_qfi_purity(const Eigen::Matrix2d& sigma, const Eigen::Matrix2d& sigma_dot) {
    const double det = sigma.determinant();
    const Eigen::Matrix2d s_inv_dot = sigma.inverse() * sigma_dot;
    const double purity = 1.0 / std::sqrt(det);
    const double det_dot = det * s_inv_dot.trace();
    const double purity_dot = -0.5 * det_dot / (det * std::sqrt(det));
    const double p2 = purity * purity;
    const double first = (s_inv_dot * s_inv_dot).trace() / (2.0 * (1.0 + p2));
    if (purity_dot == 0.0) return first;
    return first + 2.0 * purity_dot * purity_dot / (1.0 - p2 * p2);
}

QfiResult qfi_single_mode(const std::function<double(double)>& n_of, double epsilon, double fd_step,
                          QfiTag tag) {
    if (!(fd_step > 0.0)) throw std::invalid_argument("qfi_single_mode: fd_step must be positive");
    QfiResult result;
    result.estimand = tag.estimand;
    result.access = tag.access;
    result.method = Method::numeric;

    const double n = n_of(epsilon);
    const double n_dot = richardson_derivative(n_of, epsilon, fd_step);
    if (n_dot == 0.0) {
        result.value = 0.0;
        return result;
    }
    if (!(n > 0.0)) {
        result.status = QfiStatus::divergent;
        result.value = kInf;
        return result;
    }
    result.value = n_dot * n_dot / (n * (n + 1.0));
    return result;
}

QfiResult reparametrize(const QfiResult& q, double eta, double length) {
    if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("reparametrize: eta must lie in (0, 1]");
    if (!(length > 0.0)) throw std::invalid_argument("reparametrize: length must be positive");
    const double jacobian = length * length * eta * eta;  // (∂η/∂κ)²
    QfiResult out = q;
    if (q.estimand == Estimand::eta_i) {
        out.estimand = Estimand::kappa_i;
        if (!q.divergent()) out.value = q.value * jacobian;
    } else {
        out.estimand = Estimand::eta_i;
        if (!q.divergent()) out.value = q.value / jacobian;
    }
    return out;
}

double intensity_diff_variance(const Moments& m) {
    return m.n_s * (m.n_s + 1.0) + m.n_i * (m.n_i + 1.0) - 2.0 * std::norm(m.m);
}

IntensityDiffError intensity_diff_error(const Moments& m, const Moments& dm_dkappa) {
    IntensityDiffError out;
    out.derivative = dm_dkappa.n_s - dm_dkappa.n_i;
    if (std::abs(out.derivative) < kVanishingDerivative) {
        out.vanishing_derivative = true;
        out.delta2_kappa = kInf;
        return out;
    }
    out.delta2_kappa = intensity_diff_variance(m) / (out.derivative * out.derivative);
    return out;
}

IntensityDiffError intensity_diff_error(const std::function<Moments(double)>& moments_of_kappa, double kappa,
                                        double fd_step) {
    if (!(fd_step > 0.0)) throw std::invalid_argument("intensity_diff_error: fd_step must be positive");
    const Moments centre = moments_of_kappa(kappa);
    auto diff = [&](double k) {
        const Moments m = moments_of_kappa(k);
        return m.n_s - m.n_i;
    };
    Moments derivative;
    derivative.n_s = richardson_derivative(diff, kappa, fd_step);
    return intensity_diff_error(centre, derivative);
}

double single_mode_intensity_error(const std::function<double(double)>& n_of, double epsilon, double fd_step) {
    if (!(fd_step > 0.0)) throw std::invalid_argument("single_mode_intensity_error: fd_step must be positive");
    const double n = n_of(epsilon);
    const double n_dot = richardson_derivative(n_of, epsilon, fd_step);
    if (std::abs(n_dot) < kVanishingDerivative) return kInf;
    return n * (n + 1.0) / (n_dot * n_dot);
}

FitReport fit_inverse_ratio(const std::vector<InverseRatioSample>& samples) {
    std::map<double, std::vector<const InverseRatioSample*>> by_gain;
    for (const auto& s : samples) by_gain[s.gain].push_back(&s);
    if (by_gain.size() < 3) throw std::invalid_argument("fit_inverse_ratio: need at least 3 gain levels");
    for (const auto& [gain, group] : by_gain) {
        if (group.size() < 3) throw std::invalid_argument("fit_inverse_ratio: need at least 3 points per gain");
    }

    double sxy = 0.0;
    double sxx = 0.0;
    for (const auto& s : samples) {
        const double x = s.kappa * s.kappa;
        sxy += x * s.inverse_ratio;
        sxx += x * x;
    }
    FitReport report;
    report.alpha = sxy / sxx;
    report.residuals.reserve(samples.size());
    for (const auto& s : samples) {
        report.residuals.push_back(s.inverse_ratio - report.alpha * s.kappa * s.kappa);
    }

    double total = 0.0;
    for (const auto& [gain, group] : by_gain) {
        double mean = 0.0;
        for (const auto* s : group) mean += s->inverse_ratio;
        mean /= static_cast<double>(group.size());
        double ss_res = 0.0;
        double ss_tot = 0.0;
        for (const auto* s : group) {
            const double r = s->inverse_ratio - report.alpha * s->kappa * s->kappa;
            ss_res += r * r;
            ss_tot += (s->inverse_ratio - mean) * (s->inverse_ratio - mean);
        }
        const double r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
        report.r_squared_per_gain.push_back(r2);
        total += r2;
    }
    report.r_squared = total / static_cast<double>(by_gain.size());
    return report;
}

}  // namespace nlqfi
