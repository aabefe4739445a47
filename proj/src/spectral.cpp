#include "nlqfi/spectral.hpp"

#include "nlqfi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace nlqfi {

FrequencyGrid::FrequencyGrid(double omega0, double delta_omega, std::size_t n_points)
    : omega0_(omega0), delta_omega_(delta_omega), n_points_(n_points) {
    if (!(delta_omega > 0.0) || !std::isfinite(delta_omega)) {
        throw std::invalid_argument("FrequencyGrid: delta_omega must be positive");
    }
    if (n_points == 0) {
        throw std::invalid_argument("FrequencyGrid: n_points must be at least 1");
    }
    if (!std::isfinite(omega0)) {
        throw std::invalid_argument("FrequencyGrid: omega0 must be finite");
    }
}

double FrequencyGrid::point(std::size_t n) const {
    if (n >= n_points_) {
        throw std::out_of_range("FrequencyGrid::point: index out of range");
    }
    return omega0_ + static_cast<double>(n) * delta_omega_;
}

DispersionProfile::DispersionProfile(std::vector<double> taylor_s, std::vector<double> taylor_i)
    : taylor_s_(std::move(taylor_s)), taylor_i_(std::move(taylor_i)) {
    auto check = [](const std::vector<double>& c, const char* branch) {
        if (!c.empty() && c.front() != 0.0) {
            throw std::invalid_argument(std::string("DispersionProfile: constant Taylor term of ") + branch +
                                        " must be zero");
        }
        for (double v : c) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument(std::string("DispersionProfile: non-finite coefficient in ") +
                                            branch);
            }
        }
    };
    check(taylor_s_, "taylor_s");
    check(taylor_i_, "taylor_i");
}

double evaluate_taylor(const std::vector<double>& coefficients, double x) {
    double acc = 0.0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) {
        acc = acc * x + *it;
    }
    return acc;
}

double DispersionProfile::delta_k_s(double omega) const { return evaluate_taylor(taylor_s_, omega); }

double DispersionProfile::delta_k_i(double omega) const { return evaluate_taylor(taylor_i_, omega); }

std::vector<double> DispersionProfile::sigma_coefficients() const {
    std::vector<double> out(std::max(taylor_s_.size(), taylor_i_.size()), 0.0);
    for (std::size_t k = 0; k < taylor_s_.size(); ++k) out[k] += taylor_s_[k];
    for (std::size_t k = 0; k < taylor_i_.size(); ++k) {
        out[k] += (k % 2 == 0 ? 1.0 : -1.0) * taylor_i_[k];
    }
    return out;
}

PhaseMatching evaluate_mismatch(const DispersionProfile& profile, double omega, double gamma_abs) {
    if (!(gamma_abs >= 0.0)) {
        throw std::invalid_argument("evaluate_mismatch: gamma_abs must be non-negative");
    }
    const double ks = profile.delta_k_s(omega);
    const double ki = profile.delta_k_i(-omega);
    PhaseMatching pm;
    pm.delta_K = ks - ki;
    pm.sigma_K = ks + ki;
    pm.nu = std::sqrt(std::complex<double>(pm.sigma_K * pm.sigma_K - 4.0 * gamma_abs * gamma_abs, 0.0));
    return pm;
}

namespace {

double bisect_root(const std::vector<double>& sigma, double lo, double hi) {
    double f_lo = evaluate_taylor(sigma, lo);
    for (int iter = 0; iter < 2000; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) return mid;
        const double f_mid = evaluate_taylor(sigma, mid);
        if (std::abs(f_mid) < 1e-15) return mid;
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double phase_matched_frequency(const DispersionProfile& profile, const FrequencyGrid& grid) {
    const auto sigma = profile.sigma_coefficients();
    if (std::all_of(sigma.begin(), sigma.end(), [](double c) { return c == 0.0; })) {
        return 0.0;
    }

    std::optional<double> best;
    auto consider = [&best](double root) {
        if (!best || std::abs(root) < std::abs(*best)) best = root;
    };

    double prev_w = grid.point(0);
    double prev_f = evaluate_taylor(sigma, prev_w);
    if (prev_f == 0.0) consider(prev_w);
    for (std::size_t n = 1; n < grid.size(); ++n) {
        const double w = grid.point(n);
        const double f = evaluate_taylor(sigma, w);
        if (f == 0.0) {
            consider(w);
        } else if (prev_f != 0.0 && (f < 0.0) != (prev_f < 0.0)) {
            consider(bisect_root(sigma, prev_w, w));
        }
        prev_w = w;
        prev_f = f;
    }
    if (!best) {
        throw NoPhaseMatchedPoint("phase_matched_frequency: Sigma_K does not change sign on the grid");
    }
    return *best;
}

}  // namespace nlqfi
