#include "nlqfi/app/sweep.hpp"

#include "nlqfi/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace nlqfi::app {

std::string to_string(Flag f) {
    switch (f) {
        case Flag::ok: return "ok";
        case Flag::divergent: return "divergent";
        case Flag::vanishing_derivative: return "vanishing_derivative";
    }
    return "?";
}

Flag flag_from_string(const std::string& s) {
    if (s == "ok") return Flag::ok;
    if (s == "divergent") return Flag::divergent;
    if (s == "vanishing_derivative") return Flag::vanishing_derivative;
    throw std::invalid_argument("unknown flag '" + s + "'");
}

std::string SweepResult::header_value(const std::string& key) const {
    for (const auto& [k, v] : header) {
        if (k == key) return v;
    }
    return {};
}

std::vector<double> SweepResult::gains() const {
    std::vector<double> out;
    for (const auto& r : rows) {
        if (out.empty() || out.back() != r.gain) out.push_back(r.gain);
    }
    return out;
}

std::vector<SweepRow> SweepResult::rows_for_gain(double gain) const {
    std::vector<SweepRow> out;
    for (const auto& r : rows) {
        if (r.gain == gain) out.push_back(r);
    }
    return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Point {
    double gain;
    double kappa;
};

struct Evaluated {
    double value = 0.0;
    Flag flag = Flag::ok;
    double derivative = 0.0;  // intensity-difference slope, for dip detection
};

Evaluated evaluate_point(const RunConfig& cfg, const Scenario& sc, const Point& p) {
    Evaluated out;
    const double eta = eta_from_kappa(p.kappa, cfg.length_nm);
    switch (cfg.quantity) {
        case Quantity::qfi: {
            Method method = cfg.method == MethodChoice::analytic ? Method::analytic : Method::numeric;
            if (cfg.method == MethodChoice::automatic && analytic_available(cfg.model, cfg.access, sc)) {
                method = Method::analytic;
            }
            const QfiResult q = evaluate_qfi(cfg.model, cfg.access, cfg.estimand, method, sc, p.gain, p.kappa);
            out.value = q.value;
            if (q.divergent()) out.flag = Flag::divergent;
            break;
        }
        case Quantity::intensity_diff: {
            const IntensityDiffError e = evaluate_intensity_diff(cfg.model, sc, p.gain, p.kappa);
            out.derivative = e.derivative;
            // The η-estimand error follows from Δ²η = (∂η/∂κ)² Δ²κ.
            const double scale = cfg.estimand == Estimand::kappa_i ? 1.0 : 1.0 / std::pow(cfg.length_nm * eta, 2);
            out.value = e.inverse() * scale;
            if (e.vanishing_derivative) out.flag = Flag::vanishing_derivative;
            break;
        }
        case Quantity::inverse_ratio:
            out.value = dl_inverse_ratio(sc, p.gain, p.kappa, cfg.estimand);
            break;
    }
    return out;
}

// Between two neighbouring points whose slopes have opposite signs the slope passes
// through zero; the point closer to it (smaller |slope|) is flagged.
void flag_sign_changes(std::vector<Evaluated>& values, std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k + 1 < end; ++k) {
        const double a = values[k].derivative;
        const double b = values[k + 1].derivative;
        if (a == 0.0 || b == 0.0 || (a > 0.0) == (b > 0.0)) continue;
        auto& target = std::abs(a) <= std::abs(b) ? values[k] : values[k + 1];
        target.flag = Flag::vanishing_derivative;
    }
}

}  // namespace

SweepResult run_sweep(const RunConfig& cfg) {
    const Scenario sc = cfg.scenario();
    sc.validate();

    std::vector<double> gains = cfg.gains;
    std::sort(gains.begin(), gains.end());
    gains.erase(std::unique(gains.begin(), gains.end()), gains.end());
    const std::vector<double> kappas = cfg.grid.points();

    std::vector<Point> points;
    points.reserve(gains.size() * kappas.size());
    for (double g : gains) {
        for (double k : kappas) points.push_back({g, k});
    }

    std::vector<Evaluated> values(points.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            try {
                values[i] = evaluate_point(cfg, sc, points[i]);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = points.size();
            }
        }
    };
    unsigned n_threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : std::thread::hardware_concurrency();
    n_threads = std::clamp(n_threads, 1u, static_cast<unsigned>(std::max<std::size_t>(points.size(), 1)));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    if (cfg.quantity == Quantity::intensity_diff) {
        for (std::size_t g = 0; g < gains.size(); ++g) {
            flag_sign_changes(values, g * kappas.size(), (g + 1) * kappas.size());
        }
    }

    SweepResult out;
    out.header = {
        {"model", to_string(cfg.model)},
        {"access", to_string(cfg.access)},
        {"estimand", to_string(cfg.estimand)},
        {"quantity", to_string(cfg.quantity)},
        {"method", to_string(cfg.method)},
        {"length_nm", fmt::format("{}", cfg.length_nm)},
        {"config_hash", fmt::format("{:016x}", cfg.hash())},
        {"units", cfg.estimand == Estimand::kappa_i ? "kappa_i in nm^-1; value in nm^2" : "kappa_i in nm^-1; value dimensionless"},
        {"columns", "kappa_i_nm^-1: idler decay rate; eta_i: exp(-kappa_i L); gain_Npeak: peak single-pass signal occupation; value: " +
                        to_string(cfg.quantity) + "; flag: ok|divergent|vanishing_derivative"},
    };
    out.rows.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        out.rows.push_back({points[i].kappa, eta_from_kappa(points[i].kappa, cfg.length_nm), points[i].gain, values[i].value,
                            values[i].flag});
    }
    return out;
}

namespace {

void check_matching(const SweepResult& a, const SweepResult& b) {
    if (a.rows.size() != b.rows.size()) throw std::invalid_argument("crossover: sweeps have different grids");
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        if (a.rows[i].gain != b.rows[i].gain || std::abs(a.rows[i].kappa_i - b.rows[i].kappa_i) > 1e-12 * a.rows[i].kappa_i) {
            throw std::invalid_argument("crossover: sweeps have different grids");
        }
    }
}

bool usable(const SweepRow& r) { return r.flag == Flag::ok && std::isfinite(r.value) && r.value > 0.0; }

}  // namespace

std::vector<Crossover> crossover(const SweepResult& a, const SweepResult& b) {
    check_matching(a, b);
    std::vector<Crossover> out;
    for (double gain : a.gains()) {
        Crossover c{gain, std::nullopt};
        double prev_x = 0.0, prev_y = 0.0;
        bool have_prev = false;
        for (std::size_t i = 0; i < a.rows.size() && !c.kappa; ++i) {
            if (a.rows[i].gain != gain) continue;
            if (!usable(a.rows[i]) || !usable(b.rows[i])) continue;
            const double x = std::log(a.rows[i].kappa_i);
            const double y = std::log(a.rows[i].value / b.rows[i].value);
            if (y == 0.0) continue;  // touching is not crossing
            if (have_prev && (prev_y > 0.0) != (y > 0.0)) {
                c.kappa = std::exp(prev_x + (x - prev_x) * prev_y / (prev_y - y));
            }
            prev_x = x;
            prev_y = y;
            have_prev = true;
        }
        out.push_back(c);
    }
    return out;
}

SweepResult log_ratio(const SweepResult& a, const SweepResult& b, const std::string& label) {
    check_matching(a, b);
    SweepResult out;
    out.header = {{"quantity", "log_ratio"},
                  {"ratio", label},
                  {"numerator_hash", a.header_value("config_hash")},
                  {"denominator_hash", b.header_value("config_hash")},
                  {"columns", "value: natural log of numerator/denominator; flag: worst flag of the pair"}};
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        SweepRow r = a.rows[i];
        const Flag fb = b.rows[i].flag;
        r.flag = std::max(r.flag, fb, [](Flag x, Flag y) { return static_cast<int>(x) < static_cast<int>(y); });
        if (usable(a.rows[i]) && usable(b.rows[i])) r.value = std::log(a.rows[i].value / b.rows[i].value);
        else r.value = std::numeric_limits<double>::quiet_NaN();
        out.rows.push_back(r);
    }
    return out;
}

}  // namespace nlqfi::app
