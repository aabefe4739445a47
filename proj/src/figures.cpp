#include "nlqfi/app/figures.hpp"

#include "nlqfi/app/plot.hpp"
#include "nlqfi/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <stdexcept>

namespace nlqfi::app {

namespace {

struct Curve {
    Model model;
    Access access;
    std::string label;
};

struct Panel {
    std::string title;
    Curve a;
    std::optional<Curve> b;  // set: plot log(a/b)
};

const Curve kSu11Full{Model::su11, Access::all_modes, "SU(1,1)/IC"};
const Curve kDlFull{Model::dl, Access::all_modes, "DL"};
const Curve kIcTwo{Model::ic, Access::ic_two_mode, "IC two-mode"};
const Curve kSu11One{Model::su11, Access::single_mode, "SU(1,1) single-mode"};
const Curve kDlOne{Model::dl, Access::single_mode, "DL single-mode"};
const Curve kIcOne{Model::ic, Access::single_mode, "IC single-mode"};

const std::map<std::string, Panel>& fig2_panels() {
    static const std::map<std::string, Panel> panels{
        {"fig2a", {"Full-access QFI, SU(1,1)/IC", kSu11Full, std::nullopt}},
        {"fig2b", {"Full-access QFI, DL", kDlFull, std::nullopt}},
        {"fig2c", {"log(H_DL / H_SU(1,1)), full access", kDlFull, kSu11Full}},
        {"fig2d", {"Two-mode QFI, IC", kIcTwo, std::nullopt}},
        {"fig2e", {"log(H_IC two-mode / H_SU(1,1) single-mode)", kIcTwo, kSu11One}},
        {"fig2f", {"log(H_IC two-mode / H_DL single-mode)", kIcTwo, kDlOne}},
        {"fig2g", {"Single-mode QFI, SU(1,1)", kSu11One, std::nullopt}},
        {"fig2h", {"Single-mode QFI, DL", kDlOne, std::nullopt}},
        {"fig2i", {"Single-mode QFI, IC", kIcOne, std::nullopt}},
        {"fig2j", {"log(H_DL / H_SU(1,1)), single-mode", kDlOne, kSu11One}},
        {"fig2k", {"log(H_IC / H_SU(1,1)), single-mode", kIcOne, kSu11One}},
        {"fig2l", {"log(H_IC / H_DL), single-mode", kIcOne, kDlOne}},
    };
    return panels;
}

RunConfig variant(const RunConfig& base, Model model, Access access, Estimand estimand, Quantity quantity) {
    RunConfig cfg = base;
    cfg.model = model;
    cfg.access = access;
    cfg.estimand = estimand;
    cfg.quantity = quantity;
    cfg.method = MethodChoice::automatic;
    return cfg;
}

SweepResult qfi_sweep(const RunConfig& base, const Curve& c) {
    return run_sweep(variant(base, c.model, c.access, Estimand::kappa_i, Quantity::qfi));
}

std::string gain_label(double g) { return fmt::format("N^P = {}", g); }

PlotSpec spec_from(const SweepResult& r, const std::string& title, const std::string& y_label, bool log_y, bool x_is_eta = false,
                   bool mark_flags = false) {
    PlotSpec spec;
    spec.title = title;
    spec.x_label = x_is_eta ? "eta_I" : "kappa_I [nm^-1]";
    spec.y_label = y_label;
    spec.log_y = log_y;
    for (double g : r.gains()) {
        Series s;
        s.label = gain_label(g);
        for (const auto& row : r.rows_for_gain(g)) {
            s.x.push_back(x_is_eta ? row.eta_i : row.kappa_i);
            const bool flagged = row.flag == Flag::vanishing_derivative;
            s.y.push_back(flagged && !mark_flags ? std::nan("") : row.value);
            s.marked.push_back(mark_flags && flagged);
        }
        spec.series.push_back(std::move(s));
    }
    return spec;
}

std::string emit(const std::string& dir, const std::string& name, const SweepResult& r, const PlotSpec& spec,
                 std::vector<std::string>& files) {
    const std::string csv = (std::filesystem::path(dir) / (name + ".csv")).string();
    const std::string svg = (std::filesystem::path(dir) / (name + ".svg")).string();
    write_csv(csv, r);
    write_svg(svg, spec);
    files.push_back(csv);
    files.push_back(svg);
    return csv;
}

void add_crossovers(SweepResult& ratio, const SweepResult& a, const SweepResult& b) {
    for (const auto& c : crossover(a, b)) {
        ratio.header.emplace_back(fmt::format("crossover_gain_{}", c.gain), c.kappa ? fmt::format("{}", *c.kappa) : "none");
    }
}

std::vector<std::string> fig2(const std::string& name, const RunConfig& base, const std::string& dir) {
    const Panel& p = fig2_panels().at(name);
    std::vector<std::string> files;
    const SweepResult a = qfi_sweep(base, p.a);
    if (!p.b) {
        SweepResult r = a;
        r.header.insert(r.header.begin(), {"figure", name + ": " + p.title});
        emit(dir, name, r, spec_from(r, p.title, "H_kappa [nm^2]", true), files);
        return files;
    }
    const SweepResult b = qfi_sweep(base, *p.b);
    SweepResult r = log_ratio(a, b, p.a.label + " / " + p.b->label);
    r.header.insert(r.header.begin(), {"figure", name + ": " + p.title});
    add_crossovers(r, a, b);
    emit(dir, name, r, spec_from(r, p.title, "log ratio", false), files);
    return files;
}

SweepResult approximation(const SweepResult& like, Estimand estimand, double length) {
    SweepResult out;
    out.header = {{"curve", fmt::format("approximation, alpha = {}", kOverlayAlpha)},
                  {"estimand", to_string(estimand)},
                  {"columns", "value: alpha kappa^2 (kappa estimand) or alpha kappa^2 L^2 eta^2 (eta estimand); gain_Npeak: 0 (gain independent)"}};
    const auto gains = like.gains();
    if (gains.empty()) return out;
    for (const auto& row : like.rows_for_gain(gains.front())) {
        double v = kOverlayAlpha * row.kappa_i * row.kappa_i;
        if (estimand == Estimand::eta_i) v *= std::pow(length * row.eta_i, 2);
        out.rows.push_back({row.kappa_i, row.eta_i, 0.0, v, Flag::ok});
    }
    return out;
}

std::vector<std::string> fig3(const RunConfig& base, const std::string& dir) {
    std::vector<std::string> files;
    const FitReport fit = fit_alpha(base);
    struct Sub {
        const char* name;
        Estimand estimand;
        bool x_eta;
    };
    const Sub subs[] = {{"fig3a", Estimand::eta_i, true},
                        {"fig3b", Estimand::eta_i, false},
                        {"fig3c", Estimand::kappa_i, true},
                        {"fig3d", Estimand::kappa_i, false}};
    std::map<Estimand, SweepResult> cache;
    for (const auto& s : subs) {
        if (!cache.count(s.estimand)) {
            cache[s.estimand] = run_sweep(variant(base, Model::dl, Access::all_modes, s.estimand, Quantity::inverse_ratio));
        }
        SweepResult r = cache[s.estimand];
        const std::string title = fmt::format("Inverse ratio (N_S - N_I)/H_{}, DL", s.estimand == Estimand::eta_i ? "eta" : "kappa");
        r.header.insert(r.header.begin(), {"figure", std::string(s.name) + ": " + title});
        r.header.emplace_back("x_axis", s.x_eta ? "eta_i" : "kappa_i");
        r.header.emplace_back("fitted_alpha", fmt::format("{}", fit.alpha));
        r.header.emplace_back("fitted_r_squared_mean", fmt::format("{}", fit.r_squared));
        const SweepResult approx = approximation(r, s.estimand, base.length_nm);

        PlotSpec spec = spec_from(r, title, "inverse ratio", true, s.x_eta);
        Series overlay;
        overlay.label = fmt::format("alpha = {}", kOverlayAlpha);
        overlay.dashed = true;
        for (const auto& row : approx.rows) {
            overlay.x.push_back(s.x_eta ? row.eta_i : row.kappa_i);
            overlay.y.push_back(row.value);
        }
        spec.series.push_back(overlay);
        emit(dir, s.name, r, spec, files);
        const std::string fit_csv = (std::filesystem::path(dir) / (std::string(s.name) + "_fit.csv")).string();
        write_csv(fit_csv, approx);
        files.push_back(fit_csv);
    }
    return files;
}

std::vector<std::string> fig4(const RunConfig& base, const std::string& dir) {
    std::vector<std::string> files;
    SweepResult su = run_sweep(variant(base, Model::su11, Access::all_modes, Estimand::kappa_i, Quantity::intensity_diff));
    SweepResult dl = run_sweep(variant(base, Model::dl, Access::all_modes, Estimand::kappa_i, Quantity::intensity_diff));
    SweepResult ratio = log_ratio(dl, su, "DL / SU(1,1)");
    add_crossovers(ratio, dl, su);

    for (double g : dl.gains()) {
        int dips = 0;
        for (const auto& row : dl.rows_for_gain(g)) dips += row.flag == Flag::vanishing_derivative;
        dl.header.emplace_back(fmt::format("dips_gain_{}", g), std::to_string(dips));
    }
    su.header.insert(su.header.begin(), {"figure", "fig4a: inverse intensity-difference error, SU(1,1)"});
    dl.header.insert(dl.header.begin(), {"figure", "fig4b: inverse intensity-difference error, DL"});
    ratio.header.insert(ratio.header.begin(), {"figure", "fig4c: log ratio of inverse errors, DL / SU(1,1)"});
    emit(dir, "fig4a", su, spec_from(su, "Inverse error, SU(1,1)", "1/Var(kappa) [nm^2]", true, false, true), files);
    emit(dir, "fig4b", dl, spec_from(dl, "Inverse error, DL", "1/Var(kappa) [nm^2]", true, false, true), files);
    emit(dir, "fig4c", ratio, spec_from(ratio, "log ratio of inverse errors, DL / SU(1,1)", "log ratio", false), files);
    return files;
}

}  // namespace

const std::vector<std::string>& figure_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& [k, v] : fig2_panels()) n.push_back(k);
        n.push_back("fig3");
        n.push_back("fig4");
        return n;
    }();
    return names;
}

FitReport fit_alpha(const RunConfig& base) {
    const SweepResult r = run_sweep(variant(base, Model::dl, Access::all_modes, Estimand::kappa_i, Quantity::inverse_ratio));
    std::vector<InverseRatioSample> samples;
    for (const auto& row : r.rows) samples.push_back({row.kappa_i, row.gain, row.value});
    return fit_inverse_ratio(samples);
}

std::vector<std::string> reproduce_figure(const std::string& which, const RunConfig& base, const std::string& outdir) {
    std::filesystem::create_directories(outdir);
    if (fig2_panels().count(which)) return fig2(which, base, outdir);
    if (which == "fig3") return fig3(base, outdir);
    if (which == "fig4") return fig4(base, outdir);
    throw ConfigError("figure", 0, "unknown figure '" + which + "'");
}

}  // namespace nlqfi::app
