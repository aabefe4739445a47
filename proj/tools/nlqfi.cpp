// nlqfi: moments, QFI values, sweeps and figure data for nonlinear-interferometer loss sensing.

#include "nlqfi/app/config.hpp"
#include "nlqfi/app/figures.hpp"
#include "nlqfi/app/sweep.hpp"
#include "nlqfi/errors.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <filesystem>
#include <iostream>

using namespace nlqfi;
using namespace nlqfi::app;

namespace {

struct Common {
    std::string config;
    std::vector<std::string> overrides;
    std::string out;
    std::string format = "csv";
};

void add_common(CLI::App* cmd, Common& c, bool with_out) {
    cmd->add_option("--config", c.config, "Run configuration file");
    cmd->add_option("--set", c.overrides, "Override one key: section.key=value (repeatable)");
    cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv"}));
    if (with_out) cmd->add_option("--out", c.out, "Output directory");
}

RunConfig load(const Common& c, const std::string& config_path) {
    ConfigSource src = config_path.empty() ? ConfigSource{} : ConfigSource::load(config_path);
    for (const auto& o : c.overrides) src.set(o);
    return build_config(src);
}

std::vector<double> gains_or(const RunConfig& cfg, const std::vector<double>& requested) {
    return requested.empty() ? cfg.gains : requested;
}

SweepResult sweep_from(const Common& c, const std::string& path) {
    if (std::filesystem::path(path).extension() == ".csv") return read_csv(path);
    return run_sweep(load(c, path));
}

void print_moments(const RunConfig& cfg, const std::vector<double>& gains, double kappa) {
    const Scenario sc = cfg.scenario();
    const double eta = eta_from_kappa(kappa, cfg.length_nm);
    if (cfg.model == Model::ic) {
        std::cout << "gain_Npeak,kappa_i_nm^-1,eta_i,n_s,n_i,n_a,n_sa_re,n_sa_im,m_si_re,m_si_im,m_ai_re,m_ai_im,n_minus_arm\n";
        for (double g : gains) {
            const GainSpec gain(g, cfg.length_nm);
            const auto m = ic_moments(gain, phase_matching(sc, gain), loss_channel(sc, kappa), second_pass_phase(Model::ic, sc, gain));
            std::cout << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", g, kappa, eta, m.n_s, m.n_i, m.n_a, m.n_sa.real(),
                                     m.n_sa.imag(), m.m_si.real(), m.m_si.imag(), m.m_ai.real(), m.m_ai.imag(), ic_balanced_bs(m, -1));
        }
        return;
    }
    std::cout << "gain_Npeak,kappa_i_nm^-1,eta_i,n_s,n_i,m_re,m_im\n";
    for (double g : gains) {
        const GainSpec gain(g, cfg.length_nm);
        const PhaseMatching pm = phase_matching(sc, gain);
        Moments m;
        if (cfg.model == Model::su11) {
            m = su11_moments(gain, pm, loss_channel(sc, kappa), second_pass_phase(Model::su11, sc, gain));
        } else {
            m = full_access_moments(Model::dl, sc, g, kappa);
        }
        std::cout << fmt::format("{},{},{},{},{},{},{}\n", g, kappa, eta, m.n_s, m.n_i, m.m.real(), m.m.imag());
    }
}

int run(int argc, char** argv) {
    CLI::App app{"Loss-estimation figures of merit for SU(1,1), induced-coherence and distributed-loss setups"};
    app.require_subcommand(1);

    Common c;
    double kappa = 0.0;
    std::vector<double> gains;
    std::string path_a, path_b, figure;

    auto* moments = app.add_subcommand("moments", "Output moments at one decay rate");
    add_common(moments, c, false);
    moments->add_option("--kappa", kappa, "Idler decay rate [nm^-1]")->required();
    moments->add_option("--gain", gains, "Peak gains (default: configured gains)");

    auto* qfi = app.add_subcommand("qfi", "QFI at one decay rate for the configured model and access");
    add_common(qfi, c, false);
    qfi->add_option("--kappa", kappa, "Idler decay rate [nm^-1]")->required();
    qfi->add_option("--gain", gains, "Peak gains (default: configured gains)");

    auto* sweep = app.add_subcommand("sweep", "Evaluate the configured quantity on the (gain, kappa) grid");
    add_common(sweep, c, true);

    auto* cross = app.add_subcommand("crossover", "Decay rate where log(A/B) changes sign, per gain");
    add_common(cross, c, false);
    cross->add_option("a", path_a, "Sweep CSV or configuration file (numerator)")->required();
    cross->add_option("b", path_b, "Sweep CSV or configuration file (denominator)")->required();

    auto* fit = app.add_subcommand("fit-alpha", "Fit (N_S - N_I)/H_kappa = alpha kappa^2 for the DL model");
    add_common(fit, c, false);

    auto* repro = app.add_subcommand("reproduce", "Write CSV and SVG files for a figure");
    add_common(repro, c, true);
    std::vector<std::string> choices = figure_names();
    choices.push_back("all");
    repro->add_option("figure", figure, "Figure name or 'all'")->required()->check(CLI::IsMember(choices));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (*moments) {
        const RunConfig cfg = load(c, c.config);
        print_moments(cfg, gains_or(cfg, gains), kappa);
    } else if (*qfi) {
        const RunConfig cfg = load(c, c.config);
        const Scenario sc = cfg.scenario();
        const Method method = cfg.method == MethodChoice::numeric ||
                                      (cfg.method == MethodChoice::automatic && !analytic_available(cfg.model, cfg.access, sc))
                                  ? Method::numeric
                                  : Method::analytic;
        std::string text = "gain_Npeak,kappa_i_nm^-1,eta_i,value,flag\n";
        for (double g : gains_or(cfg, gains)) {
            const QfiResult q = evaluate_qfi(cfg.model, cfg.access, cfg.estimand, method, sc, g, kappa);
            text += fmt::format("{},{},{},{},{}\n", g, kappa, eta_from_kappa(kappa, cfg.length_nm), q.value,
                                q.divergent() ? "divergent" : "ok");
        }
        std::cout << text;
    } else if (*sweep) {
        const SweepResult r = run_sweep(load(c, c.config));
        if (c.out.empty()) {
            write_csv(std::cout, r);
        } else {
            std::filesystem::create_directories(c.out);
            const std::string path = (std::filesystem::path(c.out) / "sweep.csv").string();
            write_csv(path, r);
            std::cout << path << '\n';
        }
    } else if (*cross) {
        const auto result = crossover(sweep_from(c, path_a), sweep_from(c, path_b));
        std::cout << "gain_Npeak,kappa_star_nm^-1\n";
        for (const auto& x : result) std::cout << fmt::format("{},{}\n", x.gain, x.kappa ? fmt::format("{}", *x.kappa) : "none");
    } else if (*fit) {
        const FitReport r = fit_alpha(load(c, c.config));
        std::cout << fmt::format("alpha: {}\nr_squared_mean: {}\n", r.alpha, r.r_squared);
        const RunConfig cfg = load(c, c.config);
        std::vector<double> sorted = cfg.gains;
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        for (std::size_t k = 0; k < r.r_squared_per_gain.size() && k < sorted.size(); ++k) {
            std::cout << fmt::format("r_squared_gain_{}: {}\n", sorted[k], r.r_squared_per_gain[k]);
        }
    } else if (*repro) {
        const RunConfig cfg = load(c, c.config);
        const std::string out = c.out.empty() ? "figures" : c.out;
        std::vector<std::string> targets = figure == "all" ? figure_names() : std::vector<std::string>{figure};
        for (const auto& t : targets) {
            for (const auto& f : reproduce_figure(t, cfg, out)) std::cout << f << '\n';
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
