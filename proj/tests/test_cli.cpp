#include "nlqfi/app/config.hpp"
#include "nlqfi/app/figures.hpp"
#include "nlqfi/app/sweep.hpp"
#include "nlqfi/errors.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace nlqfi;
using namespace nlqfi::app;

namespace {

RunConfig parse(const std::string& text, const std::vector<std::string>& overrides = {}) {
    std::istringstream in(text);
    ConfigSource src = ConfigSource::parse(in);
    for (const auto& o : overrides) src.set(o);
    return build_config(src);
}

RunConfig small(Model model, Access access, Quantity q = Quantity::qfi, int count = 40) {
    RunConfig cfg = parse("");
    cfg.model = model;
    cfg.access = access;
    cfg.quantity = q;
    cfg.grid.count = count;
    return cfg;
}

std::string csv_text(const SweepResult& r) {
    std::ostringstream out;
    write_csv(out, r);
    return out.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(NLQFI_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("nlqfi_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST(Config, Defaults) {
    const RunConfig cfg = parse("");
    EXPECT_EQ(cfg.model, Model::su11);
    EXPECT_EQ(cfg.length_nm, 4e7);
    EXPECT_EQ(cfg.gains, (std::vector<double>{0.1, 1.0, 10.0}));
    EXPECT_EQ(cfg.grid.count, 200);
    const auto k = cfg.grid.points();
    EXPECT_NEAR(std::exp(-k.front() * cfg.length_nm), 0.99, 1e-14);
    EXPECT_NEAR(std::exp(-k.back() * cfg.length_nm), 0.001, 1e-15);
    EXPECT_FALSE(cfg.phi_p2.has_value());
}

TEST(Config, SectionsAndOverrides) {
    const RunConfig cfg = parse(
        "# comment\n[run]\nmodel = dl ; trailing\naccess = single_mode\nestimand = eta\n"
        "[configurations]\ngains = [0.5, 2]\nlength_nm = 2e7\n[phases]\nphi_p2 = pi\n",
        {"grid.count=17", "run.model=su11"});
    EXPECT_EQ(cfg.model, Model::su11);
    EXPECT_EQ(cfg.access, Access::single_mode);
    EXPECT_EQ(cfg.estimand, Estimand::eta_i);
    EXPECT_EQ(cfg.gains, (std::vector<double>{0.5, 2.0}));
    EXPECT_EQ(cfg.grid.count, 17);
    EXPECT_NEAR(cfg.grid.max, std::log(1000.0) / 2e7, 1e-22);
    ASSERT_TRUE(cfg.phi_p2.has_value());
    EXPECT_DOUBLE_EQ(*cfg.phi_p2, M_PI);
}

TEST(Config, ErrorsCarryLineAndField) {
    try {
        parse("[run]\nmodel = su11\n\n[configurations]\ngains =\n");
        FAIL() << "empty gains accepted";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.field(), "configurations.gains");
        EXPECT_EQ(e.line(), 5);
    }
    try {
        parse("[run]\nmodle = su11\n");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.field(), "run.modle");
        EXPECT_EQ(e.line(), 2);
    }
    EXPECT_THROW(parse("[run]\nmodel = squeezer\n"), ConfigError);
    EXPECT_THROW(parse("model = su11\n"), ConfigError);
    EXPECT_THROW(parse("[grid]\nkappa_min = 1e-7\nkappa_max = 1e-8\n"), ConfigError);
    EXPECT_THROW(parse("[grid]\ncount = 1\n"), ConfigError);
    EXPECT_THROW(parse("[run]\naccess = ic_two_mode\n"), ConfigError);
    EXPECT_THROW(parse("[run]\nmodel = dl\nmethod = analytic\n"), ConfigError);
    EXPECT_THROW(parse("", {"nodot=1"}), ConfigError);
    try {
        parse("", {"configurations.gains="});
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.line(), 0);
    }
}

TEST(Config, HashTracksContent) {
    const RunConfig a = parse("");
    const RunConfig b = parse("[configurations]\ngains = 0.1, 1, 10\n");
    const RunConfig c = parse("[configurations]\ngains = 0.1, 1, 11\n");
    EXPECT_EQ(a.hash(), b.hash());
    EXPECT_NE(a.hash(), c.hash());
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Sweep, AnalyticPathMatchesClosedForm) {
    const RunConfig cfg = parse("");
    const SweepResult r = run_sweep(cfg);
    ASSERT_EQ(r.rows.size(), 600u);
    for (const auto& row : r.rows) {
        const double expected = cfg.length_nm * cfg.length_nm * row.gain / std::expm1(row.kappa_i * cfg.length_nm);
        EXPECT_NEAR(row.value, expected, 1e-12 * expected);
        EXPECT_EQ(row.flag, Flag::ok);
    }
    for (std::size_t i = 1; i < r.rows.size(); ++i) {
        const auto& p = r.rows[i - 1];
        const auto& q = r.rows[i];
        EXPECT_TRUE(p.gain < q.gain || (p.gain == q.gain && p.kappa_i < q.kappa_i));
    }
}

TEST(Sweep, DistributedLossDecaysMoreSlowly) {
    const SweepResult dl = run_sweep(small(Model::dl, Access::all_modes));
    const SweepResult su = run_sweep(small(Model::su11, Access::all_modes));
    for (double g : dl.gains()) {
        const auto a = dl.rows_for_gain(g);
        const auto b = su.rows_for_gain(g);
        for (std::size_t k = a.size() / 2; k + 1 < a.size(); ++k) {
            EXPECT_GT(a[k + 1].value / b[k + 1].value, a[k].value / b[k].value);
        }
    }
}

TEST(Sweep, DeterministicAndRoundTrips) {
    RunConfig cfg = small(Model::dl, Access::single_mode);
    cfg.threads = 3;
    const std::string first = csv_text(run_sweep(cfg));
    cfg.threads = 1;
    const std::string second = csv_text(run_sweep(cfg));
    EXPECT_EQ(first, second);

    std::istringstream in(first);
    const SweepResult back = read_csv(in);
    const SweepResult orig = run_sweep(cfg);
    EXPECT_EQ(back.header, orig.header);
    EXPECT_EQ(back.rows, orig.rows);
    EXPECT_EQ(csv_text(back), first);
}

TEST(Sweep, DivergentRowsRoundTrip) {
    SweepResult r;
    r.header = {{"k", "v"}};
    r.rows = {{0.0, 1.0, 1.0, std::numeric_limits<double>::infinity(), Flag::divergent},
              {1e-8, 0.67, 1.0, 1.0 / 3.0, Flag::ok}};
    std::istringstream in(csv_text(r));
    const SweepResult back = read_csv(in);
    EXPECT_TRUE(std::isinf(back.rows[0].value));
    EXPECT_EQ(back.rows[0].flag, Flag::divergent);
    EXPECT_EQ(back.rows[1].value, 1.0 / 3.0);
}

TEST(Sweep, IntensityDifferenceDipsFlagged) {
    const SweepResult r = run_sweep(small(Model::dl, Access::all_modes, Quantity::intensity_diff, 200));
    for (double g : r.gains()) {
        int dips = 0;
        for (const auto& row : r.rows_for_gain(g)) dips += row.flag == Flag::vanishing_derivative;
        EXPECT_GE(dips, 1) << g;
    }
}

TEST(Crossover, SyntheticPair) {
    const double c = 3e-3, c2 = 2e-10;  // κ* = c2 / c
    SweepResult a, b;
    for (double g : {1.0, 2.0}) {
        for (int k = 0; k < 50; ++k) {
            const double kappa = 1e-9 * std::pow(10.0, 3.0 * k / 49.0);
            a.rows.push_back({kappa, 0, g, c / kappa, Flag::ok});
            b.rows.push_back({kappa, 0, g, c2 / (kappa * kappa), Flag::ok});
        }
    }
    const auto x = crossover(a, b);
    ASSERT_EQ(x.size(), 2u);
    for (const auto& r : x) {
        ASSERT_TRUE(r.kappa.has_value());
        EXPECT_NEAR(*r.kappa, c2 / c, 1e-10 * c2 / c);
    }
    for (const auto& r : crossover(a, a)) EXPECT_FALSE(r.kappa.has_value());

    SweepResult shorter = b;
    shorter.rows.pop_back();
    EXPECT_THROW(crossover(a, shorter), std::invalid_argument);
}

TEST(Figures, Fig2aSmoke) {
    RunConfig cfg = parse("");
    cfg.grid.count = 30;
    const auto dir = scratch("fig2a");
    const auto files = reproduce_figure("fig2a", cfg, dir.string());
    ASSERT_EQ(files.size(), 2u);
    for (const auto& f : files) EXPECT_GT(std::filesystem::file_size(f), 100u);
    const SweepResult r = read_csv(files[0]);
    EXPECT_EQ(r.gains().size(), 3u);
    for (double g : r.gains()) {
        const auto rows = r.rows_for_gain(g);
        for (std::size_t k = 1; k < rows.size(); ++k) EXPECT_LT(rows[k].value, rows[k - 1].value);
    }
    std::ifstream svg(files[1]);
    std::string head;
    std::getline(svg, head);
    EXPECT_NE(head.find("<svg"), std::string::npos);
}

TEST(Figures, UnknownFigureRejected) {
    EXPECT_THROW(reproduce_figure("fig9", parse(""), scratch("none").string()), ConfigError);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run_cli("qfi --kappa 1e-7"), 0);
    EXPECT_EQ(run_cli("sweep --set configurations.gains="), 2);
    EXPECT_EQ(run_cli("sweep --set run.model=nonsense"), 2);
    EXPECT_EQ(run_cli("qfi --kappa 1e-8 --set run.model=dl --set spectral.taylor_s=0,1e-15 --set spectral.omega=1e12"), 3);
}

TEST(Cli, RepeatedSweepsAreByteIdentical) {
    const auto dir = scratch("determinism");
    const std::string a = (dir / "a").string(), b = (dir / "b").string();
    ASSERT_EQ(run_cli("sweep --set run.model=dl --set grid.count=25 --out " + a), 0);
    ASSERT_EQ(run_cli("sweep --set run.model=dl --set grid.count=25 --out " + b), 0);
    std::ifstream fa(a + "/sweep.csv"), fb(b + "/sweep.csv");
    const std::string ta((std::istreambuf_iterator<char>(fa)), {}), tb((std::istreambuf_iterator<char>(fb)), {});
    EXPECT_FALSE(ta.empty());
    EXPECT_EQ(ta, tb);
}
