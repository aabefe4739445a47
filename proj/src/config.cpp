#include "nlqfi/app/config.hpp"

#include "nlqfi/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <numbers>
#include <set>

namespace nlqfi::app {

std::vector<double> KappaGrid::points() const {
    std::vector<double> out(static_cast<std::size_t>(count));
    const double lo = std::log(min);
    const double hi = std::log(max);
    for (int k = 0; k < count; ++k) out[k] = std::exp(lo + (hi - lo) * k / (count - 1));
    out.front() = min;
    out.back() = max;
    return out;
}

Scenario RunConfig::scenario() const {
    Scenario s;
    s.length = length_nm;
    s.dispersion = DispersionProfile(taylor_s, taylor_i);
    s.omega = omega;
    s.kappa_s = kappa_s;
    s.phi_s = phi_s;
    s.phi_i = phi_i;
    s.phi_p2 = phi_p2;
    s.quadrature_points = quadrature_points;
    return s;
}

namespace {

std::string join(const std::vector<double>& v) {
    std::string out;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (k) out += ',';
        out += fmt::format("{}", v[k]);
    }
    return out;
}

}  // namespace

std::string RunConfig::canonical() const {
    std::string out;
    auto put = [&](const char* key, const std::string& value) { out += fmt::format("{}={}\n", key, value); };
    put("run.model", to_string(model));
    put("run.access", to_string(access));
    put("run.estimand", to_string(estimand));
    put("run.quantity", to_string(quantity));
    put("run.method", to_string(method));
    put("configurations.length_nm", fmt::format("{}", length_nm));
    put("configurations.gains", join(gains));
    put("configurations.kappa_s", fmt::format("{}", kappa_s));
    put("configurations.quadrature_points", std::to_string(quadrature_points));
    put("grid.kappa_min", fmt::format("{}", grid.min));
    put("grid.kappa_max", fmt::format("{}", grid.max));
    put("grid.count", std::to_string(grid.count));
    put("spectral.omega", fmt::format("{}", omega));
    put("spectral.taylor_s", join(taylor_s));
    put("spectral.taylor_i", join(taylor_i));
    put("phases.phi_s", fmt::format("{}", phi_s));
    put("phases.phi_i", fmt::format("{}", phi_i));
    put("phases.phi_p2", phi_p2 ? fmt::format("{}", *phi_p2) : std::string("auto"));
    return out;
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t RunConfig::hash() const { return fnv1a64(canonical()); }

std::string to_string(Model m) {
    switch (m) {
        case Model::su11: return "su11";
        case Model::ic: return "ic";
        case Model::dl: return "dl";
    }
    return "?";
}

std::string to_string(Access a) {
    switch (a) {
        case Access::all_modes: return "all";
        case Access::ic_two_mode: return "ic_two_mode";
        case Access::single_mode: return "single_mode";
    }
    return "?";
}

std::string to_string(Estimand e) { return e == Estimand::kappa_i ? "kappa" : "eta"; }

std::string to_string(Quantity q) {
    switch (q) {
        case Quantity::qfi: return "qfi";
        case Quantity::intensity_diff: return "intensity_diff";
        case Quantity::inverse_ratio: return "inverse_ratio";
    }
    return "?";
}

std::string to_string(MethodChoice m) {
    switch (m) {
        case MethodChoice::automatic: return "auto";
        case MethodChoice::analytic: return "analytic";
        case MethodChoice::numeric: return "numeric";
    }
    return "?";
}

namespace {

std::string trim(std::string s) {
    auto space = [](unsigned char c) { return std::isspace(c) != 0; };
    s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), space));
    s.erase(std::find_if_not(s.rbegin(), s.rend(), space).base(), s.end());
    return s;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

}  // namespace

ConfigSource ConfigSource::parse(std::istream& in) {
    ConfigSource src;
    std::string section;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find_first_of("#;");
        std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (text.empty()) continue;
        if (text.front() == '[') {
            if (text.back() != ']') throw ConfigError("", line, "unterminated section header");
            section = lower(trim(text.substr(1, text.size() - 2)));
            if (section.empty()) throw ConfigError("", line, "empty section name");
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) throw ConfigError("", line, "expected 'key = value'");
        if (section.empty()) throw ConfigError("", line, "key outside of any [section]");
        const std::string key = lower(trim(text.substr(0, eq)));
        if (key.empty()) throw ConfigError("", line, "empty key");
        const std::string full = section + "." + key;
        if (src.entries_.count(full)) throw ConfigError(full, line, "duplicate key");
        src.entries_[full] = {trim(text.substr(eq + 1)), line};
    }
    return src;
}

ConfigSource ConfigSource::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", 0, "cannot open config file '" + path + "'");
    return parse(in);
}

void ConfigSource::set(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError(assignment, 0, "override must look like section.key=value");
    const std::string key = lower(trim(assignment.substr(0, eq)));
    if (key.find('.') == std::string::npos || key.front() == '.' || key.back() == '.') {
        throw ConfigError(key, 0, "override key must be section.key");
    }
    set(key, trim(assignment.substr(eq + 1)), 0);
}

void ConfigSource::set(const std::string& key, const std::string& value, int line) { entries_[key] = {value, line}; }

namespace {

class Reader {
public:
    explicit Reader(const ConfigSource& src) : src_(src) {}

    const ConfigSource::Entry* find(const std::string& key) {
        used_.insert(key);
        const auto it = src_.entries().find(key);
        return it == src_.entries().end() ? nullptr : &it->second;
    }

    [[noreturn]] void fail(const std::string& key, const std::string& what) {
        const auto it = src_.entries().find(key);
        throw ConfigError(key, it == src_.entries().end() ? 0 : it->second.line, what);
    }

    void real(const std::string& key, double& out) {
        if (const auto* e = find(key)) out = parse_real(key, e->value);
    }

    void integer(const std::string& key, int& out) {
        if (const auto* e = find(key)) {
            int v = 0;
            const auto* end = e->value.data() + e->value.size();
            const auto [ptr, ec] = std::from_chars(e->value.data(), end, v);
            if (ec != std::errc() || ptr != end) fail(key, "expected an integer, got '" + e->value + "'");
            out = v;
        }
    }

    void list(const std::string& key, std::vector<double>& out) {
        if (const auto* e = find(key)) {
            out.clear();
            std::string body = e->value;
            if (!body.empty() && body.front() == '[' && body.back() == ']') body = body.substr(1, body.size() - 2);
            std::size_t start = 0;
            while (start <= body.size()) {
                const auto comma = body.find(',', start);
                const std::string item = trim(body.substr(start, comma - start));
                if (!item.empty()) out.push_back(parse_real(key, item));
                else if (comma != std::string::npos) fail(key, "empty list element");
                if (comma == std::string::npos) break;
                start = comma + 1;
            }
        }
    }

    template <class E>
    void choice(const std::string& key, E& out, const std::vector<std::pair<std::string, E>>& options) {
        if (const auto* e = find(key)) {
            const std::string v = lower(e->value);
            for (const auto& [name, value] : options) {
                if (v == name) {
                    out = value;
                    return;
                }
            }
            std::string allowed;
            for (const auto& o : options) allowed += (allowed.empty() ? "" : ", ") + o.first;
            fail(key, "unknown value '" + e->value + "' (expected one of: " + allowed + ")");
        }
    }

    void reject_unknown() {
        for (const auto& [key, entry] : src_.entries()) {
            if (!used_.count(key)) throw ConfigError(key, entry.line, "unknown key");
        }
    }

    double parse_real(const std::string& key, const std::string& text) {
        const std::string t = lower(text);
        if (t == "pi") return std::numbers::pi;
        double v = 0.0;
        const auto* end = text.data() + text.size();
        const auto [ptr, ec] = std::from_chars(text.data(), end, v);
        if (ec != std::errc() || ptr != end || !std::isfinite(v)) fail(key, "expected a finite number, got '" + text + "'");
        return v;
    }

private:
    const ConfigSource& src_;
    std::set<std::string> used_;
};

}  // namespace

RunConfig build_config(const ConfigSource& source) {
    Reader r(source);
    RunConfig cfg;

    r.choice<Model>("run.model", cfg.model, {{"su11", Model::su11}, {"ic", Model::ic}, {"dl", Model::dl}});
    r.choice<Access>("run.access", cfg.access,
                     {{"all", Access::all_modes}, {"ic_two_mode", Access::ic_two_mode}, {"single_mode", Access::single_mode}});
    r.choice<Estimand>("run.estimand", cfg.estimand, {{"kappa", Estimand::kappa_i}, {"eta", Estimand::eta_i}});
    r.choice<Quantity>("run.quantity", cfg.quantity,
                       {{"qfi", Quantity::qfi}, {"intensity_diff", Quantity::intensity_diff}, {"inverse_ratio", Quantity::inverse_ratio}});
    r.choice<MethodChoice>("run.method", cfg.method,
                           {{"auto", MethodChoice::automatic}, {"analytic", MethodChoice::analytic}, {"numeric", MethodChoice::numeric}});
    r.integer("run.threads", cfg.threads);

    r.real("configurations.length_nm", cfg.length_nm);
    r.list("configurations.gains", cfg.gains);
    r.real("configurations.kappa_s", cfg.kappa_s);
    r.integer("configurations.quadrature_points", cfg.quadrature_points);

    if (!(cfg.length_nm > 0.0)) r.fail("configurations.length_nm", "must be positive");
    cfg.grid.min = std::log(1.0 / 0.99) / cfg.length_nm;
    cfg.grid.max = std::log(1000.0) / cfg.length_nm;
    r.real("grid.kappa_min", cfg.grid.min);
    r.real("grid.kappa_max", cfg.grid.max);
    r.integer("grid.count", cfg.grid.count);

    r.real("spectral.omega", cfg.omega);
    r.list("spectral.taylor_s", cfg.taylor_s);
    r.list("spectral.taylor_i", cfg.taylor_i);

    r.real("phases.phi_s", cfg.phi_s);
    r.real("phases.phi_i", cfg.phi_i);
    if (const auto* e = r.find("phases.phi_p2")) {
        if (lower(e->value) == "auto") cfg.phi_p2.reset();
        else cfg.phi_p2 = r.parse_real("phases.phi_p2", e->value);
    }
    r.reject_unknown();

    if (cfg.gains.empty()) r.fail("configurations.gains", "gain list must not be empty");
    for (double g : cfg.gains) {
        if (!(g >= 0.0)) r.fail("configurations.gains", "gains must be non-negative");
    }
    if (!(cfg.kappa_s >= 0.0)) r.fail("configurations.kappa_s", "must be non-negative");
    if (cfg.quadrature_points < 32) r.fail("configurations.quadrature_points", "must be at least 32");
    if (!(cfg.grid.min > 0.0)) r.fail("grid.kappa_min", "must be positive (the grid is log-spaced)");
    if (!(cfg.grid.min < cfg.grid.max)) r.fail("grid.kappa_max", "kappa_min must be smaller than kappa_max");
    if (cfg.grid.count < 2) r.fail("grid.count", "need at least 2 grid points");
    if (cfg.threads < 0) r.fail("run.threads", "must be non-negative");
    if (cfg.access == Access::ic_two_mode && cfg.model != Model::ic) {
        r.fail("run.access", "ic_two_mode access requires model = ic");
    }
    if (cfg.quantity == Quantity::intensity_diff && cfg.model == Model::ic) {
        r.fail("run.quantity", "intensity_diff is defined for the su11 and dl models");
    }
    if (cfg.quantity == Quantity::inverse_ratio && cfg.model != Model::dl) {
        r.fail("run.quantity", "inverse_ratio is defined for the dl model");
    }
    try {
        (void)DispersionProfile(cfg.taylor_s, cfg.taylor_i);
    } catch (const std::invalid_argument& e) {
        r.fail("spectral.taylor_s", e.what());
    }
    if (cfg.method == MethodChoice::analytic && !analytic_available(cfg.model, cfg.access, cfg.scenario())) {
        r.fail("run.method", "no closed form for this model/access/dispersion");
    }
    return cfg;
}

}  // namespace nlqfi::app
