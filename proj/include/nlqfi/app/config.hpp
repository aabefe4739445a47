#pragma once

#include "nlqfi/qfi.hpp"
#include "nlqfi/scenarios.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nlqfi::app {

enum class Quantity { qfi, intensity_diff, inverse_ratio };
enum class MethodChoice { automatic, analytic, numeric };

struct KappaGrid {
    double min = 0.0;
    double max = 0.0;
    int count = 200;

    // Log-spaced, endpoints exact.
    std::vector<double> points() const;
};

struct RunConfig {
    Model model = Model::su11;
    Access access = Access::all_modes;
    Estimand estimand = Estimand::kappa_i;
    Quantity quantity = Quantity::qfi;
    MethodChoice method = MethodChoice::automatic;
    int threads = 0;  // 0: one per hardware thread

    double length_nm = kDefaultLengthNm;
    std::vector<double> gains{0.1, 1.0, 10.0};
    double kappa_s = 0.0;
    int quadrature_points = 32;

    KappaGrid grid;  // filled from length_nm (η from 0.99 down to 0.001) unless set

    double omega = 0.0;
    std::vector<double> taylor_s;
    std::vector<double> taylor_i;

    double phi_s = 0.0;
    double phi_i = 0.0;
    std::optional<double> phi_p2;  // empty: "auto"

    Scenario scenario() const;
    // Stable text form of every field; hashed into output headers.
    std::string canonical() const;
    std::uint64_t hash() const;
};

/// Raw `section.key = value` entries with the line they came from (0 for overrides).
class ConfigSource {
public:
    struct Entry {
        std::string value;
        int line = 0;
    };

    static ConfigSource parse(std::istream& in);
    static ConfigSource load(const std::string& path);

    /// `section.key=value`; throws ConfigError on malformed input.
    void set(const std::string& assignment);
    void set(const std::string& key, const std::string& value, int line = 0);

    const std::map<std::string, Entry>& entries() const noexcept { return entries_; }

private:
    std::map<std::string, Entry> entries_;
};

/// Builds and validates a RunConfig. Unknown keys and bad values raise ConfigError
/// naming the key and, for file entries, the line.
RunConfig build_config(const ConfigSource& source);

std::string to_string(Model m);
std::string to_string(Access a);
std::string to_string(Estimand e);
std::string to_string(Quantity q);
std::string to_string(MethodChoice m);

std::uint64_t fnv1a64(const std::string& text);

}  // namespace nlqfi::app
