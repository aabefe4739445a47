#pragma once

#include "nlqfi/app/config.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nlqfi::app {

enum class Flag { ok, divergent, vanishing_derivative };

std::string to_string(Flag f);
Flag flag_from_string(const std::string& s);

struct SweepRow {
    double kappa_i = 0.0;
    double eta_i = 0.0;
    double gain = 0.0;
    double value = 0.0;
    Flag flag = Flag::ok;

    bool operator==(const SweepRow&) const = default;
};

struct SweepResult {
    std::vector<std::pair<std::string, std::string>> header;
    std::vector<SweepRow> rows;  // sorted by (gain, kappa_i)

    std::string header_value(const std::string& key) const;
    std::vector<double> gains() const;
    std::vector<SweepRow> rows_for_gain(double gain) const;
};

/// Evaluates the configured quantity on every (gain, κ_I) grid point.
SweepResult run_sweep(const RunConfig& cfg);

struct Crossover {
    double gain = 0.0;
    std::optional<double> kappa;  // empty: no sign change of log(A/B) on the grid
};

/// First sign change of log(value_A / value_B) per gain, interpolated linearly in log κ.
/// Points with a non-finite or non-positive value in either sweep are skipped.
std::vector<Crossover> crossover(const SweepResult& a, const SweepResult& b);

/// Row-wise log(value_A / value_B), as a sweep of its own.
SweepResult log_ratio(const SweepResult& a, const SweepResult& b, const std::string& label);

void write_csv(std::ostream& out, const SweepResult& result);
void write_csv(const std::string& path, const SweepResult& result);
SweepResult read_csv(std::istream& in);
SweepResult read_csv(const std::string& path);

}  // namespace nlqfi::app
