#include "nlqfi/app/sweep.hpp"

#include <fmt/format.h>

#include <cstdlib>
#include <limits>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace nlqfi::app {

namespace {

constexpr const char* kColumns = "kappa_i_nm^-1,eta_i,gain_Npeak,value,flag";

double parse_double(const std::string& s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw std::runtime_error("csv: bad number '" + s + "'");
    return v;
}

}  // namespace

void write_csv(std::ostream& out, const SweepResult& result) {
    for (const auto& [key, value] : result.header) out << "# " << key << ": " << value << '\n';
    out << kColumns << '\n';
    for (const auto& r : result.rows) {
        out << fmt::format("{},{},{},{},{}\n", r.kappa_i, r.eta_i, r.gain, r.value, to_string(r.flag));
    }
}

void write_csv(const std::string& path, const SweepResult& result) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    write_csv(out, result);
    if (!out) throw std::runtime_error("error while writing '" + path + "'");
}

SweepResult read_csv(std::istream& in) {
    SweepResult result;
    std::string line;
    bool seen_columns = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("# ", 0) == 0) {
            const auto colon = line.find(": ", 2);
            if (colon == std::string::npos) throw std::runtime_error("csv: malformed header line");
            result.header.emplace_back(line.substr(2, colon - 2), line.substr(colon + 2));
            continue;
        }
        if (!seen_columns) {
            if (line != kColumns) throw std::runtime_error("csv: unexpected column header '" + line + "'");
            seen_columns = true;
            continue;
        }
        std::stringstream ss(line);
        std::string f[5];
        for (int k = 0; k < 5; ++k) {
            if (!std::getline(ss, f[k], ',')) throw std::runtime_error("csv: short row '" + line + "'");
        }
        result.rows.push_back({parse_double(f[0]), parse_double(f[1]), parse_double(f[2]), parse_double(f[3]), flag_from_string(f[4])});
    }
    if (!seen_columns) throw std::runtime_error("csv: missing column header");
    return result;
}

SweepResult read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    return read_csv(in);
}

}  // namespace nlqfi::app
