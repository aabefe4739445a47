#pragma once

#include "nlqfi/app/config.hpp"
#include "nlqfi/app/sweep.hpp"

#include <string>
#include <vector>

namespace nlqfi::app {

// α used for the approximate DL overlay curves.
inline constexpr double kOverlayAlpha = 1.1;

/// fig2a … fig2l, fig3, fig4.
const std::vector<std::string>& figure_names();

/// Writes the CSV and SVG files of one figure into outdir (created if needed) and
/// returns their paths. Length, gains, grid, dispersion, phases and threads come from
/// `base`; each panel fixes model, access, estimand and quantity itself.
std::vector<std::string> reproduce_figure(const std::string& which, const RunConfig& base, const std::string& outdir);

/// Fit of (N_S − N_I)/H_κ ≈ α κ² over the base gains and grid.
FitReport fit_alpha(const RunConfig& base);

}  // namespace nlqfi::app
