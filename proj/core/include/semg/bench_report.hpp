#pragma once

#include <string>
#include <vector>

#include "semg/cmrr_bench.hpp"

namespace semg::bench {

/// `freq_hz,cmrr_db,source,flag` rows for every curve, in the given order.
std::string curves_csv(const std::vector<CmrrCurve>& curves);

/// Plain-text table: measured value, limiter decomposition, composite theory,
/// delta and limiting component per frequency, then summary lines.
std::string comparison_table(const TheoryComparison& cmp);

/// Log-frequency plot of the curves as a standalone SVG document.
std::string curves_svg(const std::vector<CmrrCurve>& curves, const std::vector<std::string>& labels);

}  // namespace semg::bench
