#ifndef RICMATCH_SVG_HPP
#define RICMATCH_SVG_HPP

#include <string>

#include "ricmatch/experiments.hpp"

namespace ricmatch {

/// Hand-emitted line chart: one polyline per plan (mean over seeds), the
/// envelope drawn last with distinct styling. Byte-deterministic for fixed
/// input.
std::string sweep_chart_svg(const SweepResult& result);

}  // namespace ricmatch

#endif
