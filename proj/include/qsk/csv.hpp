#pragma once

#include <string>
#include <vector>

#include "qsk/geometry.hpp"
#include "qsk/kernel.hpp"
#include "qsk/pricing.hpp"
#include "qsk/simulate.hpp"

namespace qsk {

/// CSV artifacts: first line a '#' comment carrying the tool version and the
/// full parameter echo, then the declared header row, then data rows with
/// 17 significant digits.  Output is byte-deterministic for a fixed input.

std::string csv_kernel(const KernelDensity& kernel, const std::string& comment);
std::string csv_moments(const MomentSequence& seq, const std::string& comment);
std::string csv_weights(const MetricFit& fit, const std::string& comment);
std::string csv_samples(const PathEnsemble& e, const std::string& comment);
std::string csv_smile(const SmileSurface& s, const std::string& comment);

/// JSON stats sidecar for an ensemble (mean/variance/skewness/kurtosis/seed/params).
std::string json_ensemble_stats(const PathEnsemble& e);

void write_file(const std::string& path, const std::string& content);

} // namespace qsk
