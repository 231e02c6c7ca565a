#pragma once

#include <cmath>

namespace femtoq {

/// dBm -> milliwatts.
inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

/// milliwatts -> dBm. Non-positive input maps to -inf.
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

}  // namespace femtoq
