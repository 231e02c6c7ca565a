#pragma once

// Acceptance criteria as executable checks. Tolerances live here so the CLI
// (--check) and the test binary judge the same thing.

#include "femtoq/sweep.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace femtoq::acceptance {

struct Criterion {
    int id = 0;
    std::string name;
    bool evaluated = false;  // false when the inputs do not cover it
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

inline constexpr double kTarget = 6.0;
inline constexpr std::size_t kSeeds = 10;

// 1: oracle equivalence
inline constexpr std::size_t kOracleStates = 5;
inline constexpr std::size_t kOracleActions = 3;
inline constexpr std::size_t kOracleBranching = 3;
inline constexpr double kOracleGamma = 0.9;
inline constexpr std::size_t kOracleSteps = 100000;
inline constexpr double kOracleEpsilon = 0.2;
inline constexpr double kOracleRateExponent = 0.7;
inline constexpr double kOracleValueTolerance = 0.05;
/// Required passes per kSeeds seeds; other seed counts scale in proportion.
inline constexpr std::size_t kOracleRequired = 9;
inline constexpr double kOracleSeconds = 5.0;

// 2: macro convergence
inline constexpr double kConvergenceBand = 0.5;
inline constexpr std::size_t kConvergenceRequired = 8;  // per kSeeds, as above
inline constexpr double kSecondsPerEpisode = 10.0;

// 7: convergence speed
inline constexpr std::size_t kHold = 100;

// 8: property probes
inline constexpr double kPropertySeconds = 30.0;

struct OracleSeedResult {
    std::uint64_t seed = 0;
    bool policy_match = false;
    double relative_value_error = 0.0;
    bool pass() const { return policy_match && relative_value_error <= kOracleValueTolerance; }
};

std::vector<OracleSeedResult> oracle_runs(std::size_t seeds = kSeeds, double rate_exponent = kOracleRateExponent);
Criterion oracle_equivalence(std::size_t seeds = kSeeds);

/// The sweep that feeds criteria 2-7: N in {4, 7, 11}; IL and CL; RF1,
/// RF2(K=80), RF2(K=10000), RF3; seeds 1..10; defaults elsewhere.
SweepSpec criteria_sweep_spec();

/// Criteria 2-7 from a finished sweep. Criteria whose points are missing come
/// back with evaluated = false.
std::vector<Criterion> sweep_criteria(const SweepResult& r);

/// Criterion 8: invariant probes over rewards, state encoding, cooperation,
/// update counts, overhead, fairness, determinism and capacity monotonicity.
Criterion property_probes();

/// "PASS  [1] name: detail" style line.
std::string format(const Criterion& c);

/// passed / total >= required / kSeeds, in integers.
inline bool enough(std::size_t passed, std::size_t total, std::size_t required)
{
    return total > 0 && passed * kSeeds >= required * total;
}

}  // namespace femtoq::acceptance
