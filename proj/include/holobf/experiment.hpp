#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "holobf/baselines_oracles.hpp"

namespace holobf {

enum class SweepType { snr, rhs_size, convergence, timing };
enum class Method { proposed, random_w };

std::string sweep_name(SweepType sweep);
std::string method_name(Method method);

// Parsed experiment description. The per-user noise variances of `base` are
// filled per grid point from the SNR values at run time.
struct ExperimentSpec {
    SystemConfig base;
    SweepType sweep = SweepType::snr;
    std::vector<double> snr_db_grid;      // snr sweep grid
    std::vector<int> m_grid;              // rhs_size / timing grids
    double fixed_snr_db = 10.0;           // used by non-snr sweeps
    int timing_iters = 40;                // forced iteration count, timing mode
    int num_trials = 1;
    std::vector<Method> methods{Method::proposed};
    std::string output_path = "results";
    std::uint64_t master_seed = 1;
    OptimizerSettings optimizer;
};

struct TrialRecord {
    int grid_index = 0;
    double grid_value = 0.0;
    int trial = 0;
    Method method = Method::proposed;
    std::uint64_t seed = 0;
    double sum_rate = 0.0;
    int iterations = 0;
    bool converged = false;
    double wall_time_ms = 0.0;
    bool failed = false;
    std::string error;
};

// Per-iteration row emitted in convergence mode.
struct TraceRow {
    double grid_value = 0.0;
    int trial = 0;
    int iteration = 0;
    double sum_rate = 0.0;
    double weighted_sum_mse = 0.0;
    double power_used = 0.0;
    double min_w = 0.0;
    double max_w = 0.0;
};

struct GridAggregate {
    int grid_index = 0;
    double grid_value = 0.0;
    Method method = Method::proposed;
    int num_ok = 0;
    double mean_sum_rate = 0.0;
    double stderr_sum_rate = 0.0;
    double mean_wall_time_ms = 0.0;
    double mean_time_per_iter_ms = 0.0;
};

struct ExperimentResult {
    SweepType sweep = SweepType::snr;
    std::vector<TrialRecord> records;
    std::vector<TraceRow> traces;
    std::vector<GridAggregate> aggregates;
};

// Parses the JSON experiment document and validates every SystemConfig
// invariant; error messages name the offending field.
ExperimentSpec parse_spec(const std::string& json_text);

// Stable master -> trial derivation (splitmix64 chain, independent of the
// grid point so every grid point sees the same channel randomness):
//   s = splitmix64(master); trial_seed = splitmix64(s ^ (GOLDEN * (trial + 1)))
// with GOLDEN = 0x9E3779B97F4A7C15.
std::uint64_t derive_trial_seed(std::uint64_t master_seed, int trial);

// Near-square factorization used when a sweep specifies element counts:
// rows = largest divisor of m not exceeding sqrt(m).
std::pair<int, int> factor_rhs_size(int m);

ExperimentResult run_experiment(const ExperimentSpec& spec);

// Writes <base>.csv (flat record table), <base>_summary.json (per-grid-point
// aggregates), <base>.svg (mean +/- standard error line plot) and, when
// traces exist, <base>_trace.csv.
void write_results(const ExperimentResult& result, const std::string& path_base);

}  // namespace holobf
