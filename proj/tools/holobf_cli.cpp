// Experiment driver: reads a JSON experiment spec, runs the seeded
// Monte-Carlo sweep and writes the result tables/plots.

#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "holobf/experiment.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read spec file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct CommonFlags {
    std::string spec_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int trials = 0;
    std::string out;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("spec", flags.spec_path, "experiment spec file (JSON)")->required();
    cmd->add_option("--seed", flags.seed, "override master_seed")
        ->each([&](const std::string&) { flags.seed_set = true; });
    cmd->add_option("--trials", flags.trials, "override num_trials");
    cmd->add_option("--out", flags.out, "override output_path");
}

int execute(const CommonFlags& flags, std::optional<holobf::SweepType> forced_sweep) {
    holobf::ExperimentSpec spec = holobf::parse_spec(read_file(flags.spec_path));
    if (forced_sweep) {
        if (*forced_sweep != spec.sweep)
            throw holobf::ConfigError(
                "sweep.type: spec declares '" + holobf::sweep_name(spec.sweep) +
                "' but the subcommand requires '" + holobf::sweep_name(*forced_sweep) + "'");
    }
    if (flags.seed_set) spec.master_seed = flags.seed;
    if (flags.trials > 0) spec.num_trials = flags.trials;
    if (!flags.out.empty()) spec.output_path = flags.out;

    const holobf::ExperimentResult result = holobf::run_experiment(spec);
    holobf::write_results(result, spec.output_path);

    for (const holobf::GridAggregate& agg : result.aggregates) {
        if (agg.num_ok == 0) continue;
        std::cout << holobf::sweep_name(result.sweep) << " grid=" << agg.grid_value
                  << " method=" << holobf::method_name(agg.method)
                  << " mean_sum_rate=" << agg.mean_sum_rate
                  << " stderr=" << agg.stderr_sum_rate;
        if (result.sweep == holobf::SweepType::timing)
            std::cout << " ms_per_iter=" << agg.mean_time_per_iter_ms;
        std::cout << " n=" << agg.num_ok << '\n';
    }
    std::cout << "wrote " << spec.output_path << ".csv\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MMSE hybrid holographic beamforming experiments"};
    app.require_subcommand(1);

    CommonFlags run_flags, conv_flags, timing_flags;
    CLI::App* cmd_run = app.add_subcommand("run", "run the sweep declared in the spec");
    add_common(cmd_run, run_flags);
    CLI::App* cmd_conv =
        app.add_subcommand("convergence", "per-iteration sum-rate trace at one operating point");
    add_common(cmd_conv, conv_flags);
    CLI::App* cmd_timing =
        app.add_subcommand("timing", "per-iteration wall-time scaling over RHS sizes");
    add_common(cmd_timing, timing_flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_run->parsed()) return execute(run_flags, std::nullopt);
        if (cmd_conv->parsed()) return execute(conv_flags, holobf::SweepType::convergence);
        if (cmd_timing->parsed()) return execute(timing_flags, holobf::SweepType::timing);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
