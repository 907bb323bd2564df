#include "holobf/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "holobf/rng.hpp"

namespace holobf {

namespace {

using json = nlohmann::json;

// Shortest round-trippable decimal representation; keeps tables byte-stable.
std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string sanitize_field(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return s;
}

double snr_for_grid(const ExperimentSpec& spec, int grid_index) {
    return spec.sweep == SweepType::snr ? spec.snr_db_grid[grid_index] : spec.fixed_snr_db;
}

}  // namespace

std::string sweep_name(SweepType sweep) {
    switch (sweep) {
        case SweepType::snr: return "snr";
        case SweepType::rhs_size: return "rhs_size";
        case SweepType::convergence: return "convergence";
        case SweepType::timing: return "timing";
    }
    return "unknown";
}

std::string method_name(Method method) {
    return method == Method::proposed ? "proposed" : "random_w";
}

std::uint64_t derive_trial_seed(std::uint64_t master_seed, int trial) {
    const std::uint64_t golden = 0x9E3779B97F4A7C15ull;
    return splitmix64(splitmix64(master_seed) ^
                      (golden * (static_cast<std::uint64_t>(trial) + 1)));
}

std::pair<int, int> factor_rhs_size(int m) {
    if (m <= 0) throw ConfigError("m_list: element counts must be positive");
    int rows = static_cast<int>(std::sqrt(static_cast<double>(m)));
    while (rows > 1 && m % rows != 0) --rows;
    return {rows, m / rows};
}

ExperimentSpec parse_spec(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("spec: not valid JSON (") + e.what() + ")");
    }

    ExperimentSpec spec;
    try {
        if (!doc.contains("system")) throw ConfigError("system: section is required");
        const json& sys = doc.at("system");
        spec.base.num_users = sys.at("num_users").get<int>();
        spec.base.num_feeds = sys.at("num_feeds").get<int>();
        if (spec.base.num_users <= 0) throw ConfigError("system.num_users: must be positive");
        spec.base.carrier_freq_hz = sys.value("carrier_freq_hz", 30.0e9);
        // quarter wavelength unless stated
        spec.base.element_spacing_m =
            sys.value("element_spacing_m", 299792458.0 / (4.0 * spec.base.carrier_freq_hz));
        spec.base.k_free_mag = sys.value("k_free_mag", 628.3185307179586477);
        spec.base.k_surface_mag = sys.value("k_surface_mag", 1088.2796185405306);
        spec.base.power_budget = sys.value("power_budget", 1.0);
        spec.base.num_paths = sys.value("num_paths", 5);

        if (!doc.contains("sweep")) throw ConfigError("sweep: section is required");
        const json& sw = doc.at("sweep");
        const std::string type = sw.at("type").get<std::string>();
        if (type == "snr") {
            spec.sweep = SweepType::snr;
            spec.snr_db_grid = sw.at("snr_db").get<std::vector<double>>();
            if (spec.snr_db_grid.empty()) throw ConfigError("sweep.snr_db: must be non-empty");
        } else if (type == "rhs_size" || type == "timing") {
            spec.sweep = (type == "rhs_size") ? SweepType::rhs_size : SweepType::timing;
            spec.m_grid = sw.at("m_list").get<std::vector<int>>();
            if (spec.m_grid.empty()) throw ConfigError("sweep.m_list: must be non-empty");
            spec.fixed_snr_db = sw.value("snr_db", 10.0);
            spec.timing_iters = sw.value("iters", 40);
            if (spec.timing_iters < 1) throw ConfigError("sweep.iters: must be >= 1");
        } else if (type == "convergence") {
            spec.sweep = SweepType::convergence;
            spec.fixed_snr_db = sw.value("snr_db", 0.0);
        } else {
            throw ConfigError("sweep.type: must be one of snr, rhs_size, convergence, timing");
        }

        if (!spec.m_grid.empty()) {
            const auto [rows, cols] = factor_rhs_size(spec.m_grid.front());
            spec.base.rhs_rows = rows;
            spec.base.rhs_cols = cols;
        } else {
            spec.base.rhs_rows = sys.at("rhs_rows").get<int>();
            spec.base.rhs_cols = sys.at("rhs_cols").get<int>();
        }

        spec.num_trials = doc.value("num_trials", 1);
        if (spec.num_trials < 1) throw ConfigError("num_trials: must be >= 1");

        if (doc.contains("methods")) {
            spec.methods.clear();
            for (const auto& name : doc.at("methods")) {
                const std::string s = name.get<std::string>();
                if (s == "proposed") spec.methods.push_back(Method::proposed);
                else if (s == "random_w") spec.methods.push_back(Method::random_w);
                else throw ConfigError("methods: unknown method '" + s + "'");
            }
            if (spec.methods.empty()) throw ConfigError("methods: must be non-empty");
        }

        spec.output_path = doc.value("output_path", std::string("results"));
        spec.master_seed = doc.value("master_seed", std::uint64_t{1});
        spec.base.seed = spec.master_seed;

        if (doc.contains("optimizer")) {
            const json& opt = doc.at("optimizer");
            spec.optimizer.tol = opt.value("tol", 1e-4);
            spec.optimizer.max_iters = opt.value("max_iters", 100);
            spec.optimizer.ridge_scale = opt.value("ridge_scale", 1e-8);
            const std::string mode = opt.value("init_mode", std::string("ones"));
            if (mode == "ones") spec.optimizer.init_mode = InitMode::ones;
            else if (mode == "half") spec.optimizer.init_mode = InitMode::half;
            else if (mode == "uniform_random") spec.optimizer.init_mode = InitMode::uniform_random;
            else throw ConfigError("optimizer.init_mode: must be ones, half or uniform_random");
            if (!(spec.optimizer.tol > 0.0)) throw ConfigError("optimizer.tol: must be > 0");
            if (spec.optimizer.max_iters < 1) throw ConfigError("optimizer.max_iters: must be >= 1");
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("spec: ") + e.what());
    }

    // Full invariant sweep with noise variances filled for the first point.
    const double snr0 = spec.sweep == SweepType::snr ? spec.snr_db_grid.front() : spec.fixed_snr_db;
    spec.base.noise_vars = Eigen::VectorXd::Constant(
        spec.base.num_users, noise_variance_from_snr_db(spec.base.power_budget, snr0));
    spec.base.validate();
    return spec;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    ExperimentResult result;
    result.sweep = spec.sweep;

    const int grid_size = spec.sweep == SweepType::snr ? static_cast<int>(spec.snr_db_grid.size())
                          : !spec.m_grid.empty()       ? static_cast<int>(spec.m_grid.size())
                                                       : 1;

    OptimizerSettings opt = spec.optimizer;
    if (spec.sweep == SweepType::timing) {
        opt.tol = 1e-300;  // never triggers: every timed run does exactly timing_iters
        opt.max_iters = spec.timing_iters;
    }

    for (int gi = 0; gi < grid_size; ++gi) {
        SystemConfig cfg = spec.base;
        double grid_value = 0.0;
        if (spec.sweep == SweepType::snr) {
            grid_value = spec.snr_db_grid[gi];
        } else if (!spec.m_grid.empty()) {
            grid_value = spec.m_grid[gi];
            const auto [rows, cols] = factor_rhs_size(spec.m_grid[gi]);
            cfg.rhs_rows = rows;
            cfg.rhs_cols = cols;
        } else {
            grid_value = spec.fixed_snr_db;
        }
        cfg.noise_vars = Eigen::VectorXd::Constant(
            cfg.num_users,
            noise_variance_from_snr_db(cfg.power_budget, snr_for_grid(spec, gi)));
        cfg.validate();

        const RhsGeometry geom = build_geometry(cfg);
        const PhaseMatrix phase = build_phase_matrix(geom, cfg.k_surface_mag);

        for (int ti = 0; ti < spec.num_trials; ++ti) {
            // Trial seed is grid-independent: every grid point reuses the
            // same per-path randomness, making sweeps paired comparisons.
            const std::uint64_t trial_seed = derive_trial_seed(spec.master_seed, ti);
            cfg.seed = trial_seed;
            const ChannelSet channels = generate_channels(cfg, geom);

            for (const Method method : spec.methods) {
                TrialRecord rec;
                rec.grid_index = gi;
                rec.grid_value = grid_value;
                rec.trial = ti;
                rec.method = method;
                rec.seed = trial_seed;
                const auto t0 = std::chrono::steady_clock::now();
                try {
                    if (method == Method::proposed) {
                        auto [state, trace] = run(cfg, channels, phase, opt);
                        rec.sum_rate = trace.iterations.back().sum_rate;
                        rec.iterations = trace.iterations_run;
                        rec.converged = trace.converged;
                        if (spec.sweep == SweepType::convergence) {
                            for (int it = 0; it < trace.iterations_run; ++it) {
                                const IterationRecord& r = trace.iterations[it];
                                result.traces.push_back(TraceRow{grid_value, ti, it + 1,
                                                                 r.sum_rate, r.weighted_sum_mse,
                                                                 r.power_used, r.min_w, r.max_w});
                            }
                        }
                    } else {
                        const std::uint64_t baseline_seed =
                            splitmix64(trial_seed ^ 0x62617365ull);
                        auto [state, rate] = random_w_baseline(cfg, channels, phase, baseline_seed);
                        rec.sum_rate = rate;
                        rec.iterations = 0;
                        rec.converged = true;
                    }
                } catch (const std::exception& e) {
                    rec.failed = true;
                    rec.error = e.what();
                }
                const auto t1 = std::chrono::steady_clock::now();
                rec.wall_time_ms =
                    std::chrono::duration<double, std::milli>(t1 - t0).count();
                result.records.push_back(std::move(rec));
            }
        }
    }

    long failures = 0;
    for (const TrialRecord& rec : result.records) failures += rec.failed ? 1 : 0;
    if (10 * failures > static_cast<long>(result.records.size()))
        throw std::runtime_error("experiment aborted: more than 10% of trials failed");

    // Per-grid-point aggregates over successful trials.
    for (int gi = 0; gi < grid_size; ++gi) {
        for (const Method method : spec.methods) {
            GridAggregate agg;
            agg.grid_index = gi;
            agg.method = method;
            double sum = 0.0, sum_sq = 0.0, wall = 0.0, per_iter = 0.0;
            for (const TrialRecord& rec : result.records) {
                if (rec.grid_index != gi || rec.method != method) continue;
                agg.grid_value = rec.grid_value;
                if (rec.failed) continue;
                ++agg.num_ok;
                sum += rec.sum_rate;
                sum_sq += rec.sum_rate * rec.sum_rate;
                wall += rec.wall_time_ms;
                per_iter += rec.wall_time_ms / std::max(1, rec.iterations);
            }
            if (agg.num_ok > 0) {
                const double n = agg.num_ok;
                agg.mean_sum_rate = sum / n;
                agg.mean_wall_time_ms = wall / n;
                agg.mean_time_per_iter_ms = per_iter / n;
                if (agg.num_ok > 1) {
                    const double var =
                        std::max(0.0, (sum_sq - n * agg.mean_sum_rate * agg.mean_sum_rate) / (n - 1.0));
                    agg.stderr_sum_rate = std::sqrt(var / n);
                }
            }
            result.aggregates.push_back(agg);
        }
    }
    return result;
}

namespace {

void write_svg_plot(const ExperimentResult& result, const std::string& path) {
    // One polyline per method over grid_value (or iteration for convergence
    // runs), mean with +/- one standard error whiskers.
    struct Point { double x, y, err; };
    struct Series { std::string label; std::vector<Point> pts; };
    std::vector<Series> series;

    if (result.sweep == SweepType::convergence) {
        Series s{"proposed", {}};
        int max_iter = 0;
        for (const TraceRow& row : result.traces) max_iter = std::max(max_iter, row.iteration);
        for (int it = 1; it <= max_iter; ++it) {
            double sum = 0.0, sum_sq = 0.0;
            int n = 0;
            for (const TraceRow& row : result.traces) {
                if (row.iteration == it) { sum += row.sum_rate; sum_sq += row.sum_rate * row.sum_rate; ++n; }
            }
            if (n == 0) continue;
            const double mean = sum / n;
            const double var = n > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
            s.pts.push_back({static_cast<double>(it), mean, std::sqrt(var / std::max(1, n))});
        }
        series.push_back(std::move(s));
    } else {
        for (const Method method : {Method::proposed, Method::random_w}) {
            Series s{method_name(method), {}};
            for (const GridAggregate& agg : result.aggregates) {
                if (agg.method != method || agg.num_ok == 0) continue;
                const double y = result.sweep == SweepType::timing ? agg.mean_time_per_iter_ms
                                                                   : agg.mean_sum_rate;
                const double e = result.sweep == SweepType::timing ? 0.0 : agg.stderr_sum_rate;
                s.pts.push_back({agg.grid_value, y, e});
            }
            if (!s.pts.empty()) series.push_back(std::move(s));
        }
    }
    if (series.empty()) return;

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const Series& s : series) {
        for (const Point& p : s.pts) {
            xmin = std::min(xmin, p.x); xmax = std::max(xmax, p.x);
            ymin = std::min(ymin, p.y - p.err); ymax = std::max(ymax, p.y + p.err);
        }
    }
    if (xmax <= xmin) { xmin -= 1.0; xmax += 1.0; }
    const double ypad = 0.05 * std::max(1e-12, ymax - ymin);
    ymin -= ypad; ymax += ypad;

    const double width = 640, height = 440, ml = 70, mr = 20, mt = 30, mb = 50;
    const auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
    const auto py = [&](double y) { return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb); };

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_results: cannot open '" + path + "'");
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << width << " " << height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << width - ml - mr
        << "\" height=\"" << height - mt - mb << "\" fill=\"none\" stroke=\"#444\"/>\n";

    for (int i = 0; i <= 5; ++i) {
        const double xv = xmin + (xmax - xmin) * i / 5.0;
        const double yv = ymin + (ymax - ymin) * i / 5.0;
        out << "<line x1=\"" << px(xv) << "\" y1=\"" << height - mb << "\" x2=\"" << px(xv)
            << "\" y2=\"" << height - mb + 5 << "\" stroke=\"#444\"/>\n";
        out << "<text x=\"" << px(xv) << "\" y=\"" << height - mb + 18
            << "\" text-anchor=\"middle\">" << fmt_double(std::round(xv * 100.0) / 100.0) << "</text>\n";
        out << "<line x1=\"" << ml - 5 << "\" y1=\"" << py(yv) << "\" x2=\"" << ml << "\" y2=\""
            << py(yv) << "\" stroke=\"#444\"/>\n";
        out << "<text x=\"" << ml - 8 << "\" y=\"" << py(yv) + 4
            << "\" text-anchor=\"end\">" << fmt_double(std::round(yv * 100.0) / 100.0) << "</text>\n";
    }
    const std::string xlabel = result.sweep == SweepType::snr        ? "SNR [dB]"
                               : result.sweep == SweepType::convergence ? "iteration"
                                                                        : "RHS elements M";
    const std::string ylabel =
        result.sweep == SweepType::timing ? "time per iteration [ms]" : "sum rate [bits/s/Hz]";
    out << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\">" << xlabel << "</text>\n";
    out << "<text x=\"16\" y=\"" << (mt + height - mb) / 2
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << (mt + height - mb) / 2
        << ")\">" << ylabel << "</text>\n";

    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c"};
    for (std::size_t si = 0; si < series.size(); ++si) {
        const char* color = colors[si % 3];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const Point& p : series[si].pts) out << px(p.x) << "," << py(p.y) << " ";
        out << "\"/>\n";
        for (const Point& p : series[si].pts) {
            out << "<circle cx=\"" << px(p.x) << "\" cy=\"" << py(p.y) << "\" r=\"2.5\" fill=\""
                << color << "\"/>\n";
            if (p.err > 0.0)
                out << "<line x1=\"" << px(p.x) << "\" y1=\"" << py(p.y - p.err) << "\" x2=\""
                    << px(p.x) << "\" y2=\"" << py(p.y + p.err) << "\" stroke=\"" << color
                    << "\"/>\n";
        }
        out << "<text x=\"" << width - mr - 120 << "\" y=\"" << mt + 16 + 16 * si << "\" fill=\""
            << color << "\">" << series[si].label << "</text>\n";
    }
    out << "</svg>\n";
    if (!out.good()) throw std::runtime_error("write_results: failed writing '" + path + "'");
}

}  // namespace

void write_results(const ExperimentResult& result, const std::string& path_base) {
    namespace fs = std::filesystem;
    const fs::path base(path_base);
    if (base.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(base.parent_path(), ec);
        if (ec)
            throw std::runtime_error("write_results: cannot create directory '" +
                                     base.parent_path().string() + "': " + ec.message());
    }

    // Flat record table. wall_time_ms stays the last column so determinism
    // comparisons can strip it cheaply.
    const std::string csv_path = path_base + ".csv";
    {
        std::ofstream out(csv_path, std::ios::binary);
        if (!out) throw std::runtime_error("write_results: cannot open '" + csv_path + "'");
        out << "sweep,grid_value,trial,method,seed,sum_rate,iterations,converged,failed,error,wall_time_ms\n";
        for (const TrialRecord& rec : result.records) {
            out << sweep_name(result.sweep) << ',' << fmt_double(rec.grid_value) << ','
                << rec.trial << ',' << method_name(rec.method) << ',' << rec.seed << ','
                << fmt_double(rec.sum_rate) << ',' << rec.iterations << ','
                << (rec.converged ? 1 : 0) << ',' << (rec.failed ? 1 : 0) << ','
                << sanitize_field(rec.error) << ',' << fmt_double(rec.wall_time_ms) << '\n';
        }
        if (!out.good()) throw std::runtime_error("write_results: failed writing '" + csv_path + "'");
    }

    if (!result.traces.empty()) {
        const std::string trace_path = path_base + "_trace.csv";
        std::ofstream out(trace_path, std::ios::binary);
        if (!out) throw std::runtime_error("write_results: cannot open '" + trace_path + "'");
        out << "grid_value,trial,iteration,sum_rate,weighted_sum_mse,power_used,min_w,max_w\n";
        for (const TraceRow& row : result.traces) {
            out << fmt_double(row.grid_value) << ',' << row.trial << ',' << row.iteration << ','
                << fmt_double(row.sum_rate) << ',' << fmt_double(row.weighted_sum_mse) << ','
                << fmt_double(row.power_used) << ',' << fmt_double(row.min_w) << ','
                << fmt_double(row.max_w) << '\n';
        }
        if (!out.good())
            throw std::runtime_error("write_results: failed writing '" + trace_path + "'");
    }

    {
        json summary;
        summary["sweep"] = sweep_name(result.sweep);
        summary["aggregates"] = json::array();
        for (const GridAggregate& agg : result.aggregates) {
            summary["aggregates"].push_back({{"grid_value", agg.grid_value},
                                             {"method", method_name(agg.method)},
                                             {"num_ok", agg.num_ok},
                                             {"mean_sum_rate", agg.mean_sum_rate},
                                             {"stderr_sum_rate", agg.stderr_sum_rate},
                                             {"mean_wall_time_ms", agg.mean_wall_time_ms},
                                             {"mean_time_per_iter_ms", agg.mean_time_per_iter_ms}});
        }
        const std::string json_path = path_base + "_summary.json";
        std::ofstream out(json_path, std::ios::binary);
        if (!out) throw std::runtime_error("write_results: cannot open '" + json_path + "'");
        out << summary.dump(2) << '\n';
        if (!out.good())
            throw std::runtime_error("write_results: failed writing '" + json_path + "'");
    }

    write_svg_plot(result, path_base + ".svg");
}

}  // namespace holobf
