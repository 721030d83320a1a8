// Copyright 2026 The gossipsim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

// Command implementations behind the `gossip` executable. Each returns the
// process exit code: 0 success, 2 configuration error, 3 runtime or
// verification failure.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gossip/config.hpp"
#include "gossip/error.hpp"
#include "gossip/metrics.hpp"
#include "gossip/montecarlo.hpp"
#include "gossip/oracle.hpp"
#include "gossip/theory.hpp"

namespace gossip::cli {

inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int { kOk = 0, kConfigError = 2, kRuntimeError = 3 };

struct Options {
    std::string config_path;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trials;
    std::optional<std::uint64_t> steps;
    std::string out_dir = "gossip_out";
    std::string format = "csv";
};

/// Config JSON after manifest unwrapping and overrides, plus the directory relative paths resolve against.
struct LoadedConfig {
    nlohmann::json resolved;
    std::filesystem::path base_dir;
};

inline LoadedConfig load(const Options& opt)
{
    auto j = read_json_file(opt.config_path);
    if (j.is_object() && j.contains("config") && j.contains("tool_version"))
        j = nlohmann::json(j.at("config"));
    if (!j.is_object())
        throw Error(ErrorCode::BadConfig, "config must be a JSON object");
    for (const auto& s : opt.sets)
        apply_override(j, s);
    if (opt.seed)
        j["seed"] = *opt.seed;
    if (opt.trials)
        j["trials"] = *opt.trials;
    if (opt.steps)
        j["steps"] = *opt.steps;
    auto base = std::filesystem::path(opt.config_path).parent_path();
    return {std::move(j), base.empty() ? std::filesystem::path(".") : base};
}

inline std::string utc_timestamp()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream ss;
    ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return ss.str();
}

inline std::filesystem::path prepare_dir(const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw Error(ErrorCode::Io, "cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

inline void write_text(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    body(out);
    if (!out)
        throw Error(ErrorCode::Io, "write to " + path.string() + " failed");
}

/// Everything needed to replay a run; written before the first trial.
struct RunManifest {
    std::string command;
    std::string config_path;
    nlohmann::json config;
    std::vector<std::string> outputs;
    std::string started_at = utc_timestamp();
    std::optional<std::string> finished_at{};

    nlohmann::json to_json() const
    {
        nlohmann::json j;
        j["command"] = command;
        j["config_path"] = config_path;
        j["config"] = config;
        j["config_hash"] = hex64(config_hash(config));
        j["seed"] = config.value("seed", std::uint64_t{0});
        j["tool_version"] = kToolVersion;
        j["outputs"] = outputs;
        j["started_at"] = started_at;
        j["finished_at"] = finished_at ? nlohmann::json(*finished_at) : nlohmann::json(nullptr);
        return j;
    }

    void write(const std::filesystem::path& dir) const
    {
        write_text(dir / "manifest.json", [&](std::ostream& o) { o << to_json().dump(2) << '\n'; });
    }
};

/// Map exceptions onto the exit-code contract; messages go to `err`.
inline int guarded(const std::function<int()>& body, std::ostream& err = std::cerr)
{
    try {
        return body();
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return is_config_error(e.code()) ? kConfigError : kRuntimeError;
    } catch (const nlohmann::json::exception& e) {
        err << "error: BadConfig: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
}

//---------------------------------------------------------------------------//

inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj, std::uint64_t trial, double xAve)
{
    const std::size_t n = traj.snapshots.empty() ? 0 : traj.snapshots.front().x.size();
    out << "trial,k";
    for (std::size_t i = 1; i <= n; ++i)
        out << ",x_" << i;
    out << ",H,h,spread,L\n" << std::setprecision(17);
    for (const auto& s : traj.snapshots) {
        const auto m = measure(s, xAve);
        out << trial << ',' << s.k;
        for (double v : s.x)
            out << ',' << v;
        out << ',' << m.H << ',' << m.h << ',' << m.spread << ',' << m.L << '\n';
    }
}

/// One trajectory of trial `trial_index` at the config's checkpoints.
inline int cmd_simulate(const Options& opt, std::uint64_t trial_index = 0, std::ostream& err = std::cerr)
{
    return guarded(
        [&] {
            const auto loaded = load(opt);
            const auto cfg = parse_config(loaded.resolved, loaded.base_dir);
            const auto dir = prepare_dir(opt.out_dir);
            RunManifest manifest{"simulate", opt.config_path, cfg.source, {"trajectory.csv"}};
            manifest.write(dir);

            auto rng = make_stream(cfg.seed, trial_index);
            auto x0 = cfg.initial.materialize(cfg.size(), rng);
            const double xAve = average(x0);
            const auto traj = run_trajectory(cfg.model, std::move(x0), cfg.k0, cfg.steps, cfg.checkpoints, rng);
            write_text(dir / "trajectory.csv",
                       [&](std::ostream& o) { write_trajectory_csv(o, traj, trial_index, xAve); });
            if (traj.diverged())
                err << "note: state overflowed at slot " << *traj.diverged_at << "; trajectory truncated\n";
            manifest.finished_at = utc_timestamp();
            manifest.write(dir);
            return kOk;
        },
        err);
}

inline void write_aggregate(const std::filesystem::path& dir, const ExperimentAggregate& agg,
                            const std::string& format)
{
    if (format == "json")
        write_text(dir / "aggregate.json", [&](std::ostream& o) { o << agg.to_json().dump(2) << '\n'; });
    else
        write_text(dir / "aggregate.csv", [&](std::ostream& o) { agg.write_csv(o); });
}

inline void check_format(const std::string& format)
{
    if (format != "csv" && format != "json")
        throw Error(ErrorCode::BadConfig, "--format must be csv or json");
}

inline int cmd_experiment(const Options& opt, std::ostream& err = std::cerr)
{
    return guarded(
        [&] {
            check_format(opt.format);
            const auto loaded = load(opt);
            const auto cfg = parse_config(loaded.resolved, loaded.base_dir);
            const auto dir = prepare_dir(opt.out_dir);
            RunManifest manifest{"experiment", opt.config_path, cfg.source, {"aggregate." + opt.format}};
            manifest.write(dir);
            const auto agg = run_experiment(cfg);
            write_aggregate(dir, agg, opt.format);
            for (const auto& r : agg.rows)
                if (r.heavy_tail()) {
                    err << "note: heavy-tailed L (kurtosis > " << kHeavyTailKurtosis
                        << "); confidence intervals are advisory\n";
                    break;
                }
            manifest.finished_at = utc_timestamp();
            manifest.write(dir);
            return kOk;
        },
        err);
}

/// Axis and values come from the config's "sweep" block unless given here.
inline int cmd_sweep(const Options& opt, const std::optional<std::string>& axis_override = std::nullopt,
                     const std::vector<double>& values_override = {}, std::ostream& err = std::cerr)
{
    return guarded(
        [&] {
            check_format(opt.format);
            auto loaded = load(opt);
            const auto tmpl_cfg = parse_config(loaded.resolved, loaded.base_dir);
            SweepSpec spec = tmpl_cfg.sweep.value_or(SweepSpec{});
            if (axis_override)
                spec.axis = *axis_override;
            if (!values_override.empty())
                spec.values = values_override;
            if (spec.axis.empty() || spec.values.empty())
                throw Error(ErrorCode::BadConfig, "sweep needs an axis and at least one value");
            // Validate the axis before writing anything.
            {
                auto probe = loaded.resolved;
                set_axis(probe, spec.axis, spec.values.front());
            }
            loaded.resolved["sweep"] = {{"axis", spec.axis}, {"values", spec.values}};

            const auto dir = prepare_dir(opt.out_dir);
            RunManifest manifest{"sweep", opt.config_path, loaded.resolved, {"sweep.json"}};
            std::vector<std::string> subdirs;
            for (std::size_t i = 0; i < spec.values.size(); ++i) {
                std::ostringstream name;
                name << "point_" << std::setw(3) << std::setfill('0') << i;
                subdirs.push_back(name.str());
                manifest.outputs.push_back(name.str() + "/aggregate." + opt.format);
                manifest.outputs.push_back(name.str() + "/theory.json");
            }
            manifest.write(dir);

            const auto points = sweep(loaded.resolved, spec.axis, spec.values, loaded.base_dir);
            nlohmann::json summary;
            summary["axis"] = spec.axis;
            summary["points"] = nlohmann::json::array();
            for (std::size_t i = 0; i < points.size(); ++i) {
                const auto sub = prepare_dir(dir / subdirs[i]);
                write_aggregate(sub, points[i].aggregate, opt.format);
                write_text(sub / "theory.json",
                           [&](std::ostream& o) { o << points[i].theory.to_json().dump(2) << '\n'; });
                summary["points"].push_back({{"value", points[i].value},
                                             {"dir", subdirs[i]},
                                             {"Agreed", points[i].aggregate.agreed},
                                             {"Diverged", points[i].aggregate.diverged},
                                             {"Undecided", points[i].aggregate.undecided}});
            }
            write_text(dir / "sweep.json", [&](std::ostream& o) { o << summary.dump(2) << '\n'; });
            manifest.finished_at = utc_timestamp();
            manifest.write(dir);
            return kOk;
        },
        err);
}

/// Theory report JSON on `out`; Inconclusive verdicts still exit 0.
inline int cmd_check(const Options& opt, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    return guarded(
        [&] {
            const auto loaded = load(opt);
            const auto cfg = parse_config(loaded.resolved, loaded.base_dir);
            out << theory_report(cfg.model, cfg.theory).to_json().dump(2) << '\n';
            return kOk;
        },
        err);
}

/// Enumerated vs spectral E[L(k+1) | x] at slot k0 over random states.
inline int cmd_oracle(const Options& opt, std::size_t states = 100, std::ostream& out = std::cout,
                      std::ostream& err = std::cerr)
{
    return guarded(
        [&] {
            const auto loaded = load(opt);
            const auto cfg = parse_config(loaded.resolved, loaded.base_dir);
            if (cfg.size() > kOracleMaxNodes)
                throw Error(ErrorCode::BadConfig, "oracle enumeration needs n <= 4, config has n = "
                                                      + std::to_string(cfg.size()));
            if (!cfg.model.mode.symmetric)
                throw Error(ErrorCode::BadConfig, "oracle requires symmetric mode");
            auto rng = make_stream(cfg.seed, 0);
            const auto cmp = compare_one_slot(cfg.model, cfg.model.t_schedule(cfg.k0), cfg.model.s_schedule(cfg.k0),
                                              states, rng);
            out << std::setprecision(6) << "states " << cmp.states << "\nmax_abs_discrepancy "
                << cmp.max_abs_discrepancy << '\n';
            if (!(cmp.max_abs_discrepancy <= 1e-12)) {
                err << "error: enumerated and spectral one-slot expectations differ by "
                    << cmp.max_abs_discrepancy << '\n';
                return kRuntimeError;
            }
            return kOk;
        },
        err);
}

}  // namespace gossip::cli
