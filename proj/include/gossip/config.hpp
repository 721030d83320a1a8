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

// JSON experiment configuration: parsing, dotted-path overrides and hashing.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gossip/dynamics.hpp"
#include "gossip/error.hpp"
#include "gossip/graph.hpp"
#include "gossip/metrics.hpp"
#include "gossip/rng.hpp"
#include "gossip/schedule.hpp"
#include "gossip/theory.hpp"

namespace gossip {

struct InitialSpec {
    enum class Kind { Ramp, Explicit, Uniform };
    Kind kind = Kind::Ramp;
    std::vector<double> values;
    double low = 0.0;
    double high = 1.0;

    bool deterministic() const { return kind != Kind::Uniform; }

    /// x_i = i (one-based), the listed values, or uniform draws from the trial stream.
    std::vector<double> materialize(std::size_t n, Xoshiro256& rng) const
    {
        std::vector<double> x(n);
        switch (kind) {
        case Kind::Ramp:
            for (std::size_t i = 0; i < n; ++i)
                x[i] = static_cast<double>(i + 1);
            break;
        case Kind::Explicit:
            x = values;
            break;
        case Kind::Uniform:
            for (double& v : x)
                v = low + (high - low) * rng.uniform01();
            break;
        }
        return x;
    }
};

struct SweepSpec {
    std::string axis;
    std::vector<double> values;
};

struct ExperimentConfig {
    Model model;
    InitialSpec initial;
    std::uint64_t k0 = 0;
    std::uint64_t trials = 1;
    std::uint64_t steps = 0;
    std::vector<std::uint64_t> checkpoints;  ///< absolute slots, sorted, within [k0, k0 + steps]
    std::uint64_t seed = 0;
    double eps_agree = 1e-6;
    double big_m = 1e6;
    TheoryOptions theory;
    std::optional<SweepSpec> sweep;
    nlohmann::json source;  ///< resolved JSON the config was built from

    std::size_t size() const { return model.size(); }
};

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a64(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Keys are sorted by nlohmann's default object type, so dump() is canonical.
inline std::uint64_t config_hash(const nlohmann::json& resolved) { return fnv1a64(resolved.dump()); }

inline std::string hex64(std::uint64_t v)
{
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4)
        s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    return s;
}

//---------------------------------------------------------------------------//
// Dotted paths
//---------------------------------------------------------------------------//

inline nlohmann::json::json_pointer dotted_pointer(const std::string& path)
{
    if (path.empty())
        throw Error(ErrorCode::BadConfig, "empty parameter path");
    std::string ptr;
    std::size_t start = 0;
    for (;;) {
        const auto dot = path.find('.', start);
        const auto part = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty())
            throw Error(ErrorCode::BadConfig, "malformed parameter path '" + path + "'");
        ptr += '/';
        ptr += part;
        if (dot == std::string::npos)
            break;
        start = dot + 1;
    }
    return nlohmann::json::json_pointer(ptr);
}

/// Value text is read as JSON when it parses, otherwise kept as a string.
inline nlohmann::json parse_override_value(const std::string& text)
{
    auto v = nlohmann::json::parse(text, nullptr, false);
    return v.is_discarded() ? nlohmann::json(text) : v;
}

/// Apply `path=value`.
inline void apply_override(nlohmann::json& j, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw Error(ErrorCode::BadConfig, "override '" + assignment + "' is not of the form path=value");
    try {
        j[dotted_pointer(assignment.substr(0, eq))] = parse_override_value(assignment.substr(eq + 1));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::BadConfig, "override '" + assignment + "': " + e.what());
    }
}

/// Set a numeric scalar that must already exist; used for sweep axes.
inline void set_axis(nlohmann::json& j, const std::string& axis, double value)
{
    nlohmann::json::json_pointer ptr;
    try {
        ptr = dotted_pointer(axis);
    } catch (const Error&) {
        throw Error(ErrorCode::BadAxis, "malformed axis '" + axis + "'");
    }
    if (!j.contains(ptr) || !j.at(ptr).is_number())
        throw Error(ErrorCode::BadAxis, "axis '" + axis + "' does not name a numeric field of the config");
    j[ptr] = value;
}

//---------------------------------------------------------------------------//
// Parsing
//---------------------------------------------------------------------------//

namespace detail {

template <class T>
T get_or(const nlohmann::json& j, const char* key, T fallback)
{
    if (!j.contains(key))
        return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw Error(ErrorCode::BadConfig, std::string("field '") + key + "' has the wrong type");
    }
}

inline const nlohmann::json& require(const nlohmann::json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key))
        throw Error(ErrorCode::BadConfig, std::string("missing field '") + key + "'");
    return j.at(key);
}

inline std::uint64_t get_count(const nlohmann::json& j, const char* key, std::uint64_t fallback)
{
    if (!j.contains(key))
        return fallback;
    const auto& v = j.at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
        throw Error(ErrorCode::BadConfig, std::string("field '") + key + "' must be a nonnegative integer");
    return v.get<std::uint64_t>();
}

inline SelectionMatrix parse_graph(const nlohmann::json& g, const std::filesystem::path& base_dir)
{
    if (g.contains("matrix"))
        return validate(matrix_rows_from_json(g.at("matrix").is_array()
                                                  ? nlohmann::json{{"rows", g.at("matrix")}}
                                                  : g.at("matrix")));
    if (g.contains("file")) {
        const auto path = base_dir / g.at("file").get<std::string>();
        std::ifstream in(path);
        if (!in)
            throw Error(ErrorCode::BadConfig, "cannot read matrix file " + path.string());
        return validate(read_matrix_csv(in));
    }
    if (g.contains("generator")) {
        const auto& s = g.at("generator");
        TopologySpec spec;
        spec.kind = topology_kind_from_string(get_or<std::string>(s, "kind", "complete"));
        spec.n = get_count(s, "n", spec.n);
        spec.p = get_or(s, "p", spec.p);
        spec.k_nn = get_count(s, "k", spec.k_nn);
        spec.p_rewire = get_or(s, "p_rewire", spec.p_rewire);
        spec.m = get_count(s, "m", spec.m);
        spec.seed = get_count(s, "seed", spec.seed);
        return generate(spec);
    }
    throw Error(ErrorCode::BadConfig, "graph needs one of 'matrix', 'file' or 'generator'");
}

inline Schedule parse_schedule(const nlohmann::json& s, const char* name)
{
    const auto kind = get_or<std::string>(s, "kind", "constant");
    Schedule out;
    if (kind == "constant") {
        out = Schedule::constant(get_or(s, "value", 0.5));
    } else if (kind == "explicit") {
        out = Schedule::explicit_list(get_or<std::vector<double>>(s, "list", {}), get_or(s, "tail", 0.5));
    } else if (kind == "power") {
        out = Schedule::power(get_or(s, "value", 1.0), get_or(s, "shape", 1.0), get_or(s, "complement", false));
    } else if (kind == "geometric") {
        out = Schedule::geometric(get_or(s, "value", 1.0), get_or(s, "shape", 0.5), get_or(s, "complement", false));
    } else {
        throw Error(ErrorCode::BadConfig, std::string(name) + ": unknown schedule kind '" + kind + "'");
    }
    return out;
}

inline InitialSpec parse_initial(const nlohmann::json& j, std::size_t n)
{
    InitialSpec init;
    const auto kind = get_or<std::string>(j, "kind", "ramp");
    if (kind == "ramp") {
        init.kind = InitialSpec::Kind::Ramp;
    } else if (kind == "explicit") {
        init.kind = InitialSpec::Kind::Explicit;
        init.values = get_or<std::vector<double>>(j, "values", {});
        if (init.values.size() != n)
            throw Error(ErrorCode::BadConfig, "initial.values has " + std::to_string(init.values.size())
                                                  + " entries, graph has " + std::to_string(n));
        for (double v : init.values)
            if (!std::isfinite(v))
                throw Error(ErrorCode::BadConfig, "initial.values must be finite");
    } else if (kind == "uniform") {
        init.kind = InitialSpec::Kind::Uniform;
        init.low = get_or(j, "low", 0.0);
        init.high = get_or(j, "high", 1.0);
        if (!(std::isfinite(init.low) && std::isfinite(init.high) && init.low < init.high))
            throw Error(ErrorCode::BadConfig, "initial uniform range needs finite low < high");
    } else {
        throw Error(ErrorCode::BadConfig, "unknown initial kind '" + kind + "'");
    }
    return init;
}

/// {0, 1, 2, 4, 8, ...} offsets from k0, plus the final slot.
inline std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t k0, std::uint64_t steps)
{
    std::vector<std::uint64_t> out{k0};
    for (std::uint64_t d = 1; d < steps; d *= 2)
        out.push_back(k0 + d);
    out.push_back(k0 + steps);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline std::vector<std::uint64_t> parse_checkpoints(const nlohmann::json& root, std::uint64_t k0,
                                                    std::uint64_t steps)
{
    if (!root.contains("checkpoints") || root.at("checkpoints") == "geometric")
        return geometric_checkpoints(k0, steps);
    const auto& c = root.at("checkpoints");
    std::vector<std::uint64_t> out;
    if (c.is_object() && c.contains("every")) {
        const auto every = get_count(c, "every", 1);
        if (every == 0)
            throw Error(ErrorCode::BadConfig, "checkpoints.every must be positive");
        for (std::uint64_t k = k0; k < k0 + steps; k += every)
            out.push_back(k);
        out.push_back(k0 + steps);
        return out;
    }
    if (!c.is_array())
        throw Error(ErrorCode::BadConfig, "checkpoints must be a list, {\"every\": m} or \"geometric\"");
    for (const auto& v : c) {
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
            throw Error(ErrorCode::BadConfig, "checkpoints must be nonnegative integers");
        out.push_back(v.get<std::uint64_t>());
    }
    if (!std::is_sorted(out.begin(), out.end()) || std::adjacent_find(out.begin(), out.end()) != out.end())
        throw Error(ErrorCode::BadConfig, "checkpoints must be strictly increasing");
    if (!out.empty() && (out.front() < k0 || out.back() > k0 + steps))
        throw Error(ErrorCode::BadConfig, "checkpoints must lie within [k0, k0 + steps]");
    return out;
}

}  // namespace detail

/*!
 * Build a validated configuration. Relative file paths resolve against
 * base_dir. A run manifest (an object with "config" and "tool_version") is
 * accepted in place of a config and replays the config it recorded.
 */
inline ExperimentConfig parse_config(const nlohmann::json& input, const std::filesystem::path& base_dir = ".")
{
    using detail::get_count;
    using detail::get_or;
    const nlohmann::json& j =
        input.is_object() && input.contains("config") && input.contains("tool_version") ? input.at("config") : input;
    if (!j.is_object())
        throw Error(ErrorCode::BadConfig, "config must be a JSON object");

    try {
        auto a = detail::parse_graph(detail::require(j, "graph"), base_dir);
        if (!is_weakly_connected(a))
            throw Error(ErrorCode::Disconnected, "induced graph is not weakly connected");

        UpdateMode mode;
        const auto mode_name = get_or<std::string>(j, "mode", "symmetric");
        if (mode_name == "symmetric")
            mode = UpdateMode::make_symmetric();
        else if (mode_name == "asymmetric")
            mode = UpdateMode::make_asymmetric(active_rule_from_string(get_or<std::string>(j, "active_rule", "uniform")));
        else
            throw Error(ErrorCode::BadConfig, "mode must be 'symmetric' or 'asymmetric'");

        EventProbabilities probs;
        if (j.contains("probs")) {
            const auto& p = j.at("probs");
            probs = EventProbabilities::make(get_or(p, "alpha", 1.0), get_or(p, "beta", 0.0), get_or(p, "gamma", 0.0));
        }

        const nlohmann::json empty = nlohmann::json::object();
        const auto& sched = j.contains("schedules") ? j.at("schedules") : empty;
        const auto& tj = sched.contains("T") ? sched.at("T") : empty;
        const auto& sj = sched.contains("S") ? sched.at("S") : empty;
        Schedule t = attraction_clip(detail::parse_schedule(tj, "schedules.T"));
        Schedule s = repulsion_clip(detail::parse_schedule(sj, "schedules.S"));
        t.lo = get_or(tj, "lo", t.lo);
        t.hi = get_or(tj, "hi", t.hi);
        s.lo = get_or(sj, "lo", s.lo);
        s.hi = get_or(sj, "hi", s.hi);
        if (t.hi > 1.0)
            throw Error(ErrorCode::BadParameter, "schedules.T: upper clip must not exceed 1");
        t.check("schedules.T");
        s.check("schedules.S");

        Model model{std::move(a), mode, probs, std::move(t), std::move(s)};
        const std::size_t n = model.size();

        const auto k0 = get_count(j, "k0", 0);
        const auto trials = get_count(j, "trials", 1);
        if (trials == 0)
            throw Error(ErrorCode::BadConfig, "trials must be at least 1");
        const auto steps = get_count(j, "steps", 200);
        auto initial = detail::parse_initial(j.contains("initial") ? j.at("initial") : empty, n);
        auto checkpoints = detail::parse_checkpoints(j, k0, steps);

        const auto& cl = j.contains("classify") ? j.at("classify") : empty;
        const double eps = get_or(cl, "eps_agree", 1e-6);
        double spread0 = initial.kind == InitialSpec::Kind::Uniform ? initial.high - initial.low : 0.0;
        if (initial.deterministic()) {
            Xoshiro256 unused(0);
            const auto x = initial.materialize(n, unused);
            spread0 = *std::max_element(x.begin(), x.end()) - *std::min_element(x.begin(), x.end());
        }
        const double big_m = get_or(cl, "big_m", 1e6 * std::max(spread0, 1.0));
        if (!(eps > 0.0) || !(big_m > eps))
            throw Error(ErrorCode::BadConfig, "classify thresholds need 0 < eps_agree < big_m");

        TheoryOptions theory;
        if (j.contains("theory")) {
            const auto& th = j.at("theory");
            theory.horizon = get_count(th, "horizon", theory.horizon);
            theory.tau_grid = get_or(th, "tau_grid", theory.tau_grid);
            theory.z_max = static_cast<int>(get_count(th, "z_max", static_cast<std::uint64_t>(theory.z_max)));
            theory.margin = get_or(th, "margin", theory.margin);
            for (double tau : theory.tau_grid)
                if (!(tau > 0.0 && tau < 1.0))
                    throw Error(ErrorCode::BadConfig, "theory.tau_grid entries must lie in (0, 1)");
        }
        if (theory.horizon < n)
            throw Error(ErrorCode::BadHorizon, "theory.horizon must be at least n");

        std::optional<SweepSpec> sweep;
        if (j.contains("sweep")) {
            const auto& sw = j.at("sweep");
            sweep = SweepSpec{get_or<std::string>(sw, "axis", ""), get_or<std::vector<double>>(sw, "values", {})};
        }

        return ExperimentConfig{std::move(model), std::move(initial), k0, trials, steps, std::move(checkpoints),
                                get_count(j, "seed", 0), eps, big_m, std::move(theory), std::move(sweep), j};
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::BadConfig, e.what());
    }
}

inline nlohmann::json read_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::BadConfig, "cannot read config file " + path.string());
    auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded())
        throw Error(ErrorCode::BadConfig, "config file " + path.string() + " is not valid JSON");
    return j;
}

}  // namespace gossip
