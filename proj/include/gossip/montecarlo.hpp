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

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <span>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "gossip/config.hpp"
#include "gossip/dynamics.hpp"
#include "gossip/metrics.hpp"
#include "gossip/rng.hpp"
#include "gossip/theory.hpp"

namespace gossip {

struct TrialResult {
    std::vector<MeasureSample> samples;          ///< one per checkpoint
    std::vector<Classification> classes;         ///< running classification at each checkpoint
    Classification classification = Classification::Undecided;
    std::optional<std::uint64_t> diverged_at;    ///< slot at which the overflow guard fired
};

/*!
 * One trial on stream (seed, trial_index). After an overflow the remaining
 * checkpoints hold +inf measures.
 */
inline TrialResult run_trial(const ExperimentConfig& cfg, std::uint64_t trial_index)
{
    auto rng = make_stream(cfg.seed, trial_index);
    auto x0 = cfg.initial.materialize(cfg.size(), rng);
    const double xAve = average(x0);

    TrialResult out;
    out.samples.reserve(cfg.checkpoints.size());
    out.classes.reserve(cfg.checkpoints.size());
    Simulator sim(cfg.model, NetworkState{std::move(x0), cfg.k0}, rng);
    bool exceeded = false;

    auto record = [&](const MeasureSample& m) {
        exceeded |= m.spread > cfg.big_m;
        out.samples.push_back(m);
        out.classes.push_back(exceeded ? Classification::Diverged
                                       : (m.spread < cfg.eps_agree ? Classification::Agreed
                                                                   : Classification::Undecided));
    };

    try {
        for (std::uint64_t mark : cfg.checkpoints) {
            while (sim.state().k < mark)
                sim.step();
            record(measure(sim.state(), xAve));
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NonFiniteState)
            throw;
        out.diverged_at = sim.state().k;
        constexpr double inf = std::numeric_limits<double>::infinity();
        while (out.samples.size() < cfg.checkpoints.size()) {
            out.samples.push_back({cfg.checkpoints[out.samples.size()], inf, -inf, inf, inf});
            out.classes.push_back(Classification::Diverged);
        }
    }
    out.classification = classify(out.samples, cfg.eps_agree, cfg.big_m, out.diverged_at.has_value());
    return out;
}

//---------------------------------------------------------------------------//
/// Streaming mean, variance and fourth moment (one-pass, order-sensitive).
class RunningMoments {
  public:
    void push(double x)
    {
        const double n1 = static_cast<double>(n_);
        ++n_;
        const double n = static_cast<double>(n_);
        const double delta = x - mean_;
        const double dn = delta / n;
        const double dn2 = dn * dn;
        const double term1 = delta * dn * n1;
        mean_ += dn;
        m4_ += term1 * dn2 * (n * n - 3 * n + 3) + 6 * dn2 * m2_ - 4 * dn * m3_;
        m3_ += term1 * dn * (n - 2) - 3 * dn * m2_;
        m2_ += term1;
    }

    std::uint64_t count() const { return n_; }
    double mean() const { return mean_; }
    /// Unbiased sample variance; zero for a single sample.
    double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    double stderr_mean() const { return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0; }
    /// Half-width of the 95% normal-approximation interval.
    double ci95() const { return 1.96 * stderr_mean(); }
    /// Non-excess sample kurtosis; NaN when the variance vanishes.
    double kurtosis() const
    {
        if (!(m2_ > 0.0))
            return std::numeric_limits<double>::quiet_NaN();
        return static_cast<double>(n_) * m4_ / (m2_ * m2_);
    }

  private:
    std::uint64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
    double m3_ = 0.0;
    double m4_ = 0.0;
};

/// Kurtosis of L above this marks the confidence intervals as advisory.
inline constexpr double kHeavyTailKurtosis = 10.0;

struct CheckpointStats {
    std::uint64_t k = 0;
    RunningMoments L;
    RunningMoments spread;
    std::uint64_t agreed = 0;
    std::uint64_t diverged = 0;
    std::uint64_t undecided = 0;

    bool heavy_tail() const { return L.kurtosis() > kHeavyTailKurtosis; }
};

struct ExperimentAggregate {
    std::vector<CheckpointStats> rows;
    std::uint64_t trials = 0;
    std::uint64_t agreed = 0;
    std::uint64_t diverged = 0;
    std::uint64_t undecided = 0;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    double wall_seconds = 0.0;

    void fold(const TrialResult& r)
    {
        for (std::size_t c = 0; c < rows.size(); ++c) {
            rows[c].L.push(r.samples[c].L);
            rows[c].spread.push(r.samples[c].spread);
            switch (r.classes[c]) {
            case Classification::Agreed: ++rows[c].agreed; break;
            case Classification::Diverged: ++rows[c].diverged; break;
            case Classification::Undecided: ++rows[c].undecided; break;
            }
        }
        ++trials;
        switch (r.classification) {
        case Classification::Agreed: ++agreed; break;
        case Classification::Diverged: ++diverged; break;
        case Classification::Undecided: ++undecided; break;
        }
    }

    const CheckpointStats& at(std::uint64_t k) const
    {
        for (const auto& r : rows)
            if (r.k == k)
                return r;
        throw Error(ErrorCode::BadParameter, "no checkpoint at slot " + std::to_string(k));
    }

    void write_csv(std::ostream& out) const
    {
        out << "k,meanL,varL,ciL,meanSpread,varSpread,ciSpread,nAgreed,nDiverged,nUndecided\n";
        out << std::setprecision(17);
        for (const auto& r : rows)
            out << r.k << ',' << r.L.mean() << ',' << r.L.variance() << ',' << r.L.ci95() << ','
                << r.spread.mean() << ',' << r.spread.variance() << ',' << r.spread.ci95() << ',' << r.agreed
                << ',' << r.diverged << ',' << r.undecided << '\n';
    }

    /// wall_seconds is left out so repeated runs serialize identically.
    nlohmann::json to_json() const
    {
        auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
        nlohmann::json j;
        j["trials"] = trials;
        j["seed"] = seed;
        j["config_hash"] = hex64(config_hash);
        j["counts"] = {{"Agreed", agreed}, {"Diverged", diverged}, {"Undecided", undecided}};
        j["checkpoints"] = nlohmann::json::array();
        for (const auto& r : rows) {
            j["checkpoints"].push_back({{"k", r.k},
                                        {"meanL", num(r.L.mean())},
                                        {"varL", num(r.L.variance())},
                                        {"ciL", num(r.L.ci95())},
                                        {"stderrL", num(r.L.stderr_mean())},
                                        {"kurtosisL", num(r.L.kurtosis())},
                                        {"heavyTail", r.heavy_tail()},
                                        {"meanSpread", num(r.spread.mean())},
                                        {"varSpread", num(r.spread.variance())},
                                        {"ciSpread", num(r.spread.ci95())},
                                        {"nAgreed", r.agreed},
                                        {"nDiverged", r.diverged},
                                        {"nUndecided", r.undecided}});
        }
        return j;
    }
};

/// Worker count: hardware concurrency, capped by GOSSIP_THREADS when set.
inline unsigned worker_count()
{
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("GOSSIP_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap >= 1)
            n = std::min(n, static_cast<unsigned>(cap));
    }
    return n;
}

/// Trials computed per parallel block before being folded in index order.
inline constexpr std::uint64_t kTrialBlock = 4096;

/*!
 * Run every trial and fold in trial-index order, so the aggregate does not
 * depend on thread count or completion order.
 */
inline ExperimentAggregate run_experiment(const ExperimentConfig& cfg, unsigned threads = worker_count())
{
    const auto start = std::chrono::steady_clock::now();
    ExperimentAggregate agg;
    agg.seed = cfg.seed;
    agg.config_hash = config_hash(cfg.source);
    for (auto k : cfg.checkpoints) {
        CheckpointStats row;
        row.k = k;
        agg.rows.push_back(row);
    }

    std::vector<TrialResult> block;
    for (std::uint64_t first = 0; first < cfg.trials; first += kTrialBlock) {
        const std::uint64_t count = std::min(kTrialBlock, cfg.trials - first);
        block.assign(count, TrialResult{});
        std::atomic<std::uint64_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto work = [&] {
            for (;;) {
                const auto i = next.fetch_add(1);
                if (i >= count)
                    return;
                try {
                    block[i] = run_trial(cfg, first + i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                    next = count;
                    return;
                }
            }
        };
        const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, threads), count));
        {
            std::vector<std::jthread> pool;
            for (unsigned w = 1; w < workers; ++w)
                pool.emplace_back(work);
            work();
        }
        if (failure)
            std::rethrow_exception(failure);
        for (const auto& r : block)
            agg.fold(r);
    }
    agg.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return agg;
}

//---------------------------------------------------------------------------//

struct SweepPoint {
    double value = 0.0;
    ExperimentAggregate aggregate;
    TheoryReport theory;
};

/// One experiment and one theory report per axis value.
inline std::vector<SweepPoint> sweep(const nlohmann::json& config_template, const std::string& axis,
                                     std::span<const double> values,
                                     const std::filesystem::path& base_dir = ".",
                                     unsigned threads = worker_count())
{
    std::vector<SweepPoint> out;
    for (double v : values) {
        auto j = config_template;
        j.erase("sweep");
        set_axis(j, axis, v);
        const auto cfg = parse_config(j, base_dir);
        out.push_back({v, run_experiment(cfg, threads), theory_report(cfg.model, cfg.theory)});
    }
    return out;
}

}  // namespace gossip
