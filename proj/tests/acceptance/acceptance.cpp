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


// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>

#include "gossip/montecarlo.hpp"
#include "gossip/oracle.hpp"

namespace {

using namespace gossip;

constexpr std::uint64_t kSeed = 20260301;
const double kCriticalS = (std::sqrt(7.0) - 2.0) / 4.0;

struct Outcome {
    bool pass = true;
    std::ostringstream note;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            if (pass)
                note << "first failure: ";
            if (pass)
                note << what << "; ";
            pass = false;
        }
    }
};

nlohmann::json reference_config(double s)
{
    return {{"graph",
             {{"matrix",
               {{0.0, 0.5, 0.0, 0.5},
                {0.5, 0.0, 0.25, 0.25},
                {1.0 / 3.0, 0.0, 0.0, 2.0 / 3.0},
                {0.0, 1.0 / 3.0, 2.0 / 3.0, 0.0}}}}},
            {"mode", "symmetric"},
            {"probs", {{"alpha", 1.0 / 3.0}, {"beta", 1.0 / 3.0}, {"gamma", 1.0 / 3.0}}},
            {"schedules", {{"T", {{"kind", "constant"}, {"value", 0.25}}}, {"S", {{"kind", "constant"}, {"value", s}}}}},
            {"initial", {{"kind", "ramp"}}},
            {"k0", 0},
            {"trials", 100000},
            {"steps", 200},
            {"checkpoints", {{"every", 10}}},
            {"seed", kSeed}};
}

/// Weakly connected random selection matrix: a ring (directed when `one_way`) plus random extra arcs.
SelectionMatrix random_matrix(std::size_t n, bool one_way, Xoshiro256& rng)
{
    std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        w[i][(i + 1) % n] = 0.1 + rng.uniform01();
        if (!one_way)
            w[(i + 1) % n][i] = 0.1 + rng.uniform01();
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && w[i][j] == 0.0 && rng.uniform01() < 0.3) {
                w[i][j] = 0.1 + rng.uniform01();
                if (!one_way)
                    w[j][i] = 0.1 + rng.uniform01();
            }
    for (auto& row : w) {
        double sum = 0.0;
        for (double v : row)
            sum += v;
        for (double& v : row)
            v /= sum;
    }
    return validate(w);
}

EventProbabilities random_probs(Xoshiro256& rng, bool repulsion)
{
    const double a = 0.05 + rng.uniform01();
    const double b = rng.uniform01();
    const double g = repulsion ? 0.05 + rng.uniform01() : 0.0;
    const double sum = a + b + g;
    return EventProbabilities::make(a / sum, b / sum, g / sum);
}

UpdateMode random_mode(Xoshiro256& rng)
{
    if (rng.uniform01() < 0.5)
        return UpdateMode::make_symmetric();
    const ActiveRule rules[] = {ActiveRule::Uniform, ActiveRule::Initiator, ActiveRule::Responder};
    return UpdateMode::make_asymmetric(rules[rng.below(3)]);
}

Model make_model(SelectionMatrix a, UpdateMode mode, EventProbabilities p, Schedule t, Schedule s)
{
    return Model{std::move(a), mode, p, attraction_clip(std::move(t)), repulsion_clip(std::move(s))};
}

std::vector<double> random_state(std::size_t n, Xoshiro256& rng)
{
    std::vector<double> x(n);
    for (double& v : x)
        v = 2.0 * rng.uniform01() - 1.0;
    return x;
}

/*!
 * Exact first and second moments of L(k) for a time-invariant symmetric model,
 * propagated through E[Psi (x) Psi] and E[Psi (x) Psi (x) Psi (x) Psi].
 */
std::pair<double, double> exact_moments(const Model& model, double t, double s, std::vector<double> x,
                                        std::uint64_t k)
{
    const auto n = static_cast<Eigen::Index>(model.size());
    const auto& p = model.probs;
    Eigen::MatrixXd k2 = Eigen::MatrixXd::Zero(n * n, n * n);
    Eigen::MatrixXd k4 = Eigen::MatrixXd::Zero(n * n * n * n, n * n * n * n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const double pair = model.a(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) / n;
            if (pair == 0.0)
                continue;
            for (const auto& [w, pe] : {std::pair{t, p.alpha}, std::pair{-s, p.gamma}, std::pair{0.0, p.beta}}) {
                Eigen::MatrixXd psi = Eigen::MatrixXd::Identity(n, n);
                psi(i, i) -= w;
                psi(i, j) += w;
                psi(j, j) -= w;
                psi(j, i) += w;
                const Eigen::MatrixXd two = Eigen::kroneckerProduct(psi, psi);
                k2 += pair * pe * two;
                k4 += pair * pe * Eigen::MatrixXd(Eigen::kroneckerProduct(two, two));
            }
        }
    const double mean = average(x);
    Eigen::VectorXd c(n);
    for (Eigen::Index i = 0; i < n; ++i)
        c[i] = x[static_cast<std::size_t>(i)] - mean;
    Eigen::VectorXd y2 = Eigen::kroneckerProduct(c, c);
    Eigen::VectorXd y4 = Eigen::kroneckerProduct(y2, y2);
    for (std::uint64_t m = 0; m < k; ++m) {
        y2 = k2 * y2;
        y4 = k4 * y4;
    }
    const Eigen::VectorXd id = Eigen::Map<const Eigen::VectorXd>(Eigen::MatrixXd::Identity(n, n).eval().data(), n * n);
    const Eigen::VectorXd id2 = Eigen::kroneckerProduct(id, id);
    const double m1 = id.dot(y2);
    return {m1, std::sqrt(std::max(0.0, id2.dot(y4) - m1 * m1))};
}

//---------------------------------------------------------------------------//

Outcome reproduction()
{
    Outcome o;
    o.note << "[finite-horizon statistical proxy] ";
    const double svals[] = {kCriticalS - 0.05, kCriticalS, kCriticalS + 0.05};
    const double d0_ref[] = {-0.0212, 0.0, 0.0229};
    for (int c = 0; c < 3; ++c) {
        const auto cfg = parse_config(reference_config(svals[c]));
        const auto report = theory_report(cfg.model, cfg.theory);
        o.require(report.d0 && std::abs(*report.d0 - d0_ref[c]) <= 5e-4, "D0 mismatch");
        const auto agg = run_experiment(cfg);
        const double l0 = agg.at(0).L.mean();
        o.require(l0 == 5.0, "L(0) != 5");
        const auto& end = agg.at(200);
        const double se_end = end.L.stderr_mean();
        const double rate = 1.0 - 2.0 / 4.0 * (c == 2 ? report.at_start.iHatK : report.at_start.iK);
        for (const auto& row : agg.rows) {
            const double se = row.L.stderr_mean();
            const double env = std::pow(rate, static_cast<double>(row.k)) * l0;
            if (c == 0)
                o.require(row.L.mean() <= env + 4 * se, "upper envelope violated at k=" + std::to_string(row.k));
            else if (c == 1)
                o.require(std::abs(row.L.mean() - 5.0) <= 4 * se, "critical mean drifted at k=" + std::to_string(row.k));
            else
                o.require(row.L.mean() >= env - 4 * se, "lower envelope violated at k=" + std::to_string(row.k));
        }
        if (c == 0)
            o.require(end.L.mean() + 4 * se_end < 0.5 * l0, "mean L(200) not below L(0)/2");
        if (c == 2)
            o.require(end.L.mean() - 4 * se_end > 2.0 * l0, "mean L(200) not above 2 L(0)");
        const auto [exact_mean, exact_sd] = exact_moments(cfg.model, 0.25, svals[c], {1, 2, 3, 4}, 200);
        o.note << "S=" << svals[c] << " D0=" << report.d0.value_or(NAN) << " meanL(200)=" << end.L.mean()
               << "+-" << se_end << " (exact " << exact_mean << ", exact SE "
               << exact_sd / std::sqrt(static_cast<double>(agg.trials)) << ", kurtosis " << end.L.kurtosis()
               << "); ";
    }
    return o;
}

Outcome oracle()
{
    Outcome o;
    auto rng = make_stream(kSeed, 2);
    double worst = 0.0;
    for (std::size_t n : {3u, 4u}) {
        for (int r = 0; r < 20; ++r) {
            const double t = rng.uniform01();
            const double s = 2.0 * rng.uniform01();
            const double alpha = rng.uniform01();
            const double gamma = (1.0 - alpha) * rng.uniform01();
            const auto model = make_model(random_matrix(n, false, rng), UpdateMode::make_symmetric(),
                                          EventProbabilities::make(alpha, 1.0 - alpha - gamma, gamma),
                                          Schedule::constant(t), Schedule::constant(s));
            const auto cmp = compare_one_slot(model, t, s, 100, rng);
            worst = std::max(worst, cmp.max_abs_discrepancy);
        }
    }
    o.require(worst <= 1e-12, "discrepancy above 1e-12");
    o.note << "max |enumerated - spectral| = " << worst;
    return o;
}

Outcome impossibility_floor()
{
    Outcome o;
    double rho = 1.0;
    for (int k = 0;; ++k) {
        const double f = 1.0 - 2.0 * std::pow(4.0, -(k + 1.0));
        if (f == 1.0)
            break;
        rho *= f;
    }
    const auto model = make_model(validate({{0.0, 0.5, 0.0, 0.5},
                                            {0.5, 0.0, 0.25, 0.25},
                                            {1.0 / 3.0, 0.0, 0.0, 2.0 / 3.0},
                                            {0.0, 1.0 / 3.0, 2.0 / 3.0, 0.0}}),
                                   UpdateMode::make_symmetric(), EventProbabilities::make(1.0, 0.0, 0.0),
                                   Schedule::geometric(0.25, 0.25), Schedule::constant(0.0));
    double min_ratio = HUGE_VAL;
    for (std::uint64_t trial = 0; trial < 1000; ++trial) {
        Simulator sim(model, NetworkState{{1.0, 2.0, 3.0, 4.0}, 0}, make_stream(kSeed, trial));
        const double h0 = 3.0;
        for (int m = 0; m < 200; ++m) {
            sim.step();
            const double h = measure(sim.state(), 2.5).spread;
            min_ratio = std::min(min_ratio, h / h0);
            if (h < rho * h0)
                o.require(false, "spread fell below rho* H(0)");
        }
    }
    o.note << "rho*=" << std::setprecision(17) << rho << std::setprecision(6) << " min H(m)/H(0)=" << min_ratio;
    return o;
}

Outcome growth_cap()
{
    Outcome o;
    auto rng = make_stream(kSeed, 4);
    std::size_t slots = 0;
    for (int c = 0; c < 50; ++c) {
        const bool repulsion = c % 2 == 0;
        const std::size_t n = 3 + rng.below(6);
        const auto mode = random_mode(rng);
        const auto model = make_model(random_matrix(n, !mode.symmetric && rng.uniform01() < 0.5, rng), mode,
                                      random_probs(rng, repulsion), Schedule::constant(rng.uniform01()),
                                      Schedule::constant(repulsion ? rng.uniform01() : 0.0));
        Simulator sim(model, NetworkState{random_state(n, rng), 0}, make_stream(kSeed, 1000 + c));
        double prev = measure(sim.state(), 0.0).spread;
        try {
            for (int k = 0; k < 1000; ++k) {
                const auto out = sim.step();
                const double cur = measure(sim.state(), 0.0).spread;
                // Absolute slack scaled by magnitude once the spread exceeds 1.
                const double slack = std::max(1.0, prev);
                o.require(cur <= (1.0 + 2.0 * out.s) * prev + 1e-9 * slack, "spread cap violated");
                if (!repulsion)
                    o.require(cur <= prev + 1e-12 * slack, "repulsion-free spread increased");
                prev = cur;
                ++slots;
            }
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NonFiniteState)
                throw;
        }
    }
    o.note << slots << " slots checked";
    return o;
}

Outcome topology_independence()
{
    Outcome o;
    o.note << "[finite-horizon statistical proxy] ";
    const char* kinds[] = {"complete", "ring", "erdos_renyi", "watts_strogatz", "barabasi_albert"};
    std::optional<VerdictStatus> shared;
    for (const char* kind : kinds) {
        auto j = reference_config(0.1);
        j["graph"] = {{"generator", {{"kind", kind}, {"n", 12}, {"p", 0.4}, {"k", 4}, {"p_rewire", 0.2}, {"m", 2},
                                     {"seed", kSeed}}}};
        j["probs"] = {{"alpha", 0.5}, {"beta", 0.25}, {"gamma", 0.25}};
        j["schedules"]["T"]["value"] = 0.5;
        j["trials"] = 1000;
        j["steps"] = 50000;
        j["checkpoints"] = nlohmann::json::array({0, 50000});
        const auto cfg = parse_config(j);
        const auto report = theory_report(cfg.model, cfg.theory);
        const auto status = report.verdict(ConditionId::CriticalMeasure).status;
        if (!shared)
            shared = status;
        o.require(status == *shared, std::string("classification differs on ") + kind);
        o.require(report.d0 && *report.d0 < 0.0, "D0 not negative");
        const auto agg = run_experiment(cfg);
        o.require(agg.agreed >= 950, std::string("agreement below 95% on ") + kind);
        o.note << kind << ":" << to_string(status) << "," << agg.agreed << "/1000; ";
    }
    return o;
}

Outcome mean_conservation()
{
    Outcome o;
    auto rng = make_stream(kSeed, 6);
    double worst = 0.0;
    for (int c = 0; c < 50; ++c) {
        const bool repulsion = c % 2 == 0;
        const std::size_t n = 3 + rng.below(6);
        const auto model = make_model(random_matrix(n, false, rng), UpdateMode::make_symmetric(),
                                      random_probs(rng, repulsion), Schedule::constant(rng.uniform01()),
                                      Schedule::constant(repulsion ? 0.5 * rng.uniform01() : 0.0));
        const auto x0 = random_state(n, rng);
        const double mean0 = average(x0);
        Simulator sim(model, NetworkState{x0, 0}, make_stream(kSeed, 2000 + c));
        try {
            for (int k = 0; k < 1000; ++k) {
                sim.step();
                double scale = 1.0;
                for (double v : sim.state().x)
                    scale = std::max(scale, std::abs(v));
                const double drift = std::abs(average(sim.state().x) - mean0) / scale;
                worst = std::max(worst, drift);
            }
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NonFiniteState)
                throw;
        }
    }
    o.require(worst <= 1e-12, "node average drifted");
    o.note << "max drift (relative to max(1, |x|)) = " << worst;
    return o;
}

Schedule random_schedule(Xoshiro256& rng, double scale)
{
    switch (rng.below(4)) {
    case 0: return Schedule::constant(scale * rng.uniform01());
    case 1: return Schedule::power(scale * rng.uniform01(), 2.0 * rng.uniform01());
    case 2: return Schedule::geometric(scale * rng.uniform01(), 0.5 + 0.5 * rng.uniform01());
    default: return Schedule::power(scale * rng.uniform01(), 2.0 * rng.uniform01(), true);
    }
}

Outcome verdict_consistency()
{
    Outcome o;
    auto rng = make_stream(kSeed, 7);
    int agreements = 0;
    int divergences = 0;
    for (int c = 0; c < 200; ++c) {
        const std::size_t n = 3 + rng.below(5);
        const auto mode = random_mode(rng);
        const auto model = make_model(random_matrix(n, !mode.symmetric && rng.uniform01() < 0.3, rng), mode,
                                      random_probs(rng, rng.uniform01() < 0.8), random_schedule(rng, 1.0),
                                      random_schedule(rng, 3.0));
        TheoryReport report;
        try {
            report = theory_report(model);
        } catch (const Error& e) {
            o.require(false, std::string("report failed: ") + e.what());
            continue;
        }
        bool agree = false;
        bool diverge = false;
        for (const auto& cr : report.conditions) {
            agree |= cr.verdict.claims_agreement();
            diverge |= cr.verdict.claims_divergence();
        }
        agreements += agree;
        divergences += diverge;
        o.require(!(agree && diverge), "config " + std::to_string(c) + " claims both outcomes");
        if (report.has(ConditionId::SymmetricAgreement)
            && report.verdict(ConditionId::SymmetricAgreement).status == VerdictStatus::Guaranteed)
            o.require(report.verdict(ConditionId::AttractionSumNecessary).status != VerdictStatus::Impossible,
                      "sufficient agreement alongside necessary-condition failure");
    }
    o.note << agreements << " agreement and " << divergences << " divergence claims over 200 configs";
    return o;
}

Outcome asymmetric_agreement()
{
    Outcome o;
    o.note << "[finite-horizon statistical proxy] ";
    auto j = reference_config(0.1);
    j["mode"] = "asymmetric";
    j["active_rule"] = "uniform";
    j["probs"] = {{"alpha", 0.5}, {"beta", 0.5}, {"gamma", 0.0}};
    j["schedules"]["T"]["value"] = 0.5;
    j["trials"] = 1000;
    j["steps"] = 100000;
    j["checkpoints"] = nlohmann::json::array({0, 100000});
    const auto cfg = parse_config(j);
    const auto report = theory_report(cfg.model, cfg.theory);
    const auto status = report.verdict(ConditionId::AsymmetricAgreementMonotone).status;
    o.require(status == VerdictStatus::Guaranteed, "monotone asymmetric series verdict not Guaranteed");
    const auto agg = run_experiment(cfg);
    o.require(agg.agreed >= 990, "agreement below 99%");
    o.note << "verdict " << to_string(status) << ", " << agg.agreed << "/1000 Agreed";
    return o;
}

}  // namespace

int main()
{
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"1 reproduction of the three repulsion regimes", reproduction},
        {"2 one-slot oracle equivalence", oracle},
        {"3 impossibility lower bound", impossibility_floor},
        {"4 spread growth cap", growth_cap},
        {"5 topology independence of the critical measure", topology_independence},
        {"6 mean conservation", mean_conservation},
        {"7 verdict consistency", verdict_consistency},
        {"8 asymmetric agreement", asymmetric_agreement},
    };
    int failures = 0;
    for (const auto& [name, run] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.note << "exception: " << e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << name << " (" << std::fixed
                  << std::setprecision(1) << secs << " s): " << std::defaultfloat << std::setprecision(6)
                  << o.note.str() << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
