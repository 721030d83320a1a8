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

// Brute-force one-slot expectations, used to cross-check the spectral formula.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gossip/dynamics.hpp"
#include "gossip/metrics.hpp"
#include "gossip/theory.hpp"

namespace gossip {

/// Largest n the enumeration oracle accepts.
inline constexpr std::size_t kOracleMaxNodes = 4;

/*!
 * E[L(k+1) | x(k) = x] by summing over every ordered pair (prob a_ij / n), every
 * event outcome and, in asymmetric mode, every choice of active endpoint.
 */
inline double enumerated_next_dispersion(const Model& model, double t, double s, std::span<const double> x,
                                         double xAve)
{
    const std::size_t n = model.size();
    const auto& p = model.probs;
    const std::pair<Event, double> events[] = {
        {Event::Attraction, p.alpha}, {Event::Neglect, p.beta}, {Event::Repulsion, p.gamma}};

    auto dispersion_after = [&](std::size_t i, std::size_t j, Event ei, Event ej) {
        NetworkState st{std::vector<double>(x.begin(), x.end()), 0};
        advance(st, StepOutcome{i, j, ei, ej, t, s});
        double l = 0.0;
        for (double v : st.x)
            l += (v - xAve) * (v - xAve);
        return l;
    };

    double expected = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double pair = model.a(i, j) / static_cast<double>(n);
            if (pair == 0.0)
                continue;
            for (const auto& [e, pe] : events) {
                if (pe == 0.0)
                    continue;
                if (model.mode.symmetric) {
                    expected += pair * pe * dispersion_after(i, j, e, e);
                    continue;
                }
                double w_init = 0.5;
                switch (model.mode.rule) {
                case ActiveRule::Initiator: w_init = 1.0; break;
                case ActiveRule::Responder: w_init = 0.0; break;
                case ActiveRule::Uniform: w_init = 0.5; break;
                }
                if (w_init > 0.0)
                    expected += pair * pe * w_init * dispersion_after(i, j, e, Event::Neglect);
                if (w_init < 1.0)
                    expected += pair * pe * (1.0 - w_init) * dispersion_after(i, j, Event::Neglect, e);
            }
        }
    }
    return expected;
}

/// (x - xAve)^T E[Psi^2] (x - xAve) for the symmetric coupling.
inline double spectral_next_dispersion(const Model& model, double t, double s, std::span<const double> x,
                                       double xAve)
{
    const auto m = expected_second_moment_matrix(model.a, model.probs, t, s);
    Eigen::VectorXd c(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i)
        c[static_cast<Eigen::Index>(i)] = x[i] - xAve;
    return c.dot(m * c);
}

struct OracleComparison {
    std::size_t states = 0;
    double max_abs_discrepancy = 0.0;
    double max_rel_discrepancy = 0.0;
};

/// Compare both sides on `states` random states drawn uniformly from [-1, 1]^n.
inline OracleComparison compare_one_slot(const Model& model, double t, double s, std::size_t states,
                                         Xoshiro256& rng)
{
    if (model.size() > kOracleMaxNodes)
        throw Error(ErrorCode::BadParameter, "enumeration oracle supports n <= 4");
    if (!model.mode.symmetric)
        throw Error(ErrorCode::BadParameter, "spectral one-slot formula requires symmetric mode");
    OracleComparison out;
    out.states = states;
    std::vector<double> x(model.size());
    for (std::size_t r = 0; r < states; ++r) {
        for (double& v : x)
            v = 2.0 * rng.uniform01() - 1.0;
        // Alternate between the current average and an arbitrary reference point.
        const double xAve = r % 2 == 0 ? average(x) : 2.0 * rng.uniform01() - 1.0;
        const double lhs = enumerated_next_dispersion(model, t, s, x, xAve);
        const double rhs = spectral_next_dispersion(model, t, s, x, xAve);
        const double d = std::abs(lhs - rhs);
        out.max_abs_discrepancy = std::max(out.max_abs_discrepancy, d);
        out.max_rel_discrepancy = std::max(out.max_rel_discrepancy, d / std::max(1.0, std::abs(lhs)));
    }
    return out;
}

}  // namespace gossip
