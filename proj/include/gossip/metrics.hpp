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
#include <cstdint>
#include <numeric>
#include <span>
#include <string>

#include "gossip/dynamics.hpp"

namespace gossip {

struct MeasureSample {
    std::uint64_t k = 0;
    double H = 0.0;       ///< max state
    double h = 0.0;       ///< min state
    double spread = 0.0;  ///< H - h
    double L = 0.0;       ///< sum of squared deviations from the initial average
};

inline double average(std::span<const double> x)
{
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

/// xAve must be the average at the initial slot, not the current one.
inline MeasureSample measure(const NetworkState& state, double xAve)
{
    MeasureSample m;
    m.k = state.k;
    const auto [lo, hi] = std::minmax_element(state.x.begin(), state.x.end());
    m.H = *hi;
    m.h = *lo;
    m.spread = m.H - m.h;
    for (double v : state.x)
        m.L += (v - xAve) * (v - xAve);
    return m;
}

enum class Classification { Agreed, Diverged, Undecided };

inline std::string to_string(Classification c)
{
    switch (c) {
    case Classification::Agreed: return "Agreed";
    case Classification::Diverged: return "Diverged";
    case Classification::Undecided: return "Undecided";
    }
    return "?";
}

/*!
 * Finite-horizon proxy for the asymptotic notions: Diverged if the spread ever
 * exceeded bigM (or the trial overflowed), else Agreed if the final spread is
 * below epsAgree, else Undecided.
 */
inline Classification classify(std::span<const MeasureSample> samples, double epsAgree, double bigM,
                               bool overflowed = false)
{
    if (overflowed)
        return Classification::Diverged;
    for (const auto& s : samples)
        if (s.spread > bigM)
            return Classification::Diverged;
    if (!samples.empty() && samples.back().spread < epsAgree)
        return Classification::Agreed;
    return Classification::Undecided;
}

}  // namespace gossip
