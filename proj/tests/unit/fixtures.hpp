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

// Shared matrices, pinned reference values and model builders for the tests.

#include <cmath>
#include <vector>

#include "gossip/dynamics.hpp"
#include "gossip/graph.hpp"
#include "gossip/schedule.hpp"

namespace gossip::testing {

/// Four-node reference network used throughout the examples.
inline std::vector<std::vector<double>> reference_rows()
{
    return {{0.0, 0.5, 0.0, 0.5},
            {0.5, 0.0, 0.25, 0.25},
            {1.0 / 3.0, 0.0, 0.0, 2.0 / 3.0},
            {0.0, 1.0 / 3.0, 2.0 / 3.0, 0.0}};
}

inline SelectionMatrix reference_matrix() { return validate(reference_rows()); }

inline std::vector<std::vector<double>> complete_rows(std::size_t n)
{
    std::vector<std::vector<double>> rows(n, std::vector<double>(n, 1.0 / static_cast<double>(n - 1)));
    for (std::size_t i = 0; i < n; ++i)
        rows[i][i] = 0.0;
    return rows;
}

// Laplacian eigenvalues of the reference network from numpy.linalg.eigvalsh,
// cross-checked with scipy.linalg.eigh.
inline constexpr double kRefLambda2 = 1.6006585939468274;
inline constexpr double kRefLambdaN = 3.574871512231013;
inline constexpr double kRefAStar = 0.25;

// Repulsion weight making T(1-T) = S(1+S) at T = 1/4: (sqrt(7) - 2) / 4.
inline const double kCriticalS = (std::sqrt(7.0) - 2.0) / 4.0;
inline const double kLowS = kCriticalS - 0.05;
inline const double kHighS = kCriticalS + 0.05;

inline constexpr double kThird = 1.0 / 3.0;

inline Model reference_model(double s, UpdateMode mode = UpdateMode::make_symmetric())
{
    return Model{reference_matrix(), mode, EventProbabilities::make(kThird, kThird, kThird),
                 attraction_clip(Schedule::constant(0.25)), repulsion_clip(Schedule::constant(s))};
}

inline Model make_model(SelectionMatrix a, UpdateMode mode, EventProbabilities p, Schedule t, Schedule s)
{
    return Model{std::move(a), mode, p, attraction_clip(std::move(t)), repulsion_clip(std::move(s))};
}

}  // namespace gossip::testing
