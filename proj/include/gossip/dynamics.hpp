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
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gossip/error.hpp"
#include "gossip/graph.hpp"
#include "gossip/rng.hpp"
#include "gossip/schedule.hpp"

namespace gossip {

enum class Event : std::uint8_t { Attraction, Neglect, Repulsion };

inline constexpr const char* to_string(Event e)
{
    switch (e) {
    case Event::Attraction: return "Attraction";
    case Event::Neglect: return "Neglect";
    case Event::Repulsion: return "Repulsion";
    }
    return "?";
}

/// Which endpoint may act in asymmetric mode.
enum class ActiveRule { Initiator, Responder, Uniform };

struct UpdateMode {
    bool symmetric = true;
    ActiveRule rule = ActiveRule::Uniform;

    static constexpr UpdateMode make_symmetric() { return {true, ActiveRule::Uniform}; }
    static constexpr UpdateMode make_asymmetric(ActiveRule r = ActiveRule::Uniform) { return {false, r}; }
    friend bool operator==(const UpdateMode&, const UpdateMode&) = default;
};

inline std::string to_string(ActiveRule r)
{
    switch (r) {
    case ActiveRule::Initiator: return "initiator";
    case ActiveRule::Responder: return "responder";
    case ActiveRule::Uniform: return "uniform";
    }
    return "?";
}

inline ActiveRule active_rule_from_string(const std::string& s)
{
    for (auto r : {ActiveRule::Initiator, ActiveRule::Responder, ActiveRule::Uniform})
        if (to_string(r) == s)
            return r;
    throw Error(ErrorCode::BadParameter, "unknown active rule '" + s + "'");
}

struct NetworkState {
    std::vector<double> x;
    std::uint64_t k = 0;
    friend bool operator==(const NetworkState&, const NetworkState&) = default;
};

/// One meeting slot: initiator i meets partner j (zero-based).
struct StepOutcome {
    std::size_t i = 0;
    std::size_t j = 1;
    Event event_i = Event::Neglect;
    Event event_j = Event::Neglect;
    double t = 0.5;  ///< T_k applied this slot
    double s = 0.0;  ///< S_k applied this slot
};

/// States with any |x_i| above this end the trial as Diverged.
inline constexpr double kOverflowGuard = 1e150;

//---------------------------------------------------------------------------//
/*!
 * Cumulative row tables for drawing ordered pairs with probability a_ij / n.
 */
class PairSampler {
  public:
    explicit PairSampler(const SelectionMatrix& a) : n_(a.size()), cumulative_(n_ * n_), last_(n_)
    {
        for (std::size_t i = 0; i < n_; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n_; ++j) {
                acc += a(i, j);
                cumulative_[i * n_ + j] = acc;
                if (a(i, j) > 0.0)
                    last_[i] = j;
            }
        }
    }

    std::size_t size() const { return n_; }

    std::pair<std::size_t, std::size_t> operator()(Xoshiro256& rng) const
    {
        const std::size_t i = static_cast<std::size_t>(rng.below(n_));
        const double u = rng.uniform01();
        const auto row = std::span<const double>(cumulative_).subspan(i * n_, n_);
        const auto it = std::upper_bound(row.begin(), row.end(), u);
        // u can land past the last cumulative value when the row sums to 1 - eps.
        const std::size_t j = it == row.end() ? last_[i] : static_cast<std::size_t>(it - row.begin());
        return {i, j};
    }

  private:
    std::size_t n_;
    std::vector<double> cumulative_;
    std::vector<std::size_t> last_;
};

inline std::pair<std::size_t, std::size_t> sample_pair(const PairSampler& sampler, Xoshiro256& rng)
{
    return sampler(rng);
}

inline Event draw_event(const EventProbabilities& p, Xoshiro256& rng)
{
    const double u = rng.uniform01();
    if (u < p.alpha)
        return Event::Attraction;
    if (u < p.alpha + p.beta)
        return Event::Neglect;
    return p.gamma > 0.0 ? Event::Repulsion : Event::Neglect;
}

/// Events for (initiator, partner).
inline std::pair<Event, Event> sample_events(const UpdateMode& mode, const EventProbabilities& p,
                                             Xoshiro256& rng)
{
    if (mode.symmetric) {
        const Event e = draw_event(p, rng);
        return {e, e};
    }
    bool initiator_active = true;
    switch (mode.rule) {
    case ActiveRule::Initiator: initiator_active = true; break;
    case ActiveRule::Responder: initiator_active = false; break;
    case ActiveRule::Uniform: initiator_active = rng.uniform01() < 0.5; break;
    }
    const Event e = draw_event(p, rng);
    return initiator_active ? std::pair{e, Event::Neglect} : std::pair{Event::Neglect, e};
}

/// In-place update using pre-step values of both endpoints; k advances by one.
inline void advance(NetworkState& state, const StepOutcome& out)
{
    const double xi = state.x[out.i];
    const double xj = state.x[out.j];
    const double gap = xj - xi;
    auto moved = [&](Event e, double self, double toward) {
        switch (e) {
        case Event::Attraction: return self + out.t * toward;
        case Event::Repulsion: return self - out.s * toward;
        case Event::Neglect: break;
        }
        return self;
    };
    const double ni = moved(out.event_i, xi, gap);
    const double nj = moved(out.event_j, xj, -gap);
    state.x[out.i] = ni;
    state.x[out.j] = nj;
    ++state.k;
    if (!(std::abs(ni) <= kOverflowGuard) || !(std::abs(nj) <= kOverflowGuard))
        throw Error(ErrorCode::NonFiniteState, "state left the finite range at slot " + std::to_string(state.k));
}

inline NetworkState apply_step(NetworkState state, const StepOutcome& out)
{
    advance(state, out);
    return state;
}

//---------------------------------------------------------------------------//
/*!
 * Everything needed to drive one trajectory: the selection matrix, coupling,
 * event law and weight schedules.
 */
struct Model {
    SelectionMatrix a;
    UpdateMode mode;
    EventProbabilities probs;
    Schedule t_schedule;
    Schedule s_schedule;

    std::size_t size() const { return a.size(); }
};

/// Single-threaded stepper over one random stream.
class Simulator {
  public:
    Simulator(const Model& model, NetworkState initial, Xoshiro256 rng)
        : model_(&model), sampler_(model.a), state_(std::move(initial)), rng_(rng)
    {
        if (state_.x.size() != model.size())
            throw Error(ErrorCode::BadConfig, "initial state has " + std::to_string(state_.x.size())
                                                  + " entries, graph has " + std::to_string(model.size()));
        for (double v : state_.x)
            if (!std::isfinite(v))
                throw Error(ErrorCode::BadConfig, "initial state must be finite");
    }

    const NetworkState& state() const { return state_; }

    /// Draw the next slot's outcome without applying it.
    StepOutcome draw()
    {
        StepOutcome out;
        std::tie(out.i, out.j) = sampler_(rng_);
        std::tie(out.event_i, out.event_j) = sample_events(model_->mode, model_->probs, rng_);
        out.t = model_->t_schedule(state_.k);
        out.s = model_->s_schedule(state_.k);
        return out;
    }

    StepOutcome step()
    {
        const StepOutcome out = draw();
        advance(state_, out);
        return out;
    }

  private:
    const Model* model_;
    PairSampler sampler_;
    NetworkState state_;
    Xoshiro256 rng_;
};

struct Trajectory {
    std::vector<NetworkState> snapshots;
    std::optional<std::uint64_t> diverged_at;  ///< slot at which the overflow guard fired

    bool diverged() const { return diverged_at.has_value(); }
};

/*!
 * Run `steps` slots from x0 at slot k0 and keep snapshots at the requested
 * checkpoints (absolute slot indices). The initial and final slots are always
 * included. Overflow stops the run and is reported through diverged_at.
 */
inline Trajectory run_trajectory(const Model& model, std::vector<double> x0, std::uint64_t k0,
                                 std::uint64_t steps, std::span<const std::uint64_t> checkpoints,
                                 Xoshiro256 rng)
{
    std::vector<std::uint64_t> marks(checkpoints.begin(), checkpoints.end());
    marks.push_back(k0);
    marks.push_back(k0 + steps);
    std::sort(marks.begin(), marks.end());
    marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

    Trajectory out;
    Simulator sim(model, NetworkState{std::move(x0), k0}, rng);
    auto next = marks.begin();
    while (next != marks.end() && *next < k0)
        ++next;
    try {
        for (;;) {
            if (next != marks.end() && *next == sim.state().k) {
                out.snapshots.push_back(sim.state());
                ++next;
            }
            if (sim.state().k >= k0 + steps)
                break;
            sim.step();
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NonFiniteState)
            throw;
        out.diverged_at = sim.state().k;
    }
    return out;
}

}  // namespace gossip
