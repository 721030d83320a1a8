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
#include <limits>
#include <string>
#include <vector>

#include "gossip/error.hpp"

namespace gossip {

/// Attraction / neglect / repulsion probabilities for one endpoint.
struct EventProbabilities {
    double alpha = 1.0;
    double beta = 0.0;
    double gamma = 0.0;

    static EventProbabilities make(double alpha, double beta, double gamma)
    {
        EventProbabilities p{alpha, beta, gamma};
        p.check();
        return p;
    }

    void check() const
    {
        for (double v : {alpha, beta, gamma})
            if (!(v >= 0.0 && v <= 1.0))
                throw Error(ErrorCode::BadParameter, "event probabilities must lie in [0, 1]");
        if (std::abs(alpha + beta + gamma - 1.0) > 1e-12)
            throw Error(ErrorCode::BadParameter, "alpha + beta + gamma must equal 1");
    }
};

enum class ScheduleKind { Constant, Explicit, Power, Geometric };

inline constexpr double kScheduleFloor = 1e-12;

/*!
 * Weight sequence indexed by absolute slot k.
 *
 * - constant(v):           v
 * - explicit(list, tail):  list[k], then tail for k >= list.size()
 * - power(c, p):           c * (k + 1)^(-p)
 * - geometric(c, r):       c * r^k
 *
 * Power and geometric schedules may set `complement`, giving 1 - base(k).
 * Every value is clipped into [lo, hi].
 */
struct Schedule {
    ScheduleKind kind = ScheduleKind::Constant;
    double value = 0.5;   ///< constant value, or the coefficient c
    double shape = 0.0;   ///< exponent p (power) or ratio r (geometric)
    std::vector<double> list;
    double tail = 0.5;
    bool complement = false;
    double lo = kScheduleFloor;
    double hi = 1.0;

    static Schedule constant(double v)
    {
        Schedule s;
        s.value = v;
        return s;
    }
    static Schedule explicit_list(std::vector<double> values, double tail_value)
    {
        Schedule s;
        s.kind = ScheduleKind::Explicit;
        s.list = std::move(values);
        s.tail = tail_value;
        return s;
    }
    static Schedule power(double c, double p, bool complement = false)
    {
        Schedule s;
        s.kind = ScheduleKind::Power;
        s.value = c;
        s.shape = p;
        s.complement = complement;
        return s;
    }
    static Schedule geometric(double c, double r, bool complement = false)
    {
        Schedule s;
        s.kind = ScheduleKind::Geometric;
        s.value = c;
        s.shape = r;
        s.complement = complement;
        return s;
    }

    Schedule& clip(double lower, double upper)
    {
        lo = lower;
        hi = upper;
        return *this;
    }

    /// Value before clipping.
    double raw(std::uint64_t k) const
    {
        double base = 0.0;
        switch (kind) {
        case ScheduleKind::Constant:
            return value;
        case ScheduleKind::Explicit:
            return k < list.size() ? list[k] : tail;
        case ScheduleKind::Power:
            base = value * std::pow(static_cast<double>(k) + 1.0, -shape);
            break;
        case ScheduleKind::Geometric:
            base = value * std::pow(shape, static_cast<double>(k));
            break;
        }
        return complement ? 1.0 - base : base;
    }

    double operator()(std::uint64_t k) const { return std::clamp(raw(k), lo, hi); }

    bool clipped(std::uint64_t k) const
    {
        const double r = raw(k);
        return r < lo || r > hi;
    }

    bool is_constant() const { return kind == ScheduleKind::Constant; }
    bool is_closed_form() const { return kind != ScheduleKind::Explicit; }

    void check(const std::string& name) const
    {
        auto bad = [&](const std::string& what) { throw Error(ErrorCode::BadParameter, name + ": " + what); };
        if (!(lo > 0.0) || !(hi >= lo))
            bad("clip range must satisfy 0 < lo <= hi");
        switch (kind) {
        case ScheduleKind::Constant:
            if (!std::isfinite(value))
                bad("constant value must be finite");
            break;
        case ScheduleKind::Explicit:
            for (double v : list)
                if (!std::isfinite(v))
                    bad("explicit values must be finite");
            if (!std::isfinite(tail))
                bad("tail value must be finite");
            break;
        case ScheduleKind::Power:
            if (!(value > 0.0) || !std::isfinite(shape))
                bad("power schedule needs c > 0 and a finite exponent");
            break;
        case ScheduleKind::Geometric:
            if (!(value > 0.0) || !(shape > 0.0) || !std::isfinite(shape))
                bad("geometric schedule needs c > 0 and r > 0");
            break;
        }
    }

    /// True when the clipped sequence never decreases (resp. increases).
    bool nondecreasing() const { return monotone(+1); }
    bool nonincreasing() const { return monotone(-1); }

  private:
    bool monotone(int direction) const
    {
        // Clipping preserves monotonicity, so check the unclipped shape.
        auto ok = [direction](double prev, double next) {
            return direction > 0 ? next >= prev : next <= prev;
        };
        switch (kind) {
        case ScheduleKind::Constant:
            return true;
        case ScheduleKind::Explicit: {
            std::uint64_t end = list.size() + 1;
            for (std::uint64_t k = 1; k < end; ++k)
                if (!ok((*this)(k - 1), (*this)(k)))
                    return false;
            return true;
        }
        case ScheduleKind::Power:
        case ScheduleKind::Geometric: {
            // base is nonincreasing iff p >= 0 (power) or r <= 1 (geometric)
            const bool base_down = kind == ScheduleKind::Power ? shape >= 0.0 : shape <= 1.0;
            const bool base_up = kind == ScheduleKind::Power ? shape <= 0.0 : shape >= 1.0;
            const bool down = complement ? base_up : base_down;
            const bool up = complement ? base_down : base_up;
            return direction > 0 ? up : down;
        }
        }
        return false;
    }
};

/// Default legal range for the attraction weight T_k.
inline Schedule attraction_clip(Schedule s) { return s.clip(kScheduleFloor, 1.0); }
/// Default legal range for the repulsion weight S_k.
inline Schedule repulsion_clip(Schedule s)
{
    return s.clip(kScheduleFloor, std::numeric_limits<double>::infinity());
}

}  // namespace gossip
