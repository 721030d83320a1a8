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

// Leading-order algebra used to decide divergence of series and products
// built from closed-form schedules without summing them.

#include <algorithm>
#include <cmath>
#include <optional>

#include "gossip/schedule.hpp"

namespace gossip {

/*!
 * Leading term coef * rate^k * k^(-decay) of a nonnegative sequence for large k.
 * coef == 0 encodes a sequence that is eventually identically zero.
 */
struct Leading {
    double coef = 0.0;
    double rate = 1.0;
    double decay = 0.0;

    static Leading zero() { return {}; }
    static Leading constant(double v) { return {v, 1.0, 0.0}; }
    static Leading power(double c, double p) { return {c, 1.0, p}; }
    static Leading geometric(double c, double r) { return {c, r, 0.0}; }

    bool is_zero() const { return coef == 0.0; }
    bool is_constant() const { return rate == 1.0 && decay == 0.0; }

    bool tends_to_zero() const { return is_zero() || rate < 1.0 || (rate == 1.0 && decay > 0.0); }
    bool bounded() const { return is_zero() || rate < 1.0 || (rate == 1.0 && decay >= 0.0); }

    /// Divergence of sum_k of the sequence.
    bool series_diverges() const
    {
        if (is_zero())
            return false;
        if (rate != 1.0)
            return rate > 1.0;
        return decay <= 1.0;
    }

    Leading scaled(double f) const
    {
        if (f == 0.0)
            return zero();
        return {coef * f, rate, decay};
    }

    Leading raised(double e) const
    {
        if (is_zero())
            return zero();
        return {std::pow(coef, e), std::pow(rate, e), decay * e};
    }

    friend Leading operator*(const Leading& a, const Leading& b)
    {
        if (a.is_zero() || b.is_zero())
            return zero();
        return {a.coef * b.coef, a.rate * b.rate, a.decay + b.decay};
    }
};

/// -1, 0, +1 as the order of growth of a is below, equal to, above that of b.
inline int compare_order(const Leading& a, const Leading& b)
{
    if (a.is_zero() || b.is_zero())
        return a.is_zero() == b.is_zero() ? 0 : (a.is_zero() ? -1 : 1);
    if (a.rate != b.rate)
        return a.rate < b.rate ? -1 : 1;
    if (a.decay != b.decay)
        return a.decay > b.decay ? -1 : 1;
    return 0;
}

/// Leading behaviour of a - b.
struct SignedLeading {
    int sign = 0;            ///< eventual sign of a - b
    Leading magnitude;       ///< leading term of |a - b|
    bool cancelled = false;  ///< equal leading terms; next order unknown
};

inline SignedLeading difference(const Leading& a, const Leading& b)
{
    const int order = compare_order(a, b);
    if (order > 0)
        return {+1, a, false};
    if (order < 0)
        return {-1, b, false};
    if (a.is_zero())
        return {0, Leading::zero(), false};
    const double diff = a.coef - b.coef;
    const double tol = 1e-12 * std::max({1.0, std::abs(a.coef), std::abs(b.coef)});
    if (std::abs(diff) <= tol)
        return {0, Leading::zero(), true};
    return {diff > 0 ? +1 : -1, Leading{std::abs(diff), a.rate, a.decay}, false};
}

//---------------------------------------------------------------------------//
/*!
 * Large-k behaviour of a closed-form schedule after clipping.
 *
 * ToZero / ToOne carry the leading term of the distance to 0 / 1; Unbounded
 * carries the leading term of the value itself. The lower clip floor is a
 * numerical guard and is ignored for decaying schedules (floor_ignored).
 */
struct Tail {
    enum class Kind { Limit, ToZero, ToOne, Unbounded };
    Kind kind = Kind::Limit;
    double limit = 0.0;
    Leading deviation;
    bool floor_ignored = false;

    /// Value the sequence tends to (infinity when unbounded).
    double limit_value() const
    {
        switch (kind) {
        case Kind::Limit: return limit;
        case Kind::ToZero: return 0.0;
        case Kind::ToOne: return 1.0;
        case Kind::Unbounded: return HUGE_VAL;
        }
        return limit;
    }
};

inline std::optional<Tail> tail_of(const Schedule& s)
{
    using K = Tail::Kind;
    auto limit = [&](double v) { return Tail{K::Limit, std::clamp(v, s.lo, s.hi), {}, false}; };
    switch (s.kind) {
    case ScheduleKind::Constant:
        return limit(s.value);
    case ScheduleKind::Explicit:
        return std::nullopt;
    case ScheduleKind::Power:
    case ScheduleKind::Geometric:
        break;
    }
    const Leading base = s.kind == ScheduleKind::Power ? Leading::power(s.value, s.shape)
                                                       : Leading::geometric(s.value, s.shape);
    if (base.is_constant())
        return limit(s.complement ? 1.0 - s.value : s.value);
    if (base.tends_to_zero()) {
        if (!s.complement)
            return Tail{K::ToZero, 0.0, base, true};
        if (s.hi < 1.0)
            return limit(s.hi);
        return Tail{K::ToOne, 1.0, base, false};
    }
    // Growing base.
    if (s.complement)
        return limit(s.lo);
    if (std::isfinite(s.hi))
        return limit(s.hi);
    return Tail{K::Unbounded, HUGE_VAL, base, false};
}

/// Leading term of T(1 - T) for an attraction tail.
inline Leading attraction_term(const Tail& t)
{
    switch (t.kind) {
    case Tail::Kind::Limit: return Leading::constant(t.limit * (1.0 - t.limit));
    case Tail::Kind::ToZero:
    case Tail::Kind::ToOne: return t.deviation;
    case Tail::Kind::Unbounded: break;
    }
    return Leading::zero();
}

/// Leading term of S(1 + S) for a repulsion tail.
inline Leading repulsion_term(const Tail& t)
{
    switch (t.kind) {
    case Tail::Kind::Limit: return Leading::constant(t.limit * (1.0 + t.limit));
    case Tail::Kind::ToZero: return t.deviation;
    case Tail::Kind::ToOne: return Leading::constant(2.0);
    case Tail::Kind::Unbounded: return t.deviation.raised(2.0);
    }
    return Leading::zero();
}

/// Leading term of the value itself.
inline Leading value_term(const Tail& t)
{
    switch (t.kind) {
    case Tail::Kind::Limit: return Leading::constant(t.limit);
    case Tail::Kind::ToZero: return t.deviation;
    case Tail::Kind::ToOne: return Leading::constant(1.0);
    case Tail::Kind::Unbounded: return t.deviation;
    }
    return Leading::zero();
}

/// Leading term of 1 - value, for sequences bounded by one.
inline Leading complement_term(const Tail& t)
{
    switch (t.kind) {
    case Tail::Kind::Limit: return t.limit >= 1.0 ? Leading::zero() : Leading::constant(1.0 - t.limit);
    case Tail::Kind::ToZero: return Leading::constant(1.0);
    case Tail::Kind::ToOne: return t.deviation;
    case Tail::Kind::Unbounded: break;
    }
    return Leading::zero();
}

}  // namespace gossip
