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

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "gossip/asymptote.hpp"
#include "gossip/dynamics.hpp"
#include "gossip/graph.hpp"
#include "gossip/schedule.hpp"

namespace gossip {

/// |D0| at or below this is reported as exactly zero.
inline constexpr double kCriticalBand = 1e-12;

/// S(1+S)gamma - T(1-T)alpha for time-invariant weights.
inline double critical_measure(double tStar, double sStar, const EventProbabilities& p)
{
    const double d0 = sStar * (1.0 + sStar) * p.gamma - tStar * (1.0 - tStar) * p.alpha;
    return std::abs(d0) <= kCriticalBand ? 0.0 : d0;
}

/// T(1-T)alpha - S(1+S)gamma: positive when attraction dominates in mean square.
inline double mean_square_coefficient(double t, double s, const EventProbabilities& p)
{
    return t * (1.0 - t) * p.alpha - s * (1.0 + s) * p.gamma;
}

/*!
 * Exact E[Psi^2] for one symmetric slot:
 * I - 2 (T(1-T)alpha - S(1+S)gamma) / n * (D - (A + A^T)).
 */
inline Eigen::MatrixXd expected_second_moment_matrix(const SelectionMatrix& a, const EventProbabilities& p,
                                                     double t, double s)
{
    const auto n = static_cast<Eigen::Index>(a.size());
    const double c = mean_square_coefficient(t, s, p);
    return Eigen::MatrixXd::Identity(n, n) - (2.0 * c / static_cast<double>(n)) * laplacian_of(a);
}

struct ContractionCoefficients {
    double coefficient = 0.0;  ///< T(1-T)alpha - S(1+S)gamma
    double iK = 0.0;           ///< upper-bound exponent: E L(k+1) <= (1 - 2/n iK) L(k)
    double iHatK = 0.0;        ///< lower-bound exponent: E L(k+1) >= (1 - 2/n iHatK) L(k)
    double zK = 1.0;           ///< 1 - 2/n iHatK
};

/// Extreme eigenvalues of E[Psi^2] on the disagreement subspace, written as exponents.
inline ContractionCoefficients contraction(double t, double s, const EventProbabilities& p,
                                           const SpectralData& spectral)
{
    ContractionCoefficients out;
    out.coefficient = mean_square_coefficient(t, s, p);
    const bool attraction_wins = out.coefficient >= 0.0;
    out.iK = out.coefficient * (attraction_wins ? spectral.lambda2 : spectral.lambdaN);
    out.iHatK = out.coefficient * (attraction_wins ? spectral.lambdaN : spectral.lambda2);
    const auto n = static_cast<double>(spectral.laplacian.rows());
    out.zK = 1.0 - 2.0 / n * out.iHatK;
    return out;
}

//---------------------------------------------------------------------------//
// Conditions and verdicts
//---------------------------------------------------------------------------//

enum class ConditionId {
    AttractionSumNecessary,     // THM1_NEC
    RepulsionProductNecessary,  // THM2_NEC
    SymmetricAgreement,         // SYM_AGREE
    SymmetricThreshold,         // SYM_THRESHOLD
    AsymmetricAgreement,        // ASYM_AGREE
    AsymmetricAgreementMonotone,  // ASYM_AGREE_MONO
    SymmetricRepulsionAgreement,  // SYM_REP_AGREE
    SymmetricExpectedDivergence,  // SYM_REP_EXPECT_DIV
    SymmetricAlmostSureDivergence,  // SYM_REP_AS_DIV
    CriticalMeasure,            // BEER_CLASSIFY
    AsymmetricRepulsionAgreement,  // ASYM_REP_AGREE
    AsymmetricAlmostSureDivergence,  // ASYM_REP_AS_DIV
    AsymmetricConstant,         // ASYM_CONST
};

inline constexpr ConditionId kAllConditions[] = {
    ConditionId::AttractionSumNecessary,
    ConditionId::RepulsionProductNecessary,
    ConditionId::SymmetricAgreement,
    ConditionId::SymmetricThreshold,
    ConditionId::AsymmetricAgreement,
    ConditionId::AsymmetricAgreementMonotone,
    ConditionId::SymmetricRepulsionAgreement,
    ConditionId::SymmetricExpectedDivergence,
    ConditionId::SymmetricAlmostSureDivergence,
    ConditionId::CriticalMeasure,
    ConditionId::AsymmetricRepulsionAgreement,
    ConditionId::AsymmetricAlmostSureDivergence,
    ConditionId::AsymmetricConstant,
};

enum class ConditionRole { Necessary, Sufficient, Threshold, Classifier };

struct ConditionInfo {
    ConditionId id;
    const char* wire_id;
    const char* formula;
    ConditionRole role;
    bool symmetric;  ///< applies to symmetric (true) or asymmetric (false) mode
    bool both_modes;
};

inline const ConditionInfo& info(ConditionId id)
{
    static const ConditionInfo table[] = {
        {ConditionId::AttractionSumNecessary, "THM1_NEC",
         "agreement needs sum T_k = inf and sum (1 - T_k) = inf", ConditionRole::Necessary, true, true},
        {ConditionId::RepulsionProductNecessary, "THM2_NEC",
         "a.s. divergence needs prod (1 + 2 S_k) = inf", ConditionRole::Necessary, true, true},
        {ConditionId::SymmetricAgreement, "SYM_AGREE",
         "repulsion-free symmetric: sum T_k(1 - T_k) = inf => a.s. agreement", ConditionRole::Sufficient, true,
         false},
        {ConditionId::SymmetricThreshold, "SYM_THRESHOLD",
         "repulsion-free symmetric, monotone T_k: sum T_k(1 - T_k) = inf <=> a.s. agreement",
         ConditionRole::Threshold, true, false},
        {ConditionId::AsymmetricAgreement, "ASYM_AGREE",
         "repulsion-free asymmetric: sum_k prod_{block of n-1} T_s(1 - T_s) = inf => a.s. agreement",
         ConditionRole::Sufficient, false, false},
        {ConditionId::AsymmetricAgreementMonotone, "ASYM_AGREE_MONO",
         "repulsion-free asymmetric, monotone T_k: sum ((1 - T_k) T_k)^(n-1) = inf => a.s. agreement",
         ConditionRole::Sufficient, false, false},
        {ConditionId::SymmetricRepulsionAgreement, "SYM_REP_AGREE",
         "symmetric: prod (1 - 2/n I_k) = 0 => a.s. agreement", ConditionRole::Sufficient, true, false},
        {ConditionId::SymmetricExpectedDivergence, "SYM_REP_EXPECT_DIV",
         "symmetric: prod (1 - 2/n Ihat_k) = inf => E spread -> inf", ConditionRole::Sufficient, true, false},
        {ConditionId::SymmetricAlmostSureDivergence, "SYM_REP_AS_DIV",
         "symmetric: bounded S_k, T_k away from 1/2, sum J_tau(k) = O(m) => a.s. divergence",
         ConditionRole::Sufficient, true, false},
        {ConditionId::CriticalMeasure, "BEER_CLASSIFY",
         "symmetric time-invariant: sign of D0 = S(1+S)gamma - T(1-T)alpha", ConditionRole::Classifier, true,
         false},
        {ConditionId::AsymmetricRepulsionAgreement, "ASYM_REP_AGREE",
         "asymmetric: prod [1 - (alpha a*/n)^(n-1) That_k + (1 - (1-gamma)^(n-1))(Shat_k - 1)] = 0 => a.s. "
         "agreement",
         ConditionRole::Sufficient, false, false},
        {ConditionId::AsymmetricAlmostSureDivergence, "ASYM_REP_AS_DIV",
         "asymmetric: bounded S_k, T_k <= T* < 1, sum J_Z(k) = O(m) for some Z => a.s. divergence",
         ConditionRole::Sufficient, false, false},
        {ConditionId::AsymmetricConstant, "ASYM_CONST",
         "asymmetric time-invariant agreement / divergence inequalities", ConditionRole::Classifier, false,
         false},
    };
    for (const auto& row : table)
        if (row.id == id)
            return row;
    throw Error(ErrorCode::InternalInconsistency, "condition table is incomplete");
}

inline ConditionId condition_from_string(const std::string& s)
{
    for (auto id : kAllConditions)
        if (s == info(id).wire_id)
            return id;
    throw Error(ErrorCode::BadParameter, "unknown condition id '" + s + "'");
}

inline bool applies_to(ConditionId id, const UpdateMode& mode)
{
    const auto& row = info(id);
    return row.both_modes || row.symmetric == mode.symmetric;
}

enum class VerdictStatus { Guaranteed, Impossible, Inconclusive, ExpectedDivergence, ExpectedOscillation };

/// What a Guaranteed / Impossible status refers to.
enum class VerdictTarget { None, Agreement, Divergence };

inline std::string to_string(VerdictStatus s)
{
    switch (s) {
    case VerdictStatus::Guaranteed: return "Guaranteed";
    case VerdictStatus::Impossible: return "Impossible";
    case VerdictStatus::Inconclusive: return "Inconclusive";
    case VerdictStatus::ExpectedDivergence: return "ExpectedDivergence";
    case VerdictStatus::ExpectedOscillation: return "ExpectedOscillation";
    }
    return "?";
}

inline std::string to_string(VerdictTarget t)
{
    switch (t) {
    case VerdictTarget::None: return "none";
    case VerdictTarget::Agreement: return "agreement";
    case VerdictTarget::Divergence: return "divergence";
    }
    return "?";
}

struct Verdict {
    VerdictStatus status = VerdictStatus::Inconclusive;
    VerdictTarget target = VerdictTarget::None;
    nlohmann::json detail = nlohmann::json::object();
    std::vector<std::string> caveats{};

    bool claims_agreement() const
    {
        return status == VerdictStatus::Guaranteed && target == VerdictTarget::Agreement;
    }
    bool claims_divergence() const
    {
        return status == VerdictStatus::ExpectedDivergence
               || (status == VerdictStatus::Guaranteed && target == VerdictTarget::Divergence);
    }
};

struct TheoryOptions {
    std::uint64_t horizon = 10000;
    std::vector<double> tau_grid = default_tau_grid();
    int z_max = 64;
    double margin = 1e-9;  ///< tail-mean threshold for the O(m) tests

    static std::vector<double> default_tau_grid()
    {
        std::vector<double> g;
        for (int i = 1; i <= 19; ++i)
            g.push_back(0.05 * i);
        return g;
    }
};

//---------------------------------------------------------------------------//
namespace detail {

inline constexpr const char* kHorizonCaveat =
    "explicit schedule: series and products evaluated only up to the horizon";
inline constexpr const char* kFloorCaveat =
    "decaying schedule: the 1e-12 clip floor is treated as a numerical guard, not part of the sequence";

/// Evaluates every condition for one model; spectral data computed once.
class Analyzer {
  public:
    Analyzer(const Model& model, const SpectralData& spectral, const TheoryOptions& opt)
        : m_(model), sp_(spectral), opt_(opt), n_(static_cast<double>(model.size())),
          t_tail_(tail_of(model.t_schedule)), s_tail_(tail_of(model.s_schedule))
    {
        if (opt.horizon < model.size())
            throw Error(ErrorCode::BadHorizon, "horizon must be at least n");
        if (t_tail_ && t_tail_->kind == Tail::Kind::Unbounded)
            throw Error(ErrorCode::UnsupportedSchedule, "attraction schedule must stay within (0, 1]");
    }

    Verdict evaluate(ConditionId id) const
    {
        if (!applies_to(id, m_.mode)) {
            Verdict v;
            v.caveats.push_back(std::string("not applicable in ")
                                + (m_.mode.symmetric ? "symmetric" : "asymmetric") + " mode");
            return v;
        }
        switch (id) {
        case ConditionId::AttractionSumNecessary: return attraction_sum_necessary();
        case ConditionId::RepulsionProductNecessary: return repulsion_product_necessary();
        case ConditionId::SymmetricAgreement: return symmetric_agreement(false);
        case ConditionId::SymmetricThreshold: return symmetric_agreement(true);
        case ConditionId::AsymmetricAgreement: return asymmetric_agreement(false);
        case ConditionId::AsymmetricAgreementMonotone: return asymmetric_agreement(true);
        case ConditionId::SymmetricRepulsionAgreement: return symmetric_repulsion_agreement();
        case ConditionId::SymmetricExpectedDivergence: return symmetric_expected_divergence();
        case ConditionId::SymmetricAlmostSureDivergence: return symmetric_as_divergence();
        case ConditionId::CriticalMeasure: return critical_classification();
        case ConditionId::AsymmetricRepulsionAgreement: return asymmetric_repulsion_agreement();
        case ConditionId::AsymmetricAlmostSureDivergence: return asymmetric_as_divergence();
        case ConditionId::AsymmetricConstant: return asymmetric_constant();
        }
        throw Error(ErrorCode::InternalInconsistency, "unhandled condition");
    }

  private:
    double T(std::uint64_t k) const { return m_.t_schedule(k); }
    double S(std::uint64_t k) const { return m_.s_schedule(k); }
    std::size_t nodes() const { return m_.size(); }
    double gamma() const { return m_.probs.gamma; }
    double alpha() const { return m_.probs.alpha; }
    bool closed_form() const { return t_tail_.has_value() && s_tail_.has_value(); }
    bool both_constant() const { return m_.t_schedule.is_constant() && m_.s_schedule.is_constant(); }

    double partial_sum(const std::function<double(std::uint64_t)>& f) const
    {
        double acc = 0.0;
        for (std::uint64_t k = 0; k < opt_.horizon; ++k)
            acc += f(k);
        return acc;
    }

    /// Mean of f over the second half of [0, count).
    static double tail_mean(const std::function<double(std::uint64_t)>& f, std::uint64_t count)
    {
        const std::uint64_t start = count / 2;
        double acc = 0.0;
        for (std::uint64_t k = start; k < count; ++k)
            acc += f(k);
        return acc / static_cast<double>(count - start);
    }

    void note_floor(Verdict& v, bool t_used, bool s_used) const
    {
        if ((t_used && t_tail_ && t_tail_->floor_ignored) || (s_used && s_tail_ && s_tail_->floor_ignored))
            v.caveats.emplace_back(kFloorCaveat);
    }

    /// Effective per-slot probability that a chosen neighbour performs attraction toward a given node.
    std::optional<double> attraction_constant() const
    {
        const double base = alpha() * sp_.aStar / n_;
        if (m_.mode.rule == ActiveRule::Uniform)
            return base / 2.0;
        if (m_.a.has_symmetric_pattern())
            return base;
        return std::nullopt;
    }

    double block_product_T(std::uint64_t block) const
    {
        const std::uint64_t len = nodes() - 1;
        double prod = 1.0;
        for (std::uint64_t s = block * len; s < (block + 1) * len; ++s)
            prod *= T(s) * (1.0 - T(s));
        return prod;
    }

    double block_product_S(std::uint64_t block) const
    {
        const std::uint64_t len = nodes() - 1;
        double prod = 1.0;
        for (std::uint64_t s = block * len; s < (block + 1) * len; ++s)
            prod *= 1.0 + S(s);
        return prod;
    }

    bool t_monotone() const { return m_.t_schedule.nondecreasing() || m_.t_schedule.nonincreasing(); }

    /// Range [lo, hi] covering every T_k (closed over the limit).
    std::pair<double, double> t_range() const
    {
        if (t_tail_) {
            const double a = T(0);
            const double b = t_tail_->limit_value();
            return {std::min(a, b), std::max(a, b)};
        }
        double lo = m_.t_schedule(m_.t_schedule.list.size());
        double hi = lo;
        for (std::uint64_t k = 0; k < m_.t_schedule.list.size(); ++k) {
            lo = std::min(lo, T(k));
            hi = std::max(hi, T(k));
        }
        return {lo, hi};
    }

    /// Supremum of S_k (infinite when unbounded).
    double s_sup() const
    {
        if (s_tail_) {
            if (s_tail_->kind == Tail::Kind::Unbounded)
                return HUGE_VAL;
            return std::max(S(0), s_tail_->limit_value());
        }
        double hi = m_.s_schedule(m_.s_schedule.list.size());
        for (std::uint64_t k = 0; k < m_.s_schedule.list.size(); ++k)
            hi = std::max(hi, S(k));
        return hi;
    }

    //-----------------------------------------------------------------------//

    Verdict attraction_sum_necessary() const
    {
        Verdict v;
        v.target = VerdictTarget::Agreement;
        v.detail["partial_sum_T"] = partial_sum([&](auto k) { return T(k); });
        v.detail["partial_sum_one_minus_T"] = partial_sum([&](auto k) { return 1.0 - T(k); });
        v.detail["horizon"] = opt_.horizon;
        if (!t_tail_) {
            v.caveats.emplace_back(kHorizonCaveat);
            return v;
        }
        const bool sum_t = value_term(*t_tail_).series_diverges();
        const bool sum_c = complement_term(*t_tail_).series_diverges();
        v.detail["sum_T_diverges"] = sum_t;
        v.detail["sum_one_minus_T_diverges"] = sum_c;
        note_floor(v, true, false);
        if (!sum_t || !sum_c) {
            v.status = VerdictStatus::Impossible;
            v.caveats.emplace_back(!sum_t ? "sum T_k converges: spread stays above a positive multiple of its "
                                            "initial value for almost all initial states"
                                          : "sum (1 - T_k) converges: spread stays above a positive multiple of "
                                            "its initial value for almost all initial states");
            v.caveats.emplace_back("holds once k0 is past the slot where T_k stays on one side of 1/2");
        }
        return v;
    }

    Verdict repulsion_product_necessary() const
    {
        Verdict v;
        v.target = VerdictTarget::Divergence;
        v.detail["partial_log_product_1p2S"] = partial_sum([&](auto k) { return std::log1p(2.0 * S(k)); });
        v.detail["horizon"] = opt_.horizon;
        if (gamma() == 0.0) {
            v.status = VerdictStatus::Impossible;
            v.caveats.emplace_back("no repulsion events: the spread never increases");
            return v;
        }
        if (!s_tail_) {
            v.caveats.emplace_back(kHorizonCaveat);
            return v;
        }
        const bool diverges = value_term(*s_tail_).series_diverges();
        v.detail["product_diverges"] = diverges;
        note_floor(v, false, true);
        if (!diverges) {
            v.status = VerdictStatus::Impossible;
            v.caveats.emplace_back("sum S_k converges, so prod (1 + 2 S_k) is finite and bounds the spread growth");
        }
        return v;
    }

    Verdict symmetric_agreement(bool threshold) const
    {
        Verdict v;
        v.target = VerdictTarget::Agreement;
        v.detail["partial_sum_T1mT"] = partial_sum([&](auto k) { return T(k) * (1.0 - T(k)); });
        v.detail["horizon"] = opt_.horizon;
        if (gamma() != 0.0) {
            v.caveats.emplace_back("hypothesis not met: repulsion probability is nonzero");
            return v;
        }
        if (alpha() == 0.0) {
            v.caveats.emplace_back("hypothesis not met: attraction probability is zero");
            return v;
        }
        if (threshold && !t_monotone()) {
            v.caveats.emplace_back("hypothesis not met: T_k is not monotone");
            return v;
        }
        if (!t_tail_) {
            v.caveats.emplace_back(kHorizonCaveat);
            return v;
        }
        const bool diverges = attraction_term(*t_tail_).series_diverges();
        v.detail["series_diverges"] = diverges;
        note_floor(v, true, false);
        if (diverges)
            v.status = VerdictStatus::Guaranteed;
        else if (threshold)
            v.status = VerdictStatus::Impossible;
        return v;
    }

    Verdict asymmetric_agreement(bool monotone_form) const
    {
        Verdict v;
        v.target = VerdictTarget::Agreement;
        const std::uint64_t len = nodes() - 1;
        const double e = static_cast<double>(len);
        if (monotone_form) {
            v.detail["partial_sum"] = partial_sum([&](auto k) { return std::pow(T(k) * (1.0 - T(k)), e); });
            v.caveats.emplace_back("listed hypotheses name symmetric attraction; applied here to asymmetric "
                                   "attraction, which the block-product result it extends assumes");
        } else {
            double acc = 0.0;
            for (std::uint64_t b = 0; b < opt_.horizon / len; ++b)
                acc += block_product_T(b);
            v.detail["partial_sum"] = acc;
        }
        v.detail["horizon"] = opt_.horizon;
        if (gamma() != 0.0) {
            v.caveats.emplace_back("hypothesis not met: repulsion probability is nonzero");
            return v;
        }
        if (alpha() == 0.0) {
            v.caveats.emplace_back("hypothesis not met: attraction probability is zero");
            return v;
        }
        if (!attraction_constant()) {
            v.caveats.emplace_back("active rule cannot realise attraction along one-way arcs of this graph");
            return v;
        }
        if (monotone_form && !t_monotone()) {
            v.caveats.emplace_back("hypothesis not met: T_k is not monotone");
            return v;
        }
        if (!t_tail_) {
            v.caveats.emplace_back(kHorizonCaveat);
            return v;
        }
        const bool diverges = attraction_term(*t_tail_).raised(e).series_diverges();
        v.detail["series_diverges"] = diverges;
        note_floor(v, true, false);
        if (diverges)
            v.status = VerdictStatus::Guaranteed;
        return v;
    }

    /// Leading behaviour of alpha T(1-T) - gamma S(1+S).
    SignedLeading coefficient_tail() const
    {
        return difference(attraction_term(*t_tail_).scaled(alpha()), repulsion_term(*s_tail_).scaled(gamma()));
    }

    Verdict symmetric_repulsion_agreement() const
    {
        Verdict v;
        v.target = VerdictTarget::Agreement;
        const auto c0 = contraction(T(0), S(0), m_.probs, sp_);
        v.detail["I_0"] = c0.iK;
        double log_prod = 0.0;
        bool hit_zero = false;
        for (std::uint64_t k = 0; k < opt_.horizon; ++k) {
            const double f = 1.0 - 2.0 / n_ * contraction(T(k), S(k), m_.probs, sp_).iK;
            if (f <= 0.0) {
                hit_zero = true;
                break;
            }
            log_prod += std::log(f);
        }
        v.detail["partial_log_product"] = hit_zero ? -HUGE_VAL : log_prod;
        v.detail["horizon"] = opt_.horizon;
        if (!closed_form()) {
            v.caveats.emplace_back(kHorizonCaveat);
            return v;
        }
        const auto c = coefficient_tail();
        v.detail["coefficient_sign"] = c.sign;
        note_floor(v, true, true);
        if (c.cancelled) {
            if (!both_constant())
                v.caveats.emplace_back("attraction and repulsion terms cancel at leading order");
            return v;
        }
        if (c.sign > 0 && c.magnitude.series_diverges())
            v.status = VerdictStatus::Guaranteed;
        return v;
    }

    Verdict symmetric_expected_divergence() const
    {
        Verdict v;
        v.target = VerdictTarget::Divergence;
        const auto c0 = contraction(T(0), S(0), m_.probs, sp_);
        v.detail["Ihat_0"] = c0.iHatK;
        v.detail["growth_rate_0"] = c0.zK;
        double log_prod = 0.0;
        bool hit_zero = false;
        for (std::uint64_t k = 0; k < opt_.horizon; ++k) {
            const double f = contraction(T(k), S(k), m_.probs, sp_).zK;
            if (f <= 0.0) {
                hit_zero = true;
                break;
            }
            log_prod += std::log(f);
        }
        v.detail["partial_log_product"] = hit_zero ? -HUGE_VAL : log_prod;
        v.detail["horizon"] = opt_.horizon;
        if (!closed_form()) {
            v.caveats.emplace_back(kHorizonCaveat);
            return v;
        }
        if (hit_zero) {
            v.caveats.emplace_back("a factor of the product vanishes within the horizon");
            return v;
        }
        const auto c = coefficient_tail();
        v.detail["coefficient_sign"] = c.sign;
        note_floor(v, true, true);
        if (c.cancelled)
            return v;
        if (c.sign < 0 && c.magnitude.series_diverges()) {
            v.status = VerdictStatus::ExpectedDivergence;
            if (c.magnitude.is_constant() && both_constant())
                v.detail["growth_rate"] = c0.zK;
            v.caveats.emplace_back("divergence in expectation, for almost all initial values");
        }
        return v;
    }

    /// J_tau(k) from the mean-square bound; T_k == 1/2 gives -inf.
    double j_tau(double tau, double t, double s) const
    {
        const double s2 = s * s + s;
        const double ihat = contraction(t, s, m_.probs, sp_).iHatK;
        const double p = -(2.0 / n_ * ihat + gamma() * (1.0 + 4.0 * tau * s2)) / (4.0 * (1.0 - tau) * s2);
        return p * std::log1p(4.0 * tau * s2) + 2.0 * alpha() * std::log(std::abs(2.0 * t - 1.0));
    }

    Verdict symmetric_as_divergence() const
    {
        Verdict v;
        v.target = VerdictTarget::Divergence;
        v.detail["horizon"] = opt_.horizon;
        if (gamma() == 0.0) {
            v.caveats.emplace_back("no repulsion: the exponent p_k is negative and |2T - 1| <= 1, so J <= 0");
            return v;
        }
        const double s_hi = s_sup();
        v.detail["S_sup"] = s_hi;
        if (!std::isfinite(s_hi)) {
            v.caveats.emplace_back("hypothesis not met: S_k is unbounded");
            return v;
        }
        const auto [t_lo, t_hi] = t_range();
        v.detail["T_range"] = {t_lo, t_hi};
        if (!(t_hi < 0.5 || t_lo > 0.5)) {
            v.caveats.emplace_back("hypothesis not met: T_k is not bounded away from 1/2");
            return v;
        }
        double best_mean = -HUGE_VAL;
        double best_tau = 0.0;
        double best_sum = 0.0;
        for (double tau : opt_.tau_grid) {
            auto j = [&](std::uint64_t k) { return j_tau(tau, T(k), S(k)); };
            double mean = both_constant() ? j(0) : tail_mean(j, opt_.horizon);
            if (mean > best_mean) {
                best_mean = mean;
                best_tau = tau;
                best_sum = both_constant() ? j(0) * static_cast<double>(opt_.horizon)
                                           : partial_sum(j);
            }
        }
        v.detail["tau"] = best_tau;
        v.detail["tail_mean_J"] = best_mean;
        v.detail["partial_sum_J"] = best_sum;
        if (!closed_form()) {
            v.caveats.emplace_back(kHorizonCaveat);
            return v;
        }
        note_floor(v, true, true);
        if (!both_constant())
            v.caveats.emplace_back("linear growth of sum J tested by its tail mean over the horizon");
        if (best_mean > opt_.margin)
            v.status = VerdictStatus::Guaranteed;
        return v;
    }

    Verdict critical_classification() const
    {
        Verdict v;
        if (!both_constant()) {
            v.caveats.emplace_back("requires time-invariant T_k and S_k");
            return v;
        }
        const double t = T(0);
        const double s = S(0);
        const double d0 = critical_measure(t, s, m_.probs);
        v.detail["D0"] = d0;
        if (d0 < 0.0) {
            v.status = VerdictStatus::Guaranteed;
            v.target = VerdictTarget::Agreement;
            return v;
        }
        if (d0 == 0.0) {
            v.status = VerdictStatus::ExpectedOscillation;
            v.caveats.emplace_back("E L(k) = L(k0) for all k >= k0");
            return v;
        }
        v.status = VerdictStatus::ExpectedDivergence;
        v.target = VerdictTarget::Divergence;
        if (t == 0.5)
            return v;
        // Almost-sure divergence when some tau lifts the bound above one.
        const double s2 = s * s + s;
        double best = -HUGE_VAL;
        double best_tau = 0.0;
        double best_p = 0.0;
        for (double tau : opt_.tau_grid) {
            const double p = (2.0 * d0 * sp_.lambda2 - n_ * gamma() * (1.0 + 4.0 * tau * s2))
                             / (4.0 * n_ * (1.0 - tau) * s2);
            const double value = p * std::log1p(4.0 * tau * s2) + 2.0 * alpha() * std::log(std::abs(2.0 * t - 1.0));
            if (value > best) {
                best = value;
                best_tau = tau;
                best_p = p;
            }
        }
        v.detail["p_star"] = best_p;
        v.detail["tau"] = best_tau;
        v.detail["log_bound"] = best;
        if (best > 0.0) {
            v.status = VerdictStatus::Guaranteed;
            v.caveats.emplace_back("almost-sure divergence for almost all initial values (also in expectation)");
        }
        return v;
    }

    Verdict asymmetric_repulsion_agreement() const
    {
        Verdict v;
        v.target = VerdictTarget::Agreement;
        const std::uint64_t len = nodes() - 1;
        const double e = static_cast<double>(len);
        const double g = 1.0 - std::pow(1.0 - gamma(), e);
        const auto c = attraction_constant();
        v.detail["horizon"] = opt_.horizon;
        if (!c) {
            v.caveats.emplace_back("active rule cannot realise attraction along one-way arcs of this graph");
            return v;
        }
        const double ce = std::pow(*c, e);
        v.detail["attraction_constant"] = *c;
        double log_prod = 0.0;
        for (std::uint64_t b = 0; b < opt_.horizon / len; ++b) {
            const double f = 1.0 - ce * block_product_T(b) + g * (block_product_S(b) - 1.0);
            log_prod += std::log(std::max(f, 0.0));
        }
        v.detail["partial_log_product"] = log_prod;
        if (!closed_form()) {
            v.caveats.emplace_back(kHorizonCaveat);
            return v;
        }
        if (s_tail_->kind == Tail::Kind::Unbounded) {
            v.caveats.emplace_back("hypothesis not met: S_k is unbounded");
            return v;
        }
        // 1 - factor ~ ce * T(1-T)^(n-1) - g * (Shat - 1), all in slot index.
        Leading shat_minus_one;
        switch (s_tail_->kind) {
        case Tail::Kind::Limit: shat_minus_one = Leading::constant(std::pow(1.0 + s_tail_->limit, e) - 1.0); break;
        case Tail::Kind::ToZero: shat_minus_one = s_tail_->deviation.scaled(e); break;
        case Tail::Kind::ToOne: shat_minus_one = Leading::constant(std::pow(2.0, e) - 1.0); break;
        case Tail::Kind::Unbounded: break;
        }
        const auto gap = difference(attraction_term(*t_tail_).raised(e).scaled(ce), shat_minus_one.scaled(g));
        v.detail["gap_sign"] = gap.sign;
        note_floor(v, true, true);
        if (!gap.cancelled && gap.sign > 0 && gap.magnitude.series_diverges())
            v.status = VerdictStatus::Guaranteed;
        return v;
    }

    double j_z_constant_log1p_s(int z, double t, double s) const
    {
        const double zz = z + 1.0;
        return std::pow(gamma() * sp_.aStar / n_, zz) * (zz * std::log1p(s) - std::log(n_ - 1.0))
               + (1.0 - std::pow(1.0 - alpha(), zz)) * zz * std::log1p(-t);
    }

    double j_z_constant_log_s(int z, double t, double s) const
    {
        const double zz = z + 1.0;
        return std::pow(gamma() * sp_.aStar / n_, zz) * (zz * std::log(s) - std::log(n_ - 1.0))
               + (1.0 - std::pow(1.0 - alpha(), zz)) * zz * std::log1p(-t);
    }

    Verdict asymmetric_as_divergence() const
    {
        Verdict v;
        v.target = VerdictTarget::Divergence;
        v.detail["horizon"] = opt_.horizon;
        if (gamma() == 0.0) {
            v.caveats.emplace_back("no repulsion events: the spread never increases");
            return v;
        }
        const double s_hi = s_sup();
        const auto [t_lo, t_hi] = t_range();
        v.detail["S_sup"] = s_hi;
        v.detail["T_sup"] = t_hi;
        if (!std::isfinite(s_hi)) {
            v.caveats.emplace_back("hypothesis not met: S_k is unbounded");
            return v;
        }
        if (!(t_hi < 1.0)) {
            v.caveats.emplace_back("hypothesis not met: T_k is not bounded below 1");
            return v;
        }
        double best_mean = -HUGE_VAL;
        int best_z = 0;
        for (int z = 0; z <= opt_.z_max; ++z) {
            const std::uint64_t len = static_cast<std::uint64_t>(z) + 1;
            const std::uint64_t blocks = opt_.horizon / len;
            if (blocks < 2)
                break;
            auto j = [&](std::uint64_t b) {
                double log_s = 0.0;
                double log_t = 0.0;
                for (std::uint64_t k = b * len; k < (b + 1) * len; ++k) {
                    log_s += std::log1p(S(k));
                    log_t += std::log1p(-T(k));
                }
                return std::pow(gamma() * sp_.aStar / n_, static_cast<double>(len)) * (log_s - std::log(n_ - 1.0))
                       + (1.0 - std::pow(1.0 - alpha(), static_cast<double>(len))) * log_t;
            };
            const double mean = both_constant() ? j_z_constant_log1p_s(z, T(0), S(0)) : tail_mean(j, blocks);
            if (mean > best_mean) {
                best_mean = mean;
                best_z = z;
            }
        }
        v.detail["Z"] = best_z;
        v.detail["tail_mean_J"] = best_mean;
        if (!closed_form()) {
            v.caveats.emplace_back(kHorizonCaveat);
            return v;
        }
        note_floor(v, true, true);
        if (!both_constant())
            v.caveats.emplace_back("linear growth of sum J tested by its tail mean over the horizon");
        if (best_mean > opt_.margin)
            v.status = VerdictStatus::Guaranteed;
        return v;
    }

    Verdict asymmetric_constant() const
    {
        Verdict v;
        if (!both_constant()) {
            v.caveats.emplace_back("requires time-invariant T_k and S_k");
            return v;
        }
        const double t = T(0);
        const double s = S(0);
        const double e = n_ - 1.0;
        const double g = 1.0 - std::pow(1.0 - gamma(), e);
        const double lhs = g * (std::pow(s + 1.0, e) - 1.0);
        const double undoubled_c = alpha() * sp_.aStar / n_;
        v.detail["agreement_lhs"] = lhs;
        v.detail["agreement_rhs_undoubled"] = std::pow(undoubled_c, e) * std::pow(std::max(t, 1.0 - t), e);
        const auto c = attraction_constant();
        bool agree = false;
        if (c) {
            const double rhs = std::pow(*c, e) * std::pow(t * (1.0 - t), e);
            v.detail["agreement_rhs"] = rhs;
            agree = lhs < rhs;
        } else {
            v.caveats.emplace_back("active rule cannot realise attraction along one-way arcs of this graph");
        }

        bool diverge = false;
        double best_log_s = -HUGE_VAL;
        double best_log1p_s = -HUGE_VAL;
        int best_z = 0;
        if (gamma() > 0.0 && t < 1.0) {
            for (int z = 0; z <= opt_.z_max; ++z) {
                const double js = j_z_constant_log_s(z, t, s);
                if (js > best_log_s) {
                    best_log_s = js;
                    best_z = z;
                }
                best_log1p_s = std::max(best_log1p_s, j_z_constant_log1p_s(z, t, s));
            }
            diverge = best_log_s > 0.0;
        }
        v.detail["divergence_j_log_s"] = best_log_s;
        v.detail["divergence_j_log1p_s"] = best_log1p_s;
        v.detail["Z"] = best_z;
        if (agree && diverge)
            throw Error(ErrorCode::InternalInconsistency,
                        "time-invariant asymmetric agreement and divergence inequalities both hold");
        if (agree) {
            v.status = VerdictStatus::Guaranteed;
            v.target = VerdictTarget::Agreement;
        } else if (diverge) {
            v.status = VerdictStatus::Guaranteed;
            v.target = VerdictTarget::Divergence;
        }
        return v;
    }

    const Model& m_;
    const SpectralData& sp_;
    const TheoryOptions& opt_;
    double n_;
    std::optional<Tail> t_tail_;
    std::optional<Tail> s_tail_;
};

}  // namespace detail

inline Verdict evaluate_condition(ConditionId id, const Model& model, const SpectralData& spectral,
                                  const TheoryOptions& options = {})
{
    return detail::Analyzer(model, spectral, options).evaluate(id);
}

inline Verdict evaluate_condition(ConditionId id, const Model& model, const TheoryOptions& options = {})
{
    const auto sp = spectral(model.a);
    return evaluate_condition(id, model, sp, options);
}

//---------------------------------------------------------------------------//
// Report
//---------------------------------------------------------------------------//

struct ConditionResult {
    ConditionId id;
    Verdict verdict;
};

struct TheoryReport {
    std::optional<double> d0;
    SpectralData spectral;
    ContractionCoefficients at_start;
    std::vector<ConditionResult> conditions;

    const Verdict& verdict(ConditionId id) const
    {
        for (const auto& c : conditions)
            if (c.id == id)
                return c.verdict;
        throw Error(ErrorCode::BadParameter, std::string("condition not in report: ") + info(id).wire_id);
    }

    bool has(ConditionId id) const
    {
        for (const auto& c : conditions)
            if (c.id == id)
                return true;
        return false;
    }

    nlohmann::json to_json() const
    {
        nlohmann::json j;
        j["D0"] = d0 ? nlohmann::json(*d0) : nlohmann::json(nullptr);
        j["lambda2"] = spectral.lambda2;
        j["lambdaN"] = spectral.lambdaN;
        j["aStar"] = spectral.aStar;
        j["contraction"] = {{"coefficient", at_start.coefficient},
                            {"I", at_start.iK},
                            {"Ihat", at_start.iHatK},
                            {"Z", at_start.zK}};
        j["conditions"] = nlohmann::json::array();
        for (const auto& c : conditions) {
            j["conditions"].push_back({{"id", info(c.id).wire_id},
                                       {"formula", info(c.id).formula},
                                       {"status", to_string(c.verdict.status)},
                                       {"target", to_string(c.verdict.target)},
                                       {"detail", c.verdict.detail},
                                       {"caveats", c.verdict.caveats}});
        }
        return j;
    }
};

/// Flags claims that cannot hold together.
inline void check_consistency(const TheoryReport& report)
{
    bool agreement = false;
    bool divergence = false;
    bool agreement_impossible = false;
    bool as_divergence = false;
    bool divergence_impossible = false;
    for (const auto& c : report.conditions) {
        const auto& v = c.verdict;
        agreement |= v.claims_agreement();
        divergence |= v.claims_divergence();
        as_divergence |= v.status == VerdictStatus::Guaranteed && v.target == VerdictTarget::Divergence;
        agreement_impossible |= v.status == VerdictStatus::Impossible && v.target == VerdictTarget::Agreement;
        divergence_impossible |= v.status == VerdictStatus::Impossible && v.target == VerdictTarget::Divergence;
    }
    if (agreement && divergence)
        throw Error(ErrorCode::InternalInconsistency, "report claims both agreement and divergence");
    if (agreement && agreement_impossible)
        throw Error(ErrorCode::InternalInconsistency, "report claims agreement is both guaranteed and impossible");
    if (as_divergence && divergence_impossible)
        throw Error(ErrorCode::InternalInconsistency, "report claims divergence is both guaranteed and impossible");
}

inline TheoryReport theory_report(const Model& model, const TheoryOptions& options = {})
{
    if (!is_weakly_connected(model.a))
        throw Error(ErrorCode::Disconnected, "induced graph is not weakly connected");
    TheoryReport report;
    report.spectral = spectral(model.a);
    report.at_start = contraction(model.t_schedule(0), model.s_schedule(0), model.probs, report.spectral);
    if (model.mode.symmetric && model.t_schedule.is_constant() && model.s_schedule.is_constant())
        report.d0 = critical_measure(model.t_schedule(0), model.s_schedule(0), model.probs);
    detail::Analyzer analyzer(model, report.spectral, options);
    for (auto id : kAllConditions)
        if (applies_to(id, model.mode))
            report.conditions.push_back({id, analyzer.evaluate(id)});
    check_consistency(report);
    return report;
}

}  // namespace gossip
