#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "error.hpp"

namespace vacpair
{
//---------------------------------------------------------------------------//
// Dispersion models. All wavelengths are vacuum wavelengths in micrometres.
//---------------------------------------------------------------------------//

//! How the resonance parameter enters the Sellmeier denominator.
enum class PoleConvention
{
    Wavelength,         //!< lambda^2 - l^2, l in um
    WavelengthSquared,  //!< lambda^2 - l, l in um^2
};

constexpr std::string_view to_string(PoleConvention p)
{
    return p == PoleConvention::Wavelength ? "wavelength" : "wavelength_squared";
}

struct SellmeierTerm
{
    double a;  //!< dimensionless oscillator strength
    double l;  //!< resonance parameter (um or um^2, see PoleConvention)

    friend bool operator==(SellmeierTerm const&, SellmeierTerm const&) = default;
};

/*!
 * Sellmeier relation n^2 = 1 + sum_i a_i lambda^2 / (lambda^2 - p_i).
 *
 * The pole location p_i is l_i^2 or l_i depending on \c pole.
 */
struct SellmeierModel
{
    std::string name;
    std::vector<SellmeierTerm> terms;
    PoleConvention pole{PoleConvention::Wavelength};

    double pole_position(SellmeierTerm const& t) const
    {
        return pole == PoleConvention::Wavelength ? t.l * t.l : t.l;
    }

    friend bool operator==(SellmeierModel const&, SellmeierModel const&) = default;
};

struct ConstantIndex
{
    double n0;

    friend bool operator==(ConstantIndex const&, ConstantIndex const&) = default;
};

/*!
 * Additive index peak A w^2 / ((lambda - lambda0)^2 + w^2).
 *
 * \c width is the half-width at half maximum in um.
 */
struct LorentzianResonance
{
    double center;
    double amplitude;
    double width;

    friend bool operator==(LorentzianResonance const&, LorentzianResonance const&) = default;
};

inline void validate(LorentzianResonance const& r)
{
    if (!(r.width > 0) || !std::isfinite(r.width))
        throw Error(ErrorCode::InvalidArgument, "resonance width must be positive");
    if (!(r.center > 0) || !std::isfinite(r.center))
        throw Error(ErrorCode::InvalidArgument, "resonance center must be positive");
    if (!std::isfinite(r.amplitude))
        throw Error(ErrorCode::InvalidArgument, "resonance amplitude must be finite");
}

inline void validate(SellmeierModel const& m)
{
    for (auto const& t : m.terms)
    {
        if (!(t.a >= 0) || !std::isfinite(t.a))
            throw Error(ErrorCode::InvalidArgument,
                        "Sellmeier strength must be non-negative in " + m.name);
        if (!std::isfinite(t.l))
            throw Error(ErrorCode::InvalidArgument,
                        "Sellmeier pole must be finite in " + m.name);
    }
}

//! Background medium plus optional fast-light resonances.
struct DispersionModel
{
    std::variant<SellmeierModel, ConstantIndex> base;
    std::vector<LorentzianResonance> resonances;
    double pole_guard{1e-6};  //!< minimum |lambda^2 - p_i| in um^2

    std::string name() const
    {
        if (auto const* s = std::get_if<SellmeierModel>(&base))
            return s->name;
        return "constant";
    }

    bool is_constant() const
    {
        return std::holds_alternative<ConstantIndex>(base) && resonances.empty();
    }

    DispersionModel with_resonance(LorentzianResonance r) const
    {
        validate(r);
        DispersionModel result = *this;
        result.resonances.push_back(r);
        return result;
    }

    friend bool operator==(DispersionModel const&, DispersionModel const&) = default;
};

inline DispersionModel make_constant(double n0)
{
    if (!(n0 > 0) || !std::isfinite(n0))
        throw Error(ErrorCode::InvalidArgument, "constant index must be positive");
    return DispersionModel{ConstantIndex{n0}, {}};
}

inline DispersionModel make_sellmeier(SellmeierModel m)
{
    validate(m);
    return DispersionModel{std::move(m), {}};
}

//---------------------------------------------------------------------------//
// Evaluation
//---------------------------------------------------------------------------//

//! Index and its analytic wavelength derivative at one wavelength.
struct IndexSample
{
    double n;
    double dn_dlambda;  //!< um^-1
};

namespace detail
{
inline IndexSample evaluate_base(SellmeierModel const& m, double lambda, double guard)
{
    double const l2 = lambda * lambda;
    double radicand = 1;
    double d_radicand = 0;
    for (auto const& t : m.terms)
    {
        double const p = m.pole_position(t);
        double const denom = l2 - p;
        if (std::abs(denom) <= guard)
            throw Error(ErrorCode::PoleProximity,
                        "wavelength " + std::to_string(lambda) + " um is inside a pole guard band of "
                            + m.name);
        radicand += t.a * l2 / denom;
        d_radicand += -2 * t.a * lambda * p / (denom * denom);
    }
    if (!(radicand > 0))
        throw Error(ErrorCode::NegativeRadicand,
                    "Sellmeier radicand is not positive at " + std::to_string(lambda) + " um in "
                        + m.name);
    double const n = std::sqrt(radicand);
    return {n, d_radicand / (2 * n)};
}

inline IndexSample evaluate_base(ConstantIndex const& c, double, double)
{
    return {c.n0, 0.0};
}
}  // namespace detail

inline IndexSample evaluate_index(DispersionModel const& model, double lambda)
{
    if (!(lambda > 0) || !std::isfinite(lambda))
        throw Error(ErrorCode::NonPositive, "wavelength must be positive");
    IndexSample s = std::visit(
        [&](auto const& b) { return detail::evaluate_base(b, lambda, model.pole_guard); },
        model.base);
    for (auto const& r : model.resonances)
    {
        double const d = lambda - r.center;
        double const w2 = r.width * r.width;
        double const q = d * d + w2;
        s.n += r.amplitude * w2 / q;
        s.dn_dlambda += -2 * r.amplitude * w2 * d / (q * q);
    }
    return s;
}

inline double refractive_index(DispersionModel const& model, double lambda)
{
    return evaluate_index(model, lambda).n;
}

inline double index_derivative(DispersionModel const& model, double lambda)
{
    return evaluate_index(model, lambda).dn_dlambda;
}

//! True when no Sellmeier pole lies between the two wavelengths.
inline bool same_branch(DispersionModel const& model, double lambda_a, double lambda_b)
{
    auto const* s = std::get_if<SellmeierModel>(&model.base);
    if (!s)
        return true;
    double const lo = std::min(lambda_a, lambda_b);
    double const hi = std::max(lambda_a, lambda_b);
    for (auto const& t : s->terms)
    {
        double const p = s->pole_position(t);
        if (t.a > 0 && p > 0 && lo * lo < p && p < hi * hi)
            return false;
    }
    return true;
}

enum class GroupRegime
{
    Normal,     //!< n_g >= 1
    Fast,       //!< 0 < n_g < 1
    Anomalous,  //!< n_g <= 0
};

constexpr std::string_view to_string(GroupRegime r)
{
    switch (r)
    {
    case GroupRegime::Normal: return "normal";
    case GroupRegime::Fast: return "fast";
    case GroupRegime::Anomalous: return "anomalous";
    }
    return "unknown";
}

constexpr GroupRegime classify_group_index(double ng)
{
    if (ng <= 0)
        return GroupRegime::Anomalous;
    if (ng < 1)
        return GroupRegime::Fast;
    return GroupRegime::Normal;
}

struct GroupIndexSample
{
    double wavelength;  //!< um
    double n;
    double dn_dlambda;  //!< um^-1
    double n_g;
    GroupRegime regime;
};

//! Group index n_g = n - lambda dn/dlambda = c / v_g.
inline GroupIndexSample group_index(DispersionModel const& model, double lambda)
{
    auto const s = evaluate_index(model, lambda);
    double const ng = s.n - lambda * s.dn_dlambda;
    return {lambda, s.n, s.dn_dlambda, ng, classify_group_index(ng)};
}

//---------------------------------------------------------------------------//
// Fast-light engineering
//---------------------------------------------------------------------------//
/*!
 * Build a Lorentzian whose steepest rising slope sits at \c lambda_star and
 * whose group index there equals \c target_group_index.
 *
 * The steepest slope of the profile is at lambda0 - w/sqrt(3), where the
 * profile equals 3/4 of its peak and its slope is 9/(8 sqrt(3) w) per unit
 * amplitude. The group index is affine in the amplitude, so the amplitude is
 * solved exactly.
 */
inline LorentzianResonance tune_fast_light_resonance(DispersionModel const& background,
                                                     double lambda_star,
                                                     double width,
                                                     double target_group_index)
{
    if (!(width > 0) || !(lambda_star > 0))
        throw Error(ErrorCode::InvalidArgument, "width and wavelength must be positive");
    auto const base = group_index(background, lambda_star);
    double const value = 0.75;
    double const slope = 9.0 / (8.0 * std::numbers::sqrt3 * width);
    double const per_amplitude = value - lambda_star * slope;
    LorentzianResonance r{lambda_star + width / std::numbers::sqrt3,
                          (target_group_index - base.n_g) / per_amplitude,
                          width};
    validate(r);
    return r;
}

}  // namespace vacpair
