#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "dispersion.hpp"
#include "error.hpp"
#include "roots.hpp"
#include "units.hpp"

namespace vacpair
{
//---------------------------------------------------------------------------//
// Emission geometry. Polar angles are measured from the +x propagation axis
// of the perturbation, theta in [0, pi], azimuth phi in [0, 2 pi).
//---------------------------------------------------------------------------//

struct PerturbationKinematics
{
    double beta;  //!< v / c

    double velocity() const { return beta * constants::c_light; }

    //! Superluminal with respect to a photon of index n.
    bool superluminal(double n) const { return beta * n > 1; }
};

inline void validate(PerturbationKinematics const& kin)
{
    if (!(kin.beta > 0) || !std::isfinite(kin.beta))
        throw Error(ErrorCode::InvalidArgument, "beta must be positive");
}

struct PhotonMode
{
    double lambda;  //!< vacuum wavelength [um]
    double theta;   //!< polar angle [rad]
    double phi{0};  //!< azimuth [rad]
};

//! Optical state of a photon in the medium, SI wavevector.
struct ModeState
{
    double lambda;  //!< um
    double omega;   //!< rad/s
    double n;
    double n_g;
    double k;  //!< |k| [1/m]
    std::array<double, 3> dir;

    std::array<double, 3> kvec() const { return {k * dir[0], k * dir[1], k * dir[2]}; }
    double kx() const { return k * dir[0]; }
};

inline std::array<double, 3> direction(double theta, double phi)
{
    double const s = std::sin(theta);
    return {std::cos(theta), s * std::cos(phi), s * std::sin(phi)};
}

inline ModeState mode_state(DispersionModel const& model, PhotonMode const& mode)
{
    auto const g = group_index(model, mode.lambda);
    double const omega = wavelength_to_omega(mode.lambda);
    return {mode.lambda,
            omega,
            g.n,
            g.n_g,
            g.n * omega / constants::c_light,
            direction(mode.theta, mode.phi)};
}

//---------------------------------------------------------------------------//
// Doppler shift
//---------------------------------------------------------------------------//

enum class DopplerRegime
{
    Normal,
    Anomalous,
};

struct DopplerResult
{
    double omega_lab;
    DopplerRegime regime;
};

/*!
 * Solve omega |1 - beta n(omega) cos(theta)| = omega' / gamma for the lab
 * frequency inside [omega_lo, omega_hi].
 *
 * gamma is only defined for beta < 1; for beta >= 1 it is set to one and the
 * result serves as a regime classifier.
 */
inline DopplerResult doppler_frequency(double omega_comoving,
                                       double theta,
                                       PerturbationKinematics const& kin,
                                       DispersionModel const& model,
                                       double omega_lo,
                                       double omega_hi,
                                       double tol_root = 1e-12)
{
    if (!(omega_comoving > 0))
        throw Error(ErrorCode::NonPositive, "comoving frequency must be positive");
    if (!(kin.beta >= 0))
        throw Error(ErrorCode::InvalidArgument, "beta must be non-negative");
    double const gamma = kin.beta < 1 ? 1 / std::sqrt(1 - kin.beta * kin.beta) : 1.0;
    double const target = omega_comoving / gamma;
    double const cos_t = std::cos(theta);

    auto denom = [&](double omega) {
        return 1 - kin.beta * refractive_index(model, omega_to_wavelength(omega)) * cos_t;
    };
    // Scale by the target so the residual is O(1)
    auto h = [&](double omega) { return (omega * std::abs(denom(omega)) - target) / target; };

    auto changes = scan_sign_changes(h, omega_lo, omega_hi, {128, true});
    for (auto const& s : changes)
    {
        double const root = refine_root(h, s);
        double const d = denom(root);
        if (std::abs(d) < tol_root)
            throw Error(ErrorCode::Divergence, "observation angle lies on the Cerenkov cone");
        return {root, kin.beta * refractive_index(model, omega_to_wavelength(root)) * cos_t > 1
                          ? DopplerRegime::Anomalous
                          : DopplerRegime::Normal};
    }
    // No root: distinguish the on-cone case from an empty bracket
    auto cone = scan_sign_changes(denom, omega_lo, omega_hi, {128, true});
    if (!cone.empty() || std::abs(denom(omega_lo)) < tol_root
        || std::abs(denom(omega_hi)) < tol_root)
        throw Error(ErrorCode::Divergence, "observation angle lies on the Cerenkov cone");
    throw Error(ErrorCode::NoRoot, "no Doppler solution in the frequency bracket");
}

//---------------------------------------------------------------------------//
// Cerenkov cones
//---------------------------------------------------------------------------//

//! Cone half-angle arccos(1 / (beta n)).
inline double cerenkov_angle(double lambda, PerturbationKinematics const& kin,
                             DispersionModel const& model)
{
    validate(kin);
    double const bn = kin.beta * refractive_index(model, lambda);
    if (bn < 1)
        throw Error(ErrorCode::Subluminal,
                    "beta n < 1 at " + std::to_string(lambda) + " um: no emission cone");
    return std::acos(1 / bn);
}

enum class ConeRelation
{
    Overlap,
    Gap,
    Degenerate,
};

constexpr std::string_view to_string(ConeRelation r)
{
    switch (r)
    {
    case ConeRelation::Overlap: return "overlap";
    case ConeRelation::Gap: return "gap";
    case ConeRelation::Degenerate: return "degenerate";
    }
    return "unknown";
}

struct ConeClassification
{
    ConeRelation relation;
    double theta_cone1;
    double theta_cone2;
};

inline ConeClassification classify_cones(double lambda1, double lambda2,
                                         PerturbationKinematics const& kin,
                                         DispersionModel const& model,
                                         double tol_angle = 1e-9)
{
    double const t1 = cerenkov_angle(lambda1, kin, model);
    double const t2 = cerenkov_angle(lambda2, kin, model);
    ConeRelation rel = ConeRelation::Degenerate;
    if (std::abs(t1 - t2) > tol_angle)
        rel = t1 > t2 ? ConeRelation::Overlap : ConeRelation::Gap;
    return {rel, t1, t2};
}

//---------------------------------------------------------------------------//
// Pair constraint k1x + k2x = (omega1 + omega2) / v
//---------------------------------------------------------------------------//

inline double pair_constraint_residual(ModeState const& a, ModeState const& b,
                                       PerturbationKinematics const& kin)
{
    return (a.kx() + b.kx()) - (a.omega + b.omega) / kin.velocity();
}

//! Residual in 1/m; zero iff the pair is kinematically allowed.
inline double pair_constraint_residual(PhotonMode const& m1, PhotonMode const& m2,
                                       PerturbationKinematics const& kin,
                                       DispersionModel const& model)
{
    validate(kin);
    return pair_constraint_residual(mode_state(model, m1), mode_state(model, m2), kin);
}

//! Acceptance tolerance on the residual for a given pair.
inline double constraint_tolerance(ModeState const& a, ModeState const& b,
                                   PerturbationKinematics const& kin)
{
    return 1e-10 * (a.omega + b.omega) / kin.velocity();
}

struct WavelengthBracket
{
    double lo;  //!< um
    double hi;  //!< um
};

struct PartnerSolution
{
    double lambda2;      //!< smallest admissible root [um]
    int root_count;      //!< number of distinct roots found in the bracket
    bool multiple_roots;
};

/*!
 * Find the wavelength of photon 2, emitted at theta2, that pairs with photon 1.
 *
 * The bracket is scanned for sign changes of the residual and each is refined
 * with a derivative-free bracketing solver. Spurious sign changes across a
 * Sellmeier pole are rejected by re-checking the residual, and partners on
 * the far side of a pole from photon 1 are discarded.
 */
inline PartnerSolution solve_partner(double lambda1, double theta1, double theta2,
                                     PerturbationKinematics const& kin,
                                     DispersionModel const& model,
                                     WavelengthBracket bracket,
                                     ScanOptions scan = {})
{
    validate(kin);
    auto const s1 = mode_state(model, {lambda1, theta1, 0});
    double const v = kin.velocity();
    double const cos2 = std::cos(theta2);
    double const a = s1.k * std::cos(theta1) - s1.omega / v;
    // Scaled residual for the solver; relative to the photon 1 wavenumber
    auto f = [&](double lambda2) {
        auto const g = evaluate_index(model, lambda2);
        double const omega2 = wavelength_to_omega(lambda2);
        double const k2 = g.n * omega2 / constants::c_light;
        return (a + k2 * cos2 - omega2 / v) / s1.k;
    };

    std::vector<double> roots;
    for (auto const& change : scan_sign_changes(f, bracket.lo, bracket.hi, scan))
    {
        try
        {
            double const root = refine_root(f, change);
            auto const s2 = mode_state(model, {root, theta2, 0});
            double const tol = constraint_tolerance(s1, s2, kin);
            double const res = a + s2.k * cos2 - s2.omega / v;
            if (std::abs(res) <= tol && same_branch(model, lambda1, root))
                roots.push_back(root);
        }
        catch (Error const&)
        {
            // Sign change across a pole or invalid region
        }
    }
    if (roots.empty())
        throw Error(ErrorCode::NoSignChange, "no kinematically allowed partner in bracket");
    return {roots.front(), static_cast<int>(roots.size()), roots.size() > 1};
}

}  // namespace vacpair
