#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "dispersion.hpp"
#include "error.hpp"
#include "io.hpp"
#include "kinematics.hpp"
#include "materials.hpp"
#include "parallel.hpp"
#include "units.hpp"

namespace vacpair
{
//---------------------------------------------------------------------------//
// Perturbation profiles
//---------------------------------------------------------------------------//

//! delta n = eta exp(-r^2 / (2 sigma^2)) in the co-moving frame.
struct GaussianProfile
{
    double eta;
    double sigma_um;
};

//! delta n = eta tanh(u / sigma_x) exp(-y^2/(2 sigma_y^2)) exp(-z^2/(2 sigma_z^2)).
struct TanhProfile
{
    double eta;
    double sigma_x_um;
    double sigma_y_um;
    double sigma_z_um;
};

using PerturbationProfile = std::variant<GaussianProfile, TanhProfile>;

inline void validate(PerturbationProfile const& p)
{
    auto positive = [](double s) { return s > 0 && std::isfinite(s); };
    if (auto const* g = std::get_if<GaussianProfile>(&p))
    {
        if (!positive(g->sigma_um) || !std::isfinite(g->eta))
            throw Error(ErrorCode::InvalidArgument, "gaussian profile needs sigma > 0");
        return;
    }
    auto const& t = std::get<TanhProfile>(p);
    if (!positive(t.sigma_x_um) || !positive(t.sigma_y_um) || !positive(t.sigma_z_um)
        || !std::isfinite(t.eta))
        throw Error(ErrorCode::InvalidArgument, "tanh profile needs all sigma > 0");
}

inline double amplitude(PerturbationProfile const& p)
{
    return std::visit([](auto const& x) { return x.eta; }, p);
}

//---------------------------------------------------------------------------//
/*!
 * Everything needed to evaluate a pair density.
 *
 * The reported density is the pair number per dOmega1 dOmega2 dk1 dk2 with
 * the squared constraint delta regularized as delta(0) -> L / (2 pi) and the
 * overall azimuth integrated (factor 2 pi), times a calibration constant.
 * Numerically it is evaluated in SI with L in metres.
 */
struct EmissionConfig
{
    DispersionModel material;
    PerturbationProfile profile;
    PerturbationKinematics kin;
    double length_m{0.05};
    double calibration{1.0};
    double ng_floor{1e-3};
    double kx_floor_per_um{1e-6};
};

inline constexpr char const* density_convention
    = "dN/(dOmega1 dOmega2 dk1 dk2); delta(0)=L/(2pi); azimuth 2pi; SI units, L in m";

inline void validate(EmissionConfig const& cfg)
{
    validate(cfg.profile);
    validate(cfg.kin);
    if (!(cfg.length_m > 0) || !std::isfinite(cfg.length_m))
        throw Error(ErrorCode::InvalidArgument, "interaction length must be positive");
    if (!(cfg.calibration > 0) || !std::isfinite(cfg.calibration))
        throw Error(ErrorCode::InvalidArgument, "calibration must be positive");
}

inline nlohmann::json to_json(PerturbationProfile const& p)
{
    if (auto const* g = std::get_if<GaussianProfile>(&p))
        return {{"shape", "gaussian"}, {"eta", g->eta}, {"sigma_um", g->sigma_um}};
    auto const& t = std::get<TanhProfile>(p);
    return {{"shape", "tanh"},
            {"eta", t.eta},
            {"sigma_x_um", t.sigma_x_um},
            {"sigma_y_um", t.sigma_y_um},
            {"sigma_z_um", t.sigma_z_um}};
}

inline nlohmann::json to_json(EmissionConfig const& cfg)
{
    return {{"material", to_json(cfg.material)},
            {"profile", to_json(cfg.profile)},
            {"beta", cfg.kin.beta},
            {"L_m", cfg.length_m},
            {"calibration", cfg.calibration},
            {"ng_floor", cfg.ng_floor},
            {"kx_floor_per_um", cfg.kx_floor_per_um},
            {"convention", density_convention}};
}

//---------------------------------------------------------------------------//
// Shared factors
//---------------------------------------------------------------------------//
namespace detail
{
inline double dot(std::array<double, 3> const& a, std::array<double, 3> const& b)
{
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline void check_constraint(ModeState const& a, ModeState const& b,
                             PerturbationKinematics const& kin)
{
    double const res = pair_constraint_residual(a, b, kin);
    if (!(std::abs(res) <= constraint_tolerance(a, b, kin)))
        throw Error(ErrorCode::ConstraintViolated,
                    "pair residual " + std::to_string(res) + " 1/m exceeds tolerance");
}

inline void check_group_index(ModeState const& s, double floor)
{
    if (std::abs(s.n_g) < floor)
        throw Error(ErrorCode::GroupIndexSingular,
                    "|n_g| below floor at " + std::to_string(s.lambda) + " um");
}

/*!
 * Profile-independent part:
 * (pi^2 / v^2) w1 / (n1^2 ng1^2) w2 / (n2^2 ng2^2) (n1 + n2)^2
 * (1 + cos^2 gamma) k1^2 k2^2.
 */
inline double index_factor(ModeState const& a, ModeState const& b, double v)
{
    double const cos_g = dot(a.dir, b.dir);
    double const pol = 1 + cos_g * cos_g;
    double const fa = a.omega / (a.n * a.n * a.n_g * a.n_g);
    double const fb = b.omega / (b.n * b.n * b.n_g * b.n_g);
    double const nsum = a.n + b.n;
    double const pi2 = constants::pi * constants::pi;
    return pi2 / (v * v) * fa * fb * nsum * nsum * pol * (a.k * a.k) * (b.k * b.k);
}

inline std::array<double, 3> total_k(ModeState const& a, ModeState const& b)
{
    auto const ka = a.kvec();
    auto const kb = b.kvec();
    return {ka[0] + kb[0], ka[1] + kb[1], ka[2] + kb[2]};
}
}  // namespace detail

//---------------------------------------------------------------------------//
// Densities from optical states
//---------------------------------------------------------------------------//

//! Gaussian-profile density for two photon states; the constraint is not checked.
inline double gaussian_kernel(ModeState const& a, ModeState const& b, GaussianProfile const& p,
                              EmissionConfig const& cfg)
{
    double const sigma = um_to_m(p.sigma_um);
    double const s2 = sigma * sigma;
    auto const q = detail::total_k(a, b);
    double const q2 = detail::dot(q, q);
    double const shape = s2 * s2 * s2 * p.eta * p.eta * std::exp(-s2 * q2);
    return cfg.calibration * cfg.length_m * shape
           * detail::index_factor(a, b, cfg.kin.velocity());
}

//! Tanh-profile density for two photon states; the constraint is not checked.
inline double tanh_kernel(ModeState const& a, ModeState const& b, TanhProfile const& p,
                          EmissionConfig const& cfg)
{
    auto const q = detail::total_k(a, b);
    if (std::abs(q[0]) < cfg.kx_floor_per_um / constants::micron)
        throw Error(ErrorCode::CschSingular, "k1x + k2x is too close to zero");
    double const sx = um_to_m(p.sigma_x_um);
    double const sy = um_to_m(p.sigma_y_um);
    double const sz = um_to_m(p.sigma_z_um);
    double const sh = std::sinh(constants::pi * sx / 2 * q[0]);
    double const csch2 = 1 / (sh * sh);
    double const shape = sx * sx * sy * sy * sz * sz * p.eta * p.eta * (constants::pi / 2) * csch2
                         * std::exp(-sy * sy * q[1] * q[1]) * std::exp(-sz * sz * q[2] * q[2]);
    return cfg.calibration * cfg.length_m * shape
           * detail::index_factor(a, b, cfg.kin.velocity());
}

inline double density_kernel(ModeState const& a, ModeState const& b, EmissionConfig const& cfg)
{
    detail::check_group_index(a, cfg.ng_floor);
    detail::check_group_index(b, cfg.ng_floor);
    return std::visit(
        [&](auto const& p) {
            if constexpr (std::is_same_v<std::decay_t<decltype(p)>, GaussianProfile>)
                return gaussian_kernel(a, b, p, cfg);
            else
                return tanh_kernel(a, b, p, cfg);
        },
        cfg.profile);
}

//---------------------------------------------------------------------------//
// Densities from photon modes
//---------------------------------------------------------------------------//

inline double density_gaussian(PhotonMode const& m1, PhotonMode const& m2,
                               EmissionConfig const& cfg)
{
    auto const* p = std::get_if<GaussianProfile>(&cfg.profile);
    if (!p)
        throw Error(ErrorCode::InvalidArgument, "density_gaussian needs a gaussian profile");
    validate(cfg);
    auto const a = mode_state(cfg.material, m1);
    auto const b = mode_state(cfg.material, m2);
    detail::check_constraint(a, b, cfg.kin);
    detail::check_group_index(a, cfg.ng_floor);
    detail::check_group_index(b, cfg.ng_floor);
    return gaussian_kernel(a, b, *p, cfg);
}

inline double density_tanh(PhotonMode const& m1, PhotonMode const& m2, EmissionConfig const& cfg)
{
    auto const* p = std::get_if<TanhProfile>(&cfg.profile);
    if (!p)
        throw Error(ErrorCode::InvalidArgument, "density_tanh needs a tanh profile");
    validate(cfg);
    auto const a = mode_state(cfg.material, m1);
    auto const b = mode_state(cfg.material, m2);
    detail::check_constraint(a, b, cfg.kin);
    detail::check_group_index(a, cfg.ng_floor);
    detail::check_group_index(b, cfg.ng_floor);
    return tanh_kernel(a, b, *p, cfg);
}

inline double density(PhotonMode const& m1, PhotonMode const& m2, EmissionConfig const& cfg)
{
    return std::holds_alternative<GaussianProfile>(cfg.profile) ? density_gaussian(m1, m2, cfg)
                                                                : density_tanh(m1, m2, cfg);
}

/*!
 * Number of pairs in a dispersionless medium of index n0.
 *
 * Written directly from the nondispersive mode-sum result,
 * 2^2 sigma^6 pi^2 eta^2 / (v^2 n0^6) w1 w2 exp(-sigma^2 |k1 + k2|^2)
 * sum_mu [1 - (e2 . e1mu)^2], with the polarization sum done explicitly over
 * a transverse basis of photon 1. Measure and regulator factors are the same
 * as for the dispersive densities.
 */
inline double density_nondispersive(PhotonMode const& m1, PhotonMode const& m2, double n0,
                                    EmissionConfig const& cfg)
{
    auto const* p = std::get_if<GaussianProfile>(&cfg.profile);
    if (!p)
        throw Error(ErrorCode::InvalidArgument, "nondispersive density needs a gaussian profile");
    validate(cfg);
    if (!(n0 > 0))
        throw Error(ErrorCode::InvalidArgument, "n0 must be positive");

    double const c = constants::c_light;
    double const v = cfg.kin.velocity();
    double const w1 = wavelength_to_omega(m1.lambda);
    double const w2 = wavelength_to_omega(m2.lambda);
    double const k1 = n0 * w1 / c;
    double const k2 = n0 * w2 / c;
    auto const e1 = direction(m1.theta, m1.phi);
    auto const e2 = direction(m2.theta, m2.phi);

    // (k1 + k2)_x - c / (v n0) (k1 + k2) = 0
    double const arg = (k1 * e1[0] + k2 * e2[0]) - c / (v * n0) * (k1 + k2);
    if (!(std::abs(arg) <= 1e-10 * (w1 + w2) / v))
        throw Error(ErrorCode::ConstraintViolated, "pair violates the nondispersive constraint");

    // Transverse polarization basis of photon 1
    std::array<double, 3> helper = std::abs(e1[0]) < 0.9 ? std::array<double, 3>{1, 0, 0}
                                                        : std::array<double, 3>{0, 1, 0};
    auto cross = [](std::array<double, 3> const& a, std::array<double, 3> const& b) {
        return std::array<double, 3>{
            a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
    };
    auto normalize = [](std::array<double, 3> a) {
        double const m = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
        return std::array<double, 3>{a[0] / m, a[1] / m, a[2] / m};
    };
    auto const pol1 = normalize(cross(e1, helper));
    auto const pol2 = normalize(cross(e1, pol1));
    double pol_sum = 0;
    for (auto const& eps : {pol1, pol2})
    {
        double const proj = detail::dot(e2, eps);
        pol_sum += 1 - proj * proj;
    }

    double const sigma = um_to_m(p->sigma_um);
    std::array<double, 3> const qv{
        k1 * e1[0] + k2 * e2[0], k1 * e1[1] + k2 * e2[1], k1 * e1[2] + k2 * e2[2]};
    double const q2 = detail::dot(qv, qv);
    double const n3 = n0 * n0 * n0;
    double const pre = 4 * std::pow(sigma, 6) * constants::pi * constants::pi * p->eta * p->eta
                       / (v * v * n3 * n3);
    return cfg.calibration * cfg.length_m * pre * w1 * w2 * std::exp(-sigma * sigma * q2) * pol_sum
           * (k1 * k1) * (k2 * k2);
}

//---------------------------------------------------------------------------//
// Delta consumption
//---------------------------------------------------------------------------//

/*!
 * Inverse Jacobian 1 / |d residual / d k2x| at fixed transverse k2.
 *
 * Varying k2x changes |k2| and hence omega2 through the group velocity:
 * d residual / d k2x = 1 - cos(theta2) / (beta n_g2).
 */
inline double delta_jacobian(ModeState const& b, PerturbationKinematics const& kin)
{
    double const d = 1 - b.dir[0] / (kin.beta * b.n_g);
    if (std::abs(d) < 1e-12)
        throw Error(ErrorCode::Divergence, "constraint is stationary in k2x");
    return 1 / std::abs(d);
}

//! Density with the remaining constraint delta consumed against k2x.
inline double on_shell_density(ModeState const& a, ModeState const& b, EmissionConfig const& cfg)
{
    return density_kernel(a, b, cfg) * delta_jacobian(b, cfg.kin);
}

inline double on_shell_density(PhotonMode const& m1, PhotonMode const& m2,
                               EmissionConfig const& cfg)
{
    double const d = density(m1, m2, cfg);
    return d * delta_jacobian(mode_state(cfg.material, m2), cfg.kin);
}

//! On-shell density for a forward photon 1 and its backward collinear partner.
inline double collinear_density(double lambda1, double lambda2, EmissionConfig const& cfg)
{
    return on_shell_density(PhotonMode{lambda1, 0, 0}, PhotonMode{lambda2, constants::pi, 0},
                            cfg);
}

//---------------------------------------------------------------------------//
// Collinear grid
//---------------------------------------------------------------------------//

enum class CellFlag : std::uint8_t
{
    Ok,
    Forbidden,  //!< no photon-2 direction satisfies the constraint
    Hole,       //!< numerical failure, see hole code
};

struct GridCell
{
    double density{0};
    CellFlag flag{CellFlag::Ok};
    ErrorCode hole{ErrorCode::InvalidArgument};
};

inline std::string flag_string(GridCell const& c)
{
    switch (c.flag)
    {
    case CellFlag::Ok: return "ok";
    case CellFlag::Forbidden: return "forbidden";
    case CellFlag::Hole: return "hole:" + std::string(to_string(c.hole));
    }
    return "unknown";
}

struct RidgeSample
{
    double lambda1;
    double lambda2;  //!< partner on the collinear constraint curve, NaN if none
    GridCell cell;
};

struct GridAxis
{
    double lo;
    double hi;
    int count;

    double at(int i) const { return count == 1 ? lo : lo + (hi - lo) * i / (count - 1); }
};

/*!
 * Sampled N(lambda1, lambda2) for photon 1 forward (theta1 = 0).
 *
 * Off-curve cells fix k2x by the constraint and take photon 2's direction
 * from cos(theta2) = k2x / k2. The ridge holds the collinear constraint curve
 * (theta2 = pi), which is usually narrower than one lambda2 cell.
 */
struct PairDensityGrid
{
    std::vector<double> lambda1;
    std::vector<double> lambda2;
    std::vector<GridCell> cells;  //!< row-major, lambda1 index outer
    std::vector<RidgeSample> ridge;
    EmissionConfig config;

    GridCell const& cell(std::size_t i, std::size_t j) const
    {
        return cells[i * lambda2.size() + j];
    }

    struct Peak
    {
        double lambda1;
        double lambda2;
        double density;
    };

    //! Global maximum over cells and ridge, first occurrence in index order.
    Peak maximum() const
    {
        Peak best{std::nan(""), std::nan(""), 0.0};
        for (std::size_t i = 0; i < lambda1.size(); ++i)
            for (std::size_t j = 0; j < lambda2.size(); ++j)
                if (cell(i, j).flag == CellFlag::Ok && cell(i, j).density > best.density)
                    best = {lambda1[i], lambda2[j], cell(i, j).density};
        for (auto const& r : ridge)
            if (r.cell.flag == CellFlag::Ok && r.cell.density > best.density)
                best = {r.lambda1, r.lambda2, r.cell.density};
        return best;
    }
};

struct GridOptions
{
    GridAxis lambda1{0.2, 2.0, 100};
    GridAxis lambda2{0.2, 4.0, 100};
    unsigned threads{1};
    ScanOptions partner_scan{};
};

namespace detail
{
template<class F>
GridCell guarded_cell(F&& f)
{
    GridCell c;
    try
    {
        c.density = f();
        if (!std::isfinite(c.density) || c.density < 0)
        {
            c.density = 0;
            c.flag = CellFlag::Hole;
            c.hole = ErrorCode::Divergence;
        }
    }
    catch (Error const& e)
    {
        c.density = 0;
        if (e.code() == ErrorCode::NoSignChange || e.code() == ErrorCode::Subluminal)
        {
            c.flag = CellFlag::Forbidden;
        }
        else
        {
            c.flag = CellFlag::Hole;
            c.hole = e.code();
        }
    }
    return c;
}
}  // namespace detail

//! Cell density at (lambda1, lambda2) for photon 1 forward.
inline GridCell grid_cell(double lambda1, double lambda2, EmissionConfig const& cfg)
{
    return detail::guarded_cell([&] {
        auto const a = mode_state(cfg.material, {lambda1, 0, 0});
        auto const g = group_index(cfg.material, lambda2);
        double const w2 = wavelength_to_omega(lambda2);
        double const k2 = g.n * w2 / constants::c_light;
        double const k2x = (a.omega + w2) / cfg.kin.velocity() - a.k;
        if (std::abs(k2x) > k2)
            throw Error(ErrorCode::NoSignChange, "forbidden cell");
        double const theta2 = std::acos(k2x / k2);
        auto const b = mode_state(cfg.material, {lambda2, theta2, constants::pi});
        return on_shell_density(a, b, cfg);
    });
}

inline RidgeSample ridge_sample(double lambda1, EmissionConfig const& cfg,
                                WavelengthBracket bracket, ScanOptions scan = {})
{
    RidgeSample r{lambda1, std::nan(""), {}};
    r.cell = detail::guarded_cell([&] {
        auto const sol = solve_partner(lambda1, 0, constants::pi, cfg.kin, cfg.material, bracket,
                                       scan);
        r.lambda2 = sol.lambda2;
        return collinear_density(lambda1, sol.lambda2, cfg);
    });
    return r;
}

inline PairDensityGrid collinear_grid(EmissionConfig const& cfg, GridOptions const& opts)
{
    validate(cfg);
    if (opts.lambda1.count < 1 || opts.lambda2.count < 1 || !(opts.lambda1.lo > 0)
        || !(opts.lambda2.lo > 0) || opts.lambda1.hi < opts.lambda1.lo
        || opts.lambda2.hi < opts.lambda2.lo)
        throw Error(ErrorCode::InvalidArgument, "grid ranges must be positive and ordered");
    PairDensityGrid grid;
    grid.config = cfg;
    for (int i = 0; i < opts.lambda1.count; ++i)
        grid.lambda1.push_back(opts.lambda1.at(i));
    for (int j = 0; j < opts.lambda2.count; ++j)
        grid.lambda2.push_back(opts.lambda2.at(j));
    std::size_t const n1 = grid.lambda1.size();
    std::size_t const n2 = grid.lambda2.size();
    grid.cells.resize(n1 * n2);
    grid.ridge.resize(n1);
    WavelengthBracket const bracket{opts.lambda2.lo, opts.lambda2.hi};

    parallel_for(n1, opts.threads, [&](std::size_t i) {
        double const l1 = grid.lambda1[i];
        for (std::size_t j = 0; j < n2; ++j)
            grid.cells[i * n2 + j] = grid_cell(l1, grid.lambda2[j], cfg);
        grid.ridge[i] = ridge_sample(l1, cfg, bracket, opts.partner_scan);
    });
    return grid;
}

//---------------------------------------------------------------------------//
// Serialization
//---------------------------------------------------------------------------//

inline std::string grid_csv(PairDensityGrid const& g)
{
    std::string out = "lambda1_um,lambda2_um,density,flag\n";
    for (std::size_t i = 0; i < g.lambda1.size(); ++i)
        for (std::size_t j = 0; j < g.lambda2.size(); ++j)
        {
            auto const& c = g.cell(i, j);
            out += format_double(g.lambda1[i]) + "," + format_double(g.lambda2[j]) + ","
                   + format_double(c.density) + "," + flag_string(c) + "\n";
        }
    return out;
}

inline std::string ridge_csv(PairDensityGrid const& g)
{
    std::string out = "lambda1_um,lambda2_um,density,flag\n";
    for (auto const& r : g.ridge)
    {
        out += format_double(r.lambda1) + ","
               + (std::isnan(r.lambda2) ? std::string("nan") : format_double(r.lambda2)) + ","
               + format_double(r.cell.density) + "," + flag_string(r.cell) + "\n";
    }
    return out;
}

inline nlohmann::json to_json(PairDensityGrid const& g)
{
    nlohmann::json j;
    j["emission_config"] = to_json(g.config);
    j["theta1_rad"] = 0.0;
    j["theta2_rad"] = "from constraint; pi on the ridge";
    j["lambda1_um"] = g.lambda1;
    j["lambda2_um"] = g.lambda2;
    auto& values = j["density"] = nlohmann::json::array();
    auto& flags = j["flag"] = nlohmann::json::array();
    for (std::size_t i = 0; i < g.lambda1.size(); ++i)
    {
        auto row = nlohmann::json::array();
        auto frow = nlohmann::json::array();
        for (std::size_t jj = 0; jj < g.lambda2.size(); ++jj)
        {
            row.push_back(g.cell(i, jj).density);
            frow.push_back(flag_string(g.cell(i, jj)));
        }
        values.push_back(std::move(row));
        flags.push_back(std::move(frow));
    }
    auto& ridge = j["ridge"] = nlohmann::json::array();
    for (auto const& r : g.ridge)
    {
        nlohmann::json e{{"lambda1_um", r.lambda1},
                         {"density", r.cell.density},
                         {"flag", flag_string(r.cell)}};
        e["lambda2_um"] = std::isnan(r.lambda2) ? nlohmann::json(nullptr)
                                                : nlohmann::json(r.lambda2);
        ridge.push_back(std::move(e));
    }
    auto const m = g.maximum();
    j["maximum"] = {{"lambda1_um", m.lambda1}, {"lambda2_um", m.lambda2}, {"density", m.density}};
    return j;
}

}  // namespace vacpair
