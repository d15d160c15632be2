#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include "json.hpp"

#include "dispersion.hpp"
#include "emission.hpp"
#include "error.hpp"
#include "io.hpp"
#include "kinematics.hpp"
#include "parallel.hpp"

namespace vacpair
{
//---------------------------------------------------------------------------//
// Maxima along the collinear constraint curve
//---------------------------------------------------------------------------//

struct SearchWindow
{
    double lo{0.2};   //!< um
    double hi{20.0};  //!< um
};

struct MaximumOptions
{
    int coarse_points{200};
    int refine_bits{40};
    ScanOptions partner_scan{};
};

struct EmissionMaximum
{
    double lambda1;
    double lambda2;
    double density;
    double beta;
    PerturbationProfile profile;
    std::string material;
    int lobes;  //!< local maxima seen by the coarse scan
};

namespace detail
{
//! On-shell collinear density along the constraint curve, zero without a partner.
inline double ridge_density(double lambda1, EmissionConfig const& cfg, SearchWindow w,
                            ScanOptions scan, double* lambda2 = nullptr)
{
    auto const r = ridge_sample(lambda1, cfg, {w.lo, w.hi}, scan);
    if (lambda2)
        *lambda2 = r.lambda2;
    return r.cell.flag == CellFlag::Ok ? r.cell.density : 0.0;
}

inline std::vector<double> log_points(double lo, double hi, int n)
{
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i)
        x[i] = n == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    if (n > 1)
        x.back() = hi;
    return x;
}
}  // namespace detail

/*!
 * Locate the largest on-shell density at theta1 = 0, theta2 = pi.
 *
 * A log-spaced coarse scan in lambda1 finds each lobe of the ridge profile;
 * each lobe is refined with Brent's minimizer and the best one is returned.
 */
inline EmissionMaximum find_maximum(EmissionConfig const& cfg, SearchWindow window = {},
                                    MaximumOptions opts = {})
{
    validate(cfg);
    if (!(window.lo > 0) || !(window.hi > window.lo))
        throw Error(ErrorCode::InvalidArgument, "search window must satisfy 0 < lo < hi");
    auto const x = detail::log_points(window.lo, window.hi, std::max(opts.coarse_points, 3));
    std::vector<double> f(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        f[i] = detail::ridge_density(x[i], cfg, window, opts.partner_scan);

    std::vector<std::size_t> lobes;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        double const left = i > 0 ? f[i - 1] : -1.0;
        double const right = i + 1 < x.size() ? f[i + 1] : -1.0;
        if (f[i] > 0 && f[i] > left && f[i] >= right)
            lobes.push_back(i);
    }
    if (lobes.empty())
        throw Error(ErrorCode::NoEmission, "no kinematically allowed pair in the search window");

    EmissionMaximum best{std::nan(""), std::nan(""), 0.0, cfg.kin.beta, cfg.profile,
                         cfg.material.name(), static_cast<int>(lobes.size())};
    for (auto i : lobes)
    {
        double const a = x[i > 0 ? i - 1 : i];
        double const b = x[std::min(i + 1, x.size() - 1)];
        auto neg = [&](double l1) {
            return -detail::ridge_density(l1, cfg, window, opts.partner_scan);
        };
        std::uintmax_t iters = 200;
        auto [xm, fm] = boost::math::tools::brent_find_minima(neg, a, b, opts.refine_bits, iters);
        double l1 = xm;
        double d = -fm;
        if (f[i] > d)
        {
            l1 = x[i];
            d = f[i];
        }
        if (d > best.density)
        {
            double l2 = 0;
            best.density = detail::ridge_density(l1, cfg, window, opts.partner_scan, &l2);
            best.lambda1 = l1;
            best.lambda2 = l2;
        }
    }
    return best;
}

inline nlohmann::json to_json(EmissionMaximum const& m)
{
    return {{"beta", m.beta},
            {"material", m.material},
            {"profile", to_json(m.profile)},
            {"lambda1_max_um", m.lambda1},
            {"lambda2_max_um", m.lambda2},
            {"N_max", m.density},
            {"lobes", m.lobes}};
}

//---------------------------------------------------------------------------//
// Beta sweeps
//---------------------------------------------------------------------------//

struct SweepRow
{
    double beta;
    std::optional<EmissionMaximum> maximum;  //!< empty on NoEmission
    std::string error;
};

struct SweepResult
{
    std::vector<SweepRow> rows;
    bool wavelengths_decreasing{true};
    bool ratio_decreasing{true};
    bool density_increasing{true};
};

inline void audit(SweepResult& s)
{
    EmissionMaximum const* prev = nullptr;
    for (auto const& row : s.rows)
    {
        if (!row.maximum)
            continue;
        auto const& m = *row.maximum;
        if (prev)
        {
            s.wavelengths_decreasing = s.wavelengths_decreasing && m.lambda1 < prev->lambda1
                                       && m.lambda2 < prev->lambda2;
            s.ratio_decreasing = s.ratio_decreasing
                                 && m.lambda2 / m.lambda1 < prev->lambda2 / prev->lambda1
                                 && m.lambda2 / m.lambda1 > 1;
            s.density_increasing = s.density_increasing && m.density > prev->density;
        }
        prev = &m;
    }
}

//! One maximum per beta, in the order given; failures are recorded per row.
inline SweepResult beta_sweep(EmissionConfig const& base, std::vector<double> const& betas,
                              SearchWindow window = {}, MaximumOptions opts = {},
                              unsigned threads = 1)
{
    SweepResult s;
    s.rows.resize(betas.size());
    parallel_for(betas.size(), threads, [&](std::size_t i) {
        auto cfg = base;
        cfg.kin.beta = betas[i];
        s.rows[i].beta = betas[i];
        try
        {
            s.rows[i].maximum = find_maximum(cfg, window, opts);
        }
        catch (Error const& e)
        {
            if (e.code() != ErrorCode::NoEmission && e.code() != ErrorCode::InvalidArgument)
                throw;
            s.rows[i].error = std::string(to_string(e.code())) + ": " + e.what();
        }
    });
    audit(s);
    return s;
}

inline std::string sweep_csv(SweepResult const& s)
{
    std::string out = "beta,lambda1_max_um,lambda2_max_um,N_max,status\n";
    for (auto const& r : s.rows)
    {
        out += format_double(r.beta) + ",";
        if (r.maximum)
            out += format_double(r.maximum->lambda1) + "," + format_double(r.maximum->lambda2)
                   + "," + format_double(r.maximum->density) + ",ok\n";
        else
            out += "nan,nan,nan,no_emission\n";
    }
    return out;
}

inline nlohmann::json to_json(SweepResult const& s)
{
    nlohmann::json rows = nlohmann::json::array();
    for (auto const& r : s.rows)
    {
        if (r.maximum)
            rows.push_back(to_json(*r.maximum));
        else
            rows.push_back({{"beta", r.beta}, {"error", r.error}});
    }
    return {{"rows", rows},
            {"audit",
             {{"wavelengths_decreasing", s.wavelengths_decreasing},
              {"ratio_decreasing", s.ratio_decreasing},
              {"density_increasing", s.density_increasing}}}};
}

//---------------------------------------------------------------------------//
// Correlated wavelengths
//---------------------------------------------------------------------------//

struct CorrelationPoint
{
    double lambda1;
    double lambda2;  //!< NaN in a gap
    bool gap;
    bool multiple_roots;
};

inline std::vector<CorrelationPoint> correlation_curve(EmissionConfig const& cfg,
                                                       GridAxis lambda1, SearchWindow window = {},
                                                       ScanOptions scan = {})
{
    std::vector<CorrelationPoint> out;
    for (int i = 0; i < lambda1.count; ++i)
    {
        double const l1 = lambda1.at(i);
        CorrelationPoint p{l1, std::nan(""), true, false};
        try
        {
            auto const sol = solve_partner(l1, 0, constants::pi, cfg.kin, cfg.material,
                                           {window.lo, window.hi}, scan);
            p = {l1, sol.lambda2, false, sol.multiple_roots};
        }
        catch (Error const&)
        {
        }
        out.push_back(p);
    }
    return out;
}

//---------------------------------------------------------------------------//
// Total pair count in a collection cone
//---------------------------------------------------------------------------//

struct TotalCountOptions
{
    double rel_tol{1e-3};
    std::size_t max_evals{1000000};  //!< per integration axis
    unsigned max_depth{15};
    ScanOptions partner_scan{24, true};
    WavelengthBracket partner_bracket{0.1, 30.0};  //!< photon 2 search range [um]
};

struct TotalCount
{
    double pairs_per_pulse;
    double half_angle;  //!< rad
    double length_m;
    double error_estimate;
    std::size_t evaluations;
};

namespace detail
{
//! One adaptive 1D integration with its own evaluation budget.
template<class F>
double adaptive(F&& f, double a, double b, TotalCountOptions const& o, double* error,
                std::size_t* total_evals, char const* axis)
{
    std::size_t count = 0;
    auto counted = [&](double x) {
        if (++count > o.max_evals)
            throw Error(ErrorCode::QuadratureNotConverged,
                        std::string("evaluation budget exhausted on the ") + axis + " axis");
        return f(x);
    };
    double err = 0;
    double const value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        counted, a, b, o.max_depth, o.rel_tol, &err);
    if (error)
        *error = err;
    if (total_evals)
        *total_evals += count;
    return value;
}
}  // namespace detail

/*!
 * Pairs per pulse with photon 1 within \c half_angle of +x and photon 2
 * within \c half_angle of -x.
 *
 * Integrates the on-shell density over lambda1, theta1 and theta2 with the
 * photons in a common plane on opposite sides of the axis; lambda2 is fixed by
 * the constraint. The theta2 axis is split where the transverse momenta
 * cancel, which is where the profile factor peaks.
 */
inline TotalCount total_count(EmissionConfig const& cfg, double half_angle, SearchWindow window,
                              TotalCountOptions opts = {})
{
    validate(cfg);
    if (!(half_angle > 0) || half_angle > constants::pi / 2)
        throw Error(ErrorCode::InvalidArgument, "cone half-angle must be in (0, pi/2]");
    if (!(window.lo > 0) || !(window.hi > window.lo))
        throw Error(ErrorCode::InvalidArgument, "lambda window must satisfy 0 < lo < hi");

    std::size_t evals = 0;
    WavelengthBracket const bracket = opts.partner_bracket;
    double const pi = constants::pi;

    auto point = [&](double l1, double t1, double t2) {
        try
        {
            auto const sol = solve_partner(l1, t1, t2, cfg.kin, cfg.material, bracket,
                                           opts.partner_scan);
            auto const a = mode_state(cfg.material, {l1, t1, 0});
            auto const b = mode_state(cfg.material, {sol.lambda2, t2, pi});
            double const d = on_shell_density(a, b, cfg);
            return std::isfinite(d) ? d : 0.0;
        }
        catch (Error const& e)
        {
            if (e.code() == ErrorCode::QuadratureNotConverged)
                throw;
            return 0.0;
        }
    };

    auto over_theta2 = [&](double l1, double t1) {
        double lo = pi - half_angle;
        double split = pi;
        try
        {
            double const k1 = mode_state(cfg.material, {l1, 0, 0}).k;
            auto const sol = solve_partner(l1, 0, pi, cfg.kin, cfg.material, bracket,
                                           opts.partner_scan);
            double const k2 = mode_state(cfg.material, {sol.lambda2, pi, 0}).k;
            double const s = k1 * std::sin(t1) / k2;
            if (s < 1)
                split = pi - std::asin(s);
        }
        catch (Error const&)
        {
            return 0.0;
        }
        auto g = [&](double t2) { return point(l1, t1, t2); };
        double sum = 0;
        if (split > lo && split < pi)
        {
            sum += detail::adaptive(g, lo, split, opts, nullptr, &evals, "theta2");
            sum += detail::adaptive(g, split, pi, opts, nullptr, &evals, "theta2");
        }
        else
        {
            sum += detail::adaptive(g, lo, pi, opts, nullptr, &evals, "theta2");
        }
        return sum;
    };

    auto over_theta1 = [&](double l1) {
        return detail::adaptive([&](double t1) { return over_theta2(l1, t1); }, 0.0, half_angle,
                                opts, nullptr, nullptr, "theta1");
    };

    // Split the lambda1 axis at the collinear maximum so the peak is resolved
    std::vector<double> edges{window.lo};
    try
    {
        auto const m = find_maximum(cfg, window, {60, 30, opts.partner_scan});
        if (m.lambda1 > window.lo && m.lambda1 < window.hi)
            edges.push_back(m.lambda1);
    }
    catch (Error const&)
    {
    }
    edges.push_back(window.hi);

    double total = 0;
    double error = 0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    {
        double err = 0;
        total += detail::adaptive(over_theta1, edges[i], edges[i + 1], opts, &err, nullptr,
                                  "lambda1");
        error += err;
    }
    double const rel = total > 0 ? error / total : 0.0;
    if (rel > 10 * opts.rel_tol)
        throw Error(ErrorCode::QuadratureNotConverged,
                    "relative error estimate " + std::to_string(rel) + " exceeds tolerance");
    return {total, half_angle, cfg.length_m, error, evals};
}

inline nlohmann::json to_json(TotalCount const& t)
{
    return {{"pairs_per_pulse", t.pairs_per_pulse},
            {"cone_half_angle_rad", t.half_angle},
            {"L_m", t.length_m},
            {"error_estimate", t.error_estimate},
            {"evaluations", t.evaluations}};
}

//---------------------------------------------------------------------------//
// Fast light
//---------------------------------------------------------------------------//

struct FastLightStudy
{
    PairDensityGrid base;
    PairDensityGrid modified;
    LorentzianResonance resonance;
    double enhancement;
    int peak_count;
    std::vector<double> peak_lambda1;
};

/*!
 * Local maxima above half the global maximum of the ridge profile.
 *
 * The profile is smoothed over three neighbouring samples first; flagged
 * samples count as zero.
 */
inline std::vector<std::size_t> ridge_peaks(std::vector<RidgeSample> const& ridge)
{
    std::size_t const n = ridge.size();
    std::vector<double> raw(n), s(n);
    for (std::size_t i = 0; i < n; ++i)
        raw[i] = ridge[i].cell.flag == CellFlag::Ok ? ridge[i].cell.density : 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        double sum = raw[i];
        int cnt = 1;
        if (i > 0)
            sum += raw[i - 1], ++cnt;
        if (i + 1 < n)
            sum += raw[i + 1], ++cnt;
        s[i] = sum / cnt;
    }
    double const top = n ? *std::max_element(s.begin(), s.end()) : 0.0;
    std::vector<std::size_t> peaks;
    if (!(top > 0))
        return peaks;
    for (std::size_t i = 0; i < n; ++i)
    {
        bool const up = i == 0 || s[i] > s[i - 1];
        bool const down = i + 1 == n || s[i] >= s[i + 1];
        if (up && down && s[i] >= 0.5 * top)
            peaks.push_back(i);
    }
    return peaks;
}

inline FastLightStudy fast_light_study(EmissionConfig const& cfg, LorentzianResonance resonance,
                                       GridOptions const& grid)
{
    FastLightStudy out;
    out.resonance = resonance;
    out.base = collinear_grid(cfg, grid);
    auto modified = cfg;
    modified.material = cfg.material.with_resonance(resonance);
    out.modified = collinear_grid(modified, grid);
    double const b = out.base.maximum().density;
    double const m = out.modified.maximum().density;
    if (!(b > 0))
        throw Error(ErrorCode::NoEmission, "base medium does not emit in the grid window");
    out.enhancement = m / b;
    for (auto i : ridge_peaks(out.modified.ridge))
        out.peak_lambda1.push_back(out.modified.ridge[i].lambda1);
    out.peak_count = static_cast<int>(out.peak_lambda1.size());
    return out;
}

/*!
 * Fast-light resonance placed at the base emission maximum.
 *
 * The steepest slope of the Lorentzian sits at the maximum of the base
 * ridge, where it pulls the group index down to \c target_group_index.
 */
inline LorentzianResonance tune_at_maximum(EmissionConfig const& cfg, double width,
                                           double target_group_index, SearchWindow window = {})
{
    auto const m = find_maximum(cfg, window);
    return tune_fast_light_resonance(cfg.material, m.lambda1, width, target_group_index);
}

inline nlohmann::json to_json(FastLightStudy const& s)
{
    return {{"resonance", to_json(s.resonance)},
            {"enhancement", s.enhancement},
            {"peak_count", s.peak_count},
            {"peak_lambda1_um", s.peak_lambda1},
            {"base_maximum", s.base.maximum().density},
            {"modified_maximum", s.modified.maximum().density}};
}

//---------------------------------------------------------------------------//
// Calibration
//---------------------------------------------------------------------------//

//! Constant that makes the maximum of \c cfg equal \c reference_density.
inline double calibrate(EmissionConfig cfg, double reference_density, SearchWindow window = {})
{
    cfg.calibration = 1.0;
    auto const m = find_maximum(cfg, window);
    return reference_density / m.density;
}

}  // namespace vacpair
