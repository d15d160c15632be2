// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "vacpair/analysis.hpp"
#include "vacpair/materials.hpp"

using namespace vacpair;

namespace
{
constexpr double pi = constants::pi;

struct Report
{
    int failures{0};

    void line(int id, char const* name, bool ok, std::string const& detail)
    {
        std::printf("%s %2d %-28s %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
        std::fflush(stdout);
        failures += !ok;
    }
};

std::string fmt(char const* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct TableRow
{
    double sigma, beta, lambda1, lambda2, density;
};

std::vector<TableRow> const table = {
    {1, 2, 2.51, 4.98, 6.13e-7},  {1, 5, 1.26, 1.66, 9.35e-5},  {1, 10, 0.68, 0.78, 2.91e-3},
    {1, 20, 0.36, 0.39, 8.19e-2}, {2, 2, 3.93, 7.02, 4.14e-8},  {2, 5, 2.49, 3.26, 4.28e-5},
    {2, 10, 1.35, 1.54, 1.47e-3}, {2, 20, 0.70, 0.75, 4.63e-2},
};

EmissionConfig silica(double beta, double sigma, double calibration = 1.0)
{
    EmissionConfig c{fused_silica(), GaussianProfile{1e-3, sigma}, {beta}};
    c.length_m = 0.05;
    c.calibration = calibration;
    return c;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool no_emission(auto&& f)
{
    try
    {
        f();
    }
    catch (Error const& e)
    {
        return e.code() == ErrorCode::NoEmission || e.code() == ErrorCode::NoSignChange
               || e.code() == ErrorCode::Subluminal;
    }
    return false;
}

// Five-point central stencil
double central_difference(DispersionModel const& m, double lambda, double h = 1e-4)
{
    auto n = [&](double x) { return refractive_index(m, lambda + x); };
    return (8 * (n(h) - n(-h)) - (n(2 * h) - n(-2 * h))) / (12 * h);
}

bool grid_nonnegative(PairDensityGrid const& g)
{
    for (auto const& c : g.cells)
        if (!(c.density >= 0))
            return false;
    for (auto const& r : g.ridge)
        if (!(r.cell.density >= 0))
            return false;
    return true;
}

//---------------------------------------------------------------------------//
double calibration_constant = 1.0;

void wavelengths(Report& rep)
{
    auto const t0 = std::chrono::steady_clock::now();
    double worst = 0;
    std::string detail;
    for (auto const& r : table)
    {
        auto const m = find_maximum(silica(r.beta, r.sigma));
        double const e1 = std::abs(m.lambda1 / r.lambda1 - 1);
        double const e2 = std::abs(m.lambda2 / r.lambda2 - 1);
        worst = std::max({worst, e1, e2});
        detail += fmt("[s%g b%g %.3f/%.3f] ", r.sigma, r.beta, m.lambda1, m.lambda2);
    }
    double const t = seconds_since(t0);
    rep.line(1, "peak-wavelengths", worst <= 0.1 && t < 300,
             fmt("worst deviation %.1f%%, %.2f s; ", 100 * worst, t) + detail);
}

void densities(Report& rep)
{
    calibration_constant = calibrate(silica(10, 1), 2.91e-3);
    double worst = 1;
    std::string detail;
    for (auto const& r : table)
    {
        auto const m = find_maximum(silica(r.beta, r.sigma, calibration_constant));
        double const f = std::max(m.density / r.density, r.density / m.density);
        worst = std::max(worst, f);
        detail += fmt("[s%g b%g %.3g x%.2f] ", r.sigma, r.beta, m.density, f);
    }
    bool const in_range = calibration_constant >= 0.1 && calibration_constant <= 10;
    rep.line(2, "peak-densities", worst <= 3 && in_range,
             fmt("calibration %.6g, worst factor %.2f; ", calibration_constant, worst) + detail);
}

void trends(Report& rep)
{
    std::vector<double> const betas{2, 3, 4, 5, 6, 7, 8, 9, 10, 15, 20};
    auto const s1 = beta_sweep(silica(1, 1, calibration_constant), betas);
    auto const s2 = beta_sweep(silica(1, 2, calibration_constant), betas);
    bool below = true;
    std::string detail;
    for (std::size_t i = 0; i < betas.size(); ++i)
    {
        if (!s1.rows[i].maximum || !s2.rows[i].maximum)
        {
            below = false;
            continue;
        }
        double const a = s1.rows[i].maximum->density, b = s2.rows[i].maximum->density;
        if (!(b < a))
        {
            below = false;
            detail += fmt("[b%g sigma2/sigma1 %.3f] ", betas[i], b / a);
        }
    }
    bool const ok = s1.wavelengths_decreasing && s1.density_increasing
                    && s2.wavelengths_decreasing && s2.density_increasing && below;
    rep.line(3, "peak-trends", ok,
             fmt("sigma1 wl/N %d/%d, sigma2 wl/N %d/%d, sigma2 below sigma1 %d ",
                 s1.wavelengths_decreasing, s1.density_increasing, s2.wavelengths_decreasing,
                 s2.density_increasing, below)
                 + detail);
}

void nondispersive(Report& rep)
{
    double const n0 = 1.45;
    double worst_density = 0, worst_partner = 0;
    for (int ib = 0; ib < 20; ++ib)
    {
        double const beta = 1.0 + ib;
        EmissionConfig const cfg{make_constant(n0), GaussianProfile{1e-3, 1.0}, {beta}};
        for (int il = 0; il < 20; ++il)
        {
            double const l1 = 0.25 + 0.25 * il;
            double const l2 = l1 * (beta * n0 + 1) / (beta * n0 - 1);
            auto const sol = solve_partner(l1, 0, pi, cfg.kin, cfg.material, {0.05, 400});
            worst_partner = std::max(worst_partner, std::abs(sol.lambda2 / l2 - 1));
            PhotonMode const a{l1, 0, 0}, b{l2, pi, 0};
            double const ref = density_nondispersive(a, b, n0, cfg);
            worst_density = std::max(worst_density, std::abs(density_gaussian(a, b, cfg) / ref - 1));
        }
    }
    rep.line(4, "nondispersive-oracle", worst_density < 1e-9 && worst_partner < 1e-10,
             fmt("20x20 grid: density rel err %.2e, partner rel err %.2e", worst_density,
                 worst_partner));
}

void threshold(Report& rep)
{
    // Silica below the 9.94 um pole, and a constant-index medium
    SearchWindow const w{0.2, 8.0};
    auto const silica_cfg = silica(0.5, 1);
    EmissionConfig const constant_cfg{make_constant(1.45), GaussianProfile{1e-3, 1.0}, {0.5}};
    bool ok = true;
    double max_beta_n = 0;
    for (auto const* cfg : {&silica_cfg, &constant_cfg})
    {
        for (int i = 0; i <= 400; ++i)
        {
            double const l = w.lo * std::pow(w.hi / w.lo, i / 400.0);
            try
            {
                max_beta_n = std::max(max_beta_n, cfg->kin.beta * refractive_index(cfg->material, l));
            }
            catch (Error const&)
            {
            }
        }
        ok = ok && no_emission([&] { find_maximum(*cfg, w); });
        ok = ok && no_emission([&] { solve_partner(0.5, 0, pi, cfg->kin, cfg->material, {w.lo, w.hi}); });
        auto const g = collinear_grid(*cfg, {{w.lo, w.hi, 60}, {w.lo, w.hi, 60}, 1});
        for (auto const& c : g.cells)
            ok = ok && c.density == 0;
        for (auto const& r : g.ridge)
            ok = ok && r.cell.density == 0;
        ok = ok && g.maximum().density == 0;
        ok = ok && !beta_sweep(*cfg, {0.5}, w).rows[0].maximum;
        TotalCountOptions o;
        o.rel_tol = 1e-2;
        ok = ok && total_count(*cfg, pi / 6, w, o).pairs_per_pulse == 0;
        for (auto const& p : correlation_curve(*cfg, {w.lo, w.hi, 30}, w))
            ok = ok && p.gap;
    }
    rep.line(5, "threshold", ok && max_beta_n < 1,
             fmt("beta=0.5, window [%g, %g] um, max beta*n %.3f: maximum, partner, grid, sweep, "
                 "total, correlation report no emission",
                 w.lo, w.hi, max_beta_n));
}

void three_sigma(Report& rep)
{
    double const n0 = 1.45;
    bool ok = true;
    std::string detail;
    for (double sigma : {1.0, 2.0})
        for (double beta : {20.0, 100.0})
        {
            EmissionConfig const cfg{make_constant(n0), GaussianProfile{1e-3, sigma}, {beta}};
            double const r = find_maximum(cfg, {0.01, 50}).lambda1 / sigma;
            ok = ok && r >= 2.7 && r <= 3.3;
            detail += fmt("[s%g b%g lambda1max/sigma %.4f] ", sigma, beta, r);
        }
    rep.line(6, "three-sigma-peak", ok, detail);
}

void totals(Report& rep)
{
    auto g = silica(20, 1, calibration_constant);
    auto t = g;
    t.profile = TanhProfile{1e-3, 1.1, 1.0, 1.0};
    auto const t0 = std::chrono::steady_clock::now();
    auto const ng = total_count(g, pi / 6, {});
    auto const nt = total_count(t, pi / 6, {});
    double const ratio = ng.pairs_per_pulse / nt.pairs_per_pulse;
    auto within3 = [](double x, double ref) { return x >= ref / 3 && x <= ref * 3; };
    bool const ok = within3(ng.pairs_per_pulse, 3e-4) && within3(nt.pairs_per_pulse, 1.5e-4)
                    && ratio >= 1.5 && ratio <= 3;
    rep.line(7, "total-counts", ok,
             fmt("gaussian %.4g (+-%.1g), tanh %.4g (+-%.1g), ratio %.3f, %.1f s",
                 ng.pairs_per_pulse, ng.error_estimate, nt.pairs_per_pulse, nt.error_estimate,
                 ratio, seconds_since(t0)));
}

void fast_light(Report& rep)
{
    auto const cfg = silica(20, 1, calibration_constant);
    GridOptions const grid{{0.3, 0.45, 601}, {0.3, 0.5, 41}, 1};
    auto const r = tune_at_maximum(cfg, 0.005, 0.5);
    auto const s = fast_light_study(cfg, r, grid);
    auto const zero = fast_light_study(cfg, {r.center, 0.0, r.width}, grid);
    bool const ok = s.enhancement >= 5 && s.peak_count == 2 && zero.enhancement == 1.0;
    std::string peaks;
    for (double p : s.peak_lambda1)
        peaks += fmt(" %.4f", p);
    rep.line(8, "fast-light", ok,
             fmt("enhancement %.3f, peaks %d at%s um, zero-amplitude enhancement %.17g",
                 s.enhancement, s.peak_count, peaks.c_str(), zero.enhancement));
}

void hygiene(Report& rep)
{
    std::mt19937_64 rng(2024);
    struct Case
    {
        char const* name;
        DispersionModel model;
        double lo, hi;
    };
    std::vector<Case> const cases{
        {"fused_silica", fused_silica(), 0.21, 6.7},
        {"silicon", silicon(), 1.3, 10.0},
        {"silica+resonance", fused_silica().with_resonance({0.5, 0.01, 0.02}), 0.25, 5.0},
    };
    double worst_fd = 0;
    for (auto const& c : cases)
    {
        std::uniform_real_distribution<double> d(c.lo, c.hi);
        for (int i = 0; i < 50; ++i)
        {
            double const l = d(rng);
            double const e = std::abs(index_derivative(c.model, l) / central_difference(c.model, l) - 1);
            worst_fd = std::max(worst_fd, e);
        }
    }

    bool nonneg = true;
    for (double beta : {2.0, 5.0, 20.0})
    {
        auto const g = collinear_grid(silica(beta, 1), {{0.2, 4, 80}, {0.2, 8, 80}, 1});
        nonneg = nonneg && grid_nonnegative(g);
    }
    auto tc = silica(10, 1);
    tc.profile = TanhProfile{1e-3, 1.1, 1.0, 1.0};
    nonneg = nonneg && grid_nonnegative(collinear_grid(tc, {{0.3, 2, 60}, {0.3, 3, 60}, 1}));

    GridOptions o{{0.3, 1.5, 50}, {0.3, 2.0, 50}, 1};
    auto const cfg = silica(10, 1, calibration_constant);
    auto const a = collinear_grid(cfg, o);
    o.threads = 3;
    auto const b = collinear_grid(cfg, o);
    std::vector<double> const betas{2, 5, 10, 20};
    bool const identical = grid_csv(a) == grid_csv(b) && ridge_csv(a) == ridge_csv(b)
                           && dump_json(to_json(a)) == dump_json(to_json(b))
                           && sweep_csv(beta_sweep(cfg, betas, {}, {}, 1))
                                  == sweep_csv(beta_sweep(cfg, betas, {}, {}, 2));
    rep.line(9, "numerical-hygiene", worst_fd < 1e-6 && nonneg && identical,
             fmt("fd rel err %.2e over 3x50 wavelengths, grids nonnegative %d, reruns identical %d",
                 worst_fd, nonneg, identical));
}

void scaling(Report& rep)
{
    auto const g1 = silica(10, 1);
    double const l1 = 0.68;
    double const l2 = solve_partner(l1, 0, pi, g1.kin, g1.material, {0.2, 8}).lambda2;
    PhotonMode const a{l1, 0, 0}, b{l2, pi, 0};
    double const base = density_gaussian(a, b, g1);

    auto g_eta = g1;
    g_eta.profile = GaussianProfile{3e-3, 1.0};
    bool const eta_exact = density_gaussian(a, b, g_eta) == 9 * base;

    auto const g2 = silica(10, 2);
    auto const s1 = mode_state(g1.material, a), s2 = mode_state(g1.material, b);
    double const q = s1.k - s2.k;
    double const s_m = 1e-6;
    double const expect = 64 * std::exp(-3 * s_m * s_m * q * q);
    double const sigma_err = std::abs(density_gaussian(a, b, g2) / base / expect - 1);

    double ng_err = 0;
    double const kernel = density_kernel(s1, s2, g1);
    for (double f : {0.5, 2.0, 3.0})
    {
        auto scaled = s1;
        scaled.n_g *= f;
        ng_err = std::max(ng_err, std::abs(density_kernel(scaled, s2, g1) * f * f / kernel - 1));
    }
    rep.line(10, "scaling-laws", eta_exact && sigma_err < 1e-9 && ng_err < 1e-12,
             fmt("eta^2 exact %d, sigma->2sigma rel err %.2e, 1/ng^2 rel err %.2e", eta_exact,
                 sigma_err, ng_err));
}
}  // namespace

int main()
{
    Report rep;
    auto guarded = [&](int id, char const* name, void (*f)(Report&)) {
        try
        {
            f(rep);
        }
        catch (std::exception const& e)
        {
            rep.line(id, name, false, std::string("exception: ") + e.what());
        }
    };
    guarded(1, "peak-wavelengths", wavelengths);
    guarded(2, "peak-densities", densities);
    guarded(3, "peak-trends", trends);
    guarded(4, "nondispersive-oracle", nondispersive);
    guarded(5, "threshold", threshold);
    guarded(6, "three-sigma-peak", three_sigma);
    guarded(7, "total-counts", totals);
    guarded(8, "fast-light", fast_light);
    guarded(9, "numerical-hygiene", hygiene);
    guarded(10, "scaling-laws", scaling);
    std::printf("%d of 10 criteria failed\n", rep.failures);
    return rep.failures ? 1 : 0;
}
