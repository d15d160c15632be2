#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "vacpair/emission.hpp"
#include "vacpair/materials.hpp"

using namespace vacpair;

namespace
{
constexpr double pi = constants::pi;

// oracle.py
constexpr double nondispersive_density = 3.09189201100496e-7;
constexpr double silica_b20_lambda2 = 0.3844094976214363;
constexpr double silica_b20_tanh = 0.0020469635335518207;
constexpr double silica_b20_gauss = 0.0052917440981100185;
constexpr double silica_b20_gauss_onshell = 0.0051231637772780378;

EmissionConfig gaussian(DispersionModel m, double beta, double sigma = 1.0, double eta = 1e-3)
{
    return {std::move(m), GaussianProfile{eta, sigma}, {beta}};
}

EmissionConfig tanh_cfg(DispersionModel m, double beta, double eta = 1e-3)
{
    return {std::move(m), TanhProfile{eta, 1.1, 1.0, 1.0}, {beta}};
}

double partner(EmissionConfig const& c, double l1)
{
    return solve_partner(l1, 0, pi, c.kin, c.material, {0.2, 8.0}).lambda2;
}

double nd_partner(double l1, double beta, double n0)
{
    return l1 * (beta * n0 + 1) / (beta * n0 - 1);
}

ErrorCode code_of(auto&& f)
{
    try
    {
        f();
    }
    catch (Error const& e)
    {
        return e.code();
    }
    return ErrorCode::InvalidArgument;
}
}  // namespace

TEST(Emission, ZeroAmplitude)
{
    auto const g = gaussian(make_constant(1.45), 20, 1.0, 0.0);
    PhotonMode const a{0.5, 0, 0}, b{nd_partner(0.5, 20, 1.45), pi, 0};
    EXPECT_EQ(density_nondispersive(a, b, 1.45, g), 0.0);
    EXPECT_EQ(density_gaussian(a, b, g), 0.0);
    auto const t = tanh_cfg(fused_silica(), 20, 0.0);
    EXPECT_EQ(density_tanh({0.36, 0, 0}, {partner(t, 0.36), pi, 0}, t), 0.0);
}

TEST(Emission, NondispersiveOracle)
{
    auto const cfg = gaussian(make_constant(1.45), 20);
    double const l2 = nd_partner(3.0, 20, 1.45);
    double const d = density_nondispersive({3.0, 0, 0}, {l2, pi, 0}, 1.45, cfg);
    EXPECT_NEAR(d / nondispersive_density, 1.0, 1e-9);
}

TEST(Emission, NondispersiveExchangeSymmetry)
{
    auto const cfg = gaussian(make_constant(1.45), 6);
    PhotonMode const a{0.4, 0, 0}, b{nd_partner(0.4, 6, 1.45), pi, 0};
    double const x = density_nondispersive(a, b, 1.45, cfg);
    double const y = density_nondispersive(b, a, 1.45, cfg);
    EXPECT_NEAR(x / y, 1.0, 1e-14);
}

TEST(Emission, ReducesToNondispersive)
{
    for (double n0 : {1.2, 1.45})
        for (double beta : {2.0, 20.0})
        {
            auto const cfg = gaussian(make_constant(n0), beta);
            for (int i = 0; i < 20; ++i)
            {
                double const l1 = 0.2 + 0.15 * i;
                PhotonMode const a{l1, 0, 0}, b{nd_partner(l1, beta, n0), pi, 0};
                double const dg = density_gaussian(a, b, cfg);
                double const dn = density_nondispersive(a, b, n0, cfg);
                EXPECT_NEAR(dg / dn, 1.0, 1e-9);
            }
        }
}

TEST(Emission, FusedSilicaOracle)
{
    auto const g = gaussian(fused_silica(), 20);
    double const l2 = partner(g, 0.36);
    EXPECT_NEAR(l2 / silica_b20_lambda2, 1.0, 1e-10);
    PhotonMode const a{0.36, 0, 0}, b{l2, pi, 0};
    EXPECT_NEAR(density_gaussian(a, b, g) / silica_b20_gauss, 1.0, 1e-8);
    EXPECT_NEAR(on_shell_density(a, b, g) / silica_b20_gauss_onshell, 1.0, 1e-8);
    auto const t = tanh_cfg(fused_silica(), 20);
    EXPECT_NEAR(density_tanh(a, b, t) / silica_b20_tanh, 1.0, 1e-8);
}

TEST(Emission, ExchangeSymmetry)
{
    auto const g = gaussian(fused_silica(), 8);
    auto const t = tanh_cfg(fused_silica(), 8);
    for (double l1 : {0.5, 0.8, 1.2})
    {
        for (double t2 : {pi, 2.9})
        {
            double const l2 = solve_partner(l1, 0.05, t2, g.kin, g.material, {0.2, 8}).lambda2;
            PhotonMode const a{l1, 0.05, 0}, b{l2, t2, pi};
            EXPECT_NEAR(density_gaussian(a, b, g) / density_gaussian(b, a, g), 1.0, 1e-13);
            EXPECT_NEAR(density_tanh(a, b, t) / density_tanh(b, a, t), 1.0, 1e-13);
        }
    }
}

TEST(Emission, TanhToGaussianRatioIsOrderOne)
{
    auto const g = gaussian(fused_silica(), 20);
    auto const t = tanh_cfg(fused_silica(), 20);
    for (double l1 : {0.3, 0.36, 0.45})
    {
        PhotonMode const a{l1, 0, 0}, b{partner(g, l1), pi, 0};
        double const r = density_tanh(a, b, t) / density_gaussian(a, b, g);
        EXPECT_TRUE(std::isfinite(r));
        EXPECT_GT(r, 0.1);
        EXPECT_LT(r, 10.0);
    }
}

TEST(Emission, AmplitudeSquaredScaling)
{
    auto const g1 = gaussian(fused_silica(), 10, 1.0, 1e-3);
    auto const g2 = gaussian(fused_silica(), 10, 1.0, 2e-3);
    PhotonMode const a{0.68, 0, 0}, b{partner(g1, 0.68), pi, 0};
    EXPECT_EQ(density_gaussian(a, b, g2), 4 * density_gaussian(a, b, g1));
}

TEST(Emission, SigmaScaling)
{
    auto const g1 = gaussian(fused_silica(), 10, 1.0);
    auto const g2 = gaussian(fused_silica(), 10, 2.0);
    PhotonMode const a{0.68, 0, 0}, b{partner(g1, 0.68), pi, 0};
    auto const s1 = mode_state(g1.material, a), s2 = mode_state(g1.material, b);
    double const q = s1.k - s2.k;
    double const s = 1e-6;
    double const expect = 64 * std::exp(-3 * s * s * q * q);
    EXPECT_NEAR(density_gaussian(a, b, g2) / density_gaussian(a, b, g1) / expect, 1.0, 1e-9);
}

TEST(Emission, GroupIndexScaling)
{
    auto const g = gaussian(fused_silica(), 10);
    auto a = mode_state(g.material, {0.68, 0, 0});
    auto const b = mode_state(g.material, {partner(g, 0.68), pi, 0});
    double const base = density_kernel(a, b, g);
    for (double f : {1.5, 3.0})
    {
        auto scaled = a;
        scaled.n_g *= f;
        EXPECT_NEAR(density_kernel(scaled, b, g) * f * f / base, 1.0, 1e-14);
    }
}

TEST(Emission, LengthAndCalibrationAreLinear)
{
    auto g = gaussian(fused_silica(), 10);
    PhotonMode const a{0.68, 0, 0}, b{partner(g, 0.68), pi, 0};
    double const d = density_gaussian(a, b, g);
    g.length_m *= 2;
    g.calibration = 4;
    EXPECT_NEAR(density_gaussian(a, b, g) / (8 * d), 1.0, 1e-15);
}

TEST(Emission, Errors)
{
    auto const g = gaussian(fused_silica(), 10);
    EXPECT_EQ(code_of([&] { density_gaussian({0.68, 0, 0}, {0.9, pi, 0}, g); }),
              ErrorCode::ConstraintViolated);
    EXPECT_EQ(code_of([&] { density_tanh({0.68, 0, 0}, {0.78, pi, 0}, g); }),
              ErrorCode::InvalidArgument);

    auto const t = tanh_cfg(fused_silica(), 10);
    auto const a = mode_state(t.material, {0.7, pi / 2, 0});
    auto const b = mode_state(t.material, {0.9, pi / 2, pi});
    EXPECT_EQ(code_of([&] { density_kernel(a, b, t); }), ErrorCode::CschSingular);

    auto const r = tune_fast_light_resonance(fused_silica(), 0.5, 0.005, 0.0);
    auto const fl = gaussian(fused_silica().with_resonance(r), 10);
    auto const s = mode_state(fl.material, {0.5, 0, 0});
    EXPECT_EQ(code_of([&] { density_kernel(s, b, fl); }), ErrorCode::GroupIndexSingular);

    auto bad = g;
    bad.length_m = 0;
    EXPECT_EQ(code_of([&] { validate(bad); }), ErrorCode::InvalidArgument);
}

TEST(Grid, PositiveAndFlagged)
{
    auto const g = gaussian(fused_silica(), 20);
    auto const grid = collinear_grid(g, {{0.2, 0.8, 25}, {0.2, 1.0, 25}, 1});
    int ok = 0, forbidden = 0;
    for (auto const& c : grid.cells)
    {
        EXPECT_GE(c.density, 0.0);
        EXPECT_TRUE(std::isfinite(c.density));
        ok += c.flag == CellFlag::Ok;
        forbidden += c.flag == CellFlag::Forbidden;
        if (c.flag != CellFlag::Ok)
            EXPECT_EQ(c.density, 0.0);
    }
    EXPECT_GT(ok, 0);
    EXPECT_GT(forbidden, 0);
    for (auto const& r : grid.ridge)
        EXPECT_GE(r.cell.density, 0.0);
}

TEST(Grid, MaximumRegionBetaTwenty)
{
    auto const g = gaussian(fused_silica(), 20);
    auto const grid = collinear_grid(g, {{0.2, 0.8, 61}, {0.2, 1.0, 81}, 1});
    auto const m = grid.maximum();
    EXPECT_GE(m.lambda1, 0.3);
    EXPECT_LE(m.lambda1, 0.45);
    EXPECT_GE(m.lambda2, 0.3);
    EXPECT_LE(m.lambda2, 0.45);
}

TEST(Grid, MaximumStableUnderRefinement)
{
    auto const g = gaussian(fused_silica(), 10);
    GridOptions coarse{{0.3, 1.2, 46}, {0.3, 1.5, 41}, 1};
    GridOptions fine{{0.3, 1.2, 91}, {0.3, 1.5, 81}, 1};
    auto const a = collinear_grid(g, coarse).maximum();
    auto const b = collinear_grid(g, fine).maximum();
    double const cell = (coarse.lambda1.hi - coarse.lambda1.lo) / (coarse.lambda1.count - 1);
    EXPECT_LE(std::abs(a.lambda1 - b.lambda1), cell);
}

TEST(Grid, ThreadCountDoesNotChangeOutput)
{
    auto const g = gaussian(fused_silica(), 10);
    GridOptions o{{0.3, 1.2, 31}, {0.3, 1.5, 21}, 1};
    auto const one = collinear_grid(g, o);
    o.threads = 3;
    auto const three = collinear_grid(g, o);
    EXPECT_EQ(grid_csv(one), grid_csv(three));
    EXPECT_EQ(ridge_csv(one), ridge_csv(three));
    EXPECT_EQ(dump_json(to_json(one)), dump_json(to_json(three)));
}

TEST(Grid, Serialization)
{
    auto const g = gaussian(fused_silica(), 10);
    auto const grid = collinear_grid(g, {{0.5, 0.9, 3}, {0.6, 1.0, 2}, 1});
    auto const csv = grid_csv(grid);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "lambda1_um,lambda2_um,density,flag");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
    auto const j = to_json(grid);
    EXPECT_EQ(j.at("emission_config").at("beta"), 10.0);
    EXPECT_TRUE(model_from_json(j.at("emission_config").at("material")) == fused_silica());
    EXPECT_EQ(j.at("density").size(), 3u);
}

TEST(Grid, SubluminalGridIsEmpty)
{
    auto const g = gaussian(fused_silica(), 0.5);
    auto const grid = collinear_grid(g, {{0.2, 4.0, 20}, {0.2, 8.0, 20}, 1});
    for (auto const& c : grid.cells)
        EXPECT_EQ(c.density, 0.0);
    for (auto const& r : grid.ridge)
        EXPECT_EQ(r.cell.flag, CellFlag::Forbidden);
}
