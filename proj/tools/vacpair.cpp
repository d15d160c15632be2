// Command-line front end for the vacpair library.

#include <filesystem>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"

#include "vacpair/analysis.hpp"
#include "vacpair/config.hpp"
#include "vacpair/dispersion.hpp"
#include "vacpair/emission.hpp"
#include "vacpair/io.hpp"
#include "vacpair/materials.hpp"

namespace fs = std::filesystem;
using namespace vacpair;

namespace
{
struct Common
{
    std::string config;
    std::string out;
    unsigned threads{1};
    bool verbose{false};
};

//! Files are collected in memory and written only after a command succeeds.
using Bundle = std::map<std::string, std::string>;

void write_bundle(Bundle const& files, std::string const& out)
{
    if (out.empty())
    {
        for (auto const& [name, text] : files)
            std::cout << text;
        return;
    }
    fs::create_directories(out);
    for (auto const& [name, text] : files)
        write_text(fs::path(out) / name, text);
}

nlohmann::json envelope(RunConfig const& rc, nlohmann::json result)
{
    return {{"run_config", rc.source}, {"result", std::move(result)}};
}

int warn_holes(PairDensityGrid const& g, char const* label)
{
    int holes = 0;
    for (auto const& c : g.cells)
        holes += c.flag == CellFlag::Hole;
    for (auto const& r : g.ridge)
        holes += r.cell.flag == CellFlag::Hole;
    if (holes)
        std::cerr << "warning: " << holes << " flagged cells in " << label << " grid\n";
    return holes;
}

std::string material_table(DispersionModel const& model, GridAxis axis)
{
    std::string out = "lambda_um,n,dn_dlambda_per_um,n_g,regime\n";
    for (int i = 0; i < axis.count; ++i)
    {
        auto const s = group_index(model, axis.at(i));
        out += format_double(s.wavelength) + "," + format_double(s.n) + ","
               + format_double(s.dn_dlambda) + "," + format_double(s.n_g) + ","
               + std::string(to_string(s.regime)) + "\n";
    }
    return out;
}

RunConfig require_config(Common const& c)
{
    if (c.config.empty())
        throw Error(ErrorCode::ConfigError, "--config is required for this command");
    return load_run_config(c.config);
}

Bundle cmd_material(Common const& c, std::string const& name, GridAxis axis, bool axis_given)
{
    DispersionModel model;
    if (!name.empty())
    {
        model = builtin_library().get(name);
        if (!c.config.empty())
        {
            auto const rc = load_run_config(c.config);
            if (!axis_given)
                axis = rc.table;
        }
    }
    else
    {
        auto const rc = require_config(c);
        model = rc.material;
        if (!axis_given)
            axis = rc.table;
    }
    if (!(axis.lo > 0) || axis.hi < axis.lo || axis.count < 1)
        throw Error(ErrorCode::ConfigError, "table range must be positive and ordered");
    return {{"material.csv", material_table(model, axis)}};
}

Bundle cmd_spectrum(Common const& c)
{
    auto rc = require_config(c);
    rc.grid.threads = c.threads;
    auto const grid = collinear_grid(rc.emission(), rc.grid);
    warn_holes(grid, "spectrum");
    if (c.verbose)
    {
        auto const m = grid.maximum();
        std::cerr << "maximum " << m.density << " at (" << m.lambda1 << ", " << m.lambda2
                  << ") um\n";
    }
    return {{"grid.csv", grid_csv(grid)},
            {"ridge.csv", ridge_csv(grid)},
            {"grid.json", dump_json(envelope(rc, to_json(grid)))}};
}

Bundle cmd_maxima(Common const& c)
{
    auto const rc = require_config(c);
    auto betas = rc.beta_list.empty() ? std::vector<double>{rc.beta} : rc.beta_list;
    auto const sweep = beta_sweep(rc.emission(), betas, rc.window, {}, c.threads);
    for (auto const& row : sweep.rows)
        if (!row.maximum)
            std::cerr << "warning: beta " << row.beta << ": " << row.error << "\n";
    if (c.verbose)
        std::cerr << "audit: wavelengths_decreasing=" << sweep.wavelengths_decreasing
                  << " ratio_decreasing=" << sweep.ratio_decreasing
                  << " density_increasing=" << sweep.density_increasing << "\n";
    return {{"sweep.csv", sweep_csv(sweep)},
            {"sweep.json", dump_json(envelope(rc, to_json(sweep)))}};
}

Bundle cmd_total(Common const& c)
{
    auto const rc = require_config(c);
    double const half = rc.cone_half_angle_deg * constants::pi / 180;
    auto const t = total_count(rc.emission(), half, rc.window, rc.quadrature);
    if (c.verbose)
        std::cerr << "pairs per pulse " << t.pairs_per_pulse << " (" << t.evaluations
                  << " evaluations)\n";
    return {{"total.json", dump_json(envelope(rc, to_json(t)))}};
}

Bundle cmd_fastlight(Common const& c)
{
    auto rc = require_config(c);
    rc.grid.threads = c.threads;
    auto const cfg = rc.emission();
    auto const res = rc.resonance ? *rc.resonance
                                  : tune_at_maximum(cfg, rc.fast_light_width_um,
                                                    rc.fast_light_target_ng, rc.window);
    auto const study = fast_light_study(cfg, res, rc.grid);
    warn_holes(study.base, "base");
    warn_holes(study.modified, "modified");
    if (c.verbose)
        std::cerr << "enhancement " << study.enhancement << ", " << study.peak_count
                  << " peaks\n";
    return {{"fastlight.json", dump_json(envelope(rc, to_json(study)))},
            {"base_grid.csv", grid_csv(study.base)},
            {"base_ridge.csv", ridge_csv(study.base)},
            {"modified_grid.csv", grid_csv(study.modified)},
            {"modified_ridge.csv", ridge_csv(study.modified)}};
}

int exit_code(ErrorCode code)
{
    switch (code)
    {
    case ErrorCode::ConfigError: return 1;
    case ErrorCode::UnknownMaterial: return 2;
    default: return 3;
    }
}
}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Photon pairs from a superluminal refractive-index perturbation"};
    app.require_subcommand(1);
    Common common;
    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* opt = sub->add_option("--config", common.config, "Run configuration (JSON)");
        if (needs_config)
            opt->required();
        sub->add_option("--out", common.out, "Output directory (default: stdout)");
        sub->add_option("--threads", common.threads, "Worker threads")
            ->check(CLI::PositiveNumber);
        sub->add_flag("--verbose", common.verbose, "Diagnostics on stderr");
    };

    std::string material_name;
    GridAxis axis{0.4, 2.0, 100};
    auto* material = app.add_subcommand("material", "Dispersion table of a material");
    material->add_option("name", material_name, "Built-in material name");
    auto* lo = material->add_option("--lambda-min", axis.lo, "Shortest wavelength [um]");
    auto* hi = material->add_option("--lambda-max", axis.hi, "Longest wavelength [um]");
    auto* pts = material->add_option("--points", axis.count, "Number of wavelengths");
    add_common(material, false);

    auto* spectrum = app.add_subcommand("spectrum", "Collinear pair-density grid");
    add_common(spectrum, true);
    auto* maxima = app.add_subcommand("maxima", "Emission maxima over a beta list");
    add_common(maxima, true);
    auto* total = app.add_subcommand("total", "Pairs per pulse in a collection cone");
    add_common(total, true);
    auto* fastlight = app.add_subcommand("fastlight", "Fast-light enhancement study");
    add_common(fastlight, true);

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::CallForHelp const& e)
    {
        return app.exit(e);
    }
    catch (CLI::ParseError const& e)
    {
        app.exit(e);
        return 1;
    }

    try
    {
        Bundle files;
        if (*material)
        {
            bool const axis_given = lo->count() || hi->count() || pts->count();
            files = cmd_material(common, material_name, axis, axis_given);
        }
        else if (*spectrum)
            files = cmd_spectrum(common);
        else if (*maxima)
            files = cmd_maxima(common);
        else if (*total)
            files = cmd_total(common);
        else if (*fastlight)
            files = cmd_fastlight(common);
        write_bundle(files, common.out);
    }
    catch (Error const& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.code());
    }
    catch (std::exception const& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
