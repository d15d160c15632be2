#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "analysis.hpp"
#include "dispersion.hpp"
#include "emission.hpp"
#include "error.hpp"
#include "materials.hpp"
#include "units.hpp"

namespace vacpair
{
//---------------------------------------------------------------------------//
/*!
 * Everything a CLI run needs, read from one JSON document.
 *
 * Physical quantities carry their unit in the key name. The parsed document
 * is kept verbatim and embedded in every output.
 */
struct RunConfig
{
    nlohmann::json source;

    DispersionModel material;
    std::string material_label;
    PerturbationProfile profile{GaussianProfile{1e-3, 1.0}};
    double beta{20};
    std::vector<double> beta_list;
    double length_m{0.05};
    double calibration{1.0};
    double ng_floor{1e-3};
    double kx_floor_per_um{1e-6};

    SearchWindow window{};
    GridOptions grid{};
    double cone_half_angle_deg{30};
    TotalCountOptions quadrature{};

    std::optional<LorentzianResonance> resonance;
    double fast_light_width_um{0.005};
    double fast_light_target_ng{0.5};

    GridAxis table{0.4, 2.0, 100};

    EmissionConfig emission() const
    {
        return {material, profile, {beta}, length_m, calibration, ng_floor, kx_floor_per_um};
    }
};

namespace detail
{
//! Field-checked access into one JSON object.
class FieldReader
{
  public:
    FieldReader(nlohmann::json const& j, std::string path, std::set<std::string> allowed)
        : j_(j), path_(std::move(path))
    {
        if (!j_.is_object())
            fail(path_.empty() ? "document" : path_, "expected an object");
        for (auto const& item : j_.items())
            if (!allowed.count(item.key()))
                fail(where(item.key()), "unknown field");
    }

    bool has(std::string const& key) const { return j_.contains(key); }

    nlohmann::json const& raw(std::string const& key) const { return j_.at(key); }

    std::string where(std::string const& key) const
    {
        return path_.empty() ? key : path_ + "." + key;
    }

    [[noreturn]] static void fail(std::string const& field, std::string const& what)
    {
        throw Error(ErrorCode::ConfigError, "field '" + field + "': " + what);
    }

    double number(std::string const& key, double fallback) const
    {
        if (!has(key))
            return fallback;
        auto const& v = j_.at(key);
        if (!v.is_number())
            fail(where(key), "expected a number");
        double const x = v.get<double>();
        if (!std::isfinite(x))
            fail(where(key), "expected a finite number");
        return x;
    }

    double positive(std::string const& key, double fallback) const
    {
        double const x = number(key, fallback);
        if (!(x > 0))
            fail(where(key), "expected a positive number");
        return x;
    }

    double nonnegative(std::string const& key, double fallback) const
    {
        double const x = number(key, fallback);
        if (!(x >= 0))
            fail(where(key), "expected a non-negative number");
        return x;
    }

    long integer(std::string const& key, long fallback, long min) const
    {
        if (!has(key))
            return fallback;
        auto const& v = j_.at(key);
        if (!v.is_number_integer())
            fail(where(key), "expected an integer");
        long const x = v.get<long>();
        if (x < min)
            fail(where(key), "expected an integer >= " + std::to_string(min));
        return x;
    }

    std::string string(std::string const& key, std::string fallback) const
    {
        if (!has(key))
            return fallback;
        auto const& v = j_.at(key);
        if (!v.is_string())
            fail(where(key), "expected a string");
        return v.get<std::string>();
    }

  private:
    nlohmann::json const& j_;
    std::string path_;
};

inline PerturbationProfile profile_from_json(nlohmann::json const& j)
{
    FieldReader r(j, "profile",
                  {"shape", "eta", "sigma_um", "sigma_x_um", "sigma_y_um", "sigma_z_um"});
    auto const shape = r.string("shape", "gaussian");
    double const eta = r.nonnegative("eta", 1e-3);
    if (shape == "gaussian")
    {
        for (auto const* k : {"sigma_x_um", "sigma_y_um", "sigma_z_um"})
            if (r.has(k))
                FieldReader::fail(r.where(k), "only valid for the tanh shape");
        return GaussianProfile{eta, r.positive("sigma_um", 1.0)};
    }
    if (shape == "tanh")
    {
        if (r.has("sigma_um"))
            FieldReader::fail(r.where("sigma_um"), "tanh needs sigma_x_um, sigma_y_um, sigma_z_um");
        return TanhProfile{eta, r.positive("sigma_x_um", 1.0), r.positive("sigma_y_um", 1.0),
                           r.positive("sigma_z_um", 1.0)};
    }
    FieldReader::fail("profile.shape", "expected \"gaussian\" or \"tanh\"");
}

inline std::pair<std::size_t, std::size_t> line_column(std::string const& text, std::size_t byte)
{
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i)
    {
        if (text[i] == '\n')
        {
            ++line;
            col = 1;
        }
        else
        {
            ++col;
        }
    }
    return {line, col};
}
}  // namespace detail

/*!
 * Build a run configuration from a parsed document.
 *
 * Material names are resolved in \c library; unknown names raise
 * UnknownMaterial, every other problem raises ConfigError naming the field.
 */
inline RunConfig run_config_from_json(nlohmann::json const& j, MaterialLibrary const& library)
{
    using detail::FieldReader;
    FieldReader r(j, "",
                  {"materials_file", "material", "profile", "beta", "beta_list", "L_m",
                   "calibration", "ng_floor", "kx_floor_per_um", "window", "grid",
                   "cone_half_angle_deg", "quadrature", "resonance", "fast_light", "table"});
    RunConfig c;
    c.source = j;

    if (!r.has("material"))
        FieldReader::fail("material", "required");
    auto const& m = r.raw("material");
    if (m.is_string())
    {
        c.material_label = m.get<std::string>();
        c.material = library.get(c.material_label);
    }
    else if (m.is_object())
    {
        try
        {
            c.material = model_from_json(m);
        }
        catch (Error const& e)
        {
            FieldReader::fail("material", e.what());
        }
        catch (nlohmann::json::exception const& e)
        {
            FieldReader::fail("material", e.what());
        }
        c.material_label = c.material.name();
    }
    else
    {
        FieldReader::fail("material", "expected a material name or an inline model");
    }

    if (r.has("profile"))
        c.profile = detail::profile_from_json(r.raw("profile"));
    c.beta = r.positive("beta", c.beta);
    if (r.has("beta_list"))
    {
        auto const& b = r.raw("beta_list");
        if (!b.is_array() || b.empty())
            FieldReader::fail("beta_list", "expected a non-empty array of numbers");
        for (std::size_t i = 0; i < b.size(); ++i)
        {
            if (!b[i].is_number() || !(b[i].get<double>() > 0))
                FieldReader::fail("beta_list[" + std::to_string(i) + "]",
                                  "expected a positive number");
            c.beta_list.push_back(b[i].get<double>());
        }
    }
    c.length_m = r.positive("L_m", c.length_m);
    c.calibration = r.positive("calibration", c.calibration);
    c.ng_floor = r.positive("ng_floor", c.ng_floor);
    c.kx_floor_per_um = r.positive("kx_floor_per_um", c.kx_floor_per_um);

    if (r.has("window"))
    {
        FieldReader w(r.raw("window"), "window", {"lambda_min_um", "lambda_max_um"});
        c.window.lo = w.positive("lambda_min_um", c.window.lo);
        c.window.hi = w.positive("lambda_max_um", c.window.hi);
        if (!(c.window.hi > c.window.lo))
            FieldReader::fail("window.lambda_max_um", "must exceed lambda_min_um");
    }
    if (r.has("grid"))
    {
        FieldReader g(r.raw("grid"), "grid",
                      {"lambda1_min_um", "lambda1_max_um", "lambda1_points", "lambda2_min_um",
                       "lambda2_max_um", "lambda2_points"});
        auto& a1 = c.grid.lambda1;
        auto& a2 = c.grid.lambda2;
        a1.lo = g.positive("lambda1_min_um", a1.lo);
        a1.hi = g.positive("lambda1_max_um", a1.hi);
        a1.count = static_cast<int>(g.integer("lambda1_points", a1.count, 1));
        a2.lo = g.positive("lambda2_min_um", a2.lo);
        a2.hi = g.positive("lambda2_max_um", a2.hi);
        a2.count = static_cast<int>(g.integer("lambda2_points", a2.count, 1));
        if (a1.hi < a1.lo)
            FieldReader::fail("grid.lambda1_max_um", "must not be below lambda1_min_um");
        if (a2.hi < a2.lo)
            FieldReader::fail("grid.lambda2_max_um", "must not be below lambda2_min_um");
    }
    c.cone_half_angle_deg = r.positive("cone_half_angle_deg", c.cone_half_angle_deg);
    if (c.cone_half_angle_deg > 90)
        FieldReader::fail("cone_half_angle_deg", "must not exceed 90");
    if (r.has("quadrature"))
    {
        FieldReader q(r.raw("quadrature"), "quadrature", {"rel_tol", "max_evals"});
        c.quadrature.rel_tol = q.positive("rel_tol", c.quadrature.rel_tol);
        c.quadrature.max_evals = static_cast<std::size_t>(
            q.integer("max_evals", static_cast<long>(c.quadrature.max_evals), 1));
    }
    if (r.has("resonance"))
    {
        FieldReader s(r.raw("resonance"), "resonance", {"center_um", "amplitude", "width_um"});
        LorentzianResonance res{s.positive("center_um", 1.0), s.number("amplitude", 0.0),
                                s.positive("width_um", 0.01)};
        c.resonance = res;
    }
    if (r.has("fast_light"))
    {
        FieldReader f(r.raw("fast_light"), "fast_light", {"width_um", "target_group_index"});
        c.fast_light_width_um = f.positive("width_um", c.fast_light_width_um);
        c.fast_light_target_ng = f.number("target_group_index", c.fast_light_target_ng);
    }
    if (r.has("table"))
    {
        FieldReader t(r.raw("table"), "table", {"lambda_min_um", "lambda_max_um", "points"});
        c.table.lo = t.positive("lambda_min_um", c.table.lo);
        c.table.hi = t.positive("lambda_max_um", c.table.hi);
        c.table.count = static_cast<int>(t.integer("points", c.table.count, 1));
        if (c.table.hi < c.table.lo)
            FieldReader::fail("table.lambda_max_um", "must not be below lambda_min_um");
    }
    try
    {
        validate(c.emission());
    }
    catch (Error const& e)
    {
        throw Error(ErrorCode::ConfigError, e.what());
    }
    return c;
}

//! Parse config text; syntax errors report line and column.
inline nlohmann::json parse_config_text(std::string const& text)
{
    try
    {
        return nlohmann::json::parse(text);
    }
    catch (nlohmann::json::parse_error const& e)
    {
        auto [line, col] = detail::line_column(text, e.byte);
        std::ostringstream msg;
        msg << "line " << line << ", column " << col << ": " << e.what();
        throw Error(ErrorCode::ConfigError, msg.str());
    }
}

inline std::string read_text(std::filesystem::path const& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::ConfigError, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/*!
 * Load a run configuration file.
 *
 * A "materials_file" entry, resolved relative to the config file, replaces the
 * built-in material library.
 */
inline RunConfig load_run_config(std::filesystem::path const& path)
{
    auto const j = parse_config_text(read_text(path));
    MaterialLibrary lib = builtin_library();
    if (j.is_object() && j.contains("materials_file"))
    {
        auto const& f = j.at("materials_file");
        if (!f.is_string())
            detail::FieldReader::fail("materials_file", "expected a path string");
        std::filesystem::path p = f.get<std::string>();
        if (p.is_relative())
            p = path.parent_path() / p;
        lib = load_library(p);
    }
    return run_config_from_json(j, lib);
}

}  // namespace vacpair
