#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "dispersion.hpp"
#include "error.hpp"

namespace vacpair
{
//---------------------------------------------------------------------------//
/*!
 * Named dispersion models.
 *
 * File layout (JSON):
 * \code
   {"materials": [
     {"name": "fused_silica", "pole_convention": "wavelength_squared",
      "sellmeier": [[a1, l1], [a2, l2], [a3, l3]],
      "resonances": [{"center_um": .., "amplitude": .., "width_um": ..}]},
     {"name": "glass", "constant_index": 1.5}
   ]}
 * \endcode
 */
class MaterialLibrary
{
  public:
    MaterialLibrary() = default;

    void add(std::string name, DispersionModel model)
    {
        models_.insert_or_assign(std::move(name), std::move(model));
    }

    bool contains(std::string const& name) const { return models_.count(name) != 0; }

    DispersionModel const& get(std::string const& name) const
    {
        auto it = models_.find(name);
        if (it == models_.end())
        {
            std::string msg = "unknown material '" + name + "'; available:";
            for (auto const& n : names())
                msg += " " + n;
            throw Error(ErrorCode::UnknownMaterial, msg);
        }
        return it->second;
    }

    std::vector<std::string> names() const
    {
        std::vector<std::string> result;
        for (auto const& [k, v] : models_)
            result.push_back(k);
        return result;
    }

  private:
    std::map<std::string, DispersionModel> models_;
};

//---------------------------------------------------------------------------//
// JSON conversion
//---------------------------------------------------------------------------//

inline nlohmann::json to_json(LorentzianResonance const& r)
{
    return {{"center_um", r.center}, {"amplitude", r.amplitude}, {"width_um", r.width}};
}

inline LorentzianResonance resonance_from_json(nlohmann::json const& j)
{
    LorentzianResonance r{j.at("center_um").get<double>(),
                          j.at("amplitude").get<double>(),
                          j.at("width_um").get<double>()};
    validate(r);
    return r;
}

inline nlohmann::json to_json(DispersionModel const& m)
{
    nlohmann::json j;
    if (auto const* s = std::get_if<SellmeierModel>(&m.base))
    {
        j["name"] = s->name;
        j["pole_convention"] = std::string(to_string(s->pole));
        auto& terms = j["sellmeier"] = nlohmann::json::array();
        for (auto const& t : s->terms)
            terms.push_back({t.a, t.l});
    }
    else
    {
        j["name"] = "constant";
        j["constant_index"] = std::get<ConstantIndex>(m.base).n0;
    }
    auto& res = j["resonances"] = nlohmann::json::array();
    for (auto const& r : m.resonances)
        res.push_back(to_json(r));
    return j;
}

inline DispersionModel model_from_json(nlohmann::json const& j)
{
    DispersionModel model;
    if (j.contains("constant_index"))
    {
        model = make_constant(j.at("constant_index").get<double>());
    }
    else
    {
        SellmeierModel s;
        s.name = j.value("name", std::string("inline"));
        auto const conv = j.value("pole_convention", std::string("wavelength"));
        if (conv == "wavelength")
            s.pole = PoleConvention::Wavelength;
        else if (conv == "wavelength_squared")
            s.pole = PoleConvention::WavelengthSquared;
        else
            throw Error(ErrorCode::ConfigError, "unknown pole_convention '" + conv + "'");
        for (auto const& term : j.at("sellmeier"))
        {
            if (!term.is_array() || term.size() != 2)
                throw Error(ErrorCode::ConfigError, "sellmeier terms must be [a, l] pairs");
            s.terms.push_back({term[0].get<double>(), term[1].get<double>()});
        }
        model = make_sellmeier(std::move(s));
    }
    if (j.contains("resonances"))
    {
        for (auto const& r : j.at("resonances"))
            model.resonances.push_back(resonance_from_json(r));
    }
    if (j.contains("pole_guard_um2"))
        model.pole_guard = j.at("pole_guard_um2").get<double>();
    return model;
}

inline MaterialLibrary library_from_json(nlohmann::json const& j)
{
    MaterialLibrary lib;
    for (auto const& entry : j.at("materials"))
    {
        auto name = entry.at("name").get<std::string>();
        lib.add(name, model_from_json(entry));
    }
    return lib;
}

inline MaterialLibrary load_library(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::ConfigError, "cannot open material file " + path.string());
    try
    {
        return library_from_json(nlohmann::json::parse(in));
    }
    catch (nlohmann::json::exception const& e)
    {
        throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
    }
}

//---------------------------------------------------------------------------//
// Built-in materials
//---------------------------------------------------------------------------//

//! Fused silica; l_i are squared resonance wavelengths in um^2.
inline DispersionModel fused_silica()
{
    return make_sellmeier({"fused_silica",
                           {{0.473115591, 0.0129957170},
                            {0.631038719, 4.12809220e-3},
                            {0.906404498, 98.7685322}},
                           PoleConvention::WavelengthSquared});
}

//! Crystalline silicon, Salzberg & Villa (1957) fit, valid 1.36-11 um.
inline DispersionModel silicon()
{
    return make_sellmeier({"silicon",
                           {{10.6684293, 0.301516485},
                            {0.0030434748, 1.13475115},
                            {1.54133408, 1104.0}},
                           PoleConvention::Wavelength});
}

inline MaterialLibrary builtin_library()
{
    MaterialLibrary lib;
    lib.add("fused_silica", fused_silica());
    lib.add("silicon", silicon());
    return lib;
}

}  // namespace vacpair
