#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>

#include "json.hpp"

#include "error.hpp"

namespace vacpair
{
//! Shortest decimal that round-trips to the same double.
inline std::string format_double(double x)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc{})
        throw Error(ErrorCode::InvalidArgument, "cannot format number");
    return std::string(buf, end);
}

inline void write_text(std::filesystem::path const& path, std::string const& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::ConfigError, "cannot write " + path.string());
    out << text;
}

inline std::string dump_json(nlohmann::json const& j)
{
    return j.dump(2) + "\n";
}

}  // namespace vacpair
