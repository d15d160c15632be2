#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vacpair
{

enum class ErrorCode
{
    PoleProximity,
    NegativeRadicand,
    NonPositive,
    InvalidArgument,
    NoRoot,
    Divergence,
    Subluminal,
    NoSignChange,
    ConstraintViolated,
    GroupIndexSingular,
    CschSingular,
    NoEmission,
    QuadratureNotConverged,
    UnknownMaterial,
    ConfigError,
};

constexpr std::string_view to_string(ErrorCode code)
{
    switch (code)
    {
    case ErrorCode::PoleProximity: return "PoleProximity";
    case ErrorCode::NegativeRadicand: return "NegativeRadicand";
    case ErrorCode::NonPositive: return "NonPositive";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NoRoot: return "NoRoot";
    case ErrorCode::Divergence: return "Divergence";
    case ErrorCode::Subluminal: return "Subluminal";
    case ErrorCode::NoSignChange: return "NoSignChange";
    case ErrorCode::ConstraintViolated: return "ConstraintViolated";
    case ErrorCode::GroupIndexSingular: return "GroupIndexSingular";
    case ErrorCode::CschSingular: return "CschSingular";
    case ErrorCode::NoEmission: return "NoEmission";
    case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorCode::UnknownMaterial: return "UnknownMaterial";
    case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

//! Library exception carrying a machine-readable code.
class Error : public std::runtime_error
{
  public:
    Error(ErrorCode code, std::string const& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what)
        , code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

}  // namespace vacpair
