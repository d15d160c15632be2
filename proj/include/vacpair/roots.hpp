#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "error.hpp"

namespace vacpair
{
//! Sampling of a bracket when looking for sign changes.
struct ScanOptions
{
    int samples{64};
    bool log_spacing{true};
};

struct SignChange
{
    double lo, hi;
    double f_lo, f_hi;
};

namespace detail
{
template<class F>
std::optional<double> try_eval(F& f, double x)
{
    try
    {
        double v = f(x);
        if (std::isfinite(v))
            return v;
    }
    catch (Error const&)
    {
    }
    return std::nullopt;
}
}  // namespace detail

/*!
 * Sample f over [lo, hi] and return the sub-intervals whose valid endpoints
 * differ in sign.
 *
 * Samples where f throws a library error (or is not finite) break the chain:
 * no sign change is reported across them.
 */
template<class F>
std::vector<SignChange> scan_sign_changes(F&& f, double lo, double hi, ScanOptions opts = {})
{
    if (!(lo > 0 && hi > lo) && opts.log_spacing)
        throw Error(ErrorCode::InvalidArgument, "log scan needs 0 < lo < hi");
    if (!(hi > lo))
        throw Error(ErrorCode::InvalidArgument, "scan needs lo < hi");
    int const n = std::max(opts.samples, 2);
    std::vector<SignChange> result;
    std::optional<double> prev_x, prev_f;
    for (int i = 0; i < n; ++i)
    {
        double const t = static_cast<double>(i) / (n - 1);
        double x = opts.log_spacing ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t;
        if (i == n - 1)
            x = hi;
        auto fx = detail::try_eval(f, x);
        if (fx && prev_f)
        {
            if (*fx == 0)
                result.push_back({x, x, 0, 0});
            else if ((*prev_f < 0) != (*fx < 0) && *prev_f != 0)
                result.push_back({*prev_x, x, *prev_f, *fx});
        }
        else if (fx && !prev_f && *fx == 0)
        {
            result.push_back({x, x, 0, 0});
        }
        prev_x = fx ? std::optional<double>(x) : std::nullopt;
        prev_f = fx;
    }
    return result;
}

//! Refine a sign change with the bracketing TOMS 748 algorithm.
template<class F>
double refine_root(F&& f, SignChange const& s)
{
    if (s.lo == s.hi)
        return s.lo;
    std::uintmax_t max_iter = 200;
    auto [a, b] = boost::math::tools::toms748_solve(
        f, s.lo, s.hi, s.f_lo, s.f_hi, boost::math::tools::eps_tolerance<double>(50), max_iter);
    return a + (b - a) / 2;
}

}  // namespace vacpair
