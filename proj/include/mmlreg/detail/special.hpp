#pragma once

#include <boost/math/special_functions/gamma.hpp>

namespace mmlreg::detail
{

/// Thread-safe log-gamma (std::lgamma writes the global signgam).
inline double log_gamma(double x)
{
    return boost::math::lgamma(x);
}

/// psi(1), the negated Euler-Mascheroni constant.
inline constexpr double kDigammaOne = -0.57721566490153286060651209008240243;

} // namespace mmlreg::detail
