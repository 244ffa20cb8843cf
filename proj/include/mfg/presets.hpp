#pragma once

#include <string>
#include <vector>

#include "mfg/convex.hpp"

namespace mfg {

/// Build a registered integrand. Unknown names and invalid parameters throw
/// std::invalid_argument. Missing parameters take the preset default.
///
///   ball-indicator{a}      0 on |u| <= a, +inf outside
///   norm{a}                a|q|
///   quadratic{c}           c|u|^2/2
///   quadratic-capped{a}    |u|^2/2 on |u| <= a
///   huber{a}               conjugate of quadratic-capped
///   sqrt{a}                a(sqrt(1+|q|^2) - 1)
///   sqrt-lagrangian{a}     a - sqrt(a^2 - |u|^2) on |u| <= a
///   constant{c}, zero      c
///   origin-indicator{c}    -c at u = 0, +inf elsewhere
///   abs{c}                 c|r|
///   linear{c}              c r
///   quartic{c}             c r^4/4
///   step-coupling{slope, jump.K.at, jump.K.height}
///                          slope r^2/2 + sum_K height_K (r - at_K)^+
IntegrandPtr make_integrand(const std::string& name, const Parameters& params = {});

std::vector<std::string> preset_names();

}  // namespace mfg
