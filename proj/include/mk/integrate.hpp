#pragma once

#include <set>
#include <string>
#include <vector>

#include "mk/cef.hpp"

namespace mk {

struct IntegrationResult {
  CEF value;     // over the remaining valued variables and all parameters
  PrimeSet bad;  // contains the input's bad primes
};

/// One annulus of `var`, integrated in closed form for each ord(var) regime.
/// The result still mentions ord_var, which the caller sums over.
std::vector<Term> integrate_annulus(const Term& t, const std::string& var, PrimeSet& bad);

/// Throws NotIntegrable or UnsupportedPhase.
IntegrationResult integrate_var(const CEF& f, const std::string& var);
IntegrationResult integrate_all(const CEF& f);
/// Integrates every valued variable not in keep, in signature order.
IntegrationResult integrate_rel(const CEF& f, const std::set<std::string>& keep);
/// Integrates in the given order.
IntegrationResult integrate_in_order(const CEF& f, const std::vector<std::string>& order);

/// Total integral as a value; throws when parameters are present.
ValueRingElem integral_value(const CEF& f);

}  // namespace mk
