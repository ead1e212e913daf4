#pragma once

#include "mk/integrate.hpp"

namespace mk {

/// F(f)(y) = integral of E(x.y) f(x) dx; the result uses the input's variable names.
IntegrationResult fourier(const CEF& f);

/// (f * g)(z) = integral of f(x) g(z - x) dx over all valued variables.
IntegrationResult convolve(const CEF& f, const CEF& g);

/// f(-x).
CEF reflect(const CEF& f);

/// F(F(f)) against L^-d times the reflection of f.
EqResult check_inversion(const CEF& f, unsigned seed = 1);
/// F(phi_alpha F(f)) against L^(-alpha d) times (reflected f) * phi_(1 - alpha).
EqResult check_partial_inversion(const CEF& f, int alpha, unsigned seed = 1);
/// F(f * g) against F(f) F(g).
EqResult check_convolution_theorem(const CEF& f, const CEF& g, unsigned seed = 1);

}  // namespace mk
