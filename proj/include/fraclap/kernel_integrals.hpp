#pragma once

#include <utility>

#include "fraclap/jet.hpp"
#include "fraclap/quadrature.hpp"

namespace fraclap {

// C(tau) = int_0^inf [chi_(0,1)(t)|1-t|^tau + (1+t)^tau - 2] t^(-1-2 alpha) dt,
// defined for tau in (-1, 2 alpha).
double eval_C(double tau, double alpha, const QuadratureConfig& cfg = {});

// (C'(tau), C''(tau)).
std::pair<double, double> eval_C_derivatives(double tau, double alpha,
                                             const QuadratureConfig& cfg = {});

// Value and both derivatives from one pass.
Jet eval_C_jet(double tau, double alpha, const QuadratureConfig& cfg = {});

// Ctilde(beta) = int_1^inf (t-1)^beta t^(-1-2 alpha) dt for beta in (-1, 0].
double eval_C_tilde(double beta, double alpha, const QuadratureConfig& cfg = {});

}  // namespace fraclap
