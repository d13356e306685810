#pragma once

#include <cstddef>
#include <vector>

#include "wlab/field2d.hpp"

namespace wlab {

enum class DiffScheme { Spectral, Fd4 };

// Dense first/second derivative matrices for 2*pi-periodic data on n equally
// spaced nodes x_j = 2*pi*j/n.  Spectral matrices differentiate trigonometric
// polynomials up to the grid bandwidth exactly; Fd4 is the 4th order central
// stencil in circulant form, kept as an independent cross-check.
struct DiffMatrices {
  std::size_t n = 0;
  DiffScheme scheme = DiffScheme::Spectral;
  std::vector<double> d1, d2;  // n x n, row-major
};

DiffMatrices build_diff(std::size_t n, DiffScheme scheme = DiffScheme::Spectral);

// Derivative of a periodic field along one grid axis (0 or 1), period 2*pi,
// order 1 or 2.  All matrix applications go through kernels::apply_dmat.
Field2D diff_axis(const DiffMatrices& dm, const Field2D& f, int axis, int order);

// Periodic band-limited interpolation of samples f_j at x_j = 2*pi*j/n.
double trig_interp(const std::vector<double>& f, double x);
// Derivative of the interpolant.
double trig_interp_deriv(const std::vector<double>& f, double x);
// Cardinal basis function for n nodes centered at 0, and its derivative.
double trig_cardinal(std::size_t n, double delta);
double trig_cardinal_deriv(std::size_t n, double delta);

}  // namespace wlab
