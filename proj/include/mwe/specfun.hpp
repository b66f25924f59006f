#pragma once

// Closed-form resolvent kernels of (Delta + k^2)^{-m} on R^n, their radial
// gradients, and the radial (spherically reduced) single-end kernel.  All
// built on the modified Bessel functions I_nu, K_nu.

#include <stdexcept>
#include <vector>

namespace mwe::specfun {

// Modified Bessel function of the second kind, K_nu(x), nu >= 0.
// Relative error <= 1e-10 for x in [1e-6, 700]; underflows to 0 for
// x beyond the exponential range.  Throws std::domain_error for
// non-finite or non-positive x, or nu < 0.
double bessel_k(double nu, double x);

// Modified Bessel function of the first kind, I_nu(x), nu >= 0, x > 0.
double bessel_i(double nu, double x);

// Exponentially scaled variants: e^{x} K_nu(x) and e^{-x} I_nu(x).
// Useful when products I_nu(k r_<) K_nu(k r_>) would under/overflow.
double bessel_k_scaled(double nu, double x);
double bessel_i_scaled(double nu, double x);

// Surface measure of the unit sphere S^{n-1} in R^n.
double sphere_area(int n);

struct KernelQuery {
  int n;     // end dimension, >= 3
  int m;     // resolvent order, >= 1
  double k;  // spectral parameter, > 0 (k = 0 allowed only for m = 1)
  double r;  // radial distance, > 0
};

void validate(const KernelQuery& q);

// Kernel of (Delta_{R^n} + k^2)^{-m} at distance r.
// m = 1 value is (2pi)^{-n/2} k^{n-2} (kr)^{1-n/2} K_{n/2-1}(kr); higher m
// follow from the derivative recursion kernel(m+1) = (-1/m) d/d(k^2) kernel(m),
// which closes over Bessel functions of shifted order.
double euclid_resolvent_kernel(const KernelQuery& q);

// |d/dr| of euclid_resolvent_kernel; non-negative.
double euclid_resolvent_gradient(const KernelQuery& q);

// Radial part of the single-end resolvent: the kernel of (Delta + k^2)^{-m}
// on R^n reduced to radial functions (s-wave), between spheres of radius
// r_source and r_field.  For m = 1 this is
//   (1/s_n) (r r')^{1-n/2} I_{n/2-1}(k r_<) K_{n/2-1}(k r_>).
// For m > 1 the k^2-derivative recursion is evaluated by Richardson
// extrapolated central differences in k^2.
double radial_end_kernel(int n, int m, double k, double r_source, double r_field);

// Nodes and weights of N-point Gauss-Laguerre quadrature
// (integral_0^inf e^{-s} f(s) ds ~ sum_i w_i f(s_i)).
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};
Quadrature gauss_laguerre(int points);

}  // namespace mwe::specfun
