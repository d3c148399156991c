#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <vector>

namespace heis {

using Complex = std::complex<double>;

/// Principal-branch log Gamma. Lanczos approximation for Re z >= 1/2, upward
/// recurrence below. Throws PreconditionError at the poles.
Complex log_gamma_complex(Complex z);

/// 2 Gamma((Q+1)/2) / (Gamma(Q/2) sqrt(pi)): the constant making
/// c int_0^inf (1+r^2)^{-(Q+1)/2} r^{Q-1} dr = 1.
double radial_poisson_constant(int Q);

/// Lebesgue normalisation of the Poisson kernel: c_Q int (1+|x|^2)^{-(Q+1)/2} dx = 1
/// with dx = kappa r^{Q-1} dr d sigma and sigma of mass one.
double c_q(int Q, double kappa);
/// Same constant with the radial integral done by adaptive quadrature.
double c_q_numeric(int Q, double kappa);

/// 1 - Gamma((Q-i g)/2) Gamma((1+i g)/2) / (Gamma(Q/2) Gamma(1/2))
Complex a_coefficient(int Q, double gamma);

/// Gamma((Q-i g)/2) Gamma((1+i g)/2) / (Gamma(Q/2) Gamma(1/2)), the closed form of
/// sqrt(2 pi) F^(g).
Complex f_hat_closed_form(int Q, double gamma);

/// sqrt(2 pi) F^(g) = int F(t) e^{-i t g} dt with
/// F(t) = c (1 + e^{2t})^{-(Q+1)/2} e^{Qt}, c = kappa c_Q, by adaptive Gauss-Kronrod.
Complex f_hat_numeric(int Q, double kappa, double gamma);

struct FHatCheck {
  std::vector<double> gammas;
  std::vector<double> errors;
  double max_error = 0.0;
};

FHatCheck f_hat_identity_check(int Q, double kappa, const std::vector<double>& gammas);

/// A radial profile u(r) supported in [r_lo, r_hi], 0 < r_lo < r_hi.
struct RadialProfile {
  std::function<double(double)> u;
  double r_lo = 0.5;
  double r_hi = 1.5;
};

/// Smooth bump exp(1 - 1/(1 - s^2)) in s = (r - center) / half_width.
RadialProfile annular_bump(double center, double half_width, double height = 1.0);

struct RepresentationCheck {
  double lhs = 0.0;             ///< u(1)
  double poisson_term = 0.0;    ///< int c (1+r^2)^{-(Q+1)/2} u(r) r^{Q-1} dr
  double gamma_term = 0.0;      ///< (2 pi)^{-1} int a(Q,g) M(g) dg
  double gamma_max = 0.0;
  double tail_estimate = 0.0;   ///< |integrand| mass of the last accepted chunk
  double abs_error = 0.0;
  double rel_error = 0.0;       ///< abs_error / |lhs| (abs_error when lhs = 0)
};

/// u(1) against the Poisson term plus the Mellin-side gamma integral. The gamma
/// range grows in chunks of width 10 until one chunk's absolute contribution is
/// below `tail_tol` times sup|u|, starting from at least `gamma_min`. An infinite
/// `tail_tol` fixes the range at `gamma_min`.
RepresentationCheck verify_measure_representation(const RadialProfile& profile, int Q,
                                                  double gamma_min = 60.0,
                                                  double gamma_cap = 5000.0,
                                                  double tail_tol = 1e-6);

/// L_k^alpha(x) by the three-term recurrence.
double laguerre(int k, double alpha, double x);
/// L_k^{n-1}(|lambda| z^2 / 2) exp(-|lambda| z^2 / 4); refuses k > 10^4.
double laguerre_phi(int k, int n, double lambda, double z_norm);
/// k! (n-1)! / (k+n-1)!
double laguerre_normaliser(int k, int n);

/// R_k(lambda, sigma_r) by Gauss-Legendre in theta. Requires
/// n_theta >= 8 + 2 ceil(|lambda| r^2).
Complex r_k_coefficient(int k, int n, double lambda, double r, int n_theta);

void write_gamma_table(std::ostream& os, int Q, double kappa, const std::vector<double>& gammas);

}  // namespace heis
