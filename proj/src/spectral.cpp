#include "heis/spectral.hpp"

#include <array>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "heis/errors.hpp"
#include "heis/quadrature.hpp"

namespace heis {

namespace {

constexpr std::array<double, 14> kLanczos = {
    57.1562356658629235,     -59.5979603554754912,     14.1360979747417471,
    -0.491913816097620199,   .339946499848118887e-4,   .465236289270485756e-4,
    -.983744753048795646e-4, .158088703224912494e-3,   -.210264441724104883e-3,
    .217439618115212643e-3,  -.164318106536763890e-3,  .844182239838527433e-4,
    -.261908384015814087e-4, .368991826595316234e-5};
constexpr double kLanczosG = 671.0 / 128.0;

Complex lanczos_log_gamma(Complex z) {
  Complex ser(0.999999999999997092, 0.0);
  for (std::size_t k = 0; k < kLanczos.size(); ++k) ser += kLanczos[k] / (z + static_cast<double>(k + 1));
  const Complex tmp = z + kLanczosG;
  return (z + 0.5) * std::log(tmp) - tmp + std::log(2.5066282746310005) + std::log(ser) - std::log(z);
}

constexpr double kInvSqrt2Pi = 0.3989422804014327;

}  // namespace

Complex log_gamma_complex(Complex z) {
  if (z.imag() == 0.0 && z.real() <= 0.0 && std::floor(z.real()) == z.real())
    throw PreconditionError("log Gamma pole at " + std::to_string(z.real()));
  if (z.real() >= 0.5) return lanczos_log_gamma(z);
  const int m = static_cast<int>(std::ceil(0.5 - z.real()));
  Complex shift(0.0, 0.0);
  for (int k = 0; k < m; ++k) shift += std::log(z + static_cast<double>(k));
  return lanczos_log_gamma(z + static_cast<double>(m)) - shift;
}

double radial_poisson_constant(int Q) {
  if (Q < 1) throw PreconditionError("homogeneous dimension must be positive");
  return 2.0 * std::exp(std::lgamma((Q + 1) / 2.0) - std::lgamma(Q / 2.0)) / std::sqrt(std::numbers::pi);
}

double c_q(int Q, double kappa) {
  if (!(kappa > 0.0)) throw PreconditionError("polar constant kappa missing or nonpositive");
  return radial_poisson_constant(Q) / kappa;
}

double c_q_numeric(int Q, double kappa) {
  if (!(kappa > 0.0)) throw PreconditionError("polar constant kappa missing or nonpositive");
  using boost::math::quadrature::gauss_kronrod;
  const double e = -(Q + 1) / 2.0;
  auto f = [&](double r) { return std::pow(1.0 + r * r, e) * std::pow(r, Q - 1); };
  double err = 0.0;
  const double head = gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 15, 1e-14, &err);
  // r = 1/s maps [1, inf) to (0, 1] and the integrand to (1 + s^2)^e.
  auto g = [&](double s) { return std::pow(1.0 + s * s, e); };
  const double tail = gauss_kronrod<double, 61>::integrate(g, 0.0, 1.0, 15, 1e-14, &err);
  return 1.0 / (kappa * (head + tail));
}

Complex f_hat_closed_form(int Q, double gamma) {
  const Complex l = log_gamma_complex(Complex(Q / 2.0, -gamma / 2.0)) +
                    log_gamma_complex(Complex(0.5, gamma / 2.0)) -
                    log_gamma_complex(Complex(Q / 2.0, 0.0)) - log_gamma_complex(Complex(0.5, 0.0));
  return std::exp(l);
}

Complex a_coefficient(int Q, double gamma) { return 1.0 - f_hat_closed_form(Q, gamma); }

Complex f_hat_numeric(int Q, double kappa, double gamma) {
  using boost::math::quadrature::gauss_kronrod;
  const double c = kappa * c_q(Q, kappa);
  const double e = -(Q + 1) / 2.0;
  // log F(t) = log c + e log(1 + e^{2t}) + Q t, written to avoid overflow.
  auto logF = [&](double t) {
    const double l = t > 0 ? 2.0 * t + std::log1p(std::exp(-2.0 * t)) : std::log1p(std::exp(2.0 * t));
    return std::log(c) + e * l + Q * t;
  };
  auto re = [&](double t) { return std::exp(logF(t)) * std::cos(gamma * t); };
  auto im = [&](double t) { return -std::exp(logF(t)) * std::sin(gamma * t); };
  // F decays like e^{Qt} and e^{-t}.
  const double a = -60.0 / Q, b = 60.0;
  double err_re = 0.0, err_im = 0.0;
  const double vr = gauss_kronrod<double, 61>::integrate(re, a, b, 20, 1e-14, &err_re);
  const double vi = gauss_kronrod<double, 61>::integrate(im, a, b, 20, 1e-14, &err_im);
  if (err_re > 1e-10 || err_im > 1e-10)
    throw InvariantError("Fourier quadrature did not converge at gamma=" + std::to_string(gamma));
  return {vr, vi};
}

FHatCheck f_hat_identity_check(int Q, double kappa, const std::vector<double>& gammas) {
  FHatCheck out;
  for (double g : gammas) {
    const double err = std::abs(f_hat_numeric(Q, kappa, g) - f_hat_closed_form(Q, g));
    out.gammas.push_back(g);
    out.errors.push_back(err);
    out.max_error = std::max(out.max_error, err);
  }
  return out;
}

RadialProfile annular_bump(double center, double half_width, double height) {
  if (!(half_width > 0.0) || !(center - half_width > 0.0))
    throw PreconditionError("annular bump must be supported in (0, inf)");
  RadialProfile p;
  p.r_lo = center - half_width;
  p.r_hi = center + half_width;
  p.u = [=](double r) {
    const double s = (r - center) / half_width;
    if (std::abs(s) >= 1.0) return 0.0;
    return height * std::exp(1.0 - 1.0 / (1.0 - s * s));
  };
  return p;
}

RepresentationCheck verify_measure_representation(const RadialProfile& profile, int Q,
                                                  double gamma_min, double gamma_cap,
                                                  double tail_tol) {
  if (!(profile.r_lo > 0.0) || !(profile.r_hi > profile.r_lo))
    throw PreconditionError("profile support must be a compact interval in (0, inf)");
  RepresentationCheck out;
  out.lhs = profile.u(1.0);

  const double crad = radial_poisson_constant(Q);
  {
    const GaussRule g = gauss_legendre_composite(16, 64, profile.r_lo, profile.r_hi);
    double s = 0.0;
    for (std::size_t j = 0; j < g.nodes.size(); ++j) {
      const double r = g.nodes[j];
      s += g.weights[j] * crad * std::pow(1.0 + r * r, -(Q + 1) / 2.0) * profile.u(r) * std::pow(r, Q - 1);
    }
    out.poisson_term = s;
  }

  // M(g) = int u(e^s) e^{i g s} ds over s in [log r_lo, log r_hi].
  const double s_lo = std::log(profile.r_lo), s_hi = std::log(profile.r_hi);
  const double len = s_hi - s_lo;
  double sup_u = 0.0;
  GaussRule srule;
  std::vector<double> v;
  double resolved_to = -1.0;
  auto ensure_s_rule = [&](double gamma_hi) {
    if (gamma_hi <= resolved_to) return;
    resolved_to = 2.0 * gamma_hi;
    const int panels = 32 + static_cast<int>(std::ceil(resolved_to * len / std::numbers::pi));
    srule = gauss_legendre_composite(16, panels, s_lo, s_hi);
    v.resize(srule.nodes.size());
    for (std::size_t j = 0; j < v.size(); ++j) {
      v[j] = profile.u(std::exp(srule.nodes[j]));
      sup_u = std::max(sup_u, std::abs(v[j]));
    }
  };
  auto mellin = [&](double g) {
    Complex m(0.0, 0.0);
    for (std::size_t j = 0; j < v.size(); ++j) m += srule.weights[j] * v[j] * std::polar(1.0, g * srule.nodes[j]);
    return m;
  };

  // Integrand at -g is the conjugate of that at g, so the full integral is
  // (1/pi) Re int_0^G a M dg.
  constexpr double kChunk = 10.0;
  const GaussRule unit = gauss_legendre(24, 0.0, kChunk);
  double total = 0.0;
  double g0 = 0.0;
  for (;;) {
    ensure_s_rule(g0 + kChunk);
    double chunk = 0.0, chunk_abs = 0.0;
    for (std::size_t i = 0; i < unit.nodes.size(); ++i) {
      const double g = g0 + unit.nodes[i];
      const Complex val = a_coefficient(Q, g) * mellin(g);
      chunk += unit.weights[i] * val.real();
      chunk_abs += unit.weights[i] * std::abs(val);
    }
    total += chunk;
    g0 += kChunk;
    out.tail_estimate = chunk_abs / std::numbers::pi;
    if (g0 >= gamma_min && out.tail_estimate < tail_tol * std::max(sup_u, 1e-300)) break;
    if (g0 >= gamma_cap)
      throw InvariantError("gamma integral tail " + std::to_string(out.tail_estimate) +
                           " still above tolerance at gamma_max=" + std::to_string(g0));
  }
  out.gamma_max = g0;
  out.gamma_term = total / std::numbers::pi;
  out.abs_error = std::abs(out.lhs - out.poisson_term - out.gamma_term);
  out.rel_error = out.lhs != 0.0 ? out.abs_error / std::abs(out.lhs) : out.abs_error;
  return out;
}

double laguerre(int k, double alpha, double x) {
  if (k < 0) throw PreconditionError("Laguerre degree must be nonnegative");
  double prev = 1.0;
  if (k == 0) return prev;
  double cur = 1.0 + alpha - x;
  for (int j = 1; j < k; ++j) {
    const double next = ((2 * j + 1 + alpha - x) * cur - (j + alpha) * prev) / (j + 1);
    prev = cur;
    cur = next;
  }
  return cur;
}

double laguerre_phi(int k, int n, double lambda, double z_norm) {
  if (k < 0) throw PreconditionError("Laguerre index must be nonnegative");
  if (k > 10000) throw PreconditionError("Laguerre index above 10^4 refused");
  if (lambda == 0.0) throw PreconditionError("lambda must be nonzero");
  if (n < 1) throw PreconditionError("dimension must be >= 1");
  const double x = std::abs(lambda) * z_norm * z_norm;
  return laguerre(k, n - 1, 0.5 * x) * std::exp(-0.25 * x);
}

double laguerre_normaliser(int k, int n) {
  return std::exp(std::lgamma(k + 1.0) + std::lgamma(static_cast<double>(n)) - std::lgamma(k + n + 0.0));
}

Complex r_k_coefficient(int k, int n, double lambda, double r, int n_theta) {
  const int need = 8 + 2 * static_cast<int>(std::ceil(std::abs(lambda) * r * r));
  if (n_theta < need)
    throw PreconditionError("n_theta=" + std::to_string(n_theta) + " too small for lambda r^2; need " +
                            std::to_string(need));
  const GaussRule g = gauss_legendre(n_theta, -std::numbers::pi / 2, std::numbers::pi / 2);
  const double norm = theta_normaliser(n) * laguerre_normaliser(k, n);
  Complex s(0.0, 0.0);
  for (int i = 0; i < n_theta; ++i) {
    const double c = std::cos(g.nodes[i]);
    const double phi = laguerre_phi(k, n, lambda, r * std::sqrt(c));
    s += g.weights[i] * phi * std::pow(c, n - 1) * std::polar(1.0, 0.25 * lambda * r * r * std::sin(g.nodes[i]));
  }
  return norm * s;
}

void write_gamma_table(std::ostream& os, int Q, double kappa, const std::vector<double>& gammas) {
  os << "gamma,abs_a,fhat_error\n";
  os.precision(17);
  for (double g : gammas) {
    const double err = std::abs(f_hat_numeric(Q, kappa, g) - f_hat_closed_form(Q, g));
    os << g << ',' << std::abs(a_coefficient(Q, g)) << ',' << err << '\n';
  }
}

}  // namespace heis
