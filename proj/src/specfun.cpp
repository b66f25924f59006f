#include "mwe/specfun.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace mwe::specfun {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = std::numeric_limits<double>::min() * 16;
constexpr int kMaxIter = 20000;
constexpr double kPi = 3.141592653589793238462643383279502884;

// Taylor coefficients of 1/Gamma(z) = sum_k c_k z^k (A&S 6.1.34).
constexpr double kInvGamma[] = {
    0.0,
    1.0,
    0.5772156649015329,
    -0.6558780715202538,
    -0.0420026350340952,
    0.1665386113822915,
    -0.0421977345555443,
    -0.0096219715278770,
    0.0072189432466630,
    -0.0011651675918591,
    -0.0002152416741149,
    0.0001280502823882,
    -0.0000201348547807,
};

// gam1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu), gam2 the even half;
// both smooth through mu = 0.
void temme_gammas(double mu, double& gam1, double& gam2, double& gampl,
                  double& gammi) {
  if (std::abs(mu) < 1e-2) {
    const double m2 = mu * mu;
    gam1 = -(kInvGamma[2] + m2 * (kInvGamma[4] + m2 * (kInvGamma[6] +
             m2 * (kInvGamma[8] + m2 * (kInvGamma[10] + m2 * kInvGamma[12])))));
    gam2 = 1.0 + m2 * (kInvGamma[3] + m2 * (kInvGamma[5] + m2 * (kInvGamma[7] +
           m2 * (kInvGamma[9] + m2 * kInvGamma[11]))));
  } else {
    const double gp = 1.0 / std::tgamma(1.0 + mu);
    const double gm = 1.0 / std::tgamma(1.0 - mu);
    gam1 = (gm - gp) / (2.0 * mu);
    gam2 = (gm + gp) / 2.0;
  }
  gampl = gam2 - mu * gam1;
  gammi = gam2 + mu * gam1;
}

// Temme's series for K_mu(x), K_{mu+1}(x), |mu| <= 1/2, 0 < x <= 2.
void bessel_k_temme(double mu, double x, double& kmu, double& kmu1) {
  const double x2 = 0.5 * x;
  const double pimu = kPi * mu;
  const double fact = (std::abs(pimu) < kEps) ? 1.0 : pimu / std::sin(pimu);
  double d = -std::log(x2);
  double e = mu * d;
  const double fact2 = (std::abs(e) < kEps) ? 1.0 : std::sinh(e) / e;
  double gam1, gam2, gampl, gammi;
  temme_gammas(mu, gam1, gam2, gampl, gammi);
  double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
  double sum = ff;
  e = std::exp(e);
  double p = 0.5 * e / gampl;
  double q = 0.5 / (e * gammi);
  double c = 1.0;
  const double d2 = x2 * x2;
  double sum1 = p;
  for (int i = 1; i <= kMaxIter; ++i) {
    ff = (i * ff + p + q) / (i * i - mu * mu);
    c *= d2 / i;
    p /= (i - mu);
    q /= (i + mu);
    const double del = c * ff;
    sum += del;
    const double del1 = c * (p - i * ff);
    sum1 += del1;
    if (std::abs(del) < std::abs(sum) * kEps) break;
  }
  kmu = sum;
  kmu1 = sum1 * (2.0 / x);
}

// Steed's continued fraction CF2 for the scaled e^x K_mu(x), x > 2.
void bessel_k_cf2_scaled(double mu, double x, double& kmu, double& kmu1) {
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d, delh = d;
  double q1 = 0.0, q2 = 1.0;
  const double a1 = 0.25 - mu * mu;
  double q = a1, c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 2; i <= kMaxIter; ++i) {
    a -= 2 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < kEps) break;
  }
  h = a1 * h;
  kmu = std::sqrt(kPi / (2.0 * x)) / s;
  kmu1 = kmu * (mu + x + 0.5 - h) / x;
}

struct BesselIK {
  double i_scaled;  // e^{-x} I_nu(x)
  double k_scaled;  // e^{x} K_nu(x)
};

// Combined evaluation for nu >= 0, x > 0: CF1 for the I ratio, Temme series
// or CF2 for K at the fractional order, Wronskian normalization, upward
// recurrence for K.
BesselIK bessel_ik_scaled(double nu, double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::domain_error("bessel: x must be positive and finite");
  }
  if (nu < 0.0 || !std::isfinite(nu)) {
    throw std::domain_error("bessel: order must be non-negative");
  }
  const int nl = static_cast<int>(nu + 0.5);
  const double mu = nu - nl;  // in [-1/2, 1/2]
  const double xi = 1.0 / x;
  const double xi2 = 2.0 * xi;

  // CF1: I'_nu / I_nu.
  double h = std::max(nu * xi, kTiny);
  double b = xi2 * nu;
  double d = 0.0;
  double c = h;
  for (int i = 1; i <= kMaxIter; ++i) {
    b += xi2;
    d = 1.0 / (b + d);
    c = b + 1.0 / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }

  // Downward recurrence of the unnormalized I to order mu.
  double ril = kTiny;
  double ripl = h * ril;
  const double ril1 = ril;
  double fact = nu * xi;
  for (int l = nl; l >= 1; --l) {
    const double ritemp = fact * ril + ripl;
    fact -= xi;
    ripl = fact * ritemp + ril;
    ril = ritemp;
  }
  const double f = ripl / ril;  // I'_mu / I_mu

  double kmu, kmu1;
  if (x <= 2.0) {
    bessel_k_temme(mu, x, kmu, kmu1);
    const double scale = std::exp(x);
    kmu *= scale;
    kmu1 *= scale;
  } else {
    bessel_k_cf2_scaled(mu, x, kmu, kmu1);
  }
  // Wronskian I_mu K'_mu - I'_mu K_mu = -1/x gives the true (scaled) I_mu.
  const double kmup = mu * xi * kmu - kmu1;
  const double imu_scaled = xi / (f * kmu - kmup);

  BesselIK out;
  out.i_scaled = imu_scaled * (ril1 / ril);
  // Upward recurrence K_{mu+1} = K_{mu-1} + (2 mu / x) K_mu.
  for (int i = 1; i <= nl; ++i) {
    const double ktemp = (mu + i) * xi2 * kmu1 + kmu;
    kmu = kmu1;
    kmu1 = ktemp;
  }
  out.k_scaled = kmu;
  if (!std::isfinite(out.k_scaled) || !std::isfinite(out.i_scaled)) {
    throw std::range_error("bessel: evaluation overflowed");
  }
  return out;
}

double log_gamma_half_int(double v) { return std::lgamma(v); }

}  // namespace

double bessel_k_scaled(double nu, double x) { return bessel_ik_scaled(nu, x).k_scaled; }

double bessel_i_scaled(double nu, double x) { return bessel_ik_scaled(nu, x).i_scaled; }

double bessel_k(double nu, double x) {
  const double ks = bessel_k_scaled(nu, x);
  return ks * std::exp(-x);
}

double bessel_i(double nu, double x) {
  const double is = bessel_i_scaled(nu, x);
  const double r = is * std::exp(x);
  if (!std::isfinite(r)) throw std::range_error("bessel_i: overflow");
  return r;
}

double sphere_area(int n) {
  if (n < 1) throw std::domain_error("sphere_area: n must be positive");
  return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
}

void validate(const KernelQuery& q) {
  if (q.n < 3) throw std::domain_error("kernel query: n must be >= 3");
  if (q.m < 1) throw std::domain_error("kernel query: m must be >= 1");
  if (!(q.r > 0.0) || !std::isfinite(q.r)) {
    throw std::domain_error("kernel query: r must be positive");
  }
  if (!std::isfinite(q.k) || q.k < 0.0) {
    throw std::domain_error("kernel query: k must be non-negative");
  }
  if (q.k == 0.0 && q.m != 1) {
    throw std::domain_error("kernel query: k = 0 is only defined for m = 1");
  }
}

double euclid_resolvent_kernel(const KernelQuery& q) {
  validate(q);
  const double n = q.n;
  if (q.k == 0.0) {
    // Green function of Delta on R^n.
    return std::exp(log_gamma_half_int(0.5 * n - 1.0)) /
           (4.0 * std::pow(kPi, 0.5 * n)) * std::pow(q.r, 2.0 - n);
  }
  const double nu = 0.5 * n - q.m;
  const double z = q.k * q.r;
  // C_m = (2 pi)^{-n/2} 2^{1-m} / (m-1)!
  const double log_c = -0.5 * n * std::log(2.0 * kPi) +
                       (1.0 - q.m) * std::log(2.0) - std::lgamma(q.m);
  const double ks = bessel_k_scaled(std::abs(nu), z);
  const double log_val = log_c + nu * std::log(q.k) - nu * std::log(q.r) +
                         std::log(ks) - z;
  const double val = std::exp(log_val);
  if (!std::isfinite(val)) throw std::range_error("euclid_resolvent_kernel: overflow");
  return val;
}

double euclid_resolvent_gradient(const KernelQuery& q) {
  validate(q);
  const double n = q.n;
  if (q.k == 0.0) {
    return (n - 2.0) * std::exp(log_gamma_half_int(0.5 * n - 1.0)) /
           (4.0 * std::pow(kPi, 0.5 * n)) * std::pow(q.r, 1.0 - n);
  }
  const double nu = 0.5 * n - q.m;
  const double z = q.k * q.r;
  const double log_c = -0.5 * n * std::log(2.0 * kPi) +
                       (1.0 - q.m) * std::log(2.0) - std::lgamma(q.m);
  // |d/dr| of C_m k^{2nu} (kr)^{-nu} K_nu(kr) = C_m k^{nu+1} r^{-nu} K_{nu+1}(kr).
  const double ks = bessel_k_scaled(std::abs(nu + 1.0), z);
  const double log_val = log_c + (nu + 1.0) * std::log(q.k) -
                         nu * std::log(q.r) + std::log(ks) - z;
  const double val = std::exp(log_val);
  if (!std::isfinite(val)) throw std::range_error("euclid_resolvent_gradient: overflow");
  return val;
}

namespace {

// m = 1 radial reduction: (1/s_n) (r r')^{1-n/2} I_nu(k r_<) K_nu(k r_>).
double radial_m1(int n, double k, double ra, double rb) {
  const double nu = 0.5 * n - 1.0;
  const double rlo = std::min(ra, rb);
  const double rhi = std::max(ra, rb);
  const BesselIK lo = bessel_ik_scaled(nu, k * rlo);
  const BesselIK hi = bessel_ik_scaled(nu, k * rhi);
  const double log_val = -nu * std::log(ra * rb) + std::log(lo.i_scaled) +
                         std::log(hi.k_scaled) - k * (rhi - rlo);
  return std::exp(log_val) / sphere_area(n);
}

// Exact d/d(k^2) of radial_m1 via Bessel recurrences.
double radial_m1_dk2(int n, double k, double ra, double rb) {
  const double nu = 0.5 * n - 1.0;
  const double a = std::min(ra, rb);
  const double b = std::max(ra, rb);
  const BesselIK lo = bessel_ik_scaled(nu, k * a);
  const BesselIK hi = bessel_ik_scaled(nu, k * b);
  const BesselIK lo1 = bessel_ik_scaled(nu + 1.0, k * a);
  const BesselIK hi1 = bessel_ik_scaled(nu + 1.0, k * b);
  const double damp = std::exp(-k * (b - a));
  // d/dk [I_nu(ka) K_nu(kb)] = a I_{nu+1} K_nu - b I_nu K_{nu+1} + (2nu/k) I_nu K_nu
  const double dk = (a * lo1.i_scaled * hi.k_scaled -
                     b * lo.i_scaled * hi1.k_scaled +
                     (2.0 * nu / k) * lo.i_scaled * hi.k_scaled) * damp;
  return std::pow(ra * rb, -nu) / sphere_area(n) * dk / (2.0 * k);
}

}  // namespace

double radial_end_kernel(int n, int m, double k, double r_source, double r_field) {
  if (n < 3) throw std::domain_error("radial_end_kernel: n must be >= 3");
  if (!(k > 0.0)) throw std::domain_error("radial_end_kernel: k must be positive");
  if (!(r_source > 0.0) || !(r_field > 0.0)) {
    throw std::domain_error("radial_end_kernel: radii must be positive");
  }
  switch (m) {
    case 1:
      return radial_m1(n, k, r_source, r_field);
    case 2:
      return -radial_m1_dk2(n, k, r_source, r_field);
    case 3: {
      // (1/2) d^2/d(k^2)^2 of the m=1 kernel: Richardson-extrapolated central
      // difference of the exact first derivative.
      const double s = k * k;
      const double h = std::max(s * 2e-4, 1e-12);
      auto d1 = [&](double ss) { return radial_m1_dk2(n, std::sqrt(ss), r_source, r_field); };
      auto central = [&](double hh) { return (d1(s + hh) - d1(s - hh)) / (2.0 * hh); };
      const double c1 = central(h);
      const double c2 = central(0.5 * h);
      return 0.5 * (4.0 * c2 - c1) / 3.0;
    }
    default:
      throw std::invalid_argument("radial_end_kernel: m > 3 not supported");
  }
}

Quadrature gauss_laguerre(int points) {
  if (points < 1) throw std::domain_error("gauss_laguerre: points must be >= 1");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(points, points);
  for (int i = 0; i < points; ++i) {
    jacobi(i, i) = 2.0 * i + 1.0;
    if (i + 1 < points) {
      jacobi(i, i + 1) = i + 1.0;
      jacobi(i + 1, i) = i + 1.0;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  Quadrature q;
  q.nodes.resize(points);
  q.weights.resize(points);
  for (int i = 0; i < points; ++i) {
    q.nodes[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    q.weights[i] = v0 * v0;
  }
  return q;
}

}  // namespace mwe::specfun
