#include "maxns/quadrature.hpp"

#include "maxns/errors.hpp"

#include <cmath>

namespace maxns {

Eigen::VectorXd grid_points(int nx) {
  if (nx < 2) throw ValidationError("nx: grid needs at least 2 points");
  Eigen::VectorXd xs(nx);
  const double dx = kPi / (nx - 1);
  for (int j = 0; j < nx; ++j) xs[j] = dx * j;
  xs[nx - 1] = kPi;  // avoid accumulated rounding at the right endpoint
  return xs;
}

Eigen::VectorXd simpson_weights(int nx) {
  if (nx < 3 || nx % 2 == 0)
    throw ValidationError("nx: composite Simpson needs an odd point count >= 3");
  const double dx = kPi / (nx - 1);
  Eigen::VectorXd w(nx);
  w[0] = w[nx - 1] = dx / 3.0;
  for (int j = 1; j < nx - 1; ++j) w[j] = (j % 2 == 1 ? 4.0 : 2.0) * dx / 3.0;
  return w;
}

std::complex<double> weighted_inner(const Eigen::VectorXcd& f,
                                    const Eigen::VectorXcd& g,
                                    const Eigen::VectorXd& w) {
  if (f.size() != g.size() || f.size() != w.size())
    throw ValidationError("weighted_inner: size mismatch");
  std::complex<double> acc{0.0, 0.0};
  for (Eigen::Index j = 0; j < f.size(); ++j) acc += w[j] * f[j] * std::conj(g[j]);
  return acc;
}

std::array<std::complex<double>, 4> exp_moments(double h, std::complex<double> z) {
  using C = std::complex<double>;
  std::array<C, 4> K{};
  const C zh = z * h;
  if (std::abs(zh) < 0.25) {
    // K_m = h^(m+1) sum_j (zh)^j / (j! (m + j + 1)); |zh| < 1/4 converges fast.
    for (int m = 0; m < 4; ++m) {
      C term{1.0, 0.0};
      C sum = term / double(m + 1);
      for (int j = 1; j <= 24; ++j) {
        term *= zh / double(j);
        sum += term / double(m + j + 1);
      }
      K[m] = std::pow(h, m + 1) * sum;
    }
  } else {
    const C ezh = std::exp(zh);
    K[0] = (ezh - 1.0) / z;
    double hm = 1.0;
    for (int m = 1; m < 4; ++m) {
      hm *= h;
      K[m] = (hm * ezh - double(m) * K[m - 1]) / z;
    }
  }
  return K;
}

}  // namespace maxns
