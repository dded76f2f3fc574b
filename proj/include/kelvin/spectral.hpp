#pragma once

// Periodic spectral tools on uniform grids t_j = 2*pi*j/n: FFT-based
// differentiation, trigonometric interpolation, circular convolution and the
// Kress product-quadrature weights for the logarithmic kernel.

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "kelvin/core.hpp"

namespace kelvin::spectral {

inline int wavenumber(int k, int n) noexcept { return k <= n / 2 ? k : k - n; }

inline std::vector<Point> forward(std::span<const Point> z) {
  Eigen::FFT<double> fft;
  std::vector<Point> in(z.begin(), z.end());
  std::vector<Point> out;
  fft.fwd(out, in);
  return out;
}

/// Inverse transform including the 1/n normalisation.
inline std::vector<Point> inverse(std::span<const Point> hat) {
  Eigen::FFT<double> fft;
  std::vector<Point> in(hat.begin(), hat.end());
  std::vector<Point> out;
  fft.inv(out, in);
  return out;
}

/// d/dt of the trigonometric interpolant; the Nyquist mode is dropped.
inline std::vector<Point> derivative(std::span<const Point> z) {
  const int n = static_cast<int>(z.size());
  auto hat = forward(z);
  for (int k = 0; k < n; ++k) {
    if (n % 2 == 0 && k == n / 2) {
      hat[k] = 0.0;
    } else {
      hat[k] *= Point(0.0, wavenumber(k, n));
    }
  }
  return inverse(hat);
}

inline std::vector<Point> second_derivative(std::span<const Point> z) {
  const int n = static_cast<int>(z.size());
  auto hat = forward(z);
  for (int k = 0; k < n; ++k) {
    const double kk = wavenumber(k, n);
    hat[k] *= -kk * kk;
  }
  return inverse(hat);
}

/// Resample the trigonometric interpolant on a uniform grid of size m.
inline std::vector<Point> resample(std::span<const Point> z, int m) {
  const int n = static_cast<int>(z.size());
  if (m == n) return {z.begin(), z.end()};
  auto hat = forward(z);
  std::vector<Point> out(m, Point{});
  const double scale = static_cast<double>(m) / n;
  const int kmax = std::min(n, m) / 2;
  for (int k = 0; k < n; ++k) {
    const int kk = wavenumber(k, n);
    if (std::abs(kk) > kmax) continue;
    Point c = hat[k] * scale;
    const bool nyquist_in = (n % 2 == 0 && std::abs(kk) == n / 2);
    const bool nyquist_out = (m % 2 == 0 && std::abs(kk) == m / 2);
    if (nyquist_in && m > n) {
      // split the input Nyquist mode symmetrically between +-n/2
      out[n / 2] += 0.5 * c;
      out[m - n / 2] += 0.5 * c;
      continue;
    }
    if (nyquist_out && !nyquist_in) {
      // both +-m/2 alias to the output Nyquist slot
      out[m / 2] += c;
      continue;
    }
    out[kk >= 0 ? kk : m + kk] += c;
  }
  return inverse(out);
}

/// Evaluate the trigonometric interpolant of z at arbitrary parameters.
inline std::vector<Point> interpolate(std::span<const Point> z,
                                      std::span<const double> t) {
  const int n = static_cast<int>(z.size());
  auto hat = forward(z);
  for (auto& c : hat) c /= static_cast<double>(n);
  const int half = n / 2;
  std::vector<Point> out(t.size());
  for (std::size_t p = 0; p < t.size(); ++p) {
    const Point step = unit(t[p]);
    Point pos = 1.0;
    Point acc = hat[0];
    for (int k = 1; k < (n + 1) / 2; ++k) {
      pos *= step;
      acc += hat[k] * pos + hat[n - k] * std::conj(pos);
    }
    if (n % 2 == 0) acc += hat[half] * std::cos(half * t[p]);
    out[p] = acc;
  }
  return out;
}

/// out_i = sum_j a_{(i-j) mod n} b_j.
inline std::vector<Point> circular_convolve(std::span<const double> a,
                                            std::span<const Point> b) {
  const std::size_t n = a.size();
  std::vector<Point> ac(a.begin(), a.end());
  auto ah = forward(ac);
  auto bh = forward(b);
  for (std::size_t k = 0; k < n; ++k) ah[k] *= bh[k];
  return inverse(ah);
}

/// Kress quadrature data for n equispaced nodes:
///   int_0^{2pi} ln(4 sin^2((t_i - s)/2)) f(s) ds ~ sum_j weights[(i-j) mod n] f_j
/// and log_half_sin[k] = ln|2 sin(pi k / n)| (k != 0), used to peel the
/// singularity off ln|x(t_i) - x(t_j)|.
struct KressTable {
  int n = 0;
  std::vector<double> weights;
  std::vector<double> log_half_sin;

  explicit KressTable(int size) : n(size), weights(size), log_half_sin(size, 0.0) {
    const int half = n / 2;
    std::vector<Point> hat(n, Point{});
    for (int l = 1; l < half; ++l) {
      const double c = -(two_pi / n) / l;
      hat[l] = c * static_cast<double>(n);
      hat[n - l] = c * static_cast<double>(n);
    }
    if (n % 2 == 0) {
      hat[half] = -(4.0 * pi / (static_cast<double>(n) * n)) * n;
    } else if (half >= 1) {
      const double c = -(two_pi / n) / half;
      hat[half] = c * static_cast<double>(n);
      hat[n - half] = c * static_cast<double>(n);
    }
    auto r = inverse(hat);
    for (int k = 0; k < n; ++k) weights[k] = r[k].real();
    for (int k = 1; k < n; ++k) log_half_sin[k] = std::log(std::abs(2.0 * std::sin(pi * k / n)));
  }

  static std::shared_ptr<const KressTable> get(int size) {
    static std::mutex mutex;
    static std::map<int, std::shared_ptr<const KressTable>> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(size);
    if (it != cache.end()) return it->second;
    auto table = std::make_shared<const KressTable>(size);
    if (cache.size() > 64) cache.clear();
    cache.emplace(size, table);
    return table;
  }
};

}  // namespace kelvin::spectral
