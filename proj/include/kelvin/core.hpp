#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace kelvin {

/// Points of the plane are stored as complex numbers x + iy.
using Point = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidContour : public Error {
 public:
  using Error::Error;
};

class InvalidBoundary : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Raised by iterative solvers; carries the last residual reached.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// A time step violated dt * max|u| <= 0.5 * min spacing.
class CflViolation : public Error {
 public:
  CflViolation(const std::string& what, double suggested_dt)
      : Error(what), suggested_dt_(suggested_dt) {}
  double suggested_dt() const noexcept { return suggested_dt_; }

 private:
  double suggested_dt_;
};

inline double cross(Point a, Point b) noexcept {
  return a.real() * b.imag() - a.imag() * b.real();
}

inline double dot(Point a, Point b) noexcept {
  return a.real() * b.real() + a.imag() * b.imag();
}

inline Point unit(double angle) noexcept { return std::polar(1.0, angle); }

}  // namespace kelvin
