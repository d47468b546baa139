#include "emz/potential.hpp"

#include <cmath>

#include "emz/errors.hpp"

namespace emz {

std::string to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::Harmonic: return "harmonic";
    case PotentialKind::Quartic: return "quartic";
    case PotentialKind::DoubleWell: return "double-well";
    case PotentialKind::Polynomial: return "polynomial";
  }
  return "?";
}

Potential::Potential(PotentialKind kind, std::vector<double> coeffs, std::vector<double> raw)
    : kind_(kind), coeffs_(std::move(coeffs)), raw_(std::move(raw)) {
  while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
  const int deg = static_cast<int>(coeffs_.size()) - 1;
  if (deg < 2)
    throw DomainError("potential: degree " + std::to_string(deg) + " is not confining");
  if (deg % 2 != 0)
    throw DomainError("potential: odd degree " + std::to_string(deg) + " is not confining");
  if (!(coeffs_.back() > 0.0))
    throw DomainError("potential: leading coefficient c_" + std::to_string(deg) + " = " +
                      std::to_string(coeffs_.back()) + " must be positive");
}

Potential Potential::harmonic(double omega2) {
  if (!(omega2 > 0)) throw DomainError("potential: harmonic omega2 must be positive");
  return Potential(PotentialKind::Harmonic, {0.0, 0.0, 0.5 * omega2}, {omega2});
}

Potential Potential::quartic(double a) {
  if (!(a > 0)) throw DomainError("potential: quartic coefficient must be positive");
  return Potential(PotentialKind::Quartic, {0.0, 0.0, 0.0, 0.0, 0.25 * a}, {a});
}

Potential Potential::double_well(double a, double b) {
  if (!(a > 0)) throw DomainError("potential: double-well quartic coefficient must be positive");
  return Potential(PotentialKind::DoubleWell, {0.0, 0.0, -0.5 * b, 0.0, 0.25 * a}, {a, b});
}

Potential Potential::polynomial(std::vector<double> c) {
  std::vector<double> raw = c;
  return Potential(PotentialKind::Polynomial, std::move(c), std::move(raw));
}

double Potential::value(double q) const {
  double v = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) v = v * q + *it;
  return v;
}

double Potential::grad(double q) const {
  double v = 0.0;
  for (int k = degree(); k >= 1; --k) v = v * q + k * coeffs_[k];
  return v;
}

double Potential::hess(double q) const {
  double v = 0.0;
  for (int k = degree(); k >= 2; --k) v = v * q + static_cast<double>(k) * (k - 1) * coeffs_[k];
  return v;
}

}  // namespace emz
