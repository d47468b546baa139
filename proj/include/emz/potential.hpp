#pragma once

#include <string>
#include <vector>

namespace emz {

enum class PotentialKind { Harmonic, Quartic, DoubleWell, Polynomial };

std::string to_string(PotentialKind kind);

/// Confining polynomial potential V(q) on the line.
///
/// Canonical storage is the power basis, V(q) = sum_k c_k q^k. Construction
/// rejects non-confining shapes (odd degree, or leading coefficient <= 0).
class Potential {
 public:
  /// V = 0.5 * omega2 * q^2
  static Potential harmonic(double omega2);
  /// V = 0.25 * a * q^4
  static Potential quartic(double a);
  /// V = 0.25 * a * q^4 - 0.5 * b * q^2 (barrier at the origin for b > 0)
  static Potential double_well(double a, double b);
  /// V = sum_k c[k] q^k
  static Potential polynomial(std::vector<double> c);

  double value(double q) const;
  double grad(double q) const;   // V'
  double hess(double q) const;   // V''

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  PotentialKind kind() const { return kind_; }
  const std::vector<double>& coefficients() const { return coeffs_; }
  /// Parameters as given at construction (omega2 / a / (a,b) / c_k), for
  /// config round-trips.
  const std::vector<double>& raw_parameters() const { return raw_; }

 private:
  Potential(PotentialKind kind, std::vector<double> coeffs, std::vector<double> raw);

  PotentialKind kind_;
  std::vector<double> coeffs_;
  std::vector<double> raw_;
};

}  // namespace emz
