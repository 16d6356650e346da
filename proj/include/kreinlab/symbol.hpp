#pragma once

#include <functional>
#include <map>
#include <vector>

namespace kreinlab {

/// Operator on the unit circle that is diagonal in the Fourier basis, stored
/// as one real value per non-negative mode (negative modes mirror m).
struct BoundarySymbol {
  std::map<int, double> values;
  /// Expected growth exponent in m (+1 for the DtN map, -1 for Lambda).
  int order_hint = 0;
  /// When set, every stored value must be nonzero.
  bool invertible = false;

  static BoundarySymbol constant(double v, int m_max, int order_hint = 0);
  static BoundarySymbol generate(int m_max, const std::function<double(int)>& f, int order_hint = 0);

  bool contains(int m) const { return values.count(m) != 0; }
  /// Throws std::out_of_range for a missing mode.
  double at(int m) const;
  int max_mode() const { return values.empty() ? -1 : values.rbegin()->first; }
  /// Throws std::invalid_argument on non-finite entries or on a zero entry of
  /// an invertible symbol.
  void validate() const;
};

/// Throws std::invalid_argument unless both symbols carry the same modes.
void require_same_modes(const BoundarySymbol& a, const BoundarySymbol& b, const char* where);

/// The operator T acting diagonally over modes on the nullspace Z.
class TSpec {
 public:
  enum class Kind { constant, periodic, table };

  /// T = aI. Throws for a == 0 or non-finite a.
  static TSpec constant(double a);
  /// t_m = pattern[m mod pattern.size()]; the essential spectrum is the set of
  /// pattern values.
  static TSpec periodic(std::vector<double> pattern);
  /// Explicit finite table of values.
  static TSpec table(std::map<int, double> t);

  Kind kind() const { return kind_; }
  /// Throws std::out_of_range when a table lacks mode m.
  double value(int m) const;
  /// Accumulation set of {t_m}. For tables: values attained at least
  /// `min_repeat` times, deduplicated at relative tolerance 1e-12.
  std::vector<double> essential_spectrum(int min_repeat = 3) const;

 private:
  TSpec(Kind k, std::vector<double> pattern, std::map<int, double> t);
  Kind kind_;
  std::vector<double> pattern_;
  std::map<int, double> table_;
};

}  // namespace kreinlab
