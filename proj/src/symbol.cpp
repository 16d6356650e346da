#include "kreinlab/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace kreinlab {

BoundarySymbol BoundarySymbol::constant(double v, int m_max, int order_hint) {
  return generate(m_max, [v](int) { return v; }, order_hint);
}

BoundarySymbol BoundarySymbol::generate(int m_max, const std::function<double(int)>& f, int order_hint) {
  BoundarySymbol s;
  s.order_hint = order_hint;
  for (int m = 0; m <= m_max; ++m) s.values.emplace(m, f(m));
  return s;
}

double BoundarySymbol::at(int m) const {
  auto it = values.find(m);
  if (it == values.end()) throw std::out_of_range("BoundarySymbol: no entry for mode " + std::to_string(m));
  return it->second;
}

void BoundarySymbol::validate() const {
  for (const auto& [m, v] : values) {
    if (m < 0) throw std::invalid_argument("BoundarySymbol: negative mode " + std::to_string(m));
    if (!std::isfinite(v))
      throw std::invalid_argument("BoundarySymbol: non-finite entry at mode " + std::to_string(m));
    if (invertible && v == 0.0)
      throw std::invalid_argument("BoundarySymbol: zero entry of invertible symbol at mode " +
                                  std::to_string(m));
  }
}

void require_same_modes(const BoundarySymbol& a, const BoundarySymbol& b, const char* where) {
  bool same = a.values.size() == b.values.size();
  for (auto ia = a.values.begin(), ib = b.values.begin(); same && ia != a.values.end(); ++ia, ++ib)
    same = ia->first == ib->first;
  if (!same) throw std::invalid_argument(std::string(where) + ": mode-set mismatch");
}

namespace {

void check_t(double t) {
  if (!std::isfinite(t)) throw std::invalid_argument("TSpec: non-finite value");
  if (t == 0.0) throw std::invalid_argument("TSpec: T must be invertible (t_m != 0)");
}

}  // namespace

TSpec::TSpec(Kind k, std::vector<double> pattern, std::map<int, double> t)
    : kind_(k), pattern_(std::move(pattern)), table_(std::move(t)) {}

TSpec TSpec::constant(double a) {
  check_t(a);
  return TSpec(Kind::constant, {a}, {});
}

TSpec TSpec::periodic(std::vector<double> pattern) {
  if (pattern.empty()) throw std::invalid_argument("TSpec: empty pattern");
  for (double t : pattern) check_t(t);
  return TSpec(Kind::periodic, std::move(pattern), {});
}

TSpec TSpec::table(std::map<int, double> t) {
  if (t.empty()) throw std::invalid_argument("TSpec: empty table");
  double big = 0.0;
  for (const auto& [m, v] : t) {
    check_t(v);
    big = std::max(big, std::fabs(v));
  }
  // Values accumulating at 0 make T^{-1} unbounded; the correspondence needs
  // 0 in the resolvent set.
  for (const auto& [m, v] : t)
    if (std::fabs(v) < 1e-10 * big)
      throw std::invalid_argument("TSpec: values accumulate at 0 (T^{-1} unbounded)");
  return TSpec(Kind::table, {}, std::move(t));
}

double TSpec::value(int m) const {
  if (m < 0) throw std::out_of_range("TSpec: negative mode");
  switch (kind_) {
    case Kind::constant: return pattern_[0];
    case Kind::periodic: return pattern_[static_cast<std::size_t>(m) % pattern_.size()];
    case Kind::table: {
      auto it = table_.find(m);
      if (it == table_.end()) throw std::out_of_range("TSpec: no value for mode " + std::to_string(m));
      return it->second;
    }
  }
  return 0.0;
}

std::vector<double> TSpec::essential_spectrum(int min_repeat) const {
  std::vector<double> vals;
  if (kind_ == Kind::table) {
    for (const auto& [m, v] : table_) vals.push_back(v);
  } else {
    vals = pattern_;
  }
  std::sort(vals.begin(), vals.end());
  std::vector<double> out;
  for (std::size_t i = 0; i < vals.size();) {
    std::size_t j = i;
    while (j < vals.size() && std::fabs(vals[j] - vals[i]) <= 1e-12 * std::fabs(vals[i])) ++j;
    const int count = static_cast<int>(j - i);
    if (kind_ != Kind::table || count >= min_repeat) out.push_back(vals[i]);
    i = j;
  }
  return out;
}

}  // namespace kreinlab
