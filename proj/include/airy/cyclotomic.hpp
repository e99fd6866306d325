#pragma once

// Exact Q-linear combinations of p-power roots of unity.

#include <complex>
#include <compare>
#include <cstdint>
#include <map>
#include <string>

#include <gmpxx.h>
#include "json.hpp"

namespace airy {

/// The rational num / p^level in [0, 1), stored reduced: either level == 0
/// and num == 0, or p does not divide num.
struct RootExponent {
  uint64_t num = 0;
  uint32_t level = 0;

  static RootExponent make(uint64_t num, uint32_t level, uint32_t p);

  double as_double(uint32_t p) const;
  RootExponent negated(uint32_t p) const;
  RootExponent plus(const RootExponent& o, uint32_t p) const;

  bool operator==(const RootExponent&) const = default;
};

uint64_t ipow(uint64_t base, uint32_t e);

class CyclotomicSum {
 public:
  CyclotomicSum() = default;

  static CyclotomicSum rational(const mpq_class& c);
  /// coeff * e^{2πi·exponent}
  static CyclotomicSum root(uint32_t p, RootExponent exponent, const mpq_class& coeff = 1);

  /// 0 while every exponent is 0 (a plain rational).
  uint32_t prime() const { return p_; }
  const mpq_class& scale() const { return scale_; }
  /// Raw (unreduced) terms; use canonical() for a unique form.
  const std::map<std::pair<uint32_t, uint64_t>, mpq_class>& terms() const { return terms_; }

  void add_term(uint32_t p, RootExponent exponent, const mpq_class& coeff);

  friend CyclotomicSum operator+(const CyclotomicSum& a, const CyclotomicSum& b);
  friend CyclotomicSum operator-(const CyclotomicSum& a, const CyclotomicSum& b);
  friend CyclotomicSum operator*(const CyclotomicSum& a, const CyclotomicSum& b);
  CyclotomicSum& operator+=(const CyclotomicSum& b);

  CyclotomicSum scaled(const mpq_class& w) const;
  /// Multiply by e^{2πi·exponent}.
  CyclotomicSum times_root(uint32_t p, RootExponent exponent) const;
  CyclotomicSum conj() const;

  /// Unique representative: scale folded into the coefficients, terms written
  /// in the power basis of the smallest Q(ζ_{p^L}) containing the value.
  CyclotomicSum canonical() const;
  bool is_zero() const;
  std::complex<double> to_complex() const;
  /// Value is a rational number; returns it when so.
  bool is_rational(mpq_class* value = nullptr) const;

  friend bool operator==(const CyclotomicSum& a, const CyclotomicSum& b);

  /// {"prime", "scale", "terms": [{num, den_pow, coeff_num, coeff_den}]}
  nlohmann::json to_json() const;
  static CyclotomicSum from_json(const nlohmann::json& j);
  std::string to_string() const;

 private:
  void adopt_prime(uint32_t p);

  uint32_t p_ = 0;
  // key: (level, num) of the exponent
  std::map<std::pair<uint32_t, uint64_t>, mpq_class> terms_;
  mpq_class scale_ = 1;
};

CyclotomicSum cyclo_add(const CyclotomicSum& a, const CyclotomicSum& b);
CyclotomicSum cyclo_scale(const CyclotomicSum& a, const mpq_class& w);
bool cyclo_is_zero(const CyclotomicSum& a);
std::complex<double> cyclo_to_complex(const CyclotomicSum& a);

}  // namespace airy
