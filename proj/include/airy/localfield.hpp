#pragma once

// Finite-precision arithmetic in Q_p and F_q((T)).
//
// Elements use a capped-relative model: a valuation plus at most N unit
// digits (N = FieldConfig::precision). An element is either exact (every
// digit beyond the stored ones is zero) or known only modulo
// ϖ^(valuation + digits.size()).

#include <compare>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "airy/error.hpp"

namespace airy {

enum class FieldKind { PAdic, Laurent };

struct FieldConfig {
  FieldKind kind = FieldKind::PAdic;
  uint32_t p = 5;
  uint32_t f = 1;
  /// Monic irreducible polynomial over F_p, low degree first, length f + 1.
  /// Empty means "use the built-in table" (or x for f = 1).
  std::vector<uint32_t> modulus;
  int precision = 40;

  static FieldConfig padic(uint32_t p, int precision = 40);
  static FieldConfig laurent(uint32_t p, uint32_t f = 1, int precision = 40);

  bool operator==(const FieldConfig&) const = default;
};

bool is_prime(uint64_t n);

/// Built-in Conway-style moduli for q in {4, 8, 9, 25, 27}.
std::optional<std::vector<uint32_t>> builtin_modulus(uint32_t p, uint32_t f);

/// The residue field F_q. Elements are encoded as integers
/// sum c_i p^i in [0, q) where c_i are power-basis coordinates.
class FiniteField {
 public:
  using Elem = uint32_t;

  FiniteField(uint32_t p, uint32_t f, std::vector<uint32_t> modulus);

  uint32_t p() const { return p_; }
  uint32_t f() const { return f_; }
  uint32_t q() const { return q_; }
  const std::vector<uint32_t>& modulus() const { return modulus_; }

  Elem add(Elem a, Elem b) const;
  Elem sub(Elem a, Elem b) const;
  Elem neg(Elem a) const;
  Elem mul(Elem a, Elem b) const;
  Elem inv(Elem a) const;
  Elem pow(Elem a, uint64_t e) const;
  Elem frobenius(Elem a) const { return pow(a, p_); }
  /// x^(p^(f-1)), the inverse of Frobenius.
  Elem inv_frobenius(Elem a) const;
  /// Tr_{F_q/F_p}, returned as an integer in [0, p).
  uint32_t trace(Elem a) const;
  Elem from_int(int64_t k) const;
  bool is_square(Elem a) const;

  std::vector<uint32_t> coords(Elem a) const;
  Elem from_coords(const std::vector<uint32_t>& c) const;

 private:
  Elem mul_slow(Elem a, Elem b) const;

  uint32_t p_, f_, q_;
  std::vector<uint32_t> modulus_;
  std::vector<uint16_t> mul_table_;  // q*q entries when q is small
  std::vector<uint16_t> inv_table_;
};

class LocalField;
using FieldPtr = std::shared_ptr<const LocalField>;

class LocalFieldElement;

/// A configured local field. Always handled through FieldPtr.
class LocalField : public std::enable_shared_from_this<LocalField> {
 public:
  static FieldPtr make(const FieldConfig& config);

  const FieldConfig& config() const { return config_; }
  FieldKind kind() const { return config_.kind; }
  uint32_t p() const { return config_.p; }
  uint32_t f() const { return config_.f; }
  /// Residue field size q = p^f.
  uint32_t q() const { return residue_.q(); }
  int precision() const { return config_.precision; }
  const FiniteField& residue_field() const { return residue_; }
  /// Characteristic of the field itself (0 for Q_p).
  uint32_t characteristic() const { return kind() == FieldKind::PAdic ? 0 : p(); }

  LocalFieldElement zero() const;
  LocalFieldElement one() const;
  /// ϖ = p for Q_p, T for F_q((T)).
  LocalFieldElement uniformizer() const;
  LocalFieldElement uniformizer_power(int64_t k) const;
  LocalFieldElement from_int(int64_t k) const;
  LocalFieldElement from_mpz(const mpz_class& k) const;
  /// Q_p only; F_q((T)) accepts it when p does not divide den.
  LocalFieldElement from_rational(const mpq_class& r) const;
  /// Residue-field element embedded as a constant (Teichmüller-free: digit lift).
  LocalFieldElement from_residue(FiniteField::Elem a) const;
  /// ϖ^v * sum digits[i] ϖ^i. Leading zero digits are absorbed into v.
  /// Exact ϖ^v·s for an integer s of either sign (Laurent: s mod p).
  LocalFieldElement from_signed(int64_t v, const mpz_class& s) const;
  LocalFieldElement from_digits(int64_t valuation, std::vector<uint32_t> digits,
                                bool exact) const;

 private:
  explicit LocalField(const FieldConfig& config, FiniteField residue)
      : config_(config), residue_(std::move(residue)) {}

  FieldConfig config_;
  FiniteField residue_;
};

class LocalFieldElement {
 public:
  static constexpr int64_t kInfinity = std::numeric_limits<int64_t>::max();

  LocalFieldElement() = default;

  const FieldPtr& field() const { return field_; }
  bool is_zero() const { return digits_.empty(); }
  bool is_exact() const { return exact_; }
  /// kInfinity for zero.
  int64_t valuation() const { return is_zero() ? kInfinity : valuation_; }
  /// Unit digits (PAdic: in [0,p); Laurent: F_q codes). Empty for zero.
  const std::vector<uint32_t>& digits() const { return digits_; }
  /// Exact p-adic value whose digits past the stored ones all equal p-1,
  /// i.e. ϖ^v times a negative integer.
  bool has_negative_tail() const { return negative_tail_; }
  /// Known modulo ϖ^absolute_precision(); kInfinity for exact values.
  int64_t absolute_precision() const;
  int relative_precision() const { return static_cast<int>(digits_.size()); }

  /// Coefficient of ϖ^i in the expansion (0 below the valuation).
  /// Throws PrecisionExhausted when i is beyond the known digits.
  uint32_t digit_at(int64_t i) const;

  /// |x| = q^-v as an exact rational; 0 for zero.
  mpq_class norm() const;

  bool is_unit() const { return !is_zero() && valuation_ == 0; }
  bool is_integral() const { return is_zero() || valuation_ >= 0; }
  /// Image in the residue field k = R/P. Requires valuation >= 0.
  FiniteField::Elem residue() const;

  LocalFieldElement operator-() const;
  friend LocalFieldElement operator+(const LocalFieldElement& a, const LocalFieldElement& b);
  friend LocalFieldElement operator-(const LocalFieldElement& a, const LocalFieldElement& b);
  friend LocalFieldElement operator*(const LocalFieldElement& a, const LocalFieldElement& b);
  LocalFieldElement& operator+=(const LocalFieldElement& b) { return *this = *this + b; }
  LocalFieldElement& operator-=(const LocalFieldElement& b) { return *this = *this - b; }
  LocalFieldElement& operator*=(const LocalFieldElement& b) { return *this = *this * b; }

  LocalFieldElement pow(uint64_t e) const;
  /// Multiply by ϖ^k (shifts the valuation, exactness preserved).
  LocalFieldElement shift(int64_t k) const;
  /// Reduce to at most `digits` relative digits (marks inexact if anything is dropped).
  LocalFieldElement truncate_relative(int digits) const;

  /// Structural equality: same valuation, digits and exactness.
  friend bool operator==(const LocalFieldElement& a, const LocalFieldElement& b);

  /// True when a ≡ b mod ϖ^k (both must be known that far).
  friend bool congruent(const LocalFieldElement& a, const LocalFieldElement& b, int64_t k);

 private:
  friend class LocalField;
  LocalFieldElement(FieldPtr field, int64_t valuation, std::vector<uint32_t> digits, bool exact,
                    bool negative_tail = false)
      : field_(std::move(field)),
        valuation_(valuation),
        digits_(std::move(digits)),
        exact_(exact),
        negative_tail_(negative_tail) {}

  FieldPtr field_;
  int64_t valuation_ = 0;
  std::vector<uint32_t> digits_;
  bool exact_ = true;
  bool negative_tail_ = false;
};

LocalFieldElement add(const LocalFieldElement& a, const LocalFieldElement& b);
LocalFieldElement mul(const LocalFieldElement& a, const LocalFieldElement& b);
LocalFieldElement inv(const LocalFieldElement& a);
LocalFieldElement div(const LocalFieldElement& a, const LocalFieldElement& b);
int64_t valuation(const LocalFieldElement& a);
mpq_class norm(const LocalFieldElement& a);

/// The unique t with t^n = c and residue(t) = residue_root (or the smallest
/// residue n-th root of c when none is given).
LocalFieldElement nth_root_hensel(const LocalFieldElement& c, uint32_t n,
                                  std::optional<FiniteField::Elem> residue_root = std::nullopt);

/// Smallest positive quadratic nonresidue mod an odd prime p.
uint32_t find_nonresidue(uint32_t p);

/// Legendre symbol (a/p) for odd p: -1, 0 or 1.
int legendre(int64_t a, uint32_t p);

/// Text form: `p^v * (d0 + d1*p + d2*p^2) [+ O(p^k)]` or
/// `T^v * ([c..] + [c..]*T) [+ O(T^k)]`; zero is `0`.
std::string to_string(const LocalFieldElement& a);
LocalFieldElement parse_element(const FieldPtr& field, const std::string& text);

/// Residue of ϖ^shift * a modulo ϖ^E as digit vector of length E, for the
/// residue rings used in coset summation. Requires v(a) + shift >= 0 and
/// enough known digits; otherwise PrecisionExhausted.
std::vector<uint32_t> residue_digits(const LocalFieldElement& a, int64_t shift, int64_t E);

}  // namespace airy
