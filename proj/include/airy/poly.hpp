#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "airy/localfield.hpp"

namespace airy {

using Exponents = std::vector<uint32_t>;

/// Sparse polynomial in m variables over a local field. Terms are kept in a
/// map keyed by exponent tuple, so there are no duplicates and no zero
/// coefficients.
class MultiPoly {
 public:
  MultiPoly(FieldPtr field, size_t m);

  static MultiPoly constant(FieldPtr field, size_t m, const LocalFieldElement& c);
  /// y_i (0-based).
  static MultiPoly variable(FieldPtr field, size_t m, size_t i);
  static MultiPoly monomial(const LocalFieldElement& c, const Exponents& e);

  const FieldPtr& field() const { return field_; }
  size_t num_vars() const { return m_; }
  const std::map<Exponents, LocalFieldElement>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  /// -1 for the zero polynomial.
  int degree() const;
  MultiPoly homogeneous_part(uint32_t d) const;
  LocalFieldElement coefficient(const Exponents& e) const;
  LocalFieldElement constant_term() const;

  void add_term(const LocalFieldElement& c, const Exponents& e);

  friend MultiPoly operator+(const MultiPoly& a, const MultiPoly& b);
  friend MultiPoly operator-(const MultiPoly& a, const MultiPoly& b);
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
  MultiPoly scaled(const LocalFieldElement& c) const;
  MultiPoly pow(uint32_t e) const;

  friend bool operator==(const MultiPoly& a, const MultiPoly& b);

 private:
  FieldPtr field_;
  size_t m_;
  std::map<Exponents, LocalFieldElement> terms_;
};

uint32_t total_degree(const Exponents& e);

LocalFieldElement eval(const MultiPoly& h, const std::vector<LocalFieldElement>& y);

struct DiagonalLeading {
  uint32_t n = 0;
  std::vector<LocalFieldElement> a;
  /// One variable, char p dividing n: only the sharpened polynomial is usable.
  bool requires_sharpening = false;
};

/// Accepts h whose top-degree part is Σ a_i y_i^n with every a_i ≠ 0, in
/// characteristic 0 or with p ∤ n. Throws NotDiagonal, DegreeTooLow or
/// CharDividesDegree.
DiagonalLeading check_diagonal_leading(const MultiPoly& h);

/// (x, y) = xᵀ·G·y with G nonsingular.
class BilinearForm {
 public:
  BilinearForm(FieldPtr field, std::vector<std::vector<LocalFieldElement>> gram);

  static BilinearForm standard(FieldPtr field, size_t m);
  static BilinearForm diagonal(FieldPtr field, const std::vector<LocalFieldElement>& d);

  size_t dim() const { return gram_.size(); }
  const FieldPtr& field() const { return field_; }
  const std::vector<std::vector<LocalFieldElement>>& gram() const { return gram_; }
  bool is_standard() const;
  bool is_diagonal() const;
  /// Coefficients b with (x, y) = Σ b_i y_i, i.e. b = Gᵀx.
  std::vector<LocalFieldElement> linear_coefficients(const std::vector<LocalFieldElement>& x) const;
  /// Smallest integer D with |(x, y)| ≤ q^D |x||y| (max-norm of the Gram entries).
  int64_t bound_exponent() const;

 private:
  FieldPtr field_;
  std::vector<std::vector<LocalFieldElement>> gram_;
};

LocalFieldElement pair(const BilinearForm& form, const std::vector<LocalFieldElement>& x,
                       const std::vector<LocalFieldElement>& y);

/// max_i |v_i| as a valuation (min_i v(v_i)); kInfinity for the zero vector.
int64_t vector_valuation(const std::vector<LocalFieldElement>& v);

/// Text form `{coeff} * y1^e1*y2^e2 + ...`, highest degree first. One
/// variable prints as `y`.
std::string to_string(const MultiPoly& h);

/// Parses sums/products/powers of: integers, a/b, `{<element text>}`, p or T
/// (the uniformizer, any integer exponent), variables y / y1..ym, named
/// parameters, and parenthesized subexpressions.
MultiPoly parse_poly(const FieldPtr& field, size_t m, const std::string& text,
                     const std::map<std::string, LocalFieldElement>& params = {});

/// Parses a single field element in the same expression language (no variables).
LocalFieldElement parse_scalar(const FieldPtr& field, const std::string& text,
                               const std::map<std::string, LocalFieldElement>& params = {});

}  // namespace airy
