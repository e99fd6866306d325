#pragma once

// The built-in additive characters: ψ₀ on Q_p (fractional part of the
// principal part) and θ∘Tr∘Res on F_q((T)). Both have order 0.

#include "airy/cyclotomic.hpp"
#include "airy/localfield.hpp"

namespace airy {

struct CharacterValue {
  uint32_t p = 0;
  RootExponent exponent;

  CharacterValue operator*(const CharacterValue& o) const;
  CharacterValue inverse() const;
  bool is_trivial() const { return exponent.level == 0; }
  CyclotomicSum as_sum(const mpq_class& coeff = 1) const;
  bool operator==(const CharacterValue&) const = default;
};

CharacterValue psi(const LocalFieldElement& x);

/// Order of the twisted character x ↦ ψ(cx): ord(ψ) + v(c).
int64_t character_order(const LocalFieldElement& twist);

/// ord(ψ) of the built-in character.
constexpr int64_t kBuiltinCharacterOrder = 0;

}  // namespace airy
