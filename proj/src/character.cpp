#include "airy/character.hpp"

namespace airy {

CharacterValue CharacterValue::operator*(const CharacterValue& o) const {
  uint32_t prime = p ? p : o.p;
  if (p && o.p && p != o.p) throw Error(ErrorKind::MixedPrime, "characters of different residue characteristic");
  if (prime == 0) return *this;
  return {prime, exponent.plus(o.exponent, prime)};
}

CharacterValue CharacterValue::inverse() const {
  if (p == 0) return *this;
  return {p, exponent.negated(p)};
}

CyclotomicSum CharacterValue::as_sum(const mpq_class& coeff) const {
  return CyclotomicSum::root(p, exponent, coeff);
}

CharacterValue psi(const LocalFieldElement& x) {
  const auto& F = x.field();
  const uint32_t p = F->p();
  if (x.is_zero() || x.valuation() >= 0) {
    if (!x.is_zero() && x.absolute_precision() < 0) {
      throw Error(ErrorKind::PrecisionExhausted, "class mod R undetermined");
    }
    return {p, {0, 0}};
  }
  if (x.absolute_precision() < 0) {
    throw Error(ErrorKind::PrecisionExhausted, "class mod R undetermined");
  }
  if (F->kind() == FieldKind::PAdic) {
    // principal part Σ_{i<0} d_i p^i = num / p^L with L = -v
    const auto L = static_cast<uint32_t>(-x.valuation());
    (void)ipow(p, L);  // throws when p^L does not fit
    uint64_t num = 0;
    uint64_t scale = 1;
    for (int64_t i = x.valuation(); i < 0; ++i) {
      num += static_cast<uint64_t>(x.digit_at(i)) * scale;
      scale *= p;
    }
    return {p, RootExponent::make(num, L, p)};
  }
  const uint32_t t = F->residue_field().trace(x.digit_at(-1));
  return {p, RootExponent::make(t, 1, p)};
}

int64_t character_order(const LocalFieldElement& twist) {
  if (twist.is_zero()) throw Error(ErrorKind::ZeroTwist, "twist must be nonzero");
  return kBuiltinCharacterOrder + twist.valuation();
}

}  // namespace airy
