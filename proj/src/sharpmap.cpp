#include "airy/sharpmap.hpp"

#include <random>

#include "airy/character.hpp"

namespace airy {

LocalFieldElement q_operator(const LocalFieldElement& c) {
  const auto& F = c.field();
  if (F->kind() != FieldKind::Laurent) throw Error(ErrorKind::InvalidArgument, "Q is defined on F_q((T)) only");
  if (c.is_zero()) return c;
  const int64_t p = F->p();
  const auto& k = F->residue_field();
  // lowest output index j with p(j+1) - 1 >= v(c)
  const int64_t v = c.valuation();
  int64_t j0 = v + 1 >= 0 ? (v + 1 + p - 1) / p - 1 : -((-(v + 1)) / p) - 1;
  // exclusive bound on output indices: p(j+1) - 1 must stay below the known digits
  const int64_t A = c.is_exact() ? v + c.relative_precision() : c.absolute_precision();
  const int64_t stop = A >= 0 ? A / p : -((-A + p - 1) / p);
  std::vector<uint32_t> digits;
  for (int64_t j = j0; j < stop; ++j) {
    const int64_t i = -1 + p * (j + 1);
    digits.push_back(k.inv_frobenius(c.digit_at(i)));
  }
  if (digits.empty()) {
    if (c.is_exact()) return F->zero();
    throw Error(ErrorKind::PrecisionExhausted, "not enough coefficients to apply Q");
  }
  return F->from_digits(j0, digits, c.is_exact());
}

MultiPoly sharpen(const MultiPoly& h, const CoefficientMap& q) {
  if (h.num_vars() != 1) throw Error(ErrorKind::InvalidArgument, "sharpening is defined for one variable");
  const uint32_t p = h.field()->p();
  MultiPoly out(h.field(), 1);
  for (const auto& [e, c] : h.terms()) {
    uint32_t m = e[0];
    LocalFieldElement coeff = c;
    if (h.field()->kind() == FieldKind::Laurent && m > 0) {
      while (m % p == 0) {
        m /= p;
        coeff = q(coeff);
      }
    }
    out.add_term(coeff, {m});
  }
  return out;
}

bool verify_character_identity(const MultiPoly& h, int samples, uint64_t seed, const CoefficientMap& q) {
  const auto& F = h.field();
  const MultiPoly hs = sharpen(h, q);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int64_t> val(-3, 3);
  std::uniform_int_distribution<uint32_t> digit(0, F->q() - 1), len(1, 4);
  for (int s = 0; s < samples; ++s) {
    std::vector<uint32_t> d(len(rng));
    for (auto& x : d) x = digit(rng);
    d[0] = 1 + digit(rng) % (F->q() - 1);
    const auto u = F->from_digits(val(rng), d, true);
    if (!(psi(eval(h, {u})) == psi(eval(hs, {u})))) return false;
  }
  return true;
}

}  // namespace airy
