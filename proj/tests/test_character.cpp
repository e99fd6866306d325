#include <cmath>
#include <random>

#include "doctest.h"

#include "airy/character.hpp"

using namespace airy;

TEST_CASE("psi examples") {
  auto F = LocalField::make(FieldConfig::padic(5));
  CHECK(psi(F->from_int(17)).is_trivial());
  CHECK(psi(F->from_rational(mpq_class(1, 5))).exponent == RootExponent{1, 1});
  // principal part of -1/5 is 4/5
  CHECK(psi(F->from_rational(mpq_class(-1, 5))).exponent == RootExponent{4, 1});
  CHECK(psi(F->from_rational(mpq_class(7, 25))).exponent == RootExponent{7, 2});
  auto L = LocalField::make(FieldConfig::laurent(3));
  CHECK(psi(L->from_digits(-1, {2}, true)).exponent == RootExponent{2, 1});
  // only the T^-1 coefficient matters
  CHECK(psi(L->from_digits(-3, {1, 2, 1}, true)).exponent == RootExponent{1, 1});
}

TEST_CASE("character order") {
  auto F = LocalField::make(FieldConfig::padic(5));
  CHECK(character_order(F->one()) == 0);
  CHECK(character_order(F->uniformizer_power(-3)) == -3);
  CHECK(character_order(F->uniformizer_power(2)) == 2);
  CHECK_THROWS_AS(character_order(F->zero()), Error);
  // brute check: ψ trivial on R, nontrivial on P^{-1}
  for (int d = 0; d < 5; ++d) CHECK(psi(F->from_int(d)).is_trivial());
  bool nontrivial = false;
  for (int d = 1; d < 5; ++d) nontrivial |= !psi(F->from_digits(-1, {static_cast<uint32_t>(d)}, true)).is_trivial();
  CHECK(nontrivial);
}

TEST_CASE("psi is additive") {
  std::mt19937_64 rng(17);
  auto F = LocalField::make(FieldConfig::padic(5, 12));
  auto L = LocalField::make(FieldConfig::laurent(3, 2, 12));
  for (const auto& K : {F, L}) {
    const uint32_t base = K->kind() == FieldKind::PAdic ? K->p() : K->q();
    std::uniform_int_distribution<uint32_t> dig(0, base - 1);
    std::uniform_int_distribution<int> val(-4, 2);
    for (int t = 0; t < 5000; ++t) {
      std::vector<uint32_t> a(6), b(6);
      for (auto& x : a) x = dig(rng);
      for (auto& x : b) x = dig(rng);
      a[0] = b[0] = 1;
      auto x = K->from_digits(val(rng), a, true), y = K->from_digits(val(rng), b, true);
      CHECK(psi(x + y) == psi(x) * psi(y));
    }
  }
}

TEST_CASE("cyclotomic sums") {
  CyclotomicSum full;
  for (uint64_t j = 0; j < 5; ++j) full.add_term(5, RootExponent::make(j, 1, 5), 1);
  CHECK(cyclo_is_zero(full));
  auto s = cyclo_add(CyclotomicSum::root(3, {1, 1}), CyclotomicSum::root(3, {2, 1}));
  CHECK(s.canonical() == CyclotomicSum::rational(-1));
  auto i = cyclo_to_complex(CyclotomicSum::root(2, {1, 2}));
  CHECK(std::abs(i - std::complex<double>(0, 1)) < 1e-12);
  CHECK_THROWS_AS(CyclotomicSum::root(3, {1, 1}) + CyclotomicSum::root(5, {1, 1}), Error);
  auto w = cyclo_scale(s, mpq_class(1, 3));
  CHECK(w.canonical() == CyclotomicSum::rational(mpq_class(-1, 3)));
}

TEST_CASE("exact zero test agrees with complex evaluation") {
  std::mt19937_64 rng(8);
  for (uint32_t p : {2u, 3u, 5u, 7u}) {
    for (int t = 0; t < 300; ++t) {
      const uint32_t L = 1 + t % 3;
      const uint64_t n = ipow(p, L);
      std::uniform_int_distribution<uint64_t> ex(0, n - 1);
      CyclotomicSum s;
      // full orbits of ζ_{p^L}^{a + j n/p} cancel
      for (int o = 0; o < 3; ++o) {
        uint64_t a = ex(rng);
        mpq_class c(static_cast<long>(rng() % 7) - 3, 1 + static_cast<long>(rng() % 3));
        for (uint64_t j = 0; j < p; ++j) s.add_term(p, RootExponent::make((a + j * (n / p)) % n, L, p), c);
      }
      if (t % 2) s.add_term(p, RootExponent::make(ex(rng), L, p), mpq_class(1, 1 + static_cast<long>(rng() % 4)));
      const bool exact = s.is_zero();
      CHECK(exact == (std::abs(s.to_complex()) < 1e-9));
      CHECK(CyclotomicSum::from_json(s.to_json()) == s);
    }
  }
}
