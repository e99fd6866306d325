#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"

#include "airy/expsum.hpp"

using namespace airy;

namespace {

// Independent oracle: evaluate G with mpz modulo p^E and sum e^{2πi G/p^E}.
std::complex<double> oracle_padic(uint32_t p, const ResiduePoly& g, bool primitive_only) {
  mpz_class mod;
  mpz_ui_pow_ui(mod.get_mpz_t(), p, g.E);
  const unsigned long M = mod.get_ui();
  std::complex<double> total = 0;
  std::vector<unsigned long> z(g.m, 0);
  while (true) {
    bool ok = !primitive_only;
    for (auto c : z)
      if (c % p) ok = true;
    if (ok) {
      mpz_class acc = 0;
      for (const auto& t : g.terms) {
        mpz_class c = 0, pp = 1;
        for (auto d : t.digits) {
          c += pp * d;
          pp *= p;
        }
        for (size_t i = 0; i < g.m; ++i) {
          mpz_class zi = z[i], pw;
          mpz_powm_ui(pw.get_mpz_t(), zi.get_mpz_t(), t.exponents[i], mod.get_mpz_t());
          c *= pw;
        }
        acc += c;
      }
      acc %= mod;
      total += std::polar(1.0, 2 * M_PI * acc.get_d() / M);
    }
    size_t i = 0;
    while (i < g.m && ++z[i] == M) z[i++] = 0;
    if (i == g.m) break;
  }
  return total;
}

ResiduePoly random_poly(std::mt19937_64& rng, uint32_t p, size_t m, int64_t E, uint32_t deg) {
  ResiduePoly g;
  g.m = m;
  g.E = E;
  std::uniform_int_distribution<uint32_t> dig(0, p - 1), ex(0, deg);
  for (int t = 0; t < 4; ++t) {
    ResidueTerm term;
    for (size_t i = 0; i < m; ++i) term.exponents.push_back(ex(rng));
    for (int64_t k = 0; k < E; ++k) term.digits.push_back(dig(rng));
    g.terms.push_back(term);
  }
  return g;
}

}  // namespace

TEST_CASE("fast exponential sum matches direct evaluation") {
  std::mt19937_64 rng(7);
  for (uint32_t p : {3u, 5u}) {
    auto F = LocalField::make(FieldConfig::padic(p));
    for (int trial = 0; trial < 40; ++trial) {
      size_t m = 1 + trial % 2;
      int64_t E = 1 + trial % (m == 1 ? 5 : 3);
      auto g = random_poly(rng, p, m, E, 4);
      bool prim = trial % 3 == 0;
      auto dom = prim ? primitive_residues() : all_residues();
      auto fast = exponential_sum(*F, g, dom).value.to_complex();
      auto expect = oracle_padic(p, g, prim);
      CHECK(std::abs(fast - expect) < 1e-6 * (1 + std::abs(expect)));
      auto en = exponential_sum_enumerate(*F, g, dom, E).value.to_complex();
      CHECK(std::abs(en - expect) < 1e-6 * (1 + std::abs(expect)));
    }
  }
}

TEST_CASE("fast and enumerated sums agree over F_q[T]/T^E") {
  std::mt19937_64 rng(11);
  for (auto [p, f] : {std::pair{3u, 1u}, std::pair{2u, 2u}, std::pair{3u, 2u}}) {
    auto F = LocalField::make(FieldConfig::laurent(p, f));
    const uint32_t q = F->q();
    for (int trial = 0; trial < 20; ++trial) {
      size_t m = 1 + trial % 2;
      int64_t E = 1 + trial % (m == 1 ? 4 : 2);
      auto g = random_poly(rng, q, m, E, 5);
      auto fast = exponential_sum(*F, g, all_residues()).value;
      auto en = exponential_sum_enumerate(*F, g, all_residues(), E).value;
      CHECK((fast - en).is_zero());
    }
  }
}

TEST_CASE("budget is enforced") {
  auto F = LocalField::make(FieldConfig::padic(5));
  ResiduePoly g;
  g.m = 2;
  g.E = 6;
  g.terms.push_back({{1, 0}, {1, 0, 0, 0, 0, 0}});
  CHECK_THROWS_AS(exponential_sum_enumerate(*F, g, all_residues(), 6, {1000, 1}), Error);
}
