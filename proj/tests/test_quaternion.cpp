#include <random>

#include "doctest.h"

#include "airy/quaternion.hpp"

using namespace airy;

namespace {

// r + s√α with rational r, s
struct Qa {
  mpq_class r, s;
};

struct MatrixModel {
  mpq_class alpha, p;
  Qa mul(const Qa& a, const Qa& b) const { return {a.r * b.r + alpha * a.s * b.s, a.r * b.s + a.s * b.r}; }
  Qa add(const Qa& a, const Qa& b) const { return {a.r + b.r, a.s + b.s}; }
  using M = std::array<Qa, 4>;  // row major 2x2
  // λ(u + jv) = [[u, ϖσ(v)], [v, σ(u)]] with u = a0 + a1√α, v = a2 - a3√α
  M lambda(const std::array<mpq_class, 4>& a) const {
    Qa u{a[0], a[1]}, v{a[2], -a[3]};
    return {u, Qa{p * v.r, -p * v.s}, v, Qa{u.r, -u.s}};
  }
  M mul(const M& x, const M& y) const {
    return {add(mul(x[0], y[0]), mul(x[1], y[2])), add(mul(x[0], y[1]), mul(x[1], y[3])),
            add(mul(x[2], y[0]), mul(x[3], y[2])), add(mul(x[2], y[1]), mul(x[3], y[3]))};
  }
  std::array<mpq_class, 4> coords(const M& m) const { return {m[0].r, m[0].s, m[2].r, -m[2].s}; }
};

// Coordinates in Z[1/p], which Q_p holds exactly.
std::array<mpq_class, 4> random_coords(std::mt19937_64& rng, bool pure, long p = 5) {
  std::uniform_int_distribution<int> co(-30, 30), den(0, 2);
  std::array<mpq_class, 4> a;
  for (auto& c : a) {
    c = mpq_class(co(rng), den(rng) == 0 ? p : 1);
    c.canonicalize();
  }
  if (pure) a[0] = 0;
  return a;
}

Quaternion to_quat(const FieldPtr& F, const std::array<mpq_class, 4>& a) {
  return {F->from_rational(a[0]), F->from_rational(a[1]), F->from_rational(a[2]), F->from_rational(a[3])};
}

}  // namespace

TEST_CASE("quaternion relations") {
  auto H = QuaternionAlgebra::make(5);
  auto F = H.field();
  auto z = F->zero(), o = F->one();
  Quaternion i{z, o, z, z}, j{z, z, o, z}, k{z, z, z, o};
  CHECK(quat_mul(H, i, j) == k);
  CHECK(quat_mul(H, j, i) == Quaternion{z, z, z, -o});
  CHECK(quat_mul(H, i, i) == Quaternion{H.alpha(), z, z, z});
  CHECK(quat_mul(H, j, j) == Quaternion{F->uniformizer(), z, z, z});
  CHECK(quat_norm(H, i) == -H.alpha());
  CHECK(H.alpha() == F->from_int(2));
  // [i,j] = 2k, [j,k] = -2ϖ i, [k,i] = -2α j
  auto comm = [&](const Quaternion& a, const Quaternion& b) {
    auto ab = quat_mul(H, a, b), ba = quat_mul(H, b, a);
    return Quaternion{ab.a0 - ba.a0, ab.a1 - ba.a1, ab.a2 - ba.a2, ab.a3 - ba.a3};
  };
  const auto two = F->from_int(2);
  CHECK(comm(i, j) == Quaternion{z, z, z, two});
  CHECK(comm(j, k) == Quaternion{z, -(two * F->uniformizer()), z, z});
  CHECK(comm(k, i) == Quaternion{z, z, -(two * H.alpha()), z});
  CHECK_THROWS_AS(QuaternionAlgebra::make(2), Error);
}

TEST_CASE("multiplication agrees with the matrix model") {
  std::mt19937_64 rng(21);
  for (uint32_t p : {3u, 5u, 7u}) {
    auto H = QuaternionAlgebra::make(p);
    auto F = H.field();
    MatrixModel mm{mpq_class(H.alpha_residue()), mpq_class(p)};
    for (int t = 0; t < 300; ++t) {
      auto a = random_coords(rng, false, p), b = random_coords(rng, false, p);
      auto x = to_quat(F, a), y = to_quat(F, b);
      auto expect = mm.coords(mm.mul(mm.lambda(a), mm.lambda(b)));
      CHECK(quat_mul(H, x, y) == to_quat(F, expect));
      // N = det λ, Tr = tr λ
      auto L = mm.lambda(a);
      auto det = mm.add(mm.mul(L[0], L[3]), Qa{-mm.mul(L[1], L[2]).r, -mm.mul(L[1], L[2]).s});
      CHECK(det.s == 0);
      CHECK(quat_norm(H, x) == F->from_rational(det.r));
      CHECK(quat_trace(x) == F->from_rational(L[0].r + L[3].r));
      CHECK(quat_mul(H, x, quat_conj(x)) == Quaternion{quat_norm(H, x), F->zero(), F->zero(), F->zero()});
    }
  }
}

TEST_CASE("associativity and multiplicative norm") {
  std::mt19937_64 rng(4);
  auto H = QuaternionAlgebra::make(5);
  auto F = H.field();
  for (int t = 0; t < 10000; ++t) {
    auto x = to_quat(F, random_coords(rng, false)), y = to_quat(F, random_coords(rng, false)),
         z = to_quat(F, random_coords(rng, false));
    CHECK(quat_mul(H, quat_mul(H, x, y), z) == quat_mul(H, x, quat_mul(H, y, z)));
    if (t % 10 == 0) CHECK(quat_norm(H, quat_mul(H, x, y)) == quat_norm(H, x) * quat_norm(H, y));
  }
}

TEST_CASE("invariant polynomials") {
  std::mt19937_64 rng(8);
  auto H = QuaternionAlgebra::make(5);
  auto F = H.field();
  auto w = F->uniformizer();
  // s = 1: 2α a1² + 2ϖ a2² - 2ϖα a3²
  MultiPoly p2(F, 3);
  p2.add_term(F->from_int(2) * H.alpha(), {2, 0, 0});
  p2.add_term(F->from_int(2) * w, {0, 2, 0});
  p2.add_term(-(F->from_int(2) * w * H.alpha()), {0, 0, 2});
  CHECK(invariant_poly(H, 1) == p2);
  MatrixModel mm{mpq_class(H.alpha_residue()), mpq_class(5)};
  for (int t = 0; t < 1000; ++t) {
    auto a = random_coords(rng, true);
    Vec y{F->from_rational(a[1]), F->from_rational(a[2]), F->from_rational(a[3])};
    CHECK(trace_power(H, y, 3).is_zero());
    auto L = mm.lambda(a);
    auto L2 = mm.mul(L, L), L4 = mm.mul(L2, L2);
    CHECK(eval(invariant_poly(H, 1), y) == F->from_rational(L2[0].r + L2[3].r));
    CHECK(eval(invariant_poly(H, 2), y) == F->from_rational(L4[0].r + L4[3].r));
  }
  CHECK_THROWS_AS(invariant_poly(H, 0), Error);
}

TEST_CASE("N is anisotropic on primitive vectors mod p^3") {
  for (int64_t p : {3, 5, 7}) {
    const int64_t al = find_nonresidue(static_cast<uint32_t>(p)), m = p * p * p;
    int min_v = 3, max_v = 0;
    for (int64_t a = 0; a < m; ++a)
      for (int64_t b = 0; b < m; ++b)
        for (int64_t c = 0; c < m; ++c) {
          if (a % p == 0 && b % p == 0 && c % p == 0) continue;
          int64_t n = (-al * a * a - p * b * b + p * al * c * c) % m;
          if (n < 0) n += m;
          int v = 0;
          while (v < 3 && n % p == 0) {
            n /= p;
            ++v;
          }
          min_v = std::min(min_v, v);
          max_v = std::max(max_v, v);
        }
    CHECK(min_v == 0);
    CHECK(max_v == 1);
  }
}

TEST_CASE("orbit decomposition") {
  std::mt19937_64 rng(12);
  for (uint32_t p : {3u, 5u, 7u}) {
    auto H = QuaternionAlgebra::make(p);
    auto F = H.field();
    auto reps = orbit_representatives(H);
    CHECK(reps.size() == 3);
    for (size_t i = 0; i < reps.size(); ++i)
      for (size_t j = 0; j < reps.size(); ++j) CHECK(in_orbit(H, reps[i].representative, reps[j].representative) == (i == j));
    std::uniform_int_distribution<uint32_t> dig(0, p - 1);
    for (int t = 0; t < 300; ++t) {
      std::vector<uint32_t> z{dig(rng), dig(rng), dig(rng)};
      if (!z[0] && !z[1] && !z[2]) continue;
      Vec y{F->from_int(z[0]), F->from_int(z[1]), F->from_int(z[2])};
      // lifts of the residue by P and scalings by K^× stay in the orbit
      Vec y2 = y;
      for (auto& c : y2) c = c + F->from_digits(1, {dig(rng), dig(rng)}, true);
      auto tt = F->from_digits(static_cast<int64_t>(t % 5) - 2, {1 + dig(rng) % (p - 1), dig(rng)}, true);
      Vec y3 = y;
      for (auto& c : y3) c = c * tt;
      size_t hits = 0, idx = 0;
      for (size_t i = 0; i < reps.size(); ++i)
        if (in_orbit(H, y, reps[i].representative)) {
          ++hits;
          idx = i;
        }
      CHECK(hits == 1);
      CHECK(residue_orbit(H, reps, z) == idx);
      CHECK(in_orbit(H, y2, y));
      CHECK(in_orbit(H, y3, y));
    }
  }
}

TEST_CASE("p_2 ball integrals against a separable coset count") {
  auto H = QuaternionAlgebra::make(5);
  auto F = H.field();
  const int64_t p = 5, al = H.alpha_residue();
  const auto h = invariant_poly(H, 1);
  const auto form = trace_form(H);
  // x = (x1, x2, x3) integers; integrand numerator over p^{2R}, one coordinate at a time:
  // 2α z1² - 2α x1 p^R z1, 2p z2² - 2p x2 p^R z2, -2pα z3² + 2pα x3 p^R z3
  for (auto xv : {std::array<int64_t, 3>{0, 0, 0}, std::array<int64_t, 3>{1, 3, 2}}) {
    Vec x{F->from_int(xv[0]), F->from_int(xv[1]), F->from_int(xv[2])};
    for (int64_t R = 0; R <= 2; ++R) {
      const int64_t E = 2 * R + 1, mod = ipow(5, static_cast<uint32_t>(E)), pR = ipow(5, static_cast<uint32_t>(R));
      const std::array<int64_t, 3> c2{2 * al, 2 * p, -2 * p * al}, c1{-2 * al * xv[0], -2 * p * xv[1], 2 * p * al * xv[2]};
      std::vector<int64_t> hist(static_cast<size_t>(mod), 0);
      hist[0] = 1;
      for (int i = 0; i < 3; ++i) {
        std::vector<int64_t> one(static_cast<size_t>(mod), 0), next(static_cast<size_t>(mod), 0);
        for (int64_t z = 0; z < mod; ++z) {
          __int128 v = (__int128)c2[i] * z * z * p + (__int128)c1[i] * pR * z * p;
          int64_t r = static_cast<int64_t>(v % mod);
          if (r < 0) r += mod;
          ++one[static_cast<size_t>(r)];
        }
        for (int64_t a = 0; a < mod; ++a)
          if (hist[a])
            for (int64_t b = 0; b < mod; ++b)
              if (one[b]) next[static_cast<size_t>((a + b) % mod)] += hist[a] * one[b];
        hist = std::move(next);
      }
      // ∫_{|y| ≤ q^R} = q^{3R} q^{-3E} Σ_z e(num(z)/p^E), with y = z/p^R and one spare power of p
      CyclotomicSum expect;
      for (int64_t r = 0; r < mod; ++r)
        if (hist[r]) expect.add_term(5, RootExponent::make(static_cast<uint64_t>(r), static_cast<uint32_t>(E), 5), hist[r]);
      mpz_class den;
      mpz_ui_pow_ui(den.get_mpz_t(), 5, static_cast<unsigned long>(3 * (E - R)));
      CHECK(ball_integral(h, form, x, R) == expect.scaled(mpq_class(1, den)).canonical());
    }
  }
}

TEST_CASE("quaternion Airy evaluation") {
  auto H = QuaternionAlgebra::make(5);
  auto F = H.field();
  const Vec zero{F->zero(), F->zero(), F->zero()};
  auto qc = quat_airy_eval(H, 1, zero);
  CHECK(qc.airy.empirical);
  CHECK(qc.orbit_shells.size() == static_cast<size_t>(qc.airy.r_stop));
  // converged value equals the ball integral at a radius past the last nonzero shell
  CHECK(qc.airy.value == ball_integral(invariant_poly(H, 1), trace_form(H), zero, qc.airy.r_stop));
  for (const auto& row : qc.orbit_shells) {
    CHECK(row.pieces.size() == 3);
    if (row.r > qc.airy.r_stop - 3)
      for (const auto& piece : row.pieces) CHECK(piece.is_zero());
  }
  // the generic evaluator in empirical mode gives the same number
  AiryPolicy emp;
  emp.empirical = true;
  Vec x{F->from_rational(mpq_class(2, 25)), F->one(), F->from_int(3)};
  CHECK(quat_airy_eval(H, 1, x).airy.value == airy_eval(invariant_poly(H, 1), trace_form(H), x, emp).value);
  auto j = qc.to_json();
  CHECK(j["orbits"].size() == 3);
  CHECK(j["orbit_shells"][0]["pieces"].size() == 3);
  // s = 2 at x = 0: the integrand is 1 on R³ and the shells vanish
  CHECK(quat_airy_eval(H, 2, zero).airy.value == CyclotomicSum::rational(1));
}

TEST_CASE("max-norm and quaternion-norm exhaustions agree once shells vanish") {
  auto H = QuaternionAlgebra::make(5);
  auto F = H.field();
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<uint32_t> dig(0, 4);
  for (int t = 0; t < 4; ++t) {
    Vec x;
    for (int i = 0; i < 3; ++i) x.push_back(F->from_digits(-1 - t % 2, {dig(rng), dig(rng), dig(rng)}, true));
    const auto qc = quat_airy_eval(H, 1, x);
    for (const auto& o : qc.orbits) CHECK(quat_norm(H, H.pure(o.representative)).valuation() % 2 == o.parity);
    const auto ball = ball_integral(invariant_poly(H, 1), trace_form(H), x, 0);
    // partial integrals over {|N|^{1/2} ≤ q^{e/2}}, e = 2r - parity
    const int64_t last = qc.airy.r_stop - qc.airy.zero_run;
    for (int64_t e = 2 * last; e <= 2 * qc.airy.r_stop + 1; ++e) {
      CyclotomicSum s = ball;
      for (const auto& row : qc.orbit_shells)
        for (size_t i = 0; i < row.pieces.size(); ++i)
          if (2 * row.r - qc.orbits[i].parity <= e) s = s + row.pieces[i];
      CHECK(s.canonical() == qc.airy.value);
    }
  }
}
