#pragma once

// Exact exponential sums over residue rings O/ϖ^E.
//
// For a polynomial G with coefficients in O/ϖ^E and a domain D given by a
// condition on z mod ϖ, computes
//
//     S = Σ_{z ∈ (O/ϖ^E)^m, z mod ϖ ∈ D} ψ(G(z) / ϖ^E)
//
// as an exact CyclotomicSum. Two routes are provided: a direct enumeration of
// all residues, and a reduction that only visits residues where ∇G vanishes
// modulo ϖ^⌊E/2⌋ (G(a + ϖ^{E-j}t) ≡ G(a) + ϖ^{E-j}⟨∇G(a), t⟩ mod ϖ^E, and
// the sum over t is q^{jm}·[∇G(a) ≡ 0 mod ϖ^j]).

#include <cstdint>
#include <functional>
#include <vector>

#include "airy/cyclotomic.hpp"
#include "airy/localfield.hpp"
#include "airy/poly.hpp"

namespace airy {

struct ResidueTerm {
  Exponents exponents;
  /// ϖ-adic digits of the coefficient, length E.
  std::vector<uint32_t> digits;
};

struct ResiduePoly {
  size_t m = 1;
  int64_t E = 1;
  std::vector<ResidueTerm> terms;
};

/// Condition on z mod ϖ (digits for Q_p, F_q codes for F_q((T))).
using ResidueDomain = std::function<bool(const std::vector<uint32_t>&)>;

ResidueDomain all_residues();
/// Not every coordinate divisible by ϖ: the unit sphere of the max norm.
ResidueDomain primitive_residues();

struct ExpSumOptions {
  /// Upper bound on visited residues (nodes); BudgetExceeded beyond it.
  uint64_t budget = 50'000'000;
  unsigned threads = 1;
};

struct ExpSumResult {
  CyclotomicSum value;
  uint64_t nodes = 0;
};

/// Fast exact route.
ExpSumResult exponential_sum(const LocalField& field, const ResiduePoly& g, const ResidueDomain& domain,
                             const ExpSumOptions& options = {});

/// Σ over z mod ϖ^K (K ≤ E) of ψ(G(z)/ϖ^E), evaluating G at the digit-lift of
/// each residue. Equals q^{-m(E-K)}·S when ψ(G(z)/ϖ^E) is constant on cosets
/// of ϖ^K.
ExpSumResult exponential_sum_enumerate(const LocalField& field, const ResiduePoly& g, const ResidueDomain& domain,
                                       int64_t K, const ExpSumOptions& options = {});

}  // namespace airy
