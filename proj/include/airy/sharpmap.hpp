#pragma once

// Characteristic-p reduction on F_q((T)): the operator Q with
// (Qc)(j) = c(-1 + p(j+1))^{1/p} and the polynomial transform h -> h♯.

#include <cstdint>
#include <functional>

#include "airy/poly.hpp"

namespace airy {

using CoefficientMap = std::function<LocalFieldElement(const LocalFieldElement&)>;

/// Laurent fields only (InvalidArgument otherwise).
LocalFieldElement q_operator(const LocalFieldElement& c);

/// One variable: c·y^{m p^r} (p ∤ m, r ≥ 1) becomes (Q^r c)·y^m.
MultiPoly sharpen(const MultiPoly& h, const CoefficientMap& q = q_operator);

/// Checks ψ(h(u)) = ψ(h♯(u)) on random u with valuations in [-3, 3].
bool verify_character_identity(const MultiPoly& h, int samples, uint64_t seed = 1,
                               const CoefficientMap& q = q_operator);

}  // namespace airy
