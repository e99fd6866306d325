#pragma once

// The quaternion division algebra over Q_p (p odd) with basis 1, i, j, k,
// i² = α (a unit nonresidue), j² = ϖ, ij = -ji = k, and Airy integrals of the
// invariant polynomials p_{2s}(x) = Tr(x^{2s}) on the trace-zero part 𝔤 ≅ K³.

#include <array>

#include "airy/integrate.hpp"

namespace airy {

struct Quaternion {
  LocalFieldElement a0, a1, a2, a3;
};

class QuaternionAlgebra {
 public:
  static QuaternionAlgebra make(uint32_t p, int precision = 40);

  const FieldPtr& field() const { return field_; }
  const LocalFieldElement& alpha() const { return alpha_; }
  uint32_t alpha_residue() const { return alpha_res_; }

  Quaternion make_element(const LocalFieldElement& a0, const LocalFieldElement& a1, const LocalFieldElement& a2,
                          const LocalFieldElement& a3) const {
    return {a0, a1, a2, a3};
  }
  /// Trace-zero element a1 i + a2 j + a3 k.
  Quaternion pure(const Vec& a) const;

 private:
  QuaternionAlgebra(FieldPtr f, uint32_t a) : field_(std::move(f)), alpha_(field_->from_int(a)), alpha_res_(a) {}

  FieldPtr field_;
  LocalFieldElement alpha_;
  uint32_t alpha_res_;
};

Quaternion quat_mul(const QuaternionAlgebra& H, const Quaternion& x, const Quaternion& y);
Quaternion quat_add(const Quaternion& x, const Quaternion& y);
Quaternion quat_conj(const Quaternion& x);
/// a0² - α a1² - ϖ(a2² - α a3²)
LocalFieldElement quat_norm(const QuaternionAlgebra& H, const Quaternion& x);
LocalFieldElement quat_trace(const Quaternion& x);
bool operator==(const Quaternion& x, const Quaternion& y);

/// N on 𝔤: -α a1² - ϖ a2² + ϖα a3².
MultiPoly pure_norm_poly(const QuaternionAlgebra& H);
/// p_{2s} = 2(-1)^s N^s in the coordinates (a1, a2, a3).
MultiPoly invariant_poly(const QuaternionAlgebra& H, uint32_t s);
/// Tr(x^r) for x ∈ 𝔤, by repeated multiplication.
LocalFieldElement trace_power(const QuaternionAlgebra& H, const Vec& a, uint32_t r);
/// (x, y) = Tr(xy) on 𝔤: diag(2α, 2ϖ, -2αϖ).
BilinearForm trace_form(const QuaternionAlgebra& H);

/// One class of N(𝔤∖0) in K^×/(K^×)²: valuation parity and the Legendre
/// symbol of the unit part.
struct OrbitClass {
  int parity = 0;
  int square_class = 1;
  Vec representative;
  std::string label() const;
};

/// Representatives z with 𝔤∖0 = ⊔ 𝔤(z); three classes for odd p.
std::vector<OrbitClass> orbit_representatives(const QuaternionAlgebra& H);
/// (parity, Legendre symbol) of N(y) for y ≠ 0.
std::pair<int, int> norm_square_class(const QuaternionAlgebra& H, const Vec& y);
/// N(y) ∈ N(z)·(K^×)².
bool in_orbit(const QuaternionAlgebra& H, const Vec& y, const Vec& z);
/// Index into orbit_representatives() of a primitive residue vector.
size_t residue_orbit(const QuaternionAlgebra& H, const std::vector<OrbitClass>& F, const std::vector<uint32_t>& z);

struct QuatShellRow {
  int64_t r = 0;
  /// ∫ over {|y| = q^r} ∩ 𝔤(z) for each representative z.
  std::vector<CyclotomicSum> pieces;
};

struct QuatCertificate {
  uint32_t s = 1;
  AiryCertificate airy;
  std::vector<OrbitClass> orbits;
  std::vector<QuatShellRow> orbit_shells;
  nlohmann::json to_json() const;
};

/// A_{p_{2s}}(x) over 𝔤 with the trace form. Shells are max-norm shells, each
/// split by orbit; the tail is accepted on the empirical zero run only.
QuatCertificate quat_airy_eval(const QuaternionAlgebra& H, uint32_t s, const Vec& x, const AiryPolicy& policy = {},
                               const IntegrationOptions& opt = {});

}  // namespace airy
