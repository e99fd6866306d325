#pragma once

// Schwartz-Bruhat functions as finite weighted sums of ball indicators, their
// Fourier transforms, and the pairing ∫ A f = ∫ ψ(h) f̂.
//
// Fourier transform: f̂(x) = ∫ f(y) ψ(-(x, y)) dy with vol(R^m) = 1. For the
// standard form (and unit diagonal forms) this measure is self-dual and
//
//     (1_{a + (P^k)^m})^(x) = q^{-km} ψ(-(x, a)) 1_{|x| ≤ q^k}.

#include <vector>

#include "airy/integrate.hpp"

namespace airy {

/// weight · 1_{center + (P^k)^m}
struct SBTerm {
  Vec center;
  int64_t k = 0;
  CyclotomicSum weight;
};

class SBFunction {
 public:
  SBFunction(FieldPtr field, size_t m) : field_(std::move(field)), m_(m) {}

  static SBFunction ball(const Vec& center, int64_t k, const CyclotomicSum& weight = CyclotomicSum::rational(1));

  const FieldPtr& field() const { return field_; }
  size_t dim() const { return m_; }
  const std::vector<SBTerm>& terms() const { return terms_; }

  void add_ball(const Vec& center, int64_t k, const CyclotomicSum& weight);

  CyclotomicSum evaluate(const Vec& x) const;
  /// Centers reduced mod (P^k)^m, equal balls merged, zero weights dropped.
  SBFunction canonical() const;
  /// ∫ f dx.
  CyclotomicSum integral() const;
  /// The smallest S with support ⊆ (P^{-S})^m, and the largest k (f is
  /// constant on cosets of (P^k)^m).
  int64_t support_exponent() const;
  int64_t resolution() const;

  SBFunction scaled(const CyclotomicSum& c) const;
  SBFunction reflected() const;
  friend SBFunction operator+(const SBFunction& a, const SBFunction& b);
  friend SBFunction operator-(const SBFunction& a, const SBFunction& b);

  /// [{center: [..], k, weight}]
  nlohmann::json to_json() const;
  static SBFunction from_json(const FieldPtr& field, const nlohmann::json& j);

 private:
  FieldPtr field_;
  size_t m_;
  std::vector<SBTerm> terms_;
};

/// a mod (P^k)^m with digits below k kept; throws PrecisionExhausted for
/// inexact input known to less than ϖ^k.
LocalFieldElement reduce_mod(const LocalFieldElement& a, int64_t k);

/// Representatives of (P^lo / P^hi)^m, hi ≥ lo, in lexicographic digit order.
std::vector<Vec> coset_representatives(const FieldPtr& field, size_t m, int64_t lo, int64_t hi);

/// Samples f̂ on the cosets where it is constant, then merges full sibling
/// groups with equal weights. Forms: standard or diagonal with unit entries.
SBFunction fourier(const SBFunction& f, const BilinearForm& form);

/// f = g as functions.
bool sb_equal(const SBFunction& f, const SBFunction& g);

/// ∫ f ḡ.
CyclotomicSum inner_product(const SBFunction& f, const SBFunction& g);

struct PairingSide {
  CyclotomicSum value;
  /// airy_eval calls (lhs) or ball integrals (rhs).
  uint64_t evaluations = 0;
  /// True when some constancy scale rested on an empirical zero run.
  bool empirical = false;
  /// lhs only: h (or h♯) is affine, A = ψ(c0)·δ_{x*} and the value is ψ(c0) f(x*).
  bool delta = false;
};

/// ∫ A(x) f(x) dx. Each ball of f is split until it lies inside a coset on
/// which A is certified constant. Affine h (after sharpening) is handled as a
/// delta distribution; this needs a diagonal form.
PairingSide pairing_lhs(const MultiPoly& h, const BilinearForm& form, const SBFunction& f,
                        const AiryPolicy& policy = {}, const IntegrationOptions& opt = {});

/// ∫ ψ(h(y)) f̂(y) dy = Σ w q^{-km} ∫_{|y| ≤ q^k} ψ(h(y) - (a, y)) dy.
PairingSide pairing_rhs(const MultiPoly& h, const BilinearForm& form, const SBFunction& f,
                        const IntegrationOptions& opt = {});

struct PairingReport {
  PairingSide lhs, rhs;
  bool equal = false;
  nlohmann::json to_json() const;
};

}  // namespace airy
