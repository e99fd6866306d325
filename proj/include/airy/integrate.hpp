#pragma once

// Shell and ball integrals of ψ(h(y) - (x, y)) and assembly of
//
//     A(x) = ∫_{|y|≤1} ψ(h(y) - (x,y)) dy + Σ_{r≥1} ∫_{|y|=q^r} ψ(h(y) - (x,y)) dy
//
// Haar measure is normalized by vol(R^m) = 1. On {ϖ^{-s} z : z ∈ R^m} the
// integrand becomes ψ(G(z)/ϖ^E) for an integral polynomial G, so every
// integral is q^{m(s-E)} times a finite root-of-unity sum over (R/ϖ^E)^m.

#include <optional>
#include <string>
#include <vector>

#include "airy/cyclotomic.hpp"
#include "airy/expsum.hpp"
#include "airy/poly.hpp"
#include "json.hpp"

namespace airy {

using Vec = std::vector<LocalFieldElement>;

struct IntegrationOptions {
  uint64_t budget = 50'000'000;
  unsigned threads = 1;
  /// Plain coset enumeration instead of the critical-residue reduction.
  bool enumerate = false;
  /// Sum over residues mod ϖ^{E + extra} instead of ϖ^E.
  int64_t extra_modulus = 0;
};

struct RegionIntegral {
  CyclotomicSum value;
  int64_t E = 0;
  uint64_t nodes = 0;
};

/// ∫ over {ϖ^{-s} z : z ∈ R^m, z mod ϖ ∈ D} of ψ(h(y) - Σ b_i y_i).
RegionIntegral region_integral(const MultiPoly& h, const Vec& b, int64_t s, const ResidueDomain& domain,
                               const IntegrationOptions& opt = {});

/// Smallest E ≥ 1 making ϖ^E (h(ϖ^{-s}z) - Σ b_i ϖ^{-s} z_i - const) integral.
int64_t residue_exponent(const MultiPoly& h, const Vec& b, int64_t s);

/// M with ψ(h(y) - (x,y)) constant on y0 + (P^M)^m throughout {|y| = q^r}.
int64_t constancy_modulus(const MultiPoly& h, const BilinearForm& form, const Vec& x, int64_t r);

struct ShellReport {
  int64_t r = 0;
  CyclotomicSum value;
  int64_t coset_modulus = 0;
  /// Number of cosets of (P^M)^m in the shell.
  mpz_class coset_count;
  uint64_t nodes = 0;
};

ShellReport shell_integral(const MultiPoly& h, const BilinearForm& form, const Vec& x, int64_t r,
                           const IntegrationOptions& opt = {});

/// Piece E_μ of the shell: |y_μ| = q^r, |y_i| < q^r for i < μ, |y_i| ≤ q^r for i > μ.
CyclotomicSum shell_piece(const MultiPoly& h, const BilinearForm& form, const Vec& x, int64_t r, size_t mu,
                          const IntegrationOptions& opt = {});

CyclotomicSum ball_integral(const MultiPoly& h, const BilinearForm& form, const Vec& x, int64_t s,
                            const IntegrationOptions& opt = {});

/// Shells vanish for r ≥ s0 whenever |x| ≤ q^{(n-1)r - B}.
struct TailBound {
  int64_t s0 = 0;
  int64_t B = 0;
  uint32_t n = 0;
  /// ν(U^n) of each leading coefficient's variable.
  int64_t nu = 0;
  int64_t r0_for(int64_t x_exponent) const;
};

/// Explicit constants for h with diagonal leading form and p ∤ n (after
/// sharpening in characteristic p). Empty when no bound is available (p | n
/// in characteristic 0).
std::optional<TailBound> tail_bound(const MultiPoly& h, const BilinearForm& form);

/// r0 for |x| ≤ q^B, or empty as above.
std::optional<int64_t> theoretical_r0(const MultiPoly& h, const BilinearForm& form, int64_t B);

/// Smallest μ ≥ 1 with 1 + P^μ ⊆ U^n, found by enumerating n-th powers of
/// units modulo ϖ^{μ+2}; returns ν = μ + 1.
int64_t nu_of_power_subgroup(const FieldPtr& field, uint32_t n, int64_t max_mu = 8);

struct AiryPolicy {
  int zero_run = 3;
  int64_t max_r = 60;
  /// Skip the theoretical bound and accept the zero run alone.
  bool empirical = false;
};

struct AiryCertificate {
  Vec x;
  CyclotomicSum value;
  CyclotomicSum ball;
  int64_t r_stop = 0;
  int zero_run = 0;
  std::optional<int64_t> theoretical_r0;
  bool empirical = false;
  /// h♯ when h was sharpened before integration.
  std::optional<std::string> sharpened;
  std::vector<ShellReport> shells;

  nlohmann::json to_json() const;
};

/// Polynomial actually integrated: h, or h♯ for one-variable h in
/// characteristic p with p | deg h. Rejects degree ≤ 1.
MultiPoly effective_polynomial(const MultiPoly& h);

AiryCertificate airy_eval(const MultiPoly& h, const BilinearForm& form, const Vec& x, const AiryPolicy& policy = {},
                          const IntegrationOptions& opt = {});

/// -v of the max norm of x (|x| = q^B); a very negative number for x = 0.
int64_t norm_exponent(const Vec& x);

/// k such that A is constant on x + (P^k)^m; second is true when the scale
/// rests on the empirical zero run only.
std::pair<int64_t, bool> certified_constancy_scale(const MultiPoly& h, const BilinearForm& form, const Vec& x,
                                                   const AiryCertificate& cert);

/// Compares A(x) with A(x + δ) for `probes` random δ with v(δ) ≥ k.
bool local_constancy_check(const MultiPoly& h, const BilinearForm& form, const Vec& x, int64_t k, int probes,
                           uint64_t seed = 1, const IntegrationOptions& opt = {});

/// A subset of U given as residues modulo ϖ^k (digit vectors of length k).
struct SubgroupSpec {
  FieldPtr field;
  int64_t k = 1;
  std::vector<std::vector<uint32_t>> residues;
};

/// U^n modulo ϖ^k.
SubgroupSpec power_subgroup(const FieldPtr& field, uint32_t n, int64_t k);

/// Smallest μ ≤ k with 1 + P^μ ⊆ M (visible mod ϖ^k), ν = μ + 1.
int64_t subgroup_nu(const SubgroupSpec& M);

/// ∫_M ψ(c u) du. Throws BadSubgroupSpec unless M is a subgroup of (R/ϖ^k)^×.
CyclotomicSum subgroup_character_integral(const SubgroupSpec& M, const LocalFieldElement& c);

struct GrowthRow {
  int64_t tier = 0;
  double max_abs = 0;
  int samples = 0;
};

struct GrowthScan {
  std::vector<GrowthRow> rows;
  double slope = 0;

  std::string to_csv() const;
};

/// For each tier B, samples x with |x| = q^B (all unit residues mod ϖ^depth
/// in the first coordinate plus random digits), records max |A(x)| and fits
/// log max|A| against log |x| by least squares.
GrowthScan growth_scan(const MultiPoly& h, const BilinearForm& form, const std::vector<int64_t>& tiers,
                       int samples_per_tier, uint64_t seed = 1, const AiryPolicy& policy = {},
                       const IntegrationOptions& opt = {});

/// Least-squares slope of log(y) against tier·log(q).
double fitted_log_slope(const std::vector<GrowthRow>& rows, uint32_t q);

nlohmann::json to_json(const ShellReport& s);

}  // namespace airy
