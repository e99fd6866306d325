#include "airy/integrate.hpp"

#include <cmath>
#include <random>
#include <set>

#include "airy/character.hpp"
#include "airy/sharpmap.hpp"

namespace airy {

namespace {

constexpr int64_t kNoNorm = std::numeric_limits<int64_t>::min() / 4;

int64_t ceil_div(int64_t a, int64_t b) {
  // b > 0
  return a >= 0 ? (a + b - 1) / b : -((-a) / b);
}

mpq_class q_power(uint32_t q, int64_t e) {
  mpz_class t;
  mpz_ui_pow_ui(t.get_mpz_t(), q, static_cast<unsigned long>(e < 0 ? -e : e));
  if (e >= 0) return mpq_class(t);
  return mpq_class(mpz_class(1), t);
}

Exponents unit_exponent(size_t m, size_t i) {
  Exponents e(m, 0);
  e[i] = 1;
  return e;
}

MultiPoly subtract_linear(const MultiPoly& h, const Vec& b) {
  if (b.size() != h.num_vars()) throw Error(ErrorKind::InvalidArgument, "dimension of x does not match h");
  MultiPoly H = h;
  for (size_t i = 0; i < b.size(); ++i) {
    if (!b[i].is_zero()) H.add_term(-b[i], unit_exponent(h.num_vars(), i));
  }
  return H;
}

int64_t exponent_of(const MultiPoly& H, int64_t s) {
  int64_t E = 1;
  for (const auto& [e, c] : H.terms()) {
    const int64_t d = total_degree(e);
    if (d == 0) continue;
    E = std::max(E, s * d - c.valuation());
  }
  return E;
}

Vec linear_part(const BilinearForm& form, const Vec& x) { return form.linear_coefficients(x); }

}  // namespace

int64_t residue_exponent(const MultiPoly& h, const Vec& b, int64_t s) {
  return exponent_of(subtract_linear(h, b), s);
}

RegionIntegral region_integral(const MultiPoly& h, const Vec& b, int64_t s, const ResidueDomain& domain,
                               const IntegrationOptions& opt) {
  const auto& F = h.field();
  const size_t m = h.num_vars();
  const MultiPoly H = subtract_linear(h, b);
  const int64_t E = exponent_of(H, s) + opt.extra_modulus;
  ResiduePoly g;
  g.m = m;
  g.E = E;
  LocalFieldElement c0 = F->zero();
  for (const auto& [e, c] : H.terms()) {
    const int64_t d = total_degree(e);
    if (d == 0) {
      c0 = c;
      continue;
    }
    g.terms.push_back({e, residue_digits(c, E - s * d, E)});
  }
  ExpSumOptions eo{opt.budget, opt.threads};
  ExpSumResult res = opt.enumerate ? exponential_sum_enumerate(*F, g, domain, E, eo)
                                   : exponential_sum(*F, g, domain, eo);
  CyclotomicSum v = res.value;
  if (!c0.is_zero()) v = v.times_root(F->p(), psi(c0).exponent);
  v = v.scaled(q_power(F->q(), static_cast<int64_t>(m) * (s - E))).canonical();
  return {v, E, res.nodes};
}

int64_t constancy_modulus(const MultiPoly& h, const BilinearForm& form, const Vec& x, int64_t r) {
  return residue_exponent(h, linear_part(form, x), r) - r;
}

ShellReport shell_integral(const MultiPoly& h, const BilinearForm& form, const Vec& x, int64_t r,
                           const IntegrationOptions& opt) {
  const auto res = region_integral(h, linear_part(form, x), r, primitive_residues(), opt);
  ShellReport rep;
  rep.r = r;
  rep.value = res.value;
  rep.coset_modulus = res.E - r;
  const auto m = static_cast<unsigned long>(h.num_vars());
  mpz_class all, inner;
  mpz_ui_pow_ui(all.get_mpz_t(), h.field()->q(), m * static_cast<unsigned long>(res.E));
  mpz_ui_pow_ui(inner.get_mpz_t(), h.field()->q(), m * static_cast<unsigned long>(res.E - 1));
  rep.coset_count = all - inner;
  rep.nodes = res.nodes;
  return rep;
}

CyclotomicSum shell_piece(const MultiPoly& h, const BilinearForm& form, const Vec& x, int64_t r, size_t mu,
                          const IntegrationOptions& opt) {
  if (mu >= h.num_vars()) throw Error(ErrorKind::InvalidArgument, "piece index out of range");
  ResidueDomain piece = [mu](const std::vector<uint32_t>& z) {
    for (size_t i = 0; i < mu; ++i)
      if (z[i]) return false;
    return z[mu] != 0;
  };
  return region_integral(h, linear_part(form, x), r, piece, opt).value;
}

CyclotomicSum ball_integral(const MultiPoly& h, const BilinearForm& form, const Vec& x, int64_t s,
                            const IntegrationOptions& opt) {
  return region_integral(h, linear_part(form, x), s, all_residues(), opt).value;
}

// ---------------------------------------------------------------------------

SubgroupSpec power_subgroup(const FieldPtr& field, uint32_t n, int64_t k) {
  if (k < 1) throw Error(ErrorKind::BadSubgroupSpec, "modulus exponent must be positive");
  const uint32_t q = field->q();
  std::set<std::vector<uint32_t>> found;
  std::vector<uint32_t> d(static_cast<size_t>(k), 0);
  d[0] = 1;
  while (true) {
    const auto u = field->from_digits(0, d, true);
    found.insert(residue_digits(u.pow(n), 0, k));
    size_t i = 0;
    while (i < d.size()) {
      if (++d[i] < q) break;
      d[i] = (i == 0) ? 1 : 0;
      ++i;
    }
    if (i == d.size()) break;
  }
  return {field, k, {found.begin(), found.end()}};
}

namespace {

void validate(const SubgroupSpec& M, std::set<std::vector<uint32_t>>& members) {
  if (!M.field || M.k < 1 || M.residues.empty()) throw Error(ErrorKind::BadSubgroupSpec, "empty subgroup");
  for (const auto& r : M.residues) {
    if (static_cast<int64_t>(r.size()) != M.k || r[0] == 0) {
      throw Error(ErrorKind::BadSubgroupSpec, "residues must be units given to the stated modulus");
    }
    for (uint32_t c : r)
      if (c >= M.field->q()) throw Error(ErrorKind::BadSubgroupSpec, "digit out of range");
    members.insert(r);
  }
  std::vector<LocalFieldElement> elems;
  for (const auto& r : members) elems.push_back(M.field->from_digits(0, r, true));
  for (const auto& a : elems) {
    for (const auto& b : elems) {
      if (!members.count(residue_digits(a * b, 0, M.k))) {
        throw Error(ErrorKind::BadSubgroupSpec, "residue set is not closed under multiplication");
      }
    }
  }
}

}  // namespace

int64_t subgroup_nu(const SubgroupSpec& M) {
  std::set<std::vector<uint32_t>> members;
  validate(M, members);
  const uint32_t q = M.field->q();
  for (int64_t mu = 1; mu <= M.k; ++mu) {
    bool contained = true;
    std::vector<uint32_t> d(static_cast<size_t>(M.k), 0);
    d[0] = 1;
    while (contained) {
      if (!members.count(d)) contained = false;
      int64_t i = mu;
      while (i < M.k && ++d[i] == q) d[i++] = 0;
      if (i >= M.k) break;
    }
    if (contained) return mu + 1;
  }
  return M.k + 1;
}

int64_t nu_of_power_subgroup(const FieldPtr& field, uint32_t n, int64_t max_mu) {
  for (int64_t k = 3; k <= max_mu + 2; ++k) {
    const int64_t nu = subgroup_nu(power_subgroup(field, n, k));
    if (nu - 1 <= k - 2) return nu;
  }
  throw Error(ErrorKind::NoConvergence, "1 + P^mu not contained in U^n for the searched mu");
}

CyclotomicSum subgroup_character_integral(const SubgroupSpec& M, const LocalFieldElement& c) {
  std::set<std::vector<uint32_t>> members;
  validate(M, members);
  const auto& F = M.field;
  // ψ(c·) is trivial on P^k exactly when v(c) + k ≥ 0
  if (!c.is_zero() && c.valuation() + M.k < 0) return {};
  const mpq_class w = q_power(F->q(), -M.k);
  CyclotomicSum s;
  for (const auto& r : members) {
    s.add_term(F->p(), psi(c * F->from_digits(0, r, true)).exponent, w);
  }
  return s.canonical();
}

// ---------------------------------------------------------------------------

int64_t TailBound::r0_for(int64_t x_exponent) const {
  if (x_exponent <= kNoNorm) return s0;
  return std::max(s0, ceil_div(x_exponent + B, static_cast<int64_t>(n) - 1));
}

std::optional<TailBound> tail_bound(const MultiPoly& h0, const BilinearForm& form) {
  const MultiPoly h = effective_polynomial(h0);
  const auto lead = check_diagonal_leading(h);
  const auto& F = h.field();
  const uint32_t n = lead.n;
  if (n % F->p() == 0) return std::nullopt;
  TailBound tb;
  tb.n = n;
  tb.nu = nu_of_power_subgroup(F, n);
  tb.s0 = 1;
  tb.B = kNoNorm;
  const size_t m = h.num_vars();
  for (size_t mu = 0; mu < m; ++mu) {
    const int64_t va = lead.a[mu].valuation();
    int64_t s = std::max<int64_t>(1, ceil_div(tb.nu + kBuiltinCharacterOrder + va, n));
    for (const auto& [e, c] : h.terms()) {
      const int64_t d = total_degree(e);
      if (d == 0 || d >= static_cast<int64_t>(n) || e[mu] == 0) continue;
      s = std::max(s, ceil_div(1 + va - c.valuation(), static_cast<int64_t>(n) - d));
    }
    int64_t D = kNoNorm;
    for (size_t i = 0; i < m; ++i) {
      const auto& g = form.gram()[i][mu];
      if (!g.is_zero()) D = std::max(D, -g.valuation());
    }
    tb.s0 = std::max(tb.s0, s);
    tb.B = std::max(tb.B, 1 + va + D);
  }
  return tb;
}

std::optional<int64_t> theoretical_r0(const MultiPoly& h, const BilinearForm& form, int64_t B) {
  auto tb = tail_bound(h, form);
  if (!tb) return std::nullopt;
  return tb->r0_for(B);
}

// ---------------------------------------------------------------------------

MultiPoly effective_polynomial(const MultiPoly& h) {
  const auto lead = check_diagonal_leading(h);
  if (!lead.requires_sharpening) return h;
  MultiPoly hs = sharpen(h);
  check_diagonal_leading(hs);
  return hs;
}

int64_t norm_exponent(const Vec& x) {
  int64_t B = kNoNorm;
  for (const auto& c : x)
    if (!c.is_zero()) B = std::max(B, -c.valuation());
  return B;
}

nlohmann::json to_json(const ShellReport& s) {
  const auto z = s.value.to_complex();
  return {{"r", s.r},
          {"value", s.value.to_json()},
          {"value_complex", {z.real(), z.imag()}},
          {"is_zero", s.value.is_zero()},
          {"coset_modulus", s.coset_modulus},
          {"coset_count", s.coset_count.get_str()},
          {"nodes", s.nodes}};
}

nlohmann::json AiryCertificate::to_json() const {
  nlohmann::json xs = nlohmann::json::array();
  for (const auto& c : x) xs.push_back(airy::to_string(c));
  nlohmann::json sh = nlohmann::json::array();
  for (const auto& s : shells) sh.push_back(airy::to_json(s));
  const auto z = value.to_complex();
  nlohmann::json j{{"x", xs},
                   {"value", value.to_json()},
                   {"value_complex", {z.real(), z.imag()}},
                   {"ball", ball.to_json()},
                   {"r_stop", r_stop},
                   {"zero_run", zero_run},
                   {"empirical", empirical},
                   {"shells", sh}};
  j["theoretical_r0"] = theoretical_r0 ? nlohmann::json(*theoretical_r0) : nlohmann::json(nullptr);
  j["sharpened"] = sharpened ? nlohmann::json(*sharpened) : nlohmann::json(nullptr);
  return j;
}

AiryCertificate airy_eval(const MultiPoly& h, const BilinearForm& form, const Vec& x, const AiryPolicy& policy,
                          const IntegrationOptions& opt) {
  AiryCertificate cert;
  cert.x = x;
  const MultiPoly he = policy.empirical ? h : effective_polynomial(h);
  if (!(he == h)) cert.sharpened = to_string(he);
  if (!policy.empirical) {
    if (auto tb = tail_bound(he, form)) cert.theoretical_r0 = tb->r0_for(norm_exponent(x));
  }
  cert.empirical = !cert.theoretical_r0.has_value();
  cert.ball = ball_integral(he, form, x, 0, opt);
  cert.value = cert.ball;
  int run = 0;
  for (int64_t r = 1; r <= policy.max_r; ++r) {
    ShellReport s = shell_integral(he, form, x, r, opt);
    run = s.value.is_zero() ? run + 1 : 0;
    cert.value += s.value;
    cert.shells.push_back(std::move(s));
    if (run >= policy.zero_run && (!cert.theoretical_r0 || r >= *cert.theoretical_r0)) {
      cert.r_stop = r;
      cert.zero_run = run;
      cert.value = cert.value.canonical();
      return cert;
    }
  }
  throw Error(ErrorKind::NoConvergence, "no run of vanishing shells before max_r");
}

std::pair<int64_t, bool> certified_constancy_scale(const MultiPoly& h, const BilinearForm& form, const Vec& x,
                                                   const AiryCertificate& cert) {
  const int64_t D = form.bound_exponent();
  if (!cert.empirical) {
    const MultiPoly he = effective_polynomial(h);
    if (auto tb = tail_bound(he, form)) {
      const int64_t R = std::max<int64_t>(tb->r0_for(std::max<int64_t>(norm_exponent(x), 0)), 0);
      return {std::max<int64_t>(R + D, 0), false};
    }
  }
  return {std::max<int64_t>(cert.r_stop + D, 0), true};
}

bool local_constancy_check(const MultiPoly& h, const BilinearForm& form, const Vec& x, int64_t k, int probes,
                           uint64_t seed, const IntegrationOptions& opt) {
  const auto& F = h.field();
  const auto base = airy_eval(h, form, x, {}, opt).value;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<uint32_t> digit(0, F->q() - 1);
  for (int t = 0; t < probes; ++t) {
    Vec y = x;
    for (auto& c : y) {
      std::vector<uint32_t> d(3);
      for (auto& v : d) v = digit(rng);
      c = c + F->from_digits(k, d, true);
    }
    if (!(airy_eval(h, form, y, {}, opt).value == base)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

double fitted_log_slope(const std::vector<GrowthRow>& rows, uint32_t q) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows)
    if (r.max_abs > 0) pts.emplace_back(static_cast<double>(r.tier) * std::log(static_cast<double>(q)), std::log(r.max_abs));
  if (pts.size() < 2) return 0.0;
  double mx = 0, my = 0;
  for (auto [a, b] : pts) {
    mx += a;
    my += b;
  }
  mx /= pts.size();
  my /= pts.size();
  double sxy = 0, sxx = 0;
  for (auto [a, b] : pts) {
    sxy += (a - mx) * (b - my);
    sxx += (a - mx) * (a - mx);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

std::string GrowthScan::to_csv() const {
  std::string out = "norm_tier,max_abs,fitted_slope\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%lld,%.12e,%.6f\n", static_cast<long long>(r.tier), r.max_abs, slope);
    out += buf;
  }
  return out;
}

GrowthScan growth_scan(const MultiPoly& h, const BilinearForm& form, const std::vector<int64_t>& tiers,
                       int samples_per_tier, uint64_t seed, const AiryPolicy& policy, const IntegrationOptions& opt) {
  const auto& F = h.field();
  const size_t m = h.num_vars();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<uint32_t> digit(0, F->q() - 1), unit(1, F->q() - 1);
  GrowthScan scan;
  for (int64_t B : tiers) {
    GrowthRow row;
    row.tier = B;
    for (int t = 0; t < samples_per_tier; ++t) {
      Vec x;
      for (size_t i = 0; i < m; ++i) {
        std::vector<uint32_t> d(4);
        for (auto& v : d) v = digit(rng);
        if (i == 0) d[0] = unit(rng);
        x.push_back(F->from_digits(-B, d, true));
      }
      const double a = std::abs(airy_eval(h, form, x, policy, opt).value.to_complex());
      row.max_abs = std::max(row.max_abs, a);
      ++row.samples;
    }
    scan.rows.push_back(row);
  }
  scan.slope = fitted_log_slope(scan.rows, F->q());
  return scan;
}

}  // namespace airy
