#include "airy/distribution.hpp"

#include <map>

#include "airy/character.hpp"
#include "airy/error.hpp"
#include "airy/sharpmap.hpp"

namespace airy {

namespace {

using Key = std::vector<std::string>;

Key key_of(const Vec& c) {
  Key k;
  k.reserve(c.size());
  for (const auto& x : c) k.push_back(to_string(x));
  return k;
}

Vec reduce_vec(const Vec& c, int64_t k) {
  Vec r;
  r.reserve(c.size());
  for (const auto& x : c) r.push_back(reduce_mod(x, k));
  return r;
}

bool in_ball(const Vec& x, const Vec& center, int64_t k) {
  for (size_t i = 0; i < x.size(); ++i) {
    const auto d = x[i] - center[i];
    if (!d.is_zero() && d.valuation() < k) return false;
  }
  return true;
}

mpq_class q_power(uint32_t q, int64_t e) {
  mpz_class b = 1;
  for (int64_t i = 0; i < (e < 0 ? -e : e); ++i) b *= q;
  return e >= 0 ? mpq_class(b) : mpq_class(1, b);
}

void check_form(const BilinearForm& form, const SBFunction& f) {
  if (form.dim() != f.dim()) throw Error(ErrorKind::InvalidArgument, "form and function dimensions differ");
  if (!form.is_diagonal()) throw Error(ErrorKind::InvalidArgument, "fourier needs a diagonal form");
  for (size_t i = 0; i < form.dim(); ++i)
    if (!form.gram()[i][i].is_unit()) throw Error(ErrorKind::InvalidArgument, "fourier needs unit diagonal entries");
}

// Merge complete groups of q^m sibling cosets of equal weight into their parent.
SBFunction coarsen(const FieldPtr& F, size_t m, std::map<Key, SBTerm> level, int64_t k) {
  SBFunction out(F, m);
  const uint64_t full = ipow(F->q(), static_cast<uint32_t>(m));
  while (!level.empty()) {
    std::map<Key, std::vector<const SBTerm*>> groups;
    for (const auto& [key, t] : level) groups[key_of(reduce_vec(t.center, k - 1))].push_back(&t);
    std::map<Key, SBTerm> parent;
    for (const auto& [pk, members] : groups) {
      bool merge = members.size() == full;
      for (size_t i = 1; merge && i < members.size(); ++i) merge = members[i]->weight == members[0]->weight;
      if (merge) {
        parent.emplace(pk, SBTerm{reduce_vec(members[0]->center, k - 1), k - 1, members[0]->weight});
      } else {
        for (const auto* t : members) out.add_ball(t->center, t->k, t->weight);
      }
    }
    level = std::move(parent);
    --k;
  }
  return out;
}

}  // namespace

LocalFieldElement reduce_mod(const LocalFieldElement& a, int64_t k) {
  if (a.is_zero() || a.valuation() >= k) return a.field()->zero();
  const int64_t v = a.valuation();
  std::vector<uint32_t> d;
  d.reserve(static_cast<size_t>(k - v));
  for (int64_t i = v; i < k; ++i) d.push_back(a.digit_at(i));
  return a.field()->from_digits(v, std::move(d), true);
}

std::vector<Vec> coset_representatives(const FieldPtr& field, size_t m, int64_t lo, int64_t hi) {
  if (hi < lo) throw Error(ErrorKind::InvalidArgument, "empty coset range");
  const size_t len = static_cast<size_t>(hi - lo);
  std::vector<LocalFieldElement> line;
  std::vector<uint32_t> d(len, 0);
  const uint32_t q = field->q();
  while (true) {
    line.push_back(field->from_digits(lo, d, true));
    size_t i = 0;
    while (i < len && ++d[i] == q) d[i++] = 0;
    if (i == len) break;
  }
  std::vector<Vec> out{Vec{}};
  for (size_t j = 0; j < m; ++j) {
    std::vector<Vec> next;
    next.reserve(out.size() * line.size());
    for (const auto& v : out)
      for (const auto& x : line) {
        next.push_back(v);
        next.back().push_back(x);
      }
    out = std::move(next);
  }
  return out;
}

SBFunction SBFunction::ball(const Vec& center, int64_t k, const CyclotomicSum& weight) {
  if (center.empty()) throw Error(ErrorKind::InvalidArgument, "ball needs a center");
  SBFunction f(center[0].field(), center.size());
  f.add_ball(center, k, weight);
  return f;
}

void SBFunction::add_ball(const Vec& center, int64_t k, const CyclotomicSum& weight) {
  if (center.size() != m_) throw Error(ErrorKind::InvalidArgument, "ball center has wrong dimension");
  terms_.push_back({center, k, weight});
}

CyclotomicSum SBFunction::evaluate(const Vec& x) const {
  CyclotomicSum s;
  for (const auto& t : terms_)
    if (in_ball(x, t.center, t.k)) s += t.weight;
  return s.canonical();
}

SBFunction SBFunction::canonical() const {
  std::map<std::pair<int64_t, Key>, SBTerm> merged;
  for (const auto& t : terms_) {
    Vec c = reduce_vec(t.center, t.k);
    auto [it, fresh] = merged.try_emplace({t.k, key_of(c)}, SBTerm{c, t.k, t.weight});
    if (!fresh) it->second.weight += t.weight;
  }
  SBFunction out(field_, m_);
  for (auto& [key, t] : merged) {
    t.weight = t.weight.canonical();
    if (!t.weight.is_zero()) out.terms_.push_back(std::move(t));
  }
  return out;
}

CyclotomicSum SBFunction::integral() const {
  CyclotomicSum s;
  for (const auto& t : terms_) s += t.weight.scaled(q_power(field_->q(), -t.k * static_cast<int64_t>(m_)));
  return s.canonical();
}

int64_t SBFunction::support_exponent() const {
  int64_t S = INT64_MIN;
  for (const auto& t : terms_) S = std::max(S, -std::min(t.k, vector_valuation(t.center)));
  return S;
}

int64_t SBFunction::resolution() const {
  int64_t K = INT64_MIN;
  for (const auto& t : terms_) K = std::max(K, t.k);
  return K;
}

SBFunction SBFunction::scaled(const CyclotomicSum& c) const {
  SBFunction out = *this;
  for (auto& t : out.terms_) t.weight = t.weight * c;
  return out;
}

SBFunction SBFunction::reflected() const {
  SBFunction out = *this;
  for (auto& t : out.terms_)
    for (auto& x : t.center) x = -x;
  return out;
}

SBFunction operator+(const SBFunction& a, const SBFunction& b) {
  if (a.m_ != b.m_) throw Error(ErrorKind::InvalidArgument, "dimension mismatch");
  SBFunction out = a;
  out.terms_.insert(out.terms_.end(), b.terms_.begin(), b.terms_.end());
  return out;
}

SBFunction operator-(const SBFunction& a, const SBFunction& b) {
  return a + b.scaled(CyclotomicSum::rational(-1));
}

nlohmann::json SBFunction::to_json() const {
  auto j = nlohmann::json::array();
  for (const auto& t : terms_) {
    auto c = nlohmann::json::array();
    for (const auto& x : t.center) c.push_back(airy::to_string(x));
    j.push_back({{"center", c}, {"k", t.k}, {"weight", t.weight.to_json()}});
  }
  return j;
}

SBFunction SBFunction::from_json(const FieldPtr& field, const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw Error(ErrorKind::ParseError, "SB function must be a nonempty array");
  const size_t m = j[0].at("center").size();
  SBFunction f(field, m);
  for (const auto& t : j) {
    Vec c;
    for (const auto& s : t.at("center")) c.push_back(parse_element(field, s.get<std::string>()));
    f.add_ball(c, t.at("k").get<int64_t>(), CyclotomicSum::from_json(t.at("weight")));
  }
  return f;
}

SBFunction fourier(const SBFunction& f0, const BilinearForm& form) {
  check_form(form, f0);
  const SBFunction f = f0.canonical();
  const auto& F = f.field();
  const size_t m = f.dim();
  if (f.terms().empty()) return f;
  // f̂ lives in (P^{-S})^m and is constant on cosets of (P^J)^m
  int64_t S = INT64_MIN, J = INT64_MIN;
  for (const auto& t : f.terms()) {
    S = std::max(S, t.k);
    const int64_t v = vector_valuation(t.center);
    J = std::max(J, v == LocalFieldElement::kInfinity ? -t.k : std::max(-t.k, -v));
  }
  std::map<Key, SBTerm> grid;
  for (auto& c : coset_representatives(F, m, -S, J)) {
    const int64_t vc = vector_valuation(c);
    CyclotomicSum w;
    for (const auto& t : f.terms()) {
      if (vc != LocalFieldElement::kInfinity && vc < -t.k) continue;
      const mpq_class vol = q_power(F->q(), -t.k * static_cast<int64_t>(m));
      const auto chi = psi(-pair(form, c, t.center));
      w += t.weight.times_root(chi.p, chi.exponent).scaled(vol);
    }
    w = w.canonical();
    if (w.is_zero()) continue;
    Key key = key_of(c);
    grid.emplace(std::move(key), SBTerm{std::move(c), J, std::move(w)});
  }
  return coarsen(F, m, std::move(grid), J);
}

bool sb_equal(const SBFunction& f, const SBFunction& g) {
  const SBFunction d = (f - g).canonical();
  if (d.terms().empty()) return true;
  const int64_t S = d.support_exponent(), K = d.resolution();
  for (const auto& c : coset_representatives(d.field(), d.dim(), -S, std::max(K, -S)))
    if (!d.evaluate(c).is_zero()) return false;
  return true;
}

CyclotomicSum inner_product(const SBFunction& f, const SBFunction& g) {
  const SBFunction a = f.canonical(), b = g.canonical();
  if (a.terms().empty() || b.terms().empty()) return {};
  const int64_t S = std::max(a.support_exponent(), b.support_exponent());
  const int64_t K = std::max({a.resolution(), b.resolution(), -S});
  CyclotomicSum s;
  for (const auto& c : coset_representatives(a.field(), a.dim(), -S, K)) {
    const auto fa = a.evaluate(c);
    if (fa.is_zero()) continue;
    s += fa * b.evaluate(c).conj();
  }
  return s.scaled(q_power(a.field()->q(), -K * static_cast<int64_t>(a.dim()))).canonical();
}

PairingSide pairing_lhs(const MultiPoly& h, const BilinearForm& form, const SBFunction& f,
                        const AiryPolicy& policy, const IntegrationOptions& opt) {
  PairingSide out;
  const auto& F = f.field();
  const size_t m = f.dim();
  MultiPoly he = h;
  const uint32_t ch = F->characteristic();
  if (m == 1 && ch != 0 && h.degree() > 0 && h.degree() % ch == 0) he = sharpen(h);
  if (he.degree() <= 1) {
    if (!form.is_diagonal()) throw Error(ErrorKind::InvalidArgument, "delta pairing needs a diagonal form");
    Vec point;
    for (size_t i = 0; i < m; ++i) {
      Exponents e(m, 0);
      e[i] = 1;
      point.push_back(div(he.coefficient(e), form.gram()[i][i]));
    }
    out.delta = true;
    out.value = (psi(he.constant_term()).as_sum() * f.evaluate(point)).canonical();
    return out;
  }
  std::vector<std::pair<Vec, int64_t>> stack;
  CyclotomicSum total;
  const SBFunction fc = f.canonical();
  for (const auto& t : fc.terms()) {
    CyclotomicSum part;
    stack.assign(1, {t.center, t.k});
    while (!stack.empty()) {
      auto [a, k] = std::move(stack.back());
      stack.pop_back();
      const auto cert = airy_eval(h, form, a, policy, opt);
      ++out.evaluations;
      const auto [kappa, empirical] = certified_constancy_scale(h, form, a, cert);
      out.empirical |= empirical;
      if (kappa <= k) {
        part += cert.value.scaled(q_power(F->q(), -k * static_cast<int64_t>(m)));
        continue;
      }
      for (const auto& d : coset_representatives(F, m, k, k + 1)) {
        Vec child = a;
        for (size_t i = 0; i < m; ++i) child[i] = child[i] + d[i];
        stack.push_back({std::move(child), k + 1});
      }
    }
    total += part * t.weight;
  }
  out.value = total.canonical();
  return out;
}

PairingSide pairing_rhs(const MultiPoly& h, const BilinearForm& form, const SBFunction& f,
                        const IntegrationOptions& opt) {
  PairingSide out;
  CyclotomicSum total;
  const SBFunction fc = f.canonical();
  for (const auto& t : fc.terms()) {
    const mpq_class vol = q_power(f.field()->q(), -t.k * static_cast<int64_t>(f.dim()));
    total += ball_integral(h, form, t.center, t.k, opt).scaled(vol) * t.weight;
    ++out.evaluations;
  }
  out.value = total.canonical();
  return out;
}

nlohmann::json PairingReport::to_json() const {
  return {{"lhs", lhs.value.to_json()},
          {"rhs", rhs.value.to_json()},
          {"lhs_text", lhs.value.to_string()},
          {"rhs_text", rhs.value.to_string()},
          {"lhs_evaluations", lhs.evaluations},
          {"rhs_evaluations", rhs.evaluations},
          {"empirical", lhs.empirical},
          {"delta", lhs.delta},
          {"equal", equal}};
}

}  // namespace airy
