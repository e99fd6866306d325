#include "airy/cyclotomic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "airy/error.hpp"

namespace airy {

uint64_t ipow(uint64_t base, uint32_t e) {
  uint64_t r = 1;
  for (uint32_t i = 0; i < e; ++i) {
    if (r > (uint64_t{1} << 62) / base) throw Error(ErrorKind::PrecisionExhausted, "p^level overflows 64 bits");
    r *= base;
  }
  return r;
}

RootExponent RootExponent::make(uint64_t num, uint32_t level, uint32_t p) {
  if (level == 0) return {0, 0};
  num %= ipow(p, level);
  if (num == 0) return {0, 0};
  while (level > 0 && num % p == 0) {
    num /= p;
    --level;
  }
  return {num, level};
}

double RootExponent::as_double(uint32_t p) const {
  if (level == 0) return 0.0;
  return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(ipow(p, level)));
}

RootExponent RootExponent::negated(uint32_t p) const {
  if (level == 0) return *this;
  return make(ipow(p, level) - num, level, p);
}

RootExponent RootExponent::plus(const RootExponent& o, uint32_t p) const {
  uint32_t L = std::max(level, o.level);
  uint64_t m = ipow(p, L);
  unsigned __int128 a = static_cast<unsigned __int128>(num) * ipow(p, L - level);
  unsigned __int128 b = static_cast<unsigned __int128>(o.num) * ipow(p, L - o.level);
  return make(static_cast<uint64_t>((a + b) % m), L, p);
}

// ---------------------------------------------------------------------------

CyclotomicSum CyclotomicSum::rational(const mpq_class& c) {
  CyclotomicSum s;
  if (c != 0) s.terms_[{0, 0}] = c;
  return s;
}

CyclotomicSum CyclotomicSum::root(uint32_t p, RootExponent exponent, const mpq_class& coeff) {
  CyclotomicSum s;
  s.add_term(p, exponent, coeff);
  return s;
}

void CyclotomicSum::adopt_prime(uint32_t p) {
  if (p == 0) return;
  if (p_ == 0) {
    p_ = p;
  } else if (p_ != p) {
    throw Error(ErrorKind::MixedPrime, "roots of unity of different prime-power orders");
  }
}

void CyclotomicSum::add_term(uint32_t p, RootExponent exponent, const mpq_class& coeff) {
  if (coeff == 0) return;
  if (exponent.level > 0) adopt_prime(p);
  mpq_class c = coeff / scale_;
  auto key = std::make_pair(exponent.level, exponent.num);
  auto it = terms_.find(key);
  if (it == terms_.end()) {
    terms_.emplace(key, c);
  } else {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

CyclotomicSum& CyclotomicSum::operator+=(const CyclotomicSum& b) {
  adopt_prime(b.p_);
  for (const auto& [key, c] : b.terms_) add_term(p_, {key.second, key.first}, c * b.scale_);
  return *this;
}

CyclotomicSum operator+(const CyclotomicSum& a, const CyclotomicSum& b) {
  CyclotomicSum r = a;
  r += b;
  return r;
}

CyclotomicSum operator-(const CyclotomicSum& a, const CyclotomicSum& b) { return a + b.scaled(-1); }

CyclotomicSum operator*(const CyclotomicSum& a, const CyclotomicSum& b) {
  CyclotomicSum r;
  r.adopt_prime(a.p_);
  r.adopt_prime(b.p_);
  for (const auto& [ka, ca] : a.terms_) {
    for (const auto& [kb, cb] : b.terms_) {
      RootExponent e = RootExponent{ka.second, ka.first}.plus({kb.second, kb.first}, r.p_ == 0 ? 2 : r.p_);
      r.add_term(r.p_, e, ca * cb);
    }
  }
  return r.scaled(a.scale_ * b.scale_);
}

CyclotomicSum CyclotomicSum::scaled(const mpq_class& w) const {
  if (w == 0) return {};
  CyclotomicSum r = *this;
  r.scale_ *= w;
  r.scale_.canonicalize();
  return r;
}

CyclotomicSum CyclotomicSum::times_root(uint32_t p, RootExponent exponent) const {
  if (exponent.level == 0) return *this;
  CyclotomicSum r;
  r.adopt_prime(p_);
  r.adopt_prime(p);
  r.scale_ = scale_;
  for (const auto& [k, c] : terms_) {
    RootExponent e = RootExponent{k.second, k.first}.plus(exponent, r.p_);
    r.terms_[{e.level, e.num}] += c;
  }
  std::erase_if(r.terms_, [](const auto& kv) { return kv.second == 0; });
  return r;
}

CyclotomicSum CyclotomicSum::conj() const {
  CyclotomicSum r;
  r.p_ = p_;
  r.scale_ = scale_;
  for (const auto& [k, c] : terms_) {
    RootExponent e = RootExponent{k.second, k.first}.negated(p_ == 0 ? 2 : p_);
    r.terms_[{e.level, e.num}] += c;
  }
  return r;
}

CyclotomicSum CyclotomicSum::canonical() const {
  CyclotomicSum out;
  out.p_ = p_;
  if (terms_.empty()) return out;
  uint32_t L = 0;
  for (const auto& kv : terms_) L = std::max(L, kv.first.first);
  if (L == 0) {
    mpq_class v = 0;
    for (const auto& kv : terms_) v += kv.second;
    v *= scale_;
    v.canonicalize();
    if (v != 0) out.terms_[{0, 0}] = v;
    return out;
  }
  const uint32_t p = p_;
  const uint64_t block = ipow(p, L - 1);
  const uint64_t phi = (p - 1) * block;
  std::map<uint64_t, mpq_class> coords;
  for (const auto& [k, c] : terms_) {
    uint64_t j = k.second * ipow(p, L - k.first);
    mpq_class v = c * scale_;
    if (j < phi) {
      coords[j] += v;
    } else {
      // ζ^{(p-1)·block + t} = -Σ_{i<p-1} ζ^{t + i·block}
      uint64_t t = j - phi;
      for (uint64_t i = 0; i + 1 < p; ++i) coords[t + i * block] -= v;
    }
  }
  std::erase_if(coords, [](const auto& kv) { return kv.second == 0; });
  // Descend the tower while everything lives in a smaller cyclotomic field.
  uint32_t level = L;
  while (level > 0 && std::all_of(coords.begin(), coords.end(), [p](const auto& kv) { return kv.first % p == 0; })) {
    std::map<uint64_t, mpq_class> next;
    for (auto& [j, v] : coords) next.emplace(j / p, v);
    coords.swap(next);
    --level;
  }
  for (auto& [j, v] : coords) {
    v.canonicalize();
    RootExponent e = RootExponent::make(j, level, p);
    out.terms_[{e.level, e.num}] = v;
  }
  return out;
}

bool CyclotomicSum::is_zero() const { return canonical().terms_.empty(); }

bool CyclotomicSum::is_rational(mpq_class* value) const {
  auto c = canonical();
  for (const auto& kv : c.terms_) {
    if (kv.first.first != 0) return false;
  }
  if (value) *value = c.terms_.empty() ? mpq_class(0) : c.terms_.begin()->second;
  return true;
}

std::complex<double> CyclotomicSum::to_complex() const {
  auto c = canonical();
  std::vector<std::pair<long double, long double>> items;
  for (const auto& [k, v] : c.terms_) {
    long double x = k.first == 0 ? 0.0L
                                 : static_cast<long double>(k.second) / static_cast<long double>(ipow(p_, k.first));
    items.emplace_back(x, static_cast<long double>(v.get_d()));
  }
  std::sort(items.begin(), items.end());
  long double re = 0, im = 0;
  const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  for (auto& [x, w] : items) {
    re += w * std::cos(two_pi * x);
    im += w * std::sin(two_pi * x);
  }
  return {static_cast<double>(re), static_cast<double>(im)};
}

bool operator==(const CyclotomicSum& a, const CyclotomicSum& b) {
  auto ca = a.canonical(), cb = b.canonical();
  return ca.terms_ == cb.terms_;
}

nlohmann::json CyclotomicSum::to_json() const {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [k, c] : terms_) {
    mpq_class v = c;
    v.canonicalize();
    terms.push_back({{"num", k.second},
                     {"den_pow", k.first},
                     {"coeff_num", v.get_num().get_str()},
                     {"coeff_den", v.get_den().get_str()}});
  }
  return {{"prime", p_}, {"scale", scale_.get_str()}, {"terms", terms}};
}

CyclotomicSum CyclotomicSum::from_json(const nlohmann::json& j) {
  CyclotomicSum s;
  uint32_t p = j.at("prime").get<uint32_t>();
  for (const auto& t : j.at("terms")) {
    mpq_class c(mpz_class(t.at("coeff_num").get<std::string>()), mpz_class(t.at("coeff_den").get<std::string>()));
    c.canonicalize();
    s.add_term(p, RootExponent::make(t.at("num").get<uint64_t>(), t.at("den_pow").get<uint32_t>(), p == 0 ? 2 : p), c);
  }
  s.adopt_prime(p);
  return s.scaled(mpq_class(j.at("scale").get<std::string>()));
}

std::string CyclotomicSum::to_string() const {
  auto c = canonical();
  if (c.terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, v] : c.terms_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << v.get_str() << ")";
    if (k.first != 0) os << "*e(" << k.second << "/" << p_ << "^" << k.first << ")";
  }
  return os.str();
}

CyclotomicSum cyclo_add(const CyclotomicSum& a, const CyclotomicSum& b) { return a + b; }
CyclotomicSum cyclo_scale(const CyclotomicSum& a, const mpq_class& w) { return a.scaled(w); }
bool cyclo_is_zero(const CyclotomicSum& a) { return a.is_zero(); }
std::complex<double> cyclo_to_complex(const CyclotomicSum& a) { return a.to_complex(); }

}  // namespace airy
