#include "airy/localfield.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>

namespace airy {

namespace {

constexpr int64_t kInf = LocalFieldElement::kInfinity;

mpz_class mpz_pow(uint32_t p, uint64_t e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), p, e);
  return r;
}

mpz_class digits_to_mpz(const std::vector<uint32_t>& digits, uint32_t p) {
  mpz_class r = 0;
  for (size_t i = digits.size(); i-- > 0;) {
    r *= p;
    r += digits[i];
  }
  return r;
}

/// Base-p digits of a non-negative integer; exactly `count` digits, or all of
/// them when count < 0.
std::vector<uint32_t> mpz_to_digits(mpz_class u, uint32_t p, int64_t count) {
  std::vector<uint32_t> out;
  mpz_class q, r;
  while ((count < 0 && u != 0) || (count >= 0 && static_cast<int64_t>(out.size()) < count)) {
    mpz_fdiv_qr_ui(q.get_mpz_t(), r.get_mpz_t(), u.get_mpz_t(), p);
    out.push_back(static_cast<uint32_t>(r.get_ui()));
    u = q;
  }
  return out;
}

int64_t strip_p(mpz_class& u, uint32_t p) {
  int64_t k = 0;
  if (u == 0) return 0;
  while (mpz_divisible_ui_p(u.get_mpz_t(), p)) {
    mpz_divexact_ui(u.get_mpz_t(), u.get_mpz_t(), p);
    ++k;
  }
  return k;
}

void check_same(const LocalFieldElement& a, const LocalFieldElement& b) {
  if (!a.field() || !b.field()) throw Error(ErrorKind::InvalidArgument, "uninitialized element");
  if (a.field() != b.field() && !(a.field()->config() == b.field()->config())) {
    throw Error(ErrorKind::ConfigMismatch, "operands belong to different fields");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// FieldConfig / primes

FieldConfig FieldConfig::padic(uint32_t p, int precision) {
  FieldConfig c;
  c.kind = FieldKind::PAdic;
  c.p = p;
  c.f = 1;
  c.precision = precision;
  return c;
}

FieldConfig FieldConfig::laurent(uint32_t p, uint32_t f, int precision) {
  FieldConfig c;
  c.kind = FieldKind::Laurent;
  c.p = p;
  c.f = f;
  c.precision = precision;
  return c;
}

bool is_prime(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

std::optional<std::vector<uint32_t>> builtin_modulus(uint32_t p, uint32_t f) {
  if (f == 1) return std::vector<uint32_t>{0, 1};
  if (p == 2 && f == 2) return std::vector<uint32_t>{1, 1, 1};
  if (p == 2 && f == 3) return std::vector<uint32_t>{1, 1, 0, 1};
  if (p == 3 && f == 2) return std::vector<uint32_t>{2, 2, 1};
  if (p == 3 && f == 3) return std::vector<uint32_t>{1, 2, 0, 1};
  if (p == 5 && f == 2) return std::vector<uint32_t>{2, 4, 1};
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// FiniteField

namespace {

bool poly_irreducible(const std::vector<uint32_t>& mod, uint32_t p) {
  // Brute force: no root-free factorization needed for the small degrees used;
  // check that no monic polynomial of degree 1..f/2 divides mod.
  const size_t f = mod.size() - 1;
  for (size_t d = 1; d <= f / 2; ++d) {
    uint64_t count = 1;
    for (size_t i = 0; i < d; ++i) count *= p;
    for (uint64_t code = 0; code < count; ++code) {
      std::vector<uint32_t> div(d + 1);
      uint64_t c = code;
      for (size_t i = 0; i < d; ++i) {
        div[i] = static_cast<uint32_t>(c % p);
        c /= p;
      }
      div[d] = 1;
      std::vector<int64_t> rem(mod.begin(), mod.end());
      for (size_t top = f; top + 1 > d; --top) {
        int64_t lead = rem[top] % p;
        if (lead != 0) {
          for (size_t i = 0; i <= d; ++i) {
            rem[top - d + i] = ((rem[top - d + i] - lead * div[i]) % p + p) % p;
          }
        }
        if (top == d) break;
      }
      bool zero = true;
      for (size_t i = 0; i < d; ++i) zero = zero && (rem[i] % p == 0);
      if (zero) return false;
    }
  }
  return true;
}

}  // namespace

FiniteField::FiniteField(uint32_t p, uint32_t f, std::vector<uint32_t> modulus)
    : p_(p), f_(f), modulus_(std::move(modulus)) {
  if (!is_prime(p)) throw Error(ErrorKind::InvalidArgument, "p must be prime");
  if (f < 1) throw Error(ErrorKind::InvalidArgument, "f must be >= 1");
  if (p >= (1u << 16)) throw Error(ErrorKind::InvalidArgument, "p must be < 65536");
  uint64_t q = 1;
  for (uint32_t i = 0; i < f; ++i) {
    q *= p;
    if (q >= (1ull << 31)) throw Error(ErrorKind::InvalidArgument, "q too large");
  }
  q_ = static_cast<uint32_t>(q);
  if (modulus_.empty()) {
    auto m = builtin_modulus(p, f);
    if (!m) throw Error(ErrorKind::InvalidArgument, "no built-in modulus for this q; supply one");
    modulus_ = *m;
  }
  if (modulus_.size() != f + 1 || modulus_.back() != 1) {
    throw Error(ErrorKind::InvalidArgument, "modulus must be monic of degree f");
  }
  for (auto c : modulus_) {
    if (c >= p) throw Error(ErrorKind::InvalidArgument, "modulus coefficient out of range");
  }
  if (f > 1 && !poly_irreducible(modulus_, p)) {
    throw Error(ErrorKind::InvalidArgument, "modulus is reducible over F_p");
  }
  if (f > 1 && q_ <= 729) {
    mul_table_.resize(static_cast<size_t>(q_) * q_);
    for (uint32_t a = 0; a < q_; ++a)
      for (uint32_t b = 0; b < q_; ++b)
        mul_table_[static_cast<size_t>(a) * q_ + b] = static_cast<uint16_t>(mul_slow(a, b));
    inv_table_.assign(q_, 0);
    for (uint32_t a = 1; a < q_; ++a)
      for (uint32_t b = 1; b < q_; ++b)
        if (mul_table_[static_cast<size_t>(a) * q_ + b] == 1) {
          inv_table_[a] = static_cast<uint16_t>(b);
          break;
        }
  }
}

std::vector<uint32_t> FiniteField::coords(Elem a) const {
  std::vector<uint32_t> c(f_);
  for (uint32_t i = 0; i < f_; ++i) {
    c[i] = a % p_;
    a /= p_;
  }
  return c;
}

FiniteField::Elem FiniteField::from_coords(const std::vector<uint32_t>& c) const {
  Elem r = 0;
  for (size_t i = c.size(); i-- > 0;) r = r * p_ + (c[i] % p_);
  return r;
}

FiniteField::Elem FiniteField::add(Elem a, Elem b) const {
  if (f_ == 1) return (a + b) % p_;
  Elem r = 0, scale = 1;
  for (uint32_t i = 0; i < f_; ++i) {
    r += ((a % p_ + b % p_) % p_) * scale;
    a /= p_;
    b /= p_;
    scale *= p_;
  }
  return r;
}

FiniteField::Elem FiniteField::neg(Elem a) const {
  if (f_ == 1) return (p_ - a % p_) % p_;
  Elem r = 0, scale = 1;
  for (uint32_t i = 0; i < f_; ++i) {
    r += ((p_ - a % p_) % p_) * scale;
    a /= p_;
    scale *= p_;
  }
  return r;
}

FiniteField::Elem FiniteField::sub(Elem a, Elem b) const { return add(a, neg(b)); }

FiniteField::Elem FiniteField::mul_slow(Elem a, Elem b) const {
  if (f_ == 1) return static_cast<Elem>((static_cast<uint64_t>(a) * b) % p_);
  auto ca = coords(a), cb = coords(b);
  std::vector<uint64_t> prod(2 * f_ - 1, 0);
  for (uint32_t i = 0; i < f_; ++i)
    for (uint32_t j = 0; j < f_; ++j) prod[i + j] = (prod[i + j] + ca[i] * cb[j]) % p_;
  for (size_t top = prod.size(); top-- > f_;) {
    uint64_t lead = prod[top] % p_;
    if (lead == 0) continue;
    for (uint32_t i = 0; i <= f_; ++i) {
      size_t idx = top - f_ + i;
      prod[idx] = (prod[idx] + (p_ - lead) * modulus_[i]) % p_;
    }
  }
  std::vector<uint32_t> out(f_);
  for (uint32_t i = 0; i < f_; ++i) out[i] = static_cast<uint32_t>(prod[i]);
  return from_coords(out);
}

FiniteField::Elem FiniteField::mul(Elem a, Elem b) const {
  if (!mul_table_.empty()) return mul_table_[static_cast<size_t>(a) * q_ + b];
  return mul_slow(a, b);
}

FiniteField::Elem FiniteField::pow(Elem a, uint64_t e) const {
  Elem r = 1, b = a;
  while (e) {
    if (e & 1) r = mul(r, b);
    b = mul(b, b);
    e >>= 1;
  }
  return r;
}

FiniteField::Elem FiniteField::inv(Elem a) const {
  if (a == 0) throw Error(ErrorKind::DivisionByZero, "inverse of 0 in F_q");
  if (!inv_table_.empty()) return inv_table_[a];
  return pow(a, q_ - 2);
}

FiniteField::Elem FiniteField::inv_frobenius(Elem a) const {
  Elem r = a;
  for (uint32_t i = 0; i + 1 < f_; ++i) r = frobenius(r);
  return r;
}

uint32_t FiniteField::trace(Elem a) const {
  Elem s = 0, c = a;
  for (uint32_t i = 0; i < f_; ++i) {
    s = add(s, c);
    c = frobenius(c);
  }
  return s;  // lies in the prime field: code == constant coordinate
}

FiniteField::Elem FiniteField::from_int(int64_t k) const {
  int64_t r = k % static_cast<int64_t>(p_);
  if (r < 0) r += p_;
  return static_cast<Elem>(r);
}

bool FiniteField::is_square(Elem a) const {
  if (a == 0 || p_ == 2) return true;
  return pow(a, (q_ - 1) / 2) == 1;
}

// ---------------------------------------------------------------------------
// LocalField

FieldPtr LocalField::make(const FieldConfig& config) {
  if (config.precision < 1) throw Error(ErrorKind::InvalidArgument, "precision must be >= 1");
  if (config.kind == FieldKind::PAdic && config.f != 1) {
    throw Error(ErrorKind::InvalidArgument, "extensions of Q_p are not supported (f must be 1)");
  }
  FiniteField residue(config.p, config.f, config.modulus);
  FieldConfig normalized = config;
  normalized.modulus = residue.modulus();
  return FieldPtr(new LocalField(normalized, std::move(residue)));
}

LocalFieldElement LocalField::zero() const {
  return LocalFieldElement(shared_from_this(), 0, {}, true);
}

LocalFieldElement LocalField::one() const {
  return LocalFieldElement(shared_from_this(), 0, {1}, true);
}

LocalFieldElement LocalField::uniformizer() const { return uniformizer_power(1); }

LocalFieldElement LocalField::uniformizer_power(int64_t k) const {
  return LocalFieldElement(shared_from_this(), k, {1}, true);
}

LocalFieldElement LocalField::from_mpz(const mpz_class& k) const { return from_signed(0, k); }

LocalFieldElement LocalField::from_signed(int64_t v, const mpz_class& k) const {
  if (k == 0) return zero();
  if (kind() == FieldKind::Laurent) {
    mpz_class r;
    mpz_fdiv_r_ui(r.get_mpz_t(), k.get_mpz_t(), p());
    return from_residue(static_cast<FiniteField::Elem>(r.get_ui())).shift(v);
  }
  mpz_class u = abs(k);
  v += strip_p(u, p());
  if (k > 0) return from_digits(v, mpz_to_digits(u, p(), -1), true);
  // -u = D - p^len with 0 <= D < p^len, len minimal
  int64_t len = 1;
  mpz_class pl = p();
  while (pl < u) {
    pl *= p();
    ++len;
  }
  if (len > precision()) {
    mpz_class m = mpz_pow(p(), precision());
    return from_digits(v, mpz_to_digits(m - (u % m), p(), precision()), false);
  }
  return LocalFieldElement(shared_from_this(), v, mpz_to_digits(pl - u, p(), len), true, true);
}

LocalFieldElement LocalField::from_int(int64_t k) const { return from_mpz(mpz_class(std::to_string(k))); }

LocalFieldElement LocalField::from_rational(const mpq_class& r0) const {
  mpq_class r = r0;
  r.canonicalize();
  if (r == 0) return zero();
  if (kind() == FieldKind::Laurent) {
    mpz_class den = r.get_den();
    if (mpz_divisible_ui_p(den.get_mpz_t(), p())) {
      throw Error(ErrorKind::InvalidArgument, "denominator divisible by the characteristic");
    }
    mpz_class n, d;
    mpz_fdiv_r_ui(n.get_mpz_t(), r.get_num_mpz_t(), p());
    mpz_fdiv_r_ui(d.get_mpz_t(), den.get_mpz_t(), p());
    const auto& k = residue_field();
    return from_residue(k.mul(static_cast<uint32_t>(n.get_ui()), k.inv(static_cast<uint32_t>(d.get_ui()))));
  }
  mpz_class num = r.get_num(), den = r.get_den();
  int64_t v = strip_p(num, p()) - strip_p(den, p());
  if (den == 1) {
    auto e = from_mpz(num);
    return e.shift(v - e.valuation());
  }
  mpz_class m = mpz_pow(p(), precision());
  mpz_class dinv;
  mpz_invert(dinv.get_mpz_t(), den.get_mpz_t(), m.get_mpz_t());
  mpz_class u = (num * dinv) % m;
  if (u < 0) u += m;
  return from_digits(v, mpz_to_digits(u, p(), precision()), false);
}

LocalFieldElement LocalField::from_residue(FiniteField::Elem a) const {
  if (a == 0) return zero();
  return LocalFieldElement(shared_from_this(), 0, {a % q()}, true);
}

LocalFieldElement LocalField::from_digits(int64_t valuation, std::vector<uint32_t> digits,
                                          bool exact) const {
  size_t lead = 0;
  while (lead < digits.size() && digits[lead] == 0) ++lead;
  if (lead == digits.size()) {
    if (exact) return zero();
    throw Error(ErrorKind::PrecisionExhausted, "no significant digits remain");
  }
  digits.erase(digits.begin(), digits.begin() + static_cast<std::ptrdiff_t>(lead));
  valuation += static_cast<int64_t>(lead);
  const size_t n = static_cast<size_t>(precision());
  if (digits.size() > n) {
    bool dropped_nonzero = std::any_of(digits.begin() + static_cast<std::ptrdiff_t>(n), digits.end(),
                                       [](uint32_t d) { return d != 0; });
    digits.resize(n);
    if (dropped_nonzero) exact = false;
  }
  if (exact) {
    while (!digits.empty() && digits.back() == 0) digits.pop_back();
  }
  for (auto& d : digits) {
    if (d >= (kind() == FieldKind::PAdic ? p() : q())) {
      throw Error(ErrorKind::InvalidArgument, "digit out of range");
    }
  }
  return LocalFieldElement(shared_from_this(), valuation, std::move(digits), exact);
}

// ---------------------------------------------------------------------------
// LocalFieldElement

int64_t LocalFieldElement::absolute_precision() const {
  if (exact_) return kInf;
  return valuation_ + static_cast<int64_t>(digits_.size());
}

uint32_t LocalFieldElement::digit_at(int64_t i) const {
  if (is_zero()) return 0;
  if (i < valuation_) return 0;
  if (i >= absolute_precision()) {
    throw Error(ErrorKind::PrecisionExhausted, "digit beyond known precision");
  }
  auto idx = static_cast<uint64_t>(i - valuation_);
  if (idx < digits_.size()) return digits_[idx];
  return negative_tail_ ? field_->p() - 1 : 0;
}

mpq_class LocalFieldElement::norm() const {
  if (is_zero()) return 0;
  mpq_class r = 1;
  mpz_class qv = mpz_pow(field_->q(), static_cast<uint64_t>(valuation_ < 0 ? -valuation_ : valuation_));
  if (valuation_ >= 0) {
    r = mpq_class(1, 1) / mpq_class(qv);
  } else {
    r = mpq_class(qv);
  }
  r.canonicalize();
  return r;
}

FiniteField::Elem LocalFieldElement::residue() const {
  if (is_zero()) return 0;
  if (valuation_ < 0) throw Error(ErrorKind::InvalidArgument, "residue of a non-integral element");
  return valuation_ > 0 ? 0 : digits_[0];
}

LocalFieldElement LocalFieldElement::shift(int64_t k) const {
  if (is_zero()) return *this;
  LocalFieldElement r = *this;
  r.valuation_ += k;
  return r;
}

LocalFieldElement LocalFieldElement::truncate_relative(int n) const {
  if (is_zero() || (!negative_tail_ && static_cast<int>(digits_.size()) <= n)) return *this;
  std::vector<uint32_t> d(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) d[static_cast<size_t>(i)] = digit_at(valuation_ + i);
  return field_->from_digits(valuation_, std::move(d), false);
}

namespace {

/// Integer whose p-adic digits are those of the unit part (negative when the
/// element has a negative tail).
mpz_class signed_unit(const LocalFieldElement& a) {
  const uint32_t p = a.field()->p();
  mpz_class u = digits_to_mpz(a.digits(), p);
  if (a.has_negative_tail()) u -= mpz_pow(p, a.digits().size());
  return u;
}

/// a + sign*b with full precision bookkeeping.
LocalFieldElement add_signed(const LocalFieldElement& a, const LocalFieldElement& b, int sign) {
  check_same(a, b);
  const auto& F = a.field();
  if (b.is_zero()) return a;
  if (a.is_zero()) return sign > 0 ? b : -b;
  const int64_t lo = std::min(a.valuation(), b.valuation());
  const int64_t A = std::min(a.absolute_precision(), b.absolute_precision());
  const bool exact = (A == kInf);
  if (F->kind() == FieldKind::PAdic) {
    const uint32_t p = F->p();
    mpz_class sa = signed_unit(a) * mpz_pow(p, static_cast<uint64_t>(a.valuation() - lo));
    mpz_class sb = signed_unit(b) * mpz_pow(p, static_cast<uint64_t>(b.valuation() - lo));
    mpz_class s = sa;
    if (sign > 0) s += sb; else s -= sb;
    if (exact) return F->from_signed(lo, s);
    const int64_t L = A - lo;
    mpz_class m = mpz_pow(p, static_cast<uint64_t>(L));
    mpz_class r = s % m;
    if (r < 0) r += m;
    if (r == 0) throw Error(ErrorKind::PrecisionExhausted, "cancellation consumed all digits");
    int64_t v = strip_p(r, p);
    return F->from_digits(lo + v, mpz_to_digits(r, p, L - v), false);
  }
  const auto& k = F->residue_field();
  int64_t hi = exact ? std::max(a.valuation() + a.relative_precision(), b.valuation() + b.relative_precision())
                     : A;
  std::vector<uint32_t> out(static_cast<size_t>(hi - lo), 0);
  for (int64_t i = lo; i < hi; ++i) {
    uint32_t da = a.digit_at(i), db = b.digit_at(i);
    out[static_cast<size_t>(i - lo)] = sign > 0 ? k.add(da, db) : k.sub(da, db);
  }
  if (!exact && std::all_of(out.begin(), out.end(), [](uint32_t d) { return d == 0; })) {
    throw Error(ErrorKind::PrecisionExhausted, "cancellation consumed all digits");
  }
  return F->from_digits(lo, std::move(out), exact);
}

std::vector<uint32_t> series_mul(const FiniteField& k, const std::vector<uint32_t>& a,
                                 const std::vector<uint32_t>& b, size_t len) {
  std::vector<uint32_t> out(len, 0);
  for (size_t i = 0; i < a.size() && i < len; ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size() && i + j < len; ++j) {
      if (b[j] == 0) continue;
      out[i + j] = k.add(out[i + j], k.mul(a[i], b[j]));
    }
  }
  return out;
}

std::vector<uint32_t> series_inv(const FiniteField& k, const std::vector<uint32_t>& a, size_t len) {
  std::vector<uint32_t> out(len, 0);
  const uint32_t a0inv = k.inv(a.at(0));
  for (size_t n = 0; n < len; ++n) {
    uint32_t s = n == 0 ? 1 : 0;
    for (size_t i = 1; i <= n && i < a.size(); ++i) s = k.sub(s, k.mul(a[i], out[n - i]));
    out[n] = k.mul(s, a0inv);
  }
  return out;
}

}  // namespace

LocalFieldElement LocalFieldElement::operator-() const {
  if (is_zero()) return *this;
  const auto& F = field_;
  if (F->kind() == FieldKind::Laurent) {
    std::vector<uint32_t> d = digits_;
    for (auto& x : d) x = F->residue_field().neg(x);
    return LocalFieldElement(F, valuation_, std::move(d), exact_);
  }
  const uint32_t p = F->p();
  if (exact_) return F->from_signed(valuation_, -signed_unit(*this));
  const int rel = relative_precision();
  mpz_class m = mpz_pow(p, static_cast<uint64_t>(rel));
  mpz_class u = digits_to_mpz(digits_, p) % m;
  mpz_class neg = (m - u) % m;
  return F->from_digits(valuation_, mpz_to_digits(neg, p, rel), false);
}

LocalFieldElement operator+(const LocalFieldElement& a, const LocalFieldElement& b) {
  return add_signed(a, b, +1);
}

LocalFieldElement operator-(const LocalFieldElement& a, const LocalFieldElement& b) {
  return add_signed(a, b, -1);
}

LocalFieldElement operator*(const LocalFieldElement& a, const LocalFieldElement& b) {
  check_same(a, b);
  const auto& F = a.field();
  if (a.is_zero() || b.is_zero()) return F->zero();
  const int64_t v = a.valuation() + b.valuation();
  const bool exact = a.is_exact() && b.is_exact();
  int rel = F->precision();
  if (!a.is_exact()) rel = std::min(rel, a.relative_precision());
  if (!b.is_exact()) rel = std::min(rel, b.relative_precision());
  if (F->kind() == FieldKind::PAdic) {
    const uint32_t p = F->p();
    mpz_class prod = signed_unit(a) * signed_unit(b);
    if (exact) return F->from_signed(v, prod);
    mpz_class m = mpz_pow(p, static_cast<uint64_t>(rel));
    prod %= m;
    if (prod < 0) prod += m;
    return F->from_digits(v, mpz_to_digits(prod, p, rel), false);
  }
  const auto& k = F->residue_field();
  if (exact) {
    auto out = series_mul(k, a.digits(), b.digits(), a.digits().size() + b.digits().size() - 1);
    return F->from_digits(v, std::move(out), true);
  }
  return F->from_digits(v, series_mul(k, a.digits(), b.digits(), static_cast<size_t>(rel)), false);
}

LocalFieldElement LocalFieldElement::pow(uint64_t e) const {
  LocalFieldElement r = field_->one(), b = *this;
  while (e) {
    if (e & 1) r = r * b;
    e >>= 1;
    if (e) b = b * b;
  }
  return r;
}

bool operator==(const LocalFieldElement& a, const LocalFieldElement& b) {
  if (!(a.field()->config() == b.field()->config())) return false;
  if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
  return a.valuation_ == b.valuation_ && a.digits_ == b.digits_ && a.exact_ == b.exact_ &&
         a.negative_tail_ == b.negative_tail_;
}

bool congruent(const LocalFieldElement& a, const LocalFieldElement& b, int64_t k) {
  check_same(a, b);
  int64_t lo = std::min({a.valuation(), b.valuation(), k});
  for (int64_t i = lo; i < k; ++i) {
    if (a.digit_at(i) != b.digit_at(i)) return false;
  }
  return true;
}

LocalFieldElement add(const LocalFieldElement& a, const LocalFieldElement& b) { return a + b; }
LocalFieldElement mul(const LocalFieldElement& a, const LocalFieldElement& b) { return a * b; }

LocalFieldElement inv(const LocalFieldElement& a) {
  if (a.is_zero()) throw Error(ErrorKind::DivisionByZero, "inverse of zero");
  const auto& F = a.field();
  const int64_t v = -a.valuation();
  if (a.is_exact() && a.digits().size() == 1 && (F->kind() == FieldKind::Laurent || a.digits()[0] == 1)) {
    uint32_t d = a.digits()[0];
    if (F->kind() == FieldKind::Laurent) d = F->residue_field().inv(d);
    return F->from_digits(v, {d}, true);
  }
  const int rel = a.is_exact() ? F->precision() : a.relative_precision();
  if (F->kind() == FieldKind::PAdic) {
    const uint32_t p = F->p();
    if (a.is_exact() && abs(signed_unit(a)) == 1) return F->from_signed(v, signed_unit(a));
    mpz_class m = mpz_pow(p, static_cast<uint64_t>(rel));
    mpz_class u = signed_unit(a) % m, r;
    if (u < 0) u += m;
    mpz_invert(r.get_mpz_t(), u.get_mpz_t(), m.get_mpz_t());
    return F->from_digits(v, mpz_to_digits(r, p, rel), false);
  }
  return F->from_digits(v, series_inv(F->residue_field(), a.digits(), static_cast<size_t>(rel)), false);
}

LocalFieldElement div(const LocalFieldElement& a, const LocalFieldElement& b) { return a * inv(b); }

int64_t valuation(const LocalFieldElement& a) { return a.valuation(); }
mpq_class norm(const LocalFieldElement& a) { return a.norm(); }

// ---------------------------------------------------------------------------
// Hensel lifting

LocalFieldElement nth_root_hensel(const LocalFieldElement& c, uint32_t n,
                                  std::optional<FiniteField::Elem> residue_root) {
  const auto& F = c.field();
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "n must be positive");
  if (std::gcd(n, F->p()) != 1) throw Error(ErrorKind::PIsDividesN, "p divides n");
  if (!c.is_unit()) throw Error(ErrorKind::InvalidArgument, "nth_root_hensel needs a unit");
  const auto& k = F->residue_field();
  const uint32_t c0 = c.residue();
  uint32_t t0 = 0;
  if (residue_root) {
    t0 = *residue_root % k.q();
    if (t0 == 0 || k.pow(t0, n) != c0) throw Error(ErrorKind::NoResidueRoot, "given residue is not an n-th root");
  } else {
    bool found = false;
    for (uint32_t t = 1; t < k.q() && !found; ++t) {
      if (k.pow(t, n) == c0) {
        t0 = t;
        found = true;
      }
    }
    if (!found) throw Error(ErrorKind::NoResidueRoot, "residue of c is not an n-th power in k");
  }
  const int rel = c.is_exact() ? F->precision() : c.relative_precision();
  if (F->kind() == FieldKind::PAdic) {
    const uint32_t p = F->p();
    mpz_class m = mpz_pow(p, static_cast<uint64_t>(rel));
    mpz_class C = signed_unit(c) % m;
    if (C < 0) C += m;
    mpz_class t = t0;
    // Newton iteration t <- t - (t^n - C)/(n t^(n-1)); quadratic convergence.
    for (int iter = 0; iter < 2 * rel + 4; ++iter) {
      mpz_class tn, tn1, deriv, dinv;
      mpz_powm_ui(tn.get_mpz_t(), t.get_mpz_t(), n, m.get_mpz_t());
      mpz_class diff = (tn - C) % m;
      if (diff < 0) diff += m;
      if (diff == 0) break;
      mpz_powm_ui(tn1.get_mpz_t(), t.get_mpz_t(), n - 1, m.get_mpz_t());
      deriv = (tn1 * n) % m;
      mpz_invert(dinv.get_mpz_t(), deriv.get_mpz_t(), m.get_mpz_t());
      t = (t - diff * dinv) % m;
      if (t < 0) t += m;
    }
    bool exact = false;
    if (c.is_exact()) {
      mpz_class full;
      mpz_pow_ui(full.get_mpz_t(), t.get_mpz_t(), n);
      exact = (full == signed_unit(c));
      if (!exact) {
        // the root may be the negative integer t - p^rel
        mpz_class alt = t - m, alt_n;
        mpz_pow_ui(alt_n.get_mpz_t(), alt.get_mpz_t(), n);
        if (alt_n == signed_unit(c)) return F->from_signed(0, alt);
      }
    }
    return F->from_digits(0, mpz_to_digits(t, p, exact ? -1 : rel), exact);
  }
  // Laurent: lift one coefficient at a time; derivative n*t0^(n-1) is a unit.
  std::vector<uint32_t> cd(static_cast<size_t>(rel), 0);
  for (size_t i = 0; i < cd.size() && i < c.digits().size(); ++i) cd[i] = c.digits()[i];
  std::vector<uint32_t> t(static_cast<size_t>(rel), 0);
  t[0] = t0;
  const uint32_t dinv = k.inv(k.mul(k.from_int(n), k.pow(t0, n - 1)));
  for (size_t i = 1; i < t.size(); ++i) {
    std::vector<uint32_t> tn = {1};
    for (uint32_t e = 0; e < n; ++e) tn = series_mul(k, tn, t, i + 1);
    uint32_t err = k.sub(tn[i], cd[i]);
    t[i] = k.neg(k.mul(err, dinv));
  }
  bool exact = false;
  if (c.is_exact()) {
    auto probe = F->from_digits(0, t, true);
    exact = probe.pow(n) == c;
    if (exact) return probe;
  }
  return F->from_digits(0, std::move(t), false);
}

int legendre(int64_t a, uint32_t p) {
  int64_t r = a % static_cast<int64_t>(p);
  if (r < 0) r += p;
  if (r == 0) return 0;
  uint64_t base = static_cast<uint64_t>(r), e = (p - 1) / 2, acc = 1;
  while (e) {
    if (e & 1) acc = acc * base % p;
    base = base * base % p;
    e >>= 1;
  }
  return acc == 1 ? 1 : -1;
}

uint32_t find_nonresidue(uint32_t p) {
  if (p == 2) throw Error(ErrorKind::EvenPrime, "no quadratic nonresidue structure for p = 2");
  if (!is_prime(p)) throw Error(ErrorKind::InvalidArgument, "p must be prime");
  for (uint32_t a = 2; a < p; ++a) {
    if (legendre(a, p) == -1) return a;
  }
  throw Error(ErrorKind::InvalidArgument, "no nonresidue found");
}

// ---------------------------------------------------------------------------
// Text form

namespace {

std::string residue_tuple(const FiniteField& k, uint32_t code) {
  std::string s = "[";
  auto c = k.coords(code);
  for (size_t i = 0; i < c.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(c[i]);
  }
  return s + "]";
}

std::string power_str(const char* var, int64_t i) {
  if (i == 0) return "";
  if (i == 1) return std::string("*") + var;
  return std::string("*") + var + "^" + std::to_string(i);
}

}  // namespace

std::string to_string(const LocalFieldElement& a) {
  if (a.is_zero()) return "0";
  if (a.has_negative_tail()) return "-(" + to_string(-a) + ")";
  const auto& F = a.field();
  const bool padic = F->kind() == FieldKind::PAdic;
  const char* var = padic ? "p" : "T";
  std::ostringstream os;
  os << var << "^" << a.valuation() << " * (";
  bool first = true;
  for (size_t i = 0; i < a.digits().size(); ++i) {
    uint32_t d = a.digits()[i];
    if (d == 0) continue;
    if (!first) os << " + ";
    first = false;
    os << (padic ? std::to_string(d) : residue_tuple(F->residue_field(), d)) << power_str(var, static_cast<int64_t>(i));
  }
  os << ")";
  if (!a.is_exact()) os << " + O(" << var << "^" << a.absolute_precision() << ")";
  return os.str();
}

namespace {

struct Cursor {
  std::string s;
  size_t i = 0;
  bool eat(char c) {
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }
  bool eat(const std::string& t) {
    if (s.compare(i, t.size(), t) == 0) {
      i += t.size();
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) throw Error(ErrorKind::ParseError, std::string("expected '") + c + "' in " + s);
  }
  int64_t integer() {
    size_t start = i;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (start == i || (i == start + 1 && !std::isdigit(static_cast<unsigned char>(s[start])))) {
      throw Error(ErrorKind::ParseError, "expected integer in " + s);
    }
    return std::stoll(s.substr(start, i - start));
  }
  bool done() const { return i == s.size(); }
};

}  // namespace

LocalFieldElement parse_element(const FieldPtr& field, const std::string& text) {
  Cursor c;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) c.s.push_back(ch);
  if (c.s == "0") return field->zero();
  if (c.s.size() > 3 && c.s.compare(0, 2, "-(") == 0 && c.s.back() == ')') {
    return -parse_element(field, c.s.substr(2, c.s.size() - 3));
  }
  const bool padic = field->kind() == FieldKind::PAdic;
  const char var = padic ? 'p' : 'T';
  c.expect(var);
  c.expect('^');
  int64_t v = c.integer();
  c.expect('*');
  c.expect('(');
  std::vector<std::pair<int64_t, uint32_t>> terms;
  do {
    uint32_t d = 0;
    if (padic) {
      d = static_cast<uint32_t>(c.integer());
    } else {
      c.expect('[');
      std::vector<uint32_t> coords;
      do {
        coords.push_back(static_cast<uint32_t>(c.integer()));
      } while (c.eat(','));
      c.expect(']');
      if (coords.size() != field->f()) throw Error(ErrorKind::ParseError, "wrong F_q tuple length");
      d = field->residue_field().from_coords(coords);
    }
    int64_t pos = 0;
    if (c.eat('*')) {
      c.expect(var);
      pos = c.eat('^') ? c.integer() : 1;
    }
    terms.emplace_back(pos, d);
  } while (c.eat('+'));
  c.expect(')');
  int64_t abs_prec = kInf;
  if (c.eat('+')) {
    c.expect('O');
    c.expect('(');
    c.expect(var);
    c.expect('^');
    abs_prec = c.integer();
    c.expect(')');
  }
  if (!c.done()) throw Error(ErrorKind::ParseError, "trailing characters in " + text);
  int64_t len = 0;
  for (auto& [pos, d] : terms) len = std::max(len, pos + 1);
  if (abs_prec != kInf) len = std::max(len, abs_prec - v);
  std::vector<uint32_t> digits(static_cast<size_t>(len), 0);
  for (auto& [pos, d] : terms) {
    if (pos < 0) throw Error(ErrorKind::ParseError, "negative digit position");
    digits[static_cast<size_t>(pos)] = d;
  }
  if (abs_prec != kInf) digits.resize(static_cast<size_t>(abs_prec - v));
  return field->from_digits(v, std::move(digits), abs_prec == kInf);
}

std::vector<uint32_t> residue_digits(const LocalFieldElement& a, int64_t shift, int64_t E) {
  std::vector<uint32_t> out(static_cast<size_t>(std::max<int64_t>(E, 0)), 0);
  if (a.is_zero()) return out;
  if (a.valuation() + shift < 0 && E > 0) {
    // only the part below ϖ^0 would be lost; this is a caller error
    throw Error(ErrorKind::InvalidArgument, "residue_digits: element is not integral after shift");
  }
  if (a.absolute_precision() != kInf && a.absolute_precision() + shift < E) {
    throw Error(ErrorKind::PrecisionExhausted, "coefficient not known to the required modulus");
  }
  for (int64_t i = 0; i < E; ++i) out[static_cast<size_t>(i)] = a.digit_at(i - shift);
  return out;
}

}  // namespace airy
