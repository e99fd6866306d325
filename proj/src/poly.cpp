#include "airy/poly.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace airy {

uint32_t total_degree(const Exponents& e) {
  uint32_t d = 0;
  for (auto x : e) d += x;
  return d;
}

MultiPoly::MultiPoly(FieldPtr field, size_t m) : field_(std::move(field)), m_(m) {}

MultiPoly MultiPoly::constant(FieldPtr field, size_t m, const LocalFieldElement& c) {
  MultiPoly r(std::move(field), m);
  r.add_term(c, Exponents(m, 0));
  return r;
}

MultiPoly MultiPoly::variable(FieldPtr field, size_t m, size_t i) {
  if (i >= m) throw Error(ErrorKind::InvalidArgument, "variable index out of range");
  Exponents e(m, 0);
  e[i] = 1;
  MultiPoly r(field, m);
  r.add_term(field->one(), e);
  return r;
}

MultiPoly MultiPoly::monomial(const LocalFieldElement& c, const Exponents& e) {
  MultiPoly r(c.field(), e.size());
  r.add_term(c, e);
  return r;
}

int MultiPoly::degree() const {
  int d = -1;
  for (const auto& [e, c] : terms_) d = std::max(d, static_cast<int>(total_degree(e)));
  return d;
}

MultiPoly MultiPoly::homogeneous_part(uint32_t d) const {
  MultiPoly r(field_, m_);
  for (const auto& [e, c] : terms_)
    if (total_degree(e) == d) r.terms_.emplace(e, c);
  return r;
}

LocalFieldElement MultiPoly::coefficient(const Exponents& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? field_->zero() : it->second;
}

LocalFieldElement MultiPoly::constant_term() const { return coefficient(Exponents(m_, 0)); }

void MultiPoly::add_term(const LocalFieldElement& c, const Exponents& e) {
  if (e.size() != m_) throw Error(ErrorKind::InvalidArgument, "exponent tuple has wrong length");
  if (c.is_zero()) return;
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    terms_.emplace(e, c);
    return;
  }
  it->second = it->second + c;
  if (it->second.is_zero()) terms_.erase(it);
}

MultiPoly operator+(const MultiPoly& a, const MultiPoly& b) {
  if (a.m_ != b.m_) throw Error(ErrorKind::InvalidArgument, "variable count mismatch");
  MultiPoly r = a;
  for (const auto& [e, c] : b.terms_) r.add_term(c, e);
  return r;
}

MultiPoly operator-(const MultiPoly& a, const MultiPoly& b) {
  return a + b.scaled(-a.field()->one());
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
  if (a.m_ != b.m_) throw Error(ErrorKind::InvalidArgument, "variable count mismatch");
  MultiPoly r(a.field_, a.m_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      Exponents e(a.m_);
      for (size_t i = 0; i < a.m_; ++i) e[i] = ea[i] + eb[i];
      r.add_term(ca * cb, e);
    }
  }
  return r;
}

MultiPoly MultiPoly::scaled(const LocalFieldElement& c) const {
  MultiPoly r(field_, m_);
  if (c.is_zero()) return r;
  for (const auto& [e, x] : terms_) r.terms_.emplace(e, x * c);
  return r;
}

MultiPoly MultiPoly::pow(uint32_t e) const {
  MultiPoly r = constant(field_, m_, field_->one());
  for (uint32_t i = 0; i < e; ++i) r = r * *this;
  return r;
}

bool operator==(const MultiPoly& a, const MultiPoly& b) {
  return a.m_ == b.m_ && a.terms_ == b.terms_;
}

LocalFieldElement eval(const MultiPoly& h, const std::vector<LocalFieldElement>& y) {
  if (y.size() != h.num_vars()) throw Error(ErrorKind::InvalidArgument, "point has wrong dimension");
  LocalFieldElement acc = h.field()->zero();
  for (const auto& [e, c] : h.terms()) {
    LocalFieldElement t = c;
    for (size_t i = 0; i < e.size(); ++i)
      if (e[i]) t = t * y[i].pow(e[i]);
    acc = acc + t;
  }
  return acc;
}

DiagonalLeading check_diagonal_leading(const MultiPoly& h) {
  const int deg = h.degree();
  if (deg <= 1) throw Error(ErrorKind::DegreeTooLow, "degree <= 1: the Airy distribution is a delta function");
  const auto n = static_cast<uint32_t>(deg);
  const size_t m = h.num_vars();
  DiagonalLeading out;
  out.n = n;
  out.a.assign(m, h.field()->zero());
  const MultiPoly top = h.homogeneous_part(n);
  for (const auto& [e, c] : top.terms()) {
    size_t nonzero = 0, which = 0;
    for (size_t i = 0; i < m; ++i)
      if (e[i]) {
        ++nonzero;
        which = i;
      }
    if (nonzero != 1) throw Error(ErrorKind::NotDiagonal, "mixed monomial in the top-degree part");
    out.a[which] = c;
  }
  for (size_t i = 0; i < m; ++i) {
    if (out.a[i].is_zero()) throw Error(ErrorKind::NotDiagonal, "missing y_i^n term in the top-degree part");
  }
  const uint32_t ch = h.field()->characteristic();
  if (ch != 0 && n % ch == 0) {
    if (m > 1) throw Error(ErrorKind::CharDividesDegree, "char p divides n in several variables");
    out.requires_sharpening = true;
  }
  return out;
}

// ---------------------------------------------------------------------------

BilinearForm::BilinearForm(FieldPtr field, std::vector<std::vector<LocalFieldElement>> gram)
    : field_(std::move(field)), gram_(std::move(gram)) {
  const size_t m = gram_.size();
  for (const auto& row : gram_)
    if (row.size() != m) throw Error(ErrorKind::InvalidArgument, "Gram matrix must be square");
  // nonsingularity: Gaussian elimination over the field
  auto a = gram_;
  for (size_t col = 0; col < m; ++col) {
    size_t piv = col;
    while (piv < m && a[piv][col].is_zero()) ++piv;
    if (piv == m) throw Error(ErrorKind::InvalidArgument, "bilinear form is singular");
    std::swap(a[piv], a[col]);
    auto pinv = inv(a[col][col]);
    for (size_t r = col + 1; r < m; ++r) {
      if (a[r][col].is_zero()) continue;
      auto factor = a[r][col] * pinv;
      for (size_t c = col; c < m; ++c) {
        auto t = a[col][c] * factor;
        if (a[r][c] == t) {
          a[r][c] = field_->zero();
        } else {
          a[r][c] = a[r][c] - t;
        }
      }
      a[r][col] = field_->zero();
    }
  }
}

BilinearForm BilinearForm::standard(FieldPtr field, size_t m) {
  std::vector<std::vector<LocalFieldElement>> g(m, std::vector<LocalFieldElement>(m, field->zero()));
  for (size_t i = 0; i < m; ++i) g[i][i] = field->one();
  return BilinearForm(field, std::move(g));
}

BilinearForm BilinearForm::diagonal(FieldPtr field, const std::vector<LocalFieldElement>& d) {
  const size_t m = d.size();
  std::vector<std::vector<LocalFieldElement>> g(m, std::vector<LocalFieldElement>(m, field->zero()));
  for (size_t i = 0; i < m; ++i) g[i][i] = d[i];
  return BilinearForm(field, std::move(g));
}

bool BilinearForm::is_diagonal() const {
  for (size_t i = 0; i < dim(); ++i)
    for (size_t j = 0; j < dim(); ++j)
      if (i != j && !gram_[i][j].is_zero()) return false;
  return true;
}

bool BilinearForm::is_standard() const {
  if (!is_diagonal()) return false;
  for (size_t i = 0; i < dim(); ++i)
    if (!(gram_[i][i] == field_->one())) return false;
  return true;
}

std::vector<LocalFieldElement> BilinearForm::linear_coefficients(const std::vector<LocalFieldElement>& x) const {
  if (x.size() != dim()) throw Error(ErrorKind::InvalidArgument, "vector has wrong dimension");
  std::vector<LocalFieldElement> b(dim(), field_->zero());
  for (size_t j = 0; j < dim(); ++j) {
    for (size_t i = 0; i < dim(); ++i) {
      if (gram_[i][j].is_zero() || x[i].is_zero()) continue;
      b[j] = b[j] + x[i] * gram_[i][j];
    }
  }
  return b;
}

int64_t BilinearForm::bound_exponent() const {
  int64_t best = std::numeric_limits<int64_t>::min();
  for (const auto& row : gram_)
    for (const auto& g : row)
      if (!g.is_zero()) best = std::max(best, -g.valuation());
  return best;
}

LocalFieldElement pair(const BilinearForm& form, const std::vector<LocalFieldElement>& x,
                       const std::vector<LocalFieldElement>& y) {
  if (y.size() != form.dim()) throw Error(ErrorKind::InvalidArgument, "vector has wrong dimension");
  auto b = form.linear_coefficients(x);
  LocalFieldElement acc = form.field()->zero();
  for (size_t i = 0; i < y.size(); ++i) {
    if (b[i].is_zero() || y[i].is_zero()) continue;
    acc = acc + b[i] * y[i];
  }
  return acc;
}

int64_t vector_valuation(const std::vector<LocalFieldElement>& v) {
  int64_t best = LocalFieldElement::kInfinity;
  for (const auto& x : v) best = std::min(best, x.valuation());
  return best;
}

// ---------------------------------------------------------------------------
// Text form

std::string to_string(const MultiPoly& h) {
  if (h.is_zero()) return "0";
  std::vector<std::pair<Exponents, LocalFieldElement>> items(h.terms().begin(), h.terms().end());
  std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    auto da = total_degree(a.first), db = total_degree(b.first);
    if (da != db) return da > db;
    return a.first > b.first;
  });
  std::ostringstream os;
  bool first = true;
  const size_t m = h.num_vars();
  for (const auto& [e, c] : items) {
    if (!first) os << " + ";
    first = false;
    os << "{" << to_string(c) << "}";
    for (size_t i = 0; i < m; ++i) {
      if (!e[i]) continue;
      os << "*y";
      if (m > 1) os << (i + 1);
      if (e[i] > 1) os << "^" << e[i];
    }
  }
  return os.str();
}

namespace {

class PolyParser {
 public:
  PolyParser(const FieldPtr& field, size_t m, const std::string& text,
             const std::map<std::string, LocalFieldElement>& params, bool allow_vars)
      : field_(field), m_(m), s_(text), params_(params), allow_vars_(allow_vars) {}

  MultiPoly parse() {
    MultiPoly r = expr();
    skip();
    if (i_ != s_.size()) fail("unexpected trailing input");
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorKind::ParseError, why + " at position " + std::to_string(i_) + " in '" + s_ + "'");
  }
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool peek(char c) {
    skip();
    return i_ < s_.size() && s_[i_] == c;
  }
  bool eat(char c) {
    if (peek(c)) {
      ++i_;
      return true;
    }
    return false;
  }
  int64_t integer() {
    skip();
    size_t start = i_;
    if (i_ < s_.size() && (s_[i_] == '-' || s_[i_] == '+')) ++i_;
    size_t digits = i_;
    while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
    if (digits == i_) fail("expected integer");
    return std::stoll(s_.substr(start, i_ - start));
  }
  MultiPoly constant(const LocalFieldElement& c) const { return MultiPoly::constant(field_, m_, c); }

  MultiPoly expr() {
    MultiPoly acc(field_, m_);
    bool negate = false;
    if (eat('-')) negate = true;
    else eat('+');
    MultiPoly t = term();
    acc = negate ? acc - t : acc + t;
    while (true) {
      if (eat('+')) {
        acc = acc + term();
      } else if (eat('-')) {
        acc = acc - term();
      } else {
        break;
      }
    }
    return acc;
  }

  MultiPoly term() {
    MultiPoly acc = power();
    while (true) {
      if (eat('*')) {
        acc = acc * power();
      } else if (peek('/')) {
        ++i_;
        int64_t d = integer();
        if (d == 0) fail("division by zero");
        acc = acc.scaled(field_->from_rational(mpq_class(1, 1) / mpq_class(std::to_string(d))));
      } else {
        break;
      }
    }
    return acc;
  }

  MultiPoly power() {
    skip();
    // uniformizer with a possibly negative exponent
    const char unif = field_->kind() == FieldKind::PAdic ? 'p' : 'T';
    if (i_ < s_.size() && s_[i_] == unif &&
        (i_ + 1 == s_.size() || !std::isalnum(static_cast<unsigned char>(s_[i_ + 1])))) {
      ++i_;
      int64_t e = 1;
      if (eat('^')) e = integer();
      return constant(field_->uniformizer_power(e));
    }
    MultiPoly base = atom();
    if (eat('^')) {
      int64_t e = integer();
      if (e < 0) {
        if (base.degree() > 0) fail("negative power of a non-constant");
        auto c = base.constant_term();
        return constant(inv(c).pow(static_cast<uint64_t>(-e)));
      }
      return base.pow(static_cast<uint32_t>(e));
    }
    return base;
  }

  MultiPoly atom() {
    skip();
    if (i_ >= s_.size()) fail("unexpected end of input");
    char c = s_[i_];
    if (c == '(') {
      ++i_;
      MultiPoly r = expr();
      if (!eat(')')) fail("expected ')'");
      return r;
    }
    if (c == '{') {
      size_t close = s_.find('}', i_);
      if (close == std::string::npos) fail("unterminated '{'");
      auto elem = parse_element(field_, s_.substr(i_ + 1, close - i_ - 1));
      i_ = close + 1;
      return constant(elem);
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = i_;
      while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
      return constant(field_->from_mpz(mpz_class(s_.substr(start, i_ - start))));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = i_;
      while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
      std::string name = s_.substr(start, i_ - start);
      if (auto it = params_.find(name); it != params_.end()) return constant(it->second);
      if (allow_vars_ && name[0] == 'y') {
        if (name == "y") {
          if (m_ != 1) fail("use y1..ym with several variables");
          return MultiPoly::variable(field_, m_, 0);
        }
        size_t idx = std::stoul(name.substr(1));
        if (idx < 1 || idx > m_) fail("variable index out of range");
        return MultiPoly::variable(field_, m_, idx - 1);
      }
      fail("unknown identifier '" + name + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  FieldPtr field_;
  size_t m_;
  std::string s_;
  const std::map<std::string, LocalFieldElement>& params_;
  bool allow_vars_;
  size_t i_ = 0;
};

}  // namespace

MultiPoly parse_poly(const FieldPtr& field, size_t m, const std::string& text,
                     const std::map<std::string, LocalFieldElement>& params) {
  return PolyParser(field, m, text, params, true).parse();
}

LocalFieldElement parse_scalar(const FieldPtr& field, const std::string& text,
                               const std::map<std::string, LocalFieldElement>& params) {
  auto poly = PolyParser(field, 1, text, params, false).parse();
  if (poly.degree() > 0) throw Error(ErrorKind::ParseError, "expected a constant");
  return poly.constant_term();
}

}  // namespace airy
