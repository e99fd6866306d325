#include "airy/expsum.hpp"

#include <array>
#include <atomic>
#include <map>
#include <thread>

namespace airy {

namespace {

// Z/p^E with p^E < 2^62, elements as plain integers.
struct PadicRing {
  using Elem = uint64_t;
  uint32_t p = 0;
  int64_t E = 0;
  std::vector<uint64_t> pw;  // p^0 .. p^E

  PadicRing(uint32_t p_, int64_t E_) : p(p_), E(E_) {
    pw.push_back(1);
    for (int64_t i = 0; i < E; ++i) pw.push_back(pw.back() * p);
    (void)ipow(p, static_cast<uint32_t>(E));
  }
  uint32_t q() const { return p; }
  uint64_t mod() const { return pw[E]; }
  Elem zero() const { return 0; }
  Elem add(Elem a, Elem b) const {
    uint64_t s = a + b;
    return s >= mod() ? s - mod() : s;
  }
  Elem mul(Elem a, Elem b) const {
    return static_cast<uint64_t>(static_cast<unsigned __int128>(a) * b % mod());
  }
  Elem from_int(int64_t k) const {
    int64_t r = k % static_cast<int64_t>(mod());
    return static_cast<uint64_t>(r < 0 ? r + static_cast<int64_t>(mod()) : r);
  }
  Elem from_digits(const std::vector<uint32_t>& d) const {
    uint64_t v = 0;
    for (int64_t i = std::min<int64_t>(E, static_cast<int64_t>(d.size())) - 1; i >= 0; --i) v = v * p + d[i];
    return v;
  }
  Elem lift(Elem a, int64_t i, uint32_t code) const { return i >= E ? a : add(a, code * pw[i]); }
  bool zero_mod(Elem a, int64_t k) const { return k >= E ? a == 0 : a % pw[k] == 0; }
  int64_t valuation(Elem a) const {
    if (a == 0) return E;
    int64_t v = 0;
    while (a % p == 0) {
      a /= p;
      ++v;
    }
    return v;
  }
  Elem divide(Elem a, int64_t c) const { return a / pw[c]; }
  PadicRing reduced(int64_t e) const { return PadicRing(p, e); }
  uint32_t residue(Elem a) const { return static_cast<uint32_t>(a % p); }
  RootExponent phase(Elem a) const { return RootExponent::make(a, static_cast<uint32_t>(E), p); }
};

constexpr int64_t kMaxLaurentE = 64;

// F_q[T]/T^E, coefficient codes in a fixed array.
struct LaurentRing {
  using Elem = std::array<uint16_t, kMaxLaurentE>;
  const FiniteField* k = nullptr;
  int64_t E = 0;

  LaurentRing(const FiniteField* k_, int64_t E_) : k(k_), E(E_) {
    if (E > kMaxLaurentE) throw Error(ErrorKind::PrecisionExhausted, "residue ring modulus T^E too large");
  }
  uint32_t q() const { return k->q(); }
  Elem zero() const { return Elem{}; }
  Elem add(const Elem& a, const Elem& b) const {
    Elem r{};
    for (int64_t i = 0; i < E; ++i) r[i] = static_cast<uint16_t>(k->add(a[i], b[i]));
    return r;
  }
  Elem mul(const Elem& a, const Elem& b) const {
    Elem r{};
    for (int64_t i = 0; i < E; ++i) {
      if (!a[i]) continue;
      for (int64_t j = 0; i + j < E; ++j) {
        if (!b[j]) continue;
        r[i + j] = static_cast<uint16_t>(k->add(r[i + j], k->mul(a[i], b[j])));
      }
    }
    return r;
  }
  Elem from_int(int64_t v) const {
    Elem r{};
    if (E > 0) r[0] = static_cast<uint16_t>(k->from_int(v));
    return r;
  }
  Elem from_digits(const std::vector<uint32_t>& d) const {
    Elem r{};
    for (int64_t i = 0; i < E && i < static_cast<int64_t>(d.size()); ++i) r[i] = static_cast<uint16_t>(d[i]);
    return r;
  }
  Elem lift(Elem a, int64_t i, uint32_t code) const {
    if (i < E) a[i] = static_cast<uint16_t>(k->add(a[i], code));
    return a;
  }
  bool zero_mod(const Elem& a, int64_t n) const {
    for (int64_t i = 0; i < std::min(n, E); ++i)
      if (a[i]) return false;
    return true;
  }
  int64_t valuation(const Elem& a) const {
    for (int64_t i = 0; i < E; ++i)
      if (a[i]) return i;
    return E;
  }
  Elem divide(const Elem& a, int64_t c) const {
    Elem r{};
    for (int64_t i = c; i < E; ++i) r[i - c] = a[i];
    return r;
  }
  LaurentRing reduced(int64_t e) const { return LaurentRing(k, e); }
  uint32_t residue(const Elem& a) const { return a[0]; }
  RootExponent phase(const Elem& a) const { return RootExponent::make(k->trace(a[E - 1]), 1, k->p()); }
};

using Counts = std::map<std::pair<uint32_t, uint64_t>, uint64_t>;

template <class Ring>
struct RPoly {
  std::vector<std::pair<Exponents, typename Ring::Elem>> terms;
};

template <class Ring>
typename Ring::Elem evaluate(const Ring& R, const RPoly<Ring>& g, const std::vector<typename Ring::Elem>& z,
                             const std::vector<std::vector<typename Ring::Elem>>& powers) {
  (void)z;
  auto acc = R.zero();
  for (const auto& [e, c] : g.terms) {
    auto t = c;
    for (size_t i = 0; i < e.size(); ++i)
      if (e[i]) t = R.mul(t, powers[i][e[i]]);
    acc = R.add(acc, t);
  }
  return acc;
}

template <class Ring>
class Solver {
 public:
  using Elem = typename Ring::Elem;

  Solver(const ResidueDomain& domain, size_t m, const ExpSumOptions& opt, uint32_t p)
      : domain_(domain), m_(m), opt_(opt), p_(p) {}

  uint64_t nodes() const { return nodes_.load(); }

  /// S = Σ_{z mod ϖ^E, z mod ϖ ∈ D} ψ_E(G(z)).
  CyclotomicSum solve(const Ring& R, RPoly<Ring> g) {
    const uint32_t q = R.q();
    // constant term contributes a global phase
    RootExponent phase{0, 0};
    Exponents zero_e(m_, 0);
    RPoly<Ring> h;
    int64_t content = R.E;
    for (auto& [e, c] : g.terms) {
      if (e == zero_e) {
        phase = phase.plus(R.phase(c), p_);
        continue;
      }
      int64_t v = R.valuation(c);
      if (v >= R.E) continue;
      content = std::min(content, v);
      h.terms.emplace_back(e, c);
    }
    if (content >= R.E) {
      mpz_class qpow;
      mpz_ui_pow_ui(qpow.get_mpz_t(), q, static_cast<unsigned long>(m_ * (R.E - 1)));
      CyclotomicSum s;
      s.add_term(p_, phase, mpq_class(qpow * domain_size(q)));
      return s;
    }
    if (content > 0) {
      Ring R2 = R.reduced(R.E - content);
      RPoly<Ring> h2;
      for (auto& [e, c] : h.terms) h2.terms.emplace_back(e, R.divide(c, content));
      mpz_class qpow;
      mpz_ui_pow_ui(qpow.get_mpz_t(), q, static_cast<unsigned long>(m_ * content));
      return solve(R2, h2).times_root(p_, phase).scaled(mpq_class(qpow));
    }
    return stationary(R, h).times_root(p_, phase);
  }

 private:
  mpz_class domain_size(uint32_t q) const {
    uint64_t count = 0;
    for_each_digit_vector(q, [&](const std::vector<uint32_t>& d) {
      if (domain_(d)) ++count;
    });
    return mpz_class(static_cast<unsigned long>(count));
  }

  template <class F>
  void for_each_digit_vector(uint32_t q, F&& f) const {
    std::vector<uint32_t> d(m_, 0);
    while (true) {
      f(d);
      size_t i = 0;
      while (i < m_ && ++d[i] == q) d[i++] = 0;
      if (i == m_) break;
    }
  }

  void charge(uint64_t n) {
    if (nodes_.fetch_add(n) + n > opt_.budget) {
      throw Error(ErrorKind::BudgetExceeded, "exponential sum exceeded node budget");
    }
  }

  struct Context {
    const Ring* R;
    const RPoly<Ring>* g;
    std::vector<RPoly<Ring>> grad;
    std::vector<uint32_t> maxdeg;
    int64_t j;
  };

  void powers_of(const Context& C, const std::vector<Elem>& z, std::vector<std::vector<Elem>>& pw) const {
    pw.resize(m_);
    for (size_t i = 0; i < m_; ++i) {
      pw[i].resize(C.maxdeg[i] + 1);
      pw[i][0] = C.R->from_int(1);
      for (uint32_t k = 1; k <= C.maxdeg[i]; ++k) pw[i][k] = C.R->mul(pw[i][k - 1], z[i]);
    }
  }

  bool critical(const Context& C, const std::vector<Elem>& z, int64_t level,
                std::vector<std::vector<Elem>>& pw) const {
    powers_of(C, z, pw);
    for (size_t i = 0; i < m_; ++i) {
      if (!C.R->zero_mod(evaluate(*C.R, C.grad[i], z, pw), level)) return false;
    }
    return true;
  }

  void finish(const Context& C, const std::vector<Elem>& a, Counts& counts, std::vector<std::vector<Elem>>& pw) {
    const Ring& R = *C.R;
    auto add_value = [&](const std::vector<Elem>& z) {
      powers_of(C, z, pw);
      RootExponent e = R.phase(evaluate(R, *C.g, z, pw));
      ++counts[{e.level, e.num}];
    };
    if (R.E - C.j > C.j) {
      charge(ipow(R.q(), static_cast<uint32_t>(m_)));
      std::vector<Elem> z(m_);
      for_each_digit_vector(R.q(), [&](const std::vector<uint32_t>& d) {
        for (size_t i = 0; i < m_; ++i) z[i] = R.lift(a[i], C.j, d[i]);
        add_value(z);
      });
    } else {
      add_value(a);
    }
  }

  void descend(const Context& C, const std::vector<Elem>& a, int64_t level, Counts& counts,
               std::vector<std::vector<Elem>>& pw) {
    if (level == C.j) {
      finish(C, a, counts, pw);
      return;
    }
    const Ring& R = *C.R;
    charge(ipow(R.q(), static_cast<uint32_t>(m_)));
    std::vector<Elem> z(m_);
    std::vector<std::vector<Elem>> children;
    for_each_digit_vector(R.q(), [&](const std::vector<uint32_t>& d) {
      for (size_t i = 0; i < m_; ++i) z[i] = R.lift(a[i], level, d[i]);
      if (critical(C, z, level + 1, pw)) children.push_back(z);
    });
    for (const auto& c : children) descend(C, c, level + 1, counts, pw);
  }

  CyclotomicSum stationary(const Ring& R, const RPoly<Ring>& g) {
    Context C{&R, &g, {}, std::vector<uint32_t>(m_, 0), R.E / 2};
    for (const auto& [e, c] : g.terms)
      for (size_t i = 0; i < m_; ++i) C.maxdeg[i] = std::max(C.maxdeg[i], e[i]);
    C.grad.resize(m_);
    for (size_t i = 0; i < m_; ++i) {
      for (const auto& [e, c] : g.terms) {
        if (e[i] == 0) continue;
        Exponents d = e;
        d[i] -= 1;
        auto coeff = R.mul(c, R.from_int(e[i]));
        if (R.valuation(coeff) < R.E) C.grad[i].terms.emplace_back(d, coeff);
      }
    }
    const uint32_t q = R.q();
    // level-1 starting residues
    std::vector<std::vector<Elem>> starts;
    {
      std::vector<std::vector<Elem>> pw;
      std::vector<Elem> z(m_);
      charge(ipow(q, static_cast<uint32_t>(m_)));
      for_each_digit_vector(q, [&](const std::vector<uint32_t>& d) {
        if (!domain_(d)) return;
        for (size_t i = 0; i < m_; ++i) z[i] = R.lift(R.zero(), 0, d[i]);
        if (C.j == 0 || critical(C, z, 1, pw)) starts.push_back(z);
      });
    }
    Counts total;
    if (C.j == 0) {
      std::vector<std::vector<Elem>> pw;
      for (const auto& z : starts) {
        powers_of(C, z, pw);
        RootExponent e = R.phase(evaluate(R, g, z, pw));
        ++total[{e.level, e.num}];
      }
    } else {
      const unsigned T = std::max(1u, std::min<unsigned>(opt_.threads, static_cast<unsigned>(starts.size())));
      std::vector<Counts> partial(T);
      if (T == 1) {
        std::vector<std::vector<Elem>> pw;
        for (const auto& z : starts) descend(C, z, 1, partial[0], pw);
      } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(T);
        for (unsigned t = 0; t < T; ++t) {
          pool.emplace_back([&, t] {
            try {
              std::vector<std::vector<Elem>> pw;
              for (size_t s = t; s < starts.size(); s += T) descend(C, starts[s], 1, partial[t], pw);
            } catch (...) {
              errors[t] = std::current_exception();
            }
          });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errors)
          if (e) std::rethrow_exception(e);
      }
      for (const auto& part : partial)
        for (const auto& [k, n] : part) total[k] += n;
    }
    mpz_class mult;
    mpz_ui_pow_ui(mult.get_mpz_t(), q, static_cast<unsigned long>(m_ * C.j));
    CyclotomicSum s;
    for (const auto& [k, n] : total) {
      s.add_term(p_, RootExponent{k.second, k.first}, mpq_class(mpz_class(static_cast<unsigned long>(n)) * mult));
    }
    return s;
  }

  const ResidueDomain& domain_;
  size_t m_;
  ExpSumOptions opt_;
  uint32_t p_;
  std::atomic<uint64_t> nodes_{0};
};

template <class Ring>
RPoly<Ring> convert(const Ring& R, const ResiduePoly& g) {
  RPoly<Ring> out;
  for (const auto& t : g.terms) out.terms.emplace_back(t.exponents, R.from_digits(t.digits));
  return out;
}

template <class Ring>
ExpSumResult run_fast(const Ring& R, const ResiduePoly& g, const ResidueDomain& domain, const ExpSumOptions& opt,
                      uint32_t p) {
  Solver<Ring> solver(domain, g.m, opt, p);
  CyclotomicSum value = solver.solve(R, convert(R, g));
  return {value, solver.nodes()};
}

template <class Ring>
ExpSumResult run_enumerate(const Ring& R, const ResiduePoly& g, const ResidueDomain& domain, int64_t K,
                           const ExpSumOptions& opt, uint32_t p) {
  const size_t m = g.m;
  const uint32_t q = R.q();
  const auto poly = convert(R, g);
  std::vector<uint32_t> maxdeg(m, 0);
  for (const auto& [e, c] : poly.terms)
    for (size_t i = 0; i < m; ++i) maxdeg[i] = std::max(maxdeg[i], e[i]);
  // digits of every coordinate, z_i = Σ_k d[i*K + k] ϖ^k
  const size_t len = m * static_cast<size_t>(K);
  long double total_points = 1;
  for (size_t i = 0; i < len; ++i) total_points *= q;
  if (total_points > static_cast<long double>(opt.budget)) {
    throw Error(ErrorKind::BudgetExceeded, "coset enumeration exceeds node budget");
  }
  std::vector<uint32_t> d(len, 0);
  std::vector<uint32_t> res(m);
  std::vector<typename Ring::Elem> z(m);
  std::vector<std::vector<typename Ring::Elem>> pw(m);
  Counts counts;
  uint64_t nodes = 0;
  while (true) {
    for (size_t i = 0; i < m; ++i) res[i] = K > 0 ? d[i * K] : 0;
    if (K == 0 || domain(res)) {
      for (size_t i = 0; i < m; ++i) {
        auto v = R.zero();
        for (int64_t k = 0; k < K; ++k) v = R.lift(v, k, d[i * K + k]);
        z[i] = v;
        pw[i].resize(maxdeg[i] + 1);
        pw[i][0] = R.from_int(1);
        for (uint32_t e = 1; e <= maxdeg[i]; ++e) pw[i][e] = R.mul(pw[i][e - 1], z[i]);
      }
      RootExponent e = R.phase(evaluate(R, poly, z, pw));
      ++counts[{e.level, e.num}];
    }
    ++nodes;
    size_t i = 0;
    while (i < len && ++d[i] == q) d[i++] = 0;
    if (i == len) break;
  }
  CyclotomicSum s;
  for (const auto& [k, n] : counts) {
    s.add_term(p, RootExponent{k.second, k.first}, mpq_class(mpz_class(static_cast<unsigned long>(n))));
  }
  return {s, nodes};
}

}  // namespace

ResidueDomain all_residues() {
  return [](const std::vector<uint32_t>&) { return true; };
}

ResidueDomain primitive_residues() {
  return [](const std::vector<uint32_t>& z) {
    for (uint32_t c : z)
      if (c) return true;
    return false;
  };
}

ExpSumResult exponential_sum(const LocalField& field, const ResiduePoly& g, const ResidueDomain& domain,
                             const ExpSumOptions& options) {
  if (g.E < 1) throw Error(ErrorKind::InvalidArgument, "residue ring exponent must be positive");
  if (field.kind() == FieldKind::PAdic) return run_fast(PadicRing(field.p(), g.E), g, domain, options, field.p());
  return run_fast(LaurentRing(&field.residue_field(), g.E), g, domain, options, field.p());
}

ExpSumResult exponential_sum_enumerate(const LocalField& field, const ResiduePoly& g, const ResidueDomain& domain,
                                       int64_t K, const ExpSumOptions& options) {
  if (g.E < 1) throw Error(ErrorKind::InvalidArgument, "residue ring exponent must be positive");
  if (K < 0 || K > g.E) throw Error(ErrorKind::InvalidArgument, "enumeration modulus must lie in [0, E]");
  if (field.kind() == FieldKind::PAdic) {
    return run_enumerate(PadicRing(field.p(), g.E), g, domain, K, options, field.p());
  }
  return run_enumerate(LaurentRing(&field.residue_field(), g.E), g, domain, K, options, field.p());
}

}  // namespace airy
