// airy: command-line front end.

#include <fstream>
#include <iostream>
#include <random>
#include <regex>

#include "CLI11.hpp"
#include "airy/character.hpp"
#include "airy/distribution.hpp"
#include "airy/error.hpp"
#include "airy/quaternion.hpp"
#include "airy/sharpmap.hpp"

using namespace airy;
using nlohmann::json;

namespace {

struct Settings {
  std::string config;
  std::string field = "Qp";
  uint32_t p = 5;
  uint32_t f = 1;
  int precision = 40;
  std::string h = "y^3";
  size_t m = 0;
  std::vector<std::string> params;
  std::string x = "0";
  unsigned threads = 1;
  uint64_t seed = 1;
  uint64_t budget = 50'000'000;
  int zero_run = 3;
  int64_t max_r = 60;
  bool empirical = false;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// `pairing` takes --f for the test function; there the residue degree comes from --field F<q>T.
void add_common(CLI::App* sub, Settings& s, bool degree_flag) {
  sub->add_option("--config", s.config, "JSON file presetting any of the options below");
  sub->add_option("--field", s.field, "Qp, Laurent, or F<q>T (e.g. F3T, F9T)");
  sub->add_option("--p", s.p, "residue characteristic");
  if (degree_flag) sub->add_option("--f", s.f, "residue degree (Laurent fields)");
  sub->add_option("--precision", s.precision, "relative precision in digits");
  sub->add_option("--threads", s.threads, "worker threads");
  sub->add_option("--seed", s.seed, "random seed");
  sub->add_option("--budget", s.budget, "node budget per exponential sum");
}

void add_poly(CLI::App* sub, Settings& s) {
  sub->add_option("--h", s.h, "polynomial in y or y1..ym");
  sub->add_option("--m", s.m, "number of variables (default: from --h)");
  sub->add_option("--param", s.params, "name=value for a named coefficient")->take_all();
  sub->add_option("--zero-run", s.zero_run, "vanishing shells required to stop");
  sub->add_option("--max-r", s.max_r, "largest shell index tried");
  sub->add_flag("--empirical", s.empirical, "stop on the zero run alone");
}

// Values from --config fill options that were not given on the command line.
void apply_config(CLI::App* sub, Settings& s) {
  if (s.config.empty()) return;
  std::ifstream in(s.config);
  if (!in) throw UsageError("cannot read config file " + s.config);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(std::string("bad config file: ") + e.what());
  }
  auto fill = [&](const char* key, auto& target) {
    if (j.contains(key) && sub->count(std::string("--") + key) == 0) j.at(key).get_to(target);
  };
  fill("field", s.field);
  fill("p", s.p);
  if (j.contains("f") && (sub->get_name() == "pairing" || sub->count("--f") == 0))
    j.at("f").get_to(s.f);
  fill("precision", s.precision);
  fill("threads", s.threads);
  fill("seed", s.seed);
  fill("budget", s.budget);
  fill("h", s.h);
  fill("x", s.x);
  if (j.contains("zero_run") && sub->count("--zero-run") == 0) j.at("zero_run").get_to(s.zero_run);
  if (j.contains("max_r") && sub->count("--max-r") == 0) j.at("max_r").get_to(s.max_r);
  if (j.contains("params") && sub->count("--param") == 0) {
    for (const auto& [k, v] : j.at("params").items()) s.params.push_back(k + "=" + v.get<std::string>());
  }
}

FieldPtr make_field(const Settings& s) {
  static const std::regex fqt(R"(F(\d+)T)");
  std::smatch mt;
  if (s.field == "Qp") return LocalField::make(FieldConfig::padic(s.p, s.precision));
  if (s.field == "Laurent") return LocalField::make(FieldConfig::laurent(s.p, s.f, s.precision));
  if (std::regex_match(s.field, mt, fqt)) {
    const uint64_t q = std::stoull(mt[1]);
    for (uint32_t p = 2; p <= q; ++p) {
      if (q % p) continue;
      uint32_t f = 0;
      uint64_t r = q;
      while (r % p == 0) {
        r /= p;
        ++f;
      }
      if (r != 1 || !is_prime(p)) break;
      return LocalField::make(FieldConfig::laurent(p, f, s.precision));
    }
    throw UsageError("F<q>T needs a prime power q");
  }
  throw UsageError("unknown field '" + s.field + "'");
}

std::map<std::string, LocalFieldElement> make_params(const FieldPtr& F, const Settings& s) {
  std::map<std::string, LocalFieldElement> out;
  for (const auto& kv : s.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--param expects name=value, got '" + kv + "'");
    out.insert_or_assign(kv.substr(0, eq), parse_scalar(F, kv.substr(eq + 1), out));
  }
  return out;
}

size_t infer_dim(const std::string& h) {
  static const std::regex var(R"(y(\d+))");
  size_t m = 1;
  for (std::sregex_iterator it(h.begin(), h.end(), var), end; it != end; ++it) m = std::max<size_t>(m, std::stoul((*it)[1]));
  return m;
}

// Splits on commas outside parentheses and braces.
std::vector<std::string> split_top(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : text) {
    if (c == '(' || c == '{') ++depth;
    if (c == ')' || c == '}') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

Vec parse_vec(const FieldPtr& F, const std::string& text, size_t m,
              const std::map<std::string, LocalFieldElement>& params) {
  auto parts = split_top(text);
  if (parts.size() == 1 && m > 1) parts.assign(m, parts[0]);
  if (parts.size() != m) throw UsageError("expected " + std::to_string(m) + " coordinates in '" + text + "'");
  Vec v;
  for (const auto& s : parts) v.push_back(parse_scalar(F, s, params));
  return v;
}

// ball(center, k) or ball(center, k, weight); center coordinates separated by ';'.
SBFunction parse_sb(const FieldPtr& F, size_t m, const std::vector<std::string>& specs,
                    const std::map<std::string, LocalFieldElement>& params) {
  static const std::regex ball(R"(\s*ball\((.*)\)\s*)");
  SBFunction f(F, m);
  for (const auto& spec : specs) {
    std::smatch mt;
    if (!std::regex_match(spec, mt, ball)) throw UsageError("expected ball(center,k[,weight]), got '" + spec + "'");
    auto args = split_top(mt[1]);
    if (args.size() < 2 || args.size() > 3) throw UsageError("ball takes 2 or 3 arguments");
    std::string c = args[0];
    std::replace(c.begin(), c.end(), ';', ',');
    const Vec center = parse_vec(F, c, m, params);
    int64_t k = 0;
    try {
      k = std::stoll(args[1]);
    } catch (const std::exception&) {
      throw UsageError("ball radius exponent must be an integer");
    }
    mpq_class w = 1;
    if (args.size() == 3 && w.set_str(args[2], 10) != 0) throw UsageError("ball weight must be a rational");
    w.canonicalize();
    f.add_ball(center, k, CyclotomicSum::rational(w));
  }
  return f;
}

// Symbolic c*y^(m p^r) -> c♯^r*y^m for one-variable h with named coefficients.
std::string symbolic_sharp(const std::string& h, uint32_t p) {
  static const std::regex term(R"(\s*([+-]?)\s*([A-Za-z_]\w*)?\s*\*?\s*y(?:\^(\d+))?\s*)");
  std::map<uint64_t, std::vector<std::string>, std::greater<>> out;
  std::string rest = h;
  size_t pos = 0;
  std::smatch mt;
  while (pos < rest.size()) {
    std::string tail = rest.substr(pos);
    if (!std::regex_search(tail, mt, term, std::regex_constants::match_continuous) || mt.length(0) == 0)
      throw UsageError("symbolic sharp handles sums of name*y^e terms only");
    uint64_t e = mt[3].matched ? std::stoull(mt[3]) : 1;
    std::string c = mt[2].matched ? mt[2].str() : "1";
    while (e % p == 0) {
      e /= p;
      c += "♯";
    }
    out[e].push_back((mt[1] == "-" ? "-" : "") + c);
    pos += static_cast<size_t>(mt.length(0));
  }
  std::string s;
  for (const auto& [e, cs] : out) {
    std::string coef;
    for (const auto& c : cs) coef += (coef.empty() ? "" : " + ") + c;
    if (cs.size() > 1) coef = "(" + coef + ")";
    std::string mono = e == 1 ? "y" : "y^" + std::to_string(e);
    std::string t = coef == "1" ? mono : coef + "*" + mono;
    if (!s.empty()) s += " + ";
    s += t;
  }
  return s;
}

struct Context {
  FieldPtr F;
  std::map<std::string, LocalFieldElement> params;
  MultiPoly h;
  BilinearForm form;
  AiryPolicy policy;
  IntegrationOptions opt;
};

Context make_context(const Settings& s) {
  auto F = make_field(s);
  auto params = make_params(F, s);
  const size_t m = s.m ? s.m : infer_dim(s.h);
  auto h = parse_poly(F, m, s.h, params);
  AiryPolicy pol;
  pol.zero_run = s.zero_run;
  pol.max_r = s.max_r;
  pol.empirical = s.empirical;
  IntegrationOptions opt;
  opt.threads = s.threads;
  opt.budget = s.budget;
  return {F, params, h, BilinearForm::standard(F, m), pol, opt};
}

std::vector<int64_t> parse_tiers(const std::string& t) {
  static const std::regex range(R"((-?\d+)\.\.(-?\d+))");
  std::smatch mt;
  std::vector<int64_t> out;
  if (std::regex_match(t, mt, range)) {
    for (int64_t b = std::stoll(mt[1]); b <= std::stoll(mt[2]); ++b) out.push_back(b);
    return out;
  }
  for (const auto& s : split_top(t)) out.push_back(std::stoll(s));
  return out;
}

int selfcheck(const Settings& s);

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"p-adic Airy functions by shell-wise exponential summation"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);
  Settings s;
  int64_t r_max = 8;
  std::string tiers = "1..6";
  int samples = 8;
  std::vector<std::string> balls;
  uint32_t quat_s = 1;

  auto* eval = app.add_subcommand("eval", "evaluate A(x) and print the certificate");
  auto* shells = app.add_subcommand("shells", "print ball and shell integrals");
  auto* tail = app.add_subcommand("tail", "print tail-bound constants and the verifying zero run");
  auto* growth = app.add_subcommand("growth", "CSV scan of max |A(x)| per norm tier");
  auto* pairing = app.add_subcommand("pairing", "compare ∫ A f with ∫ ψ(h) f̂");
  auto* sharp = app.add_subcommand("sharp", "print h♯");
  auto* quat = app.add_subcommand("quat", "Airy function of p_{2s} on trace-zero quaternions");
  auto* check = app.add_subcommand("selfcheck", "run invariant checks");
  for (auto* sub : {eval, shells, tail, growth, pairing, sharp, quat, check}) add_common(sub, s, sub != pairing);
  for (auto* sub : {eval, shells, tail, growth, pairing, sharp}) add_poly(sub, s);
  for (auto* sub : {eval, shells, tail, quat})
    sub->add_option("--x", s.x, "point x: comma-separated coordinates, or one value for all");
  shells->add_option("--r-max", r_max, "largest shell index");
  growth->add_option("--tiers", tiers, "norm tiers as a..b or a comma list");
  growth->add_option("--samples", samples, "points per tier");
  pairing->add_option("--f", balls, "ball(center,k[,weight]); repeat for sums")->required();
  quat->add_option("--s", quat_s, "degree 2s of the invariant polynomial");
  quat->add_option("--zero-run", s.zero_run, "vanishing shells required to stop");
  quat->add_option("--max-r", s.max_r, "largest shell index tried");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    apply_config(sub, s);
    if (sub == check) return selfcheck(s);
    if (sub == quat) {
      auto H = QuaternionAlgebra::make(s.p, s.precision);
      AiryPolicy pol;
      pol.zero_run = s.zero_run;
      pol.max_r = s.max_r;
      IntegrationOptions opt;
      opt.threads = s.threads;
      opt.budget = s.budget;
      const Vec x = parse_vec(H.field(), s.x, 3, {});
      std::cout << quat_airy_eval(H, quat_s, x, pol, opt).to_json().dump(2) << "\n";
      return 0;
    }
    if (sub == sharp) {
      auto F = make_field(s);
      if (F->characteristic() == 0) throw UsageError("sharp needs a Laurent field (--field F<q>T or Laurent)");
      try {
        const auto params = make_params(F, s);
        const auto h = parse_poly(F, 1, s.h, params);
        std::cout << to_string(sharpen(h)) << "\n";
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::ParseError || std::string(e.what()).find("unknown identifier") == std::string::npos)
          throw;
        std::cout << symbolic_sharp(s.h, F->p()) << "\n";
      }
      return 0;
    }
    Context c = make_context(s);
    const size_t m = c.h.num_vars();
    if (sub == eval) {
      std::cout << airy_eval(c.h, c.form, parse_vec(c.F, s.x, m, c.params), c.policy, c.opt).to_json().dump(2) << "\n";
    } else if (sub == shells) {
      const Vec x = parse_vec(c.F, s.x, m, c.params);
      const MultiPoly he = effective_polynomial(c.h);
      json j{{"ball", ball_integral(he, c.form, x, 0, c.opt).to_json()}};
      json rows = json::array();
      for (int64_t r = 1; r <= r_max; ++r) rows.push_back(to_json(shell_integral(he, c.form, x, r, c.opt)));
      j["shells"] = rows;
      std::cout << j.dump(2) << "\n";
    } else if (sub == tail) {
      const Vec x = parse_vec(c.F, s.x, m, c.params);
      const MultiPoly he = effective_polynomial(c.h);
      json j;
      if (auto tb = tail_bound(he, c.form)) {
        const int64_t B = std::max<int64_t>(norm_exponent(x), 0);
        j = {{"s0", tb->s0}, {"B", tb->B}, {"n", tb->n}, {"nu", tb->nu}, {"x_norm_exponent", B},
             {"theoretical_r0", tb->r0_for(B)}};
      } else {
        j = {{"theoretical_r0", nullptr}, {"reason", "p divides the degree in characteristic 0"}};
      }
      const auto cert = airy_eval(c.h, c.form, x, c.policy, c.opt);
      json zs = json::array();
      for (const auto& sh : cert.shells) zs.push_back({{"r", sh.r}, {"is_zero", sh.value.is_zero()}});
      j["r_stop"] = cert.r_stop;
      j["zero_run"] = cert.zero_run;
      j["shells"] = zs;
      std::cout << j.dump(2) << "\n";
    } else if (sub == growth) {
      std::cout << growth_scan(c.h, c.form, parse_tiers(tiers), samples, s.seed, c.policy, c.opt).to_csv();
    } else if (sub == pairing) {
      const SBFunction f = parse_sb(c.F, m, balls, c.params);
      PairingReport rep;
      rep.lhs = pairing_lhs(c.h, c.form, f, c.policy, c.opt);
      rep.rhs = pairing_rhs(c.h, c.form, f, c.opt);
      rep.equal = rep.lhs.value == rep.rhs.value;
      std::cout << rep.to_json().dump(2) << "\n";
      return rep.equal ? 0 : 1;
    }
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::ParseError:
      case ErrorKind::InvalidArgument:
      case ErrorKind::ConfigMismatch:
      case ErrorKind::EvenPrime:
        return 2;
      default:
        return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
}

namespace {

int selfcheck(const Settings& s) {
  int failures = 0;
  auto report = [&](const std::string& name, bool ok) {
    std::cout << (ok ? "ok   " : "FAIL ") << name << "\n";
    if (!ok) ++failures;
  };
  std::mt19937_64 rng(s.seed);
  {
    auto F = LocalField::make(FieldConfig::padic(5, 20));
    std::uniform_int_distribution<int64_t> co(-100000, 100000);
    bool ok = true;
    for (int t = 0; t < 500; ++t) {
      const int64_t a = co(rng), b = co(rng), c = co(rng);
      auto A = F->from_int(a), B = F->from_int(b), C = F->from_int(c);
      ok &= (A + B) * C == F->from_int((a + b) * c);
      ok &= psi(A.shift(-3) + B.shift(-2)) == psi(A.shift(-3)) * psi(B.shift(-2));
    }
    report("ring laws and additivity of psi over Q_5", ok);
  }
  {
    auto L = LocalField::make(FieldConfig::laurent(3));
    auto c = L->from_digits(-4, {2, 1, 1}, true);
    report("psi(c y^3) = psi(c♯ y) over F_3((T))", verify_character_identity(MultiPoly::monomial(c, {3}), 200, s.seed));
    auto h = parse_poly(L, 1, "c*y^9 + y^6", {{"c", c}});
    report("sharpen is idempotent", sharpen(sharpen(h)) == sharpen(h));
  }
  {
    auto F = LocalField::make(FieldConfig::padic(3));
    auto I = BilinearForm::standard(F, 1);
    bool ok = true;
    for (int t = 0; t < 20; ++t) {
      SBFunction f(F, 1);
      f.add_ball({F->from_int(static_cast<int64_t>(rng() % 27)).shift(-static_cast<int64_t>(rng() % 3))},
                 static_cast<int64_t>(rng() % 5) - 2, CyclotomicSum::rational(1 + static_cast<long>(rng() % 3)));
      auto f2 = fourier(fourier(f, I), I);
      ok &= sb_equal(f2, f.reflected()) && sb_equal(fourier(fourier(f2, I), I), f);
    }
    report("fourier: F^2 f(x) = f(-x) and F^4 = id", ok);
  }
  {
    auto F = LocalField::make(FieldConfig::padic(5));
    auto I = BilinearForm::standard(F, 1);
    auto h = parse_poly(F, 1, "y^3");
    bool ok = true;
    for (int64_t B : {0, 1, 2}) {
      const Vec x{F->uniformizer_power(-B)};
      const int64_t r0 = *theoretical_r0(h, I, B);
      for (int64_t r = r0; r <= r0 + 3; ++r) ok &= shell_integral(h, I, x, r).value.is_zero();
    }
    report("shells of y^3 vanish on [r0, r0 + 3]", ok);
    auto f = SBFunction::ball({F->zero()}, 0);
    report("pairing identity for y^3 on 1_R", pairing_lhs(h, I, f).value == pairing_rhs(h, I, f).value);
    auto lin = parse_poly(F, 1, "y/5");
    auto g = SBFunction::ball({F->from_rational(mpq_class(1, 5))}, 1);
    report("linear h pairs as a delta function", pairing_rhs(lin, I, g).value == g.evaluate({F->from_rational(mpq_class(1, 5))}));
  }
  {
    bool ok = true;
    for (uint32_t n : {2u, 3u}) {
      auto M = power_subgroup(LocalField::make(FieldConfig::padic(5)), n, 4);
      const int64_t nu = subgroup_nu(M);
      for (int64_t k = nu; k <= nu + 2; ++k)
        ok &= subgroup_character_integral(M, M.field->uniformizer_power(-k)).is_zero();
    }
    report("subgroup integrals vanish past nu", ok);
  }
  {
    auto H = QuaternionAlgebra::make(5);
    auto F = H.field();
    bool ok = true;
    for (int t = 0; t < 100; ++t) {
      Vec y{F->from_int(static_cast<int64_t>(rng() % 50) - 25), F->from_int(static_cast<int64_t>(rng() % 50) - 25),
            F->from_int(static_cast<int64_t>(rng() % 50) - 25)};
      ok &= trace_power(H, y, 3).is_zero();
      ok &= eval(invariant_poly(H, 1), y) == trace_power(H, y, 2);
    }
    report("quaternion traces: p_2 = Tr(x^2), Tr(x^3) = 0", ok);
  }
  return failures ? 1 : 0;
}

}  // namespace
