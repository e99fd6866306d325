#include "airy/quaternion.hpp"

#include "airy/error.hpp"

namespace airy {

QuaternionAlgebra QuaternionAlgebra::make(uint32_t p, int precision) {
  const uint32_t a = find_nonresidue(p);
  return QuaternionAlgebra(LocalField::make(FieldConfig::padic(p, precision)), a);
}

Quaternion QuaternionAlgebra::pure(const Vec& a) const {
  if (a.size() != 3) throw Error(ErrorKind::InvalidArgument, "trace-zero element needs three coordinates");
  return {field_->zero(), a[0], a[1], a[2]};
}

Quaternion quat_mul(const QuaternionAlgebra& H, const Quaternion& x, const Quaternion& y) {
  const auto& al = H.alpha();
  const auto w = H.field()->uniformizer();
  return {x.a0 * y.a0 + al * (x.a1 * y.a1) + w * (x.a2 * y.a2) - al * w * (x.a3 * y.a3),
          x.a0 * y.a1 + x.a1 * y.a0 - w * (x.a2 * y.a3) + w * (x.a3 * y.a2),
          x.a0 * y.a2 + x.a2 * y.a0 + al * (x.a1 * y.a3) - al * (x.a3 * y.a1),
          x.a0 * y.a3 + x.a3 * y.a0 + x.a1 * y.a2 - x.a2 * y.a1};
}

Quaternion quat_add(const Quaternion& x, const Quaternion& y) {
  return {x.a0 + y.a0, x.a1 + y.a1, x.a2 + y.a2, x.a3 + y.a3};
}

Quaternion quat_conj(const Quaternion& x) { return {x.a0, -x.a1, -x.a2, -x.a3}; }

LocalFieldElement quat_norm(const QuaternionAlgebra& H, const Quaternion& x) {
  const auto w = H.field()->uniformizer();
  return x.a0 * x.a0 - H.alpha() * (x.a1 * x.a1) - w * (x.a2 * x.a2 - H.alpha() * (x.a3 * x.a3));
}

LocalFieldElement quat_trace(const Quaternion& x) { return x.a0 + x.a0; }

bool operator==(const Quaternion& x, const Quaternion& y) {
  return x.a0 == y.a0 && x.a1 == y.a1 && x.a2 == y.a2 && x.a3 == y.a3;
}

MultiPoly pure_norm_poly(const QuaternionAlgebra& H) {
  const auto& F = H.field();
  const auto w = F->uniformizer();
  MultiPoly n(F, 3);
  n.add_term(-H.alpha(), {2, 0, 0});
  n.add_term(-w, {0, 2, 0});
  n.add_term(w * H.alpha(), {0, 0, 2});
  return n;
}

MultiPoly invariant_poly(const QuaternionAlgebra& H, uint32_t s) {
  if (s < 1) throw Error(ErrorKind::InvalidArgument, "s must be at least 1");
  const int64_t c = (s % 2 == 0) ? 2 : -2;
  return pure_norm_poly(H).pow(s).scaled(H.field()->from_int(c));
}

LocalFieldElement trace_power(const QuaternionAlgebra& H, const Vec& a, uint32_t r) {
  const Quaternion x = H.pure(a);
  const auto& F = H.field();
  Quaternion acc{F->one(), F->zero(), F->zero(), F->zero()};
  for (uint32_t i = 0; i < r; ++i) acc = quat_mul(H, acc, x);
  return quat_trace(acc);
}

BilinearForm trace_form(const QuaternionAlgebra& H) {
  const auto& F = H.field();
  const auto two = F->from_int(2);
  const auto w = F->uniformizer();
  return BilinearForm::diagonal(F, {two * H.alpha(), two * w, -(two * H.alpha() * w)});
}

std::string OrbitClass::label() const {
  return std::string(parity ? "odd" : "even") + (square_class > 0 ? "/square" : "/nonsquare");
}

std::pair<int, int> norm_square_class(const QuaternionAlgebra& H, const Vec& y) {
  const auto n = quat_norm(H, H.pure(y));
  if (n.is_zero()) throw Error(ErrorKind::InvalidArgument, "zero has no orbit");
  const int64_t v = n.valuation();
  return {static_cast<int>(((v % 2) + 2) % 2), legendre(n.digits()[0], H.field()->p())};
}

bool in_orbit(const QuaternionAlgebra& H, const Vec& y, const Vec& z) {
  return norm_square_class(H, y) == norm_square_class(H, z);
}

std::vector<OrbitClass> orbit_representatives(const QuaternionAlgebra& H) {
  const auto& F = H.field();
  const uint32_t p = F->p();
  std::vector<OrbitClass> out;
  auto push = [&](Vec z) {
    auto [par, sq] = norm_square_class(H, z);
    for (const auto& o : out)
      if (o.parity == par && o.square_class == sq) return;
    out.push_back({par, sq, std::move(z)});
  };
  push({F->one(), F->zero(), F->zero()});
  // N(0, a, b) = -ϖ(a² - αb²); a² - αb² runs over all of F_p^× since the norm
  // from F_{p²} is onto
  for (uint32_t a = 0; a < p; ++a)
    for (uint32_t b = 0; b < p; ++b)
      if (a || b) push({F->zero(), F->from_int(a), F->from_int(b)});
  return out;
}

size_t residue_orbit(const QuaternionAlgebra& H, const std::vector<OrbitClass>& F, const std::vector<uint32_t>& z) {
  const int64_t p = H.field()->p(), al = H.alpha_residue();
  int par, sq;
  if (z[0] % p) {
    par = 0;
    sq = legendre(-al * z[0] * z[0], static_cast<uint32_t>(p));
  } else {
    par = 1;
    const int64_t u = (static_cast<int64_t>(z[1]) * z[1] - al * z[2] * z[2]) % p;
    sq = legendre(-u, static_cast<uint32_t>(p));
  }
  for (size_t i = 0; i < F.size(); ++i)
    if (F[i].parity == par && F[i].square_class == sq) return i;
  throw Error(ErrorKind::InvalidArgument, "residue vector is not primitive");
}

nlohmann::json QuatCertificate::to_json() const {
  nlohmann::json j = airy.to_json();
  j["s"] = s;
  nlohmann::json orb = nlohmann::json::array();
  for (const auto& o : orbits) {
    nlohmann::json z = nlohmann::json::array();
    for (const auto& c : o.representative) z.push_back(airy::to_string(c));
    orb.push_back({{"label", o.label()}, {"representative", z}, {"norm_valuation_parity", o.parity}});
  }
  j["orbits"] = orb;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : orbit_shells) {
    nlohmann::json pieces = nlohmann::json::array();
    for (size_t i = 0; i < row.pieces.size(); ++i) {
      // |y|_N = |N(y)|^{1/2} = q^{r - parity/2} on this piece
      pieces.push_back({{"orbit", orbits[i].label()},
                        {"quaternion_norm_exponent", static_cast<double>(row.r) - orbits[i].parity / 2.0},
                        {"value", row.pieces[i].to_json()},
                        {"is_zero", row.pieces[i].is_zero()}});
    }
    rows.push_back({{"r", row.r}, {"pieces", pieces}});
  }
  j["orbit_shells"] = rows;
  return j;
}

QuatCertificate quat_airy_eval(const QuaternionAlgebra& H, uint32_t s, const Vec& x, const AiryPolicy& policy,
                               const IntegrationOptions& opt) {
  QuatCertificate qc;
  qc.s = s;
  qc.orbits = orbit_representatives(H);
  const MultiPoly h = invariant_poly(H, s);
  const BilinearForm form = trace_form(H);
  auto& cert = qc.airy;
  cert.x = x;
  cert.empirical = true;
  cert.ball = ball_integral(h, form, x, 0, opt);
  cert.value = cert.ball;
  const Vec b = form.linear_coefficients(x);
  int run = 0;
  for (int64_t r = 1; r <= policy.max_r; ++r) {
    ShellReport rep = shell_integral(h, form, x, r, opt);
    QuatShellRow row{r, {}};
    CyclotomicSum sum;
    for (size_t i = 0; i < qc.orbits.size(); ++i) {
      ResidueDomain dom = [&, i](const std::vector<uint32_t>& z) {
        if (!z[0] && !z[1] && !z[2]) return false;
        return residue_orbit(H, qc.orbits, z) == i;
      };
      row.pieces.push_back(region_integral(h, b, r, dom, opt).value.canonical());
      sum += row.pieces.back();
    }
    if (!(sum == rep.value)) throw Error(ErrorKind::InvalidArgument, "orbit pieces do not add up to the shell");
    run = rep.value.is_zero() ? run + 1 : 0;
    cert.value += rep.value;
    cert.shells.push_back(std::move(rep));
    qc.orbit_shells.push_back(std::move(row));
    if (run >= policy.zero_run) {
      cert.r_stop = r;
      cert.zero_run = run;
      cert.value = cert.value.canonical();
      return qc;
    }
  }
  throw Error(ErrorKind::NoConvergence, "no run of vanishing shells before max_r");
}

}  // namespace airy
