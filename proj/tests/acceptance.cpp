// Acceptance criteria, one line each.  With an argument, runs just that
// criterion (1-10); the determinism criterion takes the CLI path as a
// second argument and otherwise runs in process.

#include <algorithm>
#include <array>
#include <cstdio>
#include <functional>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <string>

#include "blockfusion/workbench.hpp"

using namespace blockfusion;

namespace {

struct Verdict {
  bool ok = true;
  std::ostringstream note;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      if (!ok) note << "; ";
      note << what;
      ok = false;
    }
  }
};

const RunOptions kOpt = [] {
  RunOptions o;
  o.seed = 7;
  return o;
}();

struct Subjects {
  BlockExtension ext;
  std::vector<Subject> list;
};

Subjects subjects_of(const Scenario& s) {
  Subjects out{scenario_extension(s, kOpt), {}};
  out.list.push_back(resolve_subject(out.ext, "P", s.p_gens, kOpt));
  if (s.q_gens) out.list.push_back(resolve_subject(out.ext, "Q", s.q_gens, kOpt));
  return out;
}

std::string where(const Scenario& s, const Subject& sub, const PointedGroup& pg) {
  return s.name + " " + sub.label + " point " + std::to_string(pg.point);
}

// Every element of the centre, by brute force over the span of the class sums.
std::vector<Vec> centre_elements(const GroupAlgebra& kh) {
  const auto& f = kh.alg.field();
  const Subspace z(f, kh.alg.dim(), class_sums(kh.group));
  std::vector<Vec> out;
  Vec c(z.dim(), 0);
  for (;;) {
    out.push_back(z.combine(c));
    std::size_t k = 0;
    while (k < c.size() && ++c[k] == f.p()) c[k++] = 0;
    if (k == c.size()) return out;
  }
}

// Primitive idempotents of the centre: nonzero idempotents with no proper
// nonzero idempotent below them.
std::vector<Vec> centre_primitive_idempotents(const GroupAlgebra& kh) {
  const auto& a = kh.alg;
  std::vector<Vec> idem;
  for (const auto& z : centre_elements(kh))
    if (!is_zero(z) && a.mul(z, z) == z) idem.push_back(z);
  std::vector<Vec> out;
  for (const auto& e : idem) {
    bool prim = true;
    for (const auto& f : idem) prim = prim && (f == e || a.mul(f, e) != f);
    if (prim) out.push_back(e);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t ideal_dim(const GroupAlgebra& kh, const Vec& e) {
  std::vector<Vec> span;
  for (const auto& g : kh.group.elements()) span.push_back(kh.alg.mul(kh.element(g), e));
  return Subspace(kh.alg.field(), kh.alg.dim(), span).dim();
}

// ---------------------------------------------------------------------------

bool c1(Verdict& v) {
  for (const char* name : {"SC1", "SC2"}) {
    const auto s = *catalog_entry(name);
    const auto setup = quotient(scenario_group(s.gens_g, s.degree, kOpt.cap_order),
                                scenario_group(s.gens_h, s.degree, kOpt.cap_order));
    const auto kh = group_algebra(setup.h, Field(s.p));
    const auto bl = blocks(kh);
    const auto oracle = centre_primitive_idempotents(kh);
    std::vector<Vec> got;
    Vec sum(kh.alg.dim(), 0);
    for (std::size_t k = 0; k < bl.size(); ++k) {
      const auto& e = bl[k].idempotent;
      got.push_back(e);
      sum = vadd(kh.alg.field(), sum, e);
      for (const auto& g : kh.group.elements())
        v.require(kh.alg.mul(e, kh.element(g)) == kh.alg.mul(kh.element(g), e), std::string(name) + " block not central");
      for (std::size_t l = 0; l < k; ++l)
        v.require(is_zero(kh.alg.mul(e, bl[l].idempotent)), std::string(name) + " blocks not orthogonal");
      v.require(ideal_dim(kh, e) == bl[k].dim, std::string(name) + " block dimension");
    }
    std::sort(got.begin(), got.end());
    v.require(got == oracle, std::string(name) + " blocks differ from the primitive central idempotents");
    v.require(sum == kh.alg.unit(), std::string(name) + " blocks do not sum to 1");
    if (std::string(name) == "SC2") {
      std::multiset<std::size_t> dims;
      for (const auto& e : oracle) dims.insert(ideal_dim(kh, e));
      std::ostringstream d;
      for (auto x : dims) d << (d.tellp() ? "," : "") << x;
      v.require(dims == std::multiset<std::size_t>{4, 8},
                "kA4 over GF(2) has " + std::to_string(oracle.size()) + " block(s) of dims {" + d.str() + "}, expected {4,8}");
    }
  }
  return v.ok;
}

bool c2(Verdict& v) {
  std::size_t n = 0;
  for (const auto& s : catalog()) {
    const auto ext = scenario_extension(s, kOpt);
    auto scan = defect_pointed_groups(ext, kOpt.bundle().meataxe, kOpt.cap_order);
    for (std::size_t k = 0; k < scan.subgroups.size(); ++k, ++n) {
      const auto& ctx = scan.contexts[k];
      const auto c = check_brauer(ext, ctx.fixed, ctx.brauer);
      v.require(c.ok(), s.name + " |P|=" + std::to_string(scan.subgroups[k].order()));
    }
    // explicit P and Q selectors too
    for (const auto& sub : subjects_of(s).list)
      v.require(check_brauer(ext, sub.ctx.fixed, sub.ctx.brauer).ok(), s.name + " " + sub.label);
  }
  if (v.ok) v.note << n << " subgroups";
  return v.ok;
}

bool c3(Verdict& v) {
  for (const auto& s : catalog()) {
    const auto sj = subjects_of(s);
    for (const auto& sub : sj.list)
      for (const auto& pg : sub.pointed) {
        if (!pg.local) continue;
        const auto b = fusion_bundle(sj.ext, sub.ctx, pg, kOpt.bundle());
        const auto at = where(s, sub, pg);
        v.require(b.theta.ok(), at + ": Theta");
        v.require(b.e.order() == b.f.group.order(), at + ": |E| != |F|");
        v.require(b.f.status == SearchStatus::Found && b.scan.status == SearchStatus::Found, at + ": inconclusive search");
        v.require(b.f.group.elements == b.scan.group.elements, at + ": direct and normalizer F differ");
        v.require(b.scan.fibres_match(), at + ": normalizer fibres");
        if (s.name == "SC1") v.require(b.f.group.order() == 2 && b.e.order() == 2, at + ": order not 2");
      }
  }
  return v.ok;
}

bool psi_multiplicative(const CliffordBundle& b) {
  const auto& ea = b.ce.cc.graded.alg;
  const auto& fa = b.cf.graded.alg;
  if (rank(b.psi) != ea.dim() || ea.dim() != fa.dim()) return false;
  auto psi = [&](const Vec& x) { return mat_vec(b.psi, x); };
  for (std::size_t x = 0; x < ea.dim(); ++x)
    for (std::size_t y = 0; y < ea.dim(); ++y) {
      const Vec ex = unit_vec(ea.dim(), x), ey = unit_vec(ea.dim(), y);
      if (psi(ea.mul(ex, ey)) != fa.mul(psi(ex), psi(ey))) return false;
    }
  return psi(ea.unit()) == fa.unit();
}

bool c4(Verdict& v) {
  for (const auto& s : catalog()) {
    const auto sj = subjects_of(s);
    for (const auto& sub : sj.list)
      for (const auto& pg : sub.pointed) {
        if (!pg.local) continue;
        const auto b = clifford_bundle(sj.ext, sub.ctx, pg, kOpt.bundle());
        const auto c = check_bundle(sub.ctx, b);
        const auto at = where(s, sub, pg);
        v.require(psi_multiplicative(b), at + ": Psi not a bijective homomorphism");
        v.require(c.psi_iso, at + ": Psi not graded");
        v.require(c.residual_equiv == SearchStatus::Found, at + ": residual factor sets");
      }
  }
  return v.ok;
}

bool c5(Verdict& v) {
  std::size_t n = 0;
  for (const auto& s : catalog()) {
    const auto ext = scenario_extension(s, kOpt);
    auto scan = defect_pointed_groups(ext, kOpt.bundle().meataxe, kOpt.cap_order);
    for (const auto& [k, pt] : scan.local) {
      const auto& ctx = scan.contexts[k];
      const auto b = clifford_bundle(ext, ctx, ctx.points[pt], kOpt.bundle());
      const auto c = check_bundle(ctx, b);
      const std::string at = s.name + " |P|=" + std::to_string(scan.subgroups[k].order()) + " point " + std::to_string(pt);
      v.require(c.local_iso && *c.local_iso, at + ": no graded iso to the local residual");
      v.require(c.local_equiv && *c.local_equiv == SearchStatus::Found, at + ": local factor sets");
      ++n;
    }
  }
  if (v.ok) v.note << n << " local pointed groups";
  return v.ok;
}

bool c6(Verdict& v) {
  for (const char* name : {"SC1", "SC2"}) {
    const auto s = *catalog_entry(name);
    const auto sj = subjects_of(s);
    for (const auto& sub : sj.list)
      for (const auto& pg : sub.pointed) {
        if (!pg.local) continue;
        const auto b = clifford_bundle(sj.ext, sub.ctx, pg, kOpt.bundle());
        const std::pair<const char*, Vec> es[] = {{"1", sj.ext.b}, {"i", pg.idempotent}, {"cut", point_cut(sub.ctx, pg)}};
        for (const auto& [tag, e] : es)
          v.require(embed_truncate(sj.ext, sub.ctx, b, e, kOpt.bundle()).ok(), where(s, sub, pg) + " e=" + tag);
      }
  }
  return v.ok;
}

// |G''| for G = S3 over H = C3: pairs of equal parity
std::size_t pair_count_oracle(const PermGroup& g) {
  auto odd = [](const Perm& x) {
    std::size_t inv = 0;
    const auto im = x.images();
    for (std::size_t a = 0; a < im.size(); ++a)
      for (std::size_t b = a + 1; b < im.size(); ++b) inv += im[a] > im[b];
    return inv % 2;
  };
  std::size_t n = 0;
  for (const auto& x : g.elements())
    for (const auto& y : g.elements()) n += odd(x) == odd(y);
  return n;
}

bool c7(Verdict& v) {
  const auto s = *catalog_entry("SC1");
  const auto sj = subjects_of(s);
  const auto& sub = sj.list.front();
  const auto b = clifford_bundle(sj.ext, sub.ctx, sub.pointed.front(), kOpt.bundle());
  v.require(tensor_algebra_dim(sj.ext, sj.ext) <= kTensorDimCap, "A'' above the cap");
  const auto t = tensor_diagonal_check(sj.ext, b, sj.ext, b, kOpt.bundle());
  v.require(t.ok(), "graded iso not found");
  v.require(t.g_order == pair_count_oracle(sj.ext.setup.g), "|G''|");
  v.require(t.a_dim <= kTensorDimCap, "dim A''");
  if (v.ok) v.note << "dim A''=" << t.a_dim << " |K|=" << t.k.order();
  return v.ok;
}

bool c8(Verdict& v) {
  for (const auto& m : morita_catalog()) {
    if (m.a.name != "SC1" && m.a.name != "SC2") continue;
    const auto r = verify_morita(m, kOpt);
    v.require(r.passed() && !r.invariants["pointed_groups"].empty(), m.name);
    for (const auto& c : r.checks) v.require(c.status == Status::Pass, m.name + " " + c.name + " " + to_string(c.status));
  }
  return v.ok;
}

bool c9(Verdict& v) {
  const auto s = *catalog_entry("SC3");
  const auto sj = subjects_of(s);
  v.require(sj.ext.setup.gbar.order() == 1, "Gbar not trivial");
  const auto& sub = sj.list.front();
  const auto& pg = sub.pointed.front();
  const auto b = fusion_bundle(sj.ext, sub.ctx, pg, kOpt.bundle());
  // N_G(P)/C_G(P) by brute force, and its action on P
  const auto& g = sj.ext.setup.g;
  const auto& p = sub.p;
  std::set<ElementMap> conj;
  std::size_t n = 0, c = 0;
  for (const auto& x : g.elements()) {
    bool norm = true, cent = true;
    for (const auto& y : p.elements()) {
      const Perm z = x * y * x.inverse();
      norm = norm && p.contains(z);
      cent = cent && z == y;
    }
    n += norm;
    c += cent;
    if (norm) conj.insert(conjugation_map(p, x));
  }
  const std::size_t oracle = n / c;
  v.require(oracle == 2, "N/C oracle is " + std::to_string(oracle));
  v.require(b.e.order() == oracle && b.f.group.order() == oracle, "|E|=" + std::to_string(b.e.order()) +
                                                                      " |F|=" + std::to_string(b.f.group.order()));
  std::set<ElementMap> phis;
  for (const auto& x : b.f.group.elements) {
    v.require(x.gbar == 0, "F element with nontrivial degree");
    phis.insert(x.phi);
  }
  v.require(phis == conj, "F is not the conjugation action of N_G(P)");
  return v.ok;
}

std::string run_command(const std::string& cmd, int& status) {
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  if (!pipe) throw Error("cannot run " + cmd);
  std::string out;
  std::array<char, 4096> buf;
  while (std::size_t k = fread(buf.data(), 1, buf.size(), pipe.get())) out.append(buf.data(), k);
  status = pclose(pipe.release());
  return out;
}

bool c10(Verdict& v, const std::string& cli) {
  if (cli.empty()) {
    const auto a = emit(run_catalog(kOpt), Format::Json, kOpt.seed);
    const auto b = emit(run_catalog(kOpt, 4), Format::Json, kOpt.seed);
    v.require(a == b, "in-process reports differ");
    if (v.ok) v.note << a.size() << " bytes, in process";
    return v.ok;
  }
  int s1 = 0, s2 = 0;
  const auto a = run_command(cli + " catalog --run-all --seed 7", s1);
  const auto b = run_command(cli + " catalog --run-all --seed 7 --jobs 4", s2);
  v.require(s1 == 0 && s2 == 0, "CLI exit status");
  v.require(!a.empty() && a == b, "CLI reports differ");
  if (v.ok) v.note << a.size() << " identical bytes";
  return v.ok;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 2 ? argv[2] : "";
  const std::vector<std::pair<const char*, std::function<bool(Verdict&)>>> criteria = {
      {"block arithmetic", c1},
      {"Brauer construction", c2},
      {"E and F via Theta", c3},
      {"Psi and residual factor sets", c4},
      {"local residual", c5},
      {"embedding diagram", c6},
      {"tensor diagonal", c7},
      {"supplied Morita pairs", c8},
      {"classical reduction", c9},
      {"determinism", [&](Verdict& v) { return c10(v, cli); }},
  };
  std::size_t only = 0;
  if (argc > 1) only = std::stoul(argv[1]);
  if (only > criteria.size()) {
    std::cerr << "no criterion " << only << "\n";
    return 2;
  }
  bool all = true;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (only && only != k + 1) continue;
    Verdict v;
    try {
      criteria[k].second(v);
    } catch (const std::exception& e) {
      v.require(false, std::string("error: ") + e.what());
    }
    const auto note = v.note.str();
    std::cout << "criterion " << (k + 1) << " " << criteria[k].first << ": " << (v.ok ? "PASS" : "FAIL")
              << (note.empty() ? "" : "  (" + note + ")") << std::endl;
    all = all && v.ok;
  }
  return all ? 0 : 1;
}
