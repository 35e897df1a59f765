#pragma once

/**
 * @file workbench.hpp
 * @brief Scenarios, the built-in catalog, the verification pipeline,
 *        Morita-pair checks and JSON/text reports.
 */

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "blockfusion/clifford.hpp"

namespace blockfusion {

using Json = nlohmann::json;

inline constexpr int kReportSchema = 1;
inline constexpr int kScenarioSchema = 1;

// ---------------------------------------------------------------------------
// Scenarios

struct Scenario {
  std::string name;
  std::uint32_t p = 2;
  std::size_t degree = 0;
  std::vector<std::string> gens_g;
  std::vector<std::string> gens_h;
  std::optional<std::size_t> block;                   ///< index into g_invariant_blocks; empty = principal
  std::optional<std::vector<std::string>> p_gens;     ///< empty = defect group
  std::optional<std::vector<std::string>> q_gens;

  bool operator==(const Scenario&) const = default;
};

namespace detail {

inline void reject_unknown(const Json& j, std::initializer_list<const char*> known, const std::string& what) {
  if (!j.is_object()) throw Error(what + ": expected a JSON object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw Error(what + ": unknown field '" + key + "'");
  }
}

inline const Json& required(const Json& j, const char* key, const std::string& what) {
  if (!j.contains(key)) throw Error(what + ": missing field '" + key + "'");
  return j.at(key);
}

inline void check_schema(const Json& j, int version, const std::string& what) {
  if (j.contains("schema") && (!j.at("schema").is_number_integer() || j.at("schema").get<int>() != version))
    throw Error(what + ": unsupported schema version");
}

inline std::vector<std::string> cycle_list(const Json& j, const std::string& what) {
  if (!j.is_array()) throw Error(what + ": expected a list of cycle strings");
  std::vector<std::string> out;
  for (const auto& x : j) {
    if (!x.is_string()) throw Error(what + ": expected a list of cycle strings");
    out.push_back(x.get<std::string>());
  }
  return out;
}

inline std::vector<Perm> parse_gens(const std::vector<std::string>& gens, std::size_t degree) {
  std::vector<Perm> out;
  for (const auto& g : gens) out.push_back(Perm::parse(g, degree));
  return out;
}

}  // namespace detail

inline Scenario parse_scenario(const Json& j) {
  detail::reject_unknown(j, {"schema", "name", "p", "degree", "gens_G", "gens_H", "block", "P", "Q"}, "scenario");
  detail::check_schema(j, kScenarioSchema, "scenario");
  Scenario s;
  const auto& name = detail::required(j, "name", "scenario");
  if (!name.is_string()) throw Error("scenario: name must be a string");
  s.name = name.get<std::string>();
  const std::string what = "scenario " + s.name;
  const auto& p = detail::required(j, "p", what);
  const auto& deg = detail::required(j, "degree", what);
  if (!p.is_number_unsigned() || !deg.is_number_unsigned()) throw Error(what + ": p and degree must be non-negative integers");
  s.p = p.get<std::uint32_t>();
  s.degree = deg.get<std::size_t>();
  s.gens_g = detail::cycle_list(detail::required(j, "gens_G", what), what + " gens_G");
  s.gens_h = detail::cycle_list(detail::required(j, "gens_H", what), what + " gens_H");
  if (j.contains("block")) {
    const auto& b = j.at("block");
    if (b.is_number_unsigned()) {
      s.block = b.get<std::size_t>();
    } else if (!(b.is_string() && b.get<std::string>() == "principal")) {
      throw Error(what + ": block must be an index or \"principal\"");
    }
  }
  if (j.contains("P")) {
    const auto& x = j.at("P");
    if (x.is_string()) {
      if (x.get<std::string>() != "defect") throw Error(what + ": P must be a list of cycles or \"defect\"");
    } else {
      s.p_gens = detail::cycle_list(x, what + " P");
    }
  }
  if (j.contains("Q") && !j.at("Q").is_null()) s.q_gens = detail::cycle_list(j.at("Q"), what + " Q");
  return s;
}

inline Json to_json(const Scenario& s) {
  Json j{{"schema", kScenarioSchema}, {"name", s.name}, {"p", s.p}, {"degree", s.degree}, {"gens_G", s.gens_g},
         {"gens_H", s.gens_h}};
  j["block"] = s.block ? Json(*s.block) : Json("principal");
  j["P"] = s.p_gens ? Json(*s.p_gens) : Json("defect");
  if (s.q_gens) j["Q"] = *s.q_gens;
  return j;
}

/// A pair of scenarios identified through a relabeling of points
/// (g -> pi g pi^-1); the bimodule is A itself transported along it.
struct MoritaScenario {
  std::string name;
  Scenario a;
  Scenario b;
  std::string relabel = "()";
  std::string bimodule = "identity";

  bool operator==(const MoritaScenario&) const = default;
};

inline MoritaScenario parse_morita(const Json& j) {
  detail::reject_unknown(j, {"schema", "name", "a", "b", "identification", "bimodule"}, "morita pair");
  detail::check_schema(j, kScenarioSchema, "morita pair");
  MoritaScenario m;
  m.name = detail::required(j, "name", "morita pair").get<std::string>();
  m.a = parse_scenario(detail::required(j, "a", "morita pair " + m.name));
  m.b = j.contains("b") ? parse_scenario(j.at("b")) : m.a;
  if (j.contains("identification")) {
    const auto& id = j.at("identification");
    if (id.is_string() && id.get<std::string>() == "identity") {
      m.relabel = "()";
    } else if (id.is_object()) {
      detail::reject_unknown(id, {"relabel"}, "identification");
      m.relabel = detail::required(id, "relabel", "identification").get<std::string>();
    } else {
      throw Error("morita pair " + m.name + ": identification must be \"identity\" or {\"relabel\": cycles}");
    }
  }
  if (j.contains("bimodule")) {
    m.bimodule = j.at("bimodule").get<std::string>();
    if (m.bimodule != "identity") throw Error("morita pair " + m.name + ": only the identity bimodule is supported");
  }
  return m;
}

inline Json to_json(const MoritaScenario& m) {
  Json j{{"schema", kScenarioSchema}, {"name", m.name}, {"a", to_json(m.a)}, {"b", to_json(m.b)}, {"bimodule", m.bimodule}};
  j["identification"] = m.relabel == "()" ? Json("identity") : Json{{"relabel", m.relabel}};
  return j;
}

// ---------------------------------------------------------------------------
// Reports

enum class Status { Pass, Fail, Inconclusive, Skipped, Error };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Inconclusive: return "inconclusive";
    case Status::Skipped: return "skipped";
    case Status::Error: return "error";
  }
  return "?";
}

inline Status parse_status(const std::string& s) {
  for (auto x : {Status::Pass, Status::Fail, Status::Inconclusive, Status::Skipped, Status::Error})
    if (s == to_string(x)) return x;
  throw Error("report: unknown status '" + s + "'");
}

struct Check {
  std::string name;
  Status status = Status::Pass;
  Json witness;                 ///< null when absent
  std::optional<double> millis;

  bool operator==(const Check&) const = default;
};

struct Report {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::vector<Check> checks;
  Json invariants = Json::object();

  bool operator==(const Report&) const = default;

  bool passed() const {
    for (const auto& c : checks)
      if (c.status == Status::Fail || c.status == Status::Error) return false;
    return true;
  }
  const Check* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

inline Json to_json(const Report& r) {
  Json j{{"schema", kReportSchema}};
  if (r.scenario.empty() && r.checks.empty() && r.invariants.empty() && !r.seed) return j;
  j["scenario"] = r.scenario;
  if (r.seed) j["seed"] = *r.seed;
  j["checks"] = Json::array();
  for (const auto& c : r.checks) {
    Json x{{"name", c.name}, {"status", to_string(c.status)}};
    if (!c.witness.is_null()) x["witness"] = c.witness;
    if (c.millis) x["millis"] = *c.millis;
    j["checks"].push_back(std::move(x));
  }
  j["invariants"] = r.invariants;
  return j;
}

inline Report parse_report(const Json& j) {
  detail::reject_unknown(j, {"schema", "scenario", "seed", "checks", "invariants"}, "report");
  if (!j.contains("schema") || j.at("schema") != kReportSchema) throw Error("report: unsupported schema version");
  Report r;
  if (j.contains("scenario")) r.scenario = j.at("scenario").get<std::string>();
  if (j.contains("seed")) r.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("checks"))
    for (const auto& c : j.at("checks")) {
      detail::reject_unknown(c, {"name", "status", "witness", "millis"}, "report check");
      Check x{c.at("name").get<std::string>(), parse_status(c.at("status").get<std::string>()), nullptr, std::nullopt};
      if (c.contains("witness")) x.witness = c.at("witness");
      if (c.contains("millis")) x.millis = c.at("millis").get<double>();
      r.checks.push_back(std::move(x));
    }
  if (j.contains("invariants")) r.invariants = j.at("invariants");
  return r;
}

enum class Format { Json, Text };

inline Format parse_format(const std::string& s) {
  if (s == "json") return Format::Json;
  if (s == "text") return Format::Text;
  throw Error("unknown format '" + s + "'");
}

inline std::string emit_text(const Report& r) {
  std::ostringstream out;
  out << "scenario " << r.scenario;
  if (r.seed) out << "  (seed " << *r.seed << ")";
  out << "\n";
  for (const auto& c : r.checks) {
    std::string st = to_string(c.status);
    st.resize(14, ' ');
    out << "  " << st << c.name;
    if (c.millis) out << "  [" << *c.millis << " ms]";
    if (c.status == Status::Error || c.status == Status::Skipped)
      if (c.witness.is_object() && c.witness.contains("reason")) out << "  (" << c.witness.at("reason").get<std::string>() << ")";
    out << "\n";
  }
  out << "  invariants " << r.invariants.dump() << "\n";
  out << (r.passed() ? "PASS" : "FAIL") << " " << r.scenario << "\n";
  return out.str();
}

inline std::string emit(const Report& r, Format f) {
  return f == Format::Json ? to_json(r).dump(2) + "\n" : emit_text(r);
}

inline std::string emit(const std::vector<Report>& rs, Format f, std::optional<std::uint64_t> seed = std::nullopt) {
  if (f == Format::Text) {
    std::string out;
    for (const auto& r : rs) out += emit_text(r);
    return out;
  }
  Json j{{"schema", kReportSchema}, {"reports", Json::array()}};
  if (seed) j["seed"] = *seed;
  for (const auto& r : rs) j["reports"].push_back(to_json(r));
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Witness encodings

namespace detail {

inline Json vec_json(const Vec& v) { return Json(v); }

inline Json mat_json(const Mat& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows; ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cols; ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json fusion_json(const FusionGroup& g) {
  Json out = Json::array();
  for (const auto& x : g.elements) out.push_back({{"phi", x.phi}, {"gbar", x.gbar}});
  return out;
}

inline Json equivalence_json(const FactorSetEquivalence& e) {
  Json j{{"status", e.status == SearchStatus::Found ? "found" : e.status == SearchStatus::Absent ? "absent" : "inconclusive"}};
  if (e.theta) j["theta"] = mat_json(*e.theta);
  if (!e.cochain.empty()) {
    j["cochain"] = Json::array();
    for (const auto& c : e.cochain) j["cochain"].push_back(vec_json(c));
  }
  return j;
}

inline Status status_of(SearchStatus s) {
  switch (s) {
    case SearchStatus::Found: return Status::Pass;
    case SearchStatus::Absent: return Status::Fail;
    case SearchStatus::Inconclusive: return Status::Inconclusive;
  }
  return Status::Error;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Running checks

enum class Stage { Blocks = 0, Points = 1, Fusion = 2, Clifford = 3, Verify = 4 };

inline Stage parse_stage(const std::string& s) {
  if (s == "blocks") return Stage::Blocks;
  if (s == "points") return Stage::Points;
  if (s == "fusion") return Stage::Fusion;
  if (s == "clifford") return Stage::Clifford;
  if (s == "verify") return Stage::Verify;
  throw Error("unknown stage '" + s + "'");
}

struct RunOptions {
  std::uint64_t seed = 1;
  std::size_t cap_order = kDefaultOrderCap;
  bool timing = false;
  Stage stage = Stage::Verify;

  BundleOptions bundle() const {
    BundleOptions b;
    b.seed = seed;
    b.meataxe.seed = seed;
    return b;
  }
};

struct Outcome {
  Status status = Status::Pass;
  Json witness;
};

inline Outcome verdict(bool ok, Json witness = nullptr) { return {ok ? Status::Pass : Status::Fail, std::move(witness)}; }

/// Appends checks to a report; the first error halts the run and every
/// later check is recorded as skipped.
class Recorder {
public:
  Recorder(Report& r, bool timing) : report_(r), timing_(timing) {}

  bool halted() const { return halted_; }

  bool run(const std::string& name, const std::function<Outcome()>& fn) {
    if (halted_) {
      skip(name, "an earlier stage failed");
      return false;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Check c{name, Status::Pass, nullptr, std::nullopt};
    try {
      auto o = fn();
      c.status = o.status;
      c.witness = std::move(o.witness);
    } catch (const std::exception& e) {
      c.status = Status::Error;
      c.witness = Json{{"reason", e.what()}};
      halted_ = true;
    }
    if (timing_)
      c.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    report_.checks.push_back(std::move(c));
    return !halted_;
  }

  void skip(const std::string& name, const std::string& why) {
    report_.checks.push_back({name, Status::Skipped, Json{{"reason", why}}, std::nullopt});
  }

private:
  Report& report_;
  bool timing_;
  bool halted_ = false;
};

// ---------------------------------------------------------------------------
// Resolution of a scenario

struct Resolved {
  Field field{2};
  QuotientSetup setup;
  GroupAlgebra kh;
  std::vector<BlockData> blocks;
  std::vector<BlockData> invariant;
  std::size_t selected = 0;
  std::optional<BlockExtension> ext;
};

inline PermGroup scenario_group(const std::vector<std::string>& gens, std::size_t degree, std::size_t cap) {
  return PermGroup::enumerate(degree, detail::parse_gens(gens, degree), cap);
}

/// The block extension a scenario describes, without the report plumbing.
inline BlockExtension scenario_extension(const Scenario& s, const RunOptions& opt = {}) {
  const Field f(s.p);
  auto g = scenario_group(s.gens_g, s.degree, opt.cap_order);
  auto h = scenario_group(s.gens_h, s.degree, opt.cap_order);
  if (!h.is_normal_in(g)) throw Error(s.name + ": H is not normal in G");
  const auto q = quotient(g, h);
  const auto kh = group_algebra(h, f);
  const auto inv = g_invariant_blocks(q, kh);
  const std::size_t k = s.block ? *s.block : principal_block(kh, inv);
  if (k >= inv.size() || inv[k].orbit_size != 1) throw Error(s.name + ": block selector does not give a G-invariant block");
  return block_extension(q, inv[k], f);
}

/// P and its pointed groups under study: all points of an explicit P, or
/// the first defect pointed group.
struct Subject {
  std::string label;
  PermGroup p;
  LocalContext ctx;
  std::vector<PointedGroup> pointed;
};

inline Subject resolve_subject(const BlockExtension& ext, const std::string& label,
                               const std::optional<std::vector<std::string>>& gens, const RunOptions& opt) {
  if (gens) {
    auto p = scenario_group(*gens, ext.setup.g.degree(), opt.cap_order);
    if (!p.is_subgroup_of(ext.setup.g)) throw Error(label + " is not a subgroup of G");
    if (!is_p_power(p.order(), ext.field.p())) throw Error(label + " is not a p-group");
    auto ctx = local_context(ext, p, opt.bundle().meataxe);
    auto pts = ctx.points;
    return {label, std::move(p), std::move(ctx), std::move(pts)};
  }
  auto scan = defect_pointed_groups(ext, opt.bundle().meataxe, opt.cap_order);
  if (scan.maximal.empty()) throw Error("no local pointed group found");
  const auto [k, c] = scan.maximal.front();
  auto ctx = std::move(scan.contexts[k]);
  auto pg = ctx.points[c];
  return {label, std::move(scan.subgroups[k]), std::move(ctx), {std::move(pg)}};
}

inline Json generators_json(const PermGroup& p) {
  Json out = Json::array();
  for (const auto& g : p.generators()) out.push_back(g.to_string());
  return out;
}

// ---------------------------------------------------------------------------
// The pipeline

namespace detail {

inline Outcome blocks_check(const Resolved& r) {
  const auto& a = r.kh.alg;
  const auto& f = r.field;
  bool idem = true, central = true, orth = true, prim = true;
  Vec sum(a.dim(), 0);
  Json dims = Json::array();
  const auto cs = class_sums(r.kh.group);
  for (std::size_t k = 0; k < r.blocks.size(); ++k) {
    const Vec& e = r.blocks[k].idempotent;
    dims.push_back(r.blocks[k].dim);
    idem = idem && a.mul(e, e) == e;
    for (const auto& g : r.kh.group.generators()) central = central && a.mul(e, r.kh.element(g)) == a.mul(r.kh.element(g), e);
    for (std::size_t l = 0; l < k; ++l) orth = orth && is_zero(a.mul(e, r.blocks[l].idempotent));
    std::vector<Vec> ze;
    for (const auto& z : cs) ze.push_back(a.mul(z, e));
    prim = prim && analyze(make_subalgebra(a, ze, e).alg).count() == 1;
    sum = vadd(f, sum, e);
  }
  const bool one = sum == a.unit();
  return verdict(idem && central && orth && prim && one,
                 {{"dims", dims}, {"idempotent", idem}, {"central", central}, {"orthogonal", orth}, {"primitive", prim},
                  {"sum_is_one", one}});
}

inline void run_pointed(Recorder& rec, const BlockExtension& ext, const Subject& sub, std::size_t k, const RunOptions& opt,
                        Json& inv) {
  const auto& pg = sub.pointed[k];
  const auto& ctx = sub.ctx;
  const std::string pre = sub.label + ".point" + std::to_string(pg.point) + ".";
  const auto bo = opt.bundle();
  const auto& simple = ctx.structure.simples[pg.point];
  Json info{{"subject", sub.label}, {"point", pg.point}, {"local", pg.local}, {"multiplicity", simple.matrix_size},
            {"end_degree", simple.end_degree}};

  CliffordBundle b;
  rec.run(pre + "fusion", [&] {
    b = fusion_bundle(ext, ctx, pg, bo);
    info["|E|"] = b.e.order();
    info["|F|"] = b.f.group.order();
    Status st = Status::Pass;
    if (b.f.status == SearchStatus::Inconclusive || b.scan.status == SearchStatus::Inconclusive) st = Status::Inconclusive;
    const bool same = b.f.group.elements == b.scan.group.elements && b.scan.fibres_match();
    if (st == Status::Pass && !same) st = Status::Fail;
    Json w{{"F", fusion_json(b.f.group)}, {"normalizer_order", b.scan.normalizer_order},
           {"centralizer_order", b.scan.centralizer_order}, {"witnesses", Json::array()}};
    for (const auto& u : b.f.group.witnesses) w["witnesses"].push_back(vec_json(u));
    return Outcome{st, std::move(w)};
  });
  rec.run(pre + "theta", [&] {
    Json w{{"map", b.theta.map}, {"E", fusion_json(fusion_group(b.e.actions, ext.setup.gbar))}, {"a1", Json::array()}};
    for (const auto& a : b.theta.a1) w["a1"].push_back(vec_json(a));
    return verdict(b.theta.ok() && b.e.order() == b.f.group.order(), std::move(w));
  });
  if (opt.stage < Stage::Clifford) {
    inv["pointed_groups"].push_back(std::move(info));
    return;
  }

  CliffordChecks c;
  rec.run(pre + "clifford", [&] {
    complete_bundle(ext, ctx, b, bo);
    c = check_bundle(ctx, b);
    info["dim_E"] = b.ce.cc.graded.alg.dim();
    info["dim_F"] = b.cf.graded.alg.dim();
    info["dim_residual"] = b.ebar.cc.graded.alg.dim();
    info["residual_one_dim"] = b.ebar.cc.graded.component_dim(0);
    return verdict(c.residual_kernel && c.residual_one_is_end,
                   {{"residual_kernel", c.residual_kernel}, {"residual_one_is_end", c.residual_one_is_end}});
  });
  rec.run(pre + "psi", [&] { return verdict(c.psi_iso, {{"matrix", mat_json(b.psi)}, {"degrees", b.theta.map}}); });
  rec.run(pre + "residual", [&] {
    Status st = status_of(c.residual_equiv);
    if (!c.psibar_iso) st = Status::Fail;
    return Outcome{st, {{"psibar", mat_json(b.psibar)}, {"equivalence", equivalence_json(c.residual_witness)}}};
  });
  if (pg.local) {
    rec.run(pre + "local_residual", [&] {
      Status st = status_of(*c.local_equiv);
      if (!*c.local_iso) st = Status::Fail;
      return Outcome{st, {{"map", mat_json(b.local_map)}, {"equivalence", equivalence_json(*c.local_witness)}}};
    });
  } else {
    rec.skip(pre + "local_residual", "point is not local");
  }

  if (opt.stage >= Stage::Verify && pg.local && !rec.halted()) {
    const std::pair<const char*, Vec> cuts[] = {{"one", ext.b}, {"i", pg.idempotent}, {"block_cut", point_cut(ctx, pg)}};
    for (const auto& [tag, e] : cuts) {
      rec.run(pre + "embed." + tag, [&] {
        const auto r = embed_truncate(ext, ctx, b, e, bo);
        Json w{{"i_primitive", r.i_primitive}, {"E_match", r.e_match}, {"F_match", r.f_match},
               {"verticals_iso", r.verticals_iso}, {"left_square", r.left_square}, {"right_square", r.right_square},
               {"unreduced_square", r.unreduced_square}, {"w", Json::array()}};
        for (const auto& x : r.w) w["w"].push_back(vec_json(x));
        return verdict(r.ok(), std::move(w));
      });
    }
    if (tensor_algebra_dim(ext, ext) > kTensorDimCap) {
      rec.skip(pre + "tensor_self", "A'' above the dimension cap");
    } else {
      rec.run(pre + "tensor_self", [&] {
        const auto t = tensor_diagonal_check(ext, b, ext, b, bo);
        return verdict(t.ok(), {{"|G''|", t.g_order}, {"dim_A''", t.a_dim}, {"|K|", t.k.order()}, {"|F''|", t.f2.order()},
                                {"dim_diagonal", t.diagonal_dim}, {"dim_residual", t.residual_dim}});
      });
    }
  }
  inv["pointed_groups"].push_back(std::move(info));
}

}  // namespace detail

inline Report run_scenario(const Scenario& s, const RunOptions& opt = {}) {
  Report rep{s.name, opt.seed, {}, Json::object()};
  Recorder rec(rep, opt.timing);
  Json& inv = rep.invariants;
  Resolved r;

  rec.run("groups", [&] {
    r.field = Field(s.p);
    auto g = scenario_group(s.gens_g, s.degree, opt.cap_order);
    auto h = scenario_group(s.gens_h, s.degree, opt.cap_order);
    if (!h.is_normal_in(g)) throw Error("H is not normal in G");
    r.setup = quotient(g, h);
    inv["p"] = s.p;
    inv["|G|"] = g.order();
    inv["|H|"] = h.order();
    inv["|Gbar|"] = r.setup.gbar.order();
    return verdict(true, {{"normal", true}, {"coset_reps", r.setup.reps}});
  });
  rec.run("blocks", [&] {
    r.kh = group_algebra(r.setup.h, r.field);
    r.blocks = blocks(r.kh);
    Json dims = Json::array();
    for (const auto& b : r.blocks) dims.push_back(b.dim);
    inv["block_dims"] = dims;
    return detail::blocks_check(r);
  });
  rec.run("invariant_block", [&] {
    r.invariant = g_invariant_blocks(r.setup, r.kh);
    r.selected = s.block ? *s.block : principal_block(r.kh, r.invariant);
    if (r.selected >= r.invariant.size()) throw Error("block index out of range");
    const auto& b = r.invariant[r.selected];
    if (b.orbit_size != 1) throw Error("selected block is a G-orbit sum, not a G-invariant block");
    Json orbits = Json::array();
    for (const auto& x : r.invariant) orbits.push_back({{"dim", x.dim}, {"orbit_size", x.orbit_size}});
    inv["invariant_blocks"] = orbits;
    inv["block"] = r.selected;
    inv["dim_B"] = b.dim;
    return verdict(true, {{"idempotent", detail::vec_json(b.idempotent)}});
  });
  rec.run("extension", [&] {
    r.ext = block_extension(r.setup, r.invariant[r.selected], r.field);
    const auto dims = r.ext->graded.component_dims();
    inv["dim_A"] = r.ext->a.alg.dim();
    bool ok = true;
    for (auto d : dims) ok = ok && d == r.ext->b_alg.alg.dim();
    return verdict(ok, {{"component_dims", dims}});
  });
  if (opt.stage == Stage::Blocks) return rep;

  std::vector<Subject> subjects;
  rec.run("P", [&] {
    subjects.push_back(resolve_subject(*r.ext, "P", s.p_gens, opt));
    inv["P"] = {{"order", subjects.back().p.order()}, {"gens", generators_json(subjects.back().p)}, {"defect", !s.p_gens}};
    return verdict(true, inv["P"]);
  });
  if (s.q_gens)
    rec.run("Q", [&] {
      subjects.push_back(resolve_subject(*r.ext, "Q", s.q_gens, opt));
      inv["Q"] = {{"order", subjects.back().p.order()}, {"gens", generators_json(subjects.back().p)}};
      return verdict(true, inv["Q"]);
    });
  for (const auto& sub : subjects) {
    rec.run(sub.label + ".brauer", [&] {
      const auto c = check_brauer(*r.ext, sub.ctx.fixed, sub.ctx.brauer);
      return verdict(c.ok(), {{"unital", c.unital}, {"multiplicative", c.multiplicative}, {"kills_traces", c.kills_traces},
                              {"surjective", c.surjective}, {"dim_matches", c.dim_matches}, {"dim_BP", c.dim_target},
                              {"proper_subgroups", c.proper_subgroups}});
    });
    rec.run(sub.label + ".points", [&] {
      Json pts = Json::array();
      for (const auto& pg : sub.ctx.points) pts.push_back({{"point", pg.point}, {"local", pg.local}});
      return verdict(!sub.pointed.empty(), {{"points", pts}, {"dim_fixed", sub.ctx.fixed.alg.alg.dim()}});
    });
  }
  if (opt.stage == Stage::Points) return rep;

  inv["pointed_groups"] = Json::array();
  for (const auto& sub : subjects)
    for (std::size_t k = 0; k < sub.pointed.size(); ++k) detail::run_pointed(rec, *r.ext, sub, k, opt, inv);
  // |E| and |F| of the first local pointed group of P
  for (const auto& x : inv["pointed_groups"])
    if (x["subject"] == "P" && x.value("local", false) && x.contains("|E|")) {
      inv["|E|"] = x["|E|"];
      inv["|F|"] = x["|F|"];
      break;
    }
  return rep;
}

// ---------------------------------------------------------------------------
// Morita pairs

namespace detail {

inline Perm relabel_perm(const std::string& cycles, std::size_t degree) { return Perm::parse(cycles, degree); }

inline Perm transport(const Perm& pi, const Perm& g) { return pi * g * pi.inverse(); }

inline Vec transport_vec(const GroupAlgebra& from, const GroupAlgebra& to, const Perm& pi, const Vec& x) {
  Vec y(to.group.order(), 0);
  for (std::size_t k = 0; k < x.size(); ++k)
    if (x[k]) y[to.group.index(transport(pi, from.group.element(k)))] = x[k];
  return y;
}

}  // namespace detail

inline Report verify_morita(const MoritaScenario& m, const RunOptions& opt = {}) {
  Report rep{m.name, opt.seed, {}, Json::object()};
  Recorder rec(rep, opt.timing);
  Json& inv = rep.invariants;
  const auto bo = opt.bundle();

  std::optional<BlockExtension> ea, eb;
  Perm pi;
  std::vector<std::size_t> gbar_map;
  rec.run("identification", [&] {
    if (m.a.p != m.b.p || m.a.degree != m.b.degree) throw Error("the two scenarios differ in p or degree");
    ea = scenario_extension(m.a, opt);
    eb = scenario_extension(m.b, opt);
    pi = detail::relabel_perm(m.relabel, m.a.degree);
    const auto& qa = ea->setup;
    const auto& qb = eb->setup;
    bool ok = qa.g.order() == qb.g.order() && qa.h.order() == qb.h.order();
    for (const auto& g : qa.g.elements()) ok = ok && qb.g.contains(detail::transport(pi, g));
    for (const auto& h : qa.h.elements()) ok = ok && qb.h.contains(detail::transport(pi, h));
    if (!ok) return verdict(false, {{"reason", "relabeling does not carry (G, H) onto (G', H')"}});
    for (std::size_t c = 0; c < qa.gbar.order(); ++c)
      gbar_map.push_back(qb.coset_of(detail::transport(pi, qa.g.element(qa.reps[c]))));
    const bool iso = qa.gbar.is_isomorphism(gbar_map, qb.gbar);
    const bool blocks_match = detail::transport_vec(ea->kh, eb->kh, pi, ea->block.idempotent) == eb->block.idempotent;
    inv["|Gbar|"] = qa.gbar.order();
    inv["dim_A"] = ea->a.alg.dim();
    return verdict(iso && blocks_match,
                   {{"relabel", m.relabel}, {"gbar_map", gbar_map}, {"gbar_iso", iso}, {"blocks_match", blocks_match}});
  });

  if (rep.checks.back().status != Status::Pass) {
    rec.skip("Q", "no identification");
    return rep;
  }

  // Q_delta on A, Q'_delta' on A'
  std::optional<Subject> sa;
  std::optional<LocalContext> cb;
  PermGroup qb;
  rec.run("Q", [&] {
    const auto& sel = m.a.q_gens ? m.a.q_gens : m.a.p_gens;
    sa = resolve_subject(*ea, "Q", sel, opt);
    std::vector<Perm> gens;
    for (const auto& g : sa->p.generators()) gens.push_back(detail::transport(pi, g));
    qb = PermGroup::enumerate(m.b.degree, gens, opt.cap_order);
    bool aligned = qb.order() == sa->p.order();
    for (std::size_t k = 0; aligned && k < qb.order(); ++k) aligned = qb.element(k) == detail::transport(pi, sa->p.element(k));
    if (!aligned) throw Error("Q' enumeration does not follow Q");
    cb = local_context(*eb, qb, bo.meataxe);
    inv["Q"] = {{"order", sa->p.order()}, {"gens", generators_json(sa->p)}};
    return verdict(true, {{"Q", inv["Q"]}, {"Q'", generators_json(qb)}});
  });

  inv["pointed_groups"] = Json::array();
  if (!sa) return rep;
  for (const auto& pg : sa->pointed) {
    if (!pg.local) continue;
    const std::string pre = "Q.point" + std::to_string(pg.point) + ".";
    Json info{{"point", pg.point}};
    PointedGroup pgb;
    rec.run(pre + "point", [&] {
      const Vec ib = detail::transport_vec(ea->kg, eb->kg, pi, pg.idempotent);
      const auto pt = point_of(*cb, ib);
      if (!pt) throw Error("transported idempotent is not primitive in B'^Q'");
      pgb = cb->points[*pt];
      pgb.idempotent = ib;
      info["point'"] = *pt;
      return verdict(pgb.local, {{"point'", *pt}, {"local", pgb.local}});
    });
    CliffordBundle ba, bb;
    std::vector<std::size_t> fmap;
    rec.run(pre + "fusion", [&] {
      ba = clifford_bundle(*ea, sa->ctx, pg, bo);
      bb = clifford_bundle(*eb, *cb, pgb, bo);
      const auto& fa = ba.f.group;
      const auto& fb = bb.f.group;
      bool ok = fa.order() == fb.order();
      for (std::size_t x = 0; ok && x < fa.order(); ++x) {
        const auto y = fb.find({fa.elements[x].phi, gbar_map[fa.elements[x].gbar]});
        ok = y.has_value();
        fmap.push_back(y.value_or(0));
      }
      ok = ok && fa.group.is_isomorphism(fmap, fb.group);
      info["|F|"] = fa.order();
      return verdict(ok, {{"F", detail::fusion_json(fa)}, {"F'", detail::fusion_json(fb)}, {"map", fmap}});
    });
    rec.run(pre + "residual", [&] {
      auto eq = factor_sets_equivalent(ba.fbar.fs, bb.fbar.fs, fmap);
      if (eq.status == SearchStatus::Found && !check_equivalence_witness(ba.fbar.fs, bb.fbar.fs, fmap, *eq.theta, eq.cochain))
        eq.status = SearchStatus::Absent;
      info["dim_residual"] = ba.fbar.q.graded.alg.dim();
      return Outcome{detail::status_of(eq.status), {{"equivalence", detail::equivalence_json(eq)}}};
    });
    rec.run(pre + "extended_brauer", [&] {
      auto side = [&](const BlockExtension& ext, const LocalContext& ctx, const CliffordBundle& b) {
        const auto& c = ctx.brauer.kc.group;
        return extended_brauer_group_algebra(b.e.n, c, b.lb->b_gamma.idempotent, ext.field);
      };
      const auto xa = side(*ea, sa->ctx, ba);
      const auto xb = side(*eb, *cb, bb);
      std::vector<std::size_t> emap;
      for (std::size_t d = 0; d < xa.quotient.gbar.order(); ++d)
        emap.push_back(xb.quotient.coset_of(detail::transport(pi, xa.quotient.g.element(xa.quotient.reps[d]))));
      const auto da = xa.graded.component_dims();
      const auto db = xb.graded.component_dims();
      bool ok = da.size() == db.size() && xa.quotient.gbar.is_isomorphism(emap, xb.quotient.gbar);
      for (std::size_t d = 0; ok && d < da.size(); ++d) ok = da[d] == db[emap[d]];
      info["ext_brauer_dims"] = da;
      return verdict(ok, {{"dims", da}, {"dims'", db}, {"map", emap}});
    });
    inv["pointed_groups"].push_back(std::move(info));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// The catalog

inline std::vector<Scenario> catalog() {
  std::vector<Scenario> out;
  out.push_back({"SC0", 2, 2, {"(0 1)"}, {"(0 1)"}, std::nullopt, std::nullopt, std::nullopt});
  out.push_back({"SC1", 3, 3, {"(0 1)", "(0 1 2)"}, {"(0 1 2)"}, std::nullopt, std::nullopt, std::nullopt});
  out.push_back({"SC2", 2, 4, {"(0 1)", "(0 1 2 3)"}, {"(0 1 2)", "(1 2 3)"}, std::nullopt, std::nullopt,
                 std::vector<std::string>{"(0 1)(2 3)", "(0 2)(1 3)"}});
  out.push_back({"SC3", 3, 3, {"(0 1)", "(0 1 2)"}, {"(0 1)", "(0 1 2)"}, std::nullopt, std::nullopt, std::nullopt});
  out.push_back({"SC4", 2, 4, {"(0 1)", "(0 1 2 3)"}, {"(0 1)(2 3)", "(0 2)(1 3)"}, std::nullopt,
                 std::vector<std::string>{"(0 1 2 3)", "(0 2)"}, std::nullopt});
  return out;
}

inline std::optional<Scenario> catalog_entry(const std::string& name) {
  for (auto& s : catalog())
    if (s.name == name) return s;
  return std::nullopt;
}

/// Identity pairs for every scenario, and relabeled pairs for SC1 and SC2.
inline std::vector<MoritaScenario> morita_catalog() {
  std::vector<MoritaScenario> out;
  for (const auto& s : catalog()) out.push_back({s.name + "-identity", s, s, "()", "identity"});
  auto relabeled = [](const Scenario& s, const std::string& cycles) {
    const Perm pi = Perm::parse(cycles, s.degree);
    Scenario t = s;
    t.name = s.name + "'";
    auto move = [&](std::vector<std::string>& gens) {
      for (auto& g : gens) g = detail::transport(pi, Perm::parse(g, s.degree)).to_string();
    };
    move(t.gens_g);
    move(t.gens_h);
    if (t.p_gens) move(*t.p_gens);
    if (t.q_gens) move(*t.q_gens);
    return MoritaScenario{s.name + "-relabel", s, t, cycles, "identity"};
  };
  out.push_back(relabeled(*catalog_entry("SC1"), "(0 2)"));
  out.push_back(relabeled(*catalog_entry("SC2"), "(0 1 2 3)"));
  return out;
}

/// Every catalog scenario, then every Morita pair, in a fixed order.
inline std::vector<Report> run_catalog(const RunOptions& opt, unsigned jobs = 1) {
  std::vector<std::function<Report()>> tasks;
  for (const auto& s : catalog()) tasks.push_back([s, opt] { return run_scenario(s, opt); });
  for (const auto& m : morita_catalog()) tasks.push_back([m, opt] { return verify_morita(m, opt); });
  std::vector<Report> out;
  if (jobs <= 1) {
    for (auto& t : tasks) out.push_back(t());
    return out;
  }
  std::vector<std::future<Report>> pending;
  std::size_t next = 0;
  while (next < tasks.size() || !pending.empty()) {
    while (next < tasks.size() && pending.size() < jobs) pending.push_back(std::async(std::launch::async, tasks[next++]));
    out.push_back(pending.front().get());
    pending.erase(pending.begin());
  }
  return out;
}

}  // namespace blockfusion
