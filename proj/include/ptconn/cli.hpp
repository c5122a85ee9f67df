#pragma once

// Command-line front end. run() returns the exit code and the JSON text so
// that tests can drive it without a process boundary.
//
// Exit codes: 0 all requested checks pass (for verify and class, the results
// match the fixture's expected block when it has one), 1 a check failed,
// 2 malformed input.

#include <future>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "ptconn/cover.hpp"
#include "ptconn/fixtures.hpp"
#include "ptconn/forms.hpp"
#include "ptconn/io.hpp"
#include "ptconn/omegal.hpp"
#include "ptconn/tauconn.hpp"

namespace ptconn::cli {

struct Result {
  int code = 0;
  std::string out;
};

/// A report section: the full JSON, the summary compared against expected
/// blocks, and whether its own checks passed.
struct Section {
  Json report;
  Json summary;
  bool pass = true;
};

inline Json bools(const std::vector<bool>& v) {
  Json a = Json::array();
  for (bool b : v) a.push_back(b);
  return a;
}

inline Json junction_json(const Junction& j) {
  Json o{{"module", j.module}, {"exact", j.exact}};
  if (!j.exact) {
    o["failure"] = j.failure;
    o["witness"] = {{"text", j.witness_text}, {"coords", j.witness ? vec_json(*j.witness) : Json::array()}};
  }
  return o;
}

inline Json exactness_json(const ExactnessReport& r) {
  Json a = Json::array();
  for (const auto& j : r.junctions) a.push_back(junction_json(j));
  return a;
}

inline Json sequence_charts_json(const SequenceReport& s, bool with_literal) {
  Json charts = Json::array();
  for (const auto& c : s.charts) {
    Json o{{"chart", c.chart}};
    if (with_literal) o["literal"] = exactness_json(c.literal);
    o["corrected"] = exactness_json(c.corrected);
    charts.push_back(o);
  }
  return charts;
}

inline Section validate_section(const TorsionBundle& b) {
  auto rep = validate_bundle(b);
  Json checks = Json::array();
  for (const auto& c : rep.checks) {
    Json o{{"name", c.name}, {"passed", c.passed}};
    if (!c.detail.empty()) o["detail"] = c.detail;
    checks.push_back(o);
  }
  Json r{{"valid", rep.valid}, {"degenerate", rep.degenerate}, {"degenerate_charts", rep.degenerate_charts}, {"checks", checks}};
  if (!rep.valid) r["error"] = rep.error_kind;
  return {r, {{"valid", rep.valid}, {"degenerate", rep.degenerate}}, rep.valid};
}

inline Section cover_section(const TorsionBundle& b, const CoverData& cd) {
  Json charts = Json::array();
  bool pass = true;
  for (std::size_t a = 0; a < cd.charts.size(); ++a) {
    const auto& c = cd.charts[a];
    bool free_rank = cover_as_module(c.ring).tf_rank() == b.n && cover_as_module(c.ring).invariants().torsion.empty();
    pass = pass && free_rank;
    charts.push_back({{"chart", a},
                      {"ring", c.ring.base().to_string()},
                      {"u", c.ring.u().to_string()},
                      {"v_inverse", omega_cover(c.ring, 0).render(c.v_inverse)},
                      {"free_of_rank_n", free_rank},
                      {"etale", is_etale(c.ring)}});
  }
  Json overlaps = Json::array();
  for (const auto& o : cd.overlaps) {
    pass = pass && o.iso_certified && o.transition_matches;
    overlaps.push_back({{"alpha", o.alpha}, {"beta", o.beta}, {"iso_certified", o.iso_certified}, {"transition_matches", o.transition_matches}});
  }
  auto f = factor_cover(b);
  bool certified = true, z_etale = true;
  for (std::size_t a = 0; a < cd.charts.size(); ++a) {
    certified = certified && f.certify(a, cd.charts[a].ring);
    z_etale = z_etale && is_etale(f.etale_stage[a]);
  }
  pass = pass && certified && z_etale;
  bool etale = true;
  for (const auto& c : cd.charts) etale = etale && is_etale(c.ring);
  Json fac{{"m", f.m}, {"r", f.r}, {"p^r", f.pr}, {"certified", certified}, {"etale_stage_etale", z_etale},
           {"inseparable_stage_etale", inseparable_stage_is_etale(f)}};
  Json r{{"charts", charts}, {"overlaps", overlaps}, {"factorization", fac}, {"etale", etale}};
  return {r, {{"etale", etale}, {"m", f.m}, {"r", f.r}}, pass};
}

inline Json omega_l_chart_json(const OmegaLChart& L) {
  Json gens = Json::array();
  for (std::size_t k = 0; k < L.generators.size(); ++k)
    gens.push_back({{"label", L.presentation.labels()[k]}, {"form", form_json(L.cover, L.generators[k])}});
  Json rels = Json::array();
  for (const auto& col : L.presentation.relations().columns()) rels.push_back(L.presentation.render(col) + " = 0");
  Json o{{"chart", L.chart},
         {"generators", gens},
         {"relations", rels},
         {"tf_rank", L.presentation.tf_rank()},
         {"torsion", poly_list_json(L.presentation.invariants().torsion)},
         {"ambient_tf_rank", L.ambient.tf_rank()},
         {"ambient_torsion", poly_list_json(L.ambient.invariants().torsion)}};
  if (L.degree >= 1) {
    Json s{{"literal_well_defined", L.s_literal.well_defined()}, {"corrected_well_defined", L.s_corrected.well_defined()}};
    if (auto bad = L.s_literal.ill_defined_relation()) {
      Vec rel = L.presentation.relations().column(*bad);
      s["witness"] = {{"relation", L.presentation.render(rel) + " = 0"}, {"image", L.s_literal.target.render(L.s_literal(rel))}};
    }
    o["s"] = s;
  }
  return o;
}

inline Section omega_l_section(const TorsionBundle& b, const CoverData& cd, unsigned i) {
  OmegaL L = build_omega_l(b, cd, i);
  Json charts = Json::array();
  for (const auto& c : L.charts) charts.push_back(omega_l_chart_json(c));
  Json r{{"degree", i}, {"degenerate", L.degenerate}, {"charts", charts}};
  bool pass = true;
  Json summary = Json::object();
  if (i == 1) {
    r["overlaps_certified"] = bools(L.overlap_certified);
    for (bool x : L.overlap_certified) pass = pass && x;
    auto rt = rank_torsion_report(b, cd);
    Json rtj = Json::array();
    for (const auto& c : rt) {
      pass = pass && c.strict;
      rtj.push_back({{"chart", c.chart},
                     {"tf_rank", c.tf_rank},
                     {"torsion", poly_list_json(c.torsion)},
                     {"torsion_generators", c.torsion_generators},
                     {"ambient_rank", c.ambient_rank},
                     {"du_nonzero", c.du_nonzero},
                     {"strict", c.strict},
                     {"strict_witness", c.strict_witness}});
    }
    r["rank_torsion"] = rtj;
    const auto& c0 = rt.front();
    summary = {{"tf_rank", c0.tf_rank}, {"torsion", poly_list_json(c0.torsion)}, {"ambient_rank", c0.ambient_rank},
               {"strict_witness", c0.strict_witness}};
  }
  return {r, summary, pass};
}

inline Section sequence_section(const TorsionBundle& b, const CoverData& cd, const std::string& which) {
  Json r{{"sequence", which}};
  Json summary;
  bool pass = true;
  if (which == "2.7") {
    auto s = verify_sequence(b, cd, 1);
    r["degree"] = 1;
    r["degenerate"] = s.degenerate;
    r["pattern"] = bools(s.literal_pattern());
    r["exact"] = s.literal_exact();
    if (s.degenerate) r["note"] = "omega_L vanishes, so O_X -> Omega^1_X is not injective";
    Json charts = Json::array();
    for (const auto& c : s.charts) charts.push_back({{"chart", c.chart}, {"junctions", exactness_json(c.literal)}});
    r["charts"] = charts;
    summary = {{"literal", bools(s.literal_pattern())}};
    pass = s.literal_exact();
  } else if (which == "2.10") {
    Json degs = Json::object();
    summary = Json::object();
    for (unsigned i = 1; i <= 2; ++i) {
      auto s = verify_sequence(b, cd, i);
      std::string key = "degree_" + std::to_string(i);
      degs[key] = {{"literal", {{"pattern", bools(s.literal_pattern())}, {"exact", s.literal_exact()}}},
                   {"corrected", {{"pattern", bools(s.corrected_pattern())}, {"exact", s.corrected_exact()}}},
                   {"charts", sequence_charts_json(s, true)}};
      summary[key] = {{"literal", bools(s.literal_pattern())}, {"corrected", bools(s.corrected_pattern())}};
      pass = pass && s.corrected_exact();
    }
    r["degrees"] = degs;
  } else if (which == "2.11") {
    Json degs = Json::object();
    summary = Json::object();
    for (unsigned i = 0; i <= 2; ++i) {
      auto s = verify_sequence(b, cd, i);
      std::string key = "degree_" + std::to_string(i);
      degs[key] = {{"pattern", bools(s.corrected_pattern())}, {"exact", s.corrected_exact()}, {"charts", sequence_charts_json(s, false)}};
      summary[key] = bools(s.corrected_pattern());
      pass = pass && s.corrected_exact();
    }
    auto dg = dga_check(b, cd);
    r["degrees"] = degs;
    r["dga"] = {{"stability", dg.stability},
                {"generator_table", dg.formal_table},
                {"restriction_of_d_Y", dg.restriction},
                {"d_squared_zero", dg.d_squared},
                {"sigma_chain_map", dg.sigma_chain_map},
                {"s_anticommutes", dg.s_anticommutes},
                {"s_anticommutes_corrected", dg.s_anticommutes_corrected},
                {"leibniz", dg.leibniz},
                {"failures", dg.failures}};
    summary["dga"] = dg.ok();
    pass = pass && dg.ok();
  } else {
    throw InvalidInput("unknown sequence '" + which + "'; expected 2.7, 2.10 or 2.11");
  }
  return {r, summary, pass};
}

inline Section connection_section(const TorsionBundle& b, const CoverData& cd, unsigned trials) {
  auto conn = nabla(b, cd);
  Rng rng(20240601);
  auto lb = tau_leibniz_check(conn, trials, rng);
  auto fl = flatness_check(conn);
  Json forms = Json::array();
  for (std::size_t a = 0; a < conn.forms.size(); ++a)
    forms.push_back({{"chart", a}, {"form", form_json(cd.charts[a].ring, conn.forms[a])}, {"in_omega_l", static_cast<bool>(conn.in_omega_l[a])}});
  Json compat = Json::array();
  for (const auto& e : conn.compatibility) compat.push_back({{"alpha", e.alpha}, {"beta", e.beta}, {"dlog_g", e.dlog_g}, {"ok", e.ok}});
  auto cc = check_cocycle(cech_class(conn));
  Json r{{"connection_forms", forms},
         {"compatibility", compat},
         {"leibniz", {{"trials", lb.trials}, {"ok", lb.ok}, {"failures", lb.failures}}},
         {"flatness", {{"ok", fl.ok}, {"curvature", fl.curvature}}},
         {"cocycle_conditions", cc.ok()}};
  if (b.coprime()) {
    auto cg = coprime_degeneration_check(b, cd);
    r["coprime_degeneration"] = {{"omega_l_equals_pullback", cg.same_submodule},
                                 {"sigma_injective", cg.sigma_injective},
                                 {"dlogv_equals_dlogu_over_n", cg.dlogv_matches},
                                 {"classical_matches", cg.classical_matches_tau}};
  }
  bool pass = conn.certified() && lb.ok && fl.ok && cc.ok();
  return {r, {{"leibniz", lb.ok}, {"flat", fl.ok}}, pass};
}

inline Json cocycle_json(const CechHypercocycle& c) {
  Json g = Json::object();
  for (const auto& [key, val] : c.g) g[pair_key(key.first, key.second)] = val.to_string();
  Json eta = Json::array();
  for (std::size_t a = 0; a < c.num_charts(); ++a) {
    if (c.kind == CocycleKind::Classical)
      eta.push_back(chart_form_json(c.eta_classical[a]));
    else
      eta.push_back(form_json(c.cover(a), c.eta_tau[a]));
  }
  return {{"complex", c.kind == CocycleKind::Classical ? "classical" : "tau"}, {"g", g}, {"eta", eta}};
}

inline Section class_section(const TorsionBundle& b, const CoverData& cd) {
  CechHypercocycle c = b.coprime() ? classical_connection(b) : cech_class(nabla(b, cd));
  auto cc = check_cocycle(c);
  auto tr = is_trivial_class(c);
  Json r{{"cocycle", cocycle_json(c)},
         {"cocycle_check", {{"delta_g", cc.delta_g}, {"dlog_match", cc.dlog_match}, {"closed", cc.closed}, {"in_complex", cc.in_complex}}},
         {"trivial", tr.trivial}};
  Json summary{{"trivial", tr.trivial}};
  if (tr.trivial) {
    Json w = Json::array();
    for (const auto& x : tr.witness) w.push_back(x.to_string());
    r["witness"] = w;
    summary["witness"] = w;
  } else {
    r["obstruction"] = tr.obstruction;
    r["detail"] = tr.detail;
    summary["obstruction"] = tr.obstruction;
  }
  return {r, summary, cc.ok()};
}

/// Keys of `expected` that disagree with `actual`.
inline Json mismatches(const Json& actual, const Json& expected, const std::string& prefix = "") {
  Json out = Json::array();
  if (!expected.is_object()) {
    if (actual != expected) out.push_back({{"key", prefix}, {"expected", expected}, {"actual", actual}});
    return out;
  }
  for (const auto& [k, v] : expected.items()) {
    std::string key = prefix.empty() ? k : prefix + "." + k;
    if (!actual.is_object() || !actual.contains(k)) {
      out.push_back({{"key", key}, {"expected", v}, {"actual", nullptr}});
      continue;
    }
    for (auto& m : mismatches(actual.at(k), v, key)) out.push_back(m);
  }
  return out;
}

/// Attaches the expected-block comparison for `section_key`; returns the exit code.
inline int finish(Json& out, const Fixture& f, const std::string& section_key, const Section& s, bool compare) {
  if (compare && f.expected.contains(section_key)) {
    Json mm = mismatches(s.summary, f.expected.at(section_key));
    out["expected"] = f.expected.at(section_key);
    out["matches_expected"] = mm.empty();
    if (!mm.empty()) out["mismatches"] = mm;
    return mm.empty() ? 0 : 1;
  }
  return s.pass ? 0 : 1;
}

inline Json full_report(const Fixture& f, bool& all_match) {
  Json r{{"fixture", f.name}};
  auto v = validate_section(f.bundle);
  r["validate"] = v.report;
  Json actual{{"valid", v.summary["valid"]}, {"degenerate", v.summary["degenerate"]}};
  if (!v.pass) {
    all_match = false;
    r["matches_expected"] = false;
    return r;
  }
  CoverData cd = build_cover(f.bundle);
  auto cov = cover_section(f.bundle, cd);
  auto om = omega_l_section(f.bundle, cd, 1);
  auto s27 = sequence_section(f.bundle, cd, "2.7");
  auto s210 = sequence_section(f.bundle, cd, "2.10");
  auto s211 = sequence_section(f.bundle, cd, "2.11");
  auto con = connection_section(f.bundle, cd, 200);
  auto cls = class_section(f.bundle, cd);
  r["cover"] = cov.report;
  r["omega_l_1"] = om.report;
  r["sequence_2.7"] = s27.report;
  r["sequence_2.10"] = s210.report;
  r["sequence_2.11"] = s211.report;
  r["connection"] = con.report;
  r["class"] = cls.report;
  actual["cover"] = cov.summary;
  actual["omega_l_1"] = om.summary;
  actual["sequence_2.7"] = s27.summary;
  actual["sequence_2.10"] = s210.summary;
  actual["sequence_2.11"] = s211.summary;
  actual["connection"] = con.summary;
  actual["class"] = cls.summary;
  bool ok;
  if (!f.expected.empty()) {
    Json mm = mismatches(actual, f.expected);
    ok = mm.empty();
    r["matches_expected"] = ok;
    if (!ok) r["mismatches"] = mm;
  } else {
    ok = cov.pass && s210.pass && con.pass && cls.pass;
    r["checks_pass"] = ok;
  }
  all_match = all_match && ok;
  return r;
}

inline Json error_json(const std::string& kind, const std::string& msg) { return {{"error", kind}, {"message", msg}}; }

inline std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
  if (dynamic_cast<const NotAUnit*>(&e)) return "NotAUnit";
  if (dynamic_cast<const InvalidCocycle*>(&e)) return "InvalidCocycle";
  if (dynamic_cast<const UnsupportedField*>(&e)) return "UnsupportedField";
  if (dynamic_cast<const NotCoprime*>(&e)) return "NotCoprime";
  if (dynamic_cast<const GluingFailure*>(&e)) return "GluingFailure";
  if (dynamic_cast<const InvalidInput*>(&e)) return "InvalidInput";
  return "Error";
}

inline Result run(const std::vector<std::string>& args) {
  CLI::App app{"Verification tool for p-torsion line bundles and their partial connections", "ptconn"};
  app.require_subcommand(1);
  std::string fixture, json_file, out_file, sequence;
  unsigned degree = 1, trials = 200;
  bool all = false;

  auto add_input = [&](CLI::App* sc) {
    sc->add_option("--fixture", fixture, "catalog fixture name");
    sc->add_option("--json", json_file, "bundle or fixture JSON file");
    sc->add_option("--out", out_file, "write the JSON report to this file");
  };
  auto* validate = app.add_subcommand("validate", "check the cocycle data");
  auto* cover = app.add_subcommand("cover", "build and factor the cover, report etaleness");
  auto* omega = app.add_subcommand("omega-l", "build Omega^i_L");
  auto* verify = app.add_subcommand("verify", "check an exact sequence");
  auto* connection = app.add_subcommand("connection", "the connection, Leibniz rule and flatness");
  auto* klass = app.add_subcommand("class", "cocycle of the class and triviality");
  auto* catalog = app.add_subcommand("catalog", "list fixtures");
  auto* report = app.add_subcommand("report", "full pipeline");
  for (auto* sc : {validate, cover, omega, verify, connection, klass, report}) add_input(sc);
  catalog->add_option("--out", out_file, "write the JSON report to this file");
  omega->add_option("--degree", degree, "form degree (0, 1 or 2)")->required()->check(CLI::Range(0u, 2u));
  verify->add_option("--sequence", sequence, "2.7, 2.10 or 2.11")->required()->check(CLI::IsMember({"2.7", "2.10", "2.11"}));
  connection->add_option("--trials", trials, "random sections per chart for the Leibniz check");
  report->add_flag("--all", all, "every catalog fixture");

  Result res;
  auto emit = [&](const Json& j, int code) {
    std::string text = j.dump(2) + "\n";
    if (!out_file.empty()) {
      std::ofstream o(out_file);
      if (!o) return Result{2, error_json("InvalidInput", "cannot write " + out_file).dump(2) + "\n"};
      o << text;
      return Result{code, ""};
    }
    return Result{code, text};
  };

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    return {0, app.help()};
  } catch (const CLI::ParseError& e) {
    return {2, error_json("UsageError", e.what()).dump(2) + "\n"};
  }

  try {
    if (catalog->parsed()) {
      Json list = Json::array();
      for (const auto& name : catalog_names()) {
        Fixture f = load_fixture(name);
        list.push_back({{"name", f.name}, {"description", f.description}, {"bundle", bundle_to_json(f.bundle)}});
      }
      return emit({{"catalog_dir", catalog_dir()}, {"fixtures", list}}, 0);
    }

    if (report->parsed() && all) {
      auto names = catalog_names();
      std::vector<std::future<std::pair<Json, bool>>> jobs;
      for (const auto& name : names)
        jobs.push_back(std::async(std::launch::async, [name] {
          bool ok = true;
          Fixture f = load_fixture(name);
          Json r = full_report(f, ok);
          return std::make_pair(r, ok);
        }));
      Json fixtures = Json::array();
      bool ok = true;
      for (auto& j : jobs) {
        auto [r, m] = j.get();
        fixtures.push_back(r);
        ok = ok && m;
      }
      return emit({{"fixtures", fixtures}, {"all_match", ok}}, ok ? 0 : 1);
    }

    if (fixture.empty() == json_file.empty()) return {2, error_json("UsageError", "give exactly one of --fixture or --json").dump(2) + "\n"};
    Fixture f;
    bool compare = true;
    if (!fixture.empty()) {
      f = load_fixture(fixture);
    } else {
      Json j = read_json_file(json_file);
      if (j.contains("bundle")) {
        f = fixture_from_json(j);
      } else {
        f = Fixture{"input", "", bundle_from_json(j), Json::object()};
        compare = false;
      }
    }
    Json out{{"fixture", f.name}};

    if (validate->parsed()) {
      auto s = validate_section(f.bundle);
      out.update(s.report);
      return emit(out, s.pass ? 0 : 1);
    }
    if (report->parsed()) {
      bool ok = true;
      Json r = full_report(f, ok);
      return emit(r, ok ? 0 : 1);
    }

    CoverData cd = build_cover(f.bundle);
    Section s;
    std::string key;
    if (cover->parsed()) {
      s = cover_section(f.bundle, cd);
      key = "cover";
    } else if (omega->parsed()) {
      s = omega_l_section(f.bundle, cd, degree);
      key = degree == 1 ? "omega_l_1" : "";
    } else if (verify->parsed()) {
      s = sequence_section(f.bundle, cd, sequence);
      key = "sequence_" + sequence;
    } else if (connection->parsed()) {
      s = connection_section(f.bundle, cd, trials);
      key = "connection";
    } else if (klass->parsed()) {
      s = class_section(f.bundle, cd);
      key = "class";
    }
    out.update(s.report);
    int code = finish(out, f, key, s, compare && !key.empty());
    if (code == 0 && !s.pass && !(verify->parsed() || klass->parsed())) code = 1;
    return emit(out, code);
  } catch (const Error& e) {
    return {2, error_json(error_kind(e), e.what()).dump(2) + "\n"};
  } catch (const nlohmann::json::exception& e) {
    return {2, error_json("InvalidInput", e.what()).dump(2) + "\n"};
  }
}

}  // namespace ptconn::cli
