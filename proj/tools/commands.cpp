#include "commands.hpp"

#include <chrono>
#include <functional>
#include <sstream>

namespace refine::cli {

RandomBounds parse_bounds(const std::string& s) {
  RandomBounds b;
  std::size_t v[3];
  std::istringstream in(s);
  char comma = 0;
  if (!(in >> v[0] >> comma >> v[1] >> comma >> v[2]) || !in.eof())
    throw LoadError("--bounds expects T,D,hom, e.g. 3,6,3");
  b.max_T_objects = v[0];
  b.max_D_objects = v[1];
  b.max_hom = v[2];
  return b;
}

std::vector<std::string> suite_names() {
  return {"laws", "ff", "preservation", "factorization", "genday", "duality", "negative-encoding", "notnot-tensor",
          "rapp"};
}

Json report_json(const CheckReport& r, bool timing) {
  Json j;
  j["name"] = r.name;
  j["anchor"] = r.anchor;
  j["ok"] = r.ok();
  j["attempted"] = r.attempted;
  j["passed"] = r.passed;
  j["failed"] = r.failed;
  j["skipped"] = r.skipped;
  j["skip_reasons"] = r.skip_reasons;
  j["notes"] = r.notes;
  j["counterexample"] = r.counterexample ? Json(*r.counterexample) : Json(nullptr);
  if (timing) j["seconds"] = r.seconds;
  return j;
}

namespace {

ObjId refinement(const RefinementSystem& t, const std::string& name) {
  auto P = t.D().find_object(name);
  if (!P) throw LoadError("unknown refinement '" + name + "'");
  return *P;
}

ObjId base_object(const RefinementSystem& t, const std::string& name) {
  auto B = t.T().find_object(name);
  if (!B) throw LoadError("unknown type '" + name + "'");
  return *B;
}

MorId base_morphism(const RefinementSystem& t, const std::string& name) {
  auto c = t.T().find_morphism(name);
  if (!c) throw LoadError("unknown base morphism '" + name + "'");
  return *c;
}

Json category_json(const FinCategory& C) {
  Json j;
  Json objects = Json::array();
  for (std::size_t a = 0; a < C.object_count(); ++a) objects.push_back(C.object_name(static_cast<ObjId>(a)));
  Json morphisms = Json::array();
  for (std::size_t f = 0; f < C.morphism_count(); ++f) {
    MorId ff = static_cast<MorId>(f);
    morphisms.push_back({{"name", C.morphism_name(ff)}, {"dom", C.object_name(C.dom(ff))},
                         {"cod", C.object_name(C.cod(ff))}});
  }
  j["objects"] = objects;
  j["morphisms"] = morphisms;
  return j;
}

std::string category_text(const FinCategory& C) {
  std::ostringstream os;
  os << "objects " << C.object_count() << "\n";
  for (std::size_t a = 0; a < C.object_count(); ++a) os << "  " << C.object_name(static_cast<ObjId>(a)) << "\n";
  os << "morphisms " << C.morphism_count() << "\n";
  for (std::size_t f = 0; f < C.morphism_count(); ++f) {
    MorId ff = static_cast<MorId>(f);
    os << "  " << C.morphism_name(ff) << " : " << C.object_name(C.dom(ff)) << " -> " << C.object_name(C.cod(ff))
       << "\n";
  }
  return os.str();
}

std::string counted(std::size_t n, const std::string& word) {
  return std::to_string(n) + " " + word + (n == 1 ? "" : "s");
}

std::string sizes(const FinCategory& C) {
  return counted(C.object_count(), "object") + ", " + counted(C.morphism_count(), "morphism");
}

/// Element counts per base object, with the labels when present.
void presheaf_out(const Presheaf& p, std::ostringstream& os, Json& j) {
  const auto& C = p.base();
  Json objs = Json::array();
  for (std::size_t a = 0; a < C.object_count(); ++a) {
    ObjId aa = static_cast<ObjId>(a);
    Json o{{"object", C.object_name(aa)}, {"count", p.count(aa)}};
    if (p.count(aa) == 0) {
      objs.push_back(o);
      continue;
    }
    os << "  " << C.object_name(aa) << ": " << p.count(aa);
    if (p.has_labels()) {
      Json labels = Json::array();
      for (Elem x = 0; x < p.count(aa); ++x) {
        os << (x ? " " : " {") << p.label(aa, x);
        labels.push_back(p.label(aa, x));
      }
      os << "}";
      o["elements"] = labels;
    }
    os << "\n";
    objs.push_back(o);
  }
  os << "  total " << p.total() << "\n";
  j["objects"] = objs;
  j["total"] = p.total();
}

Result finish(Result r, const std::string& command, const SystemEntry* e) {
  Json j;
  j["command"] = command;
  if (e) j["system"] = e->name;
  for (auto& [k, v] : r.json.items()) j[k] = v;
  j["exit"] = r.code;
  r.json = std::move(j);
  return r;
}

}  // namespace

Result cmd_validate(const Workspace& ws, const Options&) {
  Result r;
  std::ostringstream os;
  Json cats = Json::array();
  for (const auto& [name, C] : ws.categories) {
    os << "category " << name << ": " << sizes(*C) << "\n";
    cats.push_back({{"name", name}, {"objects", C->object_count()}, {"morphisms", C->morphism_count()}});
  }
  Json funs = Json::array();
  for (const auto& [name, F] : ws.functors) {
    os << "functor " << name << ": " << sizes(*F.source) << " mapped\n";
    funs.push_back({{"name", name}});
  }
  Json systems = Json::array();
  for (const auto& name : ws.system_order) {
    const auto& e = ws.systems.at(name);
    const auto& t = *e.system;
    os << "refsys " << name;
    if (!e.from.builder.empty()) os << " (" << e.from.builder << ")";
    os << ": D " << sizes(t.D()) << "; T " << sizes(t.T()) << "\n";
    systems.push_back({{"name", name},
                       {"builder", e.from.builder},
                       {"D", {{"objects", t.D().object_count()}, {"morphisms", t.D().morphism_count()}}},
                       {"T", {{"objects", t.T().object_count()}, {"morphisms", t.T().morphism_count()}}}});
  }
  Json pshs = Json::array();
  for (const auto& [name, p] : ws.presheaves) {
    os << "presheaf " << name << ": " << counted(p.presheaf.total(), "element") << " over "
       << counted(p.presheaf.base().object_count(), "object") << "\n";
    pshs.push_back({{"name", name}, {"total", p.presheaf.total()}});
  }
  os << "ok\n";
  r.text = os.str();
  r.json = {{"categories", cats}, {"functors", funs}, {"systems", systems}, {"presheaves", pshs}};
  return finish(std::move(r), "validate", nullptr);
}

Result cmd_derive(const Workspace& ws, const Options& o, const std::string& P, const std::string& c,
                  const std::string& Q) {
  const auto& e = ws.system(o.system);
  const auto& t = *e.system;
  Judgment j{refinement(t, P), base_morphism(t, c), refinement(t, Q)};
  if (t.T().dom(j.c) != t.over(j.P) || t.T().cod(j.c) != t.over(j.Q))
    throw LoadError("ill-typed judgment " + P + " --" + c + "--> " + Q);
  Result r;
  auto ds = derivations(t, j);
  std::ostringstream os;
  Json names = Json::array();
  if (ds.empty()) {
    os << "no derivations\n";
  } else {
    os << ds.size() << " derivation" << (ds.size() == 1 ? "" : "s") << " of " << describe(t, j) << "\n";
    for (MorId a : ds) {
      os << "  " << t.D().morphism_name(a) << "\n";
      names.push_back(t.D().morphism_name(a));
    }
  }
  r.text = os.str();
  r.json = {{"judgment", describe(t, j)}, {"derivations", names}};
  return finish(std::move(r), "derive", &e);
}

Result cmd_slice(const Workspace& ws, const Options& o, const std::string& B, bool coslice) {
  const auto& e = ws.system(o.system);
  ObjId b = base_object(*e.system, B);
  RepresentationContext ctx(e.system);
  auto S = coslice ? ctx.neg().slice(b) : ctx.pos().slice(b);
  Result r;
  r.text = category_text(*S->category);
  r.json = {{"base", B}, {"category", category_json(*S->category)}};
  return finish(std::move(r), coslice ? "coslice" : "slice", &e);
}

Result cmd_represent(const Workspace& ws, const Options& o, const std::string& X, bool negative) {
  const auto& e = ws.system(o.system);
  const auto& t = *e.system;
  ObjId x = refinement(t, X);
  RepresentationContext ctx(e.system);
  auto rep = negative ? ctx.neg().rep(x) : ctx.pos().rep(x);
  const auto& S = *rep->slice;
  Result r;
  std::ostringstream os;
  os << (negative ? "[[" : "<") << X << (negative ? "]]" : ">") << " over "
     << counted(S.category->object_count(), "object") << "\n";
  Json objs = Json::array();
  std::size_t total = 0;
  for (std::size_t a = 0; a < S.objects.size(); ++a) {
    const auto& els = rep->elements[a];
    total += els.size();
    if (els.empty()) continue;
    Json names = Json::array();
    os << "  " << S.category->object_name(static_cast<ObjId>(a)) << ":";
    for (MorId m : els) {
      os << " " << t.D().morphism_name(m);
      names.push_back(t.D().morphism_name(m));
    }
    os << "\n";
    objs.push_back({{"object", S.category->object_name(static_cast<ObjId>(a))}, {"elements", names}});
  }
  os << "  total " << total << "\n";
  r.text = os.str();
  r.json = {{"refinement", X}, {"side", negative ? "negative" : "positive"}, {"objects", objs}, {"total", total}};
  return finish(std::move(r), "represent", &e);
}

Result cmd_lift(const Workspace& ws, const Options& o, const std::string& c, const std::string& X, bool push) {
  const auto& e = ws.system(o.system);
  const auto& t = *e.system;
  MorId cc = base_morphism(t, c);
  ObjId x = refinement(t, X);
  if ((push ? t.T().dom(cc) : t.T().cod(cc)) != t.over(x))
    throw LoadError(X + " does not lie over the " + (push ? "domain" : "codomain") + " of " + c);
  auto cert = push ? find_pushforward(t, cc, x) : find_pullback(t, cc, x);
  Result r;
  std::ostringstream os;
  const char* what = push ? "pushforward" : "pullback";
  if (!cert) {
    os << "no " << what << " of " << X << " along " << c << "\n";
    r.json = {{"lift", nullptr}};
  } else {
    os << what << " of " << X << " along " << c << ": " << t.D().object_name(cert->candidate) << "\n"
       << "  structural " << t.D().morphism_name(cert->structural) << "\n"
       << "  factorings checked " << cert->factorings << "\n";
    r.json = {{"lift",
               {{"candidate", t.D().object_name(cert->candidate)},
                {"structural", t.D().morphism_name(cert->structural)},
                {"factorings", cert->factorings}}}};
  }
  r.text = os.str();
  return finish(std::move(r), what, &e);
}

Result cmd_dual(const Workspace& ws, const Options& o, const std::string& X, bool left) {
  const auto& e = ws.system(o.system);
  const auto& t = *e.system;
  DualityContext ctx(e.system, o.der_fault);
  Result r;
  std::ostringstream os;
  Json j;
  auto p = ws.presheaves.find(X);
  if (p != ws.presheaves.end()) {
    const auto& pe = p->second;
    auto want = left ? PresheafEntry::Over::slice : PresheafEntry::Over::coslice;
    if (pe.system != e.name || pe.over != want)
      throw LoadError("presheaf '" + X + "' is not over a " + (left ? "slice" : "coslice") + " of " + e.name);
    auto S = left ? ctx.slice(pe.B) : ctx.coslice(pe.B);
    std::vector<std::vector<Elem>> action;
    for (std::size_t f = 0; f < S->category->morphism_count(); ++f) action.push_back(pe.presheaf.action(static_cast<MorId>(f)));
    Presheaf phi(S->category, pe.presheaf.counts(), std::move(action));
    auto d = left ? dual_left(ctx, pe.B, phi, o.jobs) : dual_right(ctx, pe.B, phi, o.jobs);
    os << (left ? "left" : "right") << " dual of " << X << "\n";
    presheaf_out(d.presheaf, os, j);
  } else {
    ObjId x = refinement(t, X);
    ObjId B = t.over(x);
    const auto& rep = left ? ctx.reps().pos().rep(x)->presheaf : ctx.reps().neg().rep(x)->presheaf;
    auto d = left ? dual_left(ctx, B, rep, o.jobs) : dual_right(ctx, B, rep, o.jobs);
    const auto& other = left ? ctx.reps().neg().rep(x)->presheaf : ctx.reps().pos().rep(x)->presheaf;
    bool iso = vertical_iso_psh(d.presheaf, other).has_value();
    os << (left ? "left dual of <" : "right dual of [[") << X << (left ? ">" : "]]") << "\n";
    presheaf_out(d.presheaf, os, j);
    os << "  isomorphic to " << (left ? "[[" : "<") << X << (left ? "]]" : ">") << ": " << (iso ? "yes" : "no")
       << "\n";
    j["isomorphic_to_representation"] = iso;
  }
  r.text = os.str();
  j["input"] = X;
  j["side"] = left ? "left" : "right";
  r.json = j;
  return finish(std::move(r), "dual", &e);
}

namespace {

CheckReport hypothesis_unmet(const std::string& name, const std::string& anchor, const std::string& why) {
  CheckReport r(name, anchor);
  r.skip("hypothesis unmet: " + why);
  return r;
}

CheckReport laws(const SystemEntry& e, const Workspace& ws) {
  CheckReport r("laws", "categories, functors and fixture data are lawful");
  const auto& t = *e.system;
  auto expect_ok = [&](const ValidationReport& v, const std::string& what) {
    r.expect(v.ok(), [&] { return what + ": " + v.violations.front(); });
  };
  expect_ok(validate_category(t.D()), "D");
  expect_ok(validate_category(t.T()), "T");
  expect_ok(validate_functor(t.functor()), "t");
  if (e.monoidal) {
    expect_ok(validate_monoidal(t, *e.monoidal), "monoidal structure");
    for (const auto& w : e.monoids) expect_ok(validate_monoid(*e.monoidal, w), "monoid on " + t.T().object_name(w.W));
  }
  if (e.linctx) {
    expect_ok(validate_multicategory(e.linctx->spec), "multicategory");
    for (const auto& d : e.linctx->spec.tensors) expect_ok(validate_left_rule(e.linctx->spec, d), "left rule");
  }
  for (const auto& [name, p] : ws.presheaves)
    if (p.system == e.name) expect_ok(validate_presheaf(p.presheaf), "presheaf " + name);
  return r;
}

CheckReport hoare_transformers(const HoareFixture& h) {
  CheckReport r("hoare transformers", "images and preimages are the certified lifts");
  const auto& t = *h.system;
  for (std::size_t c = 0; c < t.T().morphism_count(); ++c) {
    MorId cc = static_cast<MorId>(c);
    for (std::size_t P = 0; P < t.D().object_count(); ++P) {
      ObjId PP = static_cast<ObjId>(P);
      auto sp = hoare_sp(h, cc, PP);
      auto cert = find_pushforward(t, cc, PP);
      r.expect(sp.has_value() == cert.has_value() && (!sp || vertical_iso(t, *sp, cert->candidate)), [&] {
        return "image of " + t.D().object_name(PP) + " under " + t.T().morphism_name(cc) +
               " is not the certified pushforward";
      });
      auto wp = hoare_wp(h, cc, PP);
      auto pb = find_pullback(t, cc, PP);
      r.expect(wp.has_value() == pb.has_value() && (!wp || vertical_iso(t, *wp, pb->candidate)), [&] {
        return "preimage of " + t.D().object_name(PP) + " under " + t.T().morphism_name(cc) +
               " is not the certified pullback";
      });
    }
  }
  return r;
}

std::vector<CheckReport> run_suite(const Workspace& ws, const SystemEntry& e, const Options& o,
                                   const std::string& suite, const DualityContext& dctx) {
  const auto& ctx = dctx.reps();
  std::vector<CheckReport> out;
  auto timed = [&](const std::function<CheckReport()>& f) {
    auto t0 = std::chrono::steady_clock::now();
    CheckReport r = f();
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(r));
  };
  if (suite == "laws") {
    timed([&] { return laws(e, ws); });
    timed([&] { return pullpush_laws_check(*e.system); });
    if (e.hoare) {
      timed([&] { return hoare_transformers(*e.hoare); });
      timed([&] { return is_fibration(*e.system); });
      timed([&] { return is_opfibration(*e.system); });
    }
    if (e.adjunction) timed([&] { return adjunction_check(*e.adjunction); });
  } else if (suite == "ff") {
    timed([&] { return representation_ff_check(ctx, o.jobs); });
  } else if (suite == "preservation") {
    timed([&] { return preservation_check(ctx); });
  } else if (suite == "factorization") {
    timed([&] { return factorization_check(ctx, o.jobs); });
  } else if (suite == "genday") {
    if (!e.monoidal) {
      timed([&] { return hypothesis_unmet("genday", "strong preservation of the logical structure",
                                          "no monoidal structure"); });
    } else {
      timed([&] { return genday_check_all(ctx, *e.monoidal); });
      for (const auto& w : e.monoids) timed([&] { return monoid_lax_check(ctx, *e.monoidal, w); });
    }
  } else if (suite == "duality") {
    timed([&] { return duality_check_all(dctx, o.jobs); });
    timed([&] { return extranat_check(dctx); });
    timed([&] {
      CheckReport r("dual adjunction", "dualization operators form a contravariant adjunction");
      absorb_indexed(r, e.system->T().object_count(), o.jobs,
                     [&](std::size_t B) { return dual_adjunction_check(dctx, static_cast<ObjId>(B)); });
      return r;
    });
    if (o.cross_check) timed([&] { return dual_cross_check(dctx, o.size_guard); });
  } else if (suite == "negative-encoding") {
    timed([&] { return negative_encoding_check_all(dctx); });
    timed([&] { return notpush_check_all(dctx); });
    if (e.linctx)
      for (const auto& d : e.linctx->spec.tensors) timed([&] { return tensor_left_check(*e.linctx, dctx, d); });
  } else if (suite == "notnot-tensor") {
    if (!e.monoidal) {
      timed([&] { return hypothesis_unmet("double dual tensor", "fiber tensors are represented up to double dualization",
                                          "no monoidal structure"); });
    } else {
      for (const auto& w : e.monoids) timed([&] { return notnottensor_check_all(dctx, *e.monoidal, w); });
    }
  } else if (suite == "rapp") {
    if (!e.adjunction) {
      timed([&] { return hypothesis_unmet("adjoint rules", "right adjoints preserve pullbacks", "no adjunction"); });
    } else {
      timed([&] { return rapp_check_all(*e.adjunction); });
      timed([&] { return lapp_check_all(*e.adjunction); });
    }
  } else {
    throw LoadError("unknown suite '" + suite + "'");
  }
  return out;
}

}  // namespace

Result cmd_verify(const Workspace& ws, const Options& o, const std::string& suite) {
  const auto& e = ws.system(o.system);
  std::vector<std::string> suites;
  if (suite == "all") {
    suites = suite_names();
  } else {
    auto names = suite_names();
    if (std::find(names.begin(), names.end(), suite) == names.end()) throw LoadError("unknown suite '" + suite + "'");
    suites = {suite};
  }
  DualityContext dctx(e.system, o.der_fault);
  Result r;
  std::ostringstream os;
  Json reports = Json::array();
  std::size_t failed = 0;
  std::size_t count = 0;
  for (const auto& s : suites) {
    for (const auto& rep : run_suite(ws, e, o, s, dctx)) {
      os << "[" << s << "] " << format_report(rep, o.timing);
      Json jr = report_json(rep, o.timing);
      jr["suite"] = s;
      reports.push_back(jr);
      ++count;
      failed += !rep.ok();
    }
  }
  os << "verify " << suite << " on " << e.name << ": " << counted(count, "check") << ", " << failed << " failed\n";
  r.code = failed ? 1 : 0;
  r.text = os.str();
  r.json = {{"suite", suite}, {"reports", reports}, {"failed", failed}};
  return finish(std::move(r), "verify", &e);
}

Result cmd_fixtures_gen(const Options& o, const std::string& name) {
  Workspace ws;
  load_text(ws, fixture_source(name, o.seed, o.bounds), "<" + name + ">");
  const auto& e = ws.system();
  Result r;
  r.text = emit_system(e);
  r.json = {{"fixture", name}, {"source", r.text}};
  return finish(std::move(r), "fixtures gen", &e);
}

}  // namespace refine::cli
