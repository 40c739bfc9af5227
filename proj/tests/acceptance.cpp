// Acceptance run: one PASS/FAIL line per criterion.
//
//   refine_acceptance --fixtures DIR --refine EXE [--only N]

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oracles.hpp"
#include "refine/duality.hpp"
#include "refine/fixtures.hpp"
#include "workspace.hpp"

using namespace refine;
using refine::cli::SystemEntry;
using refine::cli::Workspace;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> facts;
  std::string failure;

  void require(bool cond, const std::string& what) {
    if (!cond && pass) {
      pass = false;
      failure = what;
    }
  }
  void report(const CheckReport& r, const std::string& where) {
    std::string what = where + ": " + r.name + " failed " + std::to_string(r.failed) + " of " +
                       std::to_string(r.attempted);
    if (r.counterexample) what += " (" + *r.counterexample + ")";
    require(r.ok(), what);
  }
  void fact(std::string f) { facts.push_back(std::move(f)); }
};

struct Env {
  std::filesystem::path fixtures;
  std::string refine;
  std::vector<std::string> shipped{"hoare", "linear", "lattice", "galois", "terminal", "twoderiv"};

  SystemEntry load(const std::string& name) const {
    Workspace ws;
    cli::load_file(ws, (fixtures / (name + ".rfs")).string());
    return ws.system();
  }
};

std::string fmt(std::size_t n) { return std::to_string(n); }

// Functor categories near the default guard take minutes to enumerate.
constexpr std::size_t kCrossGuard = 300;

// ---------------------------------------------------------------------------

// Oracle counts of derivations against families in both representations.
void compare_counts(const SysPtr& t, Outcome& out, std::size_t& judgments, std::size_t& unbounded) {
  RepresentationContext ctx(t);
  const auto& D = t->D();
  const auto& T = t->T();
  for (std::size_t c = 0; c < T.morphism_count(); ++c) {
    MorId m = static_cast<MorId>(c);
    auto pos = ctx.pos().action(m);
    auto neg = ctx.neg().action(m);
    for (ObjId P : t->fiber(T.dom(m)))
      for (ObjId Q : t->fiber(T.cod(m))) {
        std::size_t ders = oracle::count_derivations(*t, P, m, Q);
        PulledView pq(pos, ctx.pos().rep(Q)->presheaf);
        PulledView np(neg, ctx.neg().rep(P)->presheaf);
        auto a = oracle::count_families(ctx.pos().rep(P)->presheaf, pq);
        auto b = oracle::count_families(ctx.neg().rep(Q)->presheaf, np);
        ++judgments;
        if (!a || !b) {
          ++unbounded;
          continue;
        }
        out.require(*a == ders && *b == ders, t->name() + ": " + describe(*t, {P, m, Q}) + " has " + fmt(ders) +
                                                  " derivations but " + fmt(*a) + " and " + fmt(*b) + " families");
      }
  }
}

Outcome criterion_ff(const Env& env) {
  Outcome out;
  std::size_t judgments = 0, unbounded = 0, attempted = 0;
  std::vector<SysPtr> systems{env.load("hoare").system};
  for (std::uint64_t seed = 0; seed < 200; ++seed) systems.push_back(random_refsys(seed, {3, 6, 3}));
  for (const auto& t : systems) {
    auto r = representation_ff_check(RepresentationContext(t));
    out.report(r, t->name());
    attempted += r.attempted;
    compare_counts(t, out, judgments, unbounded);
  }
  out.require(unbounded == 0, fmt(unbounded) + " judgments exceeded the oracle budget");
  out.fact("Hoare + 200 random systems");
  out.fact(fmt(attempted) + " bijection instances");
  out.fact(fmt(judgments) + " judgments oracle-counted");
  return out;
}

Outcome criterion_preservation(const Env& env) {
  Outcome out;
  std::size_t lifts = 0, isos = 0;
  for (const auto& name : env.shipped) {
    auto e = env.load(name);
    const auto& t = *e.system;
    RepresentationContext ctx(e.system);
    auto r = preservation_check(ctx);
    out.report(r, name);
    isos += r.passed;
    for (std::size_t c = 0; c < t.T().morphism_count(); ++c) {
      MorId m = static_cast<MorId>(c);
      for (ObjId Q : t.fiber(t.T().cod(m))) {
        auto cert = find_pullback(t, m, Q);
        if (!cert) continue;
        ++lifts;
        auto pulled = pull_psh(ctx.pos().action(m), ctx.pos().rep(Q)->presheaf);
        out.require(vertical_iso_psh(pulled, ctx.pos().rep(cert->candidate)->presheaf).has_value(),
                    name + ": <c*Q> is not pull_<c> <Q> for " + t.D().object_name(Q));
      }
      for (ObjId P : t.fiber(t.T().dom(m))) {
        auto cert = find_pushforward(t, m, P);
        if (!cert) continue;
        ++lifts;
        auto pulled = pull_psh(ctx.neg().action(m), ctx.neg().rep(P)->presheaf);
        out.require(vertical_iso_psh(pulled, ctx.neg().rep(cert->candidate)->presheaf).has_value(),
                    name + ": [[c!P]] is not pull_[[c]] [[P]] for " + t.D().object_name(P));
      }
    }
  }
  out.require(lifts > 0 && isos > 0, "no certified lifts");
  out.fact(fmt(lifts) + " certified lifts re-checked");
  out.fact(fmt(isos) + " preservation instances");
  return out;
}

Outcome criterion_duality(const Env& env) {
  Outcome out;
  for (const auto& name : env.shipped) {
    auto e = env.load(name);
    auto r = duality_check_all(DualityContext(e.system));
    out.report(r, name);
    out.require(r.skipped == 0, name + ": skipped instances");
    std::size_t n = e.system->D().object_count();
    out.require(r.passed >= 4 * n, name + ": fewer instances than refinements");
    if (e.linctx) out.require(e.linctx->trunc.K == 3, "linear fixture is not truncated at K=3");
    out.fact(name + " " + fmt(n) + " refinements");
  }
  return out;
}

Outcome criterion_negative(const Env& env) {
  Outcome out;
  for (const char* name : {"hoare", "lattice"}) {
    auto e = env.load(name);
    DualityContext ctx(e.system);
    auto r = negative_encoding_check_all(ctx);
    out.report(r, name);
    std::size_t pushes = 0;
    const auto& t = *e.system;
    for (std::size_t c = 0; c < t.T().morphism_count(); ++c)
      for (ObjId P : t.fiber(t.T().dom(static_cast<MorId>(c)))) pushes += find_pushforward(t, static_cast<MorId>(c), P).has_value();
    out.require(r.passed == 2 * pushes && r.skipped == 0, std::string(name) + ": " + fmt(r.passed) +
                                                              " encodings for " + fmt(pushes) + " pushforwards");
    out.fact(std::string(name) + " " + fmt(pushes) + " pushforwards");
  }
  auto lin = env.load("linear");
  if (!lin.linctx || lin.linctx->spec.tensors.empty()) {
    out.require(false, "linear fixture has no tensor");
    return out;
  }
  const auto& fx = *lin.linctx;
  const auto& decl = fx.spec.tensors.front();
  DualityContext ctx(lin.system);
  out.report(tensor_left_check(fx, ctx, decl), "linear");
  const auto& t = *lin.system;
  MorId mu = fx.one.multiplication;
  ObjId one = t.T().cod(mu);
  auto pair = fx.context({decl.left, decl.right});
  auto single = fx.context({decl.tensor});
  auto S = ctx.slice(one);
  ObjId gamma = S->find(*single, t.T().identity(one));
  auto push = push_psh(ctx.reps().pos().action(mu), ctx.reps().pos().rep(*pair)->presheaf);
  auto rep = ctx.reps().pos().rep(*single);
  std::size_t pushed = push.presheaf.count(gamma);
  std::size_t represented = rep->presheaf.count(gamma);
  out.require(pushed == 0 && represented > 0, "no emptiness gap at the tensor context");
  out.require(!vertical_iso_psh(push.presheaf, rep->presheaf), "single pushforward is already representable");
  auto dl = dual_left(ctx, one, push.presheaf);
  auto drl = dual_right(ctx, one, dl.presheaf);
  out.require(vertical_iso_psh(drl.presheaf, rep->presheaf).has_value(), "double dual is not <A*B>");
  out.fact("linear at (A*B, id): push " + fmt(pushed) + ", <A*B> " + fmt(represented) + ", double dual " +
           fmt(drl.presheaf.count(gamma)));
  return out;
}

Outcome criterion_genday(const Env& env) {
  Outcome out;
  auto e = env.load("lattice");
  RepresentationContext ctx(e.system);
  const auto& M = *e.monoidal;
  auto r = genday_check_all(ctx, M);
  out.report(r, "lattice");
  std::size_t n = e.system->D().object_count();
  out.require(r.attempted >= 3 * n * n * n && r.skipped == 0, "not every triple was checked");
  std::size_t opc = 0;
  for (std::size_t P = 0; P < n; ++P)
    for (std::size_t Q = 0; Q < n; ++Q) {
      ObjId p = static_cast<ObjId>(P), q = static_cast<ObjId>(Q);
      auto day = day_product(ctx.pos(), M, e.system->over(p), e.system->over(q));
      auto md = m_derivation(ctx.pos(), M, day, p, q);
      auto check = opcartesian_check(md.source, md.target->presheaf, md.derivation,
                                     default_universal_tests(md.target->slice->category, md.target->presheaf));
      out.report(check, "lattice m-derivation");
      opc += check.passed;
    }
  out.fact(fmt(n * n * n) + " triples");
  out.fact(fmt(r.passed) + " clause instances");
  out.fact(fmt(opc) + " factoring tests");
  return out;
}

Outcome criterion_rapp(const Env& env) {
  Outcome out;
  auto e = env.load("galois");
  const auto& adj = *e.adjunction;
  out.report(adjunction_check(adj), "galois");
  auto r = rapp_check_all(adj);
  out.report(r, "galois");
  out.report(lapp_check_all(adj), "galois");
  const auto& b = *adj.F.target;
  const auto& t = *adj.G.target;
  std::size_t pulls = 0;
  for (std::size_t c = 0; c < b.T().morphism_count(); ++c) {
    MorId m = static_cast<MorId>(c);
    for (ObjId Q : b.fiber(b.T().cod(m))) {
      auto cert = find_pullback(b, m, Q);
      if (!cert) continue;
      ++pulls;
      out.require(certify_pullback(t, adj.G.on_term(m), adj.G.on_object(Q), adj.G.on_derivation(cert->structural))
                      .has_value(),
                  "G of the pullback of " + b.D().object_name(Q) + " along " + b.T().morphism_name(m) +
                      " is not a pullback");
    }
  }
  out.require(pulls > 0 && r.passed > 0, "no pullbacks to transport");
  out.fact(fmt(pulls) + " pullbacks");
  out.fact(fmt(r.passed) + " rule and chain instances");
  return out;
}

// Corpus presheaves over a base: representables and small constants.
std::vector<Presheaf> corpus(const CatPtr& C) {
  std::vector<Presheaf> out;
  for (std::size_t a = 0; a < C->object_count(); ++a) out.push_back(representable(C, static_cast<ObjId>(a)));
  for (std::size_t n = 0; n < 3; ++n) out.push_back(constant_psh(C, n));
  return out;
}

void certify_push(const FunctorData& F, const PresheafView& phi, Outcome& out, std::size_t& pushes,
                  std::size_t& tests, const std::string& where) {
  auto p = push_psh(F, phi);
  auto r = opcartesian_check(phi, p.presheaf, p.structural, default_universal_tests(F.target, p.presheaf));
  out.report(r, where);
  out.require(validate_presheaf(p.presheaf).ok(), where + ": pushforward is not a presheaf");
  ++pushes;
  tests += r.passed;
}

Outcome criterion_engine(const Env& env) {
  Outcome out;
  std::size_t pushes = 0, tests = 0, bases = 0;
  std::vector<SysPtr> systems;
  for (const auto& name : env.shipped) systems.push_back(env.load(name).system);
  for (std::uint64_t seed = 0; seed < 30; ++seed) systems.push_back(random_refsys(seed, {3, 6, 3}));
  for (const auto& sys : systems) {
    RepresentationContext ctx(sys);
    const auto& T = sys->T();
    for (std::size_t c = 0; c < T.morphism_count(); ++c) {
      MorId m = static_cast<MorId>(c);
      for (int side = 0; side < 2; ++side) {
        const auto& cache = side == 0 ? ctx.pos() : ctx.neg();
        auto F = cache.action(m);
        if (F.source->object_count() > 4 || F.target->object_count() > 4) continue;
        ++bases;
        ObjId from = side == 0 ? T.dom(m) : T.cod(m);
        for (ObjId P : sys->fiber(from))
          certify_push(F, cache.rep(P)->presheaf, out, pushes, tests, sys->name());
        for (std::size_t n = 0; n < 2; ++n)
          certify_push(F, constant_psh(F.source, n), out, pushes, tests, sys->name());
      }
    }
  }
  // every functor between small corpus bases
  std::vector<CatPtr> cats{terminal_category(), discrete_category(2), poset_category(chain_poset(2, "a")),
                           poset_category(chain_poset(3, "b")), poset_category(powerset_poset({"x", "y"})),
                           env.load("hoare").system->T_ptr()};
  for (const auto& A : cats)
    for (const auto& C : cats)
      enumerate_functors(A, C, 40, [&](const FunctorData& F) {
        ++bases;
        for (const auto& phi : corpus(A)) certify_push(F, phi, out, pushes, tests, "corpus");
      });
  out.fact(fmt(pushes) + " pushforwards over " + fmt(bases) + " functors");
  out.fact(fmt(tests) + " universal tests");

  std::size_t guarded = 0;
  std::vector<SysPtr> cross{env.load("lattice").system, env.load("galois").system, env.load("terminal").system};
  for (std::uint64_t seed = 0; seed < 30; ++seed) cross.push_back(random_refsys(seed, {3, 6, 3}));
  for (const auto& sys : cross) {
    auto r = dual_cross_check(DualityContext(sys), kCrossGuard);
    out.report(r, sys->name());
    guarded += r.passed;
  }
  out.require(guarded >= 10, "only " + fmt(guarded) + " guarded cross-check instances");
  out.fact(fmt(guarded) + " cross-checked duals under guard " + fmt(kCrossGuard));
  return out;
}

Outcome criterion_hoare(const Env& env) {
  Outcome out;
  auto e = env.load("hoare");
  const auto& h = *e.hoare;
  const auto& t = *e.system;
  // oracle side: states s0, s1; swap and set0 as state maps
  auto monoid = oracle::transformer_monoid(2, {{1, 0}, {0, 0}});
  std::vector<std::uint64_t> subsets{0b00, 0b01, 0b10, 0b11};
  std::size_t guarded = 0;
  for (auto P : subsets)
    for (const auto& c : monoid) guarded += oracle::triple(c, P, 0b01);
  std::uint64_t sp = oracle::image({0, 0}, 0b11);
  std::uint64_t wp = oracle::preimage({0, 0}, 0b10);

  out.require(t.T().morphism_count() == monoid.size(),
              "monoid has " + fmt(t.T().morphism_count()) + " elements, oracle " + fmt(monoid.size()));
  auto s0 = t.D().find_object("{s0}");
  auto top = t.D().find_object("{s0,s1}");
  auto s1 = t.D().find_object("{s1}");
  auto set0 = t.T().find_morphism("set0");
  if (!s0 || !top || !s1 || !set0) {
    out.require(false, "fixture lacks {s0}, {s1}, {s0,s1} or set0");
    return out;
  }
  auto rep = pos_rep(e.system, *s0);
  out.require(rep.presheaf.total() == guarded, "|<{s0}>| = " + fmt(rep.presheaf.total()) + ", oracle " + fmt(guarded));
  auto push = find_pushforward(t, *set0, *top);
  out.require(push && h.predicates[push->candidate] == sp, "sp(set0, {s0,s1}) disagrees with the image");
  auto pull = find_pullback(t, *set0, *s1);
  out.require(pull && h.predicates[pull->candidate] == wp, "wp(set0, {s1}) disagrees with the preimage");
  out.require(monoid.size() == 4 && guarded == 9 && sp == 0b01 && wp == 0, "oracle values off the expected figures");
  out.fact("monoid " + fmt(t.T().morphism_count()));
  out.fact("|<{s0}>| " + fmt(rep.presheaf.total()));
  if (push) out.fact("sp " + t.D().object_name(push->candidate));
  if (pull) out.fact("wp " + t.D().object_name(pull->candidate));
  return out;
}

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& cmd) {
  Run r;
  FILE* p = popen((cmd + " 2>&1").c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

Outcome criterion_determinism(const Env& env) {
  Outcome out;
  auto f = [&](const std::string& name) { return " -f '" + (env.fixtures / (name + ".rfs")).string() + "'"; };
  std::vector<std::string> commands{
      "validate" + f("hoare") + f("lattice"),
      "derive" + f("hoare") + " '{s0}' swap '{s0}'",
      "derive" + f("hoare") + " '{s0,s1}' set0 '{s0}'",
      "slice" + f("hoare") + " W",
      "coslice" + f("lattice") + " c1",
      "represent" + f("hoare") + " --pos '{s0}'",
      "represent" + f("linear") + " --neg A",
      "pushforward" + f("hoare") + " set0 '{s0,s1}'",
      "pullback" + f("hoare") + " set0 '{s1}'",
      "dual" + f("hoare") + " --left '{s0}'",
      "dual" + f("lattice") + " --right '{a}'",
      "verify" + f("hoare") + " all",
      "verify" + f("lattice") + " all",
      "verify" + f("galois") + " all",
      "verify" + f("twoderiv") + " all",
      "verify" + f("linear") + " ff",
      "verify --cross-check" + f("lattice") + " duality",
      "--inject-fault der-action verify" + f("twoderiv") + " duality",
      "--seed 11 fixtures gen random",
      "fixtures gen linear",
  };
  std::size_t compared = 0;
  for (const auto& c : commands) {
    for (const char* json : {"", "--json "}) {
      std::string base = "'" + env.refine + "' " + json;
      auto a = run(base + c);
      auto b = run(base + c);
      auto p = run(base + "--jobs 4 " + c);
      out.require(a.code == 0 || a.code == 1, c + " exited " + fmt(static_cast<std::size_t>(a.code)));
      out.require(a.out == b.out && a.code == b.code, c + " differs between runs");
      out.require(a.out == p.out && a.code == p.code, c + " differs between --jobs 1 and 4");
      ++compared;
    }
  }
  // in-process parallel reports
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto sys = random_refsys(seed, {3, 6, 3});
    RepresentationContext ctx(sys);
    out.require(format_report(representation_ff_check(ctx, 1), false) ==
                    format_report(representation_ff_check(ctx, 3), false),
                "ff report depends on jobs for seed " + std::to_string(seed));
    DualityContext dctx(sys);
    out.require(format_report(duality_check_all(dctx, 1), false) == format_report(duality_check_all(dctx, 3), false),
                "duality report depends on jobs for seed " + std::to_string(seed));
  }
  out.fact(fmt(compared) + " command outputs compared across 3 runs");
  return out;
}

struct Criterion {
  int id;
  std::string title;
  std::function<Outcome(const Env&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  Env env;
  std::string fixtures;
  int only = 0;
  app.add_option("--fixtures", fixtures, "Directory of shipped fixtures")->required();
  app.add_option("--refine", env.refine, "Path to the refine executable")->required();
  app.add_option("--only", only, "Run a single criterion");
  CLI11_PARSE(app, argc, argv);
  env.fixtures = fixtures;

  std::vector<Criterion> all{
      {1, "representation bijection", criterion_ff},
      {2, "pullback and negative preservation", criterion_preservation},
      {3, "duality theorem", criterion_duality},
      {4, "negative encodings", criterion_negative},
      {5, "Day-style embedding", criterion_genday},
      {6, "right adjoints preserve pullbacks", criterion_rapp},
      {7, "presheaf engine oracles", criterion_engine},
      {8, "Hoare spot checks", criterion_hoare},
      {9, "determinism", criterion_determinism},
  };
  int failed = 0;
  for (const auto& c : all) {
    if (only && c.id != only) continue;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(env);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream line;
    line << (o.pass ? "PASS" : "FAIL") << " " << c.id << " " << c.title;
    std::string sep = " [";
    for (const auto& f : o.facts) {
      line << sep << f;
      sep = "; ";
    }
    if (!o.facts.empty()) line << "]";
    if (!o.pass) line << " -- " << o.failure;
    std::fprintf(stdout, "%s (%.1fs)\n", line.str().c_str(), s);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
