#include "refine/refsys.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace refine {

RefinementSystem::RefinementSystem(FunctorData t, std::string name) : name_(std::move(name)), t_(std::move(t)) {
  if (!t_.source || !t_.target) throw StructuralError("refinement system without categories");
  auto r = validate_functor(t_);
  if (!r.ok()) throw StructuralError("refinement system functor invalid: " + r.violations.front());
  fibers_.assign(t_.target->object_count(), {});
  for (std::size_t P = 0; P < t_.source->object_count(); ++P) fibers_[t_.object_map[P]].push_back(static_cast<ObjId>(P));
}

SysPtr make_system(FunctorData t, std::string name) {
  return std::make_shared<const RefinementSystem>(std::move(t), std::move(name));
}

SysPtr opposite_system(const RefinementSystem& t) {
  auto d = opposite(t.D_ptr());
  auto b = opposite(t.T_ptr());
  return make_system(opposite_functor(t.functor(), d, b), t.name().empty() ? "" : t.name() + "^op");
}

SysPtr identity_system(const CatPtr& T) { return make_system(identity_functor(T), "id"); }

SysPtr terminal_system(const CatPtr& D) {
  auto one = terminal_category();
  return make_system(constant_functor(D, one, 0), "!");
}

void check_judgment(const RefinementSystem& t, const Judgment& j) {
  if (j.P < 0 || static_cast<std::size_t>(j.P) >= t.D().object_count() || j.Q < 0 ||
      static_cast<std::size_t>(j.Q) >= t.D().object_count() || j.c < 0 ||
      static_cast<std::size_t>(j.c) >= t.T().morphism_count()) {
    throw StructuralError("judgment index out of range");
  }
  if (t.over(j.P) != t.T().dom(j.c) || t.over(j.Q) != t.T().cod(j.c)) {
    throw StructuralError("malformed judgment " + t.D().object_name(j.P) + " =>_" + t.T().morphism_name(j.c) + " " +
                          t.D().object_name(j.Q) + ": fiber mismatch");
  }
}

bool is_subtyping(const RefinementSystem& t, const Judgment& j) { return t.T().is_identity(j.c); }

std::string describe(const RefinementSystem& t, const Judgment& j) {
  return "(" + t.D().object_name(j.P) + ", " + t.T().morphism_name(j.c) + ", " + t.D().object_name(j.Q) + ")";
}

std::vector<MorId> derivations(const RefinementSystem& t, const Judgment& j) {
  check_judgment(t, j);
  std::vector<MorId> out;
  for (MorId a : t.D().hom(j.P, j.Q))
    if (t.image(a) == j.c) out.push_back(a);
  return out;
}

std::size_t count_derivations(const RefinementSystem& t, const Judgment& j) {
  check_judgment(t, j);
  std::size_t n = 0;
  for (MorId a : t.D().hom(j.P, j.Q)) n += t.image(a) == j.c;
  return n;
}

bool has_derivation(const RefinementSystem& t, const Judgment& j) {
  check_judgment(t, j);
  for (MorId a : t.D().hom(j.P, j.Q))
    if (t.image(a) == j.c) return true;
  return false;
}

Derivation compose_rule(const RefinementSystem& t, const Derivation& d1, const Derivation& d2) {
  if (d1.judgment.Q != d2.judgment.P) throw StructuralError("compose_rule: non-composable derivations");
  Judgment j{d1.judgment.P, t.T().compose(d1.judgment.c, d2.judgment.c), d2.judgment.Q};
  MorId a = t.D().compose(d1.alpha, d2.alpha);
  if (t.image(a) != j.c) throw StructuralError("compose_rule: image of composite differs from composite of images");
  return {j, a};
}

std::optional<std::pair<MorId, MorId>> vertical_iso(const RefinementSystem& t, ObjId P, ObjId Q) {
  ObjId a = t.over(P);
  if (t.over(Q) != a) throw StructuralError("vertical_iso: refinements of different types");
  MorId id = t.T().identity(a);
  auto there = derivations(t, {P, id, Q});
  auto back = derivations(t, {Q, id, P});
  for (MorId f : there)
    for (MorId g : back)
      if (t.D().compose(f, g) == t.D().identity(P) && t.D().compose(g, f) == t.D().identity(Q)) return std::pair{f, g};
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Lift search. A view reads the system either directly or as its opposite, so
// pushforwards are computed as pullbacks without building t^op.

namespace {

struct View {
  const RefinementSystem& t;
  bool op;

  std::span<const MorId> hom_D(ObjId a, ObjId b) const { return op ? t.D().hom(b, a) : t.D().hom(a, b); }
  std::span<const MorId> hom_T(ObjId a, ObjId b) const { return op ? t.T().hom(b, a) : t.T().hom(a, b); }
  MorId comp_D(MorId f, MorId g) const { return op ? t.D().compose(g, f) : t.D().compose(f, g); }
  MorId comp_T(MorId f, MorId g) const { return op ? t.T().compose(g, f) : t.T().compose(f, g); }
  ObjId dom_D(MorId f) const { return op ? t.D().cod(f) : t.D().dom(f); }
  ObjId cod_D(MorId f) const { return op ? t.D().dom(f) : t.D().cod(f); }
  ObjId dom_T(MorId f) const { return op ? t.T().cod(f) : t.T().dom(f); }
  ObjId cod_T(MorId f) const { return op ? t.T().dom(f) : t.T().cod(f); }
};

std::optional<std::size_t> cartesian(const View& v, MorId c, ObjId Q, MorId s) {
  const auto& t = v.t;
  if (t.image(s) != c || v.cod_D(s) != Q) return std::nullopt;
  const ObjId X = v.dom_D(s);
  const ObjId A = v.dom_T(c);
  std::size_t factorings = 0;
  std::map<MorId, std::vector<MorId>> by_image;
  std::map<MorId, std::size_t> target_count;
  for (std::size_t R = 0; R < t.D().object_count(); ++R) {
    by_image.clear();
    target_count.clear();
    for (MorId delta : v.hom_D(R, X)) by_image[t.image(delta)].push_back(delta);
    for (MorId beta : v.hom_D(R, Q)) ++target_count[t.image(beta)];
    for (MorId d : v.hom_T(t.over(R), A)) {
      ++factorings;
      MorId dc = v.comp_T(d, c);
      auto it = target_count.find(dc);
      std::size_t want = it == target_count.end() ? 0 : it->second;
      auto jt = by_image.find(d);
      if (jt == by_image.end()) {
        if (want != 0) return std::nullopt;
        continue;
      }
      if (jt->second.size() != want) return std::nullopt;
      std::set<MorId> images;
      for (MorId delta : jt->second) images.insert(v.comp_D(delta, s));
      if (images.size() != want) return std::nullopt;
    }
  }
  return factorings;
}

std::optional<LiftCertificate> search(const View& v, MorId c, ObjId Q, LiftDirection dir) {
  const auto& t = v.t;
  for (ObjId X : t.fiber(v.dom_T(c))) {
    for (MorId s : v.hom_D(X, Q)) {
      if (t.image(s) != c) continue;
      if (auto n = cartesian(v, c, Q, s)) return LiftCertificate{dir, c, Q, X, s, *n};
    }
  }
  return std::nullopt;
}

std::optional<MorId> factor(const View& v, const LiftCertificate& cert, MorId beta, MorId d) {
  const auto& t = v.t;
  if (t.image(beta) != v.comp_T(d, cert.c) || v.cod_D(beta) != cert.subject) return std::nullopt;
  for (MorId delta : v.hom_D(v.dom_D(beta), cert.candidate)) {
    if (t.image(delta) == d && v.comp_D(delta, cert.structural) == beta) return delta;
  }
  return std::nullopt;
}

}  // namespace

std::optional<LiftCertificate> certify_pullback(const RefinementSystem& t, MorId c, ObjId Q, MorId structural) {
  View v{t, false};
  auto n = cartesian(v, c, Q, structural);
  if (!n) return std::nullopt;
  return LiftCertificate{LiftDirection::pullback, c, Q, v.dom_D(structural), structural, *n};
}

std::optional<LiftCertificate> certify_pushforward(const RefinementSystem& t, MorId c, ObjId P, MorId structural) {
  View v{t, true};
  auto n = cartesian(v, c, P, structural);
  if (!n) return std::nullopt;
  return LiftCertificate{LiftDirection::pushforward, c, P, v.dom_D(structural), structural, *n};
}

bool replay(const RefinementSystem& t, const LiftCertificate& cert) {
  View v{t, cert.direction == LiftDirection::pushforward};
  if (v.dom_D(cert.structural) != cert.candidate) return false;
  if (t.over(cert.candidate) != v.dom_T(cert.c)) return false;
  auto n = cartesian(v, cert.c, cert.subject, cert.structural);
  return n && *n == cert.factorings;
}

std::optional<LiftCertificate> find_pullback(const RefinementSystem& t, MorId c, ObjId Q) {
  if (t.over(Q) != t.T().cod(c)) throw StructuralError("find_pullback: Q does not refine cod(c)");
  return search(View{t, false}, c, Q, LiftDirection::pullback);
}

std::optional<LiftCertificate> find_pushforward(const RefinementSystem& t, MorId c, ObjId P) {
  if (t.over(P) != t.T().dom(c)) throw StructuralError("find_pushforward: P does not refine dom(c)");
  return search(View{t, true}, c, P, LiftDirection::pushforward);
}

std::optional<MorId> pullback_factor(const RefinementSystem& t, const LiftCertificate& cert, MorId beta, MorId d) {
  return factor(View{t, false}, cert, beta, d);
}

std::optional<MorId> pushforward_factor(const RefinementSystem& t, const LiftCertificate& cert, MorId gamma,
                                        MorId d) {
  return factor(View{t, true}, cert, gamma, d);
}

// ---------------------------------------------------------------------------
// Laws

namespace {

using LiftTable = std::vector<std::vector<std::optional<LiftCertificate>>>;  // [c][subject]

LiftTable lift_table(const RefinementSystem& t, bool push) {
  LiftTable table(t.T().morphism_count(), std::vector<std::optional<LiftCertificate>>(t.D().object_count()));
  for (std::size_t c = 0; c < t.T().morphism_count(); ++c) {
    ObjId a = push ? t.T().dom(c) : t.T().cod(c);
    for (ObjId X : t.fiber(a)) table[c][X] = push ? find_pushforward(t, c, X) : find_pullback(t, c, X);
  }
  return table;
}

void lift_laws(const RefinementSystem& t, const LiftTable& lift, bool push, CheckReport& r) {
  const auto& T = t.T();
  const char* tag = push ? "push" : "pull";
  for (std::size_t c = 0; c < T.morphism_count(); ++c) {
    ObjId a = push ? T.dom(c) : T.cod(c);
    auto fib = t.fiber(a);
    MorId id = T.identity(a);
    for (ObjId X1 : fib) {
      for (ObjId X2 : fib) {
        if (!has_derivation(t, {X1, id, X2})) continue;
        const auto& l1 = lift[c][X1];
        const auto& l2 = lift[c][X2];
        if (!l1 || !l2) continue;
        r.expect(has_derivation(t, {l1->candidate, T.identity(push ? T.cod(c) : T.dom(c)), l2->candidate}), [&] {
          return std::string(tag) + " monotonicity fails along " + T.morphism_name(c) + " for " +
                 t.D().object_name(X1) + " <= " + t.D().object_name(X2);
        });
      }
    }
  }
  for (std::size_t a = 0; a < T.object_count(); ++a) {
    MorId id = T.identity(a);
    for (ObjId X : t.fiber(a)) {
      const auto& l = lift[id][X];
      r.expect(l && vertical_iso(t, l->candidate, X).has_value(), [&] {
        return std::string(tag) + " along identity of " + T.object_name(a) + " not isomorphic to " +
               t.D().object_name(X);
      });
    }
  }
  // pull: (d;c)*Q = d*(c*Q); push: (c;d)!P = d!(c!P)
  for (std::size_t f = 0; f < T.morphism_count(); ++f) {
    for (MorId g : T.outgoing(T.cod(f))) {
      MorId first = push ? static_cast<MorId>(f) : g;  // applied first
      MorId second = push ? g : static_cast<MorId>(f);
      MorId composite = T.compose(static_cast<MorId>(f), g);
      ObjId a = push ? T.dom(first) : T.cod(first);
      for (ObjId X : t.fiber(a)) {
        const auto& whole = lift[composite][X];
        const auto& step1 = lift[first][X];
        if (!whole || !step1) continue;
        const auto& step2 = lift[second][step1->candidate];
        if (!step2) continue;
        r.expect(vertical_iso(t, whole->candidate, step2->candidate).has_value(), [&] {
          return std::string(tag) + " composite law fails for " + T.morphism_name(f) + ";" + T.morphism_name(g) +
                 " at " + t.D().object_name(X);
        });
      }
    }
  }
}

}  // namespace

CheckReport pullpush_laws_check(const RefinementSystem& t) {
  CheckReport r("laws", "pullback and pushforward laws");
  auto pulls = lift_table(t, false);
  auto pushes = lift_table(t, true);
  for (const auto& row : pulls)
    for (const auto& cert : row)
      if (cert) r.expect(replay(t, *cert), [&] { return "pullback certificate does not replay"; });
  for (const auto& row : pushes)
    for (const auto& cert : row)
      if (cert) r.expect(replay(t, *cert), [&] { return "pushforward certificate does not replay"; });
  lift_laws(t, pulls, false, r);
  lift_laws(t, pushes, true, r);
  return r;
}

CheckReport is_fibration(const RefinementSystem& t) {
  CheckReport r("fibration", "pullbacks exist for all compatible pairs");
  for (std::size_t c = 0; c < t.T().morphism_count(); ++c) {
    for (ObjId Q : t.fiber(t.T().cod(c))) {
      r.expect(find_pullback(t, c, Q).has_value(), [&] {
        return "no pullback of " + t.D().object_name(Q) + " along " + t.T().morphism_name(c);
      });
    }
  }
  return r;
}

CheckReport is_opfibration(const RefinementSystem& t) {
  CheckReport r("opfibration", "pushforwards exist for all compatible pairs");
  for (std::size_t c = 0; c < t.T().morphism_count(); ++c) {
    for (ObjId P : t.fiber(t.T().dom(c))) {
      r.expect(find_pushforward(t, c, P).has_value(), [&] {
        return "no pushforward of " + t.D().object_name(P) + " along " + t.T().morphism_name(c);
      });
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Morphisms

ValidationReport validate_morphism(const RefSysMorphism& m) {
  ValidationReport r;
  auto fd = validate_functor(m.FD);
  auto ft = validate_functor(m.FT);
  for (auto& v : fd.violations) r.add("F_D: " + v);
  for (auto& v : ft.violations) r.add("F_T: " + v);
  if (!r.ok()) return r;
  const auto& t = *m.source;
  const auto& b = *m.target;
  for (std::size_t P = 0; P < t.D().object_count(); ++P) {
    if (m.FT.on_object(t.over(P)) != b.over(m.FD.on_object(P))) {
      r.add("square fails on object " + t.D().object_name(P));
      return r;
    }
  }
  for (std::size_t a = 0; a < t.D().morphism_count(); ++a) {
    if (m.FT.on_morphism(t.image(a)) != b.image(m.FD.on_morphism(a))) {
      r.add("square fails on morphism " + t.D().morphism_name(a));
      return r;
    }
  }
  return r;
}

RefSysMorphism identity_morphism(const SysPtr& t) {
  return {t, t, identity_functor(t->D_ptr()), identity_functor(t->T_ptr())};
}

RefSysMorphism opposite_morphism(const RefSysMorphism& m, const SysPtr& source_op, const SysPtr& target_op) {
  return {source_op, target_op, opposite_functor(m.FD, source_op->D_ptr(), target_op->D_ptr()),
          opposite_functor(m.FT, source_op->T_ptr(), target_op->T_ptr())};
}

CheckReport fully_faithful_check(const RefSysMorphism& m) {
  CheckReport r("fully-faithful", "induced typing rule is invertible");
  const auto& t = *m.source;
  const auto& b = *m.target;
  std::map<MorId, std::vector<MorId>> by_term;
  for (std::size_t P = 0; P < t.D().object_count(); ++P) {
    for (std::size_t Q = 0; Q < t.D().object_count(); ++Q) {
      by_term.clear();
      for (MorId a : t.D().hom(P, Q)) by_term[t.image(a)].push_back(a);
      for (MorId c : t.T().hom(t.over(P), t.over(Q))) {
        auto it = by_term.find(c);
        std::set<MorId> images;
        std::size_t n = 0;
        if (it != by_term.end()) {
          n = it->second.size();
          for (MorId a : it->second) images.insert(m.FD.on_morphism(a));
        }
        Judgment fj{m.FD.on_object(P), m.FT.on_morphism(c), m.FD.on_object(Q)};
        std::size_t target = count_derivations(b, fj);
        r.expect(images.size() == n && n == target, [&] {
          Judgment j{static_cast<ObjId>(P), c, static_cast<ObjId>(Q)};
          return describe(t, j) + ": " + std::to_string(n) + " derivations map to " + std::to_string(images.size()) +
                 " distinct of " + std::to_string(target) + " at " + describe(b, fj) +
                 (images.size() != n ? " (not injective)" : " (not surjective)");
        });
      }
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Adjunctions

RefSysAdjunction identity_adjunction(const SysPtr& t) {
  auto F = identity_morphism(t);
  auto idD = identity_functor(t->D_ptr());
  auto idT = identity_functor(t->T_ptr());
  auto comps = [](const CatPtr& c) {
    std::vector<MorId> v;
    for (std::size_t a = 0; a < c->object_count(); ++a) v.push_back(c->identity(a));
    return v;
  };
  NatTransData uD{idD, idD, comps(t->D_ptr())};
  NatTransData uT{idT, idT, comps(t->T_ptr())};
  return {F, F, uD, uD, uT, uT};
}

RefSysAdjunction opposite_adjunction(const RefSysAdjunction& adj) {
  auto t_op = opposite_system(*adj.F.source);
  auto b_op = opposite_system(*adj.F.target);
  auto F_op = opposite_morphism(adj.G, b_op, t_op);  // new left adjoint
  auto G_op = opposite_morphism(adj.F, t_op, b_op);  // new right adjoint
  auto flip = [](const NatTransData& n, const CatPtr& src, const CatPtr& tgt) {
    // component a : S(a) -> R(a) read in the opposites goes R(a) -> S(a)
    return NatTransData{opposite_functor(n.target_functor, src, tgt), opposite_functor(n.source_functor, src, tgt),
                        n.components};
  };
  RefSysAdjunction out;
  out.F = F_op;
  out.G = G_op;
  out.unit_D = flip(adj.counit_D, b_op->D_ptr(), b_op->D_ptr());
  out.counit_D = flip(adj.unit_D, t_op->D_ptr(), t_op->D_ptr());
  out.unit_T = flip(adj.counit_T, b_op->T_ptr(), b_op->T_ptr());
  out.counit_T = flip(adj.unit_T, t_op->T_ptr(), t_op->T_ptr());
  return out;
}

namespace {

void triangle_laws(const FunctorData& F, const FunctorData& G, const NatTransData& unit, const NatTransData& counit,
                   const char* level, CheckReport& r) {
  const auto& C = *F.source;
  const auto& E = *F.target;
  for (std::size_t X = 0; X < C.object_count(); ++X) {
    MorId lhs = E.compose(F.on_morphism(unit.components[X]), counit.components[F.on_object(X)]);
    r.expect(lhs == E.identity(F.on_object(X)), [&] {
      return std::string(level) + " triangle F(unit);counit != id at " + C.object_name(X);
    });
  }
  for (std::size_t Y = 0; Y < E.object_count(); ++Y) {
    MorId lhs = C.compose(unit.components[G.on_object(Y)], G.on_morphism(counit.components[Y]));
    r.expect(lhs == C.identity(G.on_object(Y)), [&] {
      return std::string(level) + " triangle unit;G(counit) != id at " + E.object_name(Y);
    });
  }
}

void expect_valid(const ValidationReport& v, const std::string& what, CheckReport& r) {
  r.expect(v.ok(), [&] { return what + ": " + (v.violations.empty() ? "" : v.violations.front()); });
}

}  // namespace

CheckReport adjunction_check(const RefSysAdjunction& adj) {
  CheckReport r("adjunction", "adjunction of refinement systems");
  expect_valid(validate_morphism(adj.F), "F", r);
  expect_valid(validate_morphism(adj.G), "G", r);
  if (!r.ok()) return r;
  const auto& t = *adj.F.source;
  const auto& b = *adj.F.target;
  auto idD = identity_functor(t.D_ptr());
  auto idE = identity_functor(b.D_ptr());
  auto idT = identity_functor(t.T_ptr());
  auto idB = identity_functor(b.T_ptr());
  auto FGd = compose_functors(adj.F.FD, adj.G.FD);
  auto GFd = compose_functors(adj.G.FD, adj.F.FD);
  auto FGt = compose_functors(adj.F.FT, adj.G.FT);
  auto GFt = compose_functors(adj.G.FT, adj.F.FT);
  auto shape = [&](const NatTransData& n, const FunctorData& s, const FunctorData& g, const char* what) {
    r.expect(n.source_functor.same_tables(s) && n.target_functor.same_tables(g),
             [&] { return std::string(what) + " has the wrong functors"; });
    expect_valid(validate_nat_trans(n), what, r);
  };
  shape(adj.unit_D, idD, FGd, "unit_D");
  shape(adj.counit_D, GFd, idE, "counit_D");
  shape(adj.unit_T, idT, FGt, "unit_T");
  shape(adj.counit_T, GFt, idB, "counit_T");
  if (!r.ok()) return r;
  triangle_laws(adj.F.FD, adj.G.FD, adj.unit_D, adj.counit_D, "D", r);
  triangle_laws(adj.F.FT, adj.G.FT, adj.unit_T, adj.counit_T, "T", r);
  for (std::size_t P = 0; P < t.D().object_count(); ++P) {
    r.expect(t.image(adj.unit_D.components[P]) == adj.unit_T.components[t.over(P)],
             [&] { return "t does not map the unit at " + t.D().object_name(P) + " onto the base unit"; });
  }
  for (std::size_t Y = 0; Y < b.D().object_count(); ++Y) {
    r.expect(b.image(adj.counit_D.components[Y]) == adj.counit_T.components[b.over(Y)],
             [&] { return "b does not map the counit at " + b.D().object_name(Y) + " onto the base counit"; });
  }
  return r;
}

CheckReport rapp_check(const RefSysAdjunction& adj, MorId c, ObjId Q) {
  CheckReport r("rapp", "right adjoints preserve pullbacks");
  const auto& t = *adj.F.source;
  const auto& b = *adj.F.target;
  const auto& D = t.D();
  const auto& E = b.D();
  const auto& T = t.T();
  const auto& B = b.T();
  const auto& F = adj.F;
  const auto& G = adj.G;
  auto eta = [&](ObjId P) { return adj.unit_D.components[P]; };
  auto eps = [&](ObjId Y) { return adj.counit_D.components[Y]; };
  auto eta_T = [&](ObjId X) { return adj.unit_T.components[X]; };
  auto eps_T = [&](ObjId A) { return adj.counit_T.components[A]; };

  auto cert = find_pullback(b, c, Q);
  if (!cert) {
    r.skip("hypothesis unmet: no b-pullback");
    return r;
  }
  const ObjId A = B.dom(c);
  const ObjId cQ = cert->candidate;
  const MorId L = cert->structural;
  const MorId GL = G.on_derivation(L);
  const MorId Gc = G.on_term(c);
  const ObjId GQ = G.on_object(Q);
  const ObjId GcQ = G.on_object(cQ);
  const std::string where = "c=" + B.morphism_name(c) + ", Q=" + E.object_name(Q);

  auto tcert = certify_pullback(t, Gc, GQ, GL);
  r.expect(tcert.has_value(), [&] { return where + ": G of the pullback is not a t-pullback"; });
  if (auto found = find_pullback(t, Gc, GQ)) {
    r.expect(vertical_iso(t, found->candidate, GcQ).has_value(),
             [&] { return where + ": searched t-pullback not isomorphic to G of the pullback"; });
  }

  for (std::size_t Pi = 0; Pi < D.object_count(); ++Pi) {
    const auto P = static_cast<ObjId>(Pi);
    const ObjId X = t.over(P);
    for (MorId d : T.hom(X, G.FT.on_object(A))) {
      const std::string at = where + ", P=" + D.object_name(P) + ", d=" + T.morphism_name(d);
      // conv1: F[d];FG[c];counit_B = F[d];counit_A;c
      MorId Fd = F.on_term(d);
      MorId conv1_lhs = B.compose({Fd, F.on_term(Gc), eps_T(B.cod(c))});
      MorId conv1_rhs = B.compose({Fd, eps_T(A), c});
      r.expect(conv1_lhs == conv1_rhs, [&] { return at + ": conv1 fails"; });
      // conv2: unit_X;GF[d];G[counit_A] = d
      MorId conv2 = T.compose({eta_T(X), G.on_term(Fd), G.on_term(eps_T(A))});
      r.expect(conv2 == d, [&] { return at + ": conv2 fails"; });
      if (conv1_lhs != conv1_rhs || conv2 != d) continue;
      const MorId Fd_eps = B.compose(Fd, eps_T(A));

      auto right_rule = [&](MorId beta) -> std::optional<MorId> {
        MorId gamma = E.compose(F.on_derivation(beta), eps(Q));
        auto delta = pullback_factor(b, *cert, gamma, Fd_eps);
        if (!delta) return std::nullopt;
        return D.compose(eta(P), G.on_derivation(*delta));
      };

      for (MorId beta : derivations(t, {P, T.compose(d, Gc), GQ})) {
        auto Rb = right_rule(beta);
        r.expect(Rb.has_value(), [&] { return at + ": right rule has no factor for " + D.morphism_name(beta); });
        if (!Rb) continue;
        r.expect(t.image(*Rb) == d, [&] { return at + ": right rule lies over the wrong term"; });
        if (tcert) {
          auto u = pullback_factor(t, *tcert, beta, d);
          r.expect(u && *u == *Rb, [&] { return at + ": right rule is not the certified factor"; });
        }
        MorId gamma = E.compose(F.on_derivation(beta), eps(Q));
        MorId delta = *pullback_factor(b, *cert, gamma, Fd_eps);
        const std::vector<std::pair<const char*, MorId>> chain = {
            {"R(beta);G[L]", D.compose(*Rb, GL)},
            {"unit;G[R_c(F[beta];counit)];G[L]", D.compose(D.compose(eta(P), G.on_derivation(delta)), GL)},
            {"unit;(G[R_c(..)];G[L])", D.compose(eta(P), D.compose(G.on_derivation(delta), GL))},
            {"unit;G[R_c(..);L]", D.compose(eta(P), G.on_derivation(E.compose(delta, L)))},
            {"unit;G[F[beta];counit]", D.compose(eta(P), G.on_derivation(gamma))},
            {"unit;GF[beta];G[counit]", D.compose({eta(P), G.on_derivation(F.on_derivation(beta)), G.on_derivation(eps(Q))})},
            {"beta;unit;G[counit]", D.compose({beta, eta(GQ), G.on_derivation(eps(Q))})},
        };
        for (const auto& [label, m] : chain) {
          r.expect(m == beta, [&] { return at + ": beta chain step " + label + " differs"; });
        }
      }

      for (MorId h : derivations(t, {P, d, GcQ})) {
        MorId hGL = D.compose(h, GL);
        auto Rh = right_rule(hGL);
        r.expect(Rh.has_value(), [&] { return at + ": right rule has no factor for " + D.morphism_name(hGL); });
        if (!Rh) continue;
        MorId Fh = F.on_derivation(h);
        MorId arg1 = E.compose(F.on_derivation(hGL), eps(Q));
        MorId arg2 = E.compose({Fh, F.on_derivation(GL), eps(Q)});
        MorId arg3 = E.compose({Fh, eps(cQ), L});
        MorId factor_of = E.compose(Fh, eps(cQ));
        auto f1 = pullback_factor(b, *cert, arg1, Fd_eps);
        auto f3 = pullback_factor(b, *cert, arg3, Fd_eps);
        r.expect(arg1 == arg2 && arg2 == arg3, [&] { return at + ": eta chain naturality step differs"; });
        r.expect(f1 && f3 && *f1 == *f3 && *f3 == factor_of,
                 [&] { return at + ": eta chain factor step differs"; });
        if (!f1) continue;
        const std::vector<std::pair<const char*, MorId>> chain = {
            {"R(h;G[L])", *Rh},
            {"unit;G[R_c(F[h;G[L]];counit)]", D.compose(eta(P), G.on_derivation(*f1))},
            {"unit;G[F[h];counit]", D.compose(eta(P), G.on_derivation(factor_of))},
            {"unit;GF[h];G[counit]", D.compose({eta(P), G.on_derivation(Fh), G.on_derivation(eps(cQ))})},
            {"h;unit;G[counit]", D.compose({h, eta(GcQ), G.on_derivation(eps(cQ))})},
        };
        for (const auto& [label, m] : chain) {
          r.expect(m == h, [&] { return at + ": eta chain step " + label + " differs"; });
        }
      }
    }
  }
  return r;
}

CheckReport rapp_check_all(const RefSysAdjunction& adj) {
  CheckReport r("rapp", "right adjoints preserve pullbacks");
  const auto& b = *adj.F.target;
  for (std::size_t c = 0; c < b.T().morphism_count(); ++c) {
    for (ObjId Q : b.fiber(b.T().cod(c))) r.absorb(rapp_check(adj, static_cast<MorId>(c), Q));
  }
  return r;
}

CheckReport lapp_check_all(const RefSysAdjunction& adj) {
  auto op = opposite_adjunction(adj);
  CheckReport r("lapp", "left adjoints preserve pushforwards");
  r.absorb(rapp_check_all(op));
  return r;
}

}  // namespace refine
