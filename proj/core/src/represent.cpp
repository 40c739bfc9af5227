#include "refine/represent.hpp"

#include <algorithm>
#include <tuple>

namespace refine {

namespace {

std::size_t position_in(std::span<const MorId> hom, MorId h) {
  auto it = std::lower_bound(hom.begin(), hom.end(), h);
  if (it == hom.end() || *it != h) return static_cast<std::size_t>(-1);
  return static_cast<std::size_t>(it - hom.begin());
}

}  // namespace

// ---------------------------------------------------------------------------
// Slices

ObjId SliceCategory::find(ObjId P, MorId c) const {
  const auto& t = *system;
  if (P < 0 || static_cast<std::size_t>(P) >= t.D().object_count()) return kNoObject;
  if (c < 0 || static_cast<std::size_t>(c) >= t.T().morphism_count()) return kNoObject;
  std::size_t pos = position_in(t.T().hom(t.over(P), B), c);
  if (pos == static_cast<std::size_t>(-1)) return kNoObject;
  return static_cast<ObjId>(object_offset_[P] + pos);
}

MorId SliceCategory::find_morphism(MorId alpha, MorId c2) const {
  const auto& t = *system;
  if (alpha < 0 || static_cast<std::size_t>(alpha) >= t.D().morphism_count()) return kNoMorphism;
  if (c2 < 0 || static_cast<std::size_t>(c2) >= t.T().morphism_count()) return kNoMorphism;
  std::size_t pos = position_in(t.T().hom(t.over(t.D().cod(alpha)), B), c2);
  if (pos == static_cast<std::size_t>(-1)) return kNoMorphism;
  return static_cast<MorId>(morphism_offset_[alpha] + pos);
}

SlicePtr slice(const SysPtr& tp, ObjId B) {
  const auto& t = *tp;
  const auto& D = t.D();
  const auto& T = t.T();
  if (B < 0 || static_cast<std::size_t>(B) >= T.object_count()) throw StructuralError("slice: base object out of range");
  auto s = std::make_shared<SliceCategory>();
  s->system = tp;
  s->B = B;
  FinCategory::Builder b;
  s->object_offset_.resize(D.object_count());
  for (std::size_t P = 0; P < D.object_count(); ++P) {
    s->object_offset_[P] = s->objects.size();
    for (MorId c : T.hom(t.over(P), B)) {
      s->objects.push_back({static_cast<ObjId>(P), c});
      b.add_object("(" + D.object_name(P) + "," + T.morphism_name(c) + ")");
    }
  }
  s->morphism_offset_.resize(D.morphism_count());
  for (std::size_t a = 0; a < D.morphism_count(); ++a) {
    MorId alpha = static_cast<MorId>(a);
    s->morphism_offset_[a] = s->morphisms.size();
    for (MorId c2 : T.hom(t.over(D.cod(alpha)), B)) {
      ObjId from = s->find(D.dom(alpha), T.compose(t.image(alpha), c2));
      ObjId to = s->find(D.cod(alpha), c2);
      s->morphisms.push_back({alpha, c2});
      b.add_morphism("(" + D.morphism_name(alpha) + "," + T.morphism_name(c2) + ")", from, to);
    }
  }
  for (std::size_t o = 0; o < s->objects.size(); ++o) {
    const auto& so = s->objects[o];
    b.set_identity(static_cast<ObjId>(o), s->find_morphism(D.identity(so.P), so.c));
  }
  const SliceCategory& view = *s;
  s->category = b.build([&](MorId f, MorId g) {
    return view.find_morphism(D.compose(view.morphisms[f].alpha, view.morphisms[g].alpha), view.morphisms[g].c2);
  });
  return s;
}

SlicePtr coslice_dual(const SysPtr& t, ObjId A) { return slice(opposite_system(*t), A); }

FunctorData slice_action(const SliceCategory& from, const SliceCategory& to, MorId c) {
  const auto& T = from.system->T();
  if (T.dom(c) != from.B || T.cod(c) != to.B) throw StructuralError("slice_action: term does not match the slices");
  FunctorData F{from.category, to.category, {}, {}};
  F.object_map.reserve(from.objects.size());
  for (const auto& o : from.objects) F.object_map.push_back(to.find(o.P, T.compose(o.c, c)));
  F.morphism_map.reserve(from.morphisms.size());
  for (const auto& m : from.morphisms) F.morphism_map.push_back(to.find_morphism(m.alpha, T.compose(m.c2, c)));
  return F;
}

std::string describe_slice_object(const SliceCategory& s, ObjId o) { return s.category->object_name(o); }

// ---------------------------------------------------------------------------
// Representations

Elem Representation::element_of(ObjId object, MorId alpha) const {
  const auto& e = elements.at(object);
  auto it = std::lower_bound(e.begin(), e.end(), alpha);
  if (it == e.end() || *it != alpha) throw StructuralError("element_of: derivation not over this object");
  return static_cast<Elem>(it - e.begin());
}

namespace {

RepPtr build_rep(const SysPtr& tp, const SlicePtr& S, ObjId Q) {
  const auto& t = *tp;
  const auto& D = t.D();
  auto rep = std::make_shared<Representation>();
  rep->slice = S;
  rep->Q = Q;
  const std::size_t n = S->objects.size();
  rep->elements.resize(n);
  std::vector<std::size_t> counts(n);
  std::vector<std::vector<std::string>> labels(n);
  for (std::size_t o = 0; o < n; ++o) {
    const auto& so = S->objects[o];
    for (MorId a : D.hom(so.P, Q))
      if (t.image(a) == so.c) rep->elements[o].push_back(a);
    counts[o] = rep->elements[o].size();
    for (MorId a : rep->elements[o]) labels[o].push_back(D.morphism_name(a));
  }
  std::vector<std::vector<Elem>> action(S->morphisms.size());
  for (std::size_t f = 0; f < S->morphisms.size(); ++f) {
    MorId alpha = S->morphisms[f].alpha;
    ObjId from = S->category->dom(static_cast<MorId>(f));
    ObjId to = S->category->cod(static_cast<MorId>(f));
    action[f].reserve(rep->elements[to].size());
    for (MorId beta : rep->elements[to]) action[f].push_back(rep->element_of(from, D.compose(alpha, beta)));
  }
  rep->presheaf = Presheaf(S->category, std::move(counts), std::move(action), std::move(labels));
  rep->point = S->find(Q, t.T().identity(t.over(Q)));
  return rep;
}

}  // namespace

SlicePtr SliceCache::slice(ObjId B) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = slices_.find(B);
    if (it != slices_.end()) return it->second;
  }
  auto s = refine::slice(t_, B);
  std::lock_guard<std::mutex> lock(mu_);
  return slices_.emplace(B, std::move(s)).first->second;
}

RepPtr SliceCache::rep(ObjId Q) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = reps_.find(Q);
    if (it != reps_.end()) return it->second;
  }
  auto r = build_rep(t_, slice(t_->over(Q)), Q);
  std::lock_guard<std::mutex> lock(mu_);
  return reps_.emplace(Q, std::move(r)).first->second;
}

FunctorData SliceCache::action(MorId c) const {
  const auto& T = t_->T();
  return slice_action(*slice(T.dom(c)), *slice(T.cod(c)), c);
}

RepresentationContext::RepresentationContext(SysPtr t) : pos_(t), neg_(opposite_system(*t)) {}

Representation pos_rep(const SysPtr& t, ObjId Q) { return *build_rep(t, slice(t, t->over(Q)), Q); }

Representation neg_rep(const SysPtr& t, ObjId P) {
  auto op = opposite_system(*t);
  return *build_rep(op, slice(op, op->over(P)), P);
}

namespace {

// beta |-> beta;alpha from <P> to <Q> over <c>, read in the cache's system.
PshDerivation rep_derivation(const SliceCache& cache, ObjId P, MorId c, ObjId Q, MorId alpha) {
  const auto& D = cache.system().D();
  auto rp = cache.rep(P);
  auto rq = cache.rep(Q);
  PshDerivation d{cache.action(c), Family(rp->elements.size())};
  for (std::size_t o = 0; o < rp->elements.size(); ++o) {
    ObjId Fo = d.F.on_object(static_cast<ObjId>(o));
    for (MorId beta : rp->elements[o]) d.theta[o].push_back(rq->element_of(Fo, D.compose(beta, alpha)));
  }
  return d;
}

void check_derivation(const RefinementSystem& t, const Derivation& d) {
  check_judgment(t, d.judgment);
  const auto& D = t.D();
  if (D.dom(d.alpha) != d.judgment.P || D.cod(d.alpha) != d.judgment.Q || t.image(d.alpha) != d.judgment.c) {
    throw StructuralError("derivation does not prove " + describe(t, d.judgment));
  }
}

}  // namespace

PshDerivation pos_rep_derivation(const RepresentationContext& ctx, const Derivation& d) {
  check_derivation(ctx.system(), d);
  return rep_derivation(ctx.pos(), d.judgment.P, d.judgment.c, d.judgment.Q, d.alpha);
}

PshDerivation neg_rep_derivation(const RepresentationContext& ctx, const Derivation& d) {
  check_derivation(ctx.system(), d);
  return rep_derivation(ctx.neg(), d.judgment.Q, d.judgment.c, d.judgment.P, d.alpha);
}

namespace {

void ff_side(const SliceCache& cache, const char* tag, unsigned jobs, CheckReport& r) {
  const auto& t = cache.system();
  const auto& D = t.D();
  const auto& T = t.T();
  absorb_indexed(r, D.object_count(), jobs, [&](std::size_t p) {
    CheckReport part;
    ObjId P = static_cast<ObjId>(p);
    for (MorId c : T.outgoing(t.over(P))) {
      FunctorData F = cache.action(c);
      for (ObjId Q : t.fiber(T.cod(c))) {
        auto rp = cache.rep(P);
        auto rq = cache.rep(Q);
        auto direct = all_families(rp->presheaf, PulledView(F, rq->presheaf));
        std::vector<Family> images;
        for (MorId a : D.hom(P, Q)) {
          if (t.image(a) != c) continue;
          images.push_back(rep_derivation(cache, P, c, Q, a).theta);
        }
        std::sort(images.begin(), images.end());
        bool distinct = std::adjacent_find(images.begin(), images.end()) == images.end();
        part.expect(distinct && images == direct, [&] {
          return std::string(tag) + " " + describe(t, {P, c, Q}) + ": " + std::to_string(images.size()) +
                 " derivations, " + std::to_string(direct.size()) + " natural families" +
                 (distinct ? "" : " (transport not injective)");
        });
      }
    }
    return part;
  });
}

}  // namespace

CheckReport representation_ff_check(const RepresentationContext& ctx, unsigned jobs) {
  CheckReport r("representation", "derivations correspond to natural families");
  ff_side(ctx.pos(), "positive", jobs, r);
  ff_side(ctx.neg(), "negative", jobs, r);
  return r;
}

// ---------------------------------------------------------------------------
// Comma category and factorizations

ObjId CommaCategory::find(ObjId P, MorId c) const {
  auto it = index_.find({P, c});
  return it == index_.end() ? kNoObject : it->second;
}

CommaCategory comma_category(const RefinementSystem& t) {
  const auto& D = t.D();
  const auto& T = t.T();
  CommaCategory k;
  FinCategory::Builder b;
  for (std::size_t P = 0; P < D.object_count(); ++P) {
    for (MorId c : T.outgoing(t.over(P))) {
      ObjId id = b.add_object("(" + D.object_name(P) + "," + T.morphism_name(c) + ")");
      k.objects.push_back({static_cast<ObjId>(P), c});
      k.index_.emplace(std::pair{static_cast<ObjId>(P), c}, id);
    }
  }
  std::map<std::tuple<MorId, MorId, ObjId, ObjId>, MorId> index;
  for (std::size_t a = 0; a < D.morphism_count(); ++a) {
    MorId alpha = static_cast<MorId>(a);
    ObjId P1 = D.dom(alpha);
    ObjId P2 = D.cod(alpha);
    for (MorId c1 : T.outgoing(t.over(P1))) {
      for (MorId e : T.outgoing(T.cod(c1))) {
        MorId c1e = T.compose(c1, e);
        for (MorId c2 : T.hom(t.over(P2), T.cod(e))) {
          if (T.compose(t.image(alpha), c2) != c1e) continue;
          ObjId from = k.find(P1, c1);
          ObjId to = k.find(P2, c2);
          MorId id = b.add_morphism("(" + D.morphism_name(alpha) + "," + T.morphism_name(e) + "):" +
                                        std::to_string(from) + ">" + std::to_string(to),
                                    from, to);
          k.morphisms.push_back({alpha, e, from, to});
          index.emplace(std::tuple{alpha, e, from, to}, id);
        }
      }
    }
  }
  for (std::size_t o = 0; o < k.objects.size(); ++o) {
    const auto& so = k.objects[o];
    ObjId oo = static_cast<ObjId>(o);
    b.set_identity(oo, index.at({D.identity(so.P), T.identity(T.cod(so.c)), oo, oo}));
  }
  k.category = b.build([&](MorId f, MorId g) {
    const auto& mf = k.morphisms[f];
    const auto& mg = k.morphisms[g];
    return index.at({D.compose(mf.alpha, mg.alpha), T.compose(mf.e, mg.e), mf.dom, mg.cod});
  });
  k.cod = FunctorData{k.category, t.T_ptr(), {}, {}};
  for (const auto& o : k.objects) k.cod.object_map.push_back(T.cod(o.c));
  for (const auto& m : k.morphisms) k.cod.morphism_map.push_back(m.e);
  return k;
}

namespace {

void factorization_side(const SliceCache& cache, const char* tag, unsigned jobs, CheckReport& r) {
  const auto& t = cache.system();
  const auto& D = t.D();
  const auto& T = t.T();
  const std::string side(tag);
  auto comma = comma_category(t);
  auto cod = make_system(comma.cod, "cod");

  // Each slice is the fiber of cod: the inclusion is a functor, injective,
  // and hits exactly the vertical morphisms over its base.
  for (std::size_t B = 0; B < T.object_count(); ++B) {
    auto S = cache.slice(static_cast<ObjId>(B));
    MorId idB = T.identity(static_cast<ObjId>(B));
    FunctorData inc{S->category, comma.category, {}, {}};
    for (const auto& o : S->objects) inc.object_map.push_back(comma.find(o.P, o.c));
    for (std::size_t f = 0; f < S->morphisms.size(); ++f) {
      ObjId from = inc.object_map[S->category->dom(static_cast<MorId>(f))];
      ObjId to = inc.object_map[S->category->cod(static_cast<MorId>(f))];
      MorId hit = kNoMorphism;
      for (MorId g : comma.category->hom(from, to)) {
        if (comma.morphisms[g].alpha == S->morphisms[f].alpha && comma.morphisms[g].e == idB) hit = g;
      }
      inc.morphism_map.push_back(hit);
    }
    bool mapped = std::find(inc.morphism_map.begin(), inc.morphism_map.end(), kNoMorphism) == inc.morphism_map.end() &&
                  std::find(inc.object_map.begin(), inc.object_map.end(), kNoObject) == inc.object_map.end();
    bool functor = mapped && validate_functor(inc).ok();
    std::size_t vertical_objects = 0;
    std::size_t vertical_morphisms = 0;
    for (const auto& o : comma.objects) vertical_objects += T.cod(o.c) == static_cast<ObjId>(B);
    for (const auto& m : comma.morphisms) vertical_morphisms += m.e == idB;
    auto sorted_o = inc.object_map;
    auto sorted_m = inc.morphism_map;
    std::sort(sorted_o.begin(), sorted_o.end());
    std::sort(sorted_m.begin(), sorted_m.end());
    bool injective = std::adjacent_find(sorted_o.begin(), sorted_o.end()) == sorted_o.end() &&
                     std::adjacent_find(sorted_m.begin(), sorted_m.end()) == sorted_m.end();
    r.expect(functor && injective && sorted_o.size() == vertical_objects && sorted_m.size() == vertical_morphisms,
             [&] { return side + " slice over " + T.object_name(static_cast<ObjId>(B)) + " is not the fiber of cod"; });
  }

  // Pushforwards along cod exist, and reindexing along c is <c> up to
  // vertical isomorphism. Every object over dom c is some (P, c') in <dom c>.
  CheckReport opf(side + " cod projection", "pushforwards exist for all compatible pairs");
  CheckReport reindex;
  std::vector<CheckReport> exists_parts(T.morphism_count());
  absorb_indexed(reindex, T.morphism_count(), jobs, [&](std::size_t ci) {
    CheckReport part;
    CheckReport& exists = exists_parts[ci];
    MorId c = static_cast<MorId>(ci);
    auto from = cache.slice(T.dom(c));
    FunctorData act = cache.action(c);
    auto to = cache.slice(T.cod(c));
    for (std::size_t o = 0; o < from->objects.size(); ++o) {
      const auto& so = from->objects[o];
      ObjId x = comma.find(so.P, so.c);
      auto cert = find_pushforward(*cod, c, x);
      exists.expect(cert.has_value(), [&] {
        return "no pushforward of " + comma.category->object_name(x) + " along " + T.morphism_name(c);
      });
      const auto& image = to->objects[act.on_object(static_cast<ObjId>(o))];
      ObjId y = comma.find(image.P, image.c);
      part.expect(cert && vertical_iso(*cod, cert->candidate, y).has_value(), [&] {
        return side + " reindexing along " + T.morphism_name(c) + " of " + from->category->object_name(o) +
               " differs from the slice action";
      });
    }
    return part;
  });
  for (const auto& e : exists_parts) opf.absorb(e);
  r.absorb(opf);
  r.absorb(reindex);

  // <Q> is the representable at (Q, id), and the transport of alpha is
  // postcomposition with (alpha, id) after <c>.
  for (std::size_t q = 0; q < D.object_count(); ++q) {
    auto rq = cache.rep(static_cast<ObjId>(q));
    const auto& S = *rq->slice;
    Presheaf yon = representable(S.category, rq->point);
    MorId idB = T.identity(S.B);
    Family fam(S.objects.size());
    bool total = true;
    for (std::size_t o = 0; o < S.objects.size(); ++o) {
      auto hom = S.category->hom(static_cast<ObjId>(o), rq->point);
      for (MorId beta : rq->elements[o]) {
        MorId h = S.find_morphism(beta, idB);
        std::size_t pos = position_in(hom, h);
        total = total && pos != static_cast<std::size_t>(-1);
        fam[o].push_back(static_cast<Elem>(total ? pos : 0));
      }
    }
    bool bij = total && is_natural(rq->presheaf, yon, fam);
    for (std::size_t o = 0; bij && o < fam.size(); ++o) {
      auto v = fam[o];
      std::sort(v.begin(), v.end());
      bij = std::adjacent_find(v.begin(), v.end()) == v.end() && v.size() == yon.count(static_cast<ObjId>(o));
    }
    r.expect(bij, [&] {
      return side + " representation of " + D.object_name(static_cast<ObjId>(q)) +
             " is not the representable at its identity point";
    });
  }
  for (std::size_t a = 0; a < D.morphism_count(); ++a) {
    MorId alpha = static_cast<MorId>(a);
    MorId c = t.image(alpha);
    ObjId P = D.dom(alpha);
    ObjId Q = D.cod(alpha);
    auto d = rep_derivation(cache, P, c, Q, alpha);
    auto rp = cache.rep(P);
    auto rq = cache.rep(Q);
    const auto& SB = *rq->slice;
    MorId idB = T.identity(SB.B);
    bool same = true;
    for (std::size_t o = 0; o < rp->elements.size() && same; ++o) {
      for (std::size_t x = 0; x < rp->elements[o].size() && same; ++x) {
        MorId beta = rp->elements[o][x];
        MorId moved = SB.find_morphism(beta, c);  // <c>(beta, id)
        MorId post = SB.category->compose(moved, SB.find_morphism(alpha, idB));
        same = rq->element_of(d.F.on_object(static_cast<ObjId>(o)), SB.morphisms[post].alpha) == d.theta[o][x];
      }
    }
    r.expect(same, [&] {
      return side + " transport of " + D.morphism_name(alpha) + " differs from the representable action";
    });
  }
}

}  // namespace

CheckReport factorization_check(const RepresentationContext& ctx, unsigned jobs) {
  CheckReport r("factorization", "representations factor through pointed slices and the comma category");
  factorization_side(ctx.pos(), "positive", jobs, r);
  factorization_side(ctx.neg(), "negative", jobs, r);
  return r;
}

// ---------------------------------------------------------------------------
// Preservation

namespace {

// delta |-> delta;s is a natural bijection <X> => pull_<c><Q>.
bool structural_bijection(const SliceCache& cache, const LiftCertificate& cert) {
  const auto& D = cache.system().D();
  auto rx = cache.rep(cert.candidate);
  auto rq = cache.rep(cert.subject);
  FunctorData F = cache.action(cert.c);
  PulledView pulled(F, rq->presheaf);
  Family fam(rx->elements.size());
  for (std::size_t o = 0; o < fam.size(); ++o) {
    ObjId Fo = F.on_object(static_cast<ObjId>(o));
    for (MorId delta : rx->elements[o]) fam[o].push_back(rq->element_of(Fo, D.compose(delta, cert.structural)));
    auto v = fam[o];
    std::sort(v.begin(), v.end());
    if (std::adjacent_find(v.begin(), v.end()) != v.end() || v.size() != pulled.count(static_cast<ObjId>(o)))
      return false;
  }
  return is_natural(rx->presheaf, pulled, fam);
}

void pullback_side(const SliceCache& cache, const std::string& what, CheckReport& r) {
  const auto& t = cache.system();
  const auto& T = t.T();
  for (std::size_t ci = 0; ci < T.morphism_count(); ++ci) {
    MorId c = static_cast<MorId>(ci);
    FunctorData F = cache.action(c);
    for (ObjId Q : t.fiber(T.cod(c))) {
      auto cert = find_pullback(t, c, Q);
      if (!cert) continue;
      auto rx = cache.rep(cert->candidate);
      auto rq = cache.rep(Q);
      bool iso = vertical_iso_psh(rx->presheaf, PulledView(F, rq->presheaf)).has_value();
      r.expect(iso && structural_bijection(cache, *cert), [&] {
        return what + " of " + t.D().object_name(Q) + " along " + T.morphism_name(c) + " not preserved";
      });
    }
  }
}

}  // namespace

CheckReport preservation_check(const RepresentationContext& ctx) {
  CheckReport r("preservation", "pullbacks preserved, pushforwards sent to pullbacks");
  pullback_side(ctx.pos(), "pullback", r);
  pullback_side(ctx.neg(), "pushforward", r);

  const auto& t = ctx.system();
  const auto& T = t.T();
  std::size_t instances = 0;
  std::size_t invertible = 0;
  std::optional<std::string> first_strict;
  for (std::size_t ci = 0; ci < T.morphism_count(); ++ci) {
    MorId c = static_cast<MorId>(ci);
    FunctorData F = ctx.pos().action(c);
    for (ObjId P : t.fiber(T.dom(c))) {
      auto cert = find_pushforward(t, c, P);
      if (!cert) continue;
      auto pushed = push_psh(F, ctx.pos().rep(P)->presheaf);
      const auto& target = ctx.pos().rep(cert->candidate)->presheaf;
      ++instances;
      r.expect(some_family(pushed.presheaf, target).has_value(), [&] {
        return "no comparison from the pushed representation of " + t.D().object_name(P) + " along " +
               T.morphism_name(c);
      });
      if (vertical_iso_psh(pushed.presheaf, target)) {
        ++invertible;
      } else if (!first_strict) {
        first_strict = t.D().object_name(P) + " along " + T.morphism_name(c);
      }
    }
  }
  r.note("push comparison invertible in " + std::to_string(invertible) + " of " + std::to_string(instances) +
         " instances");
  if (first_strict) r.note("first non-invertible comparison: " + *first_strict);
  return r;
}

// ---------------------------------------------------------------------------
// Pair categories and tensors

ObjId PairCategory::find(ObjId a, ObjId b) const {
  auto it = object_index_.find({a, b});
  return it == object_index_.end() ? kNoObject : it->second;
}

MorId PairCategory::find_morphism(MorId f, MorId g) const {
  auto it = morphism_index_.find({f, g});
  return it == morphism_index_.end() ? kNoMorphism : it->second;
}

bool PairCategory::total() const {
  return objects.size() == left->object_count() * right->object_count() &&
         morphisms.size() == left->morphism_count() * right->morphism_count();
}

PairCategory pair_category(const CatPtr& a, const CatPtr& b, const std::function<bool(ObjId, ObjId)>& keep) {
  PairCategory p;
  p.left = a;
  p.right = b;
  FinCategory::Builder bld;
  for (std::size_t i = 0; i < a->object_count(); ++i) {
    for (std::size_t j = 0; j < b->object_count(); ++j) {
      ObjId x = static_cast<ObjId>(i);
      ObjId y = static_cast<ObjId>(j);
      if (keep && !keep(x, y)) continue;
      ObjId id = bld.add_object("(" + a->object_name(x) + "|" + b->object_name(y) + ")");
      p.objects.push_back({x, y});
      p.object_index_.emplace(std::pair{x, y}, id);
    }
  }
  for (std::size_t f = 0; f < a->morphism_count(); ++f) {
    MorId mf = static_cast<MorId>(f);
    for (std::size_t g = 0; g < b->morphism_count(); ++g) {
      MorId mg = static_cast<MorId>(g);
      ObjId from = p.find(a->dom(mf), b->dom(mg));
      ObjId to = p.find(a->cod(mf), b->cod(mg));
      if (from == kNoObject || to == kNoObject) continue;
      MorId id = bld.add_morphism("(" + a->morphism_name(mf) + "|" + b->morphism_name(mg) + ")", from, to);
      p.morphisms.push_back({mf, mg});
      p.morphism_index_.emplace(std::pair{mf, mg}, id);
    }
  }
  for (std::size_t o = 0; o < p.objects.size(); ++o) {
    auto [x, y] = p.objects[o];
    bld.set_identity(static_cast<ObjId>(o), p.find_morphism(a->identity(x), b->identity(y)));
  }
  p.category = bld.build([&](MorId f, MorId g) {
    return p.find_morphism(a->compose(p.morphisms[f].first, p.morphisms[g].first),
                           b->compose(p.morphisms[f].second, p.morphisms[g].second));
  });
  return p;
}

Presheaf pair_tensor(const PairCategory& base, const PresheafView& phi, const PresheafView& psi) {
  std::vector<std::size_t> counts;
  counts.reserve(base.objects.size());
  for (auto [a, b] : base.objects) counts.push_back(phi.count(a) * psi.count(b));
  std::vector<std::vector<Elem>> action(base.morphisms.size());
  for (std::size_t k = 0; k < base.morphisms.size(); ++k) {
    auto [f, g] = base.morphisms[k];
    const auto& A = *base.left;
    const auto& B = *base.right;
    std::size_t nd = psi.count(B.dom(g));
    std::size_t nc = psi.count(B.cod(g));
    std::size_t mc = phi.count(A.cod(f));
    action[k].reserve(mc * nc);
    for (std::size_t x = 0; x < mc; ++x)
      for (std::size_t y = 0; y < nc; ++y)
        action[k].push_back(static_cast<Elem>(phi.act(f, static_cast<Elem>(x)) * nd + psi.act(g, static_cast<Elem>(y))));
  }
  return Presheaf(base.category, std::move(counts), std::move(action));
}

std::optional<ObjId> TensorTable::object(ObjId a, ObjId b) const {
  ObjId k = domain.find(a, b);
  if (k == kNoObject) return std::nullopt;
  return tensor.on_object(k);
}

std::optional<MorId> TensorTable::morphism(MorId f, MorId g) const {
  MorId k = domain.find_morphism(f, g);
  if (k == kNoMorphism) return std::nullopt;
  return tensor.on_morphism(k);
}

TensorTable make_tensor(const CatPtr& C, ObjId unit, const std::function<bool(ObjId, ObjId)>& defined,
                        const std::function<ObjId(ObjId, ObjId)>& on_objects,
                        const std::function<MorId(MorId, MorId)>& on_morphisms) {
  TensorTable tt;
  tt.category = C;
  tt.unit = unit;
  tt.domain = pair_category(C, C, defined);
  tt.tensor = FunctorData{tt.domain.category, C, {}, {}};
  for (auto [a, b] : tt.domain.objects) tt.tensor.object_map.push_back(on_objects(a, b));
  for (auto [f, g] : tt.domain.morphisms) tt.tensor.morphism_map.push_back(on_morphisms(f, g));
  return tt;
}

MorId MonoidalStructure::kappa(ObjId P1, ObjId P2) const {
  ObjId k = D.domain.find(P1, P2);
  if (k == kNoObject) throw StructuralError("tensor undefined on the pair");
  return comparison.at(k);
}

bool MonoidalStructure::strict() const {
  for (MorId k : comparison)
    if (!T.category->is_identity(k)) return false;
  return true;
}

MonoidalStructure strict_monoidal(const RefinementSystem& t, TensorTable D, TensorTable T) {
  MonoidalStructure M{std::move(D), std::move(T), {}};
  for (auto [P1, P2] : M.D.domain.objects) {
    auto ab = M.T.object(t.over(P1), t.over(P2));
    ObjId PQ = *M.D.object(P1, P2);
    if (!ab || *ab != t.over(PQ)) throw StructuralError("strict_monoidal: t does not preserve the tensor strictly");
    M.comparison.push_back(M.T.category->identity(*ab));
  }
  return M;
}

namespace {

void validate_tensor(const TensorTable& tt, const char* tag, ValidationReport& r) {
  const auto& C = *tt.category;
  const std::string name(tag);
  auto f = validate_functor(tt.tensor);
  for (auto& v : f.violations) r.add(name + " tensor: " + v);
  if (!f.ok()) return;
  if (tt.unit < 0 || static_cast<std::size_t>(tt.unit) >= C.object_count()) {
    r.add(name + ": unit out of range");
    return;
  }
  MorId idI = C.identity(tt.unit);
  for (std::size_t a = 0; a < C.object_count(); ++a) {
    auto l = tt.object(tt.unit, static_cast<ObjId>(a));
    auto rr = tt.object(static_cast<ObjId>(a), tt.unit);
    if (!l || *l != static_cast<ObjId>(a) || !rr || *rr != static_cast<ObjId>(a))
      r.add(name + ": unit law fails at " + C.object_name(static_cast<ObjId>(a)));
  }
  for (std::size_t m = 0; m < C.morphism_count(); ++m) {
    auto l = tt.morphism(idI, static_cast<MorId>(m));
    auto rr = tt.morphism(static_cast<MorId>(m), idI);
    if (!l || *l != static_cast<MorId>(m) || !rr || *rr != static_cast<MorId>(m))
      r.add(name + ": unit law fails at " + C.morphism_name(static_cast<MorId>(m)));
  }
  for (auto [a, b] : tt.domain.objects) {
    ObjId ab = *tt.object(a, b);
    for (std::size_t c = 0; c < C.object_count(); ++c) {
      ObjId oc = static_cast<ObjId>(c);
      auto bc = tt.object(b, oc);
      auto left = tt.object(ab, oc);
      auto right = bc ? tt.object(a, *bc) : std::nullopt;
      if (left.has_value() != right.has_value() || (left && *left != *right)) {
        r.add(name + ": associativity fails at (" + C.object_name(a) + "," + C.object_name(b) + "," +
              C.object_name(oc) + ")");
      }
    }
  }
  for (auto [f, g] : tt.domain.morphisms) {
    MorId fg = *tt.morphism(f, g);
    for (std::size_t h = 0; h < C.morphism_count(); ++h) {
      MorId mh = static_cast<MorId>(h);
      auto left = tt.morphism(fg, mh);
      if (!left) continue;
      auto gh = tt.morphism(g, mh);
      auto right = gh ? tt.morphism(f, *gh) : std::nullopt;
      if (!right || *left != *right) {
        r.add(name + ": associativity fails at (" + C.morphism_name(f) + "," + C.morphism_name(g) + "," +
              C.morphism_name(mh) + ")");
      }
    }
  }
}

bool is_iso(const FinCategory& C, MorId k) {
  for (MorId g : C.hom(C.cod(k), C.dom(k)))
    if (C.compose(k, g) == C.identity(C.dom(k)) && C.compose(g, k) == C.identity(C.cod(k))) return true;
  return false;
}

MorId inverse_of(const FinCategory& C, MorId k) {
  for (MorId g : C.hom(C.cod(k), C.dom(k)))
    if (C.compose(k, g) == C.identity(C.dom(k)) && C.compose(g, k) == C.identity(C.cod(k))) return g;
  throw StructuralError("comparison morphism is not invertible");
}

}  // namespace

ValidationReport validate_monoidal(const RefinementSystem& t, const MonoidalStructure& M) {
  ValidationReport r;
  validate_tensor(M.D, "D", r);
  validate_tensor(M.T, "T", r);
  if (!r.ok()) return r;
  const auto& T = t.T();
  if (t.over(M.D.unit) != M.T.unit) r.add("t does not preserve the unit");
  if (M.comparison.size() != M.D.domain.objects.size()) {
    r.add("comparison table size mismatch");
    return r;
  }
  for (std::size_t k = 0; k < M.D.domain.objects.size(); ++k) {
    auto [P1, P2] = M.D.domain.objects[k];
    auto ab = M.T.object(t.over(P1), t.over(P2));
    MorId kap = M.comparison[k];
    ObjId PQ = M.D.tensor.on_object(static_cast<ObjId>(k));
    if (!ab || T.dom(kap) != t.over(PQ) || T.cod(kap) != *ab || !is_iso(T, kap)) {
      r.add("comparison at (" + t.D().object_name(P1) + "," + t.D().object_name(P2) + ") is not an isomorphism " +
            "t(P1 (x) P2) -> tP1 (x) tP2");
    }
  }
  if (!r.ok()) return r;
  for (std::size_t k = 0; k < M.D.domain.morphisms.size(); ++k) {
    auto [f, g] = M.D.domain.morphisms[k];
    MorId fg = M.D.tensor.on_morphism(static_cast<MorId>(k));
    auto tfg = M.T.morphism(t.image(f), t.image(g));
    const auto& dom_k = M.D.domain.category->dom(static_cast<MorId>(k));
    const auto& cod_k = M.D.domain.category->cod(static_cast<MorId>(k));
    if (!tfg || T.compose(t.image(fg), M.comparison[cod_k]) != T.compose(M.comparison[dom_k], *tfg)) {
      r.add("comparison not natural at (" + t.D().morphism_name(f) + "," + t.D().morphism_name(g) + ")");
    }
  }
  return r;
}

ValidationReport validate_monoid(const MonoidalStructure& M, const MonoidObject& w) {
  ValidationReport r;
  const auto& T = *M.T.category;
  auto WW = M.T.object(w.W, w.W);
  if (!WW || T.dom(w.multiplication) != *WW || T.cod(w.multiplication) != w.W) {
    r.add("multiplication is not W (x) W -> W");
    return r;
  }
  MorId id = T.identity(w.W);
  auto WWW = M.T.object(*WW, w.W);
  if (WWW) {
    auto pl = M.T.morphism(w.multiplication, id);
    auto pr = M.T.morphism(id, w.multiplication);
    if (!pl || !pr || T.compose(*pl, w.multiplication) != T.compose(*pr, w.multiplication))
      r.add("multiplication is not associative");
  }
  if (w.unit != kNoMorphism) {
    if (T.dom(w.unit) != M.T.unit || T.cod(w.unit) != w.W) {
      r.add("unit is not I -> W");
      return r;
    }
    auto el = M.T.morphism(w.unit, id);
    auto er = M.T.morphism(id, w.unit);
    if (!el || !er || T.compose(*el, w.multiplication) != id || T.compose(*er, w.multiplication) != id)
      r.add("unit laws fail");
  }
  return r;
}

// ---------------------------------------------------------------------------
// Day-style structure

DayProduct day_product(const SliceCache& pos, const MonoidalStructure& M, ObjId B1, ObjId B2) {
  const auto& t = pos.system();
  const auto& T = t.T();
  auto B = M.T.object(B1, B2);
  if (!B) throw StructuralError("day_product: base tensor undefined");
  DayProduct day;
  day.left = pos.slice(B1);
  day.right = pos.slice(B2);
  day.target = pos.slice(*B);
  const auto& L = *day.left;
  const auto& R = *day.right;
  day.domain = pair_category(L.category, R.category, [&](ObjId x, ObjId y) {
    return M.D.domain.find(L.objects[x].P, R.objects[y].P) != kNoObject;
  });
  day.m = FunctorData{day.domain.category, day.target->category, {}, {}};
  for (auto [x, y] : day.domain.objects) {
    const auto& o1 = L.objects[x];
    const auto& o2 = R.objects[y];
    ObjId P = *M.D.object(o1.P, o2.P);
    MorId c = T.compose(M.kappa(o1.P, o2.P), *M.T.morphism(o1.c, o2.c));
    day.m.object_map.push_back(day.target->find(P, c));
  }
  for (auto [f, g] : day.domain.morphisms) {
    const auto& m1 = L.morphisms[f];
    const auto& m2 = R.morphisms[g];
    MorId alpha = *M.D.morphism(m1.alpha, m2.alpha);
    MorId c2 = T.compose(M.kappa(t.D().cod(m1.alpha), t.D().cod(m2.alpha)), *M.T.morphism(m1.c2, m2.c2));
    day.m.morphism_map.push_back(day.target->find_morphism(alpha, c2));
  }
  return day;
}

DayDerivation m_derivation(const SliceCache& pos, const MonoidalStructure& M, const DayProduct& day, ObjId P,
                           ObjId Q) {
  const auto& t = pos.system();
  const auto& T = t.T();
  auto PQ = M.D.object(P, Q);
  if (!PQ) throw StructuralError("m_derivation: tensor undefined");
  if (t.over(P) != day.left->B || t.over(Q) != day.right->B) throw StructuralError("m_derivation: base mismatch");
  auto rp = pos.rep(P);
  auto rq = pos.rep(Q);
  DayDerivation out;
  out.target = pos.rep(*PQ);
  out.source = pair_tensor(day.domain, rp->presheaf, rq->presheaf);
  MorId back = inverse_of(T, M.kappa(P, Q));
  FunctorData F = day.m;
  if (!T.is_identity(back)) F = compose_functors(F, slice_action(*day.target, *out.target->slice, back));
  Family theta(day.domain.objects.size());
  for (std::size_t k = 0; k < day.domain.objects.size(); ++k) {
    auto [x, y] = day.domain.objects[k];
    ObjId Fo = F.on_object(static_cast<ObjId>(k));
    for (MorId b1 : rp->elements[x])
      for (MorId b2 : rq->elements[y]) theta[k].push_back(out.target->element_of(Fo, *M.D.morphism(b1, b2)));
  }
  out.derivation = PshDerivation{std::move(F), std::move(theta)};
  return out;
}

std::optional<ResidualCert> find_residual(const TensorTable& tt, Side side, ObjId A, ObjId C) {
  const auto& K = *tt.category;
  MorId idA = K.identity(A);
  auto with = [&](ObjId X) { return side == Side::left ? tt.object(A, X) : tt.object(X, A); };
  auto lift = [&](MorId f) { return side == Side::left ? tt.morphism(idA, f) : tt.morphism(f, idA); };
  for (std::size_t xi = 0; xi < K.object_count(); ++xi) {
    ObjId X = static_cast<ObjId>(xi);
    auto AX = with(X);
    if (!AX) continue;
    for (MorId plug : K.hom(*AX, C)) {
      bool universal = true;
      for (std::size_t y = 0; y < K.object_count() && universal; ++y) {
        ObjId Y = static_cast<ObjId>(y);
        auto AY = with(Y);
        if (!AY) continue;
        std::vector<MorId> images;
        for (MorId f : K.hom(Y, X)) images.push_back(K.compose(*lift(f), plug));
        std::sort(images.begin(), images.end());
        auto target = K.hom(*AY, C);
        universal = std::equal(images.begin(), images.end(), target.begin(), target.end());
      }
      if (universal) return ResidualCert{X, plug};
    }
  }
  return std::nullopt;
}

std::optional<ResidualCert> find_refined_residual(const RefinementSystem& t, const MonoidalStructure& M, Side side,
                                                  ObjId P, ObjId R, const ResidualCert& base) {
  const auto& D = t.D();
  const auto& T = t.T();
  ObjId A = t.over(P);
  MorId idP = D.identity(P);
  MorId idA = T.identity(A);
  auto with = [&](ObjId X) { return side == Side::left ? M.D.object(P, X) : M.D.object(X, P); };
  auto kap = [&](ObjId X) { return side == Side::left ? M.kappa(P, X) : M.kappa(X, P); };
  auto lift = [&](MorId f) { return side == Side::left ? M.D.morphism(idP, f) : M.D.morphism(f, idP); };
  auto lift_T = [&](MorId d) { return side == Side::left ? M.T.morphism(idA, d) : M.T.morphism(d, idA); };
  for (ObjId X : t.fiber(base.object)) {
    auto PX = with(X);
    if (!PX) continue;
    MorId over = T.compose(kap(X), base.plug);
    for (MorId plug : D.hom(*PX, R)) {
      if (t.image(plug) != over) continue;
      bool universal = true;
      for (std::size_t q = 0; q < D.object_count() && universal; ++q) {
        ObjId Q = static_cast<ObjId>(q);
        auto PQ = with(Q);
        if (!PQ) continue;
        for (MorId d : T.hom(t.over(Q), base.object)) {
          auto ld = lift_T(d);
          if (!ld) {
            universal = false;
            break;
          }
          MorId want = T.compose(kap(Q), T.compose(*ld, base.plug));
          std::vector<MorId> images;
          for (MorId delta : D.hom(Q, X))
            if (t.image(delta) == d) images.push_back(D.compose(*lift(delta), plug));
          std::sort(images.begin(), images.end());
          std::vector<MorId> target;
          for (MorId beta : D.hom(*PQ, R))
            if (t.image(beta) == want) target.push_back(beta);
          if (images != target) {
            universal = false;
            break;
          }
        }
      }
      if (universal) return ResidualCert{X, plug};
    }
  }
  return std::nullopt;
}

std::optional<Costr> costr(const SliceCache& pos, const MonoidalStructure& M, Side side, ObjId A, ObjId C) {
  if (!M.strict() || !M.T.domain.total() || !M.D.domain.total()) return std::nullopt;
  auto base = find_residual(M.T, side, A, C);
  if (!base) return std::nullopt;
  Costr k;
  k.base = *base;
  k.day = side == Side::left ? day_product(pos, M, A, base->object) : day_product(pos, M, base->object, A);
  FunctorData G = compose_functors(k.day.m, pos.action(base->plug));
  SlicePtr arg = side == Side::left ? k.day.left : k.day.right;
  SlicePtr res = side == Side::left ? k.day.right : k.day.left;
  k.product = product(arg->category, res->category);
  k.uncurried = FunctorData{k.product.category, G.target, {}, {}};
  const auto& X = *arg->category;
  const auto& Y = *res->category;
  for (std::size_t x = 0; x < X.object_count(); ++x) {
    for (std::size_t y = 0; y < Y.object_count(); ++y) {
      ObjId o = side == Side::left ? k.day.domain.find(static_cast<ObjId>(x), static_cast<ObjId>(y))
                                   : k.day.domain.find(static_cast<ObjId>(y), static_cast<ObjId>(x));
      k.uncurried.object_map.push_back(G.on_object(o));
    }
  }
  for (std::size_t f = 0; f < X.morphism_count(); ++f) {
    for (std::size_t g = 0; g < Y.morphism_count(); ++g) {
      MorId m = side == Side::left ? k.day.domain.find_morphism(static_cast<MorId>(f), static_cast<MorId>(g))
                                   : k.day.domain.find_morphism(static_cast<MorId>(g), static_cast<MorId>(f));
      k.uncurried.morphism_map.push_back(G.on_morphism(m));
    }
  }
  for (std::size_t y = 0; y < Y.object_count(); ++y) {
    FunctorData Fy{k.product.left, G.target, {}, {}};
    for (std::size_t x = 0; x < X.object_count(); ++x)
      Fy.object_map.push_back(k.uncurried.on_object(k.product.object(static_cast<ObjId>(x), static_cast<ObjId>(y))));
    for (std::size_t f = 0; f < X.morphism_count(); ++f) {
      Fy.morphism_map.push_back(
          k.uncurried.on_morphism(k.product.morphism(static_cast<MorId>(f), Y.identity(static_cast<ObjId>(y)))));
    }
    k.objects.push_back(std::move(Fy));
  }
  for (std::size_t g = 0; g < Y.morphism_count(); ++g) {
    NatTransData n{k.objects[Y.dom(static_cast<MorId>(g))], k.objects[Y.cod(static_cast<MorId>(g))], {}};
    for (std::size_t x = 0; x < X.object_count(); ++x) {
      n.components.push_back(
          k.uncurried.on_morphism(k.product.morphism(X.identity(static_cast<ObjId>(x)), static_cast<MorId>(g))));
    }
    k.morphisms.push_back(std::move(n));
  }
  return k;
}

ResidualAlong costr_residual(const Costr& k, const PresheafView& phi, const PresheafView& omega) {
  return residual_along(k.product, k.uncurried, phi, omega);
}

namespace {

CheckReport clause_tensor(const RepresentationContext& ctx, const MonoidalStructure& M, ObjId P, ObjId Q) {
  const auto& t = ctx.system();
  CheckReport r("tensor clause", "m pushes the external tensor onto the tensor");
  auto PQ = M.D.object(P, Q);
  if (!PQ) {
    r.skip("hypothesis unmet: tensor of the refinements undefined");
    return r;
  }
  const std::string inst = "(" + t.D().object_name(P) + "," + t.D().object_name(Q) + ")";
  auto day = day_product(ctx.pos(), M, t.over(P), t.over(Q));
  auto md = m_derivation(ctx.pos(), M, day, P, Q);
  const auto& target = md.target->presheaf;
  auto pushed = push_psh(md.derivation.F, md.source);
  r.expect(vertical_iso_psh(pushed.presheaf, target).has_value(),
           [&] { return "push along m of the external tensor differs from the tensor at " + inst; });
  auto opc = opcartesian_check(md.source, target, md.derivation,
                               default_universal_tests(md.target->slice->category, target));
  if (!opc.ok()) opc.counterexample = "m-derivation at " + inst + ": " + opc.counterexample.value_or("");
  opc.name.clear();
  r.absorb(opc);
  return r;
}

CheckReport clause_residual(const RepresentationContext& ctx, const MonoidalStructure& M, Side side, ObjId P,
                            ObjId R) {
  const auto& t = ctx.system();
  const auto& D = t.D();
  const char* which = side == Side::left ? "left" : "right";
  CheckReport r(std::string(which) + " residual clause", "costr pulls the residual back onto the residual");
  if (!M.strict() || !M.T.domain.total() || !M.D.domain.total()) {
    r.skip("hypothesis unmet: residual clauses need a strict total tensor");
    return r;
  }
  auto k = costr(ctx.pos(), M, side, t.over(P), t.over(R));
  if (!k) {
    r.skip("hypothesis unmet: base residual absent");
    return r;
  }
  auto X = find_refined_residual(t, M, side, P, R, k->base);
  if (!X) {
    r.skip("hypothesis unmet: refined residual absent");
    return r;
  }
  const std::string inst = "(" + D.object_name(P) + "," + D.object_name(R) + ")";
  auto rp = ctx.pos().rep(P);
  auto rx = ctx.pos().rep(X->object);
  auto ra = costr_residual(*k, rp->presheaf, ctx.pos().rep(R)->presheaf);
  auto rr = ctx.pos().rep(R);
  r.expect(vertical_iso_psh(rx->presheaf, ra.presheaf).has_value(),
           [&] { return std::string(which) + " residual at " + inst + " not represented by the pulled residual"; });

  // delta |-> (beta |-> beta (x) delta ; plug) is a natural bijection.
  const auto& prod = k->product;
  Family fam(rx->elements.size());
  bool ok = true;
  for (std::size_t y = 0; y < rx->elements.size() && ok; ++y) {
    for (MorId delta : rx->elements[y]) {
      Family s(rp->elements.size());
      for (std::size_t x = 0; x < rp->elements.size(); ++x) {
        ObjId target = k->uncurried.on_object(prod.object(static_cast<ObjId>(x), static_cast<ObjId>(y)));
        for (MorId beta : rp->elements[x]) {
          MorId pair = side == Side::left ? *M.D.morphism(beta, delta) : *M.D.morphism(delta, beta);
          s[x].push_back(rr->element_of(target, D.compose(pair, X->plug)));
        }
      }
      const auto& row = ra.elements[y];
      auto it = std::lower_bound(row.begin(), row.end(), s);
      if (it == row.end() || *it != s) {
        ok = false;
        break;
      }
      fam[y].push_back(static_cast<Elem>(it - row.begin()));
    }
    auto v = fam[y];
    std::sort(v.begin(), v.end());
    ok = ok && std::adjacent_find(v.begin(), v.end()) == v.end() && v.size() == ra.elements[y].size();
  }
  ok = ok && is_natural(rx->presheaf, ra.presheaf, fam);
  r.expect(ok, [&] { return std::string("costr derivation at ") + inst + " is not cartesian"; });
  return r;
}

}  // namespace

CheckReport genday_check(const RepresentationContext& ctx, const MonoidalStructure& M, ObjId P, ObjId Q, ObjId R) {
  CheckReport r("genday", "representation preserves tensor and residuals up to change of base");
  r.absorb(clause_tensor(ctx, M, P, Q));
  r.absorb(clause_residual(ctx, M, Side::left, P, R));
  r.absorb(clause_residual(ctx, M, Side::right, Q, R));
  return r;
}

CheckReport genday_check_all(const RepresentationContext& ctx, const MonoidalStructure& M) {
  CheckReport r("genday", "representation preserves tensor and residuals up to change of base");
  const std::size_t n = ctx.system().D().object_count();
  std::vector<CheckReport> tensor(n * n);
  std::vector<CheckReport> left(n * n);
  std::vector<CheckReport> right(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      ObjId x = static_cast<ObjId>(a);
      ObjId y = static_cast<ObjId>(b);
      tensor[a * n + b] = clause_tensor(ctx, M, x, y);
      left[a * n + b] = clause_residual(ctx, M, Side::left, x, y);
      right[a * n + b] = clause_residual(ctx, M, Side::right, x, y);
    }
  }
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q)
      for (std::size_t s = 0; s < n; ++s) {
        r.absorb(tensor[p * n + q]);
        r.absorb(left[p * n + s]);
        r.absorb(right[q * n + s]);
      }
  return r;
}

// ---------------------------------------------------------------------------
// Monoid fibers

std::optional<LiftCertificate> fiber_tensor(const RefinementSystem& t, const MonoidalStructure& M,
                                            const MonoidObject& w, ObjId P, ObjId Q) {
  if (t.over(P) != w.W || t.over(Q) != w.W) throw StructuralError("fiber_tensor: refinements not over W");
  auto PQ = M.D.object(P, Q);
  if (!PQ) return std::nullopt;
  return find_pushforward(t, t.T().compose(M.kappa(P, Q), w.multiplication), *PQ);
}

std::optional<MorId> curried_multiplication(const MonoidalStructure& M, const MonoidObject& w, Side side) {
  const auto& T = *M.T.category;
  auto base = find_residual(M.T, side, w.W, w.W);
  if (!base) return std::nullopt;
  MorId id = T.identity(w.W);
  for (MorId f : T.hom(w.W, base->object)) {
    auto lifted = side == Side::left ? M.T.morphism(id, f) : M.T.morphism(f, id);
    if (lifted && T.compose(*lifted, base->plug) == w.multiplication) return f;
  }
  return std::nullopt;
}

std::optional<FiberResidual> fiber_residual(const RefinementSystem& t, const MonoidalStructure& M,
                                            const MonoidObject& w, Side side, ObjId P, ObjId R) {
  if (t.over(P) != w.W || t.over(R) != w.W) throw StructuralError("fiber_residual: refinements not over W");
  auto base = find_residual(M.T, side, w.W, w.W);
  if (!base) return std::nullopt;
  auto X = find_refined_residual(t, M, side, P, R, *base);
  if (!X) return std::nullopt;
  auto f = curried_multiplication(M, w, side);
  if (!f) return std::nullopt;
  auto pb = find_pullback(t, *f, X->object);
  if (!pb) return std::nullopt;
  return FiberResidual{*X, *pb};
}

Pushforward day_tensor(const RepresentationContext& ctx, const MonoidalStructure& M, const MonoidObject& w, ObjId P,
                       ObjId Q) {
  auto day = day_product(ctx.pos(), M, w.W, w.W);
  FunctorData G = compose_functors(day.m, ctx.pos().action(w.multiplication));
  auto src = pair_tensor(day.domain, ctx.pos().rep(P)->presheaf, ctx.pos().rep(Q)->presheaf);
  return push_psh(G, src);
}

CheckReport monoid_lax_check(const RepresentationContext& ctx, const MonoidalStructure& M, const MonoidObject& w) {
  const auto& t = ctx.system();
  const auto& D = t.D();
  CheckReport r("monoid", "fiber tensor is lax, fiber residuals are preserved");
  auto v = validate_monoid(M, w);
  r.expect(v.ok(), [&] { return "monoid laws: " + v.violations.front(); });
  if (!v.ok()) return r;
  auto day = day_product(ctx.pos(), M, w.W, w.W);
  FunctorData G = compose_functors(day.m, ctx.pos().action(w.multiplication));
  auto fib = t.fiber(w.W);
  std::size_t invertible = 0;
  std::size_t instances = 0;
  for (ObjId P : fib) {
    for (ObjId Q : fib) {
      auto ft = fiber_tensor(t, M, w, P, Q);
      if (!ft) {
        r.skip("hypothesis unmet: no pushforward along the multiplication");
        continue;
      }
      auto dayT = day_tensor(ctx, M, w, P, Q);
      const auto& target = ctx.pos().rep(ft->candidate)->presheaf;
      ++instances;
      r.expect(some_family(dayT.presheaf, target).has_value(), [&] {
        return "no coercion into the fiber tensor of " + D.object_name(P) + " and " + D.object_name(Q);
      });
      invertible += vertical_iso_psh(dayT.presheaf, target).has_value();
    }
  }
  r.note("tensor coercion invertible in " + std::to_string(invertible) + " of " + std::to_string(instances) +
         " instances");
  if (!M.strict() || !M.T.domain.total() || !M.D.domain.total()) {
    r.skip("hypothesis unmet: residual clauses need a strict total tensor");
    return r;
  }
  ProductCategory prod = product(day.left->category, day.right->category);
  FunctorData swapped{prod.category, G.target, {}, {}};
  const auto& S = *day.left->category;
  for (std::size_t x = 0; x < S.object_count(); ++x)
    for (std::size_t y = 0; y < S.object_count(); ++y)
      swapped.object_map.push_back(G.on_object(prod.object(static_cast<ObjId>(y), static_cast<ObjId>(x))));
  for (std::size_t f = 0; f < S.morphism_count(); ++f)
    for (std::size_t g = 0; g < S.morphism_count(); ++g)
      swapped.morphism_map.push_back(G.on_morphism(prod.morphism(static_cast<MorId>(g), static_cast<MorId>(f))));
  for (Side side : {Side::left, Side::right}) {
    const FunctorData& H = side == Side::left ? G : swapped;
    for (ObjId P : fib) {
      for (ObjId R : fib) {
        auto fr = fiber_residual(t, M, w, side, P, R);
        if (!fr) {
          r.skip("hypothesis unmet: fiber residual absent");
          continue;
        }
        auto res = residual_along(prod, H, ctx.pos().rep(P)->presheaf, ctx.pos().rep(R)->presheaf);
        r.expect(vertical_iso_psh(ctx.pos().rep(fr->pullback.candidate)->presheaf, res.presheaf).has_value(), [&] {
          return std::string(side == Side::left ? "left" : "right") + " fiber residual of " + D.object_name(P) +
                 " and " + D.object_name(R) + " not preserved";
        });
      }
    }
  }
  return r;
}

}  // namespace refine
