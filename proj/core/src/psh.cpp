#include "refine/psh.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <set>

namespace refine {

// ---------------------------------------------------------------------------
// Presheaf

Presheaf::Presheaf(CatPtr base, std::vector<std::size_t> counts, std::vector<std::vector<Elem>> action,
                   std::vector<std::vector<std::string>> labels)
    : base_(std::move(base)), counts_(std::move(counts)), action_(std::move(action)), labels_(std::move(labels)) {
  if (!base_) throw StructuralError("presheaf without base");
  if (counts_.size() != base_->object_count()) throw StructuralError("presheaf: element table size mismatch");
  if (action_.size() != base_->morphism_count()) throw StructuralError("presheaf: action table size mismatch");
  for (std::size_t f = 0; f < action_.size(); ++f) {
    if (action_[f].size() != counts_[base_->cod(f)]) {
      throw StructuralError("presheaf: action of " + base_->morphism_name(f) + " has wrong length");
    }
    for (Elem x : action_[f]) {
      if (x >= counts_[base_->dom(f)]) {
        throw StructuralError("presheaf: action of " + base_->morphism_name(f) + " out of range");
      }
    }
  }
  if (!labels_.empty()) {
    if (labels_.size() != counts_.size()) throw StructuralError("presheaf: label table size mismatch");
    for (std::size_t a = 0; a < counts_.size(); ++a) {
      if (labels_[a].size() != counts_[a]) throw StructuralError("presheaf: label table size mismatch");
    }
  }
}

std::size_t Presheaf::total() const { return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0}); }

std::string Presheaf::label(ObjId a, Elem x) const {
  if (!labels_.empty()) return labels_.at(a).at(x);
  return std::to_string(x);
}

bool Presheaf::same_tables(const Presheaf& o) const {
  return base_->same_structure(*o.base_) && counts_ == o.counts_ && action_ == o.action_;
}

ValidationReport validate_presheaf(const PresheafView& p) {
  ValidationReport r;
  const auto& C = p.base();
  for (std::size_t a = 0; a < C.object_count(); ++a) {
    MorId id = C.identity(a);
    for (Elem x = 0; x < p.count(a); ++x) {
      if (p.act(id, x) != x) {
        r.add("identity of " + C.object_name(a) + " does not act trivially");
        return r;
      }
    }
  }
  for (std::size_t fi = 0; fi < C.morphism_count(); ++fi) {
    auto f = static_cast<MorId>(fi);
    for (MorId g : C.outgoing(C.cod(f))) {
      MorId fg = C.compose(f, g);
      for (Elem z = 0; z < p.count(C.cod(g)); ++z) {
        if (p.act(fg, z) != p.act(f, p.act(g, z))) {
          r.add("contravariance fails for " + C.morphism_name(f) + ";" + C.morphism_name(g));
          return r;
        }
      }
    }
  }
  return r;
}

Presheaf materialize(const PresheafView& p, const CatPtr& base) {
  std::vector<std::size_t> counts(base->object_count());
  for (std::size_t a = 0; a < counts.size(); ++a) counts[a] = p.count(a);
  std::vector<std::vector<Elem>> action(base->morphism_count());
  for (std::size_t f = 0; f < action.size(); ++f) {
    auto& row = action[f];
    row.resize(counts[base->cod(f)]);
    for (Elem y = 0; y < row.size(); ++y) row[y] = p.act(f, y);
  }
  return Presheaf(base, std::move(counts), std::move(action));
}

// ---------------------------------------------------------------------------
// Natural families

namespace {

constexpr std::int64_t kUnset = -1;

struct FamilySearch {
  const PresheafView& phi;
  const PresheafView& omega;
  const std::function<bool(const Family&)>& visit;
  FamilyOptions opts;

  const FinCategory& A;
  std::vector<std::size_t> offset;    // element id = offset[a] + x
  std::vector<ObjId> owner;           // element id -> object
  std::vector<std::int64_t> value;
  std::vector<std::size_t> order;     // branching order of element ids
  std::vector<std::size_t> trail;
  std::vector<std::size_t> used_offset;
  std::vector<std::int64_t> used;     // injective mode: omega element -> phi element
  std::size_t visited = 0;
  bool stopped = false;

  FamilySearch(const PresheafView& p, const PresheafView& o, const std::function<bool(const Family&)>& v,
               FamilyOptions op)
      : phi(p), omega(o), visit(v), opts(op), A(p.base()) {}

  std::size_t elements() const { return owner.size(); }

  Family family() const {
    Family f(A.object_count());
    for (std::size_t a = 0; a < A.object_count(); ++a) {
      f[a].resize(phi.count(a));
      for (std::size_t x = 0; x < f[a].size(); ++x) f[a][x] = static_cast<Elem>(value[offset[a] + x]);
    }
    return f;
  }

  void prepare() {
    offset.resize(A.object_count() + 1);
    for (std::size_t a = 0; a < A.object_count(); ++a) {
      offset[a + 1] = offset[a] + phi.count(a);
      for (std::size_t x = 0; x < phi.count(a); ++x) owner.push_back(static_cast<ObjId>(a));
    }
    value.assign(elements(), kUnset);
    std::vector<std::size_t> closure(elements(), 0);
    std::vector<std::size_t> stamp(elements(), std::numeric_limits<std::size_t>::max());
    for (std::size_t e = 0; e < elements(); ++e) {
      ObjId b = owner[e];
      Elem y = static_cast<Elem>(e - offset[b]);
      for (MorId f : A.incoming(b)) {
        std::size_t r = offset[A.dom(f)] + phi.act(f, y);
        if (stamp[r] != e) {
          stamp[r] = e;
          ++closure[e];
        }
      }
    }
    order.resize(elements());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      if (opts.injective && omega.count(owner[x]) != omega.count(owner[y])) {
        return omega.count(owner[x]) < omega.count(owner[y]);
      }
      return closure[x] > closure[y];
    });
    if (opts.injective) {
      used_offset.resize(A.object_count() + 1);
      for (std::size_t a = 0; a < A.object_count(); ++a) used_offset[a + 1] = used_offset[a] + omega.count(a);
      used.assign(used_offset.back(), kUnset);
    }
  }

  bool set(std::size_t e, std::int64_t v) {
    if (value[e] != kUnset) return value[e] == v;
    if (opts.injective) {
      auto& u = used[used_offset[owner[e]] + static_cast<std::size_t>(v)];
      if (u != kUnset) return false;
      u = static_cast<std::int64_t>(e);
    }
    value[e] = v;
    trail.push_back(e);
    return true;
  }

  void undo(std::size_t mark) {
    while (trail.size() > mark) {
      std::size_t e = trail.back();
      trail.pop_back();
      if (opts.injective) used[used_offset[owner[e]] + static_cast<std::size_t>(value[e])] = kUnset;
      value[e] = kUnset;
    }
  }

  bool propagate(std::size_t e, Elem v) {
    ObjId b = owner[e];
    Elem y = static_cast<Elem>(e - offset[b]);
    for (MorId f : A.incoming(b)) {
      std::size_t r = offset[A.dom(f)] + phi.act(f, y);
      if (!set(r, omega.act(f, v))) return false;
    }
    return true;
  }

  void run(std::size_t k) {
    while (k < order.size() && value[order[k]] != kUnset) ++k;
    if (k == order.size()) {
      ++visited;
      if (!visit(family())) stopped = true;
      return;
    }
    std::size_t e = order[k];
    const std::size_t n = omega.count(owner[e]);
    for (std::size_t v = 0; v < n && !stopped; ++v) {
      std::size_t mark = trail.size();
      if (propagate(e, static_cast<Elem>(v))) run(k + 1);
      undo(mark);
    }
  }
};

}  // namespace

std::size_t enumerate_families(const PresheafView& phi, const PresheafView& omega,
                               const std::function<bool(const Family&)>& visit, FamilyOptions opts) {
  const auto& A = phi.base();
  if (omega.base().object_count() != A.object_count() || omega.base().morphism_count() != A.morphism_count()) {
    throw StructuralError("families between presheaves over different bases");
  }
  bool singleton = true;
  for (std::size_t a = 0; a < A.object_count(); ++a) {
    if (phi.count(a) == 0) continue;
    const std::size_t n = omega.count(a);
    if (n == 0) return 0;
    if (n > 1 || (opts.injective && phi.count(a) > 1)) singleton = false;
  }
  if (singleton) {
    Family f(A.object_count());
    for (std::size_t a = 0; a < A.object_count(); ++a) f[a].assign(phi.count(a), 0);
    visit(f);
    return 1;
  }
  FamilySearch s(phi, omega, visit, opts);
  s.prepare();
  s.run(0);
  return s.visited;
}

std::vector<Family> all_families(const PresheafView& phi, const PresheafView& omega) {
  std::vector<Family> out;
  enumerate_families(phi, omega, [&](const Family& f) {
    out.push_back(f);
    return true;
  });
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<Family> some_family(const PresheafView& phi, const PresheafView& omega) {
  std::optional<Family> out;
  enumerate_families(phi, omega, [&](const Family& f) {
    out = f;
    return false;
  });
  return out;
}

std::size_t count_families(const PresheafView& phi, const PresheafView& omega) {
  return enumerate_families(phi, omega, [](const Family&) { return true; });
}

bool is_natural(const PresheafView& phi, const PresheafView& omega, const Family& theta) {
  const auto& A = phi.base();
  if (theta.size() != A.object_count()) return false;
  for (std::size_t a = 0; a < A.object_count(); ++a) {
    if (theta[a].size() != phi.count(a)) return false;
    for (Elem v : theta[a])
      if (v >= omega.count(a)) return false;
  }
  for (std::size_t f = 0; f < A.morphism_count(); ++f) {
    ObjId a = A.dom(f);
    ObjId b = A.cod(f);
    for (Elem y = 0; y < phi.count(b); ++y) {
      if (theta[a][phi.act(f, y)] != omega.act(f, theta[b][y])) return false;
    }
  }
  return true;
}

ValidationReport validate_psh_derivation(const PresheafView& phi, const PshDerivation& d, const PresheafView& psi) {
  ValidationReport r;
  auto fr = validate_functor(d.F);
  for (auto& v : fr.violations) r.add("functor: " + v);
  if (!r.ok()) return r;
  if (!is_natural(phi, PulledView(d.F, psi), d.theta)) r.add("family is not natural");
  return r;
}

std::vector<PshDerivation> psh_derivations(const PresheafView& phi, const FunctorData& F, const PresheafView& psi) {
  std::vector<PshDerivation> out;
  for (auto& f : all_families(phi, PulledView(F, psi))) out.push_back({F, std::move(f)});
  return out;
}

PshDerivation compose_psh(const PshDerivation& first, const PshDerivation& second) {
  PshDerivation out{compose_functors(first.F, second.F), first.theta};
  for (std::size_t a = 0; a < out.theta.size(); ++a) {
    ObjId Fa = first.F.on_object(a);
    for (auto& v : out.theta[a]) v = second.theta[Fa][v];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Constructions

Presheaf pull_psh(const FunctorData& F, const PresheafView& psi) {
  if (psi.base().object_count() != F.target->object_count()) throw StructuralError("pull_psh: base mismatch");
  const auto* labelled = dynamic_cast<const Presheaf*>(&psi);
  auto p = materialize(PulledView(F, psi), F.source);
  if (!labelled || !labelled->has_labels()) return p;
  std::vector<std::vector<std::string>> labels(F.source->object_count());
  for (std::size_t a = 0; a < labels.size(); ++a) {
    for (Elem x = 0; x < p.count(a); ++x) labels[a].push_back(labelled->label(F.on_object(a), x));
  }
  std::vector<std::vector<Elem>> action;
  for (std::size_t f = 0; f < F.source->morphism_count(); ++f) action.push_back(p.action(f));
  return Presheaf(F.source, p.counts(), std::move(action), std::move(labels));
}

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::size_t x, std::size_t y) {
    x = find(x);
    y = find(y);
    if (x == y) return;
    if (x < y)
      parent[y] = x;
    else
      parent[x] = y;
  }
};

std::size_t position_in(std::span<const MorId> hom, MorId h) {
  auto it = std::lower_bound(hom.begin(), hom.end(), h);
  return static_cast<std::size_t>(it - hom.begin());
}

}  // namespace

Pushforward push_psh(const FunctorData& F, const PresheafView& phi) {
  const auto& A = *F.source;
  const auto& B = *F.target;
  if (phi.base().object_count() != A.object_count()) throw StructuralError("push_psh: base mismatch");
  const std::size_t nB = B.object_count();
  const std::size_t nA = A.object_count();

  std::vector<ObjId> support;
  for (std::size_t a = 0; a < nA; ++a)
    if (phi.count(static_cast<ObjId>(a)) > 0) support.push_back(static_cast<ObjId>(a));
  std::vector<MorId> active;  // morphisms into the support
  for (std::size_t u = 0; u < A.morphism_count(); ++u)
    if (phi.count(A.cod(static_cast<MorId>(u))) > 0) active.push_back(static_cast<MorId>(u));

  // Pair (a, h, x) at b has index start[b][a] + pos(h)*|phi(a)| + x.
  std::vector<std::vector<std::size_t>> start(nB, std::vector<std::size_t>(nA + 1, 0));
  for (std::size_t b = 0; b < nB; ++b) {
    for (std::size_t a = 0; a < nA; ++a) {
      std::size_t n = phi.count(static_cast<ObjId>(a));
      start[b][a + 1] = start[b][a] + (n ? B.hom(static_cast<ObjId>(b), F.on_object(static_cast<ObjId>(a))).size() * n : 0);
    }
  }
  auto pair_index = [&](ObjId b, ObjId a, MorId h, Elem x) {
    return start[b][a] + position_in(B.hom(b, F.on_object(a)), h) * phi.count(a) + x;
  };

  std::vector<std::vector<std::size_t>> class_of(nB);  // pair -> element
  std::vector<std::vector<std::size_t>> reps(nB);      // element -> least pair
  std::vector<std::vector<std::string>> labels(nB);
  std::vector<std::vector<std::tuple<ObjId, MorId, Elem>>> decode(nB);
  for (std::size_t b = 0; b < nB; ++b) {
    const std::size_t n = start[b][nA];
    auto& dec = decode[b];
    dec.resize(n);
    for (ObjId a : support) {
      auto hom = B.hom(static_cast<ObjId>(b), F.on_object(a));
      for (std::size_t i = 0; i < hom.size(); ++i)
        for (Elem x = 0; x < phi.count(a); ++x) dec[start[b][a] + i * phi.count(a) + x] = {a, hom[i], x};
    }
    UnionFind uf(n);
    for (MorId u : active) {
      ObjId a = A.dom(u);
      ObjId a2 = A.cod(u);
      MorId Fu = F.on_morphism(u);
      for (MorId h : B.hom(b, F.on_object(a))) {
        MorId hFu = B.compose(h, Fu);
        for (Elem x2 = 0; x2 < phi.count(a2); ++x2) {
          uf.unite(pair_index(b, a2, hFu, x2), pair_index(b, a, h, phi.act(u, x2)));
        }
      }
    }
    auto& cls = class_of[b];
    cls.assign(n, 0);
    std::vector<std::size_t> elem_of_root(n, std::numeric_limits<std::size_t>::max());
    for (std::size_t p = 0; p < n; ++p) {
      std::size_t root = uf.find(p);
      if (elem_of_root[root] == std::numeric_limits<std::size_t>::max()) {
        elem_of_root[root] = reps[b].size();
        reps[b].push_back(p);  // roots are least members, so p == root here
        auto [a, h, x] = dec[p];
        labels[b].push_back("[" + B.morphism_name(h) + "|" + A.object_name(a) + "#" + std::to_string(x) + "]");
      }
      cls[p] = elem_of_root[root];
    }
  }

  std::vector<std::size_t> counts(nB);
  for (std::size_t b = 0; b < nB; ++b) counts[b] = reps[b].size();
  std::vector<std::vector<Elem>> action(B.morphism_count());
  for (std::size_t ki = 0; ki < B.morphism_count(); ++ki) {
    auto k = static_cast<MorId>(ki);
    ObjId b2 = B.dom(k);
    ObjId b = B.cod(k);
    auto& row = action[k];
    row.assign(counts[b], 0);
    std::vector<bool> seen(counts[b], false);
    for (std::size_t p = 0; p < decode[b].size(); ++p) {
      auto [a, h, x] = decode[b][p];
      std::size_t target = class_of[b2][pair_index(b2, a, B.compose(k, h), x)];
      std::size_t e = class_of[b][p];
      if (!seen[e]) {
        seen[e] = true;
        row[e] = static_cast<Elem>(target);
      } else if (row[e] != target) {
        throw StructuralError("push_psh: restriction along " + B.morphism_name(k) + " is not well defined");
      }
    }
  }

  PshDerivation structural{F, Family(nA)};
  for (std::size_t a = 0; a < nA; ++a) {
    ObjId Fa = F.on_object(a);
    MorId id = B.identity(Fa);
    for (Elem x = 0; x < phi.count(a); ++x) {
      structural.theta[a].push_back(static_cast<Elem>(class_of[Fa][pair_index(Fa, a, id, x)]));
    }
  }
  return {Presheaf(F.target, std::move(counts), std::move(action), std::move(labels)), std::move(structural)};
}

Presheaf tensor_psh(const ProductCategory& base, const PresheafView& phi, const PresheafView& psi) {
  const auto& AB = *base.category;
  std::vector<std::size_t> counts(AB.object_count());
  for (std::size_t ab = 0; ab < counts.size(); ++ab) {
    counts[ab] = phi.count(base.left_object(ab)) * psi.count(base.right_object(ab));
  }
  std::vector<std::vector<Elem>> action(AB.morphism_count());
  for (std::size_t fg = 0; fg < action.size(); ++fg) {
    MorId f = base.left_morphism(fg);
    MorId g = base.right_morphism(fg);
    const std::size_t ny_cod = psi.count(base.right->cod(g));
    const std::size_t ny_dom = psi.count(base.right->dom(g));
    auto& row = action[fg];
    row.resize(counts[AB.cod(fg)]);
    for (std::size_t xy = 0; xy < row.size(); ++xy) {
      Elem x = static_cast<Elem>(xy / ny_cod);
      Elem y = static_cast<Elem>(xy % ny_cod);
      row[xy] = static_cast<Elem>(phi.act(f, x) * ny_dom + psi.act(g, y));
    }
  }
  return Presheaf(base.category, std::move(counts), std::move(action));
}

Presheaf unit_psh() {
  auto one = terminal_category();
  return Presheaf(one, {1}, {{0}}, {{"*"}});
}

Presheaf representable(const CatPtr& C, ObjId c) {
  std::vector<std::size_t> counts(C->object_count());
  std::vector<std::vector<std::string>> labels(C->object_count());
  for (std::size_t a = 0; a < counts.size(); ++a) {
    auto hom = C->hom(a, c);
    counts[a] = hom.size();
    for (MorId h : hom) labels[a].push_back(C->morphism_name(h));
  }
  std::vector<std::vector<Elem>> action(C->morphism_count());
  for (std::size_t f = 0; f < action.size(); ++f) {
    auto src = C->hom(C->cod(f), c);
    auto dst = C->hom(C->dom(f), c);
    for (MorId h : src) action[f].push_back(static_cast<Elem>(position_in(dst, C->compose(f, h))));
  }
  return Presheaf(C, std::move(counts), std::move(action), std::move(labels));
}

Presheaf constant_psh(const CatPtr& C, std::size_t n) {
  std::vector<Elem> row(n);
  std::iota(row.begin(), row.end(), Elem{0});
  return Presheaf(C, std::vector<std::size_t>(C->object_count(), n),
                  std::vector<std::vector<Elem>>(C->morphism_count(), row));
}

// ---------------------------------------------------------------------------
// Residuals

namespace {

Elem index_of(const std::vector<Family>& sorted, const Family& f) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), f);
  if (it == sorted.end() || *it != f) throw StructuralError("residual action leaves the element set");
  return static_cast<Elem>(it - sorted.begin());
}

}  // namespace

Residual residual_psh(Side, const Presheaf& phi, const Presheaf& omega, std::size_t size_guard) {
  Residual out;
  out.functors = std::make_shared<const FunctorCategory>(functor_category(phi.base_ptr(), omega.base_ptr(), size_guard));
  const auto& fc = *out.functors;
  const auto& FC = *fc.category;
  std::vector<std::size_t> counts(FC.object_count());
  out.elements.resize(FC.object_count());
  for (std::size_t F = 0; F < FC.object_count(); ++F) {
    out.elements[F] = all_families(phi, PulledView(fc.functors[F], omega));
    counts[F] = out.elements[F].size();
  }
  std::vector<std::vector<Elem>> action(FC.morphism_count());
  for (std::size_t n = 0; n < FC.morphism_count(); ++n) {
    const auto& eta = fc.transformations[n];
    ObjId F = FC.dom(n);
    ObjId G = FC.cod(n);
    for (const auto& s : out.elements[G]) {
      Family r = s;
      for (std::size_t a = 0; a < r.size(); ++a)
        for (auto& v : r[a]) v = omega.act(eta.components[a], v);
      action[n].push_back(index_of(out.elements[F], r));
    }
  }
  out.presheaf = Presheaf(fc.category, std::move(counts), std::move(action));
  return out;
}

ResidualAlong residual_along(const ProductCategory& ax, const FunctorData& G, const PresheafView& phi,
                             const PresheafView& omega) {
  const auto& A = *ax.left;
  const auto& X = *ax.right;
  ResidualAlong out;
  out.elements.resize(X.object_count());
  std::vector<std::size_t> counts(X.object_count());
  for (std::size_t x = 0; x < X.object_count(); ++x) {
    FunctorData Gx{ax.left, G.target, {}, {}};
    for (std::size_t a = 0; a < A.object_count(); ++a) Gx.object_map.push_back(G.on_object(ax.object(a, x)));
    for (std::size_t f = 0; f < A.morphism_count(); ++f) {
      Gx.morphism_map.push_back(G.on_morphism(ax.morphism(f, X.identity(x))));
    }
    out.elements[x] = all_families(phi, PulledView(Gx, omega));
    counts[x] = out.elements[x].size();
  }
  std::vector<std::vector<Elem>> action(X.morphism_count());
  for (std::size_t g = 0; g < X.morphism_count(); ++g) {
    ObjId x = X.dom(g);
    ObjId x2 = X.cod(g);
    for (const auto& s : out.elements[x2]) {
      Family r = s;
      for (std::size_t a = 0; a < r.size(); ++a) {
        MorId along = G.on_morphism(ax.morphism(A.identity(a), g));
        for (auto& v : r[a]) v = omega.act(along, v);
      }
      action[g].push_back(index_of(out.elements[x], r));
    }
  }
  out.presheaf = Presheaf(ax.right, std::move(counts), std::move(action));
  return out;
}

// ---------------------------------------------------------------------------
// Isomorphism search

std::optional<NaturalIso> vertical_iso_psh(const PresheafView& phi, const PresheafView& psi) {
  const auto& A = phi.base();
  if (psi.base().object_count() != A.object_count()) throw StructuralError("vertical_iso_psh: base mismatch");
  for (std::size_t a = 0; a < A.object_count(); ++a)
    if (phi.count(a) != psi.count(a)) return std::nullopt;
  std::optional<Family> found;
  enumerate_families(
      phi, psi,
      [&](const Family& f) {
        found = f;
        return false;
      },
      FamilyOptions{true});
  if (!found) return std::nullopt;
  NaturalIso iso{*found, Family(A.object_count())};
  for (std::size_t a = 0; a < A.object_count(); ++a) {
    iso.backward[a].assign(psi.count(a), 0);
    for (Elem x = 0; x < found->at(a).size(); ++x) iso.backward[a][(*found)[a][x]] = x;
  }
  return iso;
}

// ---------------------------------------------------------------------------
// Universal property oracle

CheckReport opcartesian_check(const PresheafView& phi, const PresheafView& psi, const PshDerivation& d,
                              const std::vector<UniversalTest>& tests) {
  CheckReport r("opcartesian", "pushforward has the opcartesian factoring property");
  r.expect(is_natural(phi, PulledView(d.F, psi), d.theta), [] { return std::string("structural family not natural"); });
  for (std::size_t i = 0; i < tests.size(); ++i) {
    const auto& test = tests[i];
    const auto& omega = *test.omega;
    FunctorData FG = compose_functors(d.F, test.G);
    auto through = all_families(psi, PulledView(test.G, omega));
    auto direct = all_families(phi, PulledView(FG, omega));
    std::vector<Family> images;
    images.reserve(through.size());
    for (const auto& sigma : through) {
      Family tau = d.theta;
      for (std::size_t a = 0; a < tau.size(); ++a) {
        ObjId Fa = d.F.on_object(a);
        for (auto& v : tau[a]) v = sigma[Fa][v];
      }
      images.push_back(std::move(tau));
    }
    std::sort(images.begin(), images.end());
    bool distinct = std::adjacent_find(images.begin(), images.end()) == images.end();
    r.expect(distinct && images == direct, [&] {
      return "test " + std::to_string(i) + ": " + std::to_string(through.size()) + " factorings map onto " +
             std::to_string(direct.size()) + " derivations" + (distinct ? "" : " (not injective)");
    });
  }
  return r;
}

std::vector<UniversalTest> default_universal_tests(const CatPtr& B, const Presheaf& psi) {
  std::vector<UniversalTest> tests;
  auto id = identity_functor(B);
  for (std::size_t b = 0; b < B->object_count(); ++b) {
    tests.push_back({id, std::make_shared<const Presheaf>(representable(B, b))});
  }
  for (std::size_t n = 0; n <= 2; ++n) tests.push_back({id, std::make_shared<const Presheaf>(constant_psh(B, n))});
  tests.push_back({id, std::make_shared<const Presheaf>(psi)});
  auto one = terminal_category();
  auto bang = constant_functor(B, one, 0);
  for (std::size_t n = 0; n <= 2; ++n) tests.push_back({bang, std::make_shared<const Presheaf>(constant_psh(one, n))});
  return tests;
}

std::string describe_family(const Family& f) {
  std::string s = "{";
  for (std::size_t a = 0; a < f.size(); ++a) {
    if (a) s += ", ";
    s += std::to_string(a) + ":[";
    for (std::size_t x = 0; x < f[a].size(); ++x) {
      if (x) s += ",";
      s += std::to_string(f[a][x]);
    }
    s += "]";
  }
  return s + "}";
}

}  // namespace refine
