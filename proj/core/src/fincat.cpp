#include "refine/fincat.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <tuple>

namespace refine {

namespace {

constexpr std::size_t kMaxReported = 50;

void report(ValidationReport& r, std::size_t& count, std::string msg) {
  ++count;
  if (r.violations.size() < kMaxReported) r.add(std::move(msg));
}

void finish(ValidationReport& r, std::size_t count) {
  if (count > r.violations.size()) {
    r.add("... and " + std::to_string(count - r.violations.size()) + " more");
  }
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > std::numeric_limits<std::uint64_t>::max() / b) return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

}  // namespace

// ---------------------------------------------------------------------------
// FinCategory

void FinCategory::check_object(ObjId a) const {
  if (a < 0 || static_cast<std::size_t>(a) >= object_names_.size()) {
    throw StructuralError("object index " + std::to_string(a) + " out of range");
  }
}

void FinCategory::check_morphism(MorId f) const {
  if (f < 0 || static_cast<std::size_t>(f) >= morphisms_.size()) {
    throw StructuralError("morphism index " + std::to_string(f) + " out of range");
  }
}

const std::string& FinCategory::object_name(ObjId a) const {
  check_object(a);
  return object_names_[a];
}

const Morphism& FinCategory::morphism(MorId f) const {
  check_morphism(f);
  return morphisms_[f];
}

MorId FinCategory::identity(ObjId a) const {
  check_object(a);
  return identities_[a];
}

MorId FinCategory::compose(MorId f, MorId g) const {
  check_morphism(f);
  check_morphism(g);
  if (morphisms_[f].cod != morphisms_[g].dom) {
    throw StructuralError("non-composable pair " + morphisms_[f].name + ";" + morphisms_[g].name);
  }
  return composite_[f][out_position_[g]];
}

MorId FinCategory::compose(std::initializer_list<MorId> chain) const {
  if (chain.size() == 0) throw StructuralError("empty composite");
  auto it = chain.begin();
  MorId acc = *it++;
  for (; it != chain.end(); ++it) acc = compose(acc, *it);
  return acc;
}

std::span<const MorId> FinCategory::outgoing(ObjId a) const {
  check_object(a);
  return outgoing_[a];
}

std::span<const MorId> FinCategory::incoming(ObjId b) const {
  check_object(b);
  return incoming_[b];
}

std::span<const MorId> FinCategory::hom(ObjId a, ObjId b) const {
  check_object(a);
  check_object(b);
  const auto& out = outgoing_[a];
  auto lo = std::lower_bound(out.begin(), out.end(), b,
                             [this](MorId f, ObjId x) { return morphisms_[f].cod < x; });
  auto hi = std::upper_bound(lo, out.end(), b,
                             [this](ObjId x, MorId f) { return x < morphisms_[f].cod; });
  return {out.data() + (lo - out.begin()), static_cast<std::size_t>(hi - lo)};
}

std::optional<ObjId> FinCategory::find_object(std::string_view name) const {
  auto it = object_index_.find(std::string(name));
  if (it == object_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<MorId> FinCategory::find_morphism(std::string_view name) const {
  auto it = morphism_index_.find(std::string(name));
  if (it == morphism_index_.end()) return std::nullopt;
  return it->second;
}

std::size_t FinCategory::max_hom_size() const {
  std::size_t best = 0;
  for (std::size_t a = 0; a < object_count(); ++a) {
    const auto& out = outgoing_[a];
    std::size_t run = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      run = (i > 0 && morphisms_[out[i]].cod == morphisms_[out[i - 1]].cod) ? run + 1 : 1;
      best = std::max(best, run);
    }
  }
  return best;
}

bool FinCategory::is_thin() const { return max_hom_size() <= 1; }

bool FinCategory::same_structure(const FinCategory& o) const {
  if (object_count() != o.object_count() || morphism_count() != o.morphism_count()) return false;
  if (identities_ != o.identities_) return false;
  for (std::size_t f = 0; f < morphism_count(); ++f) {
    if (morphisms_[f].dom != o.morphisms_[f].dom || morphisms_[f].cod != o.morphisms_[f].cod) return false;
  }
  return composite_ == o.composite_;
}

// ---------------------------------------------------------------------------
// Builder

ObjId FinCategory::Builder::add_object(std::string name) {
  auto id = static_cast<ObjId>(cat_.object_names_.size());
  if (!cat_.object_index_.emplace(name, id).second) {
    throw StructuralError("duplicate object name '" + name + "'");
  }
  cat_.object_names_.push_back(std::move(name));
  cat_.identities_.push_back(kNoMorphism);
  indexed_ = false;
  return id;
}

ObjId FinCategory::Builder::add_object_with_identity(std::string name, std::string identity_name) {
  ObjId a = add_object(std::move(name));
  set_identity(a, add_morphism(std::move(identity_name), a, a));
  return a;
}

MorId FinCategory::Builder::add_morphism(std::string name, ObjId dom, ObjId cod) {
  cat_.check_object(dom);
  cat_.check_object(cod);
  auto id = static_cast<MorId>(cat_.morphisms_.size());
  if (!cat_.morphism_index_.emplace(name, id).second) {
    throw StructuralError("duplicate morphism name '" + name + "'");
  }
  cat_.morphisms_.push_back({std::move(name), dom, cod});
  indexed_ = false;
  return id;
}

void FinCategory::Builder::set_identity(ObjId a, MorId f) {
  cat_.check_object(a);
  cat_.check_morphism(f);
  cat_.identities_[a] = f;
}

void FinCategory::Builder::set_composite(MorId f, MorId g, MorId h) {
  cat_.check_morphism(f);
  cat_.check_morphism(g);
  cat_.check_morphism(h);
  if (cat_.morphisms_[f].cod != cat_.morphisms_[g].dom) {
    throw StructuralError("composite declared for non-composable pair " + cat_.morphisms_[f].name + ";" +
                          cat_.morphisms_[g].name);
  }
  auto [it, inserted] = table_.emplace(std::make_pair(f, g), h);
  if (!inserted && it->second != h) {
    throw StructuralError("conflicting composites for " + cat_.morphisms_[f].name + ";" + cat_.morphisms_[g].name);
  }
}

void FinCategory::Builder::index() {
  auto& c = cat_;
  const std::size_t n = c.object_names_.size();
  for (std::size_t a = 0; a < n; ++a) {
    if (c.identities_[a] == kNoMorphism) throw StructuralError("missing identity for object '" + c.object_names_[a] + "'");
  }
  c.outgoing_.assign(n, {});
  c.incoming_.assign(n, {});
  for (std::size_t f = 0; f < c.morphisms_.size(); ++f) {
    c.outgoing_[c.morphisms_[f].dom].push_back(static_cast<MorId>(f));
    c.incoming_[c.morphisms_[f].cod].push_back(static_cast<MorId>(f));
  }
  for (auto& out : c.outgoing_) {
    std::stable_sort(out.begin(), out.end(),
                     [&](MorId x, MorId y) { return c.morphisms_[x].cod < c.morphisms_[y].cod; });
  }
  for (auto& in : c.incoming_) {
    std::stable_sort(in.begin(), in.end(),
                     [&](MorId x, MorId y) { return c.morphisms_[x].dom < c.morphisms_[y].dom; });
  }
  c.out_position_.assign(c.morphisms_.size(), 0);
  for (const auto& out : c.outgoing_) {
    for (std::size_t i = 0; i < out.size(); ++i) c.out_position_[out[i]] = i;
  }
  c.composite_.assign(c.morphisms_.size(), {});
  for (std::size_t f = 0; f < c.morphisms_.size(); ++f) {
    c.composite_[f].assign(c.outgoing_[c.morphisms_[f].cod].size(), kNoMorphism);
  }
  indexed_ = true;
}

CatPtr FinCategory::Builder::build() {
  index();
  auto& c = cat_;
  for (std::size_t f = 0; f < c.morphisms_.size(); ++f) {
    const auto& out = c.outgoing_[c.morphisms_[f].cod];
    for (std::size_t i = 0; i < out.size(); ++i) {
      MorId g = out[i];
      auto it = table_.find({static_cast<MorId>(f), g});
      MorId h = kNoMorphism;
      if (it != table_.end()) {
        h = it->second;
      } else if (c.identities_[c.morphisms_[f].dom] == static_cast<MorId>(f)) {
        h = g;
      } else if (c.identities_[c.morphisms_[g].cod] == g) {
        h = static_cast<MorId>(f);
      } else {
        throw StructuralError("missing composite " + c.morphisms_[f].name + ";" + c.morphisms_[g].name);
      }
      c.composite_[f][i] = h;
    }
  }
  return std::make_shared<const FinCategory>(std::move(cat_));
}

CatPtr FinCategory::Builder::build(const std::function<MorId(MorId, MorId)>& composite) {
  index();
  auto& c = cat_;
  for (std::size_t f = 0; f < c.morphisms_.size(); ++f) {
    const auto& out = c.outgoing_[c.morphisms_[f].cod];
    for (std::size_t i = 0; i < out.size(); ++i) {
      MorId h = composite(static_cast<MorId>(f), out[i]);
      c.check_morphism(h);
      c.composite_[f][i] = h;
    }
  }
  return std::make_shared<const FinCategory>(std::move(cat_));
}

// ---------------------------------------------------------------------------
// Validation

ValidationReport validate_category(const FinCategory& c) {
  ValidationReport r;
  std::size_t count = 0;
  for (std::size_t a = 0; a < c.object_count(); ++a) {
    MorId id = c.identity(static_cast<ObjId>(a));
    if (c.dom(id) != static_cast<ObjId>(a) || c.cod(id) != static_cast<ObjId>(a)) {
      report(r, count, "identity " + c.morphism_name(id) + " of " + c.object_name(a) + " has wrong endpoints");
    }
  }
  if (!r.ok()) return r;
  for (std::size_t fi = 0; fi < c.morphism_count(); ++fi) {
    auto f = static_cast<MorId>(fi);
    if (c.compose(c.identity(c.dom(f)), f) != f) report(r, count, "id;" + c.morphism_name(f) + " != " + c.morphism_name(f));
    if (c.compose(f, c.identity(c.cod(f))) != f) report(r, count, c.morphism_name(f) + ";id != " + c.morphism_name(f));
    for (MorId g : c.outgoing(c.cod(f))) {
      MorId fg = c.compose(f, g);
      if (c.dom(fg) != c.dom(f) || c.cod(fg) != c.cod(g)) {
        report(r, count, "composite " + c.morphism_name(f) + ";" + c.morphism_name(g) + " = " + c.morphism_name(fg) +
                             " has wrong endpoints");
      }
    }
  }
  if (!r.ok()) {
    finish(r, count);
    return r;
  }
  for (std::size_t fi = 0; fi < c.morphism_count(); ++fi) {
    auto f = static_cast<MorId>(fi);
    for (MorId g : c.outgoing(c.cod(f))) {
      MorId fg = c.compose(f, g);
      for (MorId h : c.outgoing(c.cod(g))) {
        if (c.compose(fg, h) != c.compose(f, c.compose(g, h))) {
          report(r, count, "associativity: (" + c.morphism_name(f) + ";" + c.morphism_name(g) + ");" +
                               c.morphism_name(h) + " != " + c.morphism_name(f) + ";(" + c.morphism_name(g) + ";" +
                               c.morphism_name(h) + ")");
        }
      }
    }
  }
  finish(r, count);
  return r;
}

// ---------------------------------------------------------------------------
// Constructions

CatPtr opposite(const CatPtr& c) {
  FinCategory::Builder b;
  for (std::size_t a = 0; a < c->object_count(); ++a) b.add_object(c->object_name(a));
  for (std::size_t f = 0; f < c->morphism_count(); ++f) {
    const auto& m = c->morphism(f);
    b.add_morphism(m.name, m.cod, m.dom);
  }
  for (std::size_t a = 0; a < c->object_count(); ++a) b.set_identity(a, c->identity(a));
  return b.build([&](MorId f, MorId g) { return c->compose(g, f); });
}

CatPtr terminal_category() {
  FinCategory::Builder b;
  b.add_object_with_identity("*", "id_*");
  return b.build();
}

CatPtr discrete_category(std::size_t n) {
  FinCategory::Builder b;
  for (std::size_t i = 0; i < n; ++i) b.add_object_with_identity("x" + std::to_string(i), "id_x" + std::to_string(i));
  return b.build();
}

ObjId ProductCategory::object(ObjId a, ObjId b) const {
  return a * static_cast<ObjId>(right->object_count()) + b;
}
MorId ProductCategory::morphism(MorId f, MorId g) const {
  return f * static_cast<MorId>(right->morphism_count()) + g;
}
ObjId ProductCategory::left_object(ObjId ab) const { return ab / static_cast<ObjId>(right->object_count()); }
ObjId ProductCategory::right_object(ObjId ab) const { return ab % static_cast<ObjId>(right->object_count()); }
MorId ProductCategory::left_morphism(MorId fg) const { return fg / static_cast<MorId>(right->morphism_count()); }
MorId ProductCategory::right_morphism(MorId fg) const { return fg % static_cast<MorId>(right->morphism_count()); }

ProductCategory product(const CatPtr& a, const CatPtr& b) {
  ProductCategory p{nullptr, a, b};
  FinCategory::Builder bld;
  for (std::size_t x = 0; x < a->object_count(); ++x) {
    for (std::size_t y = 0; y < b->object_count(); ++y) {
      bld.add_object("(" + a->object_name(x) + "," + b->object_name(y) + ")");
    }
  }
  for (std::size_t f = 0; f < a->morphism_count(); ++f) {
    for (std::size_t g = 0; g < b->morphism_count(); ++g) {
      bld.add_morphism("(" + a->morphism_name(f) + "," + b->morphism_name(g) + ")",
                       p.object(a->dom(f), b->dom(g)), p.object(a->cod(f), b->cod(g)));
    }
  }
  for (std::size_t x = 0; x < a->object_count(); ++x) {
    for (std::size_t y = 0; y < b->object_count(); ++y) {
      bld.set_identity(p.object(x, y), p.morphism(a->identity(x), b->identity(y)));
    }
  }
  p.category = bld.build([&](MorId fg, MorId hk) {
    return p.morphism(a->compose(p.left_morphism(fg), p.left_morphism(hk)),
                      b->compose(p.right_morphism(fg), p.right_morphism(hk)));
  });
  return p;
}

Subcategory full_subcategory(const CatPtr& c, const std::function<bool(ObjId)>& keep) {
  Subcategory s;
  s.object_of.assign(c->object_count(), kNoObject);
  FinCategory::Builder b;
  std::vector<ObjId> parent_obj;
  for (std::size_t a = 0; a < c->object_count(); ++a) {
    if (keep(static_cast<ObjId>(a))) {
      s.object_of[a] = b.add_object(c->object_name(a));
      parent_obj.push_back(static_cast<ObjId>(a));
    }
  }
  std::vector<MorId> parent_mor;
  std::vector<MorId> sub_of(c->morphism_count(), kNoMorphism);
  for (std::size_t f = 0; f < c->morphism_count(); ++f) {
    ObjId d = s.object_of[c->dom(f)];
    ObjId e = s.object_of[c->cod(f)];
    if (d != kNoObject && e != kNoObject) {
      sub_of[f] = b.add_morphism(c->morphism_name(f), d, e);
      parent_mor.push_back(static_cast<MorId>(f));
    }
  }
  for (std::size_t i = 0; i < parent_obj.size(); ++i) b.set_identity(i, sub_of[c->identity(parent_obj[i])]);
  s.category = b.build([&](MorId f, MorId g) { return sub_of[c->compose(parent_mor[f], parent_mor[g])]; });
  s.inclusion = FunctorData{s.category, c, parent_obj, parent_mor};
  return s;
}

// ---------------------------------------------------------------------------
// Functors

ValidationReport validate_functor(const FunctorData& fn) {
  ValidationReport r;
  std::size_t count = 0;
  const auto& a = *fn.source;
  const auto& c = *fn.target;
  if (fn.object_map.size() != a.object_count() || fn.morphism_map.size() != a.morphism_count()) {
    r.add("functor tables have wrong size");
    return r;
  }
  for (ObjId x : fn.object_map) {
    if (x < 0 || static_cast<std::size_t>(x) >= c.object_count()) {
      r.add("object image out of range");
      return r;
    }
  }
  for (MorId f : fn.morphism_map) {
    if (f < 0 || static_cast<std::size_t>(f) >= c.morphism_count()) {
      r.add("morphism image out of range");
      return r;
    }
  }
  for (std::size_t f = 0; f < a.morphism_count(); ++f) {
    MorId img = fn.morphism_map[f];
    if (c.dom(img) != fn.object_map[a.dom(f)] || c.cod(img) != fn.object_map[a.cod(f)]) {
      report(r, count, "image of " + a.morphism_name(f) + " has wrong endpoints");
    }
  }
  if (!r.ok()) {
    finish(r, count);
    return r;
  }
  for (std::size_t x = 0; x < a.object_count(); ++x) {
    if (fn.morphism_map[a.identity(x)] != c.identity(fn.object_map[x])) {
      report(r, count, "identity of " + a.object_name(x) + " not preserved");
    }
  }
  for (std::size_t fi = 0; fi < a.morphism_count(); ++fi) {
    auto f = static_cast<MorId>(fi);
    for (MorId g : a.outgoing(a.cod(f))) {
      if (fn.morphism_map[a.compose(f, g)] != c.compose(fn.morphism_map[f], fn.morphism_map[g])) {
        report(r, count, "composite " + a.morphism_name(f) + ";" + a.morphism_name(g) + " not preserved");
      }
    }
  }
  finish(r, count);
  return r;
}

FunctorData identity_functor(const CatPtr& c) {
  FunctorData f{c, c, {}, {}};
  for (std::size_t a = 0; a < c->object_count(); ++a) f.object_map.push_back(static_cast<ObjId>(a));
  for (std::size_t m = 0; m < c->morphism_count(); ++m) f.morphism_map.push_back(static_cast<MorId>(m));
  return f;
}

FunctorData compose_functors(const FunctorData& f, const FunctorData& g) {
  if (f.target.get() != g.source.get() && !f.target->same_structure(*g.source)) {
    throw StructuralError("functor composite: target of first is not source of second");
  }
  FunctorData h{f.source, g.target, {}, {}};
  h.object_map.reserve(f.object_map.size());
  for (ObjId x : f.object_map) h.object_map.push_back(g.on_object(x));
  h.morphism_map.reserve(f.morphism_map.size());
  for (MorId m : f.morphism_map) h.morphism_map.push_back(g.on_morphism(m));
  return h;
}

FunctorData opposite_functor(const FunctorData& f, const CatPtr& source_op, const CatPtr& target_op) {
  return FunctorData{source_op, target_op, f.object_map, f.morphism_map};
}

FunctorData constant_functor(const CatPtr& source, const CatPtr& target, ObjId value) {
  FunctorData f{source, target, std::vector<ObjId>(source->object_count(), value),
                std::vector<MorId>(source->morphism_count(), target->identity(value))};
  return f;
}

ValidationReport validate_nat_trans(const NatTransData& n) {
  ValidationReport r;
  std::size_t count = 0;
  const auto& a = *n.source_functor.source;
  const auto& c = *n.source_functor.target;
  if (n.components.size() != a.object_count()) {
    r.add("component table has wrong size");
    return r;
  }
  for (std::size_t x = 0; x < a.object_count(); ++x) {
    MorId eta = n.components[x];
    if (eta < 0 || static_cast<std::size_t>(eta) >= c.morphism_count() ||
        c.dom(eta) != n.source_functor.on_object(x) || c.cod(eta) != n.target_functor.on_object(x)) {
      report(r, count, "component at " + a.object_name(x) + " has wrong endpoints");
    }
  }
  if (!r.ok()) {
    finish(r, count);
    return r;
  }
  for (std::size_t fi = 0; fi < a.morphism_count(); ++fi) {
    auto f = static_cast<MorId>(fi);
    MorId lhs = c.compose(n.source_functor.on_morphism(f), n.components[a.cod(f)]);
    MorId rhs = c.compose(n.components[a.dom(f)], n.target_functor.on_morphism(f));
    if (lhs != rhs) report(r, count, "naturality square fails at " + a.morphism_name(f));
  }
  finish(r, count);
  return r;
}

// ---------------------------------------------------------------------------
// Enumeration

namespace {

struct FunctorSearch {
  const FinCategory& a;
  const FinCategory& c;
  std::size_t limit;
  std::size_t node_budget;
  const std::function<void(const FunctorData&)>& visit;
  CatPtr a_ptr, c_ptr;

  std::vector<std::vector<MorId>> object_checks;  // morphisms whose max endpoint is this object
  std::vector<MorId> order;                       // non-identity morphisms
  std::vector<std::vector<std::tuple<MorId, MorId, MorId>>> triple_checks;
  std::vector<ObjId> obj;
  std::vector<MorId> mor;
  std::size_t found = 0;
  std::size_t nodes = 0;
  bool aborted = false;

  void prepare() {
    object_checks.assign(a.object_count(), {});
    for (std::size_t f = 0; f < a.morphism_count(); ++f) {
      if (a.is_identity(f)) continue;
      object_checks[std::max(a.dom(f), a.cod(f))].push_back(static_cast<MorId>(f));
    }
    std::vector<int> position(a.morphism_count(), -1);
    for (std::size_t f = 0; f < a.morphism_count(); ++f) {
      if (!a.is_identity(f)) {
        position[f] = static_cast<int>(order.size());
        order.push_back(static_cast<MorId>(f));
      }
    }
    triple_checks.assign(order.size(), {});
    for (MorId f : order) {
      for (MorId g : a.outgoing(a.cod(f))) {
        if (a.is_identity(g)) continue;
        MorId h = a.compose(f, g);
        int p = std::max({position[f], position[g], position[h]});
        triple_checks[p].emplace_back(f, g, h);
      }
    }
    obj.assign(a.object_count(), kNoObject);
    mor.assign(a.morphism_count(), kNoMorphism);
  }

  bool stop() const { return aborted || found >= limit; }

  void assign_objects(std::size_t i) {
    if (stop()) return;
    if (++nodes > node_budget) {
      aborted = true;
      return;
    }
    if (i == a.object_count()) {
      for (std::size_t x = 0; x < a.object_count(); ++x) mor[a.identity(x)] = c.identity(obj[x]);
      assign_morphisms(0);
      return;
    }
    for (std::size_t y = 0; y < c.object_count() && !stop(); ++y) {
      obj[i] = static_cast<ObjId>(y);
      bool ok = true;
      for (MorId f : object_checks[i]) {
        if (c.hom(obj[a.dom(f)], obj[a.cod(f)]).empty()) {
          ok = false;
          break;
        }
      }
      if (ok) assign_objects(i + 1);
    }
    obj[i] = kNoObject;
  }

  void assign_morphisms(std::size_t k) {
    if (stop()) return;
    if (++nodes > node_budget) {
      aborted = true;
      return;
    }
    if (k == order.size()) {
      ++found;
      visit(FunctorData{a_ptr, c_ptr, obj, mor});
      return;
    }
    MorId f = order[k];
    for (MorId g : c.hom(obj[a.dom(f)], obj[a.cod(f)])) {
      if (stop()) break;
      mor[f] = g;
      bool ok = true;
      for (auto [x, y, z] : triple_checks[k]) {
        if (c.compose(mor[x], mor[y]) != mor[z]) {
          ok = false;
          break;
        }
      }
      if (ok) assign_morphisms(k + 1);
    }
    mor[f] = kNoMorphism;
  }
};

bool enumerate_functors_budgeted(const CatPtr& a, const CatPtr& c, std::size_t limit, std::size_t node_budget,
                                 const std::function<void(const FunctorData&)>& visit, bool* aborted) {
  FunctorSearch s{*a, *c, limit, node_budget, visit, a, c, {}, {}, {}, {}, {}};
  s.prepare();
  s.assign_objects(0);
  if (aborted) *aborted = s.aborted;
  return !s.aborted && s.found < limit;
}

}  // namespace

bool enumerate_functors(const CatPtr& a, const CatPtr& c, std::size_t limit,
                        const std::function<void(const FunctorData&)>& visit) {
  return enumerate_functors_budgeted(a, c, limit, std::numeric_limits<std::size_t>::max(), visit, nullptr);
}

std::uint64_t estimate_functor_count(const FinCategory& a, const FinCategory& c) {
  std::uint64_t est = 1;
  for (std::size_t x = 0; x < a.object_count(); ++x) est = saturating_mul(est, c.object_count());
  const std::uint64_t h = c.max_hom_size();
  for (std::size_t f = 0; f < a.morphism_count(); ++f) {
    if (!a.is_identity(f)) est = saturating_mul(est, h);
  }
  return est;
}

std::vector<NatTransData> enumerate_nat_trans(const FunctorData& f, const FunctorData& g) {
  const auto& a = *f.source;
  const auto& c = *f.target;
  std::vector<std::vector<MorId>> checks(a.object_count());
  for (std::size_t m = 0; m < a.morphism_count(); ++m) {
    checks[std::max(a.dom(m), a.cod(m))].push_back(static_cast<MorId>(m));
  }
  std::vector<NatTransData> out;
  std::vector<MorId> comp(a.object_count(), kNoMorphism);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == a.object_count()) {
      out.push_back(NatTransData{f, g, comp});
      return;
    }
    for (MorId eta : c.hom(f.on_object(i), g.on_object(i))) {
      comp[i] = eta;
      bool ok = true;
      for (MorId m : checks[i]) {
        if (c.compose(f.on_morphism(m), comp[a.cod(m)]) != c.compose(comp[a.dom(m)], g.on_morphism(m))) {
          ok = false;
          break;
        }
      }
      if (ok) rec(i + 1);
    }
    comp[i] = kNoMorphism;
  };
  rec(0);
  return out;
}

// ---------------------------------------------------------------------------
// Functor categories

namespace {

std::vector<MorId> functor_key(const FunctorData& f) {
  std::vector<MorId> key(f.object_map.begin(), f.object_map.end());
  key.push_back(-2);
  key.insert(key.end(), f.morphism_map.begin(), f.morphism_map.end());
  return key;
}

}  // namespace

std::optional<ObjId> FunctorCategory::find(const FunctorData& f) const {
  auto it = functor_index_.find(functor_key(f));
  if (it == functor_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<MorId> FunctorCategory::find(const NatTransData& n) const {
  auto s = find(n.source_functor);
  auto t = find(n.target_functor);
  if (!s || !t) return std::nullopt;
  std::vector<MorId> key = n.components;
  key.push_back(*t);
  auto it = nat_index_.find({*s, key});
  if (it == nat_index_.end()) return std::nullopt;
  return it->second;
}

FunctorCategory functor_category(const CatPtr& a, const CatPtr& c, std::size_t size_guard) {
  const std::uint64_t estimate = estimate_functor_count(*a, *c);
  if (estimate > size_guard) {
    bool aborted = false;
    std::size_t exact = 0;
    enumerate_functors_budgeted(a, c, size_guard + 1, 1000 * (size_guard + 1),
                                [&](const FunctorData&) { ++exact; }, &aborted);
    if (aborted || exact > size_guard) {
      std::ostringstream os;
      os << "functor category refused: estimated " << estimate << " functors exceeds size guard " << size_guard;
      throw SizeGuardExceeded(os.str(), estimate);
    }
  }
  FunctorCategory fc;
  fc.source = a;
  fc.target = c;
  enumerate_functors(a, c, std::numeric_limits<std::size_t>::max(),
                     [&](const FunctorData& f) { fc.functors.push_back(f); });
  FinCategory::Builder b;
  for (std::size_t i = 0; i < fc.functors.size(); ++i) {
    b.add_object("F" + std::to_string(i));
    fc.functor_index_.emplace(functor_key(fc.functors[i]), static_cast<ObjId>(i));
  }
  for (std::size_t i = 0; i < fc.functors.size(); ++i) {
    for (std::size_t j = 0; j < fc.functors.size(); ++j) {
      for (auto& n : enumerate_nat_trans(fc.functors[i], fc.functors[j])) {
        MorId id = b.add_morphism("n" + std::to_string(fc.transformations.size()), static_cast<ObjId>(i),
                                  static_cast<ObjId>(j));
        std::vector<MorId> key = n.components;
        key.push_back(static_cast<MorId>(j));
        fc.nat_index_.emplace(std::make_pair(static_cast<ObjId>(i), key), id);
        bool is_id = true;
        for (std::size_t x = 0; x < a->object_count(); ++x) {
          if (i != j || n.components[x] != c->identity(fc.functors[i].on_object(x))) is_id = false;
        }
        if (is_id) b.set_identity(static_cast<ObjId>(i), id);
        fc.transformations.push_back(std::move(n));
      }
    }
  }
  fc.category = b.build([&](MorId f, MorId g) {
    const auto& n1 = fc.transformations[f];
    const auto& n2 = fc.transformations[g];
    NatTransData comp{n1.source_functor, n2.target_functor, {}};
    for (std::size_t x = 0; x < a->object_count(); ++x) {
      comp.components.push_back(c->compose(n1.components[x], n2.components[x]));
    }
    auto id = fc.find(comp);
    if (!id) throw StructuralError("functor category: composite transformation missing");
    return *id;
  });
  return fc;
}

FunctorData curry_right(const ProductCategory& ab, const FunctorData& f, const FunctorCategory& bc) {
  const auto& a = *ab.left;
  const auto& b = *ab.right;
  FunctorData out{ab.left, bc.category, {}, {}};
  for (std::size_t x = 0; x < a.object_count(); ++x) {
    FunctorData fx{ab.right, f.target, {}, {}};
    for (std::size_t y = 0; y < b.object_count(); ++y) fx.object_map.push_back(f.on_object(ab.object(x, y)));
    for (std::size_t g = 0; g < b.morphism_count(); ++g) {
      fx.morphism_map.push_back(f.on_morphism(ab.morphism(a.identity(x), g)));
    }
    auto idx = bc.find(fx);
    if (!idx) throw StructuralError("curry: partial functor not found in functor category");
    out.object_map.push_back(*idx);
  }
  for (std::size_t m = 0; m < a.morphism_count(); ++m) {
    NatTransData n{bc.functors[out.object_map[a.dom(m)]], bc.functors[out.object_map[a.cod(m)]], {}};
    for (std::size_t y = 0; y < b.object_count(); ++y) {
      n.components.push_back(f.on_morphism(ab.morphism(m, b.identity(y))));
    }
    auto idx = bc.find(n);
    if (!idx) throw StructuralError("curry: transformation not found in functor category");
    out.morphism_map.push_back(*idx);
  }
  return out;
}

FunctorData curry_left(const ProductCategory& ab, const FunctorData& f, const FunctorCategory& ac) {
  const auto& a = *ab.left;
  const auto& b = *ab.right;
  FunctorData out{ab.right, ac.category, {}, {}};
  for (std::size_t y = 0; y < b.object_count(); ++y) {
    FunctorData fy{ab.left, f.target, {}, {}};
    for (std::size_t x = 0; x < a.object_count(); ++x) fy.object_map.push_back(f.on_object(ab.object(x, y)));
    for (std::size_t g = 0; g < a.morphism_count(); ++g) {
      fy.morphism_map.push_back(f.on_morphism(ab.morphism(g, b.identity(y))));
    }
    auto idx = ac.find(fy);
    if (!idx) throw StructuralError("curry: partial functor not found in functor category");
    out.object_map.push_back(*idx);
  }
  for (std::size_t m = 0; m < b.morphism_count(); ++m) {
    NatTransData n{ac.functors[out.object_map[b.dom(m)]], ac.functors[out.object_map[b.cod(m)]], {}};
    for (std::size_t x = 0; x < a.object_count(); ++x) {
      n.components.push_back(f.on_morphism(ab.morphism(a.identity(x), m)));
    }
    auto idx = ac.find(n);
    if (!idx) throw StructuralError("curry: transformation not found in functor category");
    out.morphism_map.push_back(*idx);
  }
  return out;
}

FunctorData uncurry_right(const ProductCategory& ab, const FunctorData& g, const FunctorCategory& bc) {
  const auto& a = *ab.left;
  const auto& b = *ab.right;
  const auto& c = *bc.target;
  FunctorData out{ab.category, bc.target, {}, {}};
  out.object_map.resize(ab.category->object_count());
  out.morphism_map.resize(ab.category->morphism_count());
  for (std::size_t x = 0; x < a.object_count(); ++x) {
    const auto& gx = bc.functors[g.on_object(x)];
    for (std::size_t y = 0; y < b.object_count(); ++y) out.object_map[ab.object(x, y)] = gx.on_object(y);
  }
  for (std::size_t f = 0; f < a.morphism_count(); ++f) {
    const auto& eta = bc.transformations[g.on_morphism(f)];
    const auto& target = bc.functors[g.on_object(a.cod(f))];
    for (std::size_t h = 0; h < b.morphism_count(); ++h) {
      out.morphism_map[ab.morphism(f, h)] = c.compose(eta.components[b.dom(h)], target.on_morphism(h));
    }
  }
  return out;
}

}  // namespace refine
