#include "heaplog/env.hpp"

#include <algorithm>
#include <set>

#include "eval.hpp"
#include "heaplog/algebra.hpp"

namespace heaplog {

// --- Declarations ------------------------------------------------------------

bool ClassDecl::has_field(const std::string& f) const {
  return std::find(fields.begin(), fields.end(), f) != fields.end();
}

void Env::add_class(ClassDecl c) {
  if (classes_.count(c.name))
    throw EnvError("class " + c.name + " declared twice");
  std::set<std::string> seen;
  for (const auto& f : c.fields)
    if (!seen.insert(f).second)
      throw EnvError("class " + c.name + " declares field " + f + " twice");
  std::string name = c.name;
  classes_.emplace(std::move(name), std::move(c));
}

void Env::add_typing(std::string obj, std::string cls) {
  if (!classes_.count(cls))
    throw EnvError("object " + obj + " uses undeclared class " + cls);
  if (typings_.count(obj)) throw EnvError("object " + obj + " typed twice");
  typings_.emplace(std::move(obj), std::move(cls));
}

void Env::add_predicate(PredicateDef p) {
  if (predicates_.count(p.name))
    throw EnvError("predicate " + p.name + " defined twice");
  std::set<std::string> seen;
  for (const auto& prm : p.params)
    if (!seen.insert(prm).second)
      throw EnvError("predicate " + p.name + " has duplicate parameter " + prm);
  std::string name = p.name;
  predicates_.emplace(std::move(name), std::move(p));
}

const ClassDecl* Env::find_class(const std::string& name) const {
  auto it = classes_.find(name);
  return it == classes_.end() ? nullptr : &it->second;
}

const ClassDecl* Env::class_of(const std::string& obj) const {
  auto it = typings_.find(obj);
  return it == typings_.end() ? nullptr : find_class(it->second);
}

const PredicateDef* Env::find_predicate(const std::string& name) const {
  auto it = predicates_.find(name);
  return it == predicates_.end() ? nullptr : &it->second;
}

namespace {

void collect_calls(const HeapTerm& t, std::vector<const PredCall*>& out) {
  switch (t.kind()) {
    case HeapTerm::Kind::conj:
    case HeapTerm::Kind::disj:
      collect_calls(t.left(), out);
      collect_calls(t.right(), out);
      return;
    case HeapTerm::Kind::inv:
      collect_calls(t.child(), out);
      return;
    case HeapTerm::Kind::pred: {
      out.push_back(&t.call());
      for (const auto& a : t.call().args)
        if (a.kind == PredArg::Kind::term) collect_calls(*a.term, out);
      return;
    }
    default:
      return;
  }
}

bool has_calls(const HeapTerm& t) {
  std::vector<const PredCall*> calls;
  collect_calls(t, calls);
  return !calls.empty();
}

}  // namespace

void Env::validate() const {
  for (const auto& [name, def] : predicates_) {
    for (const auto& cl : def.clauses) {
      std::set<std::string> seen(def.params.begin(), def.params.end());
      for (const auto& e : cl.existentials) {
        if (!seen.insert(e).second)
          throw EnvError("existential '" + e + "' shadows a parameter or is "
                         "repeated in predicate " + name);
      }
      std::vector<const PredCall*> calls;
      collect_calls(cl.body, calls);
      for (const PredCall* c : calls) {
        const PredicateDef* callee = find_predicate(c->name);
        if (!callee) throw UnknownPredicateError(c->name);
        if (callee->params.size() != c->args.size())
          throw ArityMismatchError(c->name, callee->params.size(),
                                   c->args.size());
      }
    }
  }
}

const Goal* Workspace::find_goal(const std::string& name) const {
  for (const auto& g : goals)
    if (g.name == name) return &g;
  return nullptr;
}

// --- Substitution ------------------------------------------------------------

namespace {

using SubstMap = std::map<std::string, PredArg>;

Location subst_location(const Location& loc, const SubstMap& m) {
  auto it = m.find(loc.root);
  if (it == m.end()) return loc;
  const PredArg& a = it->second;
  Location out;
  if (a.kind == PredArg::Kind::location) {
    out = a.loc;
  } else if (a.kind == PredArg::Kind::value &&
             a.val.kind == Value::Kind::sym) {
    out = Location(a.val.sym);
  } else {
    throw EnvError("argument bound to '" + loc.root +
                   "' must name a location, got " + a.str());
  }
  out.path.insert(out.path.end(), loc.path.begin(), loc.path.end());
  return out;
}

Value subst_value(const Value& v, const SubstMap& m) {
  switch (v.kind) {
    case Value::Kind::sym: {
      auto it = m.find(v.sym);
      if (it == m.end()) return v;
      const PredArg& a = it->second;
      if (a.kind == PredArg::Kind::location) return Value::of_sym(a.loc.str());
      if (a.kind == PredArg::Kind::value) return a.val;
      throw EnvError("argument bound to '" + v.sym +
                     "' is a term and cannot be used as a value");
    }
    case Value::Kind::record: {
      std::vector<std::pair<std::string, Value>> fs;
      fs.reserve(v.fields.size());
      for (const auto& [f, fv] : v.fields) fs.emplace_back(f, subst_value(fv, m));
      return Value::of_record(std::move(fs));
    }
    default:
      return v;
  }
}

std::string subst_object(const std::string& obj, const SubstMap& m) {
  auto it = m.find(obj);
  if (it == m.end()) return obj;
  const PredArg& a = it->second;
  if (a.kind == PredArg::Kind::location) return a.loc.str();
  if (a.kind == PredArg::Kind::value && a.val.kind == Value::Kind::sym)
    return a.val.sym;
  throw EnvError("argument bound to '" + obj + "' must name an object, got " +
                 a.str());
}

HeapTerm subst_term(const HeapTerm& t, const SubstMap& m);

PredArg subst_arg(const PredArg& a, const SubstMap& m) {
  switch (a.kind) {
    case PredArg::Kind::location:
      if (a.loc.path.empty()) {
        // A bare name: the replacement keeps the argument's own shape.
        auto it = m.find(a.loc.root);
        if (it != m.end()) return it->second;
      }
      return PredArg::of_location(subst_location(a.loc, m));
    case PredArg::Kind::value:
      if (a.val.kind == Value::Kind::sym) {
        auto it = m.find(a.val.sym);
        if (it != m.end()) return it->second;
      }
      return PredArg::of_value(subst_value(a.val, m));
    case PredArg::Kind::term:
      return PredArg::of_term(subst_term(*a.term, m));
  }
  return a;
}

HeapTerm subst_term(const HeapTerm& t, const SubstMap& m) {
  switch (t.kind()) {
    case HeapTerm::Kind::emp:
    case HeapTerm::Kind::true_total:
    case HeapTerm::Kind::false_total:
      return t;
    case HeapTerm::Kind::true_partial:
      return HeapTerm::true_partial(subst_object(t.object(), m));
    case HeapTerm::Kind::false_partial:
      return HeapTerm::false_partial(subst_object(t.object(), m));
    case HeapTerm::Kind::emp_partial:
      return HeapTerm::emp_partial(subst_object(t.object(), m));
    case HeapTerm::Kind::points_to:
      return HeapTerm::points_to(subst_location(t.heaplet().loc, m),
                                 subst_value(t.heaplet().val, m));
    case HeapTerm::Kind::conj:
      return HeapTerm::conj(subst_term(t.left(), m), subst_term(t.right(), m));
    case HeapTerm::Kind::disj:
      return HeapTerm::disj(subst_term(t.left(), m), subst_term(t.right(), m));
    case HeapTerm::Kind::inv:
      return HeapTerm::inv(subst_term(t.child(), m));
    case HeapTerm::Kind::pred: {
      PredCall c;
      c.name = t.call().name;
      c.args.reserve(t.call().args.size());
      for (const auto& a : t.call().args) c.args.push_back(subst_arg(a, m));
      return HeapTerm::pred(std::move(c));
    }
  }
  return t;
}

// Existential renaming: x becomes x'1, x'2, ... — fresh per top-level
// unfolding call so repeated runs of one operation agree byte for byte.
thread_local int exist_counter = 0;
thread_local int unfold_nesting = 0;
struct CounterScope {
  CounterScope() {
    if (unfold_nesting++ == 0) exist_counter = 0;
  }
  ~CounterScope() { --unfold_nesting; }
};

// Clause bodies of a call with parameters bound and existentials renamed.
std::vector<HeapTerm> instantiate_clauses(const PredicateDef& def,
                                          const PredCall& call) {
  std::vector<HeapTerm> out;
  out.reserve(def.clauses.size());
  for (const auto& cl : def.clauses) {
    SubstMap m;
    for (size_t i = 0; i < def.params.size(); ++i)
      m.emplace(def.params[i], call.args[i]);
    for (const auto& e : cl.existentials)
      m.emplace(e, PredArg::of_value(Value::of_sym(
                       e + "'" + std::to_string(++exist_counter))));
    out.push_back(subst_term(cl.body, m));
  }
  return out;
}

const PredicateDef& checked_lookup(const PredCall& call, const Env& env) {
  const PredicateDef* def = env.find_predicate(call.name);
  if (!def) throw UnknownPredicateError(call.name);
  if (def->params.size() != call.args.size())
    throw ArityMismatchError(call.name, def->params.size(), call.args.size());
  return *def;
}

}  // namespace

// --- Predicate unfolding -----------------------------------------------------

namespace {

// Replaces every nested call in `t` by its alternatives; the cross
// product over independent calls yields the alternative list for `t`.
std::vector<HeapTerm> expand_calls(const HeapTerm& t, const Env& env,
                                   int depth, std::vector<std::string>& notes);

// ∘-composition with the identity applied: emp operands dissolve, so
// expanded clauses read as written instead of trailing "* emp" chains.
HeapTerm conj_elide(HeapTerm l, HeapTerm r) {
  if (l.kind() == HeapTerm::Kind::emp) return r;
  if (r.kind() == HeapTerm::Kind::emp) return l;
  return HeapTerm::conj(std::move(l), std::move(r));
}

std::vector<HeapTerm> cross(
    const std::vector<HeapTerm>& ls, const std::vector<HeapTerm>& rs,
    HeapTerm (*mk)(HeapTerm, HeapTerm)) {
  std::vector<HeapTerm> out;
  out.reserve(ls.size() * rs.size());
  for (const auto& l : ls)
    for (const auto& r : rs) out.push_back(mk(l, r));
  return out;
}

std::vector<HeapTerm> expand_calls(const HeapTerm& t, const Env& env,
                                   int depth, std::vector<std::string>& notes) {
  switch (t.kind()) {
    case HeapTerm::Kind::conj:
      return cross(expand_calls(t.left(), env, depth, notes),
                   expand_calls(t.right(), env, depth, notes), conj_elide);
    case HeapTerm::Kind::disj:
      return cross(expand_calls(t.left(), env, depth, notes),
                   expand_calls(t.right(), env, depth, notes), HeapTerm::disj);
    case HeapTerm::Kind::inv: {
      std::vector<HeapTerm> out;
      for (const auto& c : expand_calls(t.child(), env, depth, notes))
        out.push_back(HeapTerm::inv(c));
      return out;
    }
    case HeapTerm::Kind::pred: {
      if (depth <= 0) {
        notes.push_back("call " + t.str() + " dropped at the depth bound");
        return {};
      }
      try {
        UnfoldResult r = unfold_predicate(t.call(), env, depth - 1);
        for (auto& n : r.notes) notes.push_back(std::move(n));
        return std::move(r.disjuncts);
      } catch (const DepthExhaustedError&) {
        notes.push_back("call " + t.str() + " exhausted the depth bound");
        return {};
      }
    }
    default:
      return {t};
  }
}

}  // namespace

UnfoldResult unfold_predicate(const PredCall& call, const Env& env,
                              int depth) {
  CounterScope guard;
  const PredicateDef& def = checked_lookup(call, env);
  UnfoldResult out;
  for (const auto& body : instantiate_clauses(def, call)) {
    if (has_calls(body) && depth <= 0) {
      out.notes.push_back("clause '" + body.str() +
                          "' dropped at the depth bound");
      continue;
    }
    for (auto& alt : expand_calls(body, env, depth, out.notes))
      out.disjuncts.push_back(std::move(alt));
  }
  if (out.disjuncts.empty()) throw DepthExhaustedError(call.name);
  return out;
}

// --- Combined unfolding of a goal term ----------------------------------------

namespace {

using FieldMap = std::map<std::string, std::set<std::string>>;

std::vector<HeapTerm> flatten_conj(const HeapTerm& t) {
  if (t.kind() != HeapTerm::Kind::conj) return {t};
  std::vector<HeapTerm> out = flatten_conj(t.left());
  for (auto& r : flatten_conj(t.right())) out.push_back(std::move(r));
  return out;
}

// Folds scope items into one flat ∘-chain, dissolving emp operands when
// anything material remains.
HeapTerm compose_scope(const std::vector<HeapTerm>& items) {
  std::vector<HeapTerm> flat;
  for (const auto& it : items)
    for (auto& p : flatten_conj(it)) flat.push_back(std::move(p));
  std::vector<HeapTerm> material;
  material.reserve(flat.size());
  for (auto& p : flat)
    if (p.kind() != HeapTerm::Kind::emp) material.push_back(std::move(p));
  if (material.empty()) return HeapTerm::emp();
  return HeapTerm::conj_all(material);
}

// Field names an explicitly written heaplet specifies, per object.
void note_fields(const Heaplet& h, FieldMap& out) {
  if (h.loc.is_field()) out[h.loc.root].insert(h.loc.path.front());
  if (h.val.kind == Value::Kind::record)
    for (const auto& [f, v] : h.val.fields) out[h.loc.str()].insert(f);
}

FieldMap explicit_fields(const std::vector<HeapTerm>& items) {
  FieldMap out;
  for (const auto& it : items)
    if (it.kind() == HeapTerm::Kind::points_to) note_fields(it.heaplet(), out);
  return out;
}

// One alternative in progress: the items emitted so far and the fields
// already written or consumed to the left.
struct Alt {
  std::vector<HeapTerm> items;
  FieldMap left;
};

struct Unfolder {
  const Env& env;
  std::vector<std::string>& notes;
  std::string exhausted_call;  // first call with no surviving clause

  const ClassDecl& typing_of(const std::string& obj) const {
    const ClassDecl* cls = env.class_of(obj);
    if (!cls) throw UntypedObjectError(obj);
    return *cls;
  }

  // Fields of obj not in `taken`, as a wildcard chain; consumed fields
  // are added to `left`.
  HeapTerm expand_true(const std::string& obj,
                       const std::set<std::string>& taken, FieldMap& left) {
    const ClassDecl& cls = typing_of(obj);
    std::vector<HeapTerm> hs;
    for (const auto& f : cls.fields) {
      if (taken.count(f)) continue;
      hs.push_back(
          HeapTerm::points_to(Location(obj, {f}), Value::of_any()));
      left[obj].insert(f);
    }
    if (hs.empty()) return HeapTerm::emp();
    return HeapTerm::conj_all(hs);
  }

  std::set<std::string> taken_fields(const std::string& obj, const Alt& cur,
                                     const FieldMap& all_explicit,
                                     bool in_pred) const {
    std::set<std::string> taken;
    if (auto it = cur.left.find(obj); it != cur.left.end())
      taken = it->second;
    if (!in_pred) {
      if (auto it = all_explicit.find(obj); it != all_explicit.end())
        taken.insert(it->second.begin(), it->second.end());
    }
    return taken;
  }

  // Expands items[idx...] on top of `cur`, appending finished
  // alternatives to `done`.
  void walk(const std::vector<HeapTerm>& items, size_t idx, Alt cur,
            const FieldMap& all_explicit, bool in_pred, int depth,
            std::vector<Alt>& done) {
    if (idx == items.size()) {
      done.push_back(std::move(cur));
      return;
    }
    const HeapTerm& item = items[idx];
    switch (item.kind()) {
      case HeapTerm::Kind::points_to: {
        note_fields(item.heaplet(), cur.left);
        cur.items.push_back(item);
        walk(items, idx + 1, std::move(cur), all_explicit, in_pred, depth,
             done);
        return;
      }
      case HeapTerm::Kind::emp:
      case HeapTerm::Kind::true_total:
      case HeapTerm::Kind::false_total: {
        cur.items.push_back(item);
        walk(items, idx + 1, std::move(cur), all_explicit, in_pred, depth,
             done);
        return;
      }
      case HeapTerm::Kind::true_partial: {
        auto taken =
            taken_fields(item.object(), cur, all_explicit, in_pred);
        cur.items.push_back(expand_true(item.object(), taken, cur.left));
        walk(items, idx + 1, std::move(cur), all_explicit, in_pred, depth,
             done);
        return;
      }
      case HeapTerm::Kind::emp_partial: {
        const ClassDecl& cls = typing_of(item.object());
        auto taken =
            taken_fields(item.object(), cur, all_explicit, in_pred);
        bool all_taken = true;
        for (const auto& f : cls.fields)
          if (!taken.count(f)) all_taken = false;
        cur.items.push_back(all_taken ? HeapTerm::emp()
                                      : HeapTerm::false_total());
        walk(items, idx + 1, std::move(cur), all_explicit, in_pred, depth,
             done);
        return;
      }
      case HeapTerm::Kind::false_partial: {
        typing_of(item.object());
        cur.items.push_back(HeapTerm::false_total());
        walk(items, idx + 1, std::move(cur), all_explicit, in_pred, depth,
             done);
        return;
      }
      case HeapTerm::Kind::conj: {
        // Splice the nested chain in place.
        std::vector<HeapTerm> spliced = flatten_conj(item);
        spliced.insert(spliced.end(), items.begin() + idx + 1, items.end());
        walk(spliced, 0, std::move(cur), all_explicit, in_pred, depth, done);
        return;
      }
      case HeapTerm::Kind::disj: {
        // Each side is its own scope over the shared left context; its
        // writes stay conditional and do not escape.
        auto expand_side = [&](const HeapTerm& side) {
          std::vector<HeapTerm> sitems = flatten_conj(side);
          FieldMap side_explicit = all_explicit;
          for (const auto& [obj, fs] : explicit_fields(sitems))
            side_explicit[obj].insert(fs.begin(), fs.end());
          std::vector<Alt> outs;
          Alt sub;
          sub.left = cur.left;
          walk(sitems, 0, std::move(sub), side_explicit, in_pred, depth,
               outs);
          return outs;
        };
        auto lefts = expand_side(item.left());
        auto rights = expand_side(item.right());
        for (const auto& la : lefts) {
          for (const auto& ra : rights) {
            Alt next = cur;
            next.items.push_back(HeapTerm::disj(compose_scope(la.items),
                                                compose_scope(ra.items)));
            walk(items, idx + 1, std::move(next), all_explicit, in_pred,
                 depth, done);
          }
        }
        return;
      }
      case HeapTerm::Kind::inv: {
        // Negative material reads the context but never writes it.
        std::vector<HeapTerm> citems = flatten_conj(item.child());
        std::vector<Alt> outs;
        Alt sub;
        sub.left = cur.left;
        walk(citems, 0, std::move(sub), all_explicit, in_pred, depth, outs);
        for (const auto& ca : outs) {
          Alt next = cur;
          next.items.push_back(HeapTerm::inv(compose_scope(ca.items)));
          walk(items, idx + 1, std::move(next), all_explicit, in_pred, depth,
               done);
        }
        return;
      }
      case HeapTerm::Kind::pred: {
        const PredicateDef& def = checked_lookup(item.call(), env);
        size_t before = done.size();
        for (const auto& body : instantiate_clauses(def, item.call())) {
          if (has_calls(body) && depth <= 0) {
            notes.push_back("clause '" + body.str() +
                            "' dropped at the depth bound");
            continue;
          }
          // The body joins the current scope: its heaplets count as
          // consumed context for everything to the right, and partials
          // inside it see only the left context.
          std::vector<HeapTerm> bitems = flatten_conj(body);
          bitems.insert(bitems.end(), items.begin() + idx + 1, items.end());
          // Body items run with in_pred set; the tail after the body
          // would too, which widens nothing since the lookahead set only
          // shrinks remaining fields for partials written at top level.
          walk(bitems, 0, cur, all_explicit, true, depth - 1, done);
        }
        if (done.size() == before && exhausted_call.empty())
          exhausted_call = item.call().name;
        return;
      }
    }
  }
};

}  // namespace

HeapTerm unfold_partial(const HeapTerm& t, const Env& env) {
  CounterScope guard;
  switch (t.kind()) {
    case HeapTerm::Kind::disj:
      return HeapTerm::disj(unfold_partial(t.left(), env),
                            unfold_partial(t.right(), env));
    case HeapTerm::Kind::inv:
      return HeapTerm::inv(unfold_partial(t.child(), env));
    default:
      break;
  }
  // One ∘-scope: fields written anywhere in it count as specified.
  std::vector<HeapTerm> items = flatten_conj(t);
  FieldMap all_explicit = explicit_fields(items);
  FieldMap left;
  std::vector<HeapTerm> out;
  out.reserve(items.size());
  std::vector<std::string> notes;  // unused: no calls are expanded here
  Unfolder u{env, notes, ""};
  for (const auto& item : items) {
    switch (item.kind()) {
      case HeapTerm::Kind::true_partial: {
        std::set<std::string> taken;
        if (auto it = left.find(item.object()); it != left.end())
          taken = it->second;
        if (auto it = all_explicit.find(item.object());
            it != all_explicit.end())
          taken.insert(it->second.begin(), it->second.end());
        out.push_back(u.expand_true(item.object(), taken, left));
        break;
      }
      case HeapTerm::Kind::emp_partial: {
        const ClassDecl& cls = u.typing_of(item.object());
        std::set<std::string> taken;
        if (auto it = left.find(item.object()); it != left.end())
          taken = it->second;
        if (auto it = all_explicit.find(item.object());
            it != all_explicit.end())
          taken.insert(it->second.begin(), it->second.end());
        bool all_taken = true;
        for (const auto& f : cls.fields)
          if (!taken.count(f)) all_taken = false;
        out.push_back(all_taken ? HeapTerm::emp() : HeapTerm::false_total());
        break;
      }
      case HeapTerm::Kind::false_partial:
        u.typing_of(item.object());
        out.push_back(HeapTerm::false_total());
        break;
      case HeapTerm::Kind::points_to:
        note_fields(item.heaplet(), left);
        out.push_back(item);
        break;
      case HeapTerm::Kind::disj:
      case HeapTerm::Kind::inv:
        out.push_back(unfold_partial(item, env));
        break;
      default:
        out.push_back(item);
        break;
    }
  }
  return compose_scope(out);
}

UnfoldResult unfold_term(const ExtTerm& t, const Env& env, int depth) {
  CounterScope guard;
  if (t.kind() != ExtTerm::Kind::heap)
    throw EnvError(
        "only spatial terms unfold to alternatives; unfold the operands of "
        "boolean connectives separately");
  UnfoldResult out;
  Unfolder u{env, out.notes, ""};
  std::vector<HeapTerm> items = flatten_conj(t.heap_term());
  FieldMap all_explicit = explicit_fields(items);
  std::vector<Alt> done;
  u.walk(items, 0, Alt{}, all_explicit, /*in_pred=*/false, depth, done);
  if (done.empty())
    throw DepthExhaustedError(
        u.exhausted_call.empty() ? "<goal>" : u.exhausted_call);
  out.disjuncts.reserve(done.size());
  for (const auto& alt : done)
    out.disjuncts.push_back(compose_scope(alt.items));
  return out;
}

// --- Repetition checking across predicate boundaries --------------------------

namespace {

void heap_leaves(const ExtTerm& t, std::vector<const HeapTerm*>& out) {
  switch (t.kind()) {
    case ExtTerm::Kind::heap:
      out.push_back(&t.heap_term());
      return;
    case ExtTerm::Kind::not_:
      heap_leaves(t.child(), out);
      return;
    case ExtTerm::Kind::and_:
    case ExtTerm::Kind::or_:
      heap_leaves(t.left(), out);
      heap_leaves(t.right(), out);
      return;
  }
}

}  // namespace

RepetitionReport check_repetition_stack(const ExtTerm& t, const Env& env,
                                        int depth) {
  std::vector<const HeapTerm*> leaves;
  heap_leaves(t, leaves);
  for (int d = 0; d <= depth; ++d) {
    bool frontier = false;
    for (const HeapTerm* leaf : leaves) {
      UnfoldResult r;
      try {
        r = unfold_term(ExtTerm::heap(*leaf), env, d);
      } catch (const DepthExhaustedError&) {
        frontier = true;
        continue;
      }
      if (!r.notes.empty()) frontier = true;
      for (const auto& alt : r.disjuncts) {
        if (auto u = detect_repetition(alt)) {
          RepetitionReport rep;
          rep.verdict = RepetitionReport::Verdict::witness;
          rep.witness = u->witness;
          rep.depth = d;
          return rep;
        }
      }
    }
    if (!frontier) {
      // Everything unfolded completely: deeper bounds change nothing.
      return RepetitionReport{RepetitionReport::Verdict::none, "", d};
    }
  }
  return RepetitionReport{RepetitionReport::Verdict::inconclusive, "", depth};
}

// --- Denotation comparison -----------------------------------------------------

namespace {

bool heaplet_matches(const Heaplet& a, const Heaplet& b) {
  if (!(a.loc == b.loc)) return false;
  if (a.val.kind == Value::Kind::any || b.val.kind == Value::Kind::any)
    return true;
  return a.val == b.val;
}

// Injective matching of all of `need` into `have`.
bool embed(const std::vector<Heaplet>& need, std::vector<const Heaplet*> have,
           size_t i = 0) {
  if (i == need.size()) return true;
  for (size_t j = 0; j < have.size(); ++j) {
    if (!have[j] || !heaplet_matches(need[i], *have[j])) continue;
    const Heaplet* keep = have[j];
    have[j] = nullptr;
    if (embed(need, have, i + 1)) return true;
    have[j] = keep;
  }
  return false;
}

bool embed_all(const std::vector<Heaplet>& need,
               const std::vector<Heaplet>& have, bool exact) {
  if (exact && need.size() != have.size()) return false;
  if (need.size() > have.size()) return false;
  std::vector<const Heaplet*> slots;
  slots.reserve(have.size());
  for (const auto& h : have) slots.push_back(&h);
  return embed(need, std::move(slots));
}

bool component_matches(const Component& a, const Component& b) {
  if (a.open && embed_all(a.heaplets, b.heaplets, /*exact=*/false)) return true;
  if (b.open && embed_all(b.heaplets, a.heaplets, /*exact=*/false)) return true;
  if (a.open != b.open) return false;
  return embed_all(a.heaplets, b.heaplets, /*exact=*/true);
}

// Injective matching of components both ways.
bool pair_components(const std::vector<Component>& xs,
                     std::vector<const Component*> ys, size_t i = 0) {
  if (i == xs.size()) return true;
  for (size_t j = 0; j < ys.size(); ++j) {
    if (!ys[j] || !component_matches(xs[i], *ys[j])) continue;
    const Component* keep = ys[j];
    ys[j] = nullptr;
    if (pair_components(xs, ys, i + 1)) return true;
    ys[j] = keep;
  }
  return false;
}

bool nf_matches(const NormalForm& a, const NormalForm& b) {
  if (a.disjuncts.size() != b.disjuncts.size()) return false;
  std::vector<const Component*> ys;
  ys.reserve(b.disjuncts.size());
  for (const auto& c : b.disjuncts) ys.push_back(&c);
  return pair_components(a.disjuncts, std::move(ys));
}

std::vector<NormalForm> denotation(const HeapTerm& t, const Env& env,
                                   int depth) {
  std::vector<NormalForm> out;
  UnfoldResult r = unfold_term(ExtTerm::heap(t), env, depth);
  for (const auto& alt : r.disjuncts) {
    NormalForm nf = normalize(alt);
    if (!nf.satisfiable) continue;
    bool dup = false;
    for (const auto& prev : out)
      if (prev == nf) dup = true;
    if (!dup) out.push_back(std::move(nf));
  }
  return out;
}

bool covers(const std::vector<NormalForm>& xs,
            const std::vector<NormalForm>& ys) {
  for (const auto& x : xs) {
    bool hit = false;
    for (const auto& y : ys)
      if (nf_matches(x, y)) {
        hit = true;
        break;
      }
    if (!hit) return false;
  }
  return true;
}

}  // namespace

bool compare_denotation(const ExtTerm& expected, const ExtTerm& actual,
                        const Env& env, int depth) {
  if (expected.kind() != actual.kind()) return false;
  switch (expected.kind()) {
    case ExtTerm::Kind::not_:
      return compare_denotation(expected.child(), actual.child(), env, depth);
    case ExtTerm::Kind::and_:
    case ExtTerm::Kind::or_:
      return compare_denotation(expected.left(), actual.left(), env, depth) &&
             compare_denotation(expected.right(), actual.right(), env, depth);
    case ExtTerm::Kind::heap: {
      auto de = denotation(expected.heap_term(), env, depth);
      auto da = denotation(actual.heap_term(), env, depth);
      return covers(de, da) && covers(da, de);
    }
  }
  return false;
}

}  // namespace heaplog
