#include "eval.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "heaplog/algebra.hpp"
#include "scope_tracker.hpp"

namespace heaplog::detail {
namespace {

Branch combine(const Branch& l, const Branch& r) {
  Branch b;
  b.items = l.items;
  b.items.insert(b.items.end(), r.items.begin(), r.items.end());
  b.open = l.open || r.open;
  b.falsy = l.falsy || r.falsy;
  return b;
}

void lift(const HeapTerm& t, bool inverted, std::vector<Branch>& out) {
  switch (t.kind()) {
    case HeapTerm::Kind::emp:
      out.push_back(Branch{});
      return;
    case HeapTerm::Kind::true_total: {
      Branch b;
      b.open = true;  // the inverse of `true` is `true` again
      out.push_back(std::move(b));
      return;
    }
    case HeapTerm::Kind::false_total: {
      Branch b;
      b.falsy = true;
      out.push_back(std::move(b));
      return;
    }
    case HeapTerm::Kind::true_partial:
    case HeapTerm::Kind::false_partial:
    case HeapTerm::Kind::emp_partial:
    case HeapTerm::Kind::pred:
      throw NeedsEnvError(t.str());
    case HeapTerm::Kind::points_to:
      out.push_back(Branch{{SignedHeaplet{t.heaplet(), inverted}}, false, false});
      return;
    case HeapTerm::Kind::inv:
      lift(t.child(), !inverted, out);
      return;
    case HeapTerm::Kind::conj: {
      std::vector<Branch> ls, rs;
      lift(t.left(), inverted, ls);
      lift(t.right(), inverted, rs);
      for (const auto& l : ls)
        for (const auto& r : rs) out.push_back(combine(l, r));
      return;
    }
    case HeapTerm::Kind::disj:
      lift(t.left(), inverted, out);
      lift(t.right(), inverted, out);
      return;
  }
}

std::string branch_str(const Branch& b) {
  std::vector<std::string> parts;
  for (const auto& it : b.items)
    parts.push_back(it.inverse ? "inv(" + it.h.str() + ")" : it.h.str());
  if (b.open) parts.push_back("true");
  if (b.falsy) parts.push_back("false");
  if (parts.empty()) return "emp";
  std::string s = parts.front();
  for (size_t i = 1; i < parts.size(); ++i) s += " * " + parts[i];
  return s;
}

// Flat canonical heaplet prints of a branch (records split per field).
std::vector<std::string> branch_prints(const BranchOutcome& o) {
  std::vector<Heaplet> all;
  for (const auto& comp : o.components)
    for (const auto& h : comp)
      for (const auto& f : fieldwise(h)) all.push_back(f);
  std::sort(all.begin(), all.end(),
            [](const Heaplet& a, const Heaplet& b) { return heaplet_before(a, b); });
  std::vector<std::string> out;
  out.reserve(all.size());
  for (const auto& h : all) out.push_back(h.str());
  return out;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string s;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) s += sep;
    s += parts[i];
  }
  return s;
}

}  // namespace

std::vector<Branch> lift_branches(const HeapTerm& t) {
  std::vector<Branch> out;
  lift(t, false, out);
  return out;
}

BranchOutcome eval_branch(const Branch& b, bool tolerate_unmatched) {
  BranchOutcome out;
  out.open = b.open;
  if (b.falsy) {
    out.sat = false;
    out.reason = Unsat{Unsat::Reason::false_constant, "false"};
    return out;
  }

  std::vector<Heaplet> pos, inv;
  for (const auto& it : b.items) (it.inverse ? inv : pos).push_back(it.h);

  // Repetition claims over the scope as written.
  ScopeTracker tracker;
  for (const auto& h : pos) {
    if (auto bad = tracker.add(h)) {
      out.sat = false;
      out.reason = std::move(bad);
      return out;
    }
  }
  // Every ∘-operand must share a vertex with the rest of its scope. A
  // total `true` in the scope may stand for arbitrary bridging cells, so
  // an open scope is exempt.
  if (!b.open && tracker.added() > 1 && !tracker.connected()) {
    auto comps = tracker.heaplet_components();
    out.sat = false;
    out.reason = Unsat{Unsat::Reason::not_connectible, pos[comps[1].front()].str()};
    return out;
  }

  // Inverse cancellation: each inverse consumes one syntactically equal
  // positive partner.
  std::vector<bool> used(pos.size(), false);
  for (const auto& ih : inv) {
    bool found = false;
    for (size_t i = 0; i < pos.size(); ++i) {
      if (!used[i] && pos[i] == ih) {
        used[i] = true;
        out.matched.push_back(ih);
        found = true;
        break;
      }
    }
    if (!found) {
      if (!tolerate_unmatched) throw UnmatchedInverseError(ih.str());
      out.missing.push_back(ih);
    }
  }
  std::vector<Heaplet> rest;
  for (size_t i = 0; i < pos.size(); ++i)
    if (!used[i]) rest.push_back(pos[i]);

  // The scope may fall apart after cancellation: split it into connected
  // components, which become ‖-separated.
  ScopeTracker splitter;
  for (const auto& h : rest) splitter.add(h);
  for (const auto& idxs : splitter.heaplet_components()) {
    std::vector<Heaplet> comp;
    comp.reserve(idxs.size());
    for (size_t i : idxs) comp.push_back(rest[i]);
    std::sort(comp.begin(), comp.end(), [](const Heaplet& a, const Heaplet& b) {
      return heaplet_before(a, b);
    });
    out.components.push_back(std::move(comp));
  }
  std::sort(out.components.begin(), out.components.end(),
            [](const std::vector<Heaplet>& a, const std::vector<Heaplet>& b) {
              return heaplet_before(a.front(), b.front());
            });
  return out;
}

EvalResult eval_term(const HeapTerm& t) {
  EvalResult res;
  auto branches = lift_branches(t);

  std::vector<BranchOutcome> ok;
  std::optional<Unsat> first_reason;
  for (const auto& b : branches) {
    auto o = eval_branch(b, false);
    if (o.sat) {
      ok.push_back(std::move(o));
    } else {
      if (!first_reason) first_reason = o.reason;
      res.dropped.push_back("dropped unsatisfiable '||' operand: " +
                            branch_str(b) + " [" + o.reason->str() + "]");
    }
  }
  if (ok.empty()) {
    res.satisfiable = false;
    res.reason = std::move(first_reason);
    res.dropped.clear();
    return res;
  }

  // emp is the ‖-identity: empty closed disjuncts vanish next to
  // material ones.
  bool any_material = false;
  for (const auto& o : ok)
    if (!o.components.empty() || o.open) any_material = true;
  if (any_material) {
    ok.erase(std::remove_if(ok.begin(), ok.end(),
                            [](const BranchOutcome& o) {
                              return o.components.empty() && !o.open;
                            }),
             ok.end());
  }

  // Two ‖-operands describing the same nonempty heap contradict the
  // separation requirement; duplicate empty/open operands collapse.
  std::map<std::string, size_t> seen;
  std::vector<BranchOutcome> uniq;
  for (auto& o : ok) {
    auto prints = branch_prints(o);
    std::string k = join(prints, " ; ") + (o.open ? " ; true" : "");
    auto it = seen.find(k);
    if (it == seen.end()) {
      seen.emplace(std::move(k), uniq.size());
      uniq.push_back(std::move(o));
      continue;
    }
    if (!prints.empty()) {
      res.satisfiable = false;
      res.reason = Unsat{Unsat::Reason::interference,
                         "identical operands: " + join(prints, " * ")};
      res.dropped.clear();
      return res;
    }
  }

  // ‖-operands must be vertex-disjoint. Heaplets shared verbatim between
  // two operands are context duplicated during ∘-over-‖ distribution and
  // are exempt; the residues must not touch.
  for (size_t i = 0; i < uniq.size(); ++i) {
    for (size_t j = i + 1; j < uniq.size(); ++j) {
      auto pi = branch_prints(uniq[i]);
      auto pj = branch_prints(uniq[j]);
      std::set<std::string> shared;
      {
        std::set<std::string> si(pi.begin(), pi.end());
        for (const auto& p : pj)
          if (si.count(p)) shared.insert(p);
      }
      auto residue_names = [&shared](const BranchOutcome& o) {
        std::set<std::string> names;
        for (const auto& comp : o.components)
          for (const auto& h : comp)
            for (const auto& f : fieldwise(h)) {
              if (shared.count(f.str())) continue;
              for (const auto& n : heaplet_names(f)) names.insert(n);
            }
        return names;
      };
      auto ri = residue_names(uniq[i]);
      auto rj = residue_names(uniq[j]);
      for (const auto& n : ri) {
        if (rj.count(n)) {
          res.satisfiable = false;
          res.reason = Unsat{Unsat::Reason::interference, "shared vertex " + n};
          res.dropped.clear();
          return res;
        }
      }
    }
  }

  res.branches = std::move(uniq);
  return res;
}

std::vector<Heaplet> fieldwise(const Heaplet& h) {
  if (h.val.kind != Value::Kind::record) return {h};
  std::vector<Heaplet> out;
  out.reserve(h.val.fields.size());
  for (const auto& [field, v] : h.val.fields) {
    Location loc = h.loc;
    loc.path.push_back(field);
    out.push_back(Heaplet{std::move(loc), v});
  }
  return out;
}

std::vector<std::vector<size_t>> split_components(
    const std::vector<Heaplet>& hs) {
  std::map<std::string, int> ids;
  std::vector<int> parent;
  auto node_of = [&](const std::string& n) {
    auto [it, fresh] = ids.try_emplace(n, (int)parent.size());
    if (fresh) parent.push_back((int)parent.size());
    return it->second;
  };
  auto find = [&parent](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  std::vector<int> first(hs.size());
  for (size_t i = 0; i < hs.size(); ++i) {
    auto names = heaplet_names(hs[i]);
    first[i] = node_of(names.front());  // the source root, always present
    for (const auto& n : names) parent[find(node_of(n))] = find(first[i]);
  }
  std::vector<std::vector<size_t>> out;
  std::map<int, size_t> group_of;
  for (size_t i = 0; i < hs.size(); ++i) {
    auto [it, fresh] = group_of.try_emplace(find(first[i]), out.size());
    if (fresh) out.emplace_back();
    out[it->second].push_back(i);
  }
  return out;
}

std::vector<std::string> heaplet_names(const Heaplet& h) {
  std::vector<std::string> out = location_chain(h.loc);
  auto add_val = [&out](const Value& v) {
    if (v.kind == Value::Kind::sym)
      out.push_back(v.sym);
    else if (v.kind == Value::Kind::nil)
      out.push_back("nil");
  };
  if (h.val.kind == Value::Kind::record) {
    if (h.loc.is_field()) out.push_back(h.loc.str());
    for (const auto& [field, v] : h.val.fields) add_val(v);
  } else {
    add_val(h.val);
  }
  return out;
}

}  // namespace heaplog::detail
