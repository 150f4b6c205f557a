#include "heaplog/algebra.hpp"

#include <algorithm>

#include "eval.hpp"
#include "scope_tracker.hpp"

namespace heaplog {

HeapTerm Component::to_term() const {
  std::vector<HeapTerm> atoms;
  atoms.reserve(heaplets.size() + 1);
  for (const auto& h : heaplets) atoms.push_back(HeapTerm::points_to(h));
  if (open) atoms.push_back(HeapTerm::true_total());
  if (atoms.empty()) return HeapTerm::emp();
  return HeapTerm::conj_all(atoms);
}

HeapTerm NormalForm::to_term() const {
  if (!satisfiable) return HeapTerm::false_total();
  if (disjuncts.empty()) return HeapTerm::emp();
  std::vector<HeapTerm> parts;
  parts.reserve(disjuncts.size());
  for (const auto& d : disjuncts) parts.push_back(d.to_term());
  return HeapTerm::disj_all(parts);
}

namespace {

// Canonical component order: material components lexicographically by
// heaplet, closed before open on ties, the bare open component last.
bool component_before(const Component& a, const Component& b) {
  if (a.heaplets.empty() != b.heaplets.empty()) return !a.heaplets.empty();
  size_t n = std::min(a.heaplets.size(), b.heaplets.size());
  for (size_t i = 0; i < n; ++i) {
    if (detail::heaplet_before(a.heaplets[i], b.heaplets[i])) return true;
    if (detail::heaplet_before(b.heaplets[i], a.heaplets[i])) return false;
  }
  if (a.heaplets.size() != b.heaplets.size())
    return a.heaplets.size() < b.heaplets.size();
  return a.open < b.open;
}

}  // namespace

NormalForm normalize(const HeapTerm& t) {
  auto ev = detail::eval_term(t);
  NormalForm nf;
  nf.dropped = std::move(ev.dropped);
  if (!ev.satisfiable) {
    nf.satisfiable = false;
    nf.reason = std::move(ev.reason);
    return nf;
  }
  for (const auto& o : ev.branches) {
    std::vector<Component> comps;
    for (const auto& group : o.components) {
      Component c;
      for (const auto& h : group)
        for (const auto& f : detail::fieldwise(h)) c.heaplets.push_back(f);
      std::sort(c.heaplets.begin(), c.heaplets.end(),
                [](const Heaplet& a, const Heaplet& b) {
                  return detail::heaplet_before(a, b);
                });
      comps.push_back(std::move(c));
    }
    if (o.open) {
      if (comps.empty())
        comps.push_back(Component{{}, true});
      else
        comps.front().open = true;
    }
    for (auto& c : comps) nf.disjuncts.push_back(std::move(c));
  }
  std::sort(nf.disjuncts.begin(), nf.disjuncts.end(), component_before);
  nf.disjuncts.erase(std::unique(nf.disjuncts.begin(), nf.disjuncts.end()),
                     nf.disjuncts.end());
  return nf;
}

bool equiv(const HeapTerm& a, const HeapTerm& b) {
  return normalize(a) == normalize(b);
}

std::variant<HeapGraph, Unsat> conjoin(const HeapGraph& g1,
                                       const HeapGraph& g2) {
  if (g1.empty()) return g2;
  if (g2.empty()) return g1;
  std::vector<Heaplet> all = g1.heaplets();
  all.insert(all.end(), g2.heaplets().begin(), g2.heaplets().end());
  return build_heaplets(all, /*require_connected=*/true);
}

std::variant<HeapGraph, Unsat> disjoin(const HeapGraph& g1,
                                       const HeapGraph& g2) {
  if (g1.empty()) return g2;
  if (g2.empty()) return g1;
  auto n1 = g1.shared_names();
  for (const auto& n : n1) {
    if (g2.find(n))
      return Unsat{Unsat::Reason::interference, "shared vertex " + n};
  }
  std::vector<Heaplet> all = g1.heaplets();
  all.insert(all.end(), g2.heaplets().begin(), g2.heaplets().end());
  return build_heaplets(all, /*require_connected=*/false);
}

HeapTerm invert(const HeapTerm& t) {
  switch (t.kind()) {
    case HeapTerm::Kind::emp:
    case HeapTerm::Kind::true_total:
    case HeapTerm::Kind::false_total:
      return t;  // the constants are their own inverses
    case HeapTerm::Kind::points_to:
      return HeapTerm::inv(t);
    case HeapTerm::Kind::conj:
      return HeapTerm::conj(invert(t.left()), invert(t.right()));
    case HeapTerm::Kind::disj:
      return HeapTerm::disj(invert(t.left()), invert(t.right()));
    case HeapTerm::Kind::inv:
      return t.child();  // involution
    case HeapTerm::Kind::true_partial:
    case HeapTerm::Kind::false_partial:
    case HeapTerm::Kind::emp_partial:
    case HeapTerm::Kind::pred:
      break;
  }
  throw NeedsEnvError(t.str());
}

namespace {

struct CancelledBranch {
  std::vector<std::vector<Heaplet>> comps;
  bool open = false;
  bool falsy = false;
};

// Matches the branch's inverses against positives. Without `report` an
// unmatched inverse throws; with it, leftovers are recorded fieldwise.
CancelledBranch cancel_branch(const detail::Branch& b, CancelReport* report) {
  CancelledBranch out;
  out.open = b.open;
  out.falsy = b.falsy;

  std::vector<Heaplet> pos, inv;
  for (const auto& it : b.items) (it.inverse ? inv : pos).push_back(it.h);

  std::vector<bool> used(pos.size(), false);
  for (const auto& ih : inv) {
    bool found = false;
    for (size_t i = 0; i < pos.size(); ++i) {
      if (!used[i] && pos[i] == ih) {
        used[i] = true;
        found = true;
        if (report)
          for (const auto& f : detail::fieldwise(ih))
            report->matched.push_back(f);
        break;
      }
    }
    if (!found) {
      if (!report) throw UnmatchedInverseError(ih.str());
      for (const auto& f : detail::fieldwise(ih)) report->missing.push_back(f);
    }
  }

  std::vector<Heaplet> rest;
  for (size_t i = 0; i < pos.size(); ++i)
    if (!used[i]) rest.push_back(pos[i]);
  if (report)
    for (const auto& h : rest)
      for (const auto& f : detail::fieldwise(h)) report->extra.push_back(f);

  for (const auto& idxs : detail::split_components(rest)) {
    std::vector<Heaplet> comp;
    comp.reserve(idxs.size());
    for (size_t i : idxs) comp.push_back(rest[i]);
    std::sort(comp.begin(), comp.end(), [](const Heaplet& a, const Heaplet& b) {
      return detail::heaplet_before(a, b);
    });
    out.comps.push_back(std::move(comp));
  }
  std::sort(out.comps.begin(), out.comps.end(),
            [](const std::vector<Heaplet>& a, const std::vector<Heaplet>& b) {
              return detail::heaplet_before(a.front(), b.front());
            });
  return out;
}

HeapTerm branch_to_term(const CancelledBranch& cb) {
  if (cb.falsy) return HeapTerm::false_total();
  std::vector<HeapTerm> comp_terms;
  for (const auto& comp : cb.comps) {
    std::vector<HeapTerm> atoms;
    atoms.reserve(comp.size());
    for (const auto& h : comp) atoms.push_back(HeapTerm::points_to(h));
    comp_terms.push_back(HeapTerm::conj_all(atoms));
  }
  if (cb.open) {
    if (comp_terms.empty())
      comp_terms.push_back(HeapTerm::true_total());
    else
      comp_terms.front() =
          HeapTerm::conj(comp_terms.front(), HeapTerm::true_total());
  }
  if (comp_terms.empty()) return HeapTerm::emp();
  return HeapTerm::disj_all(comp_terms);
}

HeapTerm cancel_impl(const HeapTerm& t, CancelReport* report) {
  std::vector<HeapTerm> parts;
  for (const auto& b : detail::lift_branches(t))
    parts.push_back(branch_to_term(cancel_branch(b, report)));
  if (parts.empty()) return HeapTerm::emp();
  return HeapTerm::disj_all(parts);
}

}  // namespace

HeapTerm cancel(const HeapTerm& t) { return cancel_impl(t, nullptr); }

CancelReport cancel_with_report(const HeapTerm& t) {
  CancelReport r;
  r.residue = cancel_impl(t, &r);
  return r;
}

namespace {

HeapTerm with_heaplet(const HeapTerm& u, const Heaplet& h) {
  if (u.kind() == HeapTerm::Kind::emp) return HeapTerm::points_to(h);
  return HeapTerm::conj(u, HeapTerm::points_to(h));
}

}  // namespace

HeapTerm join_rule(const HeapTerm& u, const Heaplet& b, const Heaplet& c) {
  HeapTerm ub = with_heaplet(u, b);
  HeapTerm ubc = HeapTerm::conj(ub, HeapTerm::points_to(c));
  NormalForm base = normalize(ub);
  if (!base.satisfiable)
    throw RuleInapplicableError("join: '" + ub.str() + "' is unsatisfiable (" +
                                base.reason->str() + ")");
  NormalForm joined = normalize(ubc);
  if (!joined.satisfiable)
    throw RuleInapplicableError("join: '" + c.str() +
                                "' cannot be connected (" +
                                joined.reason->str() + ")");
  return ubc;
}

HeapTerm split_rule(const HeapTerm& u, const Heaplet& b, const Heaplet& c) {
  HeapTerm ub = with_heaplet(u, b);
  HeapTerm ubc = HeapTerm::conj(ub, HeapTerm::points_to(c));
  NormalForm whole = normalize(ubc);
  if (!whole.satisfiable)
    throw RuleInapplicableError("split: '" + ubc.str() +
                                "' is unsatisfiable (" + whole.reason->str() +
                                ")");
  return HeapTerm::disj(ub, HeapTerm::points_to(c));
}

std::optional<Unsat> detect_repetition(const HeapTerm& t) {
  for (const auto& b : detail::lift_branches(t)) {
    detail::ScopeTracker tracker;
    for (const auto& it : b.items) {
      if (it.inverse) continue;  // inverses cancel, they do not claim
      if (auto u = tracker.add(it.h)) return u;
    }
  }
  return std::nullopt;
}

}  // namespace heaplog
