#pragma once

// Internal evaluation pipeline shared by graph construction and the
// algebra: a term is lifted into disjunctive branches (‖ at the top,
// each branch one flat ∘-scope), every branch is validated and
// inverse-cancelled on its own, and the surviving branches are checked
// against each other for interference.

#include <optional>
#include <string>
#include <vector>

#include "heaplog/graph.hpp"
#include "heaplog/term.hpp"

namespace heaplog::detail {

// A heaplet occurrence inside one ∘-scope, with its inversion polarity.
struct SignedHeaplet {
  Heaplet h;
  bool inverse = false;
};

// One flat ∘-scope after ‖ has been lifted to the top.
struct Branch {
  std::vector<SignedHeaplet> items;
  bool open = false;   // scope contains a total `true`
  bool falsy = false;  // scope contains a total `false`
};

// Distributes ∘ over ‖ in both orientations and flattens nested scopes,
// producing the disjunct list. Inversions are pushed down to heaplets.
// Throws NeedsEnvError when a partial constant or predicate call is hit.
std::vector<Branch> lift_branches(const HeapTerm& t);

// The verdict on one branch.
struct BranchOutcome {
  bool sat = true;
  std::optional<Unsat> reason;
  bool open = false;
  // Post-cancellation ∘-components, each the original heaplets of the
  // component sorted canonically; components ordered by smallest member.
  std::vector<std::vector<Heaplet>> components;
  std::vector<Heaplet> matched;  // positives consumed by an inverse
  std::vector<Heaplet> missing;  // inverses with no partner
};

// Validates one branch: repetition claims and pre-cancellation
// connectivity over the positive heaplets, then inverse cancellation and
// component splitting. When `tolerate_unmatched` is false an inverse
// without partner throws UnmatchedInverseError; otherwise it is recorded
// in `missing`.
BranchOutcome eval_branch(const Branch& b, bool tolerate_unmatched);

// The whole pipeline over a term.
struct EvalResult {
  bool satisfiable = true;
  std::optional<Unsat> reason;
  std::vector<BranchOutcome> branches;  // surviving branches only
  std::vector<std::string> dropped;     // diagnostics for dropped branches
};
EvalResult eval_term(const HeapTerm& t);

// Canonical per-field split: a record heaplet becomes one heaplet per
// field (in record order); every other heaplet passes through unchanged.
std::vector<Heaplet> fieldwise(const Heaplet& h);

// Every shareable vertex name a heaplet touches: the source root and its
// path prefixes, nil, symbolic values, and record field values.
std::vector<std::string> heaplet_names(const Heaplet& h);

// Groups heaplet indices by shared-name connectivity, ordered by first
// member. Purely structural — no repetition judgement.
std::vector<std::vector<size_t>> split_components(
    const std::vector<Heaplet>& hs);

// Sort key for canonical heaplet order.
inline bool heaplet_before(const Heaplet& a, const Heaplet& b) {
  const std::string la = a.loc.str(), lb = b.loc.str();
  if (la != lb) return la < lb;
  return a.val.str() < b.val.str();
}

}  // namespace heaplog::detail
