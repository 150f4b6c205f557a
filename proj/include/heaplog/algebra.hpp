#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "heaplog/graph.hpp"
#include "heaplog/term.hpp"

namespace heaplog {

// The term still contains constructs that need declarations or unfolding
// (partial constants, predicate calls) where only ground material is
// allowed.
struct NeedsEnvError : std::runtime_error {
  explicit NeedsEnvError(const std::string& what_part)
      : std::runtime_error("term is not ground: " + what_part +
                           " (unfold with an environment first)") {}
};

// An inverse heaplet with no positive partner in its ∘-scope.
struct UnmatchedInverseError : std::runtime_error {
  explicit UnmatchedInverseError(const std::string& heaplet)
      : std::runtime_error("unmatched inverse heaplet: inv(" + heaplet + ")") {}
};

// A rewrite rule applied where its precondition fails.
struct RuleInapplicableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One ∘-connected piece of a normal form: heaplets in canonical order
// (records split per field, sorted by printed location then value). An
// `open` component additionally carries a total `true`, i.e. it admits
// any further heaplets.
struct Component {
  std::vector<Heaplet> heaplets;
  bool open = false;

  HeapTerm to_term() const;
  friend bool operator==(const Component&, const Component&) = default;
};

// ‖-normal form: the flat ordered list of components. An unsatisfiable
// term has satisfiable == false and no components; a satisfiable term
// with no components is emp.
struct NormalForm {
  bool satisfiable = true;
  std::vector<Component> disjuncts;
  std::optional<Unsat> reason;         // when !satisfiable
  std::vector<std::string> dropped;    // diagnostics: disjuncts dropped

  HeapTerm to_term() const;
  bool operator==(const NormalForm& o) const {
    return satisfiable == o.satisfiable && disjuncts == o.disjuncts;
  }
};

// Rewrites to ‖-normal form: lifts ‖ over ∘ (both distributivity
// orientations), pushes inversions down, cancels inverse pairs
// (canonization I and II after each removal), validates every ∘-scope,
// and drops unsatisfiable disjuncts while at least one survives —
// otherwise the whole form is unsatisfiable. Idempotent. Throws
// NeedsEnvError for non-ground input and UnmatchedInverseError for an
// inverse with no partner.
NormalForm normalize(const HeapTerm& t);

// Exact-name equivalence: both sides normalize to the same form (two
// unsatisfiable terms are equivalent). No renaming is attempted.
bool equiv(const HeapTerm& a, const HeapTerm& b);

// Strict conjunction of two finished graphs: defined when either side is
// empty or the union is one connected graph without repetition.
std::variant<HeapGraph, Unsat> conjoin(const HeapGraph& g1,
                                       const HeapGraph& g2);

// Strict disjunction: defined when the sides share no vertex; the result
// keeps both sides as separate components.
std::variant<HeapGraph, Unsat> disjoin(const HeapGraph& g1,
                                       const HeapGraph& g2);

// Inverse heap term: distributes over ∘ and ‖, is an involution, and
// fixes emp/true/false. The result carries inv() directly on heaplets.
HeapTerm invert(const HeapTerm& t);

// Cancels every inverse heaplet against its syntactically equal positive
// partner within the same ∘-scope, splitting a scope that falls apart
// into ‖-components (canonization I) and dropping orphaned vertices
// (canonization II). Pure rewriting: satisfiability is not judged here.
HeapTerm cancel(const HeapTerm& t);

// cancel() that tolerates leftovers instead of throwing, reporting what
// matched, what was expected but absent, and what remained.
struct CancelReport {
  HeapTerm residue;
  std::vector<Heaplet> matched;  // positives consumed by an inverse
  std::vector<Heaplet> missing;  // inverses with no partner
  std::vector<Heaplet> extra;    // positives left over
};
CancelReport cancel_with_report(const HeapTerm& t);

// U ∘ B ‖ C  →  U ∘ B ∘ C: joins the separated heaplet c onto u ∘ b.
// Applicable when u ∘ b is satisfiable and c is connectible to it.
HeapTerm join_rule(const HeapTerm& u, const Heaplet& b, const Heaplet& c);

// U ∘ B ∘ C  →  U ∘ B ‖ C: splits the heaplet c off a satisfiable
// conjunction.
HeapTerm split_rule(const HeapTerm& u, const Heaplet& b, const Heaplet& c);

// First duplicate heaplet or duplicated source location within one
// ∘-scope of a ground term; ‖-separated scopes are independent. Returns
// the violation as an Unsat (duplicate_heaplet / duplicate_source), or
// nothing when the term is repetition-free.
std::optional<Unsat> detect_repetition(const HeapTerm& t);

}  // namespace heaplog
