#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "heaplog/term.hpp"

namespace heaplog {

// Errors raised while using declarations. All carry a plain-text what().
struct EnvError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnknownPredicateError : EnvError {
  explicit UnknownPredicateError(const std::string& name)
      : EnvError("unknown predicate: " + name) {}
};
struct ArityMismatchError : EnvError {
  ArityMismatchError(const std::string& name, size_t want, size_t got)
      : EnvError("predicate " + name + " expects " + std::to_string(want) +
                 " argument(s), got " + std::to_string(got)) {}
};
struct UntypedObjectError : EnvError {
  explicit UntypedObjectError(const std::string& obj)
      : EnvError("object " + obj +
                 " has no class typing; partial constants need one") {}
};
struct DepthExhaustedError : EnvError {
  explicit DepthExhaustedError(const std::string& name)
      : EnvError("unfolding depth exhausted before any clause of " + name +
                 " became call-free") {}
};

// A class lists its fields in declaration order; names are pairwise
// distinct (enforced on construction — the declaration syntax has no
// inheritance, so no further disambiguation is ever needed).
struct ClassDecl {
  std::string name;
  std::vector<std::string> fields;

  bool has_field(const std::string& f) const;
};

// One clause of a predicate definition: optional existentials, then a
// spatial body. A body that was literally `nil` is stored as emp.
struct PredClause {
  std::vector<std::string> existentials;
  HeapTerm body;
};

struct PredicateDef {
  std::string name;
  std::vector<std::string> params;
  std::vector<PredClause> clauses;
};

// Declared classes, object typings, and predicate definitions.
class Env {
 public:
  void add_class(ClassDecl c);                       // rejects duplicate fields
  void add_typing(std::string obj, std::string cls); // class must be declared
  void add_predicate(PredicateDef p);

  const ClassDecl* find_class(const std::string& name) const;
  // Class of `obj`, or null when untyped.
  const ClassDecl* class_of(const std::string& obj) const;
  const PredicateDef* find_predicate(const std::string& name) const;

  // Checks arity of every predicate call inside every clause body.
  void validate() const;

  const std::map<std::string, ClassDecl>& classes() const { return classes_; }
  const std::map<std::string, std::string>& typings() const { return typings_; }
  const std::map<std::string, PredicateDef>& predicates() const {
    return predicates_;
  }

 private:
  std::map<std::string, ClassDecl> classes_;
  std::map<std::string, std::string> typings_;
  std::map<std::string, PredicateDef> predicates_;
};

// A named goal from an input file plus the declarations around it.
struct Goal {
  std::string name;
  ExtTerm term;
};

struct Workspace {
  Env env;
  std::vector<Goal> goals;

  const Goal* find_goal(const std::string& name) const;
};

// --- Partial-constant unfolding ------------------------------------------

// Replaces true(obj)/false(obj)/emp(obj) by their ground expansions.
//
// Within each ∘-scope, explicitly written field heaplets of obj are
// consulted scope-wide (a field written to the right of true(obj) still
// counts as specified); several true(obj) in one scope consume left to
// right. true(obj) becomes the ∘-chain of the remaining fields with `_`
// wildcard values, or emp once nothing remains. false(obj) poisons the
// term. emp(obj) asserts no unspecified field remains: emp when that
// holds, false otherwise.
//
// Throws UntypedObjectError for a partial constant on an untyped object.
HeapTerm unfold_partial(const HeapTerm& t, const Env& env);

// --- Predicate unfolding ---------------------------------------------------

struct UnfoldResult {
  std::vector<HeapTerm> disjuncts;   // ground alternatives, in clause order
  std::vector<std::string> notes;    // clauses dropped at the depth frontier
};

// Expands one call to the disjunct list of its clause bodies with arguments
// substituted and existentials freshly renamed (`x'1`, `x'2`, ...). Nested
// calls recurse while depth > 0; at depth 0 only call-free clauses survive.
// Throws UnknownPredicateError/ArityMismatchError, and DepthExhaustedError
// only when no clause at all survives the bound.
UnfoldResult unfold_predicate(const PredCall& call, const Env& env, int depth);

// Ground expansions of an arbitrary term: predicate calls and partial
// constants are unfolded together, left to right, sharing one scope state
// (a call sees the fields consumed to its left, not to its right).
UnfoldResult unfold_term(const ExtTerm& t, const Env& env, int depth);

// --- Repetition checking across predicate boundaries -----------------------

struct RepetitionReport {
  enum class Verdict { none, witness, inconclusive };
  Verdict verdict = Verdict::none;
  std::string witness;  // printed duplicate heaplet/source when found
  int depth = 0;        // depth at which the witness appeared
};

// Unfolds bounded by `depth`, tracking heaplets per ∘-scope on a stack so
// duplicates hidden behind predicate calls are found. A hit anywhere in
// any alternative is reported; exhausting the bound without a verdict is
// inconclusive, never a silent pass.
RepetitionReport check_repetition_stack(const ExtTerm& t, const Env& env,
                                        int depth);

// --- Denotation comparison --------------------------------------------------

// Unfolds both sides (stack-based) and compares normal forms. Wildcard
// values match any value at the same location; a component holding total
// `true` absorbs the other side's surplus heaplets. Location and symbol
// names otherwise compare exactly.
bool compare_denotation(const ExtTerm& expected, const ExtTerm& actual,
                        const Env& env, int depth);

}  // namespace heaplog
