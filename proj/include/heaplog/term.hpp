#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace heaplog {

// A store location: a stack variable (`x`) or an object field access
// path (`o.f1.f2`). The printed form doubles as the vertex name, so two
// locations with the same printed form always denote the same vertex.
struct Location {
  std::string root;
  std::vector<std::string> path;

  Location() = default;
  explicit Location(std::string r) : root(std::move(r)) {}
  Location(std::string r, std::vector<std::string> p)
      : root(std::move(r)), path(std::move(p)) {}

  bool is_field() const { return !path.empty(); }
  // Printed form, e.g. "o.f1.f2".
  std::string str() const;
  // Location naming the owner of the last field, e.g. "o.f1" for "o.f1.f2".
  Location parent() const;
  // Last path segment; empty for a bare root.
  const std::string& last_field() const;

  friend bool operator==(const Location&, const Location&) = default;
  friend auto operator<=>(const Location&, const Location&) = default;
};

// A cell value. `any` is the wildcard written `_`: it stands for "some
// value we do not care to name" and mints a fresh vertex per occurrence,
// exactly like an integer literal. Records list object fields in
// declaration order; their field values must be atoms (no nested records).
struct Value {
  enum class Kind { lit, sym, nil, any, record };

  Kind kind = Kind::nil;
  long long lit = 0;                                    // Kind::lit
  std::string sym;                                      // Kind::sym (may be dotted)
  std::vector<std::pair<std::string, Value>> fields;    // Kind::record

  static Value of_lit(long long v);
  static Value of_sym(std::string name);
  static Value of_nil();
  static Value of_any();
  static Value of_record(std::vector<std::pair<std::string, Value>> fs);

  bool is_atom() const { return kind != Kind::record; }
  // Printed form, e.g. "5", "y", "nil", "_", "(left: x, right: y)".
  std::string str() const;

  bool operator==(const Value& o) const;
  bool operator<(const Value& o) const;
};

// One points-to assertion `loc |-> val`.
struct Heaplet {
  Location loc;
  Value val;

  std::string str() const;
  bool operator==(const Heaplet& o) const { return loc == o.loc && val == o.val; }
  bool operator<(const Heaplet& o) const {
    if (loc != o.loc) return loc < o.loc;
    return val < o.val;
  }
};

class HeapTerm;

// A predicate application, e.g. tree(l). Arguments are locations, values,
// or whole heap terms; which one an identifier meant is settled by the
// parameter's use sites after substitution.
struct PredArg;
struct PredCall {
  std::string name;
  std::vector<PredArg> args;
};

// Spatial heap assertions. Terms are immutable trees with cheap copies.
// `pred` atoms let predicate calls sit inside ∘/‖ like any spatial atom,
// which clause bodies such as tree's require.
class HeapTerm {
 public:
  enum class Kind {
    emp,           // the empty heap
    true_total,    // total "true": any heap
    false_total,   // total "false": no heap
    true_partial,  // true(obj): obj's unspecified fields, any values
    false_partial, // false(obj): contradiction scoped to obj
    emp_partial,   // emp(obj): no unspecified fields of obj remain
    points_to,     // loc |-> val
    conj,          // strict conjunction  *   (shares a vertex, connects)
    disj,          // strict disjunction  ||  (shares nothing)
    inv,           // inverse heap        inv(t)
    pred,          // predicate call      p(a, ...)
  };

  HeapTerm();  // emp

  static HeapTerm emp();
  static HeapTerm true_total();
  static HeapTerm false_total();
  static HeapTerm true_partial(std::string obj);
  static HeapTerm false_partial(std::string obj);
  static HeapTerm emp_partial(std::string obj);
  static HeapTerm points_to(Heaplet h);
  static HeapTerm points_to(Location loc, Value val);
  static HeapTerm conj(HeapTerm l, HeapTerm r);
  static HeapTerm disj(HeapTerm l, HeapTerm r);
  static HeapTerm inv(HeapTerm t);
  static HeapTerm pred(PredCall call);

  // Folds a nonempty list with * or || left to right.
  static HeapTerm conj_all(const std::vector<HeapTerm>& ts);
  static HeapTerm disj_all(const std::vector<HeapTerm>& ts);

  Kind kind() const;
  const Heaplet& heaplet() const;       // points_to
  const std::string& object() const;    // *_partial
  const HeapTerm& left() const;         // conj/disj
  const HeapTerm& right() const;        // conj/disj
  const HeapTerm& child() const;        // inv
  const PredCall& call() const;         // pred

  bool is_constant() const;  // emp/true/false, total or partial
  bool operator==(const HeapTerm& o) const;
  bool operator!=(const HeapTerm& o) const { return !(*this == o); }

  // Printed form with minimal parentheses; round-trips through parse_term.
  std::string str() const;

 private:
  struct Node;
  explicit HeapTerm(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct PredArg {
  enum class Kind { location, value, term };
  Kind kind = Kind::value;
  Location loc;
  Value val;
  std::shared_ptr<const HeapTerm> term;

  static PredArg of_location(Location l);
  static PredArg of_value(Value v);
  static PredArg of_term(HeapTerm t);

  std::string str() const;
  bool operator==(const PredArg& o) const;
};

// Boolean layer over spatial terms: `!`, `&&`, `|`. Negation is only
// meaningful over already-boolean operands; the spatial layer below stays
// untouched by it.
class ExtTerm {
 public:
  enum class Kind { heap, not_, and_, or_ };

  ExtTerm();  // heap(emp)

  static ExtTerm heap(HeapTerm t);
  static ExtTerm pred_call(PredCall c);  // convenience: heap(pred(c))
  static ExtTerm not_(ExtTerm t);
  static ExtTerm and_(ExtTerm l, ExtTerm r);
  static ExtTerm or_(ExtTerm l, ExtTerm r);

  Kind kind() const;
  const HeapTerm& heap_term() const;  // heap
  const ExtTerm& left() const;        // and_/or_
  const ExtTerm& right() const;       // and_/or_
  const ExtTerm& child() const;       // not_

  bool operator==(const ExtTerm& o) const;
  bool operator!=(const ExtTerm& o) const { return !(*this == o); }

  std::string str() const;

 private:
  struct Node;
  explicit ExtTerm(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

std::string print_term(const HeapTerm& t);
std::string print_term(const ExtTerm& t);

}  // namespace heaplog
