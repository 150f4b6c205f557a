#include "heaplog/term.hpp"

#include <sstream>
#include <stdexcept>

namespace heaplog {

std::string Location::str() const {
  std::string s = root;
  for (const auto& f : path) {
    s += '.';
    s += f;
  }
  return s;
}

Location Location::parent() const {
  Location p(root, path);
  if (!p.path.empty()) p.path.pop_back();
  return p;
}

const std::string& Location::last_field() const {
  static const std::string none;
  return path.empty() ? none : path.back();
}

Value Value::of_lit(long long v) {
  Value x;
  x.kind = Kind::lit;
  x.lit = v;
  return x;
}

Value Value::of_sym(std::string name) {
  Value x;
  x.kind = Kind::sym;
  x.sym = std::move(name);
  return x;
}

Value Value::of_nil() {
  Value x;
  x.kind = Kind::nil;
  return x;
}

Value Value::of_any() {
  Value x;
  x.kind = Kind::any;
  return x;
}

Value Value::of_record(std::vector<std::pair<std::string, Value>> fs) {
  Value x;
  x.kind = Kind::record;
  x.fields = std::move(fs);
  return x;
}

std::string Value::str() const {
  switch (kind) {
    case Kind::lit:
      return std::to_string(lit);
    case Kind::sym:
      return sym;
    case Kind::nil:
      return "nil";
    case Kind::any:
      return "_";
    case Kind::record: {
      std::string s = "(";
      for (size_t i = 0; i < fields.size(); ++i) {
        if (i) s += ", ";
        s += fields[i].first;
        s += ": ";
        s += fields[i].second.str();
      }
      s += ')';
      return s;
    }
  }
  return {};
}

bool Value::operator==(const Value& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case Kind::lit:
      return lit == o.lit;
    case Kind::sym:
      return sym == o.sym;
    case Kind::nil:
    case Kind::any:
      return true;
    case Kind::record:
      return fields == o.fields;
  }
  return false;
}

bool Value::operator<(const Value& o) const {
  // Order by printed form so sorting matches the documented tie-break rule.
  return str() < o.str();
}

std::string Heaplet::str() const { return loc.str() + " |-> " + val.str(); }

// ---------------------------------------------------------------------------
// HeapTerm nodes

struct HeapTerm::Node {
  Kind kind = Kind::emp;
  Heaplet h;           // points_to
  std::string obj;     // *_partial
  // Child slots start as null handles; the factories that build composite
  // kinds fill them. Default-constructing a HeapTerm here would recurse.
  HeapTerm a{nullptr}, b{nullptr};  // conj/disj (b unused for inv)
  PredCall pc;         // pred
};

HeapTerm::HeapTerm() : node_(std::make_shared<const Node>()) {}

HeapTerm HeapTerm::emp() { return HeapTerm(); }

HeapTerm HeapTerm::true_total() {
  auto n = std::make_shared<Node>();
  n->kind = Kind::true_total;
  return HeapTerm(std::move(n));
}

HeapTerm HeapTerm::false_total() {
  auto n = std::make_shared<Node>();
  n->kind = Kind::false_total;
  return HeapTerm(std::move(n));
}

HeapTerm HeapTerm::true_partial(std::string obj) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::true_partial;
  n->obj = std::move(obj);
  return HeapTerm(std::move(n));
}

HeapTerm HeapTerm::false_partial(std::string obj) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::false_partial;
  n->obj = std::move(obj);
  return HeapTerm(std::move(n));
}

HeapTerm HeapTerm::emp_partial(std::string obj) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::emp_partial;
  n->obj = std::move(obj);
  return HeapTerm(std::move(n));
}

HeapTerm HeapTerm::points_to(Heaplet h) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::points_to;
  n->h = std::move(h);
  return HeapTerm(std::move(n));
}

HeapTerm HeapTerm::points_to(Location loc, Value val) {
  return points_to(Heaplet{std::move(loc), std::move(val)});
}

HeapTerm HeapTerm::conj(HeapTerm l, HeapTerm r) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::conj;
  n->a = std::move(l);
  n->b = std::move(r);
  return HeapTerm(std::move(n));
}

HeapTerm HeapTerm::disj(HeapTerm l, HeapTerm r) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::disj;
  n->a = std::move(l);
  n->b = std::move(r);
  return HeapTerm(std::move(n));
}

HeapTerm HeapTerm::inv(HeapTerm t) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::inv;
  n->a = std::move(t);
  return HeapTerm(std::move(n));
}

HeapTerm HeapTerm::pred(PredCall call) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::pred;
  n->pc = std::move(call);
  return HeapTerm(std::move(n));
}

HeapTerm HeapTerm::conj_all(const std::vector<HeapTerm>& ts) {
  if (ts.empty()) return emp();
  HeapTerm acc = ts[0];
  for (size_t i = 1; i < ts.size(); ++i) acc = conj(acc, ts[i]);
  return acc;
}

HeapTerm HeapTerm::disj_all(const std::vector<HeapTerm>& ts) {
  if (ts.empty()) return emp();
  HeapTerm acc = ts[0];
  for (size_t i = 1; i < ts.size(); ++i) acc = disj(acc, ts[i]);
  return acc;
}

HeapTerm::Kind HeapTerm::kind() const { return node_->kind; }

const Heaplet& HeapTerm::heaplet() const {
  if (node_->kind != Kind::points_to)
    throw std::logic_error("HeapTerm::heaplet on non points-to node");
  return node_->h;
}

const std::string& HeapTerm::object() const {
  switch (node_->kind) {
    case Kind::true_partial:
    case Kind::false_partial:
    case Kind::emp_partial:
      return node_->obj;
    default:
      throw std::logic_error("HeapTerm::object on non-partial node");
  }
}

const HeapTerm& HeapTerm::left() const {
  if (node_->kind != Kind::conj && node_->kind != Kind::disj)
    throw std::logic_error("HeapTerm::left on leaf node");
  return node_->a;
}

const HeapTerm& HeapTerm::right() const {
  if (node_->kind != Kind::conj && node_->kind != Kind::disj)
    throw std::logic_error("HeapTerm::right on leaf node");
  return node_->b;
}

const HeapTerm& HeapTerm::child() const {
  if (node_->kind != Kind::inv)
    throw std::logic_error("HeapTerm::child on non-inv node");
  return node_->a;
}

const PredCall& HeapTerm::call() const {
  if (node_->kind != Kind::pred)
    throw std::logic_error("HeapTerm::call on non-pred node");
  return node_->pc;
}

bool HeapTerm::is_constant() const {
  switch (node_->kind) {
    case Kind::emp:
    case Kind::true_total:
    case Kind::false_total:
    case Kind::true_partial:
    case Kind::false_partial:
    case Kind::emp_partial:
      return true;
    default:
      return false;
  }
}

bool HeapTerm::operator==(const HeapTerm& o) const {
  if (node_ == o.node_) return true;
  if (node_->kind != o.node_->kind) return false;
  switch (node_->kind) {
    case Kind::emp:
    case Kind::true_total:
    case Kind::false_total:
      return true;
    case Kind::true_partial:
    case Kind::false_partial:
    case Kind::emp_partial:
      return node_->obj == o.node_->obj;
    case Kind::points_to:
      return node_->h == o.node_->h;
    case Kind::conj:
    case Kind::disj:
      return node_->a == o.node_->a && node_->b == o.node_->b;
    case Kind::inv:
      return node_->a == o.node_->a;
    case Kind::pred:
      return node_->pc.name == o.node_->pc.name &&
             node_->pc.args == o.node_->pc.args;
  }
  return false;
}

// ---------------------------------------------------------------------------
// PredArg

PredArg PredArg::of_location(Location l) {
  PredArg a;
  a.kind = Kind::location;
  a.loc = std::move(l);
  return a;
}

PredArg PredArg::of_value(Value v) {
  PredArg a;
  a.kind = Kind::value;
  a.val = std::move(v);
  return a;
}

PredArg PredArg::of_term(HeapTerm t) {
  PredArg a;
  a.kind = Kind::term;
  a.term = std::make_shared<const HeapTerm>(std::move(t));
  return a;
}

std::string PredArg::str() const {
  switch (kind) {
    case Kind::location:
      return loc.str();
    case Kind::value:
      return val.str();
    case Kind::term:
      return term->str();
  }
  return {};
}

bool PredArg::operator==(const PredArg& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case Kind::location:
      return loc == o.loc;
    case Kind::value:
      return val == o.val;
    case Kind::term:
      return *term == *o.term;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Printing with minimal parentheses.
//
// Spatial precedence, tightest first: inv/atoms, then *, then ||.
// Boolean precedence above that: !, then &&, then |.

namespace {

// Binding strength of a spatial node; larger binds tighter.
int heap_prec(HeapTerm::Kind k) {
  switch (k) {
    case HeapTerm::Kind::disj:
      return 1;
    case HeapTerm::Kind::conj:
      return 2;
    default:
      return 3;  // atoms, inv(...), constants, calls
  }
}

void print_heap(const HeapTerm& t, int min_prec, std::string& out) {
  int p = heap_prec(t.kind());
  bool paren = p < min_prec;
  if (paren) out += '(';
  switch (t.kind()) {
    case HeapTerm::Kind::emp:
      out += "emp";
      break;
    case HeapTerm::Kind::true_total:
      out += "true";
      break;
    case HeapTerm::Kind::false_total:
      out += "false";
      break;
    case HeapTerm::Kind::true_partial:
      out += "true(" + t.object() + ")";
      break;
    case HeapTerm::Kind::false_partial:
      out += "false(" + t.object() + ")";
      break;
    case HeapTerm::Kind::emp_partial:
      out += "emp(" + t.object() + ")";
      break;
    case HeapTerm::Kind::points_to: {
      const Heaplet& h = t.heaplet();
      if (h.val.kind == Value::Kind::any) {
        // Bare-field shorthand prints back as written: `a.g1` not `a.g1 |-> _`
        // would be ambiguous the other way; keep the explicit arrow so the
        // wildcard survives a round trip unambiguously.
        out += h.loc.str() + " |-> _";
      } else {
        out += h.str();
      }
      break;
    }
    case HeapTerm::Kind::conj:
      // Left-assoc chains print flat; a right child at equal precedence
      // keeps its parentheses.
      print_heap(t.left(), 2, out);
      out += " * ";
      print_heap(t.right(), 3, out);
      break;
    case HeapTerm::Kind::disj:
      print_heap(t.left(), 1, out);
      out += " || ";
      print_heap(t.right(), 2, out);
      break;
    case HeapTerm::Kind::inv:
      out += "inv(";
      print_heap(t.child(), 0, out);
      out += ')';
      break;
    case HeapTerm::Kind::pred: {
      const PredCall& c = t.call();
      out += c.name;
      out += '(';
      for (size_t i = 0; i < c.args.size(); ++i) {
        if (i) out += ", ";
        out += c.args[i].str();
      }
      out += ')';
      break;
    }
  }
  if (paren) out += ')';
}

int ext_prec(ExtTerm::Kind k) {
  switch (k) {
    case ExtTerm::Kind::or_:
      return 1;
    case ExtTerm::Kind::and_:
      return 2;
    case ExtTerm::Kind::not_:
      return 3;
    case ExtTerm::Kind::heap:
      return 4;
  }
  return 4;
}

void print_ext(const ExtTerm& t, int min_prec, std::string& out) {
  int p = ext_prec(t.kind());
  bool paren = p < min_prec;
  if (paren) out += '(';
  switch (t.kind()) {
    case ExtTerm::Kind::heap:
      print_heap(t.heap_term(), 0, out);
      break;
    case ExtTerm::Kind::not_:
      out += "! ";
      print_ext(t.child(), 3, out);
      break;
    case ExtTerm::Kind::and_:
      print_ext(t.left(), 2, out);
      out += " && ";
      print_ext(t.right(), 3, out);
      break;
    case ExtTerm::Kind::or_:
      print_ext(t.left(), 1, out);
      out += " | ";
      print_ext(t.right(), 2, out);
      break;
  }
  if (paren) out += ')';
}

}  // namespace

std::string HeapTerm::str() const {
  std::string out;
  print_heap(*this, 0, out);
  return out;
}

// ---------------------------------------------------------------------------
// ExtTerm nodes

struct ExtTerm::Node {
  Kind kind = Kind::heap;
  HeapTerm h;  // defaults to emp, which no longer recurses
  // Null handles: the factories fill what they use. Default-constructing
  // an ExtTerm here would recurse.
  ExtTerm a{nullptr}, b{nullptr};
};

ExtTerm::ExtTerm() : node_(std::make_shared<const Node>()) {}

ExtTerm ExtTerm::heap(HeapTerm t) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::heap;
  n->h = std::move(t);
  return ExtTerm(std::move(n));
}

ExtTerm ExtTerm::pred_call(PredCall c) {
  return heap(HeapTerm::pred(std::move(c)));
}

ExtTerm ExtTerm::not_(ExtTerm t) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::not_;
  n->a = std::move(t);
  return ExtTerm(std::move(n));
}

ExtTerm ExtTerm::and_(ExtTerm l, ExtTerm r) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::and_;
  n->a = std::move(l);
  n->b = std::move(r);
  return ExtTerm(std::move(n));
}

ExtTerm ExtTerm::or_(ExtTerm l, ExtTerm r) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::or_;
  n->a = std::move(l);
  n->b = std::move(r);
  return ExtTerm(std::move(n));
}

ExtTerm::Kind ExtTerm::kind() const { return node_->kind; }

const HeapTerm& ExtTerm::heap_term() const {
  if (node_->kind != Kind::heap)
    throw std::logic_error("ExtTerm::heap_term on boolean node");
  return node_->h;
}

const ExtTerm& ExtTerm::left() const {
  if (node_->kind != Kind::and_ && node_->kind != Kind::or_)
    throw std::logic_error("ExtTerm::left on leaf node");
  return node_->a;
}

const ExtTerm& ExtTerm::right() const {
  if (node_->kind != Kind::and_ && node_->kind != Kind::or_)
    throw std::logic_error("ExtTerm::right on leaf node");
  return node_->b;
}

const ExtTerm& ExtTerm::child() const {
  if (node_->kind != Kind::not_)
    throw std::logic_error("ExtTerm::child on non-not node");
  return node_->a;
}

bool ExtTerm::operator==(const ExtTerm& o) const {
  if (node_ == o.node_) return true;
  if (node_->kind != o.node_->kind) return false;
  switch (node_->kind) {
    case Kind::heap:
      return node_->h == o.node_->h;
    case Kind::not_:
      return node_->a == o.node_->a;
    case Kind::and_:
    case Kind::or_:
      return node_->a == o.node_->a && node_->b == o.node_->b;
  }
  return false;
}

std::string ExtTerm::str() const {
  std::string out;
  print_ext(*this, 0, out);
  return out;
}

std::string print_term(const HeapTerm& t) { return t.str(); }
std::string print_term(const ExtTerm& t) { return t.str(); }

}  // namespace heaplog
