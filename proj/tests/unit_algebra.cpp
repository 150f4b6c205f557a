#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <string>
#include <variant>
#include <vector>

#include "doctest.h"
#include "heaplog/algebra.hpp"
#include "heaplog/graph.hpp"
#include "heaplog/parser.hpp"
#include "heaplog/term.hpp"

using namespace heaplog;

namespace {

HeapTerm parse_heap(const std::string& s) {
  ExtTerm t = parse_term(s);
  REQUIRE(t.kind() == ExtTerm::Kind::heap);
  return t.heap_term();
}

std::string nf_str(const std::string& s) {
  return normalize(parse_heap(s)).to_term().str();
}

HeapGraph graph_of(const std::string& s) {
  BuildResult r = build_graph(parse_heap(s));
  REQUIRE(std::holds_alternative<HeapGraph>(r));
  return std::get<HeapGraph>(r);
}

}  // namespace

TEST_CASE("cancelling one cell can split a heap into '||' parts") {
  NormalForm nf =
      normalize(parse_heap("d |-> a * a |-> b * c |-> b * inv(a |-> b)"));
  CHECK(nf.satisfiable);
  REQUIRE(nf.disjuncts.size() == 2);
  CHECK(nf.to_term().str() == "c |-> b || d |-> a");
  CHECK(nf.dropped.empty());
}

TEST_CASE("unsatisfiable '||' operands are dropped with a diagnostic") {
  NormalForm nf = normalize(parse_heap("a |-> b * (c |-> d || b |-> c)"));
  CHECK(nf.satisfiable);
  CHECK(nf.to_term().str() == "a |-> b * b |-> c");
  REQUIRE(nf.dropped.size() == 1);
  CHECK(nf.dropped[0].find("c |-> d") != std::string::npos);
  CHECK(nf.dropped[0].find("dropped unsatisfiable '||' operand") !=
        std::string::npos);
}

TEST_CASE("terms with no surviving alternative are unsatisfiable") {
  NormalForm nf = normalize(parse_heap("a |-> b * a |-> d"));
  CHECK_FALSE(nf.satisfiable);
  CHECK(nf.disjuncts.empty());
  REQUIRE(nf.reason.has_value());
  CHECK(nf.reason->reason == Unsat::Reason::duplicate_source);
  CHECK(nf.to_term().str() == "false");
  // Diagnostics of dropped operands are cleared when nothing survives.
  CHECK(normalize(parse_heap("a |-> b * a |-> b || c |-> c * c |-> d"))
            .dropped.empty());
}

TEST_CASE("empty '||' operands dissolve when material ones exist") {
  CHECK(nf_str("emp || a |-> b") == "a |-> b");
  CHECK(nf_str("a |-> b || emp || emp") == "a |-> b");
  CHECK(nf_str("emp || emp") == "emp");
  CHECK(nf_str("emp") == "emp");
}

TEST_CASE("total true stays as an open scope") {
  CHECK(nf_str("true") == "true");
  CHECK(nf_str("a |-> b * true") == "a |-> b * true");
  NormalForm nf = normalize(parse_heap("a |-> b * true"));
  REQUIRE(nf.disjuncts.size() == 1);
  CHECK(nf.disjuncts[0].open);
}

TEST_CASE("normal forms sort disjuncts and heaplets deterministically") {
  CHECK(nf_str("c |-> d || a |-> b") == "a |-> b || c |-> d");
  CHECK(nf_str("b |-> c * a |-> b") == "a |-> b * b |-> c");
  CHECK(nf_str("z |-> w * x |-> z * y |-> x") ==
        "x |-> z * y |-> x * z |-> w");
}

TEST_CASE("equivalence ignores operand order and association") {
  CHECK(equiv(parse_heap("a |-> b * b |-> c"), parse_heap("b |-> c * a |-> b")));
  CHECK(equiv(parse_heap("a |-> b * (b |-> c * c |-> d)"),
              parse_heap("(a |-> b * b |-> c) * c |-> d")));
  CHECK(equiv(parse_heap("a |-> b * emp"), parse_heap("a |-> b")));
  CHECK_FALSE(equiv(parse_heap("x |-> z * y |-> z"), parse_heap("x |-> z")));
  // All contradictions are equivalent.
  CHECK(equiv(parse_heap("a |-> b * a |-> d"), parse_heap("false")));
  CHECK_FALSE(equiv(parse_heap("a |-> b * a |-> d"), parse_heap("emp")));
}

TEST_CASE("invert is an involution that distributes structurally") {
  CHECK(invert(parse_heap("a |-> b")).str() == "inv(a |-> b)");
  CHECK(invert(parse_heap("a |-> b * b |-> c")).str() ==
        "inv(a |-> b) * inv(b |-> c)");
  CHECK(invert(parse_heap("a |-> b || c |-> d")).str() ==
        "inv(a |-> b) || inv(c |-> d)");
  CHECK(invert(parse_heap("inv(a |-> b)")).str() == "a |-> b");
  for (const std::string& s :
       {std::string("a |-> b * (c |-> d || b |-> c)"), std::string("emp"),
        std::string("true"), std::string("x |-> nil * y |-> nil")}) {
    CAPTURE(s);
    HeapTerm t = parse_heap(s);
    CHECK(invert(invert(t)).str() == t.str());
  }
  CHECK(invert(parse_heap("emp")).str() == "emp");
  CHECK_THROWS_AS(invert(parse_heap("true(a)")), NeedsEnvError);
  CHECK_THROWS_AS(invert(parse_heap("tree(x)")), NeedsEnvError);
}

TEST_CASE("cancel rewrites away matched inverse cells") {
  CHECK(cancel(parse_heap("a |-> b * inv(a |-> b)")).str() == "emp");
  CHECK(cancel(parse_heap("d |-> a * a |-> b * c |-> b * inv(a |-> b)"))
            .str() == "c |-> b || d |-> a");
  CHECK(cancel(parse_heap("a |-> b")).str() == "a |-> b");
  CHECK_THROWS_AS(cancel(parse_heap("inv(a |-> b)")), UnmatchedInverseError);
  try {
    cancel(parse_heap("a |-> b * inv(c |-> d)"));
    FAIL("expected an unmatched-inverse error");
  } catch (const UnmatchedInverseError& e) {
    CHECK(std::string(e.what()) ==
          "unmatched inverse heaplet: inv(c |-> d)");
  }
}

TEST_CASE("cancel reports matched, missing and extra cells") {
  HeapTerm t = HeapTerm::conj(parse_heap("a |-> b * b |-> c"),
                              invert(parse_heap("b |-> c * c |-> d")));
  CancelReport r = cancel_with_report(t);
  REQUIRE(r.matched.size() == 1);
  CHECK(r.matched[0].str() == "b |-> c");
  REQUIRE(r.missing.size() == 1);
  CHECK(r.missing[0].str() == "c |-> d");
  REQUIRE(r.extra.size() == 1);
  CHECK(r.extra[0].str() == "a |-> b");
  CHECK(r.residue.str() == "a |-> b");

  CancelReport same = cancel_with_report(HeapTerm::conj(
      parse_heap("a |-> b"), invert(parse_heap("a |-> b"))));
  CHECK(same.missing.empty());
  CHECK(same.extra.empty());
  CHECK(same.residue.str() == "emp");
}

TEST_CASE("normalization hits unmatched inverses too") {
  CHECK_THROWS_AS(normalize(parse_heap("a |-> b * inv(c |-> d)")),
                  UnmatchedInverseError);
}

TEST_CASE("join and split rewrite between '*' and '||'") {
  HeapTerm u = parse_heap("a |-> b");
  Heaplet b{Location("b"), Value::of_sym("c")};
  Heaplet c{Location("c"), Value::of_sym("d")};
  CHECK(join_rule(u, b, c).str() == "a |-> b * b |-> c * c |-> d");
  CHECK(split_rule(u, b, c).str() == "a |-> b * b |-> c || c |-> d");
  CHECK(equiv(join_rule(u, b, c),
              HeapTerm::conj(split_rule(u, b, c).left(),
                             HeapTerm::points_to(c))));

  // B clashing with U's source:
  Heaplet clash{Location("a"), Value::of_sym("z")};
  CHECK_THROWS_AS(join_rule(u, clash, c), RuleInapplicableError);
  // C touching nothing:
  Heaplet apart{Location("p"), Value::of_sym("q")};
  CHECK_THROWS_AS(join_rule(u, b, apart), RuleInapplicableError);
  CHECK_THROWS_AS(split_rule(u, b, apart), RuleInapplicableError);
  try {
    join_rule(u, b, apart);
    FAIL("expected the rule to be inapplicable");
  } catch (const RuleInapplicableError& e) {
    CHECK(std::string(e.what()).find("cannot be connected") !=
          std::string::npos);
  }
}

TEST_CASE("repetition detection flags duplicates only") {
  auto dup = detect_repetition(parse_heap("a |-> b * a |-> b"));
  REQUIRE(dup.has_value());
  CHECK(dup->reason == Unsat::Reason::duplicate_heaplet);
  auto src = detect_repetition(parse_heap("a |-> b * a |-> d"));
  REQUIRE(src.has_value());
  CHECK(src->reason == Unsat::Reason::duplicate_source);
  // Disconnection is not a repetition.
  CHECK_FALSE(detect_repetition(parse_heap("a |-> b * c |-> d")).has_value());
  // Inverse occurrences do not count against the positive cell.
  CHECK_FALSE(
      detect_repetition(parse_heap("a |-> b * inv(a |-> b)")).has_value());
  // Each '||' operand is its own scope.
  CHECK_FALSE(
      detect_repetition(parse_heap("a |-> b || a |-> b")).has_value());
}

TEST_CASE("graph-level conjoin requires contact, disjoin forbids it") {
  auto joined = conjoin(graph_of("a |-> b"), graph_of("b |-> c"));
  REQUIRE(std::holds_alternative<HeapGraph>(joined));
  CHECK(std::get<HeapGraph>(joined).vertices().size() == 3);

  auto apart = conjoin(graph_of("a |-> b"), graph_of("p |-> q"));
  REQUIRE(std::holds_alternative<Unsat>(apart));
  CHECK(std::get<Unsat>(apart).reason == Unsat::Reason::not_connectible);

  auto split = disjoin(graph_of("a |-> b"), graph_of("c |-> d"));
  REQUIRE(std::holds_alternative<HeapGraph>(split));
  CHECK(connected_components(std::get<HeapGraph>(split)).size() == 2);

  auto touching = disjoin(graph_of("a |-> b"), graph_of("b |-> c"));
  REQUIRE(std::holds_alternative<Unsat>(touching));
  CHECK(std::get<Unsat>(touching).reason == Unsat::Reason::interference);
  CHECK(std::get<Unsat>(touching).witness == "shared vertex b");

  // The empty graph is the identity on both sides.
  HeapGraph none = graph_of("emp");
  auto idl = conjoin(none, graph_of("a |-> b"));
  REQUIRE(std::holds_alternative<HeapGraph>(idl));
  CHECK(std::get<HeapGraph>(idl).same_shape(graph_of("a |-> b")));
  auto idr = disjoin(graph_of("a |-> b"), none);
  REQUIRE(std::holds_alternative<HeapGraph>(idr));
  CHECK(std::get<HeapGraph>(idr).same_shape(graph_of("a |-> b")));
}

TEST_CASE("normalizing twice changes nothing") {
  for (const std::string& s :
       {std::string("d |-> a * a |-> b * c |-> b * inv(a |-> b)"),
        std::string("a |-> b * (c |-> d || b |-> c)"), std::string("emp"),
        std::string("true"), std::string("a |-> b * true"),
        std::string("a |-> b * a |-> d"),
        std::string("x |-> nil * y |-> nil")}) {
    CAPTURE(s);
    NormalForm once = normalize(parse_heap(s));
    NormalForm twice = normalize(once.to_term());
    CHECK(once == twice);
    CHECK(once.to_term().str() == twice.to_term().str());
  }
}

TEST_CASE("interference between surviving '||' alternatives") {
  // Identical alternatives cannot be separated.
  NormalForm same = normalize(parse_heap("a |-> b || a |-> b"));
  CHECK_FALSE(same.satisfiable);
  REQUIRE(same.reason.has_value());
  CHECK(same.reason->reason == Unsat::Reason::interference);
  CHECK(same.reason->witness.find("identical operands") == 0);

  // Alternatives meeting at a vertex interfere even via a shared prefix.
  NormalForm touch = normalize(parse_heap("a |-> b * (b |-> c || b |-> d)"));
  CHECK_FALSE(touch.satisfiable);
  REQUIRE(touch.reason.has_value());
  CHECK(touch.reason->reason == Unsat::Reason::interference);
  CHECK(touch.reason->witness == "shared vertex b");
}
