#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "heaplog/env.hpp"
#include "heaplog/term.hpp"

namespace heaplog {

struct VertexId {
  uint32_t value = 0;
  friend bool operator==(VertexId, VertexId) = default;
  friend auto operator<=>(VertexId, VertexId) = default;
};

// Vertices are identified by printed name: a symbol or location path used
// twice names the same vertex, while literals and `_` wildcards mint a
// fresh cell per occurrence and nil is one shared sink. Kinds are derived
// from the final edge set: slotted sources are objects, zero-in-degree
// scalar sources are stack roots, everything else is a cell.
struct Vertex {
  enum class Kind { stack_root, cell, object };

  VertexId id;
  Kind kind = Kind::cell;
  std::string name;   // shareable name; empty for fresh lit/wildcard cells
  std::string label;  // display text: name, digits, "_", or "nil"
  std::string cls;    // object class when a typing is known, else ""
  std::vector<std::string> slots;  // object slot order (class or observed)
};

// One directed edge; `slot` is empty for plain points-to edges. Edges
// marked `implied` only materialize the prefix chain of a deep field path
// (o --f1--> o.f1 for `o.f1.f2 |-> v`) and do not correspond to an
// asserted heaplet.
struct Edge {
  VertexId src;
  std::string slot;
  VertexId dst;
  bool implied = false;
  friend bool operator==(const Edge&, const Edge&) = default;
};

// Why a composition is contradictory. `witness` prints the offending
// location, heaplet, or shared vertex.
struct Unsat {
  enum class Reason {
    duplicate_heaplet,  // the same heaplet twice in one ∘-scope
    duplicate_source,   // one source location specified twice in one ∘-scope
    not_connectible,    // ∘-operands with no shared vertex
    interference,       // ‖-operands sharing a vertex or a path
    false_constant,     // `false` / false(obj) present
  };
  Reason reason;
  std::string witness;

  std::string str() const;
};

// build_graph needs declarations it was not given: a partial constant or
// predicate call is still present.
struct NeedsEnv {
  std::string what;
};

struct UnknownVertexError : std::runtime_error {
  explicit UnknownVertexError(const std::string& name)
      : std::runtime_error("unknown vertex: " + name) {}
};

struct MalformedMidpointGraphError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class HeapGraph {
 public:
  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  // The asserted heaplets this graph was built from (records split per
  // field), in build order.
  const std::vector<Heaplet>& heaplets() const { return heaplets_; }
  // Zero-in-degree vertices, in id order.
  std::vector<VertexId> roots() const;
  // Vertices unreachable from every root, in id order.
  std::vector<VertexId> garbage() const;
  std::vector<std::string> warnings() const;  // garbage reported as text

  bool empty() const { return vertices_.empty(); }
  const Vertex& vertex(VertexId id) const { return vertices_[id.value]; }
  const Vertex* find(const std::string& name) const;
  // Names of shareable vertices (symbols, paths, nil), sorted.
  std::vector<std::string> shared_names() const;

  // Printed-name comparison: same edge multiset and same vertex labels,
  // independent of id assignment order.
  bool same_shape(const HeapGraph& other) const;

 private:
  friend class GraphBuilder;
  friend HeapGraph from_vertex_centric(const struct MidpointGraph&);
  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  std::vector<Heaplet> heaplets_;
};

using BuildResult = std::variant<HeapGraph, Unsat, NeedsEnv>;

// Evaluates a ground spatial term to its heap graph. ∘-scopes are
// flattened and judged as a whole (duplicate heaplet / duplicate source /
// connectivity); ‖-operands are placed side by side and must not share
// vertices; inverse heaps are cancelled first (an unmatched one throws
// UnmatchedInverseError). Terms still containing partial constants or
// predicate calls yield NeedsEnv — unfold them with an environment first.
BuildResult build_graph(const HeapTerm& t, const Env& env = {});

// Builds the graph of one flat heaplet list (one ∘-scope). With
// `require_connected`, a scope whose heaplets do not hang together is
// Unsat(not_connectible).
std::variant<HeapGraph, Unsat> build_heaplets(const std::vector<Heaplet>& hs,
                                              bool require_connected,
                                              const Env& env = {});

// Incremental Def.-6-style extension of a graph by one heaplet: accepted
// when the graph is empty or the heaplet touches an existing vertex, and
// non-repetitiveness holds.
std::variant<HeapGraph, Unsat> conjoin_heaplet(const HeapGraph& g,
                                               const Heaplet& h,
                                               const Env& env = {});

// A reachability endpoint: one vertex name or a set of them (existential
// reading on both sides).
struct VertexSel {
  std::vector<std::string> names;

  VertexSel() = default;
  VertexSel(const char* one) : names{one} {}            // NOLINT(implicit)
  VertexSel(std::string one) : names{std::move(one)} {} // NOLINT(implicit)
  VertexSel(std::initializer_list<std::string> ns) : names(ns) {}
};

// True when some vertex in `from` reaches some vertex in `to` along
// directed edges; every vertex reaches itself by the empty path.
// Throws UnknownVertexError for names absent from the graph.
bool reaches(const HeapGraph& g, const VertexSel& from, const VertexSel& to);

// Weakly-connected components, each sorted by id, ordered by least member.
std::vector<std::vector<VertexId>> connected_components(const HeapGraph& g);

// True when removing `e` increases the number of weak components.
bool is_bridge(const HeapGraph& g, const Edge& e);

// --- Midpoint (vertex-centric) duality --------------------------------------

// The dual encoding replaces every edge by a midpoint node carrying the
// slot label, linked src -> midpoint -> dst. Links themselves are
// unlabeled.
struct MidNode {
  enum class Kind { vertex, midpoint };
  Kind kind = Kind::vertex;
  Vertex vertex;     // kind == vertex: the original vertex
  std::string slot;  // kind == midpoint: the slot label ("" = plain)
  bool implied = false;
};

struct MidpointGraph {
  std::vector<MidNode> nodes;
  std::vector<std::pair<uint32_t, uint32_t>> links;
};

MidpointGraph to_vertex_centric(const HeapGraph& g);
// Inverse of to_vertex_centric. Throws MalformedMidpointGraphError when a
// midpoint does not have exactly one incoming and one outgoing link or a
// link bypasses midpoints.
HeapGraph from_vertex_centric(const MidpointGraph& m);

// --- Subheap order -----------------------------------------------------------

// True when every asserted edge of g1 occurs in g2 under the same source
// name, slot, and target content. The relation is a partial order whose
// join, where defined, is ∘.
bool subheap(const HeapGraph& g1, const HeapGraph& g2);

// --- Back to terms and DOT ---------------------------------------------------

// Canonical term of a graph: per weak component the ∘-join of its asserted
// heaplets sorted by printed location (value as tie break), components
// ‖-joined, ordered by their first heaplet. The empty graph prints emp.
HeapTerm graph_to_term(const HeapGraph& g);

// Deterministic Graphviz rendering: stack roots plain, cells boxed,
// objects record-shaped, slot names as edge labels, garbage grayed.
std::string to_dot(const HeapGraph& g, const std::string& title = "heap");

}  // namespace heaplog
