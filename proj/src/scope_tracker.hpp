#pragma once

// Internal bookkeeping shared by the graph builder, the normalizer, and
// repetition detection: vertex naming, source claims, and a union-find
// over the vertices one ∘-scope touches.

#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "heaplog/graph.hpp"
#include "heaplog/term.hpp"

namespace heaplog::detail {

// How strongly a heaplet claims its source vertex. A plain cell claim, a
// per-field claim, and a whole-object (record) claim are mutually
// exclusive on one vertex; field claims must name distinct fields.
struct SourceState {
  bool plain = false;
  bool whole = false;
  std::unordered_set<std::string> fields;
  std::unordered_set<std::string> structural;  // prefix edges of deep paths
};

class ScopeTracker {
 public:
  // Registers one heaplet's claims and vertex touches. Returns the first
  // violated non-repetitiveness rule, if any; the tracker is then spent.
  std::optional<Unsat> add(const Heaplet& h);

  size_t added() const { return added_; }

  // True when all added heaplets sit in one weak component (or the scope
  // is empty).
  bool connected();

  // Groups the indices [0, added) of the added heaplets by weak
  // component, ordered by first heaplet index.
  std::vector<std::vector<size_t>> heaplet_components();

  // Shareable vertex names this scope touches (symbols, paths, nil), in
  // first-touch order.
  const std::vector<std::string>& names() const { return name_order_; }

 private:
  int node_of(const std::string& name);  // shared node by name
  int fresh_node();                      // literal / wildcard cell
  int find(int x);
  void unite(int a, int b);
  std::optional<Unsat> claim_plain(const std::string& v);
  std::optional<Unsat> claim_field(const std::string& v, const std::string& f,
                                   const std::string& at);
  std::optional<Unsat> claim_whole(const std::string& v);
  std::optional<Unsat> claim_structural(const std::string& v,
                                        const std::string& f,
                                        const std::string& at);
  // Node for a value occurrence (fresh for lit/wildcard, shared otherwise).
  int value_node(const Value& v);

  std::unordered_map<std::string, int> node_ids_;
  std::vector<std::string> name_order_;
  std::unordered_map<std::string, SourceState> sources_;
  std::unordered_set<std::string> seen_heaplets_;  // printed form
  std::vector<int> parent_;
  std::vector<int> first_node_;  // first node touched by heaplet i
  size_t added_ = 0;
};

// The chain of vertex names a location materializes: chain[0]=root,
// chain[i]=root.f1...fi, up to and including the parent of the final
// field. The final edge leaves chain.back().
std::vector<std::string> location_chain(const Location& loc);

}  // namespace heaplog::detail
