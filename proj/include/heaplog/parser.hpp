#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "heaplog/env.hpp"
#include "heaplog/term.hpp"

namespace heaplog {

// Parse failure with position info (1-based) and the token kinds that
// would have been accepted at that point.
struct SyntaxError : std::runtime_error {
  int line;
  int column;
  std::vector<std::string> expected;

  SyntaxError(int line, int column, const std::string& message,
              std::vector<std::string> expected = {});
};

// Parses one term. Accepts the full boolean layer (`!`, `&&`, `|`) over
// spatial terms (`|->`, `*`, `||`, `inv`, constants, records, predicate
// calls). `//` starts a line comment. Throws SyntaxError.
ExtTerm parse_term(const std::string& input);

// Parses a declaration file: `class C { f1, f2 }`, `obj a : C;`,
// `pred p(x) := clause \/ clause;`, `goal g := term;`. Predicate clause
// bodies must be spatial; a body of just `nil` reads as emp.
Workspace parse_workspace(const std::string& input);

}  // namespace heaplog
