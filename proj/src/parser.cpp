#include "heaplog/parser.hpp"

#include <cctype>
#include <sstream>

namespace heaplog {

namespace {

enum class Tok {
  ident,
  integer,
  kw_emp,
  kw_true,
  kw_false,
  kw_nil,
  kw_inv,
  kw_exists,
  kw_class,
  kw_obj,
  kw_pred,
  kw_goal,
  arrow,      // |->
  star,       // *
  dbar,       // ||
  bar,        // |
  amp2,       // &&
  bang,       // !
  lparen,
  rparen,
  lbrace,
  rbrace,
  colon,
  assign,     // :=
  semi,
  comma,
  dot,
  clause_or,  // \/
  end,
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::ident: return "identifier";
    case Tok::integer: return "integer";
    case Tok::kw_emp: return "'emp'";
    case Tok::kw_true: return "'true'";
    case Tok::kw_false: return "'false'";
    case Tok::kw_nil: return "'nil'";
    case Tok::kw_inv: return "'inv'";
    case Tok::kw_exists: return "'exists'";
    case Tok::kw_class: return "'class'";
    case Tok::kw_obj: return "'obj'";
    case Tok::kw_pred: return "'pred'";
    case Tok::kw_goal: return "'goal'";
    case Tok::arrow: return "'|->'";
    case Tok::star: return "'*'";
    case Tok::dbar: return "'||'";
    case Tok::bar: return "'|'";
    case Tok::amp2: return "'&&'";
    case Tok::bang: return "'!'";
    case Tok::lparen: return "'('";
    case Tok::rparen: return "')'";
    case Tok::lbrace: return "'{'";
    case Tok::rbrace: return "'}'";
    case Tok::colon: return "':'";
    case Tok::assign: return "':='";
    case Tok::semi: return "';'";
    case Tok::comma: return "','";
    case Tok::dot: return "'.'";
    case Tok::clause_or: return "'\\/'";
    case Tok::end: return "end of input";
  }
  return "?";
}

struct Token {
  Tok kind;
  std::string text;
  long long num = 0;
  int line = 1;
  int col = 1;
};

bool ident_start(char c) { return std::isalpha((unsigned char)c) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum((unsigned char)c) || c == '_' || c == '\'';
}

std::vector<Token> lex(const std::string& in) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto bump = [&](size_t n) {
    for (size_t k = 0; k < n; ++k) {
      if (i < in.size() && in[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  auto push = [&](Tok k, std::string text, int l, int c) {
    out.push_back(Token{k, std::move(text), 0, l, c});
  };
  while (i < in.size()) {
    char c = in[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      bump(1);
      continue;
    }
    if (c == '/' && i + 1 < in.size() && in[i + 1] == '/') {
      while (i < in.size() && in[i] != '\n') bump(1);
      continue;
    }
    int l = line, co = col;
    if (ident_start(c)) {
      size_t j = i;
      while (j < in.size() && ident_char(in[j])) ++j;
      std::string w = in.substr(i, j - i);
      bump(j - i);
      Tok k = Tok::ident;
      if (w == "emp") k = Tok::kw_emp;
      else if (w == "true") k = Tok::kw_true;
      else if (w == "false") k = Tok::kw_false;
      else if (w == "nil") k = Tok::kw_nil;
      else if (w == "inv") k = Tok::kw_inv;
      else if (w == "exists") k = Tok::kw_exists;
      else if (w == "class") k = Tok::kw_class;
      else if (w == "obj") k = Tok::kw_obj;
      else if (w == "pred") k = Tok::kw_pred;
      else if (w == "goal") k = Tok::kw_goal;
      push(k, std::move(w), l, co);
      continue;
    }
    if (std::isdigit((unsigned char)c) ||
        (c == '-' && i + 1 < in.size() && std::isdigit((unsigned char)in[i + 1]))) {
      size_t j = i + 1;
      while (j < in.size() && std::isdigit((unsigned char)in[j])) ++j;
      std::string w = in.substr(i, j - i);
      bump(j - i);
      Token t{Tok::integer, w, 0, l, co};
      try {
        t.num = std::stoll(w);
      } catch (const std::exception&) {
        throw SyntaxError(l, co, "integer literal out of range: " + w);
      }
      out.push_back(std::move(t));
      continue;
    }
    auto two = [&](char a, char b) {
      return c == a && i + 1 < in.size() && in[i + 1] == b;
    };
    if (c == '|') {
      if (i + 2 < in.size() && in[i + 1] == '-' && in[i + 2] == '>') {
        push(Tok::arrow, "|->", l, co);
        bump(3);
      } else if (two('|', '|')) {
        push(Tok::dbar, "||", l, co);
        bump(2);
      } else {
        push(Tok::bar, "|", l, co);
        bump(1);
      }
      continue;
    }
    if (two('&', '&')) {
      push(Tok::amp2, "&&", l, co);
      bump(2);
      continue;
    }
    if (two(':', '=')) {
      push(Tok::assign, ":=", l, co);
      bump(2);
      continue;
    }
    if (two('\\', '/')) {
      push(Tok::clause_or, "\\/", l, co);
      bump(2);
      continue;
    }
    switch (c) {
      case '*': push(Tok::star, "*", l, co); bump(1); continue;
      case '!': push(Tok::bang, "!", l, co); bump(1); continue;
      case '(': push(Tok::lparen, "(", l, co); bump(1); continue;
      case ')': push(Tok::rparen, ")", l, co); bump(1); continue;
      case '{': push(Tok::lbrace, "{", l, co); bump(1); continue;
      case '}': push(Tok::rbrace, "}", l, co); bump(1); continue;
      case ':': push(Tok::colon, ":", l, co); bump(1); continue;
      case ';': push(Tok::semi, ";", l, co); bump(1); continue;
      case ',': push(Tok::comma, ",", l, co); bump(1); continue;
      case '.': push(Tok::dot, ".", l, co); bump(1); continue;
      default:
        throw SyntaxError(l, co, std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back(Token{Tok::end, "", 0, line, col});
  return out;
}

class Parser {
 public:
  explicit Parser(const std::string& input) : toks_(lex(input)) {}

  ExtTerm parse_whole_term() {
    ExtTerm t = parse_or();
    reject_trailing();
    return t;
  }

  Workspace parse_file() {
    Workspace ws;
    while (!at(Tok::end)) parse_stmt(ws);
    return ws;
  }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;

  const Token& cur() const { return toks_[pos_]; }
  bool at(Tok k) const { return cur().kind == k; }
  Token take() { return toks_[pos_++]; }

  [[noreturn]] void fail(const std::string& msg,
                         std::vector<std::string> expected = {}) const {
    throw SyntaxError(cur().line, cur().col, msg, std::move(expected));
  }

  Token expect(Tok k, const char* where) {
    if (!at(k)) {
      fail(std::string("expected ") + tok_name(k) + " " + where + ", found " +
               tok_name(cur().kind),
           {tok_name(k)});
    }
    return take();
  }

  void reject_trailing() {
    if (at(Tok::end)) return;
    if (at(Tok::comma)) {
      fail(
          "unexpected ','; record values need parentheses and field names, "
          "e.g. x |-> (f1: a, f2: b)",
          {"end of input"});
    }
    fail("unexpected trailing input after term", {"end of input"});
  }

  // -- terms ---------------------------------------------------------------

  ExtTerm parse_or() {
    ExtTerm t = parse_and();
    while (at(Tok::bar)) {
      take();
      t = ExtTerm::or_(std::move(t), parse_and());
    }
    return t;
  }

  ExtTerm parse_and() {
    ExtTerm t = parse_not();
    while (at(Tok::amp2)) {
      take();
      t = ExtTerm::and_(std::move(t), parse_not());
    }
    return t;
  }

  ExtTerm parse_not() {
    if (at(Tok::bang)) {
      take();
      return ExtTerm::not_(parse_not());
    }
    return parse_spatial_disj();
  }

  // Requires `t` to be a spatial operand for `op`; unwraps it.
  HeapTerm spatial_operand(const ExtTerm& t, const Token& op) const {
    if (t.kind() != ExtTerm::Kind::heap) {
      throw SyntaxError(op.line, op.col,
                        std::string("boolean term cannot be an operand of ") +
                            tok_name(op.kind));
    }
    return t.heap_term();
  }

  ExtTerm parse_spatial_disj() {
    ExtTerm t = parse_spatial_conj();
    while (at(Tok::dbar)) {
      Token op = take();
      HeapTerm l = spatial_operand(t, op);
      HeapTerm r = spatial_operand(parse_spatial_conj(), op);
      t = ExtTerm::heap(HeapTerm::disj(std::move(l), std::move(r)));
    }
    return t;
  }

  ExtTerm parse_spatial_conj() {
    ExtTerm t = parse_atom();
    while (at(Tok::star)) {
      Token op = take();
      HeapTerm l = spatial_operand(t, op);
      HeapTerm r = spatial_operand(parse_atom(), op);
      t = ExtTerm::heap(HeapTerm::conj(std::move(l), std::move(r)));
    }
    return t;
  }

  ExtTerm parse_atom() {
    switch (cur().kind) {
      case Tok::lparen: {
        take();
        ExtTerm t = parse_or();
        expect(Tok::rparen, "to close '('");
        return t;
      }
      case Tok::kw_emp:
      case Tok::kw_true:
      case Tok::kw_false: {
        Token kw = take();
        if (at(Tok::lparen)) {
          take();
          Token obj = expect(Tok::ident, "as the partial constant's object");
          expect(Tok::rparen, "after the object name");
          HeapTerm t = kw.kind == Tok::kw_emp
                           ? HeapTerm::emp_partial(obj.text)
                           : kw.kind == Tok::kw_true
                                 ? HeapTerm::true_partial(obj.text)
                                 : HeapTerm::false_partial(obj.text);
          return ExtTerm::heap(std::move(t));
        }
        HeapTerm t = kw.kind == Tok::kw_emp
                         ? HeapTerm::emp()
                         : kw.kind == Tok::kw_true ? HeapTerm::true_total()
                                                   : HeapTerm::false_total();
        return ExtTerm::heap(std::move(t));
      }
      case Tok::kw_inv: {
        Token kw = take();
        expect(Tok::lparen, "after 'inv'");
        ExtTerm inner = parse_spatial_disj();
        expect(Tok::rparen, "to close 'inv('");
        return ExtTerm::heap(HeapTerm::inv(spatial_operand(inner, kw)));
      }
      case Tok::kw_exists:
        fail(
            "quantifiers are only allowed as 'exists x, y:' prefixes of "
            "predicate clause bodies, not inside goal terms");
      case Tok::ident: {
        Token head = take();
        if (at(Tok::lparen)) return parse_pred_call(head);
        Location loc = parse_location_rest(head.text);
        if (at(Tok::arrow)) {
          take();
          Value v = parse_value();
          return ExtTerm::heap(HeapTerm::points_to(std::move(loc), std::move(v)));
        }
        // Bare location: a field holding some unnamed value.
        return ExtTerm::heap(HeapTerm::points_to(std::move(loc), Value::of_any()));
      }
      default:
        fail("expected a heap term",
             {"identifier", "'emp'", "'true'", "'false'", "'inv'", "'('", "'!'"});
    }
  }

  Location parse_location_rest(std::string root) {
    Location loc(std::move(root));
    while (at(Tok::dot)) {
      take();
      Token f = expect(Tok::ident, "as a field name after '.'");
      loc.path.push_back(f.text);
    }
    return loc;
  }

  Value parse_value(bool inside_record = false) {
    switch (cur().kind) {
      case Tok::integer:
        return Value::of_lit(take().num);
      case Tok::kw_nil:
        take();
        return Value::of_nil();
      case Tok::ident: {
        Token head = take();
        if (head.text == "_" && !at(Tok::dot)) return Value::of_any();
        Location loc = parse_location_rest(head.text);
        return Value::of_sym(loc.str());
      }
      case Tok::lparen: {
        if (inside_record) {
          fail(
              "nested record values are not supported; model inner objects "
              "as separate objects referenced by name");
        }
        take();
        std::vector<std::pair<std::string, Value>> fields;
        for (;;) {
          Token f = expect(Tok::ident, "as a record field name");
          for (const auto& [name, v] : fields) {
            if (name == f.text)
              throw SyntaxError(f.line, f.col,
                                "duplicate record field: " + f.text);
          }
          expect(Tok::colon, "after the record field name");
          Value v = parse_value(/*inside_record=*/true);
          fields.emplace_back(f.text, std::move(v));
          if (at(Tok::comma)) {
            take();
            continue;
          }
          break;
        }
        expect(Tok::rparen, "to close the record");
        return Value::of_record(std::move(fields));
      }
      default:
        fail("expected a value",
             {"integer", "identifier", "'nil'", "'_'", "'('"});
    }
  }

  ExtTerm parse_pred_call(const Token& name) {
    expect(Tok::lparen, "after the predicate name");
    PredCall call;
    call.name = name.text;
    if (!at(Tok::rparen)) {
      for (;;) {
        call.args.push_back(parse_pred_arg());
        if (at(Tok::comma)) {
          take();
          continue;
        }
        break;
      }
    }
    expect(Tok::rparen, "to close the argument list");
    return ExtTerm::heap(HeapTerm::pred(std::move(call)));
  }

  PredArg parse_pred_arg() {
    // Simple args read directly; anything else re-parses as a term.
    size_t save = pos_;
    switch (cur().kind) {
      case Tok::integer:
        return PredArg::of_value(Value::of_lit(take().num));
      case Tok::kw_nil:
        take();
        return PredArg::of_value(Value::of_nil());
      case Tok::ident: {
        Token head = take();
        if (!at(Tok::lparen)) {
          Location loc = parse_location_rest(head.text);
          if (at(Tok::comma) || at(Tok::rparen)) {
            if (head.text == "_" && loc.path.empty())
              return PredArg::of_value(Value::of_any());
            return PredArg::of_location(std::move(loc));
          }
        }
        pos_ = save;
        break;
      }
      default:
        break;
    }
    ExtTerm t = parse_or();
    if (t.kind() != ExtTerm::Kind::heap)
      fail("boolean terms cannot be predicate arguments");
    return PredArg::of_term(t.heap_term());
  }

  // -- declaration files ----------------------------------------------------

  void parse_stmt(Workspace& ws) {
    switch (cur().kind) {
      case Tok::kw_class: return parse_class(ws);
      case Tok::kw_obj: return parse_obj(ws);
      case Tok::kw_pred: return parse_pred_def(ws);
      case Tok::kw_goal: return parse_goal(ws);
      default:
        fail("expected a declaration",
             {"'class'", "'obj'", "'pred'", "'goal'"});
    }
  }

  void parse_class(Workspace& ws) {
    Token kw = take();
    Token name = expect(Tok::ident, "as the class name");
    expect(Tok::lbrace, "before the field list");
    ClassDecl decl;
    decl.name = name.text;
    for (;;) {
      Token f = expect(Tok::ident, "as a field name");
      decl.fields.push_back(f.text);
      if (at(Tok::comma)) {
        take();
        continue;
      }
      break;
    }
    expect(Tok::rbrace, "to close the field list");
    if (at(Tok::semi)) take();
    try {
      ws.env.add_class(std::move(decl));
    } catch (const EnvError& e) {
      throw SyntaxError(kw.line, kw.col, e.what());
    }
  }

  void parse_obj(Workspace& ws) {
    Token kw = take();
    Token name = expect(Tok::ident, "as the object name");
    expect(Tok::colon, "between object and class");
    Token cls = expect(Tok::ident, "as the class name");
    expect(Tok::semi, "after the typing");
    try {
      ws.env.add_typing(name.text, cls.text);
    } catch (const EnvError& e) {
      throw SyntaxError(kw.line, kw.col, e.what());
    }
  }

  void parse_pred_def(Workspace& ws) {
    Token kw = take();
    Token name = expect(Tok::ident, "as the predicate name");
    expect(Tok::lparen, "before the parameter list");
    PredicateDef def;
    def.name = name.text;
    if (!at(Tok::rparen)) {
      for (;;) {
        Token p = expect(Tok::ident, "as a parameter name");
        def.params.push_back(p.text);
        if (at(Tok::comma)) {
          take();
          continue;
        }
        break;
      }
    }
    expect(Tok::rparen, "to close the parameter list");
    expect(Tok::assign, "before the clause list");
    for (;;) {
      def.clauses.push_back(parse_clause());
      if (at(Tok::clause_or)) {
        take();
        continue;
      }
      break;
    }
    expect(Tok::semi, "after the predicate definition");
    try {
      ws.env.add_predicate(std::move(def));
    } catch (const EnvError& e) {
      throw SyntaxError(kw.line, kw.col, e.what());
    }
  }

  PredClause parse_clause() {
    PredClause clause;
    if (at(Tok::kw_exists)) {
      take();
      for (;;) {
        Token v = expect(Tok::ident, "as an existential name");
        clause.existentials.push_back(v.text);
        if (at(Tok::comma)) {
          take();
          continue;
        }
        break;
      }
      expect(Tok::colon, "after the existential list");
    }
    // A clause of just `nil` names the empty structure.
    if (at(Tok::kw_nil) && (toks_[pos_ + 1].kind == Tok::clause_or ||
                            toks_[pos_ + 1].kind == Tok::semi)) {
      take();
      clause.body = HeapTerm::emp();
      return clause;
    }
    Token here = cur();
    ExtTerm body = parse_or();
    if (body.kind() != ExtTerm::Kind::heap) {
      throw SyntaxError(here.line, here.col,
                        "predicate clause bodies must be spatial terms");
    }
    clause.body = body.heap_term();
    return clause;
  }

  void parse_goal(Workspace& ws) {
    take();
    Token name = expect(Tok::ident, "as the goal name");
    for (const auto& g : ws.goals) {
      if (g.name == name.text)
        throw SyntaxError(name.line, name.col,
                          "goal " + name.text + " is defined twice");
    }
    expect(Tok::assign, "before the goal term");
    ExtTerm t = parse_or();
    if (at(Tok::comma)) {
      fail(
          "unexpected ','; record values need parentheses and field names, "
          "e.g. x |-> (f1: a, f2: b)",
          {"';'"});
    }
    expect(Tok::semi, "after the goal term");
    ws.goals.push_back(Goal{name.text, std::move(t)});
  }
};

std::string format_message(int line, int col, const std::string& msg,
                           const std::vector<std::string>& expected) {
  std::ostringstream os;
  os << line << ':' << col << ": " << msg;
  if (!expected.empty()) {
    os << " (expected ";
    for (size_t i = 0; i < expected.size(); ++i) {
      if (i) os << ", ";
      os << expected[i];
    }
    os << ')';
  }
  return os.str();
}

}  // namespace

SyntaxError::SyntaxError(int line_, int column_, const std::string& message,
                         std::vector<std::string> expected_)
    : std::runtime_error(format_message(line_, column_, message, expected_)),
      line(line_),
      column(column_),
      expected(std::move(expected_)) {}

ExtTerm parse_term(const std::string& input) {
  return Parser(input).parse_whole_term();
}

Workspace parse_workspace(const std::string& input) {
  return Parser(input).parse_file();
}

}  // namespace heaplog
