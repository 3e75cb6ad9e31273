#include "wrec/dsl.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

namespace wrec::dsl {

ParseError::ParseError(int line, int column, Kind kind, std::string message)
    : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      kind_(kind),
      message_(std::move(message)) {}

const char* to_string(ParseError::Kind kind) {
  switch (kind) {
    case ParseError::Kind::kSyntax: return "syntax";
    case ParseError::Kind::kReference: return "reference";
    case ParseError::Kind::kDomainViolation: return "domain-violation";
  }
  return "?";
}

namespace {

using Kind = ParseError::Kind;

enum class Tok { kIdent, kInt, kPunct, kEnd };

struct Token {
  Tok type = Tok::kEnd;
  std::string text;
  int column = 0;
};

struct Line {
  int number = 0;
  std::vector<Token> tokens;
};

bool is_ident_start(char ch) { return std::isalpha(static_cast<unsigned char>(ch)) != 0; }
bool is_ident_char(char ch) { return std::isalnum(static_cast<unsigned char>(ch)) != 0 || ch == '_'; }
bool is_digit(char ch) { return ch >= '0' && ch <= '9'; }

std::vector<Token> tokenize(std::string_view s, int line_no) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char ch = s[i];
    const int col = static_cast<int>(i) + 1;
    if (ch == ' ' || ch == '\t' || ch == '\r') {
      ++i;
    } else if (is_ident_start(ch)) {
      std::size_t j = i;
      while (j < s.size() && is_ident_char(s[j])) ++j;
      out.push_back({Tok::kIdent, std::string(s.substr(i, j - i)), col});
      i = j;
    } else if (is_digit(ch) || (ch == '-' && i + 1 < s.size() && is_digit(s[i + 1]))) {
      std::size_t j = i + 1;
      while (j < s.size() && is_digit(s[j])) ++j;
      out.push_back({Tok::kInt, std::string(s.substr(i, j - i)), col});
      i = j;
    } else {
      static constexpr std::string_view kTwo[] = {"..", "->", "!=", "<=", ">="};
      std::string_view two = s.substr(i, 2);
      bool matched = false;
      for (auto t : kTwo) {
        if (two == t) {
          out.push_back({Tok::kPunct, std::string(t), col});
          i += 2;
          matched = true;
          break;
        }
      }
      if (matched) continue;
      static constexpr std::string_view kOne = "?[],:;{}&=<>|";
      if (kOne.find(ch) == std::string_view::npos) {
        std::string shown = std::isprint(static_cast<unsigned char>(ch)) ? std::string(1, ch) : "\\x" + [&] {
          static const char* hex = "0123456789abcdef";
          const auto u = static_cast<unsigned char>(ch);
          return std::string{hex[u >> 4], hex[u & 15]};
        }();
        throw ParseError(line_no, col, Kind::kSyntax, "unexpected character '" + shown + "'");
      }
      out.push_back({Tok::kPunct, std::string(1, ch), col});
      ++i;
    }
  }
  out.push_back({Tok::kEnd, "", static_cast<int>(s.size()) + 1});
  return out;
}

// Cursor over one line's tokens.
class Cursor {
 public:
  explicit Cursor(const Line& line) : line_(line) {}

  const Token& peek(std::size_t ahead = 0) const {
    const auto idx = std::min(pos_ + ahead, line_.tokens.size() - 1);
    return line_.tokens[idx];
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < line_.tokens.size() - 1) ++pos_;
    return t;
  }
  bool at_punct(std::string_view p) const { return peek().type == Tok::kPunct && peek().text == p; }
  bool accept(std::string_view p) {
    if (!at_punct(p)) return false;
    next();
    return true;
  }
  const Token& expect(std::string_view p) {
    if (!at_punct(p)) error(peek(), "expected '" + std::string(p) + "'");
    return next();
  }
  const Token& expect_ident(const char* what) {
    if (peek().type != Tok::kIdent) error(peek(), std::string("expected ") + what);
    return next();
  }
  const Token& expect_value() {
    if (peek().type != Tok::kIdent && peek().type != Tok::kInt) error(peek(), "expected a value");
    return next();
  }
  void expect_end() {
    if (peek().type != Tok::kEnd) error(peek(), "unexpected '" + peek().text + "'");
  }
  [[noreturn]] void error(const Token& at, const std::string& msg, Kind kind = Kind::kSyntax) const {
    throw ParseError(line_.number, at.column, kind, msg);
  }
  int line() const { return line_.number; }

 private:
  const Line& line_;
  std::size_t pos_ = 0;
};

Value to_value(const Cursor& cur, const Token& t) {
  if (t.type == Tok::kInt) {
    Value v = Value::from_token(t.text);
    if (!v.is_int()) cur.error(t, "integer out of range");
    return v;
  }
  return Value(t.text);
}

struct SectionLines {
  int header_line = 0;
  std::vector<Line> lines;
};

class Parser {
 public:
  KnowledgeBase run(std::string_view text) {
    split_sections(text);
    if (auto it = sections_.find("&QUESTIONS"); it != sections_.end()) parse_questions(it->second);
    if (auto it = sections_.find("&PRODUCTS"); it != sections_.end()) parse_products(it->second);
    if (kb_.products.empty()) {
      const int line = sections_.count("&PRODUCTS") ? sections_["&PRODUCTS"].header_line : 1;
      throw ParseError(line, 1, Kind::kReference, "no products declared");
    }
    if (auto it = sections_.find("&CONSTRAINTS"); it != sections_.end()) parse_constraints(it->second);
    if (auto it = sections_.find("&TEST"); it != sections_.end()) parse_tests(it->second);
    try {
      kb_.validate();
    } catch (const ModelError& e) {
      throw ParseError(1, 1, Kind::kReference, e.what());
    }
    return std::move(kb_);
  }

 private:
  void split_sections(std::string_view text) {
    static const std::set<std::string> kTags = {"&QUESTIONS", "&PRODUCTS", "&CONSTRAINTS", "&TEST"};
    SectionLines* current = nullptr;
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      std::string_view raw = text.substr(start, end - start);
      ++line_no;
      start = end + 1;

      if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
      std::size_t first = raw.find_first_not_of(" \t\r");
      if (first == std::string_view::npos) {
        if (end == text.size()) break;
        continue;
      }
      std::size_t last = raw.find_last_not_of(" \t\r");
      std::string_view trimmed = raw.substr(first, last - first + 1);
      if (trimmed.front() == '&') {
        const std::string tag(trimmed);
        if (!kTags.count(tag)) {
          throw ParseError(line_no, static_cast<int>(first) + 1, Kind::kSyntax, "unknown section tag " + tag);
        }
        if (sections_.count(tag)) {
          throw ParseError(line_no, static_cast<int>(first) + 1, Kind::kSyntax, "duplicate section " + tag);
        }
        current = &sections_[tag];
        current->header_line = line_no;
      } else {
        if (current == nullptr) {
          throw ParseError(line_no, static_cast<int>(first) + 1, Kind::kSyntax, "content before the first section tag");
        }
        current->lines.push_back({line_no, tokenize(raw, line_no)});
      }
      if (end == text.size()) break;
    }
    if (sections_.empty()) throw ParseError(1, 1, Kind::kSyntax, "no sections found");
  }

  void declare_name(const Cursor& cur, const Token& t) {
    if (!names_.insert(t.text).second) cur.error(t, "duplicate variable " + t.text, Kind::kReference);
  }

  void parse_questions(const SectionLines& section) {
    for (const auto& line : section.lines) {
      Cursor cur(line);
      const Token& name = cur.expect_ident("a variable name");
      if (name.text.size() > 2 && name.text.ends_with("_p")) {
        cur.error(name, "user variable names must not end in _p");
      }
      cur.expect("?");
      UserVariable uv;
      uv.name = name.text;
      uv.domain = parse_domain(cur);
      if (cur.peek().type == Tok::kIdent && cur.peek().text == "keep") {
        cur.next();
        uv.keep = true;
      }
      cur.expect_end();
      declare_name(cur, name);
      kb_.user_vars.push_back(std::move(uv));
    }
  }

  Domain parse_domain(Cursor& cur) {
    const Token& open = cur.expect("[");
    if (cur.peek().type == Tok::kInt && cur.peek(1).type == Tok::kPunct && cur.peek(1).text == "..") {
      const Token& lo_tok = cur.next();
      cur.next();
      if (cur.peek().type != Tok::kInt) cur.error(cur.peek(), "expected an integer bound");
      const Token& hi_tok = cur.next();
      cur.expect("]");
      const Value lo = to_value(cur, lo_tok);
      const Value hi = to_value(cur, hi_tok);
      if (lo.as_int() > hi.as_int()) cur.error(lo_tok, "empty range", Kind::kDomainViolation);
      return Domain::range(lo.as_int(), hi.as_int());
    }
    std::vector<Value> values;
    std::set<Value> seen;
    do {
      const Token& t = cur.expect_value();
      Value v = to_value(cur, t);
      if (!seen.insert(v).second) cur.error(t, "duplicate domain value " + t.text, Kind::kDomainViolation);
      values.push_back(std::move(v));
    } while (cur.accept(","));
    cur.expect("]");
    if (values.empty()) cur.error(open, "empty domain", Kind::kDomainViolation);
    return Domain::enumerated(std::move(values));
  }

  void parse_products(const SectionLines& section) {
    if (section.lines.empty()) return;
    {
      Cursor cur(section.lines.front());
      do {
        const Token& t = cur.expect_ident("a product property name");
        if (!(t.text.size() > 2 && t.text.ends_with("_p"))) {
          cur.error(t, "product property names must end in _p");
        }
        declare_name(cur, t);
        kb_.product_props.push_back({t.text, Domain::enumerated({})});
      } while (cur.accept(","));
      cur.expect_end();
    }
    std::set<std::string> product_names;
    for (std::size_t i = 1; i < section.lines.size(); ++i) {
      Cursor cur(section.lines[i]);
      const Token& name = cur.expect_ident("a product name");
      if (!product_names.insert(name.text).second) {
        cur.error(name, "duplicate product " + name.text, Kind::kReference);
      }
      cur.expect(":");
      Product p;
      p.name = name.text;
      do {
        const Token& t = cur.expect_value();
        if (p.values.size() == kb_.product_props.size()) {
          cur.error(t, "more values than product properties", Kind::kReference);
        }
        p.values.push_back(to_value(cur, t));
      } while (cur.accept(";"));
      const Token& end = cur.peek();
      cur.expect_end();
      if (p.values.size() != kb_.product_props.size()) {
        cur.error(end, "missing product-property value for " + kb_.product_props[p.values.size()].name,
                  Kind::kReference);
      }
      for (std::size_t k = 0; k < p.values.size(); ++k) {
        auto& dom = kb_.product_props[k].domain.values;
        if (std::find(dom.begin(), dom.end(), p.values[k]) == dom.end()) dom.push_back(p.values[k]);
      }
      kb_.products.push_back(std::move(p));
    }
  }

  Atom parse_atom(Cursor& cur) {
    const Token& var = cur.expect_ident("a user variable");
    const auto* uv = kb_.find_user_var(var.text);
    if (uv == nullptr) cur.error(var, "undeclared user variable " + var.text, Kind::kReference);
    cur.expect("=");
    const Token& val = cur.expect_value();
    Value v = to_value(cur, val);
    if (!uv->domain.contains(v)) {
      cur.error(val, "value " + val.text + " outside domain of " + var.text, Kind::kDomainViolation);
    }
    return {var.text, std::move(v)};
  }

  std::vector<Atom> parse_atoms(Cursor& cur) {
    std::vector<Atom> atoms;
    std::set<std::string> vars;
    do {
      const Token& at = cur.peek();
      atoms.push_back(parse_atom(cur));
      if (!vars.insert(atoms.back().var).second) cur.error(at, "variable " + at.text + " assigned twice");
    } while (cur.accept("&"));
    return atoms;
  }

  struct TypedOperand {
    Operand operand;
    const Token* token;
  };

  TypedOperand parse_operand(Cursor& cur) {
    const Token& t = cur.expect_value();
    if (t.type == Tok::kInt) return {Operand::constant(to_value(cur, t)), &t};
    if (kb_.find_user_var(t.text) != nullptr) return {Operand::user_var(t.text), &t};
    if (kb_.find_product_prop(t.text) != nullptr) return {Operand::product_prop(t.text), &t};
    if (t.text.size() > 2 && t.text.ends_with("_p")) {
      cur.error(t, "undeclared product property " + t.text, Kind::kReference);
    }
    return {Operand::constant(Value(t.text)), &t};
  }

  std::optional<Cmp> parse_cmp(Cursor& cur) {
    static const std::map<std::string, Cmp> kOps = {{"=", Cmp::kEq},  {"!=", Cmp::kNe}, {"<=", Cmp::kLe},
                                                    {">=", Cmp::kGe}, {"<", Cmp::kLt},  {">", Cmp::kGt}};
    if (cur.peek().type != Tok::kPunct) return std::nullopt;
    auto it = kOps.find(cur.peek().text);
    if (it == kOps.end()) return std::nullopt;
    cur.next();
    return it->second;
  }

  const Domain* operand_domain(const Operand& o) const {
    if (o.kind == Operand::Kind::kUserVar) return &kb_.find_user_var(o.name)->domain;
    if (o.kind == Operand::Kind::kProductProp) return &kb_.find_product_prop(o.name)->domain;
    return nullptr;
  }

  bool integral(const Operand& o) const {
    if (o.kind == Operand::Kind::kLiteral) return o.literal.is_int();
    return operand_domain(o)->is_integral();
  }

  Relation parse_relation(Cursor& cur) {
    TypedOperand lhs = parse_operand(cur);
    const Token& op_tok = cur.peek();
    auto op = parse_cmp(cur);
    if (!op) cur.error(op_tok, "expected a comparison operator");
    TypedOperand rhs = parse_operand(cur);
    cur.expect_end();

    if (lhs.operand.kind == Operand::Kind::kLiteral && rhs.operand.kind == Operand::Kind::kLiteral) {
      cur.error(*lhs.token, "relation references no declared variable", Kind::kReference);
    }
    if (*op != Cmp::kEq && *op != Cmp::kNe) {
      for (const TypedOperand* o : {&lhs, &rhs}) {
        if (!integral(o->operand)) {
          cur.error(*o->token, "'" + o->token->text + "' is not integer-valued", Kind::kDomainViolation);
        }
      }
    } else {
      for (auto [var, lit] : {std::pair{&lhs, &rhs}, std::pair{&rhs, &lhs}}) {
        if (var->operand.kind != Operand::Kind::kUserVar || lit->operand.kind != Operand::Kind::kLiteral) continue;
        const Domain* d = operand_domain(var->operand);
        if (!lit->operand.literal.is_int() && !d->contains(lit->operand.literal)) {
          cur.error(*lit->token, "value " + lit->token->text + " outside domain of " + var->operand.name,
                    Kind::kDomainViolation);
        }
      }
    }
    return {std::move(lhs.operand), *op, std::move(rhs.operand)};
  }

  void parse_constraints(const SectionLines& section) {
    int rank = 0;
    for (const auto& line : section.lines) {
      Cursor cur(line);
      ConstraintExpr c;
      c.definition_rank = ++rank;
      c.id = constraint_id(rank);
      if (cur.peek().type == Tok::kIdent && cur.peek().text == "incompatible" && cur.peek(1).text == "{" &&
          cur.peek(1).type == Tok::kPunct) {
        cur.next();
        cur.next();
        Incompatibility inc{parse_atoms(cur)};
        cur.expect("}");
        cur.expect_end();
        c.body = std::move(inc);
        kb_.comp.push_back(std::move(c));
        continue;
      }
      Filter f;
      if (has_arrow(line)) {
        f.guard = parse_atoms(cur);
        cur.expect("->");
      }
      f.relation = parse_relation(cur);
      c.body = std::move(f);
      kb_.filt.push_back(std::move(c));
    }
  }

  static bool has_arrow(const Line& line) {
    for (const auto& t : line.tokens) {
      if (t.type == Tok::kPunct && t.text == "->") return true;
    }
    return false;
  }

  void parse_tests(const SectionLines& section) {
    std::set<std::string> names;
    for (const auto& line : section.lines) {
      Cursor cur(line);
      const Token& kw = cur.expect_ident("'test'");
      if (kw.text != "test") cur.error(kw, "expected 'test'");
      const Token& name = cur.expect_ident("a test name");
      if (!names.insert(name.text).second) cur.error(name, "duplicate test " + name.text, Kind::kReference);
      cur.expect(":");
      TestCase t;
      t.name = name.text;
      t.atoms = parse_atoms(cur);
      if (cur.accept("|")) {
        const Token& flag = cur.expect_ident("'show'");
        if (flag.text != "show") cur.error(flag, "expected 'show'");
        cur.expect("|");
        t.show = true;
      }
      cur.expect_end();
      kb_.tests.push_back(std::move(t));
    }
  }

  std::map<std::string, SectionLines> sections_;
  std::set<std::string> names_;
  KnowledgeBase kb_;
};

void write_value_list(std::ostream& os, const std::vector<Value>& values, const char* sep) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) os << sep;
    os << values[i];
  }
}

}  // namespace

KnowledgeBase parse(std::string_view text) { return Parser().run(text); }

std::string serialize(const KnowledgeBase& kb) {
  std::ostringstream os;
  if (!kb.user_vars.empty()) {
    os << "&QUESTIONS\n";
    for (const auto& uv : kb.user_vars) {
      os << uv.name << "? [";
      if (uv.domain.kind == Domain::Kind::kRange) {
        os << uv.domain.lo << ".." << uv.domain.hi;
      } else {
        write_value_list(os, uv.domain.values, ", ");
      }
      os << "]";
      if (uv.keep) os << " keep";
      os << '\n';
    }
    os << '\n';
  }

  os << "&PRODUCTS\n";
  for (std::size_t i = 0; i < kb.product_props.size(); ++i) {
    if (i > 0) os << ", ";
    os << kb.product_props[i].name;
  }
  os << '\n';
  for (const auto& p : kb.products) {
    os << p.name << ": ";
    write_value_list(os, p.values, "; ");
    os << '\n';
  }

  const auto constraints = kb.constraints();
  if (!constraints.empty()) {
    os << "\n&CONSTRAINTS\n";
    for (const auto* c : constraints) os << to_text(*c) << '\n';
  }

  if (!kb.tests.empty()) {
    os << "\n&TEST\n";
    for (const auto& t : kb.tests) {
      os << "test " << t.name << ": ";
      for (std::size_t i = 0; i < t.atoms.size(); ++i) {
        if (i > 0) os << " & ";
        os << t.atoms[i].var << " = " << t.atoms[i].value;
      }
      if (t.show) os << " |show|";
      os << '\n';
    }
  }
  return os.str();
}

}  // namespace wrec::dsl
