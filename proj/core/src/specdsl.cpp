#include "dtc/specdsl.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace dtc::specdsl {

namespace {

std::string join(const std::vector<std::string>& items, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

// -------------------------------------------------------------------------
// Lexer
// -------------------------------------------------------------------------
enum class Tok {
  Ident,
  Nat,
  LParen,
  RParen,
  LBracket,
  RBracket,
  Comma,
  Colon,
  ColonEq,
  Dot,
  ImpliesOp,
  AndOp,
  LeqOp,
  LtOp,
  End,
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Nat: return "natural literal";
    case Tok::LParen: return "(";
    case Tok::RParen: return ")";
    case Tok::LBracket: return "[";
    case Tok::RBracket: return "]";
    case Tok::Comma: return ",";
    case Tok::Colon: return ":";
    case Tok::ColonEq: return ":=";
    case Tok::Dot: return ".";
    case Tok::ImpliesOp: return "==>";
    case Tok::AndOp: return "&&";
    case Tok::LeqOp: return "<=";
    case Tok::LtOp: return "<";
    case Tok::End: return "end of input";
  }
  return "?";
}

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::uint64_t nat = 0;
  SourcePos pos;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t = next_token();
      const bool end = t.kind == Tok::End;
      out.push_back(std::move(t));
      if (end) break;
    }
    return out;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        col_ = 1;
        ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\r') {
        ++col_;
        ++pos_;
      } else {
        break;
      }
    }
  }

  [[noreturn]] void fail(const std::string& found, std::vector<std::string> expected) {
    throw ParseError(SourcePos{line_, col_}, std::move(expected), found);
  }

  Token next_token() {
    Token t;
    t.pos = SourcePos{line_, col_};
    if (pos_ >= text_.size()) {
      t.kind = Tok::End;
      return t;
    }
    const char c = text_[pos_];
    auto advance = [&](std::size_t n) {
      pos_ += n;
      col_ += n;
    };

    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size()) {
        char d = text_[pos_];
        if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '\'') {
          ++pos_;
          ++col_;
        } else {
          break;
        }
      }
      t.kind = Tok::Ident;
      t.text = std::string(text_.substr(start, pos_ - start));
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::uint64_t value = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        value = value * 10 + static_cast<std::uint64_t>(text_[pos_] - '0');
        ++pos_;
        ++col_;
      }
      t.kind = Tok::Nat;
      t.nat = value;
      return t;
    }
    switch (c) {
      case '(': advance(1); t.kind = Tok::LParen; return t;
      case ')': advance(1); t.kind = Tok::RParen; return t;
      case '[': advance(1); t.kind = Tok::LBracket; return t;
      case ']': advance(1); t.kind = Tok::RBracket; return t;
      case ',': advance(1); t.kind = Tok::Comma; return t;
      case '.': advance(1); t.kind = Tok::Dot; return t;
      case ':':
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') {
          advance(2);
          t.kind = Tok::ColonEq;
        } else {
          advance(1);
          t.kind = Tok::Colon;
        }
        return t;
      case '=':
        if (text_.substr(pos_, 3) == "==>") {
          advance(3);
          t.kind = Tok::ImpliesOp;
          return t;
        }
        fail(std::string(text_.substr(pos_, 1)), {"==>"});
      case '&':
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '&') {
          advance(2);
          t.kind = Tok::AndOp;
          return t;
        }
        fail("&", {"&&"});
      case '<':
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') {
          advance(2);
          t.kind = Tok::LeqOp;
        } else {
          advance(1);
          t.kind = Tok::LtOp;
        }
        return t;
      default:
        fail(std::string(1, c), {"a token"});
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

// -------------------------------------------------------------------------
// Parser
// -------------------------------------------------------------------------
ExprPtr make_expr(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  SpecProgram parse_program() {
    SpecProgram p;
    while (peek().kind != Tok::End) {
      p.definitions.push_back(parse_definition());
    }
    if (p.definitions.empty()) {
      fail(peek(), {"Definition"});
    }
    return p;
  }

  ExprPtr parse_single_expression() {
    ExprPtr e = parse_expr();
    expect(Tok::End);
    return e;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[i];
  }

  Token take() { return tokens_[std::min(pos_++, tokens_.size() - 1)]; }

  [[noreturn]] void fail(const Token& at, std::vector<std::string> expected) {
    const std::string found =
        at.kind == Tok::Ident ? "'" + at.text + "'" : tok_name(at.kind);
    throw ParseError(at.pos, std::move(expected), found);
  }

  Token expect(Tok kind) {
    if (peek().kind != kind) fail(peek(), {tok_name(kind)});
    return take();
  }

  std::string expect_ident() {
    if (peek().kind != Tok::Ident) fail(peek(), {tok_name(Tok::Ident)});
    return take().text;
  }

  bool at_keyword(const char* kw) const {
    return peek().kind == Tok::Ident && peek().text == kw;
  }

  Definition parse_definition() {
    if (!at_keyword("Definition")) fail(peek(), {"Definition"});
    const SourcePos pos = peek().pos;
    take();
    Definition d{.name = expect_ident(),
                 .param = "",
                 .param_type = SpecType::boolean(),
                 .return_type = SpecType::boolean(),
                 .body = nullptr,
                 .pos = pos};
    expect(Tok::LParen);
    d.param = expect_ident();
    expect(Tok::Colon);
    d.param_type = parse_type();
    expect(Tok::RParen);
    expect(Tok::Colon);
    d.return_type = parse_type();
    expect(Tok::ColonEq);
    d.body = parse_expr();
    expect(Tok::Dot);
    return d;
  }

  SpecType parse_type() {
    if (peek().kind == Tok::LParen) {
      take();
      SpecType t = parse_type();
      expect(Tok::RParen);
      return t;
    }
    if (peek().kind != Tok::Ident) fail(peek(), {"bool", "nat", "time", "list", "("});
    const Token tok = take();
    if (tok.text == "bool") return SpecType::boolean();
    if (tok.text == "nat") return SpecType::nat();
    if (tok.text == "time") return SpecType::time();
    if (tok.text == "list") return SpecType::list(parse_type());
    throw ParseError(tok.pos, {"bool", "nat", "time", "list"}, "'" + tok.text + "'");
  }

  ExprPtr parse_expr() { return parse_implies(); }

  // ==> is right-associative and binds loosest.
  ExprPtr parse_implies() {
    ExprPtr lhs = parse_and();
    if (peek().kind == Tok::ImpliesOp) {
      const SourcePos pos = take().pos;
      ExprPtr rhs = parse_implies();
      return make_expr(Expr{Implies{lhs, rhs}, pos});
    }
    return lhs;
  }

  ExprPtr parse_and() {
    ExprPtr lhs = parse_cmp();
    while (peek().kind == Tok::AndOp) {
      const SourcePos pos = take().pos;
      ExprPtr rhs = parse_cmp();
      lhs = make_expr(Expr{And{lhs, rhs}, pos});
    }
    return lhs;
  }

  // <= and < are non-associative single comparisons.
  ExprPtr parse_cmp() {
    ExprPtr lhs = parse_app();
    if (peek().kind == Tok::LeqOp || peek().kind == Tok::LtOp) {
      const Token op = take();
      ExprPtr rhs = parse_app();
      if (op.kind == Tok::LeqOp) return make_expr(Expr{Leq{lhs, rhs}, op.pos});
      return make_expr(Expr{Lt{lhs, rhs}, op.pos});
    }
    return lhs;
  }

  bool starts_atom() const {
    switch (peek().kind) {
      case Tok::Nat:
      case Tok::LParen:
      case Tok::LBracket:
        return true;
      case Tok::Ident:
        return peek().text != "Definition";
      default:
        return false;
    }
  }

  // Application binds tightest and associates left.
  ExprPtr parse_app() {
    ExprPtr e = parse_atom();
    while (starts_atom()) {
      const SourcePos pos = peek().pos;
      ExprPtr arg = parse_atom();
      e = make_expr(Expr{App{e, arg}, pos});
    }
    return e;
  }

  ExprPtr parse_atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Ident: {
        if (t.text == "Definition") fail(t, {"an expression"});
        Token tok = take();
        return make_expr(Expr{Var{std::move(tok.text)}, tok.pos});
      }
      case Tok::Nat: {
        Token tok = take();
        return make_expr(Expr{NatLit{tok.nat}, tok.pos});
      }
      case Tok::LParen: {
        take();
        ExprPtr e = parse_expr();
        expect(Tok::RParen);
        return e;
      }
      case Tok::LBracket: {
        const SourcePos pos = take().pos;
        ListLit lit;
        if (peek().kind != Tok::RBracket) {
          lit.elems.push_back(parse_expr());
          while (peek().kind == Tok::Comma) {
            take();
            lit.elems.push_back(parse_expr());
          }
        }
        expect(Tok::RBracket);
        return make_expr(Expr{std::move(lit), pos});
      }
      default:
        fail(t, {"identifier", "natural literal", "(", "["});
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

// -------------------------------------------------------------------------
// Builtin environment
// -------------------------------------------------------------------------
struct BuiltinSig {
  BuiltinId id;
  SpecType type;
  std::size_t arity;
};

const std::map<std::string, BuiltinSig, std::less<>>& builtins() {
  static const std::map<std::string, BuiltinSig, std::less<>> table = [] {
    const SpecType time = SpecType::time();
    const SpecType pred = SpecType::arrow(time, SpecType::boolean());
    const SpecType times = SpecType::list(time);
    std::map<std::string, BuiltinSig, std::less<>> m;
    m.emplace("all", BuiltinSig{BuiltinId::All,
                                SpecType::arrow(pred, SpecType::arrow(times, SpecType::boolean())),
                                2});
    m.emplace("count", BuiltinSig{BuiltinId::Count,
                                  SpecType::arrow(pred, SpecType::arrow(times, SpecType::nat())),
                                  2});
    m.emplace("is_leq_10",
              BuiltinSig{BuiltinId::IsLeqExtended, SpecType::arrow(time, SpecType::boolean()), 1});
    m.emplace("is_gt_9",
              BuiltinSig{BuiltinId::IsGtDaily, SpecType::arrow(time, SpecType::boolean()), 1});
    m.emplace("is_weeklyDP",
              BuiltinSig{BuiltinId::IsWeeklyDp, SpecType::arrow(times, SpecType::boolean()), 1});
    return m;
  }();
  return table;
}

std::size_t builtin_arity(BuiltinId id) {
  return (id == BuiltinId::All || id == BuiltinId::Count) ? 2 : 1;
}

// -------------------------------------------------------------------------
// Type checking
// -------------------------------------------------------------------------
class Checker {
 public:
  explicit Checker(const SpecProgram& p) : program_(p) {}

  void run() {
    for (const Definition& d : program_.definitions) {
      if (builtins().count(d.name) || env_.count(d.name)) {
        throw TypeError(d.pos, "a fresh name", "'" + d.name + "'",
                        "redefinition of '" + d.name + "'");
      }
      param_name_ = d.param;
      param_type_ = d.param_type;
      const SpecType body_type = infer(*d.body);
      if (body_type != d.return_type) {
        throw TypeError(d.body->pos, d.return_type.str(), body_type.str(),
                        "body of '" + d.name + "' does not match its declared return type");
      }
      env_.emplace(d.name, SpecType::arrow(d.param_type, d.return_type));
    }
  }

 private:
  SpecType infer(const Expr& e) {
    return std::visit(
        [&](const auto& node) -> SpecType {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, Var>) {
            if (node.name == param_name_) return param_type_;
            if (auto it = builtins().find(node.name); it != builtins().end()) {
              return it->second.type;
            }
            if (auto it = env_.find(node.name); it != env_.end()) return it->second;
            throw TypeError(e.pos, "a bound identifier", "'" + node.name + "'",
                            "unbound identifier '" + node.name + "'");
          } else if constexpr (std::is_same_v<T, App>) {
            const SpecType fn = infer(*node.fn);
            if (fn.kind() != SpecType::Kind::Arrow) {
              throw TypeError(node.fn->pos, "a function", fn.str(),
                              "only functions can be applied");
            }
            const SpecType arg = infer(*node.arg);
            if (arg != fn.from()) {
              throw TypeError(node.arg->pos, fn.from().str(), arg.str(),
                              "argument type mismatch");
            }
            return fn.to();
          } else if constexpr (std::is_same_v<T, Implies> || std::is_same_v<T, And>) {
            const char* op = std::is_same_v<T, Implies> ? "==>" : "&&";
            for (const ExprPtr& side : {node.lhs, node.rhs}) {
              const SpecType t = infer(*side);
              if (t != SpecType::boolean()) {
                throw TypeError(side->pos, "bool", t.str(),
                                std::string("operands of ") + op + " must be bool");
              }
            }
            return SpecType::boolean();
          } else if constexpr (std::is_same_v<T, Leq> || std::is_same_v<T, Lt>) {
            const SpecType lhs = infer(*node.lhs);
            const SpecType rhs = infer(*node.rhs);
            if (lhs != rhs) {
              throw TypeError(node.rhs->pos, lhs.str(), rhs.str(),
                              "comparison across distinct types");
            }
            if (lhs != SpecType::nat() && lhs != SpecType::time()) {
              throw TypeError(node.lhs->pos, "nat or time", lhs.str(),
                              "comparison needs an ordered type");
            }
            return SpecType::boolean();
          } else if constexpr (std::is_same_v<T, NatLit>) {
            return SpecType::nat();
          } else {  // ListLit
            if (node.elems.empty()) return SpecType::list(SpecType::time());
            const SpecType head = infer(*node.elems.front());
            for (std::size_t i = 1; i < node.elems.size(); ++i) {
              const SpecType t = infer(*node.elems[i]);
              if (t != head) {
                throw TypeError(node.elems[i]->pos, head.str(), t.str(),
                                "list elements must share one type");
              }
            }
            return SpecType::list(head);
          }
        },
        e.node);
  }

  const SpecProgram& program_;
  std::map<std::string, SpecType, std::less<>> env_;
  std::string param_name_;
  SpecType param_type_ = SpecType::boolean();
};

// -------------------------------------------------------------------------
// Evaluation
// -------------------------------------------------------------------------
class Interp {
 public:
  Interp(const SpecProgram& program, const article6::Article6Params& params,
         const article6::WeeklyDrivingPattern* context)
      : program_(program), params_(params), context_(context) {}

  Value eval_definition(const Definition& d, const Value& arg) {
    return eval(*d.body, d.param, arg);
  }

 private:
  Value eval(const Expr& e, const std::string& param, const Value& arg) {
    return std::visit(
        [&](const auto& node) -> Value {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, Var>) {
            return resolve(node.name, param, arg);
          } else if constexpr (std::is_same_v<T, App>) {
            Value fn = eval(*node.fn, param, arg);
            Value a = eval(*node.arg, param, arg);
            return apply(std::move(fn), std::move(a));
          } else if constexpr (std::is_same_v<T, Implies>) {
            const bool l = eval(*node.lhs, param, arg).as_bool();
            const bool r = eval(*node.rhs, param, arg).as_bool();
            return Value(!l || r);
          } else if constexpr (std::is_same_v<T, And>) {
            const bool l = eval(*node.lhs, param, arg).as_bool();
            const bool r = eval(*node.rhs, param, arg).as_bool();
            return Value(l && r);
          } else if constexpr (std::is_same_v<T, Leq> || std::is_same_v<T, Lt>) {
            const Value l = eval(*node.lhs, param, arg);
            const Value r = eval(*node.rhs, param, arg);
            return Value(compare(l, r, std::is_same_v<T, Leq>));
          } else if constexpr (std::is_same_v<T, NatLit>) {
            return Value(node.value);
          } else {  // ListLit
            std::vector<Value> elems;
            elems.reserve(node.elems.size());
            for (const ExprPtr& el : node.elems) elems.push_back(eval(*el, param, arg));
            return Value(std::move(elems));
          }
        },
        e.node);
  }

  static bool compare(const Value& l, const Value& r, bool or_equal) {
    if (l.is_nat() && r.is_nat()) {
      return or_equal ? l.as_nat() <= r.as_nat() : l.as_nat() < r.as_nat();
    }
    if (l.is_time() && r.is_time()) {
      return or_equal ? l.as_time().minutes <= r.as_time().minutes
                      : l.as_time().minutes < r.as_time().minutes;
    }
    throw Error("EvalInvariant", "comparison on non-ordered runtime values");
  }

  Value resolve(const std::string& name, const std::string& param, const Value& arg) {
    if (name == param) return arg;
    if (auto it = builtins().find(name); it != builtins().end()) {
      return Value(BuiltinClosure{it->second.id, {}});
    }
    for (std::size_t i = 0; i < program_.definitions.size(); ++i) {
      if (program_.definitions[i].name == name) return Value(UserFn{i});
    }
    throw Error("EvalInvariant", "unbound identifier '" + name + "' at runtime");
  }

  Value apply(Value fn, Value arg) {
    if (std::holds_alternative<UserFn>(fn.raw())) {
      const Definition& d = program_.definitions[std::get<UserFn>(fn.raw()).def_index];
      return eval_definition(d, arg);
    }
    if (!std::holds_alternative<BuiltinClosure>(fn.raw())) {
      throw Error("EvalInvariant", "application of a non-function value");
    }
    BuiltinClosure c = std::get<BuiltinClosure>(fn.raw());
    c.args.push_back(std::move(arg));
    if (c.args.size() < builtin_arity(c.id)) return Value(std::move(c));
    return run_builtin(std::move(c));
  }

  Value run_builtin(BuiltinClosure c) {
    switch (c.id) {
      case BuiltinId::All: {
        const auto& xs = c.args[1].as_list();
        for (const Value& x : xs) {
          if (!apply(c.args[0], x).as_bool()) return Value(false);
        }
        return Value(true);
      }
      case BuiltinId::Count: {
        const auto& xs = c.args[1].as_list();
        std::uint64_t n = 0;
        for (const Value& x : xs) {
          if (apply(c.args[0], x).as_bool()) ++n;
        }
        return Value(n);
      }
      case BuiltinId::IsLeqExtended:
        return Value(c.args[0].as_time().minutes <= params_.extended_limit.minutes());
      case BuiltinId::IsGtDaily:
        return Value(c.args[0].as_time().minutes > params_.daily_limit.minutes());
      case BuiltinId::IsWeeklyDp: {
        const auto& xs = c.args[0].as_list();
        if (context_ && matches_context(xs)) {
          return Value(article6::is_weekly_dp(*context_, params_));
        }
        // Bare list with no attribution context: the format check reduces to
        // the length cap.
        return Value(xs.size() <= static_cast<std::size_t>(params_.weekly_dp_max_len));
      }
    }
    throw Error("EvalInvariant", "unknown builtin");
  }

  bool matches_context(const std::vector<Value>& xs) const {
    if (xs.size() != context_->daily_driving.size()) return false;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!xs[i].is_time()) return false;
      if (xs[i].as_time().minutes != context_->daily_driving[i].minutes()) return false;
    }
    return true;
  }

  const SpecProgram& program_;
  const article6::Article6Params& params_;
  const article6::WeeklyDrivingPattern* context_;
};

bool value_matches_type(const Value& v, const SpecType& t) {
  switch (t.kind()) {
    case SpecType::Kind::Bool: return v.is_bool();
    case SpecType::Kind::Nat: return v.is_nat();
    case SpecType::Kind::Time: return v.is_time();
    case SpecType::Kind::List:
      if (!v.is_list()) return false;
      return std::all_of(v.as_list().begin(), v.as_list().end(),
                         [&](const Value& e) { return value_matches_type(e, t.elem()); });
    case SpecType::Kind::Arrow: return v.is_fn();
  }
  return false;
}

}  // namespace

SpecType SpecType::list(SpecType elem) {
  SpecType t(Kind::List);
  t.left_ = std::make_shared<const SpecType>(std::move(elem));
  return t;
}

SpecType SpecType::arrow(SpecType from, SpecType to) {
  SpecType t(Kind::Arrow);
  t.left_ = std::make_shared<const SpecType>(std::move(from));
  t.right_ = std::make_shared<const SpecType>(std::move(to));
  return t;
}

bool SpecType::operator==(const SpecType& other) const {
  if (kind_ != other.kind_) return false;
  switch (kind_) {
    case Kind::List: return elem() == other.elem();
    case Kind::Arrow: return from() == other.from() && to() == other.to();
    default: return true;
  }
}

std::string SpecType::str() const {
  switch (kind_) {
    case Kind::Bool: return "bool";
    case Kind::Nat: return "nat";
    case Kind::Time: return "time";
    case Kind::List: return "(list " + elem().str() + ")";
    case Kind::Arrow: return "(" + from().str() + " -> " + to().str() + ")";
  }
  return "?";
}

const Definition* SpecProgram::find(std::string_view name) const {
  for (const Definition& d : definitions) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

ParseError::ParseError(SourcePos pos, std::vector<std::string> expected_tokens,
                       const std::string& found)
    : Error("ParseError", "line " + std::to_string(pos.line) + ", column " +
                              std::to_string(pos.column) + ": expected " +
                              join(expected_tokens, " or ") + ", found " + found),
      line(pos.line),
      column(pos.column),
      expected(std::move(expected_tokens)) {}

TypeError::TypeError(SourcePos pos, std::string expected_type, std::string found_type,
                     const std::string& detail)
    : Error("TypeError", "line " + std::to_string(pos.line) + ", column " +
                             std::to_string(pos.column) + ": " + detail + " (expected " +
                             expected_type + ", found " + found_type + ")"),
      line(pos.line),
      column(pos.column),
      expected(std::move(expected_type)),
      found(std::move(found_type)) {}

SpecProgram parse_spec(std::string_view text) {
  return Parser(Lexer(text).run()).parse_program();
}

SpecProgram load_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("FileNotFound", "cannot open spec file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str());
}

std::string print_expr(const Expr& e) {
  return std::visit(
      [](const auto& node) -> std::string {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Var>) {
          return node.name;
        } else if constexpr (std::is_same_v<T, App>) {
          return "(" + print_expr(*node.fn) + " " + print_expr(*node.arg) + ")";
        } else if constexpr (std::is_same_v<T, Implies>) {
          return "(" + print_expr(*node.lhs) + " ==> " + print_expr(*node.rhs) + ")";
        } else if constexpr (std::is_same_v<T, And>) {
          return "(" + print_expr(*node.lhs) + " && " + print_expr(*node.rhs) + ")";
        } else if constexpr (std::is_same_v<T, Leq>) {
          return "(" + print_expr(*node.lhs) + " <= " + print_expr(*node.rhs) + ")";
        } else if constexpr (std::is_same_v<T, Lt>) {
          return "(" + print_expr(*node.lhs) + " < " + print_expr(*node.rhs) + ")";
        } else if constexpr (std::is_same_v<T, NatLit>) {
          return std::to_string(node.value);
        } else {  // ListLit
          std::string out = "[";
          for (std::size_t i = 0; i < node.elems.size(); ++i) {
            if (i) out += ", ";
            out += print_expr(*node.elems[i]);
          }
          return out + "]";
        }
      },
      e.node);
}

std::string print_definition(const Definition& d) {
  return "Definition " + d.name + " (" + d.param + " : " + d.param_type.str() + ") : " +
         d.return_type.str() + " :=\n  " + print_expr(*d.body) + ".";
}

std::string print_program(const SpecProgram& p) {
  std::string out;
  for (std::size_t i = 0; i < p.definitions.size(); ++i) {
    if (i) out += "\n\n";
    out += print_definition(p.definitions[i]);
  }
  out += "\n";
  return out;
}

void typecheck(const SpecProgram& p) { Checker(p).run(); }

std::string Value::describe() const {
  if (is_bool()) return "bool";
  if (is_nat()) return "nat";
  if (is_time()) return "time";
  if (is_list()) {
    const auto& xs = as_list();
    if (xs.empty()) return "(list _)";
    return "(list " + xs.front().describe() + ")";
  }
  return "fn";
}

Evaluator::Evaluator(SpecProgram program, article6::Article6Params params)
    : program_(std::move(program)), params_(params) {
  params_.validate();
}

Value Evaluator::eval_with_context(const std::string& entry, const Value& arg,
                                   const article6::WeeklyDrivingPattern* context) const {
  const Definition* d = program_.find(entry);
  if (!d) throw UnknownEntry(entry);
  if (!value_matches_type(arg, d->param_type)) {
    throw ArgTypeMismatch(d->param_type.str(), arg.describe());
  }
  return Interp(program_, params_, context).eval_definition(*d, arg);
}

Value Evaluator::eval(const std::string& entry, const Value& arg) const {
  return eval_with_context(entry, arg, nullptr);
}

bool Evaluator::eval_pattern(const std::string& entry,
                             const article6::WeeklyDrivingPattern& w) const {
  std::vector<Value> xs;
  xs.reserve(w.daily_driving.size());
  for (timebase::DurationMin d : w.daily_driving) xs.push_back(Value(TimeV{d.minutes()}));
  const Value result = eval_with_context(entry, Value(std::move(xs)), &w);
  if (!result.is_bool()) {
    throw ArgTypeMismatch("bool result", result.describe());
  }
  return result.as_bool();
}

Value eval_spec(const SpecProgram& p, const std::string& entry, const Value& arg,
                const article6::Article6Params& params) {
  return Evaluator(p, params).eval(entry, arg);
}

DiffReport differential_check(const SpecProgram& p,
                              const std::vector<article6::WeeklyDrivingPattern>& samples,
                              const article6::Article6Params& params) {
  const Evaluator evaluator(p, params);
  if (!p.find("article6_1")) throw UnknownEntry("article6_1");

  DiffReport report;
  report.samples = samples.size();
  for (const article6::WeeklyDrivingPattern& w : samples) {
    const bool native = article6::check_article6_1(w, params);
    const bool spec = evaluator.eval_pattern("article6_1", w);
    if (native != spec) {
      report.disagreements.push_back(Disagreement{w, native, spec});
    }
  }
  return report;
}

}  // namespace dtc::specdsl
