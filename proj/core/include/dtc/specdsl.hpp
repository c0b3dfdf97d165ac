#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dtc/article6.hpp"
#include "dtc/error.hpp"

namespace dtc::specdsl {

// ---------------------------------------------------------------------------
// Types. The fragment is monomorphic: bool, nat, time, lists, and the arrow
// types needed for the builtin environment. No recursion, no polymorphism.
// ---------------------------------------------------------------------------
class SpecType {
 public:
  enum class Kind { Bool, Nat, Time, List, Arrow };

  static SpecType boolean() { return SpecType(Kind::Bool); }
  static SpecType nat() { return SpecType(Kind::Nat); }
  static SpecType time() { return SpecType(Kind::Time); }
  static SpecType list(SpecType elem);
  static SpecType arrow(SpecType from, SpecType to);

  Kind kind() const noexcept { return kind_; }
  const SpecType& elem() const { return *left_; }   // List
  const SpecType& from() const { return *left_; }   // Arrow
  const SpecType& to() const { return *right_; }    // Arrow

  bool operator==(const SpecType& other) const;
  bool operator!=(const SpecType& other) const { return !(*this == other); }

  std::string str() const;  // "bool", "(list time)", "(time -> bool)"

 private:
  explicit SpecType(Kind k) : kind_(k) {}
  Kind kind_;
  std::shared_ptr<const SpecType> left_;
  std::shared_ptr<const SpecType> right_;
};

// ---------------------------------------------------------------------------
// Expressions.
// ---------------------------------------------------------------------------
struct SourcePos {
  std::size_t line = 0;  // 1-based
  std::size_t column = 0;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Var { std::string name; };
struct App { ExprPtr fn; ExprPtr arg; };
struct Implies { ExprPtr lhs; ExprPtr rhs; };
struct And { ExprPtr lhs; ExprPtr rhs; };
struct Leq { ExprPtr lhs; ExprPtr rhs; };
struct Lt { ExprPtr lhs; ExprPtr rhs; };
struct NatLit { std::uint64_t value = 0; };
struct ListLit { std::vector<ExprPtr> elems; };

struct Expr {
  std::variant<Var, App, Implies, And, Leq, Lt, NatLit, ListLit> node;
  SourcePos pos;
};

// Definition name (param : A) : B := body.
struct Definition {
  std::string name;
  std::string param;
  SpecType param_type;
  SpecType return_type;
  ExprPtr body;
  SourcePos pos;
};

struct SpecProgram {
  std::vector<Definition> definitions;

  const Definition* find(std::string_view name) const;
};

struct ParseError : Error {
  std::size_t line;
  std::size_t column;
  std::vector<std::string> expected;
  ParseError(SourcePos pos, std::vector<std::string> expected_tokens, const std::string& found);
};

struct TypeError : Error {
  std::size_t line;
  std::size_t column;
  std::string expected;
  std::string found;
  TypeError(SourcePos pos, std::string expected_type, std::string found_type,
            const std::string& detail);
};

// Parses one or more `Definition ... .` forms. Operator precedence, tightest
// first: application (left-assoc), <= and < (non-assoc), && (left-assoc),
// ==> (right-assoc).
SpecProgram parse_spec(std::string_view text);
SpecProgram load_spec(const std::string& path);

// Fully parenthesized forms; parsing the printed form reproduces the AST.
std::string print_expr(const Expr& e);
std::string print_definition(const Definition& d);
std::string print_program(const SpecProgram& p);

// Checks every definition body against its declared return type under the
// builtin environment:
//   all        : (time -> bool) -> (list time) -> bool
//   count      : (time -> bool) -> (list time) -> nat
//   is_leq_10  : time -> bool
//   is_gt_9    : time -> bool
//   is_weeklyDP: (list time) -> bool
// and <=, < at nat*nat or time*time only. Throws TypeError on the first
// violation.
void typecheck(const SpecProgram& p);

// ---------------------------------------------------------------------------
// Values.
// ---------------------------------------------------------------------------
struct TimeV { std::int64_t minutes = 0; };

enum class BuiltinId { All, Count, IsLeqExtended, IsGtDaily, IsWeeklyDp };

class Value;

struct BuiltinClosure {
  BuiltinId id{};
  std::vector<Value> args;  // curried arguments collected so far
};

struct UserFn { std::size_t def_index = 0; };

class Value {
 public:
  Value() : v_(false) {}
  explicit Value(bool b) : v_(b) {}
  explicit Value(std::uint64_t n) : v_(n) {}
  explicit Value(TimeV t) : v_(t) {}
  explicit Value(std::vector<Value> elems) : v_(std::move(elems)) {}
  explicit Value(BuiltinClosure c) : v_(std::move(c)) {}
  explicit Value(UserFn f) : v_(f) {}

  bool is_bool() const { return std::holds_alternative<bool>(v_); }
  bool is_nat() const { return std::holds_alternative<std::uint64_t>(v_); }
  bool is_time() const { return std::holds_alternative<TimeV>(v_); }
  bool is_list() const { return std::holds_alternative<std::vector<Value>>(v_); }
  bool is_fn() const {
    return std::holds_alternative<BuiltinClosure>(v_) || std::holds_alternative<UserFn>(v_);
  }

  bool as_bool() const { return std::get<bool>(v_); }
  std::uint64_t as_nat() const { return std::get<std::uint64_t>(v_); }
  TimeV as_time() const { return std::get<TimeV>(v_); }
  const std::vector<Value>& as_list() const { return std::get<std::vector<Value>>(v_); }

  const std::variant<bool, std::uint64_t, TimeV, std::vector<Value>, BuiltinClosure, UserFn>&
  raw() const {
    return v_;
  }

  std::string describe() const;  // "bool", "nat", "time", "list", "fn"

 private:
  std::variant<bool, std::uint64_t, TimeV, std::vector<Value>, BuiltinClosure, UserFn> v_;
};

struct UnknownEntry : Error {
  explicit UnknownEntry(const std::string& name)
      : Error("UnknownEntry", "no definition named '" + name + "'") {}
};

struct ArgTypeMismatch : Error {
  ArgTypeMismatch(const std::string& expected, const std::string& found)
      : Error("ArgTypeMismatch", "entry expects " + expected + ", got " + found) {}
};

// Call-by-value evaluator over a typechecked program. The threshold builtins
// bind to Article6Params at construction; is_weeklyDP delegates to the native
// format check through an optional pattern context accompanying the list
// argument.
class Evaluator {
 public:
  Evaluator(SpecProgram program, article6::Article6Params params);

  const SpecProgram& program() const noexcept { return program_; }

  Value eval(const std::string& entry, const Value& arg) const;

  // Converts the pattern to a list-of-time argument, evaluates `entry` with
  // the pattern as is_weeklyDP context, and expects a boolean result.
  bool eval_pattern(const std::string& entry, const article6::WeeklyDrivingPattern& w) const;

 private:
  Value eval_with_context(const std::string& entry, const Value& arg,
                          const article6::WeeklyDrivingPattern* context) const;

  SpecProgram program_;
  article6::Article6Params params_;
};

Value eval_spec(const SpecProgram& p, const std::string& entry, const Value& arg,
                const article6::Article6Params& params = {});

// ---------------------------------------------------------------------------
// Differential testing against the native checker.
// ---------------------------------------------------------------------------
struct Disagreement {
  article6::WeeklyDrivingPattern pattern;
  bool native_verdict = false;
  bool spec_verdict = false;
};

struct DiffReport {
  std::size_t samples = 0;
  std::vector<Disagreement> disagreements;

  bool agreed() const noexcept { return disagreements.empty(); }
};

// Runs `article6_1` from the program against check_article6_1 on every
// sample. Disagreement is data, not an error.
DiffReport differential_check(const SpecProgram& p,
                              const std::vector<article6::WeeklyDrivingPattern>& samples,
                              const article6::Article6Params& params);

}  // namespace dtc::specdsl
