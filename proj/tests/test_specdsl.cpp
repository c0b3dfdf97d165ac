#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dtc/specdsl.hpp"
#include "support/testutil.hpp"

using namespace dtc::specdsl;
using dtc::article6::Article6Params;
using dtc::article6::WeeklyDrivingPattern;
using testutil::pattern;

namespace {

const char* kArticleSpec =
    "Definition article6_1 (w : list time) : bool :=\n"
    "  is_weeklyDP w ==> all is_leq_10 w && count is_gt_9 w <= 2.\n";

const char* kExpandedBody =
    "((is_weeklyDP w) ==> (((all is_leq_10) w) && (((count is_gt_9) w) <= 2)))";

const Article6Params kParams;

Value time_list(std::initializer_list<std::int64_t> minutes) {
  std::vector<Value> xs;
  for (std::int64_t m : minutes) xs.push_back(Value(TimeV{m}));
  return Value(std::move(xs));
}

}  // namespace

TEST_CASE("the weekly-rule definition parses to its fully parenthesized form") {
  const SpecProgram p = parse_spec(kArticleSpec);
  REQUIRE(p.definitions.size() == 1);
  const Definition& d = p.definitions[0];
  CHECK(d.name == "article6_1");
  CHECK(d.param == "w");
  CHECK(d.param_type == SpecType::list(SpecType::time()));
  CHECK(d.return_type == SpecType::boolean());
  CHECK(print_expr(*d.body) == kExpandedBody);
  // Parsing the expanded form gives the identical tree.
  const SpecProgram q = parse_spec("Definition article6_1 (w : (list time)) : bool := " +
                                   std::string(kExpandedBody) + ".");
  CHECK(print_expr(*q.definitions[0].body) == kExpandedBody);
}

TEST_CASE("a definition without its terminating dot is a parse error") {
  try {
    parse_spec("Definition f (w : list time) : bool := is_weeklyDP w");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::find(e.expected.begin(), e.expected.end(), ".") != e.expected.end());
  }
}

TEST_CASE("operator precedence: application, comparison, conjunction, implication") {
  const SpecProgram p =
      parse_spec("Definition t (w : list time) : bool := a ==> b && c <= 2.");
  const Expr& body = *p.definitions[0].body;
  // Implies(a, And(b, Leq(c, 2)))
  REQUIRE(std::holds_alternative<Implies>(body.node));
  const auto& imp = std::get<Implies>(body.node);
  CHECK(std::holds_alternative<Var>(imp.lhs->node));
  REQUIRE(std::holds_alternative<And>(imp.rhs->node));
  const auto& conj = std::get<And>(imp.rhs->node);
  CHECK(std::holds_alternative<Var>(conj.lhs->node));
  REQUIRE(std::holds_alternative<Leq>(conj.rhs->node));
  CHECK(print_expr(body) == "(a ==> (b && (c <= 2)))");

  // ==> associates right, && associates left, application left.
  CHECK(print_expr(*parse_spec("Definition t (w : list time) : bool := a ==> b ==> c.")
                        .definitions[0]
                        .body) == "(a ==> (b ==> c))");
  CHECK(print_expr(*parse_spec("Definition t (w : list time) : bool := a && b && c.")
                        .definitions[0]
                        .body) == "((a && b) && c)");
  CHECK(print_expr(*parse_spec("Definition t (w : list time) : bool := f x y.")
                        .definitions[0]
                        .body) == "((f x) y)");
}

TEST_CASE("parse errors carry line and column") {
  try {
    parse_spec("Definition f (w : list time) : bool :=\n  is_weeklyDP w &&& true.\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
    CHECK(e.column > 1);
  }
}

TEST_CASE("list literals parse and print") {
  const SpecProgram p =
      parse_spec("Definition t (w : list time) : bool := all is_leq_10 [1, 2, 3].");
  CHECK(print_expr(*p.definitions[0].body) == "((all is_leq_10) [1, 2, 3])");
}

TEST_CASE("the shipped definition typechecks") {
  CHECK_NOTHROW(typecheck(parse_spec(kArticleSpec)));
}

TEST_CASE("cross-type comparison is a type error") {
  // d : time compared against a nat literal.
  const SpecProgram p = parse_spec("Definition g (d : time) : bool := d <= 2.");
  try {
    typecheck(p);
    FAIL("expected TypeError");
  } catch (const TypeError& e) {
    CHECK(e.expected == "time");
    CHECK(e.found == "nat");
  }
}

TEST_CASE("applying a list function to a nat is a type error") {
  const SpecProgram p = parse_spec("Definition h (w : list time) : bool := all is_leq_10 5.");
  try {
    typecheck(p);
    FAIL("expected TypeError");
  } catch (const TypeError& e) {
    CHECK(e.expected == "(list time)");
    CHECK(e.found == "nat");
  }
}

TEST_CASE("more type errors: unbound names, wrong return type, redefinition") {
  CHECK_THROWS_AS(typecheck(parse_spec("Definition f (w : list time) : bool := mystery w.")),
                  TypeError);
  CHECK_THROWS_AS(typecheck(parse_spec("Definition f (w : list time) : nat := is_weeklyDP w.")),
                  TypeError);
  CHECK_THROWS_AS(typecheck(parse_spec("Definition all (w : list time) : bool := true <= 2.")),
                  TypeError);
  CHECK_THROWS_AS(typecheck(parse_spec("Definition f (w : list time) : bool := w && w.")),
                  TypeError);
}

TEST_CASE("evaluation matches the truth table") {
  const SpecProgram p = parse_spec(kArticleSpec);
  typecheck(p);
  const Evaluator ev(p, kParams);

  CHECK(ev.eval("article6_1", time_list({540, 540})).as_bool());
  CHECK(!ev.eval("article6_1", time_list({600, 600, 600})).as_bool());
  CHECK(ev.eval("article6_1", time_list({})).as_bool());
  CHECK(ev.eval("article6_1", time_list({600, 600, 540})).as_bool());
  CHECK(!ev.eval("article6_1", time_list({630})).as_bool());
}

TEST_CASE("evaluation through a pattern context delegates the format check") {
  const SpecProgram p = parse_spec(kArticleSpec);
  typecheck(p);
  const Evaluator ev(p, kParams);

  // Over-long pattern: format check fails, implication passes vacuously.
  CHECK(ev.eval_pattern("article6_1", pattern({2024, 1}, {900, 900, 900, 900, 900, 900, 900, 900})));
  // Misattributed provenance: likewise.
  WeeklyDrivingPattern w = pattern({2024, 1}, {900});
  w.provenance[0].attributed_week = {2023, 50};
  CHECK(ev.eval_pattern("article6_1", w));
  // Well-formed violating pattern.
  CHECK(!ev.eval_pattern("article6_1", pattern({2024, 1}, {601})));
}

TEST_CASE("unknown entries and argument type mismatches are reported") {
  const SpecProgram p = parse_spec(kArticleSpec);
  typecheck(p);
  const Evaluator ev(p, kParams);
  CHECK_THROWS_AS(ev.eval("nope", time_list({})), UnknownEntry);
  CHECK_THROWS_AS(ev.eval("article6_1", Value(std::uint64_t{5})), ArgTypeMismatch);
  CHECK_THROWS_AS(ev.eval("article6_1", Value(true)), ArgTypeMismatch);
}

TEST_CASE("type preservation: evaluation returns the declared type") {
  const SpecProgram p = parse_spec(
      "Definition over9 (w : list time) : nat := count is_gt_9 w.\n"
      "Definition within10 (w : list time) : bool := all is_leq_10 w.\n");
  typecheck(p);
  const Evaluator ev(p, kParams);
  CHECK(ev.eval("over9", time_list({500, 600, 700})).is_nat());
  CHECK(ev.eval("within10", time_list({500, 600, 700})).is_bool());
}

TEST_CASE("property: count and all respect their glosses") {
  const SpecProgram p = parse_spec(
      "Definition over9 (w : list time) : nat := count is_gt_9 w.\n"
      "Definition n_within (w : list time) : nat := count is_leq_10 w.\n"
      "Definition all_within (w : list time) : bool := all is_leq_10 w.\n");
  typecheck(p);
  const Evaluator ev(p, kParams);
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> len_die(0, 10);
  std::uniform_int_distribution<std::int64_t> min_die(0, 900);
  for (int i = 0; i < 2000; ++i) {
    std::vector<Value> xs;
    const int len = len_die(rng);
    for (int j = 0; j < len; ++j) xs.push_back(Value(TimeV{min_die(rng)}));
    const Value list{std::vector<Value>(xs)};
    const auto count_gt = ev.eval("over9", list).as_nat();
    const auto count_leq = ev.eval("n_within", list).as_nat();
    const bool all_leq = ev.eval("all_within", list).as_bool();
    CHECK(count_gt <= static_cast<std::uint64_t>(len));
    CHECK(count_leq <= static_cast<std::uint64_t>(len));
    CHECK(all_leq == (count_leq == static_cast<std::uint64_t>(len)));
  }
}

TEST_CASE("definitions can call earlier definitions") {
  const SpecProgram p = parse_spec(
      "Definition core (w : list time) : bool := all is_leq_10 w && count is_gt_9 w <= 2.\n"
      "Definition wrapped (w : list time) : bool := is_weeklyDP w ==> core w.\n");
  typecheck(p);
  const Evaluator ev(p, kParams);
  CHECK(!ev.eval("wrapped", time_list({600, 600, 600})).as_bool());
  CHECK(ev.eval("wrapped", time_list({600, 600})).as_bool());
}

TEST_CASE("print/parse round trip reproduces the tree") {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> shape_die(0, 7);
  std::uniform_int_distribution<int> nat_die(0, 99);
  const std::vector<std::string> names = {"a", "b", "w", "is_weeklyDP", "all", "count"};
  std::uniform_int_distribution<std::size_t> name_die(0, names.size() - 1);

  // Random expression trees, depth-limited.
  std::function<ExprPtr(int)> gen = [&](int depth) -> ExprPtr {
    auto leaf = [&]() -> ExprPtr {
      if (shape_die(rng) < 4) {
        return std::make_shared<const Expr>(Expr{Var{names[name_die(rng)]}, {}});
      }
      return std::make_shared<const Expr>(
          Expr{NatLit{static_cast<std::uint64_t>(nat_die(rng))}, {}});
    };
    if (depth == 0) return leaf();
    switch (shape_die(rng)) {
      case 0: return std::make_shared<const Expr>(Expr{App{gen(depth - 1), gen(depth - 1)}, {}});
      case 1:
        return std::make_shared<const Expr>(Expr{Implies{gen(depth - 1), gen(depth - 1)}, {}});
      case 2: return std::make_shared<const Expr>(Expr{And{gen(depth - 1), gen(depth - 1)}, {}});
      case 3: return std::make_shared<const Expr>(Expr{Leq{gen(depth - 1), gen(depth - 1)}, {}});
      case 4: return std::make_shared<const Expr>(Expr{Lt{gen(depth - 1), gen(depth - 1)}, {}});
      case 5: {
        ListLit lit;
        const int n = shape_die(rng) % 3;
        for (int i = 0; i < n; ++i) lit.elems.push_back(gen(depth - 1));
        return std::make_shared<const Expr>(Expr{std::move(lit), {}});
      }
      default: return leaf();
    }
  };

  for (int i = 0; i < 300; ++i) {
    const ExprPtr e = gen(3);
    const std::string printed = print_expr(*e);
    const SpecProgram p =
        parse_spec("Definition t (w : list time) : bool := " + printed + ".");
    CHECK(print_expr(*p.definitions[0].body) == printed);
  }
}

TEST_CASE("differential check agrees on the exhaustive boundary lattice") {
  const SpecProgram p = parse_spec(kArticleSpec);
  typecheck(p);
  const std::int64_t values[] = {0, 540, 541, 600, 601};
  std::vector<WeeklyDrivingPattern> samples;
  for (int len = 0; len <= 3; ++len) {
    std::vector<int> idx(len, 0);
    while (true) {
      std::vector<std::int64_t> v;
      for (int j = 0; j < len; ++j) v.push_back(values[idx[j]]);
      samples.push_back(pattern({2024, 1}, v));
      int k = len - 1;
      while (k >= 0 && idx[k] == 4) idx[k--] = 0;
      if (k < 0) break;
      ++idx[k];
    }
  }
  CHECK(samples.size() == 156);
  const DiffReport report = differential_check(p, samples, kParams);
  CHECK(report.samples == 156);
  CHECK(report.agreed());
}

TEST_CASE("differential check agrees on seeded random patterns") {
  const SpecProgram p = parse_spec(kArticleSpec);
  typecheck(p);
  std::mt19937_64 rng(4242);
  std::vector<WeeklyDrivingPattern> samples;
  for (int i = 0; i < 10000; ++i) samples.push_back(testutil::random_pattern(rng));
  const DiffReport report = differential_check(p, samples, kParams);
  CHECK(report.samples == 10000);
  CHECK(report.agreed());
}

TEST_CASE("differential check still agrees when the limits coincide") {
  Article6Params degenerate;
  degenerate.daily_limit = dtc::timebase::DurationMin(600);
  degenerate.extended_limit = dtc::timebase::DurationMin(600);
  const SpecProgram p = parse_spec(kArticleSpec);
  typecheck(p);
  std::mt19937_64 rng(77);
  std::vector<WeeklyDrivingPattern> samples;
  for (int i = 0; i < 5000; ++i) samples.push_back(testutil::random_pattern(rng));
  CHECK(differential_check(p, samples, degenerate).agreed());
}
