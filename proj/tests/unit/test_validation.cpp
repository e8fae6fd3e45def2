#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"
#include "tou/validation.hpp"

using namespace tou;
using tou::test::throws_kind;

namespace {

ValidationBudget small_budget() {
  ValidationBudget b;
  b.t1_samples = 20000;
  b.t2_constructions = 50;
  b.t2_pairs = 500;
  b.t3_replications = 20;
  b.t3_length = 2000;
  b.t3_terms = 20;
  b.t3_qmc_points = 1 << 10;
  b.t4_replications = 500;
  b.t4_length = 201;
  return b;
}

}  // namespace

TEST_CASE("budget") {
  CHECK_NOTHROW(ValidationBudget{}.validate());
  auto b = small_budget();
  CHECK(ValidationBudget::from_json(b.to_json()).to_json() == b.to_json());
  b.t4_replications = 0;
  CHECK(throws_kind([&] { b.validate(); }, ErrorKind::InvalidParameter));
  b = small_budget();
  b.t1_samples = 1000000000000ULL;
  CHECK(throws_kind([&] { b.validate(); }, ErrorKind::InvalidParameter));
}

TEST_CASE("suite names") {
  CHECK(suite_from_string("T3") == Suite::T3);
  CHECK(suite_from_string("ALL") == Suite::All);
  CHECK(std::string(to_string(Suite::T2)) == "T2");
  CHECK(throws_kind([] { (void)suite_from_string("T5"); }, ErrorKind::InvalidParameter));
}

TEST_CASE("small budget runs are complete and reproducible") {
  const auto b = small_budget();
  const auto a = validate_theorems(Suite::All, b, {2, 0});
  const auto again = validate_theorems(Suite::All, b, {2, 0});
  CHECK(to_json(a) == to_json(again));
  bool seen[4] = {};
  for (const auto& c : a.checks) {
    REQUIRE(c.suite.size() == 2);
    seen[c.suite[1] - '1'] = true;
    CHECK(!c.name.empty());
  }
  for (bool s : seen) CHECK(s);

  const auto t4 = validate_theorems(Suite::T4, b, {2, 0});
  for (const auto& c : t4.checks) CHECK(c.suite == "T4");
  CHECK(to_json(t4).at("checks").size() == t4.checks.size());
}
