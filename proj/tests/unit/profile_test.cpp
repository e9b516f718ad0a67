#include <gtest/gtest.h>

#include "wlt/profile.hpp"

using namespace wlt;

namespace {

TEST(Ledger, ConservesAndTracksPeak) {
  BalanceLedger l;
  l.record(0, 4, "a");
  l.record(1, 1, "v0");
  l.record(2, 2, "v1");
  l.record(3, -1, "v0");
  EXPECT_EQ(l.initial_balance(), 4);
  EXPECT_EQ(l.final_balance(), 6);
  EXPECT_EQ(l.run_balance(), 2);
  EXPECT_EQ(l.peak_balance(), 7);
  EXPECT_TRUE(l.has_deallocation());
}

TEST(InstrumentedRun, SingleConstant) {
  auto r = instrumented_run(parse_program("store:\nmain:\nli 3\n"));
  EXPECT_EQ(r.ledger.final_balance(), 1);
  EXPECT_FALSE(r.ledger.has_deallocation());
}

TEST(InstrumentedRun, LetThenOperatorFreesInputs) {
  auto r = instrumented_run(parse_program(R"(signature:
+ : (li int, li int) -> li int = add
store:
main:
let x = li 3 in x + li 0
)"));
  ASSERT_EQ(r.result.status, RunStatus::Terminal);
  EXPECT_EQ(r.ledger.final_balance(), 1);
  EXPECT_EQ(r.ledger.final_balance(), live_size(r.result.final.store));
}

TEST(InstrumentedRun, FinalBalanceIsLiveSize) {
  for (const auto& name : corpus_names())
    for (auto v : {Variant::WeakLinear, Variant::Unrestricted}) {
      auto lp = load_program(get_program(name, v, 5));
      auto r = instrumented_run(lp);
      ASSERT_EQ(r.result.status, RunStatus::Terminal) << name;
      EXPECT_EQ(r.ledger.final_balance(), live_size(r.result.final.store)) << name;
      EXPECT_EQ(r.ledger.initial_balance(), live_size(lp.initial.store)) << name;
    }
}

TEST(InstrumentedRun, UnrestrictedNeverDeallocates) {
  for (const auto& name : corpus_names()) {
    auto r = instrumented_run(load_program(get_program(name, Variant::Unrestricted, 4)));
    for (const auto& e : r.ledger.events()) EXPECT_GT(e.delta, 0) << name << " " << e.cell;
  }
}

TEST(InstrumentedRun, FibWeakLinearIsFlat) {
  auto at = [](std::int64_t n) {
    return instrumented_run(load_program(get_program("fib", Variant::WeakLinear, n)))
        .ledger.final_balance();
  };
  EXPECT_EQ(at(6), at(7));
}

TEST(DetectDegree, ExactDividedDifferences) {
  const std::vector<std::int64_t> xs{4, 8, 16, 32};
  EXPECT_EQ(detect_degree(xs, {5, 5, 5, 5}), 0);
  EXPECT_EQ(detect_degree(xs, {9, 17, 33, 65}), 1);
  EXPECT_EQ(detect_degree(xs, {16, 64, 256, 1024}), 2);
  EXPECT_EQ(detect_degree(xs, {64, 512, 4096, 32768}), 3);
  EXPECT_EQ(detect_degree({4, 6, 8, 10}, {12, 23, 38, 57}), 2);
}

TEST(Growth, ReportedDegrees) {
  auto fib = growth_experiment("fib", Variant::WeakLinear, {4, 8, 16, 32});
  EXPECT_EQ(fib.degree, 0);
  EXPECT_TRUE(fib.matches());
  auto mapa = growth_experiment("mapa", Variant::Unrestricted, {4, 8, 16, 32});
  EXPECT_EQ(mapa.degree, 2);
  auto sort = growth_experiment("sort", Variant::Unrestricted, {4, 6, 8, 10});
  EXPECT_EQ(sort.degree, 3);
  EXPECT_NE(fib.table().find("degree 0"), std::string::npos);
  EXPECT_EQ(fib.records().size(), 5u);
}

TEST(Growth, RejectsBadSamples) {
  EXPECT_THROW(growth_experiment("fib", Variant::WeakLinear, {4, 8, 16}), std::invalid_argument);
  EXPECT_THROW(growth_experiment("fib", Variant::WeakLinear, {4, 4, 8, 16}), std::invalid_argument);
  EXPECT_THROW(growth_experiment("fib", Variant::WeakLinear, {4, 8, 16, 32}, 10), GrowthError);
}

}  // namespace
