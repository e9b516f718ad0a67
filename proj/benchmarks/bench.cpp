#include <benchmark/benchmark.h>

#include "wlt/corpus.hpp"
#include "wlt/profile.hpp"
#include "wlt/verify.hpp"

using namespace wlt;

namespace {

// Three parts over three li entries, each consumed in a different part.
void BM_PseudosplitCheck(benchmark::State& st) {
  auto li = PseudoType::proper(types::li(types::int_()));
  auto hi = PseudoType::hidden(types::int_());
  auto un = PseudoType::proper(types::un(types::bool_()));
  TypeContext whole{{"x", li}, {"y", li}, {"z", li}, {"b", un}};
  std::vector<TypeContext> parts{TypeContext{{"x", li}, {"y", hi}, {"b", un}},
                                 TypeContext{{"y", li}, {"z", hi}, {"b", un}},
                                 TypeContext{{"z", li}, {"b", un}}};
  for (auto _ : st) benchmark::DoNotOptimize(pseudosplit_check(parts, whole));
}
BENCHMARK(BM_PseudosplitCheck);

void BM_ConfigCheck(benchmark::State& st, const char* name) {
  auto lp = load_program(get_program(name, Variant::WeakLinear, st.range(0)));
  VerifyOptions vo;
  vo.hints = lp.hints;
  for (auto _ : st) benchmark::DoNotOptimize(config_check(lp.initial, *lp.signature, vo).ok);
}
BENCHMARK_CAPTURE(BM_ConfigCheck, fib, "fib")->Arg(8);
BENCHMARK_CAPTURE(BM_ConfigCheck, sort, "sort")->Arg(8);
BENCHMARK_CAPTURE(BM_ConfigCheck, map, "map")->Arg(8);

void BM_Run(benchmark::State& st, const char* name, Variant v) {
  auto lp = load_program(get_program(name, v, st.range(0)));
  Machine m(*lp.signature);
  std::uint64_t steps = 0;
  for (auto _ : st) {
    auto r = m.run(lp.initial);
    steps = r.steps;
    benchmark::DoNotOptimize(r.final.store.size());
  }
  st.counters["steps"] = static_cast<double>(steps);
  st.SetItemsProcessed(static_cast<std::int64_t>(steps) * st.iterations());
}
BENCHMARK_CAPTURE(BM_Run, fib_li, "fib", Variant::WeakLinear)->Arg(16)->Arg(32);
BENCHMARK_CAPTURE(BM_Run, mapa_un, "mapa", Variant::Unrestricted)->Arg(16)->Arg(32);
BENCHMARK_CAPTURE(BM_Run, sort_li, "sort", Variant::WeakLinear)->Arg(8)->Arg(16);

void BM_PreservationSuite(benchmark::State& st) {
  auto lp = load_program(get_program("fib", Variant::WeakLinear, st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(preservation_suite(lp, "fib", st.range(0)).passed());
}
BENCHMARK(BM_PreservationSuite)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_Generate(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(generate_configurations(1, st.range(0), 4).size());
}
BENCHMARK(BM_Generate)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
