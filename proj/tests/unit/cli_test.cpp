#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>

// WLT_CLI, WLT_CORPUS_DIR and WLT_GOLDEN_DIR come from the build.

namespace {

struct Result {
  int code;
  std::string out;
};

Result run(const std::string& args) {
  std::string cmd = std::string("'") + WLT_CLI + "' " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return {-1, ""};
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  int raw = pclose(p);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

std::string corpus(const std::string& file) {
  return std::string("'") + WLT_CORPUS_DIR + "/" + file + "'";
}

TEST(Cli, CheckExitCodes) {
  auto ok = run("check " + corpus("fib.weak-linear.wlt"));
  EXPECT_EQ(ok.code, 0);
  EXPECT_NE(ok.out.find("li <li int, li int, li int>"), std::string::npos);

  auto bad = run("check " + corpus("counterexample.wlt"));
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.out.find("[split]"), std::string::npos);

  EXPECT_EQ(run("check /nonexistent/file.wlt").code, 2);
  EXPECT_EQ(run("check --param n " + corpus("fib.weak-linear.wlt")).code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
}

TEST(Cli, CheckExplainPrintsContext) {
  auto r = run("check --explain " + corpus("sort.weak-linear.wlt"));
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("a : li array"), std::string::npos) << r.out;
}

TEST(Cli, RunSortAndFuel) {
  auto r = run("run --param n=4 " + corpus("sort.weak-linear.wlt"));
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("li {0, 1, 2, 3}"), std::string::npos) << r.out;

  auto f = run("run --fuel 0 " + corpus("sort.weak-linear.wlt"));
  EXPECT_EQ(f.code, 1);
  EXPECT_NE(f.out.find("fuel-exhausted"), std::string::npos);

  auto env = run("run " + corpus("fib.weak-linear.wlt"));
  EXPECT_EQ(env.code, 0);
  EXPECT_EQ(setenv("WLT_FUEL", "3", 1), 0);
  EXPECT_EQ(run("run " + corpus("fib.weak-linear.wlt")).code, 1);
  unsetenv("WLT_FUEL");
}

TEST(Cli, RunUnsafeGetsStuck) {
  // unchecked, x * y frees x before the outer + reads it
  auto r = run("run --unsafe " + corpus("counterexample.wlt"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("stuck"), std::string::npos) << r.out;
  auto checked = run("run " + corpus("counterexample.wlt"));
  EXPECT_EQ(checked.code, 1);
  EXPECT_NE(checked.out.find("[split]"), std::string::npos) << checked.out;
}

TEST(Cli, TraceMatchesGolden) {
  auto r = run("run --trace --param n=1 " + corpus("fib.weak-linear.wlt"));
  ASSERT_EQ(r.code, 0);
  std::ifstream in(std::string(WLT_GOLDEN_DIR) + "/fib1.trace");
  ASSERT_TRUE(in);
  std::stringstream golden;
  golden << in.rdbuf();
  EXPECT_EQ(r.out, golden.str());
}

TEST(Cli, RecordsAreOneJsonObjectPerLine) {
  auto r = run("--format records run --trace --param n=0 " + corpus("fib.weak-linear.wlt"));
  ASSERT_EQ(r.code, 0);
  std::istringstream lines(r.out);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    ++count;
    EXPECT_EQ(line.front(), '{');
    EXPECT_EQ(line.back(), '}');
  }
  EXPECT_GT(count, 1);
}

TEST(Cli, Profile) {
  EXPECT_EQ(run("profile --program fib --variant weak-linear --ns 4,8,16,32").code, 0);
  EXPECT_EQ(run("profile --program mapa --variant unrestricted").code, 0);
  EXPECT_EQ(run("profile --program nope").code, 2);
  EXPECT_EQ(run("profile --program fib --ns 4,8").code, 2);
}

TEST(Cli, MetaSeedIsReproducible) {
  auto a = run("--format records meta --progress --max-n 3 --seed 11 --count 100");
  auto b = run("--format records meta --progress --max-n 3 --seed 11 --count 100");
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(run("meta --max-n 4 --mutant store-qualifier-dealloc").code, 1);
  EXPECT_EQ(run("meta --max-n 4 --mutant operator-pseudosplit").code, 1);
  EXPECT_EQ(run("meta --max-n 4 --count 50").code, 0);
}

}  // namespace
