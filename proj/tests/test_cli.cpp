#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

struct Run {
  int code;
  std::string out;
};

std::filesystem::path cache_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "gwcalc_cli_tests";
  std::filesystem::create_directories(dir);
  return dir / (name + ".json");
}

Run gwcalc(const std::string& args, const std::filesystem::path& cache) {
  const std::string cmd = "GWCALC_CACHE='" + cache.string() + "' '" GWCALC_BINARY "' " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::filesystem::path fresh(const std::string& name) {
  auto p = cache_path(name);
  std::filesystem::remove(p);
  return p;
}

std::string pts(int n) {
  std::string s;
  for (int i = 0; i < n; ++i) s += (i ? "," : "") + std::string("pt");
  return s;
}

}  // namespace

TEST(Cli, Kontsevich) {
  const auto cache = fresh("kontsevich");
  const auto r = gwcalc("compute --target P2 --degree 4 --insertions " + pts(11), cache);
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("kind,genus,degree,insertions,value\n"), std::string::npos);
  EXPECT_NE(r.out.find(",620\n"), std::string::npos) << r.out;
  EXPECT_TRUE(std::filesystem::exists(cache));
}

TEST(Cli, RealSeedSign) {
  for (const auto& [sign, expect] : {std::pair<std::string, std::string>{"+", ",1\n"}, {"-", ",-1\n"}}) {
    const auto cache = fresh("seed" + std::string(sign == "+" ? "p" : "m"));
    const auto r = gwcalc("compute --target P3-tau --real --seed-sign " + sign + " --degree 1 --insertions pt", cache);
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("real,0,1,0:3," + expect.substr(1)), std::string::npos) << r.out;
  }
  const auto cache = cache_path("seedp");
  const auto r = gwcalc("compute --target P3-tau --real --seed-sign - --degree 1 --insertions pt", cache);
  EXPECT_NE(r.code, 0);
}

TEST(Cli, JsonFormat) {
  const auto r = gwcalc("compute --target P2 --degree 2 --insertions " + pts(5) + " --format json", fresh("json"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("\"1/1\""), std::string::npos) << r.out;
}

TEST(Cli, BadArguments) {
  const auto cache = fresh("bad");
  EXPECT_EQ(gwcalc("compute --target P2 --degree -1 --insertions pt", cache).code, 2);
  EXPECT_EQ(gwcalc("compute --target P4-tau --degree 1 --insertions pt", cache).code, 2);
  EXPECT_EQ(gwcalc("compute --target P2 --degree 1 --insertions banana", cache).code, 2);
  EXPECT_EQ(gwcalc("frobnicate", cache).code, 2);
  EXPECT_EQ(gwcalc("compute --target P2 --real --degree 1 --insertions pt", cache).code, 2);
}

TEST(Cli, VerifyPasses) {
  const auto r = gwcalc("verify --target P2 --max-degree 2", fresh("verify"));
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("wdvv: pass"), std::string::npos) << r.out;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos) << r.out;
  const auto real = gwcalc("verify --target P3-tau --max-degree 2", fresh("verify_real"));
  EXPECT_EQ(real.code, 0) << real.out;
  EXPECT_NE(real.out.find("rwdvv: pass"), std::string::npos) << real.out;
}

TEST(Cli, CacheCommands) {
  const auto cache = fresh("cache");
  EXPECT_NE(gwcalc("cache show", cache).out.find("0 entries"), std::string::npos);
  ASSERT_EQ(gwcalc("compute --target P2 --degree 2 --insertions " + pts(5), cache).code, 0);
  const auto show = gwcalc("cache show", cache);
  EXPECT_EQ(show.code, 0);
  EXPECT_NE(show.out.find("target P2"), std::string::npos) << show.out;
  const auto csv = gwcalc("cache export --format csv", cache);
  EXPECT_EQ(csv.out.rfind("kind,genus,degree,insertions,value\n", 0), 0u) << csv.out;
  EXPECT_NE(csv.out.find("complex,0,2,0:2;0:2;0:2;0:2;0:2,1"), std::string::npos) << csv.out;
  EXPECT_EQ(gwcalc("cache clear", cache).code, 0);
  EXPECT_NE(gwcalc("cache show", cache).out.find("0 entries"), std::string::npos);
}

TEST(Cli, CorruptedCacheNamesKey) {
  const auto cache = fresh("corrupt");
  ASSERT_EQ(gwcalc("compute --target P2 --degree 3 --insertions " + pts(8), cache).code, 0);
  std::stringstream ss;
  ss << std::ifstream(cache).rdbuf();
  std::string text = ss.str();
  const std::string needle = "\"12/1\"";
  const auto pos = text.find(needle);
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, needle.size(), "\"13/1\"");
  std::ofstream(cache, std::ios::trunc) << text;
  const auto r = gwcalc("verify --target P2 --max-degree 3 --suite wdvv", cache);
  EXPECT_EQ(r.code, 1) << r.out;
  EXPECT_NE(r.out.find("d=3 <tau0(e2) tau0(e2) tau0(e2) tau0(e2) tau0(e2) tau0(e2) tau0(e2) tau0(e2)>"),
            std::string::npos)
      << r.out;
}

TEST(Cli, DeterministicAcrossThreads) {
  const auto one = gwcalc("compute --target P3-tau --real --degree 3 --insertions pt,pt,pt --threads 1",
                          fresh("det1"));
  const auto four = gwcalc("compute --target P3-tau --real --degree 3 --insertions pt,pt,pt --threads 4",
                           fresh("det4"));
  ASSERT_EQ(one.code, 0) << one.out;
  EXPECT_EQ(one.out, four.out);
  std::stringstream a, b;
  a << std::ifstream(cache_path("det1")).rdbuf();
  b << std::ifstream(cache_path("det4")).rdbuf();
  EXPECT_EQ(a.str(), b.str());
}
