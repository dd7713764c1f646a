#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string kCli = SKYSHARE_CLI_PATH;

struct CliRun {
  int code = -1;
  std::string out;
};

// Runs the CLI through the shell, stderr folded into stdout.
CliRun run(const std::string& args) {
  CliRun r;
  const std::string cmd = kCli + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("skyshare_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

// A server started through popen; the first line carries its port.
struct ServerProc {
  FILE* pipe = nullptr;
  std::string port;

  explicit ServerProc(const std::string& args) {
    pipe = popen((kCli + " " + args).c_str(), "r");
    char line[256] = {0};
    if (pipe && std::fgets(line, sizeof line, pipe)) {
      std::string s(line);
      const auto colon = s.rfind(':');
      if (s.find("listening on") != std::string::npos && colon != std::string::npos) {
        port = s.substr(colon + 1);
        while (!port.empty() && (port.back() == '\n' || port.back() == '\r')) port.pop_back();
      }
    }
  }
  int wait() {
    if (!pipe) return -1;
    const int status = pclose(pipe);
    pipe = nullptr;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  ~ServerProc() {
    if (pipe) wait();
  }
};

TEST_F(CliTest, GenIsDeterministic) {
  for (const char* kind : {"corr", "inde", "anti"}) {
    const std::string flags = std::string("gen --kind ") + kind + " --n 50 --m 3 --seed 9";
    ASSERT_EQ(run(flags + " --out " + path("a.csv")).code, 0);
    ASSERT_EQ(run(flags + " --out " + path("b.csv")).code, 0);
    EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv"))) << kind;
    const std::string c = slurp(path("a.csv"));
    EXPECT_EQ(std::count(c.begin(), c.end(), '\n'), 51);
  }
  ASSERT_EQ(run("gen --n 50 --m 3 --seed 10 --out " + path("c.csv")).code, 0);
  EXPECT_NE(slurp(path("a.csv")), slurp(path("c.csv")));
}

TEST_F(CliTest, ExamplePipelineOverTcp) {
  {
    std::ofstream csv(path("table.csv"));
    csv << "price,distance\n15,102\n14,97\n20,99\n19,101\n";
  }
  const std::string g = "--l 32 --latency-ms 0 ";
  const CliRun dealt = run(g + "deal --csv " + path("table.csv") + " --out-dir " + path("d"));
  ASSERT_EQ(dealt.code, 0) << dealt.out;
  for (const char* f : {"shares1.bin", "shares2.bin", "pool1.bin", "pool2.bin"}) {
    EXPECT_TRUE(fs::exists(dir_ / "d" / f)) << f;
  }

  ServerProc s2(g + "serve --party 2 --listen 127.0.0.1:0 --sessions 1 --shares " +
                path("d/shares2.bin") + " --pool " + path("d/pool2.bin") +
                " --metrics-csv " + path("m2.csv"));
  ASSERT_FALSE(s2.port.empty());
  ServerProc s1(g + "serve --party 1 --listen 127.0.0.1:0 --sessions 1 --peer 127.0.0.1:" +
                s2.port + " --shares " + path("d/shares1.bin") + " --pool " +
                path("d/pool1.bin"));
  ASSERT_FALSE(s1.port.empty());

  const CliRun q = run("--l 32 query --q 16,100 --servers 127.0.0.1:" + s1.port +
                    ",127.0.0.1:" + s2.port);
  EXPECT_EQ(q.code, 0) << q.out;
  EXPECT_EQ(q.out, "15,102\n19,101\n");
  EXPECT_EQ(s1.wait(), 0);
  EXPECT_EQ(s2.wait(), 0);

  const std::string metrics = slurp(path("m2.csv"));
  EXPECT_EQ(metrics.rfind("session,n,m,k,rounds,bytes_tx,bytes_rx,secext,wall_ms\n", 0), 0u);
  // 4*2 + 2*4*4 + 4 SecExt calls for k = 2.
  EXPECT_NE(metrics.find(",4,2,2,"), std::string::npos);
  EXPECT_NE(metrics.find(",44,"), std::string::npos);
}

TEST_F(CliTest, OneLiveServerIsANetworkError) {
  ASSERT_EQ(run("--l 32 deal --n 8 --m 2 --out-dir " + path("d")).code, 0);
  ServerProc s2("--l 32 serve --party 2 --listen 127.0.0.1:0 --sessions 1 --shares " +
                path("d/shares2.bin") + " --pool " + path("d/pool2.bin"));
  ASSERT_FALSE(s2.port.empty());
  // Port 1 on loopback has no listener.
  const CliRun q = run("--l 32 query --q 3,3 --servers 127.0.0.1:1,127.0.0.1:" + s2.port);
  EXPECT_EQ(q.code, 5) << q.out;
  EXPECT_NE(q.out.find("skyshare: network error"), std::string::npos) << q.out;
  std::system(("pkill -f -- '" + path("d/shares2.bin") + "'").c_str());
}

TEST_F(CliTest, VerifyLocal) {
  const CliRun r = run("--l 16 --latency-ms 0 verify --kind anti --n 40 --m 3 --bound 200 --queries 4");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("matched 4/4 (100.00%)"), std::string::npos) << r.out;
  const CliRun two = run("--latency-ms 0 --mode two-message verify --n 30 --queries 3");
  EXPECT_EQ(two.code, 0) << two.out;
}

TEST_F(CliTest, BenchEmitsOneRowPerCell) {
  const CliRun r = run("--latency-ms 0 bench --kinds corr,inde --n-list 16,24 --m-list 2 --out " +
                    path("b.csv"));
  ASSERT_EQ(r.code, 0) << r.out;
  const std::string c = slurp(path("b.csv"));
  EXPECT_EQ(c.rfind("dataset,session,n,m,k,rounds,bytes_tx,bytes_rx,secext,wall_ms\n", 0), 0u);
  EXPECT_EQ(std::count(c.begin(), c.end(), '\n'), 5);
}

TEST_F(CliTest, ConfigFile) {
  {
    std::ofstream ini(path("c.ini"));
    ini << "l = 16\nlatency-ms = 0\n[verify]\nqueries = 2\nn = 20\n";
  }
  const CliRun r = run("--config " + path("c.ini") + " verify");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("matched 2/2"), std::string::npos) << r.out;
}

TEST_F(CliTest, RejectsBadInputBeforeSideEffects) {
  CliRun r = run("verify --queries 0");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("skyshare: invalid argument"), std::string::npos);

  r = run("bench --n-list ''");
  EXPECT_EQ(r.code, 2) << r.out;
  r = run("bench --kinds ''");
  EXPECT_EQ(r.code, 2) << r.out;

  r = run("--mode triples verify");
  EXPECT_EQ(r.code, 2);
  r = run("gen --kind zipf --out " + path("x.csv"));
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(fs::exists(path("x.csv")));
  r = run("--l 0 deal --n 4 --m 2 --out-dir " + path("never"));
  EXPECT_EQ(r.code, 2) << r.out;
  EXPECT_FALSE(fs::exists(path("never")));

  r = run("query --servers nohost --q 1,2");
  EXPECT_EQ(r.code, 2);
  r = run("--l 16 query --servers 127.0.0.1:1,127.0.0.1:2 --q 10000,1");
  EXPECT_EQ(r.code, 2) << r.out;

  r = run("");
  EXPECT_EQ(r.code, 2);
  r = run("frobnicate");
  EXPECT_EQ(r.code, 2);
}

TEST_F(CliTest, ParseAndIoFailures) {
  {
    std::ofstream csv(path("bad.csv"));
    csv << "a,b\n1,2\n3,x\n";
  }
  CliRun r = run("deal --csv " + path("bad.csv") + " --out-dir " + path("d"));
  EXPECT_EQ(r.code, 4) << r.out;
  EXPECT_NE(r.out.find("column 2"), std::string::npos) << r.out;

  {
    std::ofstream junk(path("junk.bin"));
    junk << "not a share file";
  }
  r = run("serve --party 2 --shares " + path("junk.bin") + " --pool " + path("junk.bin"));
  EXPECT_EQ(r.code, 4) << r.out;
  r = run("serve --party 1 --shares " + path("junk.bin") + " --pool " + path("junk.bin"));
  EXPECT_EQ(r.code, 2) << r.out;  // server 1 without --peer
}

}  // namespace
