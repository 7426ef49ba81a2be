#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <string>

#include "cmh/report.hpp"
#include "doctest.h"

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  Run r;
  const std::string cmd = env + std::string(CMH_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

}  // namespace

TEST_CASE("exit codes") {
  CHECK(run("field info cyclotomic:5").code == 0);
  CHECK(run("field info poly:x^3-2").code == 1);
  CHECK(run("no-such-command").code == 2);
  CHECK(run("field info").code == 2);
  CHECK(run("verify-thm1 --symbolic g=2 --variant C").code == 2);
}

TEST_CASE("JSON schema") {
  Run r = run("identity grand cyclotomic:5 --all --json");
  REQUIRE(r.code == 0);
  auto j = cmh::json::parse(r.out);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"command", "config", "results", "certification", "timing"});
  CHECK(j["certification"]["ok"] == true);
  CHECK(j["results"]["reports"].size() == 8);
}

TEST_CASE("failure reports carry the stage") {
  Run r = run("field info poly:x^3-2 --json");
  CHECK(r.code == 1);
  auto j = cmh::json::parse(r.out);
  CHECK(j["certification"]["failure"]["stage"] == "field info");
  CHECK(j["certification"]["failure"]["kind"] == "NotCM");
}

TEST_CASE("identical invocations give identical reports") {
  for (const char* args : {"identity grand cyclotomic:7 --all --json", "verify-thm1 --symbolic g=3 --variant both --json",
                           "scan cyclotomic --max-f 16", "avg-height cyclotomic:4 --json", "lfun 12 --json"}) {
    CAPTURE(args);
    Run a = run(args);
    Run b = run(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
  }
}

TEST_CASE("precision from the environment") {
  Run r = run("field info cyclotomic:4 --json");
  Run e = run("field info cyclotomic:4 --json", "CMH_PREC=128 ");
  Run p = run("field info cyclotomic:4 --json --prec 192", "CMH_PREC=128 ");
  CHECK(cmh::json::parse(r.out)["config"]["precision_bits"] == 256);
  CHECK(cmh::json::parse(e.out)["config"]["precision_bits"] == 128);
  CHECK(cmh::json::parse(p.out)["config"]["precision_bits"] == 192);
}

TEST_CASE("scan output") {
  Run r = run("scan cyclotomic --max-f 12");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("f,degree,d_E", 0) == 0);
  size_t lines = 0;
  for (char c : r.out) lines += c == '\n';
  CHECK(lines == 9);
  Run empty = run("scan cyclotomic --max-f 2");
  CHECK(empty.code == 0);
}
