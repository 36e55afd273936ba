#include <doctest.h>

#include <json.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string(SWMSIM_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  std::array<char, 4096> buf{};
  while (std::size_t n = fread(buf.data(), 1, buf.size(), p)) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch() {
  fs::path d = fs::temp_directory_path() / ("swmsim-cli-test-" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

fs::path write(const fs::path& dir, const std::string& name, const std::string& text) {
  fs::path p = dir / name;
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

const char* kStaggered =
    "# three queues, staggered intervals\n"
    "switch B=6 N=3\n"
    "queue 1 live=1..2 init=0\n"
    "queue 2 live=2..4 init=0\n"
    "queue 3 live=3..6 init=0\n";

}  // namespace

TEST_CASE("simulate writes a summary and a trace") {
  auto dir = scratch();
  auto inst = write(dir, "staggered.txt", kStaggered);
  auto r = cli("simulate " + inst.string() + " --policy lqd --trace " + (dir / "t.csv").string());
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["total"] == 17);
  CHECK(j.contains("per_queue_dead"));
  const std::string trace = slurp(dir / "t.csv");
  CHECK(trace.rfind("# swmsim-csv v1\nslot,transmitted,a_t,b_t,total_occupancy\n", 0) == 0);

  auto frac = cli("simulate " + inst.string() + " --policy lqd-frac");
  REQUIRE(frac.code == 0);
  CHECK(nlohmann::json::parse(frac.out)["total"] == 17);

  auto empty = write(dir, "empty.txt", "switch B=4 N=auto\n");
  auto e = cli("simulate " + empty.string());
  REQUIRE(e.code == 0);
  CHECK(nlohmann::json::parse(e.out)["total"] == 0);
  fs::remove_all(dir);
}

TEST_CASE("gen output round-trips through simulate") {
  auto dir = scratch();
  auto g = cli("gen --family phi-k --k 4 --B 6 --cycles 2 --out " + (dir / "phi.txt").string());
  REQUIRE(g.code == 0);
  auto lqd = cli("simulate " + (dir / "phi.txt").string() + " --policy lqd");
  auto late = cli("simulate " + (dir / "phi.txt").string() + " --policy lateqd-aggregate");
  CHECK(nlohmann::json::parse(lqd.out)["total"] == 31);
  CHECK(nlohmann::json::parse(late.out)["total"] == 32);

  auto s = cli("gen --family staircase --B 98 --a 10 --exact --horizon 20");
  REQUIRE(s.code == 0);
  CHECK(s.out.rfind("switch B=98 N=auto\n", 0) == 0);

  auto r1 = cli("--seed 7 gen --family random --B 4 --N 3 --T 5");
  auto r2 = cli("--seed 7 gen --family random --B 4 --N 3 --T 5");
  CHECK(r1.out == r2.out);
  fs::remove_all(dir);
}

TEST_CASE("sweep rows, ratio and determinism") {
  auto r = cli("sweep --k 4 --grid 2.6666667 --cycles 2 --warmup-cycles 0");
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string version, header, row;
  std::getline(in, version);
  std::getline(in, header);
  std::getline(in, row);
  CHECK(version == "# swmsim-csv v1");
  CHECK(header.rfind("k,B,k2_over_B,total_opt,total_policy,ratio,method", 0) == 0);
  CHECK(row.rfind("4,6,2.6666667,32,31,", 0) == 0);

  auto a = cli("sweep --k 20,30 --grid 2:4:0.5 --threads 4");
  auto b = cli("sweep --k 20,30 --grid 2:4:0.5 --threads 1");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  auto j = nlohmann::json::parse(cli("--format json sweep --k 20 --grid 2:4:0.5").out);
  for (const auto& rowj : j["rows"]) CHECK(rowj["ratio"].get<double>() >= 1.0);

  // infeasible point is reported in the row, the sweep goes on
  auto bad = cli("sweep --k 10 --grid 50,3");
  REQUIRE(bad.code == 0);
  CHECK(bad.out.find("below k") != std::string::npos);
}

TEST_CASE("bound report and file emission") {
  auto r = cli("bound --k 10 --B 60");
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  for (const char* key : {"k", "B", "opt", "online", "lqd", "ratio_lqd", "ratio_online", "solver"})
    CHECK(j.contains(key));
  CHECK(j["opt"].get<double>() == doctest::Approx(131));
  CHECK(j["ratio_online"].get<double>() <= j["ratio_lqd"].get<double>() + 1e-12);

  auto dir = scratch();
  REQUIRE(cli("bound --k 3 --B 6 --emit-mps " + (dir / "a").string()).code == 0);
  REQUIRE(cli("bound --k 3 --B 6 --emit-mps " + (dir / "b").string()).code == 0);
  for (const char* v : {"any", "online", "lqd"})
    CHECK(slurp(dir / (std::string("a.") + v + ".mps")) == slurp(dir / (std::string("b.") + v + ".mps")));
  fs::remove_all(dir);
}

TEST_CASE("dead-trace columns") {
  auto r = cli("dead-trace --k 4 --B 6 --cycles 2");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("queue,dying_slot,lqd_accepted,lqd_sent_after,lateqd_accepted\n") != std::string::npos);
}

TEST_CASE("exit codes") {
  auto dir = scratch();
  CHECK(cli("").code == 1);
  CHECK(cli("simulate").code == 1);
  CHECK(cli("simulate /nonexistent/file").code == 2);
  auto mixed = write(dir, "mixed.txt", "switch B=4 N=auto\nqueue 1 live=1..2 init=0\narrive t=1 q=2 n=1\n");
  CHECK(cli("simulate " + mixed.string()).code == 2);
  auto staggered = write(dir, "staggered.txt", kStaggered);
  CHECK(cli("simulate " + staggered.string() + " --policy nope").code == 2);
  auto raw = write(dir, "raw.txt", "switch B=4 N=auto\narrive t=1 q=1 n=2\n");
  CHECK(cli("simulate " + raw.string() + " --policy lateqd-aggregate").code == 2);
  CHECK(cli("bound --k 2 --B 1").code == 3);
  CHECK(cli("bound --k 3 --B 6 --solver false").code == 3);
  fs::remove_all(dir);
}
