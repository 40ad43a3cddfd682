#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "graphann/dataset.hpp"
#include "graphann/graph.hpp"
#include "test_util.hpp"

// Drives the installed binary end to end through std::system. The binary path
// comes in from the build so the test works from any directory.

namespace {

struct Cli {
  testutil::TempDir tmp;

  std::string path(const std::string& leaf) const { return tmp.path(leaf); }

  int run(const std::string& args) {
    std::string cmd = std::string(GRAPHANN_BIN_PATH) + " " + args + " >" + path("stdout.txt") +
                      " 2>" + path("stderr.txt");
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
  }

  std::string out() {
    auto v = testutil::slurp(path("stdout.txt"));
    return {v.begin(), v.end()};
  }
  std::string err() {
    auto v = testutil::slurp(path("stderr.txt"));
    return {v.begin(), v.end()};
  }

  size_t file_size(const std::string& leaf) const {
    return std::filesystem::file_size(path(leaf));
  }
};

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("help and bad invocations") {
  Cli cli;
  CHECK(cli.run("--help") == 0);
  CHECK(cli.run("build --help") == 0);
  CHECK(cli.run("") == 1);         // a subcommand is required
  CHECK(cli.run("bogus") == 1);    // unknown subcommand
  CHECK(cli.run("gen --wat 3") == 1);
}

TEST_CASE("generate, ground truth, build, evaluate") {
  Cli cli;
  std::string base = cli.path("base.fbin");
  std::string queries = cli.path("queries.fbin");
  std::string gt = cli.path("truth.bin");
  std::string idx = cli.path("graph.idx");

  REQUIRE(cli.run("gen --n 400 --dim 8 --clusters 4 --seed 5 --out " + base +
                  " --n-queries 40 --queries-out " + queries) == 0);
  CHECK(cli.file_size("base.fbin") == 8 + size_t{400} * 8 * 4);
  CHECK(cli.file_size("queries.fbin") == 8 + size_t{40} * 8 * 4);

  REQUIRE(cli.run("gt --base " + base + " --queries " + queries + " --k 5 --out " + gt) == 0);
  CHECK(cli.file_size("truth.bin") == 8 + size_t{40} * 5 * 4 * 2);

  REQUIRE(cli.run("build --algo diskann --base " + base + " --out " + idx +
                  " --degree 16 --build-beam 32 --threads 1") == 0);
  CHECK(cli.out().find("algo=diskann n=400") == 0);
  auto g = graphann::load_graph(idx);
  CHECK(g.size() == 400);
  CHECK(g.capacity() == 16);

  std::string csv = cli.path("sweep.csv");
  std::string front = cli.path("front.csv");
  REQUIRE(cli.run("eval --index " + idx + " --base " + base + " --queries " + queries +
                  " --gt " + gt + " --beams 20,40 --ks 5 --epsilons 0,0.1 --threads 1" +
                  " --algorithm diskann --out " + csv + " --pareto " + front) == 0);

  auto text = testutil::slurp(csv);
  std::string body(text.begin(), text.end());
  CHECK(count_lines(body) == 2 + 4);  // comment, header, four sweep points
  CHECK(body.find("# threads=1\n") == 0);
  CHECK(body.find("algorithm,dataset,n,build_seconds,beam,k,epsilon,recall,qps,latency_ms,"
                  "dist_comps\n") != std::string::npos);
  CHECK(body.find("diskann,base,400,") != std::string::npos);

  auto ftext = testutil::slurp(front);
  std::string fbody(ftext.begin(), ftext.end());
  CHECK(count_lines(fbody) >= 3);  // at least one surviving row

  SUBCASE("layered index goes through the same evaluation") {
    std::string hidx = cli.path("layers.idx");
    REQUIRE(cli.run("build --algo hnsw --base " + base + " --out " + hidx +
                    " --m 8 --ef-construction 32 --threads 1") == 0);
    CHECK(cli.run("eval --index " + hidx + " --base " + base + " --queries " + queries +
                  " --gt " + gt + " --beams 20 --ks 5 --threads 1") == 0);
    CHECK(cli.out().find("# threads=1\n") == 0);  // CSV lands on stdout without --out
  }

  SUBCASE("range mode pipeline") {
    std::string rgt = cli.path("range.bin");
    REQUIRE(cli.run("gt --base " + base + " --queries " + queries + " --radius 2.0 --out " +
                    rgt) == 0);
    REQUIRE(cli.run("eval --index " + idx + " --base " + base + " --queries " + queries +
                    " --gt " + rgt + " --beams 20 --threads 1 --out " + csv) == 0);
    auto rtext = testutil::slurp(csv);
    std::string rbody(rtext.begin(), rtext.end());
    // k column is zero in range rows
    CHECK(rbody.find(",20,0,") != std::string::npos);

    CHECK(cli.run("eval --index " + idx + " --base " + base + " --queries " + queries +
                  " --gt " + rgt + " --beams 20 --threads 1 --radius 2.0") == 0);
    CHECK(cli.run("eval --index " + idx + " --base " + base + " --queries " + queries +
                  " --gt " + rgt + " --beams 20 --threads 1 --radius 3.0") == 1);
  }

  SUBCASE("validation failures exit 1") {
    CHECK(cli.run("build --algo vamana --base " + base + " --out " + idx) == 1);
    CHECK(cli.run("gt --base " + base + " --queries " + queries + " --k 5 --radius 1 --out " +
                  gt) == 1);
    CHECK(cli.run("gt --base " + base + " --queries " + queries + " --out " + gt) == 1);
    CHECK(cli.run("eval --index " + idx + " --base " + base + " --queries " + queries +
                  " --gt " + gt + " --beams 50 --ks 50") == 1);  // truth depth is 5

    std::string small = cli.path("small.fbin");
    REQUIRE(cli.run("gen --n 100 --dim 8 --out " + small) == 0);
    CHECK(cli.run("eval --index " + idx + " --base " + small + " --queries " + queries +
                  " --gt " + gt + " --beams 20 --ks 5") == 1);  // size mismatch
  }

  SUBCASE("broken files exit 2") {
    CHECK(cli.run("build --algo diskann --base " + cli.path("nope.fbin") + " --out " + idx) ==
          2);
    CHECK(cli.run("eval --index " + cli.path("nope.idx") + " --base " + base + " --queries " +
                  queries + " --gt " + gt) == 2);

    std::string bad = cli.path("bad.idx");
    std::ofstream(bad, std::ios::binary) << "XXXXjunkjunkjunk";
    CHECK(cli.run("eval --index " + bad + " --base " + base + " --queries " + queries +
                  " --gt " + gt) == 2);

    std::string cut = cli.path("cut.fbin");
    auto bytes = testutil::slurp(base);
    testutil::spit(cut, bytes.data(), bytes.size() / 2);
    CHECK(cli.run("gt --base " + cut + " --queries " + queries + " --k 5 --out " + gt) == 2);
  }
}

TEST_CASE("gen is deterministic in the seed") {
  Cli cli;
  std::string a = cli.path("a.fbin"), b = cli.path("b.fbin"), c = cli.path("c.fbin");
  REQUIRE(cli.run("gen --n 200 --dim 4 --seed 9 --out " + a) == 0);
  REQUIRE(cli.run("gen --n 200 --dim 4 --seed 9 --out " + b) == 0);
  REQUIRE(cli.run("gen --n 200 --dim 4 --seed 10 --out " + c) == 0);
  CHECK(testutil::slurp(a) == testutil::slurp(b));
  CHECK(testutil::slurp(a) != testutil::slurp(c));

  CHECK(cli.run("gen --n 0 --dim 4 --out " + a) == 1);
  CHECK(cli.run("gen --n 10 --dim 4 --out " + a + " --queries-out " + b) == 1);
  CHECK(cli.run("gen --n 10 --dim 4 --out " + a + " --n-queries 5") == 1);
}

TEST_CASE("config file fills in flags and the command line wins") {
  Cli cli;
  std::string base = cli.path("base.fbin");
  REQUIRE(cli.run("gen --n 300 --dim 6 --out " + base) == 0);

  std::string cfg = cli.path("build.cfg");
  {
    std::ofstream f(cfg);
    f << "# small graph for smoke runs\n";
    f << "degree=8\n";
    f << "build-beam=24\n";
  }

  std::string idx = cli.path("cfg.idx");
  REQUIRE(cli.run("build --config " + cfg + " --algo diskann --base " + base + " --out " + idx +
                  " --threads 1") == 0);
  CHECK(graphann::load_graph(idx).capacity() == 8);

  REQUIRE(cli.run("build --config " + cfg + " --algo diskann --base " + base + " --out " + idx +
                  " --degree 12 --threads 1") == 0);
  CHECK(graphann::load_graph(idx).capacity() == 12);

  CHECK(cli.run("build --config " + cli.path("missing.cfg") + " --algo diskann --base " + base +
                " --out " + idx) == 2);

  std::string broken = cli.path("broken.cfg");
  std::ofstream(broken) << "degree\n";  // no value
  CHECK(cli.run("build --config " + broken + " --algo diskann --base " + base + " --out " +
                idx) == 1);
}
