#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <tuple>

#include "geomap/dataset.hpp"
#include "geomap/mapping.hpp"
#include "unit/test_util.hpp"

using namespace geomap;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(GEOMAP_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("gam fit exports the affinity as Matrix Market") {
  testing::TempDir dir("cli_mtx");
  const auto d = dir.path().string();
  REQUIRE(run("dataset synth --classes 2 --dim 4 --per-class 10 --out " + d + "/s.csv") == 0);
  REQUIRE(run("gam fit --data " + d + "/s.csv --v-w 3 --v-b 2 --out " + d + "/m.model --affinity-out " + d +
              "/a.mtx") == 0);
  std::ifstream in(dir / "a.mtx");
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "%%MatrixMarket matrix coordinate integer general");
  REQUIRE(std::getline(in, line));
  std::istringstream size(line);
  int rows = 0, cols = 0, nnz = 0;
  size >> rows >> cols >> nnz;
  CHECK(rows == 20);
  CHECK(cols == 20);
  std::set<std::tuple<int, int, int>> entries;
  int i = 0, j = 0, v = 0;
  while (in >> i >> j >> v) {
    CHECK(i >= 1);
    CHECK(i <= 20);
    CHECK(j >= 1);
    CHECK(j <= 20);
    CHECK(i != j);
    CHECK((v == 1 || v == -1));
    entries.insert({i, j, v});
  }
  CHECK(static_cast<int>(entries.size()) == nnz);
  for (const auto& [a, b, w] : entries) CHECK(entries.count({b, a, w}) == 1);
}

TEST_CASE("dataset convert and gam fit/transform") {
  testing::TempDir dir("cli_flow");
  const auto d = dir.path().string();
  REQUIRE(run("dataset synth --classes 3 --dim 5 --per-class 12 --out " + d + "/s.csv") == 0);
  REQUIRE(run("dataset convert --in " + d + "/s.csv --out " + d + "/s.hsb") == 0);
  REQUIRE(run("dataset convert --in " + d + "/s.hsb --out " + d + "/t.csv") == 0);
  CHECK(testing::read_bytes(dir / "s.csv") == testing::read_bytes(dir / "t.csv"));

  REQUIRE(run("gam fit --data " + d + "/s.hsb --v-w 4 --v-b 4 --dim 3 --seed 5 --out " + d + "/m.model") == 0);
  const auto model = load_model(dir / "m.model");
  CHECK(model.output_dim() == 3);
  CHECK(model.params.seed == 5);
  REQUIRE(run("gam transform --model " + d + "/m.model --data " + d + "/s.csv --out " + d + "/z.csv") == 0);
  const auto z = load_csv(dir / "z.csv");
  const auto s = load_csv(dir / "s.csv");
  CHECK(z.dim() == 3);
  CHECK(z.labels() == s.labels());
  CHECK((z.features() - model.frame.matrix().transpose() * s.features()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("experiment subcommands write reports") {
  testing::TempDir dir("cli_exp");
  const auto d = dir.path().string();
  testing::write_text(dir / "c.cfg",
                      "synthetic.dim = 5\nsynthetic.per_class = 15\ntrials = 1\nsplit.train_per_class = 5\n"
                      "gam.neighbors = 3\nclassifiers = 1nn\nsweep.neighbors = 3\nsweep.train_sizes = 5\n"
                      "dr.methods = pca\ndr.dims = 2\nsweep.dims = 5, 4\n");
  for (const char* which : {"table2", "table1", "fig2", "dr-sweep", "train-sweep"}) {
    CAPTURE(which);
    const std::string out = d + "/" + which;
    REQUIRE(run(std::string("experiment ") + which + " --config " + d + "/c.cfg --out " + out) == 0);
    CHECK(std::filesystem::exists(std::filesystem::path(out) / "cells.csv"));
    CHECK(std::filesystem::exists(std::filesystem::path(out) / "config.echo"));
  }
  CHECK(std::filesystem::exists(dir / "fig2" / "dimension_sweep.csv"));
}

TEST_CASE("exit codes") {
  testing::TempDir dir("cli_codes");
  const auto d = dir.path().string();
  CHECK(run("--help") == 0);
  CHECK(run("experiment nonsense") == 1);
  testing::write_text(dir / "bad.cfg", "no_such_key = 3\n");
  CHECK(run("experiment table2 --config " + d + "/bad.cfg --out " + d + "/o") == 1);
  testing::write_text(dir / "bad.csv", "1,2,1\n1,oops,2\n");
  CHECK(run("gam fit --data " + d + "/bad.csv --out " + d + "/m") == 2);
  CHECK(run("gam fit --data " + d + "/missing.csv --out " + d + "/m") == 2);
  // Squared distances overflow to infinity: the optimizer reports a numerical failure.
  testing::write_text(dir / "huge.csv", "1e200,0,1\n-1e200,1,1\n3e200,0,2\n-2e200,2,2\n");
  CHECK(run("gam fit --data " + d + "/huge.csv --v-w 1 --v-b 1 --out " + d + "/m") == 3);
}
