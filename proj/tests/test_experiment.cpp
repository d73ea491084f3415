#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "dilatlab/experiment.hpp"
#include "dilatlab/metric.hpp"

using namespace dilatlab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("dilatlab_test_" + tag)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

std::string good_sample_file(const TempDir& dir, const std::string& name) {
  const std::vector<Point> pts = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  const FiniteSample s(pts, euclidean_oracle(), 0);
  const std::string path = dir.file(name);
  s.save(path);
  return path;
}

}  // namespace

TEST_CASE("config parsing: comments, whitespace, duplicates, bad lines") {
  const ExperimentConfig cfg = ExperimentConfig::parse(
      "# a comment\n"
      "kind = metric\n"
      "\n"
      "  seed=17  \n"
      "tol = 1e-8\n");
  CHECK(cfg.kind() == "metric");
  CHECK(cfg.seed() == 17);
  CHECK(cfg.get_double("tol", 0.0) == doctest::Approx(1e-8));
  CHECK(cfg.get("missing", "fb") == "fb");

  CHECK_THROWS_AS(ExperimentConfig::parse("kind=metric\nkind=gh\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::parse("just a line\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::parse("seed=1\n").kind(),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      ExperimentConfig::parse("kind=metric\ntol=abc\n").get_double("tol", 0),
      std::invalid_argument);
}

TEST_CASE("validation rejects unknown kinds and keys") {
  CHECK_THROWS_AS(ExperimentConfig::parse("kind=frobnicate\n").validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      ExperimentConfig::parse("kind=metric\nbogus=1\n").validate(),
      std::invalid_argument);
  CHECK_NOTHROW(
      ExperimentConfig::parse("kind=metric\nsample_file=x\nseed=1\n")
          .validate());
}

TEST_CASE("metric run: pass, fail and validation exit codes") {
  TempDir dir("metric");
  const std::string good = good_sample_file(dir, "good.txt");

  ExperimentConfig cfg =
      ExperimentConfig::parse("kind=metric\nsample_file=" + good + "\n");
  const RunResult ok = run(cfg, dir.file("out_ok"));
  CHECK(ok.exit_code == 0);
  CHECK(ok.report["schema"] == 1);
  CHECK(ok.report["pass"] == true);
  CHECK(ok.report["checks"][0]["name"] == "metric_axioms");
  CHECK(fs::exists(dir.file("out_ok") + "/report.json"));

  // break the triangle inequality in the stored sample
  FiniteSample bad = FiniteSample::load(good);
  bad.set_dist(0, 3, 100.0);
  bad.save(dir.file("bad.txt"));
  const RunResult fail = run(
      ExperimentConfig::parse("kind=metric\nsample_file=" + dir.file("bad.txt") +
                              "\n"),
      dir.file("out_bad"));
  CHECK(fail.exit_code == 1);
  CHECK(fail.report["pass"] == false);
  CHECK(fail.report["checks"][0]["violations"].get<int>() > 0);

  const RunResult invalid = run(
      ExperimentConfig::parse("kind=metric\nbogus=1\n"), dir.file("out_inv"));
  CHECK(invalid.exit_code == 2);
  CHECK(invalid.report.contains("error"));
}

TEST_CASE("gh run round-trips sample files and reports the breakdown") {
  TempDir dir("gh");
  FiniteSample a(std::vector<Point>{{0.0}, {1.0}}, euclidean_oracle(), 0);
  FiniteSample b(std::vector<Point>{{0.0}, {1.5}}, euclidean_oracle(), 0);
  a.save(dir.file("a.txt"));
  b.save(dir.file("b.txt"));
  const RunResult r = run(
      ExperimentConfig::parse("kind=gh\nmode=exact\na_file=" + dir.file("a.txt") +
                              "\nb_file=" + dir.file("b.txt") + "\n"),
      dir.file("out"));
  CHECK(r.exit_code == 0);
  const auto& check = r.report["checks"][0];
  CHECK(check["name"] == "gh_distance");
  CHECK(check["mu"].get<double>() == doctest::Approx(0.5));
  CHECK(check["upper_bound_only"] == false);
  CHECK(check["breakdown"]["base_pair_present"] == true);

  const RunResult bad_mode = run(
      ExperimentConfig::parse("kind=gh\nmode=fuzzy\na_file=" +
                              dir.file("a.txt") + "\nb_file=" +
                              dir.file("b.txt") + "\n"),
      dir.file("out2"));
  CHECK(bad_mode.exit_code == 2);
}

TEST_CASE("axioms run emits eps,value,residual ladders and rejects junk structures") {
  TempDir dir("axioms");
  const RunResult r = run(
      ExperimentConfig::parse(
          "kind=axioms\nstructure=quadratic:eta=0.1,k=2\n"),
      dir.file("out"));
  CHECK(r.exit_code == 0);
  bool saw_csv = false;
  for (const std::string& f : r.artifacts)
    if (f.size() > 4 && f.substr(f.size() - 4) == ".csv") {
      saw_csv = true;
      const std::string text = slurp(f);
      CHECK(text.substr(0, text.find('\n')) == "eps,value,residual");
    }
  CHECK(saw_csv);

  const RunResult bad = run(
      ExperimentConfig::parse("kind=axioms\nstructure=carnot:step=2\n"),
      dir.file("out2"));
  CHECK(bad.exit_code == 2);
}

TEST_CASE("reruns with the same config are byte identical") {
  TempDir dir("determinism");
  const std::string cfg_text =
      "kind=tempered\nstructure=euclidean:k=2,norm=l2\nseed=5\nkmin=1\nkmax=8\ntail=3\n";
  const RunResult r1 =
      run(ExperimentConfig::parse(cfg_text), dir.file("run1"));
  const RunResult r2 =
      run(ExperimentConfig::parse(cfg_text), dir.file("run2"));
  CHECK(r1.exit_code == 0);
  CHECK(r1.exit_code == r2.exit_code);
  REQUIRE(r1.artifacts.size() == r2.artifacts.size());
  for (std::size_t i = 0; i < r1.artifacts.size(); ++i) {
    const std::string n1 = fs::path(r1.artifacts[i]).filename().string();
    const std::string n2 = fs::path(r2.artifacts[i]).filename().string();
    CHECK(n1 == n2);
    CHECK(slurp(r1.artifacts[i]) == slurp(r2.artifacts[i]));
  }
}

TEST_CASE("report embeds the originating config") {
  TempDir dir("embed");
  const std::string sample = good_sample_file(dir, "s.txt");
  const RunResult r = run(
      ExperimentConfig::parse("kind=metric\nsample_file=" + sample + "\nseed=9\n"),
      dir.file("out"));
  CHECK(r.report["config"]["kind"] == "metric");
  CHECK(r.report["config"]["seed"] == "9");
  // report.json on disk matches the in-memory report
  const std::string disk = slurp(dir.file("out") + "/report.json");
  CHECK(disk == r.report.dump(2) + "\n");
}
