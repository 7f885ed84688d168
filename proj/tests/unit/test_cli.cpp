#include "helpers.hpp"

#include "zombiescope/cli.hpp"

#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <sstream>

using namespace zs;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

// Shuffles the data rows of a file, keeping a CSV header in place.
void permute_lines(const fs::path& src, const fs::path& dst, bool header, std::uint64_t seed) {
  std::istringstream in(zt::slurp(src));
  std::vector<std::string> lines;
  std::string line, head;
  if (header)
    std::getline(in, head);
  while (std::getline(in, line))
    lines.push_back(line);
  std::mt19937_64 rng(seed);
  std::shuffle(lines.begin(), lines.end(), rng);
  std::string text = header ? head + "\n" : "";
  for (const auto& l : lines)
    text += l + "\n";
  zt::write(dst, text);
}

const char* const kEcosystems[][2] = {{"webpki", "certificates.jsonl"},
                                      {"ens_onchain", "ens_claims.jsonl"},
                                      {"ens_gasless", "gasless_txt.jsonl"},
                                      {"maven", "maven_versions.jsonl"}};

// synth output dir -> results dir -> report dir
void full_run(const fs::path& world, const fs::path& results, const fs::path& report, const std::string& as_of) {
  fs::create_directories(results);
  auto inf = cli({"infer", "--obs", (world / "observations.csv").string(), "--rdap", (world / "rdap.jsonl").string(),
                  "--out", (results / "epochs.jsonl").string()});
  REQUIRE_MESSAGE(inf.code == 0, inf.err);
  for (const auto& e : kEcosystems) {
    auto c = cli({"classify", "--epochs", (results / "epochs.jsonl").string(), "--linkages", (world / e[1]).string(),
                  "--ecosystem", e[0], "--as-of", as_of, "--out",
                  (results / ("verdicts_" + std::string(e[0]) + ".jsonl")).string()});
    REQUIRE_MESSAGE(c.code == 0, c.err);
  }
  fs::copy_file(world / "serving.csv", results / "serving.csv", fs::copy_options::overwrite_existing);
  auto r = cli({"report", "--in", results.string(), "--out", report.string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
}

} // namespace

TEST_CASE("exit codes") {
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"--help"}).code == kExitOk);
  CHECK(cli({"frobnicate"}).code == kExitUsage);
  CHECK(cli({"infer", "--obs"}).code == kExitUsage);

  zt::TempDir tmp("cli-codes");
  zt::write(tmp / "obs.csv", "domain,date,source\na.com,2024-01-01,zone\n");
  auto zero = cli({"infer", "--obs", (tmp / "obs.csv").string(), "--gap-threshold", "0", "--out",
                   (tmp / "e.jsonl").string()});
  CHECK(zero.code == kExitUsage);
  CHECK_FALSE(zero.err.empty());
  CHECK_FALSE(fs::exists(tmp / "e.jsonl"));

  CHECK(cli({"report", "--in", (tmp / "nowhere").string(), "--out", (tmp / "r").string()}).code == kExitDataError);

  zt::write(tmp / "bad.csv", "domain,date,source\na.com,2024-13-01,zone\n");
  auto bad = cli({"infer", "--obs", (tmp / "bad.csv").string(), "--out", (tmp / "e.jsonl").string()});
  CHECK(bad.code == kExitDataError);
  CHECK(bad.err.find("bad.csv:2") != std::string::npos);

  zt::write(tmp / "bad.conf", "gap = 3\n");
  CHECK(cli({"infer", "--obs", (tmp / "obs.csv").string(), "--config", (tmp / "bad.conf").string(), "--out",
             (tmp / "e.jsonl").string()})
            .code == kExitUsage);
}

TEST_CASE("manifest echoes the effective configuration, flags over file") {
  zt::TempDir tmp("cli-manifest");
  REQUIRE(cli({"synth", "--seed", "3", "--domains", "20", "--out", (tmp / "w").string()}).code == 0);
  zt::write(tmp / "r.conf", "gap_threshold = 60\ngrace = 4\n");
  const auto out = (tmp / "e.jsonl").string();
  auto r = cli({"infer", "--obs", (tmp / "w" / "observations.csv").string(), "--config", (tmp / "r.conf").string(),
                "--gap-threshold", "70", "--out", out});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  auto m = nlohmann::json::parse(zt::slurp(out + ".manifest.json"));
  const auto& cfg = m.at("config");
  CHECK(cfg.at("command") == "infer");
  CHECK(cfg.at("config").at("file").at("values").at("gap_threshold") == 60);
  CHECK(cfg.at("config").at("effective").at("gap_threshold") == 70);
  CHECK(cfg.at("config").at("effective").at("grace") == 4);
  REQUIRE(cfg.at("inputs").size() == 2);
  CHECK(cfg.at("inputs")[0].at("sha256").get<std::string>().size() == 64);
  CHECK(m.at("files")[0].at("sha256").get<std::string>().size() == 64);
}

TEST_CASE("permuted inputs give byte-identical reports") {
  zt::TempDir tmp("cli-perm");
  REQUIRE(cli({"synth", "--seed", "17", "--domains", "120", "--out", (tmp / "w").string()}).code == 0);

  fs::create_directories(tmp / "p");
  permute_lines(tmp / "w" / "observations.csv", tmp / "p" / "observations.csv", true, 1);
  permute_lines(tmp / "w" / "rdap.jsonl", tmp / "p" / "rdap.jsonl", false, 2);
  permute_lines(tmp / "w" / "serving.csv", tmp / "p" / "serving.csv", true, 3);
  for (const auto& e : kEcosystems)
    permute_lines(tmp / "w" / e[1], tmp / "p" / e[1], false, 4);

  full_run(tmp / "w", tmp / "ra", tmp / "a", "2023-06-30");
  full_run(tmp / "p", tmp / "rb", tmp / "b", "2023-06-30");

  std::size_t compared = 0;
  CHECK(zt::slurp(tmp / "ra" / "epochs.jsonl") == zt::slurp(tmp / "rb" / "epochs.jsonl"));
  for (const auto& entry : fs::directory_iterator(tmp / "a")) {
    const auto name = entry.path().filename().string();
    if (name == "manifest.json")
      continue; // input digests differ by construction
    INFO(name);
    CHECK(zt::slurp(entry.path()) == zt::slurp(tmp / "b" / name));
    ++compared;
  }
  CHECK(compared >= 10);
}

TEST_CASE("output directory falls back to the environment") {
  zt::TempDir tmp("cli-env");
  ::setenv("ZOMBIESCOPE_OUT_DIR", (tmp / "env").string().c_str(), 1);
  auto r = cli({"synth", "--seed", "1", "--domains", "5"});
  ::unsetenv("ZOMBIESCOPE_OUT_DIR");
  CHECK(r.code == 0);
  CHECK(fs::exists(tmp / "env" / "observations.csv"));
}

TEST_CASE("stats subcommands read plain files") {
  zt::TempDir tmp("cli-stats");
  zt::write(tmp / "s.csv", "time,event\n1,1\n2,0\n3,1\n");
  auto km = cli({"stats", "km", "--input", (tmp / "s.csv").string()});
  CHECK(km.code == 0);
  CHECK(km.out.find("\n1,0.6666666666666667,3,1,0\n") != std::string::npos);
  CHECK(km.out.find("\n3,0,1,1,0\n") != std::string::npos);

  zt::write(tmp / "a.txt", "1\n2\n3\n");
  zt::write(tmp / "b.txt", "4\n5\n6\n");
  auto mwu = cli({"stats", "mwu", "--a", (tmp / "a.txt").string(), "--b", (tmp / "b.txt").string()});
  CHECK(mwu.code == 0);
  auto j = nlohmann::json::parse(mwu.out);
  CHECK(j.at("p_two_sided").get<double>() == doctest::Approx(0.1));

  CHECK(cli({"stats", "mwu", "--a", (tmp / "a.txt").string(), "--b", (tmp / "b.txt").string(), "--method", "magic"})
            .code == kExitUsage);
}
