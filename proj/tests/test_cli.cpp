#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "../tools/cli.hpp"

namespace {

namespace fs = std::filesystem;

const std::string kData = IGKIT_TEST_DATA_DIR;

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  CliRun result;
  result.code = igkit::cli::run_cli(args, out, err);
  result.out = out.str();
  result.err = err.str();
  return result;
}

std::string write_temp(const std::string& name, const std::string& content) {
  fs::path p = fs::temp_directory_path() / name;
  std::ofstream(p, std::ios::binary) << content;
  return p.string();
}

}  // namespace

TEST_CASE("parse echoes the canonical coding") {
  auto r = run({"parse", kData + "/golden.ig"});
  CHECK(r.code == 0);
  CHECK(r.out.find("ID: stylized-regulative") != std::string::npos);
  CHECK(r.out.find("Certified (A,prop) farmers (A) must (D)") != std::string::npos);
  CHECK(r.out.find("ALT: [Appointing authority] (A)") != std::string::npos);
}

TEST_CASE("parse --format tree emits the JSON interchange form") {
  auto r = run({"parse", "--format", "tree", kData + "/producer.ig"});
  CHECK(r.code == 0);
  CHECK(r.out.find("\"schema\": \"igkit-1\"") != std::string::npos);
  CHECK(r.out.find("\"id\": \"producer-living-conditions\"") != std::string::npos);
}

TEST_CASE("parse failures go to stderr with exit 1") {
  std::string path = write_temp("igkit_cli_bad.ig", "Farmers (Q) act.\n");
  auto r = run({"parse", path});
  CHECK(r.code == 1);
  CHECK(r.err.find("UnknownCode") != std::string::npos);
}

TEST_CASE("validate reports per-file summaries") {
  auto r = run({"validate", "--profile", "IG Core+C_Ext", kData + "/core_cext.ig"});
  CHECK(r.code == 0);
  CHECK(r.out.find("3 records") != std::string::npos);
  CHECK(r.out.find("0 errors") != std::string::npos);

  SUBCASE("validation errors set exit 1") {
    std::string path = write_temp("igkit_cli_incomplete.ig", "must (D) report (I).\n");
    auto broken = run({"validate", path});
    CHECK(broken.code == 1);
    CHECK(broken.out.find("MissingAttributes") != std::string::npos);
  }

  SUBCASE("--strict promotes warnings to failure") {
    std::string path = write_temp("igkit_cli_warn.ig",
                                  "Farmers (A;zzz:label) must (D) report (I) data (Bdir) "
                                  "now (Cac) daily (Cex).\n");
    auto lax = run({"validate", path});
    CHECK(lax.code == 0);
    auto strict = run({"validate", "--strict", path});
    CHECK(strict.code == 1);
  }

  SUBCASE("a custom taxonomy silences unknown prefixes") {
    std::string path = write_temp("igkit_cli_custom.ig",
                                  "Farmers (A;actcat:farming) must (D) report (I) data (Bdir) "
                                  "now (Cac) daily (Cex).\n");
    auto without = run({"validate", "--strict", path});
    CHECK(without.code == 1);
    auto with = run({"validate", "--strict", "--taxonomy", kData + "/taxonomy_custom.json", path});
    CHECK(with.code == 0);
  }

  SUBCASE("validate output is byte-stable across runs") {
    auto a = run({"validate", kData + "/golden.ig"});
    auto b = run({"validate", kData + "/golden.ig"});
    CHECK(a.out == b.out);
    CHECK(a.err == b.err);
  }
}

TEST_CASE("decompose prints the expanded statements") {
  auto r = run({"decompose", kData + "/producer.ig"});
  CHECK(r.code == 0);
  CHECK(r.out.find("[AND]") != std::string::npos);
  CHECK(r.out.find("establish (I) year-round") != std::string::npos);
  CHECK(r.out.find("maintain (I) year-round") != std::string::npos);
}

TEST_CASE("project requires and applies a level") {
  auto missing = run({"project", kData + "/golden.ig"});
  CHECK(missing.code == 2);

  auto r = run({"project", "--level", "core", kData + "/golden.ig"});
  CHECK(r.code == 0);
  CHECK(r.out.find(";ctx:") == std::string::npos);  // tags gone at Core
  CHECK(r.out.find(",prop") == std::string::npos);  // property structure folded

  auto ext = run({"project", "--level", "extended", kData + "/golden.ig"});
  CHECK(ext.code == 0);
  CHECK(ext.out.find(",prop") != std::string::npos);

  auto bad = run({"project", "--level", "full", kData + "/golden.ig"});
  CHECK(bad.code == 2);
}

TEST_CASE("flatten lists monitored pairs") {
  auto r = run({"flatten", kData + "/golden.ig"});
  CHECK(r.code == 0);
  CHECK(r.out.find("two-level-orelse") != std::string::npos);
  CHECK(r.out.find("depth=1") != std::string::npos);
  CHECK(r.out.find("depth=2") != std::string::npos);
  CHECK(r.out.find("monitored:") != std::string::npos);
  CHECK(r.out.find("consequential:") != std::string::npos);
}

TEST_CASE("profile expands expressions") {
  auto r = run({"profile", "IG Core--IO"});
  CHECK(r.code == 0);
  CHECK(r.out.find("profile: IG Core-IO") != std::string::npos);
  CHECK(r.out.find("baseline: Core") != std::string::npos);
  CHECK(r.out.find("removed: I O") != std::string::npos);

  auto bad = run({"profile", "IG Full"});
  CHECK(bad.code == 2);
}

TEST_CASE("stats prints the frequency table") {
  auto r = run({"stats", kData + "/golden.ig"});
  CHECK(r.code == 0);
  CHECK(r.out.find("A") != std::string::npos);
  CHECK(r.out.find("ctx:met") != std::string::npos);
  CHECK(r.out.find("polref=") != std::string::npos);
}

TEST_CASE("preprocess prints one sentence per line") {
  auto r = run({"preprocess", kData + "/livestock_raw.txt"});
  CHECK(r.code == 0);
  std::istringstream lines(r.out);
  std::vector<std::string> got;
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty()) got.push_back(line);
  }
  CHECK(got.size() == 3);
}

TEST_CASE("export writes the interchange JSON") {
  auto r = run({"export", kData + "/golden.ig"});
  CHECK(r.code == 0);
  CHECK(r.out.find("\"schema\": \"igkit-1\"") != std::string::npos);

  SUBCASE("--output redirects to a file") {
    fs::path path = fs::temp_directory_path() / "igkit_cli_export.json";
    std::error_code ec;
    fs::remove(path, ec);
    auto f = run({"export", "--output", path.string(), kData + "/golden.ig"});
    CHECK(f.code == 0);
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    CHECK(buf.str() == r.out);
  }
}

TEST_CASE("manifests bundle profile, taxonomies and documents") {
  auto r = run({"validate", "--manifest", kData + "/igkit.toml"});
  CHECK(r.code == 0);
  CHECK(r.out.find("core_cext.ig") != std::string::npos);

  SUBCASE("a broken manifest is a usage error") {
    std::string path = write_temp("igkit_cli_bad.toml", "unknown = x\n");
    auto bad = run({"validate", "--manifest", path});
    CHECK(bad.code == 2);
  }
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"parse", "/nonexistent/path.ig"}).code == 2);
  CHECK(run({"parse", "--bogus-flag", kData + "/golden.ig"}).code == 2);

  SUBCASE("--help is not an error") {
    auto r = run({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("parse") != std::string::npos);
  }
}
