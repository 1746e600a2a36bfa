#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

// Fresh empty directory under the system temp dir, removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& name) : path_(fs::temp_directory_path() / ("linser_cli_" + name)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const fs::path& path() const noexcept { return path_; }

  fs::path write(const std::string& file, const std::string& text) const {
    std::ofstream(path_ / file) << text;
    return path_ / file;
  }

 private:
  fs::path path_;
};

struct RunResult {
  int status = 0;
  std::string out;
  std::string err;
};

RunResult run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int status = linser::cli::run(args, out, err);
  return {status, out.str(), err.str()};
}

Json read_json(const fs::path& p) {
  std::ifstream in(p);
  return Json::parse(in);
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::size_t file_count(const fs::path& dir) {
  return static_cast<std::size_t>(std::distance(fs::directory_iterator(dir), fs::directory_iterator()));
}

const fs::path configs{LINSER_CONFIG_DIR};

}  // namespace

TEST_CASE("kappa of the even-degree series is written to both artifacts") {
  const ScratchDir dir("kappa");
  const auto r = run({"--config", (configs / "kappa_even_degree.json").string(), "--out", dir.path().string(),
                      "--deterministic-names"});
  CHECK(r.status == linser::cli::pass);
  const Json record = read_json(dir.path() / "kappa.json");
  CHECK(record["command"] == "kappa");
  CHECK(record["passed"] == true);
  CHECK(record["results"]["kappa"] == 1);
  CHECK(record["results"]["vol"].get<double>() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(read_text(dir.path() / "kappa.csv").rfind("k,dim\n", 0) == 0);
  CHECK(r.out.find("PASS") != std::string::npos);
  CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("malformed JSON is a usage error and writes nothing") {
  const ScratchDir dir("malformed");
  const auto config = dir.write("bad.json", "{\"command\": \"kappa\", ");
  const fs::path out = dir.path() / "out";
  const auto r = run({"--config", config.string(), "--out", out.string()});
  CHECK(r.status == linser::cli::usage_error);
  CHECK(!fs::exists(out));
  CHECK(r.err.find("usage error") != std::string::npos);
}

TEST_CASE("schema problems are usage errors") {
  const ScratchDir dir("schema");
  const fs::path out = dir.path() / "out";
  for (const char* text : {R"({"series": {"kind": "full"}})", R"({"command": "nonsense"})",
                           R"({"command": "kappa", "series": {"kind": "unknown"}})", "[1, 2]"}) {
    const auto config = dir.write("config.json", text);
    CHECK(run({"--config", config.string(), "--out", out.string()}).status == linser::cli::usage_error);
  }
  CHECK(run({"--config", (dir.path() / "missing.json").string()}).status == linser::cli::usage_error);
  CHECK(!fs::exists(out));
}

TEST_CASE("command-line problems are usage errors and help is not") {
  CHECK(run({}).status == linser::cli::usage_error);
  CHECK(run({"--config"}).status == linser::cli::usage_error);
  CHECK(run({"--config", "x.json", "--kmax", "many"}).status == linser::cli::usage_error);
  const auto help = run({"--help"});
  CHECK(help.status == linser::cli::pass);
  CHECK(help.out.find("--deterministic-names") != std::string::npos);
}

TEST_CASE("a failed assertion gives status one and still writes artifacts") {
  const ScratchDir dir("failing");
  const auto config = dir.write("config.json", R"({"command": "kappa", "series": {"kind": "even_degree"},
                                                 "k_max": 60, "assert": {"kappa": 2}})");
  const auto r = run({"--config", config.string(), "--out", dir.path().string(), "--deterministic-names"});
  CHECK(r.status == linser::cli::numeric_failure);
  CHECK(read_json(dir.path() / "kappa.json")["passed"] == false);
  CHECK(r.out.find("FAIL") != std::string::npos);
}

TEST_CASE("quiet runs print nothing") {
  const ScratchDir dir("quiet");
  const auto r = run({"--config", (configs / "kappa_even_degree.json").string(), "--out", dir.path().string(),
                      "--quiet"});
  CHECK(r.status == linser::cli::pass);
  CHECK(r.out.empty());
  CHECK(file_count(dir.path()) == 2);
}

TEST_CASE("overrides land in the recorded configuration") {
  const ScratchDir dir("overrides");
  const auto r = run({"--config", (configs / "okounkov_monomial.json").string(), "--out", dir.path().string(),
                      "--deterministic-names", "--seed", "42", "--kmax", "30"});
  CHECK(r.status == linser::cli::pass);
  const Json record = read_json(dir.path() / "okounkov.json");
  CHECK(record["config"]["seed"] == 42);
  CHECK(record["config"]["k_max"] == 30);
}

TEST_CASE("seeded runs are bit-for-bit reproducible") {
  const ScratchDir first("repro_a");
  const ScratchDir second("repro_b");
  for (const auto* dir : {&first, &second}) {
    const auto r = run({"--config", (configs / "okounkov_monomial.json").string(), "--out", dir->path().string(),
                        "--deterministic-names", "--seed", "7"});
    REQUIRE(r.status == linser::cli::pass);
  }
  CHECK(read_text(first.path() / "okounkov.json") == read_text(second.path() / "okounkov.json"));
  CHECK(read_text(first.path() / "okounkov.csv") == read_text(second.path() / "okounkov.csv"));
}

TEST_CASE("the default counterexample shows divergence and its pushed-forward rescue") {
  const ScratchDir dir("counterexample");
  const auto r = run({"--config", (configs / "counterexample.json").string(), "--out", dir.path().string(),
                      "--deterministic-names", "--quiet"});
  CHECK(r.status == linser::cli::pass);
  const Json record = read_json(dir.path() / "counterexample.json");
  CHECK(record["passed"] == true);
  CHECK(record["assertions"].size() == 2);
}
