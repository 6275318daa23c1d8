// Instance parsing/serialization, report schema, and end-to-end driver runs
// against the bundled examples and their golden reports.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "strata/examples.hpp"
#include "strata/instance.hpp"
#include "strata/report.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace strata;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = STRATA_SOURCE_DIR;
const std::string kCli = STRATA_CLI_PATH;

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "strata_cli_tests";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
  REQUIRE(out.good());
}

struct CliRun {
  int exit_code = -1;
  std::string out, err;
};

CliRun run_cli(const std::string& args) {
  const fs::path out = temp_dir() / "stdout.txt";
  const fs::path err = temp_dir() / "stderr.txt";
  const std::string cmd =
      kCli + " " + args + " > " + out.string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  CliRun r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string instance_path(const std::string& name) {
  return (kSource / "instances" / (name + ".strata")).string();
}

std::string golden(const std::string& name) {
  return slurp(kSource / "tests" / "golden" / name);
}

// The stable rendering of a structured CLI report: parsed, timings stripped,
// re-rendered.  Golden files store exactly this form.
std::string stable_bytes(const std::string& structured_stdout) {
  return render_structured(stable_view(Json::parse(structured_stdout)));
}

void check_throws_with(const std::string& text, const std::string& needle) {
  try {
    (void)parse_instance(text);
    FAIL("expected InputError for: ", text);
  } catch (const InputError& e) {
    const std::string what = e.what();
    INFO("diagnostic: ", what);
    CHECK(what.find(needle) != std::string::npos);
  }
}

const char* kTinyLoop =
    "field 101\n"
    "vertices 1\n"
    "arrow t 0 0\n"
    "relation 1 t t\n";

}  // namespace

TEST_CASE("bundled instance texts round-trip and match the shipped files") {
  REQUIRE(bundled_examples().size() == 3);
  std::vector<std::string> names;
  for (const auto& ex : bundled_examples()) {
    names.push_back(ex.name);
    const Instance inst = parse_instance(ex.text);
    CHECK(inst.name == ex.name);
    CHECK(serialize_instance(inst) == ex.text);
    // Shipped instance files are locked to the bundled texts.
    CHECK(slurp(kSource / "instances" / (ex.name + ".strata")) == ex.text);
    // Re-parsing the canonical form is the identity on canonical forms.
    CHECK(serialize_instance(parse_instance(serialize_instance(inst))) == ex.text);
  }
  CHECK(names == std::vector<std::string>{"a3-5.3", "kronecker-2.2", "loop"});
  CHECK(find_bundled_example("a3-5.3") != nullptr);
  CHECK(find_bundled_example("nope") == nullptr);
}

TEST_CASE("non-canonical input normalizes to a serialization fixpoint") {
  const std::string messy =
      "# comment line\n"
      "  field   101\n"
      "vertices 2\n\n"
      "arrow a 0 1   # trailing comment\n"
      "module M\n"
      "dims 1 1\n"
      "mat a 1 1 0\n"  // explicit zero matrix: dropped by the serializer
      "end\n"
      "family psi M\n";
  const std::string canon = serialize_instance(parse_instance(messy));
  CHECK(canon == serialize_instance(parse_instance(canon)));
  CHECK(canon.find("mat") == std::string::npos);
  CHECK(canon.find("budget 1000000") != std::string::npos);
}

TEST_CASE("rational literals materialize in the effective field") {
  const std::string text =
      "field 101\n"
      "vertices 1\n"
      "arrow t 0 0\n"
      "relation 1 t t\n"
      "module M\n"
      "dims 2\n"
      "mat t 2 2 0 1/2 0 0\n"
      "end\n";
  const Instance over_fp = parse_instance(text);
  CHECK(over_fp.module("M").action[0].at(0, 1) ==
        Scalar::of_int(Field::fp(101), 51));
  const Instance over_q = parse_instance(text, Field::rationals());
  CHECK(over_q.field == Field::rationals());
  CHECK(over_q.module("M").action[0].at(0, 1) ==
        Scalar::of_rational(Field::rationals(), Rational(1, 2)));
  CHECK(serialize_instance(over_q).find("field rationals") != std::string::npos);
  // 1/101 has no meaning over F_101 but is fine over the rationals.
  const std::string bad = std::string(kTinyLoop) +
                          "module N\ndims 2\nmat t 2 2 0 1/101 0 0\nend\n";
  check_throws_with(bad, "not defined over F_101");
  CHECK(parse_instance(bad, Field::rationals()).module("N").dims ==
        std::vector<std::size_t>{2});
}

TEST_CASE("parser diagnostics name the line, module, and relation") {
  check_throws_with("vertices 1\n", "missing 'field'");
  check_throws_with("field 101\n", "missing 'vertices'");
  check_throws_with("field 6\nvertices 1\n", "must be prime");
  check_throws_with("field 101\nvertices 0\n", "at least one vertex");
  check_throws_with("field 101\narrow a 0 0\n", "declare 'vertices' before");
  check_throws_with("field 101\nvertices 1\narrow a 0 2\n", "outside 0..0");
  check_throws_with("field 101\nvertices 1\narrow a 0 0\narrow a 0 0\n",
                    "duplicate arrow label");
  check_throws_with("field 101\nvertices 1\nbogus 3\n", "unknown directive 'bogus'");
  check_throws_with("field 101\nvertices 1\narrow t 0 0\nmodule M\ndims 1\n",
                    "missing its 'end'");
  check_throws_with("field 101\nvertices 2\narrow a 0 1\nmodule M\ndims 1\nend\n",
                    "declares 1 dimensions but the quiver has 2");
  check_throws_with(
      "field 101\nvertices 2\narrow a 0 1\nmodule M\ndims 1 1\nmat a 2 3 1 2 3 4 5 6\nend\n",
      "declared shape 2x3 but the dimension vector requires 1x1");
  check_throws_with(
      "field 101\nvertices 2\narrow a 0 1\nmodule M\ndims 1 1\nmat a 1 1 1 7\nend\n",
      "expected 1 entries, got 2");
  check_throws_with(
      "field 101\nvertices 2\narrow a 0 1\nmodule M\ndims 1 1\nmat z 1 1 1\nend\n",
      "unknown arrow label 'z'");
  check_throws_with(std::string(kTinyLoop) +
                        "module M\ndims 1\nend\nmodule M\ndims 1\nend\n",
                    "duplicate module name");
  check_throws_with("field 101\nvertices 1\nfamily psi X\n",
                    "references undeclared module 'X'");
  check_throws_with("field 101\nvertices 1\nfamily zeta X\n",
                    "family slot must be 'psi', 'q', or 'theta'");
  check_throws_with("field 101\nvertices 1\norder 0 2\n", "permutation of 0..1");
  check_throws_with("field 101\nvertices 2\narrow a 0 1\nrelation 1 a a\n",
                    "not composable");
  check_throws_with("field 101\nvertices 1\narrow t 0 0\nrelation 1/0 t t\n",
                    "denominator zero");
  check_throws_with("field 101\nvertices 1\narrow t 0 0\ncap 0\n", "cap must be positive");

  // The relation check names both the module and the offending relation.
  const std::string bad_rel = std::string(kTinyLoop) +
                              "module Bad\ndims 2\nmat t 2 2 0 1 1 0\nend\n";
  check_throws_with(bad_rel, "module 'Bad' does not satisfy relation 1 (t*t)");
  check_throws_with(bad_rel, "line 5");
}

TEST_CASE("declared order is checked against the family size in use") {
  const std::string text = std::string(kTinyLoop) +
                           "module M\ndims 1\nend\nfamily psi M\norder 0 1\n";
  const Instance inst = parse_instance(text);
  CHECK_THROWS_AS((void)inst.order_for(1), InputError);
  CHECK(inst.order_for(2).order == std::vector<std::size_t>{0, 1});
  const Instance no_order = parse_instance(std::string(kTinyLoop) + "module M\ndims 1\nend\n");
  CHECK(no_order.order_for(3).order == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("driver: verification commands succeed on the a3 instance") {
  const std::string a3 = instance_path("a3-5.3");
  CHECK(run_cli("verify-pcs " + a3).exit_code == 0);
  CHECK(run_cli("verify-ess " + a3).exit_code == 0);
  CHECK(run_cli("ess-from-pcs " + a3).exit_code == 0);
  CHECK(run_cli("pcs-from-ess " + a3).exit_code == 0);
  CHECK(run_cli("char-tilting " + a3).exit_code == 0);
  CHECK(run_cli("check-ss " + a3).exit_code == 0);
  CHECK(run_cli("verify-pcs " + a3 + " --field rationals").exit_code == 0);
}

TEST_CASE("driver: human strat-modules output matches its golden file") {
  const CliRun r = run_cli("strat-modules " + instance_path("a3-5.3"));
  CHECK(r.exit_code == 0);
  CHECK(r.out == golden("strat-modules-a3.txt"));
  // Standard modules over the opposite endomorphism presentation, in order.
  const auto d0 = r.out.find("Delta(0) dims (1,0,1)");
  const auto d1 = r.out.find("Delta(1) dims (0,1,0)");
  const auto d2 = r.out.find("Delta(2) dims (0,0,1)");
  REQUIRE(d0 != std::string::npos);
  REQUIRE(d1 != std::string::npos);
  REQUIRE(d2 != std::string::npos);
  CHECK(d0 < d1);
  CHECK(d1 < d2);
  CHECK(r.out.find("dim 5") != std::string::npos);
}

TEST_CASE("driver: base-algebra strat-modules honors the --order flag") {
  const fs::path plain = temp_dir() / "plain-a3.strata";
  spit(plain, "field 101\nvertices 3\narrow a 0 1\narrow b 1 2\n");
  const CliRun natural = run_cli("strat-modules " + plain.string());
  CHECK(natural.exit_code == 0);
  CHECK(natural.out.find("Delta(0) dims (1,0,0)") != std::string::npos);
  CHECK(natural.out.find("algebra of the instance, dim 6") != std::string::npos);
  const CliRun reversed = run_cli("strat-modules " + plain.string() + " --order 2,1,0");
  CHECK(reversed.exit_code == 0);
  CHECK(reversed.out.find("Delta(0) dims (1,1,1)") != std::string::npos);
  CHECK(reversed.out.find("Delta(1) dims (0,1,1)") != std::string::npos);
  CHECK(run_cli("check-ss " + plain.string()).exit_code == 0);
}

TEST_CASE("driver: structured reports re-parse and carry the documented keys") {
  const CliRun r = run_cli("verify-pcs " + instance_path("a3-5.3") + " --format structured");
  CHECK(r.exit_code == 0);
  const Json doc = Json::parse(r.out);  // throws on malformed output
  for (const char* key : {"command", "config", "exit", "result", "timings_ms"})
    CHECK(doc.contains(key));
  CHECK(doc["command"] == "verify-pcs");
  CHECK(doc["exit"] == 0);
  CHECK(doc["config"]["field"] == "F_101");
  CHECK(doc["config"]["budget"] == 1000000);
  CHECK(doc["config"]["order"] == Json::array({0, 1, 2}));
  CHECK(doc["timings_ms"]["total_ms"].get<double>() >= 0.0);
  CHECK(doc["result"]["passed"] == true);
  CHECK(doc["result"]["kind"] == "pcs");
}

TEST_CASE("driver: flags override the instance limits and are echoed") {
  const CliRun r = run_cli("verify-ppcs " + instance_path("kronecker-2.2") +
                           " --seed 7 --budget 5000 --cap 4 --format structured");
  CHECK(r.exit_code == 0);
  const Json doc = Json::parse(r.out);
  CHECK(doc["config"]["seed"] == 7);
  CHECK(doc["config"]["budget"] == 5000);
  CHECK(doc["config"]["cap"] == 4);
}

TEST_CASE("driver: construct-q divergence trace is capped and increasing") {
  const CliRun r = run_cli("construct-q " + instance_path("kronecker-2.2") +
                           " --format structured");
  CHECK(r.exit_code == 2);
  const Json doc = Json::parse(r.out);
  CHECK(doc["result"]["constructed"] == false);
  CHECK(doc["result"]["verdict"] == "undecided");
  const Json& chain = doc["result"]["divergence"]["dims"];
  REQUIRE(chain.size() == 10);  // the bundled instance caps the chain at 10
  std::size_t prev = 0;
  for (const auto& dims : chain) {
    std::size_t total = 0;
    for (const auto& d : dims) total += d.get<std::size_t>();
    CHECK(total > prev);
    prev = total;
  }
}

TEST_CASE("driver: bundled examples reproduce their golden reports") {
  const auto t0 = std::chrono::steady_clock::now();
  const CliRun a3 = run_cli("example a3-5.3 --format structured");
  CHECK(a3.exit_code == 0);
  CHECK(stable_bytes(a3.out) == golden("example-a3-5.3.json"));

  const CliRun kron = run_cli("example kronecker-2.2 --cap 10 --format structured");
  CHECK(kron.exit_code == 2);
  CHECK(stable_bytes(kron.out) == golden("example-kronecker-2.2.json"));

  const CliRun loop = run_cli("example loop --format structured");
  CHECK(loop.exit_code == 1);
  CHECK(stable_bytes(loop.out) == golden("example-loop.json"));
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 90.0);  // all three examples together, well under 30s each
}

TEST_CASE("driver: reports are byte-reproducible apart from timings") {
  const std::string args = "example a3-5.3 --format structured";
  const CliRun first = run_cli(args);
  const CliRun second = run_cli(args);
  CHECK(first.exit_code == 0);
  CHECK(second.exit_code == 0);
  CHECK(stable_bytes(first.out) == stable_bytes(second.out));

  // Re-running with the configuration echoed in a report reproduces it.
  const CliRun base = run_cli("verify-pcs " + instance_path("a3-5.3") + " --format structured");
  const Json cfg = Json::parse(base.out)["config"];
  std::string order;
  for (const auto& i : cfg["order"]) order += (order.empty() ? "" : ",") + i.dump();
  std::ostringstream again;
  again << "verify-pcs " << instance_path("a3-5.3") << " --format "
        << cfg["format"].get<std::string>() << " --budget " << cfg["budget"]
        << " --cap " << cfg["cap"] << " --seed " << cfg["seed"] << " --order " << order;
  const CliRun redo = run_cli(again.str());
  CHECK(redo.exit_code == base.exit_code);
  CHECK(stable_bytes(redo.out) == stable_bytes(base.out));
}

TEST_CASE("driver: failure and input-error exit codes") {
  const std::string loop = instance_path("loop");
  CHECK(run_cli("ess-from-pcs " + loop).exit_code == 1);
  CHECK(run_cli("char-tilting " + loop).exit_code == 1);
  CHECK(run_cli("verify-pcs " + loop).exit_code == 0);

  CHECK(run_cli("verify-pcs /nonexistent.strata").exit_code == 3);
  CHECK(run_cli("example unknown-example").exit_code == 3);
  CHECK(run_cli("verify-pcs " + loop + " --format xml").exit_code == 3);
  CHECK(run_cli("verify-pcs " + loop + " --field 6").exit_code == 3);
  CHECK(run_cli("verify-pcs " + loop + " --order 0,0,1").exit_code == 3);

  const CliRun unknown = run_cli("frobnicate " + loop);
  CHECK(unknown.exit_code == 3);
  CHECK(unknown.err.find("Usage") != std::string::npos);

  // Missing required family: the a3 instance has no module list for 'psi'
  // once families are stripped.
  const fs::path no_family = temp_dir() / "no-family.strata";
  spit(no_family, "field 101\nvertices 1\narrow t 0 0\nrelation 1 t t\n");
  const CliRun miss = run_cli("verify-ppcs " + no_family.string());
  CHECK(miss.exit_code == 3);
  CHECK(miss.err.find("psi") != std::string::npos);

  const fs::path bad_rel = temp_dir() / "bad-rel.strata";
  spit(bad_rel,
       "field 101\nvertices 1\narrow t 0 0\nrelation 1 t t\n"
       "module Bad\ndims 2\nmat t 2 2 0 1 1 0\nend\nfamily psi Bad\n");
  const CliRun rel = run_cli("verify-ppcs " + bad_rel.string());
  CHECK(rel.exit_code == 3);
  CHECK(rel.err.find("module 'Bad' does not satisfy relation 1 (t*t)") != std::string::npos);
}
