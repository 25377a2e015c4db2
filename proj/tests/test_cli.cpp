#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cidx/cli.hpp"
#include "support.hpp"

using namespace cidx;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

struct Invocation {
  int code = -1;
  std::string out, err;
};

fs::path scratch() {
  const auto dir = fs::temp_directory_path() / "cidx_cli_tests";
  fs::create_directories(dir);
  return dir;
}

fs::path write_spec(const std::string& name, const std::string& text) {
  const auto p = scratch() / name;
  std::ofstream(p) << text;
  return p;
}

Invocation invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "cidx");
  std::ostringstream out, err;
  Invocation r;
  r.code = cli::main(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

Invocation invoke_spec(const std::string& name, const std::string& text, std::vector<std::string> extra = {}) {
  std::vector<std::string> args = {"--spec", write_spec(name, text).string()};
  args.insert(args.end(), extra.begin(), extra.end());
  return invoke(args);
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("FNV-1a reference values") {
    CHECK(cli::fnv1a64("") == "cbf29ce484222325");
    CHECK(cli::fnv1a64("a") == "af63dc4c8601ec8c");
    CHECK(cli::fnv1a64("foobar") == "85944171f73967e8");
  }

  TEST_CASE("scalar Markov job") {
    const auto r = invoke_spec("scalar.json", R"({"instance": {"kind": "scalar", "dims": [2, 3]},
                                                  "trace": "markov", "analyses": ["markov"]})");
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["report_version"] == 1);
    CHECK(j["status"] == "pass");
    const auto& m = j["results"]["markov"];
    CHECK(m["alpha_exact"] == "13");
    CHECK(m["t_sup_exact"] == json({"2/13", "3/13"}));
    CHECK(m["t_sup"][0].get<double>() == doctest::Approx(2.0 / 13).epsilon(1e-11));
    CHECK(m["closed_form"]["alpha_exact_match"]["pass"] == true);
    CHECK(j["spec_hash"].get<std::string>().rfind("fnv1a64:", 0) == 0);
  }

  TEST_CASE("group lattice and angle job") {
    const auto r = invoke_spec("s3.json", R"({"instance": {"kind": "group_pair", "group": "S3", "subgroup": "trivial"},
                                              "analyses": ["lattice", "angle"]})");
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["results"]["lattice"]["count"] == 6);
    const auto& a = j["results"]["angle"];
    REQUIRE(a["matrix"].size() == 5);
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t k = 0; k < 5; ++k) {
        const double v = a["matrix"][i][k].get<double>();
        if (i == k) {
          CHECK(v == 0.0);
        } else {
          CHECK(v > 0.0);
          CHECK(v <= std::numbers::pi / 2 + 1e-12);
        }
      }
    // <(12)> against S3: cos = 1/sqrt 5
    CHECK(a["matrix"][0][4].get<double>() == doctest::Approx(std::acos(1 / std::sqrt(5.0))).epsilon(1e-11));
  }

  TEST_CASE("spec errors exit 1 without output") {
    const std::vector<std::pair<std::string, std::string>> bad = {
        {"neg.json", R"({"instance": {"kind": "scalar", "dims": [2, -1]}, "analyses": ["markov"]})"},
        {"syntax.json", R"({"instance": )"},
        {"key.json", R"({"instance": {"kind": "scalar", "dims": [2]}, "analyses": ["index"], "colour": 1})"},
        {"analysis.json", R"({"instance": {"kind": "scalar", "dims": [2]}, "analyses": ["spectrum"]})"},
        {"lattice.json", R"({"instance": {"kind": "scalar", "dims": [2]}, "analyses": ["lattice"]})"},
        {"subgroup.json", R"({"instance": {"kind": "group_pair", "group": "S3", "subgroup": [0, 4]}, "analyses": ["index"]})"},
        {"group.json", R"({"instance": {"kind": "group_pair", "group": "A5", "subgroup": "trivial"}, "analyses": ["index"]})"},
        {"weights.json", R"({"instance": {"kind": "scalar", "dims": [1, 2]}, "trace": ["1/2", "1/2"], "analyses": ["index"]})"},
        {"between.json", R"({"instance": {"kind": "scalar", "dims": [2]}, "analyses": ["angle"],
                             "intermediates": [{"name": "B", "generators": [[[1, 0], [0, 1]]]}]})"},
        {"none.json", R"({"instance": {"kind": "scalar", "dims": [2]}})"},
        {"cap.json", R"({"instance": {"kind": "factor_tensor", "k": 3, "m": 3}, "analyses": ["index"]})"},
    };
    for (const auto& [name, text] : bad) {
      CAPTURE(name);
      const auto r = invoke_spec(name, text);
      CHECK(r.code == 1);
      CHECK(r.out.empty());
      CHECK(r.err.find("spec error") != std::string::npos);
    }
    CHECK(invoke({}).code == 1);
    CHECK(invoke({"--spec", (scratch() / "missing.json").string()}).code == 1);
  }

  TEST_CASE("verification failures exit 2 and name the check") {
    // No dense computation reaches a residual of 1e-30.
    const auto r = invoke_spec("tight.json", R"({"instance": {"kind": "scalar", "dims": [3]}, "analyses": ["index"]})",
                               {"--tol", "1e-30"});
    CHECK(r.code == 2);
    const auto j = json::parse(r.out);
    CHECK(j["status"] == "fail");
    CHECK_FALSE(j["failures"].empty());
    CHECK(r.err.find("verification failed: index.") != std::string::npos);
  }

  TEST_CASE("determinism and overrides") {
    const std::string text = R"({"instance": {"kind": "direct_sum", "sub_dims": [1, 1], "lambda": [[1, 1], [1, 0]]},
                                 "analyses": ["index", "commutant", "angle", "meet"], "seed": 5})";
    const auto a = invoke_spec("det.json", text);
    const auto b = invoke_spec("det.json", text);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(json::parse(a.out)["seed"] == 5);

    const auto c = invoke_spec("det.json", text, {"--seed", "9", "--analysis", "index,markov"});
    REQUIRE(c.code == 0);
    const auto j = json::parse(c.out);
    CHECK(j["seed"] == 9);
    CHECK(j["analyses"] == json({"index", "markov"}));
    CHECK(j["results"].contains("markov"));
    CHECK_FALSE(j["results"].contains("angle"));
    // the hash identifies the job document, not the overrides
    CHECK(j["spec_hash"] == json::parse(a.out)["spec_hash"]);
  }

  TEST_CASE("output file and pretty table") {
    const auto out = scratch() / "report.json";
    fs::remove(out);
    const auto r = invoke_spec("pretty.json", R"({"instance": {"kind": "factor_tensor", "k": 1, "m": 2},
                                                  "analyses": ["index"]})",
                               {"--out", out.string(), "--pretty"});
    REQUIRE(r.code == 0);
    std::ifstream f(out);
    const auto j = json::parse(f);
    CHECK(j["results"]["index"]["value"].get<double>() == doctest::Approx(4.0));
    CHECK(r.out.find("index.reconstruction_residual") != std::string::npos);
    CHECK(r.out.find("timings (ms)") != std::string::npos);
    CHECK(r.out.find("status: pass") != std::string::npos);
    // timings stay out of the machine-readable report
    CHECK(j.dump().find("timing") == std::string::npos);
  }

  TEST_CASE("inline instances, explicit weights and named intermediates") {
    const auto r = invoke_spec("inline.json", R"({
      "instance": {"kind": "inline", "label": "C in M2", "sup": {"dims": [2]}, "sub": "scalar"},
      "intermediates": [{"name": "D", "generators": [[[1, 0], [0, 0]]]},
                        {"name": "T", "generators": [[[0, 1], [1, 0]]]}],
      "analyses": ["index", "angle", "meet"]})");
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["instance"]["kind"] == "inline");
    CHECK(j["results"]["index"]["value"].get<double>() == doctest::Approx(4.0));
    // two masas of M2 in general position
    CHECK(j["results"]["angle"]["matrix"][0][1].get<double>() == doctest::Approx(std::numbers::pi / 2));
    CHECK(j["results"]["meet"]["pairs"][0]["meet_rank"] == 1);

    const auto w = invoke_spec("weights.json", R"({"instance": {"kind": "scalar", "dims": [1, 2]},
                                                   "trace": ["1/5", "2/5"], "analyses": ["index"]})");
    REQUIRE(w.code == 0);
    const auto jw = json::parse(w.out);
    CHECK(jw["instance"]["trace"]["exact"] == json({"1/5", "2/5"}));
    // block values n_j / t_j = 5 and 5
    CHECK(jw["results"]["index"]["block_values"] == json({5.0, 5.0}));

    const auto c = invoke_spec("complex.json", R"({
      "instance": {"kind": "inline", "sup": {"size": 2, "generators": [[[[0, 0], [0, -1]], [[0, 1], [0, 0]]]]},
                   "sub": "scalar"},
      "analyses": ["commutant"]})");
    REQUIRE(c.code == 0);
    // sigma_y generates C + C
    CHECK(json::parse(c.out)["results"]["commutant"]["relative_commutant_dim"] == 2);

    const auto g = invoke_spec("sub.json", R"({"instance": {"kind": "group_pair", "group": "Z4", "subgroup": "trivial"},
                                               "intermediates": [{"name": "K", "subgroup": [0, 2]}],
                                               "analyses": ["angle", "lattice"]})");
    REQUIRE(g.code == 0);
    CHECK(json::parse(g.out)["results"]["angle"]["intermediates"] == json({"K"}));
  }

  TEST_CASE("bound and stability sections") {
    const auto r = invoke_spec("m2.json", R"({"instance": {"kind": "scalar", "dims": [2]},
                                              "analyses": ["bound", "stability"], "tensor_m": 2})");
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    const auto& b = j["results"]["bound"];
    CHECK(b["ratio"] == "4");
    CHECK(b["minimal_index"].get<double>() == doctest::Approx(4.0));
    CHECK(b["nine_power"] == "6561");
    CHECK(b["all_checked_hold"] == true);
    const auto& s = j["results"]["stability"];
    CHECK(s["basic_construction"]["distance"]["pass"] == true);
    CHECK(s["index_difference"]["pass"] == true);
  }
}
