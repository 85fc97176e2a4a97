#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

// Exercises the installed binary end to end.  The path comes from the
// PLMM_CLI environment variable, set by the test harness.

namespace {

std::string cli_path() {
    const char* p = std::getenv("PLMM_CLI");
    REQUIRE(p != nullptr);
    return p;
}

std::string temp_dir() {
    char tmpl[] = "/tmp/plmm_cli_XXXXXX";
    REQUIRE(mkdtemp(tmpl) != nullptr);
    return tmpl;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    REQUIRE(out.good());
    out << text;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

RunResult run(const std::string& args, const std::string& stdin_path = "/dev/null") {
    static int counter = 0;
    const std::string base = "/tmp/plmm_cli_io_" + std::to_string(counter++);
    const std::string cmd = cli_path() + " " + args + " < " + stdin_path + " > " + base +
                            ".out 2> " + base + ".err";
    const int st = std::system(cmd.c_str());
    REQUIRE(st != -1);
    REQUIRE(WIFEXITED(st));
    RunResult r;
    r.exit_code = WEXITSTATUS(st);
    r.out = read_file(base + ".out");
    r.err = read_file(base + ".err");
    return r;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) out.push_back(line);
    return out;
}

std::vector<std::string> fields_of(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) out.push_back(f);
    return out;
}

double num(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

const char* kSpec = R"({"schema_version": "1", "seed": 7, "root": {}})";

const char* kIrrationalSpec = R"({
  "schema_version": "1",
  "root": {
    "children": [
      {"scale": 0.3, "anchor": {"optimum": 1}, "node": {}}
    ]
  }
})";

} // namespace

TEST_CASE("help and argument errors") {
    CHECK(run("--help").exit_code == 0);
    CHECK(run("--help").out.find("generate") != std::string::npos);

    CHECK(run("frobnicate").exit_code == 2);           // unknown subcommand
    CHECK(run("evaluate --no-such-flag").exit_code == 2);
    CHECK(run("generate --out /tmp/x").exit_code == 2); // --spec is required
    CHECK(run("evaluate").exit_code == 2);              // needs --spec or --artifact
    CHECK(run("slice --z 0 --out /tmp/x.csv").exit_code == 2);

    const std::string dir = temp_dir();
    write_file(dir + "/s.json", kSpec);
    // --spec and --artifact are mutually exclusive
    CHECK(run("evaluate --spec " + dir + "/s.json --artifact " + dir).exit_code == 2);
    // a spacing override only makes sense with a spec
    CHECK(run("evaluate --artifact " + dir + " --spacing-override 1,1,1").exit_code == 2);
}

TEST_CASE("exit codes distinguish parse, validation and runtime failures") {
    const std::string dir = temp_dir();
    write_file(dir + "/bad.json", "{");
    write_file(dir + "/irrational.json", kIrrationalSpec);

    CHECK(run("generate --spec " + dir + "/bad.json --out " + dir + "/a").exit_code == 2);
    CHECK(run("generate --spec " + dir + "/irrational.json --out " + dir + "/a").exit_code == 3);
    CHECK(run("generate --spec " + dir + "/missing.json --out " + dir + "/a").exit_code == 4);

    const auto r = run("generate --spec " + dir + "/bad.json --out " + dir + "/a");
    CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("generate writes a deterministic artifact bundle") {
    const std::string dir = temp_dir();
    write_file(dir + "/s.json", kSpec);

    REQUIRE(run("generate --spec " + dir + "/s.json --out " + dir + "/a1").exit_code == 0);
    REQUIRE(run("generate --spec " + dir + "/s.json --out " + dir + "/a2").exit_code == 0);

    for (const char* name : {"mesh.csv", "values.csv", "metadata.json"}) {
        const std::string f1 = read_file(dir + "/a1/" + name);
        CHECK(!f1.empty());
        CHECK(f1 == read_file(dir + "/a2/" + name));
    }

    const auto meta = nlohmann::json::parse(read_file(dir + "/a1/metadata.json"));
    CHECK(meta.at("vertex_count") == 76);
    CHECK(meta.at("tet_count") == 192);
    CHECK(meta.at("refinement") == 1);

    // a tampered bundle is rejected as inconsistent
    auto broken = meta;
    broken["vertex_count"] = 77;
    write_file(dir + "/a1/metadata.json", broken.dump(2) + "\n");
    CHECK(run("evaluate --artifact " + dir + "/a1 --points " + dir + "/none.csv").exit_code == 3);
}

TEST_CASE("generate honours a spacing override") {
    const std::string dir = temp_dir();
    write_file(dir + "/s.json", kSpec);

    REQUIRE(run("generate --spec " + dir + "/s.json --spacing-override 0.5,0.5,0.5 --out " +
                dir + "/a")
                .exit_code == 0);
    const auto meta = nlohmann::json::parse(read_file(dir + "/a/metadata.json"));
    CHECK(meta.at("spec").at("spacing") == nlohmann::json::array({0.5, 0.5, 0.5}));
    CHECK(meta.at("vertex_count").get<int>() > 76);

    CHECK(run("generate --spec " + dir + "/s.json --spacing-override 0.5,0.5 --out " + dir +
              "/b")
              .exit_code == 2);
}

TEST_CASE("evaluate reads points from stdin and reports domain status") {
    const std::string dir = temp_dir();
    write_file(dir + "/s.json", kSpec);
    write_file(dir + "/pts.csv", "x,y,z\n1,0,0\n-1,0,0\n3,0,0.5\n");

    const auto r = run("evaluate --spec " + dir + "/s.json", dir + "/pts.csv");
    REQUIRE(r.exit_code == 0);
    const auto ls = lines_of(r.out);
    REQUIRE(ls.size() == 4);
    CHECK(ls[0] == "x,y,z,f1,f2,status");

    const auto row1 = fields_of(ls[1]);
    REQUIRE(row1.size() == 6);
    CHECK(num(row1[3]) == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(num(row1[4]) == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(row1[5] == "0");

    const auto row2 = fields_of(ls[2]);
    CHECK(std::isnan(num(row2[3])));
    CHECK(std::isnan(num(row2[4])));
    CHECK(row2[5] == "1");

    constexpr double k = 0.70710678118654752440;
    const auto row3 = fields_of(ls[3]);
    CHECK(num(row3[3]) == doctest::Approx((0.5 + 1.25) * k).epsilon(1e-13));
    CHECK(num(row3[4]) == doctest::Approx((1.25 - 0.5) * k).epsilon(1e-13));
    CHECK(row3[5] == "0");

    // headerless input works too, and --points names a file directly
    write_file(dir + "/bare.csv", "1,0,0\n");
    const auto r2 = run("evaluate --spec " + dir + "/s.json --points " + dir + "/bare.csv");
    REQUIRE(r2.exit_code == 0);
    CHECK(lines_of(r2.out).size() == 2);

    write_file(dir + "/junk.csv", "1,0\n");
    CHECK(run("evaluate --spec " + dir + "/s.json --points " + dir + "/junk.csv").exit_code == 2);
}

TEST_CASE("evaluate --raw-psi adds the pre-transform columns") {
    const std::string dir = temp_dir();
    write_file(dir + "/s.json", kSpec);
    write_file(dir + "/pts.csv", "3,0,0.5\n");

    const auto r = run("evaluate --spec " + dir + "/s.json --raw-psi --out " + dir + "/e.csv",
                       dir + "/pts.csv");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.empty());

    const auto ls = lines_of(read_file(dir + "/e.csv"));
    REQUIRE(ls.size() == 2);
    CHECK(ls[0] == "x,y,z,psi1,psi2,f1,f2,status");
    const auto row = fields_of(ls[1]);
    REQUIRE(row.size() == 8);
    CHECK(num(row[3]) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(num(row[4]) == doctest::Approx(1.25).epsilon(1e-13));
}

TEST_CASE("evaluate from an artifact matches evaluate from its spec") {
    const std::string dir = temp_dir();
    write_file(dir + "/s.json", kSpec);
    write_file(dir + "/pts.csv", "1,0,0\n2,0.5,0.25\n3.25,0,0\n");
    REQUIRE(run("generate --spec " + dir + "/s.json --out " + dir + "/a").exit_code == 0);

    const auto from_spec =
        run("evaluate --spec " + dir + "/s.json --points " + dir + "/pts.csv");
    const auto from_art = run("evaluate --artifact " + dir + "/a --points " + dir + "/pts.csv");
    REQUIRE(from_spec.exit_code == 0);
    REQUIRE(from_art.exit_code == 0);
    CHECK(from_spec.out == from_art.out);
    CHECK(!from_spec.out.empty());
}

TEST_CASE("slice exports a cross-section and rejects heights outside the box") {
    const std::string dir = temp_dir();
    write_file(dir + "/s.json", kSpec);

    REQUIRE(run("slice --spec " + dir + "/s.json --z 0.5 --out " + dir + "/mid.csv").exit_code ==
            0);
    const auto mid = lines_of(read_file(dir + "/mid.csv"));
    CHECK(mid.size() == 1 + 30 + 15); // header, vertex rows, edge crossings
    CHECK(mid[0] == "x,y,z,source,psi1,psi2,f1,f2");

    REQUIRE(run("slice --spec " + dir + "/s.json --z 0 --out " + dir + "/bot.csv").exit_code == 0);
    CHECK(lines_of(read_file(dir + "/bot.csv")).size() == 1 + 23);

    CHECK(run("slice --spec " + dir + "/s.json --z 1.5 --out " + dir + "/no.csv").exit_code == 4);
}

TEST_CASE("analyze prints the summary line and writes the tables") {
    const std::string dir = temp_dir();
    write_file(dir + "/s.json", kSpec);

    const auto r = run("analyze --spec " + dir + "/s.json --out " + dir + "/an");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out == "modes=2 signatures=3 depth=1\n");

    const auto modes = lines_of(read_file(dir + "/an/modes.csv"));
    REQUIRE(modes.size() == 3);
    CHECK(modes[0] == "component,representative,x,y,z,f1,f2");
    const auto sigs = lines_of(read_file(dir + "/an/signatures.csv"));
    REQUIRE(sigs.size() == 4);
    CHECK(sigs[0] == "signature,volume,modes");
    const auto hier = lines_of(read_file(dir + "/an/hierarchy.csv"));
    REQUIRE(hier.size() == 3);
    CHECK(hier[0] == "sub,super");

    const auto strict = run("analyze --spec " + dir + "/s.json --out " + dir + "/an2 --strict");
    REQUIRE(strict.exit_code == 0);
    CHECK(strict.out.substr(0, 8) == "modes=2 ");
}

TEST_CASE("solve is reproducible and defaults its seed from the spec") {
    const std::string dir = temp_dir();
    write_file(dir + "/s.json", kSpec);
    const std::string common = "solve --spec " + dir + "/s.json --start 2.5,-0.5,0.75";

    REQUIRE(run(common + " --seed 11 --out " + dir + "/t1.csv").exit_code == 0);
    REQUIRE(run(common + " --seed 11 --out " + dir + "/t2.csv").exit_code == 0);
    const std::string t1 = read_file(dir + "/t1.csv");
    CHECK(t1 == read_file(dir + "/t2.csv"));

    const auto ls = lines_of(t1);
    REQUIRE(ls.size() >= 2);
    CHECK(ls[0] == "step,x,y,z,f1,f2");
    CHECK(ls[1].substr(0, 16) == "0,2.5,-0.5,0.75,");

    // omitting --seed falls back to the spec's seed (7 here)
    const auto dflt = run(common);
    const auto seeded = run(common + " --seed 7");
    REQUIRE(dflt.exit_code == 0);
    CHECK(dflt.out == seeded.out);

    CHECK(run("solve --spec " + dir + "/s.json --start 9,0,0 --seed 1").exit_code == 4);
    CHECK(run("solve --spec " + dir + "/s.json --start 1,0 --seed 1").exit_code == 2);
}

TEST_CASE("solve --runs emits one summary row per seed") {
    const std::string dir = temp_dir();
    write_file(dir + "/s.json", kSpec);

    const auto r = run("solve --spec " + dir + "/s.json --start 2,0,0 --seed 5 --runs 3");
    REQUIRE(r.exit_code == 0);
    const auto ls = lines_of(r.out);
    REQUIRE(ls.size() == 4);
    CHECK(ls[0] == "run,seed,iterations,steps,x,y,z,f1,f2,terminal_modes");
    CHECK(fields_of(ls[1])[0] == "0");
    CHECK(fields_of(ls[1])[1] == "5");
    CHECK(fields_of(ls[3])[1] == "7");
    for (int i = 1; i <= 3; ++i) {
        const auto row = fields_of(ls[i]);
        REQUIRE(row.size() == 10);
        CHECK(!row[9].empty()); // terminal mode list
    }

    CHECK(run("solve --spec " + dir + "/s.json --start 2,0,0 --runs 0").exit_code == 2);
}
