#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "plmm/artifact_io.hpp"
#include "plmm/spec_io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

using namespace plmm;
using oracle::contains;
using oracle::error_message;

namespace {

const char* kMinimalSpec = "{\"schema_version\":\"1\",\"root\":{}}";

const char* kRichSpec = R"({
  "schema_version": "1",
  "seed": 7,
  "spacing": [1, 1, 1],
  "transform": {
    "rotation_degrees": -45,
    "maps": [
      {"kind": "power", "gamma": 2.0},
      {"kind": "affine", "scale": 2.0, "offset": 1.0}
    ]
  },
  "root": {
    "box": {"min": [0, -1, 0], "max": [4, 1, 1]},
    "optima": [
      {"position": [1, 0], "base_value": 0.0, "slope": 1.0, "rank": 1, "persists_at_top": true},
      {"position": [3, 0], "base_value": 0.5, "slope": 0.5, "rank": 0, "persists_at_top": false}
    ],
    "children": [
      {
        "scale": 0.125,
        "rotation_degrees": 90,
        "value_gain": null,
        "anchor": {"optimum": 1, "offset": [-0.375, 0]},
        "node": {}
      },
      {
        "scale": 0.125,
        "anchor": {"optimum": 1, "offset": [0.375, 0]},
        "node": {}
      }
    ]
  }
})";

std::string temp_dir() {
    char tmpl[] = "/tmp/plmm_spec_io_XXXXXX";
    REQUIRE(mkdtemp(tmpl) != nullptr);
    return tmpl;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string parse_err(const std::string& text) {
    return error_message(ErrorCode::ParseError, [&] { parse_spec(text); });
}

} // namespace

TEST_CASE("minimal spec materialises every default") {
    const ProblemSpecFile spec = parse_spec(kMinimalSpec);
    CHECK(spec.seed == 0);
    CHECK(spec.spacing == Vec3{1, 1, 1});
    CHECK(spec.chain.rotation_degrees == -45.0);
    CHECK(spec.chain.maps[0].kind == MonotoneMap::Kind::Identity);
    CHECK(spec.chain.maps[1].kind == MonotoneMap::Kind::Identity);
    CHECK(spec.root.primitive.box.min == Vec3{0, -1, 0});
    CHECK(spec.root.primitive.box.max == Vec3{4, 1, 1});
    REQUIRE(spec.root.primitive.optima.size() == 2);
    CHECK(spec.root.primitive.optima[0].position == Vec2{1, 0});
    CHECK(spec.root.primitive.optima[1].position == Vec2{3, 0});
    CHECK(spec.root.children.empty());
}

TEST_CASE("canonical form is a parse fixpoint") {
    for (const char* text : {kMinimalSpec, kRichSpec}) {
        const ProblemSpecFile spec = parse_spec(text);
        const std::string canon = canonical_spec(spec);
        const ProblemSpecFile reparsed = parse_spec(canon);
        CHECK(canonical_spec(reparsed) == canon);
        CHECK(canon.back() == '\n');
        // canonical text spells out the defaults
        CHECK(contains(canon, "\"schema_version\": \"1\""));
        CHECK(contains(canon, "\"persists_at_top\""));
        CHECK(contains(canon, "\"rotation_degrees\""));
    }
}

TEST_CASE("rich spec roundtrip") {
    ProblemSpecFile spec = parse_spec(kRichSpec);
    CHECK(spec.seed == 7);
    CHECK(spec.chain.maps[0].kind == MonotoneMap::Kind::Power);
    CHECK(spec.chain.maps[0].a == 2.0);
    CHECK(spec.chain.maps[1].kind == MonotoneMap::Kind::Affine);
    CHECK(spec.chain.maps[1].b == 1.0);
    REQUIRE(spec.root.children.size() == 2);
    CHECK(std::isnan(spec.root.children[0].value_gain)); // null means default
    CHECK(std::isnan(spec.root.children[1].value_gain)); // absent means default
    CHECK(spec.root.children[0].rotation_degrees == 90);
    CHECK(spec.root.children[0].anchor.offset == Vec2{-0.375, 0});

    // a NaN gain is omitted from the canonical form, an explicit one is kept
    CHECK(!contains(canonical_spec(spec), "value_gain"));
    spec.root.children[1].value_gain = 0.05;
    const std::string canon = canonical_spec(spec);
    CHECK(contains(canon, "\"value_gain\": 0.05"));
    const ProblemSpecFile reparsed = parse_spec(canon);
    CHECK(std::isnan(reparsed.root.children[0].value_gain));
    CHECK(reparsed.root.children[1].value_gain == 0.05);

    // the composed problem places both children on the refined lattice
    ProblemSpecFile build_me = parse_spec(kRichSpec);
    const Problem prob = build_problem(build_me);
    CHECK(prob.refinement == 8);
    REQUIRE(prob.placements.size() == 2);
    CHECK(prob.placements[0].region.min == Vec3{2.5, -0.25, 0.0});
    CHECK(prob.placements[0].region.max == Vec3{2.75, 0.25, 1.0});
    CHECK(prob.placements[1].region.min == Vec3{3.125, -0.125, 0.0});
    CHECK(prob.placements[1].region.max == Vec3{3.625, 0.125, 1.0});
}

TEST_CASE("parse failures carry the offending path") {
    CHECK(contains(parse_err("{"), "line 1, column 2"));
    CHECK(contains(parse_err("{\n  \"a\": [1,\n}"), "line"));
    CHECK(contains(parse_err("{\"schema_version\":\"2\",\"root\":{}}"),
                   "/schema_version: unsupported schema version"));
    CHECK(contains(parse_err("{\"root\":{}}"), "missing required key \"schema_version\""));
    CHECK(contains(parse_err("{\"schema_version\":\"1\"}"), "missing required key \"root\""));
    CHECK(contains(parse_err("{\"schema_version\":\"1\",\"root\":{},\"foo\":1}"),
                   "/foo: unknown key"));
    CHECK(contains(parse_err("{\"schema_version\":\"1\",\"root\":[]}"),
                   "/root: expected an object"));
    CHECK(contains(parse_err("{\"schema_version\":\"1\",\"root\":{},\"seed\":-1}"),
                   "/seed: expected a non-negative integer"));
    CHECK(contains(parse_err("{\"schema_version\":\"1\",\"root\":{},\"seed\":1.5}"),
                   "/seed: expected a non-negative integer"));
    CHECK(contains(parse_err("{\"schema_version\":\"1\",\"root\":{},\"spacing\":[1,1]}"),
                   "/spacing: expected an array of 3 numbers"));
    CHECK(contains(parse_err("{\"schema_version\":\"1\",\"root\":{\"optima\":[{}]}}"),
                   "/root/optima/0: missing required key \"position\""));
    CHECK(contains(parse_err(
                       "{\"schema_version\":\"1\",\"root\":{\"optima\":[{\"position\":[1]}]}}"),
                   "/root/optima/0/position: expected an array of 2 numbers"));
    CHECK(contains(parse_err("{\"schema_version\":\"1\",\"root\":{\"children\":[{\"node\":{}}]}}"),
                   "/root/children/0: missing required key \"anchor\""));
    CHECK(contains(
        parse_err(
            "{\"schema_version\":\"1\",\"root\":{\"children\":[{\"anchor\":{\"optimum\":1}}]}}"),
        "/root/children/0: missing required key \"node\""));
    CHECK(contains(parse_err("{\"schema_version\":\"1\",\"root\":{},\"transform\":"
                             "{\"maps\":[{\"kind\":\"power\"},{\"kind\":\"identity\"}]}}"),
                   "/transform/maps/0: missing required key \"gamma\""));
    CHECK(contains(parse_err("{\"schema_version\":\"1\",\"root\":{},\"transform\":"
                             "{\"maps\":[{\"kind\":\"exp\"},{\"kind\":\"identity\"}]}}"),
                   "unknown map kind \"exp\""));
    CHECK(contains(parse_err("{\"schema_version\":\"1\",\"root\":{},\"transform\":"
                             "{\"maps\":[{\"kind\":\"identity\"}]}}"),
                   "/transform/maps: expected an array of 2 maps"));
}

TEST_CASE("error codes map onto the process exit contract") {
    CHECK(exit_code_for(ErrorCode::ParseError) == 2);
    CHECK(exit_code_for(ErrorCode::OutOfDomain) == 4);
    CHECK(exit_code_for(ErrorCode::IoError) == 4);
    for (const ErrorCode c :
         {ErrorCode::InvalidBox, ErrorCode::ZeroSpacing, ErrorCode::NonDivisibleExtent,
          ErrorCode::NoPersistentOptimum, ErrorCode::IrrationalScale, ErrorCode::MisalignedChild,
          ErrorCode::SpecValidation})
        CHECK(exit_code_for(c) == 3);
    CHECK(Error(ErrorCode::ParseError, "x").exit_code() == 2);
}

TEST_CASE("missing spec file raises an io error") {
    CHECK(contains(error_message(ErrorCode::IoError,
                                 [] { load_spec_file("/nonexistent/spec.json"); }),
                   "IoError"));
}

TEST_CASE("artifact bundles are reproducible and self-checking") {
    ProblemSpecFile spec = parse_spec(kMinimalSpec);
    const Problem prob = build_problem(spec);

    const std::string dir1 = temp_dir();
    const std::string dir2 = temp_dir();
    write_artifact(dir1, spec, prob);
    write_artifact(dir2, spec, prob);
    for (const char* name : {"mesh.csv", "values.csv", "metadata.json"}) {
        const std::string a = read_file(dir1 + "/" + std::string(name));
        CHECK(a == read_file(dir2 + "/" + std::string(name)));
        CHECK(!a.empty());
    }
    // regenerating over an existing bundle leaves identical bytes, no temp litter
    const std::string before = read_file(dir1 + "/values.csv");
    write_artifact(dir1, spec, prob);
    CHECK(read_file(dir1 + "/values.csv") == before);
    CHECK(!std::ifstream(dir1 + "/values.csv.tmp").good());

    CHECK(contains(read_file(dir1 + "/values.csv"), "index,psi1,psi2,f1,f2\n"));

    // metadata embeds the canonical spec plus the mesh counts
    const nlohmann::json meta = nlohmann::json::parse(read_file(dir1 + "/metadata.json"));
    CHECK(meta["schema_version"] == "1");
    CHECK(meta["refinement"] == 1);
    CHECK(meta["vertex_count"] == prob.mesh->vertex_count());
    CHECK(meta["tet_count"] == prob.mesh->tet_count());
    CHECK(meta["spec"] == nlohmann::json::parse(canonical_spec(spec)));

    const LoadedArtifact art = load_artifact(dir1);
    CHECK(art.problem.mesh->vertex_count() == prob.mesh->vertex_count());
    CHECK(art.problem.psi.values == prob.psi.values);
    CHECK(canonical_spec(art.spec) == canonical_spec(spec));

    // tampering with the recorded counts is detected on load
    nlohmann::json tampered = meta;
    tampered["vertex_count"] = meta["vertex_count"].get<std::size_t>() + 1;
    write_file_atomic(dir1 + "/metadata.json", tampered.dump(2) + "\n");
    CHECK(contains(error_message(ErrorCode::SpecValidation, [&] { load_artifact(dir1); }),
                   "ArtifactMismatch"));

    write_file_atomic(dir1 + "/metadata.json", "{\"x\": 1}\n");
    CHECK(contains(error_message(ErrorCode::ParseError, [&] { load_artifact(dir1); }),
                   "no \"spec\""));
    CHECK(contains(error_message(ErrorCode::IoError, [] { load_artifact("/nonexistent"); }),
                   "IoError"));
}

TEST_CASE("slice rows: on-plane vertices plus strictly crossing edges") {
    ProblemSpecFile spec = parse_spec(kMinimalSpec);
    const Problem prob = build_problem(spec);

    const auto rows = [&](double z) {
        std::ostringstream out;
        write_slice_csv(out, prob, z);
        std::istringstream in(out.str());
        std::string line;
        REQUIRE(std::getline(in, line));
        REQUIRE(line == "x,y,z,source,psi1,psi2,f1,f2");
        int vertex_rows = 0, edge_rows = 0;
        while (std::getline(in, line)) {
            if (contains(line, ",vertex,")) ++vertex_rows;
            else if (contains(line, ",edge,")) ++edge_rows;
            else REQUIRE(false);
        }
        return std::pair<int, int>{vertex_rows, edge_rows};
    };

    CHECK(rows(0.5) == std::pair<int, int>{30, 15});
    CHECK(rows(0.0) == std::pair<int, int>{23, 0});
    CHECK(rows(1.0) == std::pair<int, int>{23, 0});
    CHECK(contains(error_message(ErrorCode::OutOfDomain,
                                 [&] {
                                     std::ostringstream out;
                                     write_slice_csv(out, prob, 1.5);
                                 }),
                   "OutOfDomain"));

    // edge rows interpolate psi and then apply the chain
    std::ostringstream out;
    write_slice_csv(out, prob, 0.5);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (!contains(line, ",edge,")) continue;
        std::istringstream fields(line);
        std::string tok;
        double vals[8];
        for (int i = 0; i < 8; ++i) {
            std::getline(fields, tok, ',');
            if (i != 3) vals[i] = std::strtod(tok.c_str(), nullptr);
        }
        CHECK(vals[2] == 0.5);
        const auto f = prob.chain.apply({vals[4], vals[5]});
        CHECK(f[0] == vals[6]);
        CHECK(f[1] == vals[7]);
    }
}

TEST_CASE("numeric text uses the shortest exact decimal form") {
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-0.25) == "-0.25");
    CHECK(format_double(0.0) == "0");
    // every emitted value parses back to the identical double
    for (const double v : {1.0 / 3.0, 0.35355339059327373, 2e-13, 1e17}) {
        CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
        CHECK(std::strtod(format_double(-v).c_str(), nullptr) == -v);
    }
}

TEST_CASE("trajectory and run tables") {
    ProblemSpecFile spec = parse_spec(kMinimalSpec);
    const Problem prob = build_problem(spec);
    SolveParams params;
    params.seed = 3;
    const Trajectory t = descent_solver(prob, {2, 0, 0}, params);

    std::ostringstream tout;
    write_trajectory_csv(tout, t);
    std::istringstream tin(tout.str());
    std::string line;
    REQUIRE(std::getline(tin, line));
    CHECK(line == "step,x,y,z,f1,f2");
    int steps = 0;
    while (std::getline(tin, line)) {
        CHECK(line.rfind(std::to_string(steps) + ",", 0) == 0);
        ++steps;
    }
    CHECK(steps == static_cast<int>(t.steps.size()));

    const std::uint64_t seeds[] = {3, 4};
    const Trajectory runs[] = {t, descent_solver(prob, {2, 0, 0}, SolveParams{.seed = 4})};
    std::ostringstream rout;
    write_runs_csv(rout, runs, seeds);
    std::istringstream rin(rout.str());
    REQUIRE(std::getline(rin, line));
    CHECK(line == "run,seed,iterations,steps,x,y,z,f1,f2,terminal_modes");
    int nruns = 0;
    while (std::getline(rin, line)) ++nruns;
    CHECK(nruns == 2);
}
