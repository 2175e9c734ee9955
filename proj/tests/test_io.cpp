#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "fwr/errors.hpp"
#include "fwr/io.hpp"

using namespace fwr;

namespace {

QuasipotentialMatrix three_state_example() {
    QuasipotentialMatrix m;
    m.values = Mat(3, 3);
    m.values << 0, 1, 6, 2, 0, 4, 7, 3, 0;
    m.labels = {"O_1", "O_3", "O_5"};
    return m;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("the TOML subset parser") {
    std::string text = R"(# experiment configuration
title = "two wells"   # trailing comment
[sim]
epsilon = 0.35
steps = 1200
use_boundary = true
center = [0.1, -0.2]

[sim.output]
path = "out/run1"
enabled = false
)";
    Json j = parse_toml_subset(text);
    CHECK(j["title"] == "two wells");
    CHECK(j["sim"]["epsilon"] == doctest::Approx(0.35));
    CHECK(j["sim"]["steps"] == 1200);
    CHECK(j["sim"]["steps"].is_number_integer());
    CHECK(j["sim"]["use_boundary"] == true);
    CHECK(j["sim"]["center"].size() == 2);
    CHECK(j["sim"]["center"][1] == doctest::Approx(-0.2));
    CHECK(j["sim"]["output"]["path"] == "out/run1");
    CHECK(j["sim"]["output"]["enabled"] == false);

    CHECK_THROWS_AS(parse_toml_subset("key with no equals"), ConfigInvalid);
    CHECK_THROWS_AS(parse_toml_subset("[unclosed\nx = 1"), ConfigInvalid);
}

TEST_CASE("configuration loading dispatches on the extension") {
    {
        std::ofstream out("cfg_roundtrip.json");
        out << R"({"sim": {"epsilon": 0.2}})";
    }
    {
        std::ofstream out("cfg_roundtrip.toml");
        out << "[sim]\nepsilon = 0.2\n";
    }
    Json a = load_config("cfg_roundtrip.json");
    Json b = load_config("cfg_roundtrip.toml");
    CHECK(a["sim"]["epsilon"] == b["sim"]["epsilon"]);
    CHECK_THROWS_AS(load_config("missing_file.json"), ConfigInvalid);
    {
        std::ofstream out("cfg_bad.json");
        out << "{not json";
    }
    CHECK_THROWS_AS(load_config("cfg_bad.json"), ConfigInvalid);
    CHECK_THROWS_AS(load_config("cfg.yaml"), ConfigInvalid);
    std::remove("cfg_roundtrip.json");
    std::remove("cfg_roundtrip.toml");
    std::remove("cfg_bad.json");
}

TEST_CASE("atomic writes leave a complete file and no temporaries") {
    atomic_write("atomic_test.txt", "payload\n");
    CHECK(slurp("atomic_test.txt") == "payload\n");
    atomic_write("atomic_test.txt", "replaced\n");
    CHECK(slurp("atomic_test.txt") == "replaced\n");
    std::remove("atomic_test.txt");
}

TEST_CASE("trajectory CSV layout") {
    ReflectedTrajectory traj;
    Vec p(2);
    p << 0.5, -0.25;
    traj.times = {0.0, 0.001};
    traj.states = {p, p};
    traj.local_time = {0.0, 0.125};
    traj.boundary_flags = {0, 1};
    std::string csv = trajectory_csv(traj);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,x_1,x_2,xi,on_boundary");
    std::getline(in, line);
    CHECK(line == "0,0.5,-0.25,0,0");
    std::getline(in, line);
    CHECK(line == "0.001,0.5,-0.25,0.125,1");
    CHECK(!std::getline(in, line));
}

TEST_CASE("quasipotential tables round-trip through JSON") {
    QuasipotentialMatrix m = three_state_example();
    m.variant = Variant::Avoiding;
    m.provenance = Provenance::Oracle;
    Json j = matrix_to_json(m);
    QuasipotentialMatrix back = matrix_from_json(j);
    CHECK(back.size() == 3);
    CHECK((back.values - m.values).norm() == 0.0);
    CHECK(back.labels == m.labels);
    CHECK(back.variant == Variant::Avoiding);
    CHECK(back.provenance == Provenance::Oracle);

    // labels default to positional names when omitted
    Json bare;
    bare["values"] = {{0.0, 1.0}, {2.0, 0.0}};
    QuasipotentialMatrix two = matrix_from_json(bare);
    REQUIRE(two.labels.size() == 2);
    CHECK(two.labels[0] == "O_1");
    CHECK(two.labels[1] == "O_2");

    // structural violations are rejected on input
    Json bad;
    bad["values"] = {{0.0, -1.0}, {2.0, 0.0}};
    CHECK_THROWS_AS(matrix_from_json(bad), InconsistentMatrix);
    Json ragged;
    ragged["values"] = {{0.0, 1.0}, {2.0}};
    CHECK_THROWS_AS(matrix_from_json(ragged), InconsistentMatrix);
}

TEST_CASE("hierarchy reports serialize with labels") {
    QuasipotentialMatrix m = three_state_example();
    CycleNode tree = build_cycle_tree(m);
    Json jt = tree_to_json(tree, m.labels);
    CHECK(jt["members"].size() == 3);
    CHECK(!jt.contains("A"));  // infinite at the root
    CHECK(jt["C"] == doctest::Approx(4.0));
    REQUIRE(jt["children"].size() == 2);
    CHECK(jt["children"][0]["members"] == Json::array({"O_1", "O_3"}));
    CHECK(jt["children"][0]["A"] == doctest::Approx(5.0));
    CHECK(jt["children"][0]["exit_target"] == "O_5");
    CHECK(jt["children"][1]["members"] == Json::array({"O_5"}));

    MetastableProfile p = metastable_profile(tree, m, 0);
    Json jp = profile_to_json(p, m.labels);
    CHECK(jp["start"] == "O_1");
    CHECK(jp["thresholds"] == Json::array({1.0}));
    CHECK(jp["states"] == Json::array({"O_1", "O_3"}));
}
