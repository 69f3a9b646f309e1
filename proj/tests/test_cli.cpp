#include "doctest.h"
#include "test_util.hpp"

#include "causalreg/cli.hpp"
#include "causalreg/dataset_io.hpp"
#include "causalreg/error.hpp"
#include "causalreg/sem.hpp"
#include "causalreg/sem_json.hpp"
#include "causalreg/version.hpp"

#include <sstream>

using namespace causalreg;
using testutil::TempDir;

namespace {

struct Outcome {
    int code = 0;
    std::string out;
    std::string err;
};

Outcome call(std::vector<std::string> args) {
    args.insert(args.begin(), "causalreg");
    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Outcome o;
    o.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    o.out = out.str();
    o.err = err.str();
    return o;
}

// Data rows without '#' comments.
std::vector<std::string> body_lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '#') out.push_back(line);
    }
    return out;
}

// Sparse regression data set with an environment label column.
std::string regression_csv(Index n, Index p, std::uint64_t seed, bool with_env = true) {
    causalreg::Rng rng(seed);
    const Matrix X = rng.normal_matrix(n, p);
    const Vector y = 2.0 * X.col(0) - X.col(1) + 0.5 * rng.normal_vector(n);
    std::ostringstream out;
    out << "y";
    for (Index j = 0; j < p; ++j) out << ",x" << j + 1;
    out << (with_env ? ",env\n" : "\n");
    for (Index i = 0; i < n; ++i) {
        out << format_double(y(i));
        for (Index j = 0; j < p; ++j) out << ',' << format_double(X(i, j));
        if (with_env) out << ',' << (i % 3 == 0 ? "a" : (i % 3 == 1 ? "b" : "c"));
        out << "\n";
    }
    return out.str();
}

void check_provenance(const std::string& text, const std::string& command) {
    CHECK(text.find(kVersion) != std::string::npos);
    CHECK(text.find("\"command\":\"" + command + "\"") != std::string::npos);
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("dataset parsing") {
    const Dataset d = parse_dataset_text("y,x1,x2\n1,2,3\n4,5,6\n7,8,9\n", "y");
    CHECK(d.n() == 3);
    CHECK(d.p() == 2);
    CHECK(d.A.cols() == 0);
    CHECK(d.X(2, 1) == 9.0);
    CHECK(d.Y(1) == 4.0);
    CHECK(d.x_names == std::vector<std::string>{"x1", "x2"});

    const Dataset e = parse_dataset_text("# note\ny,x,env\n1,2,a\n\n3,4,c\n5,6,b\n6,1,a\n", "y", {"env"});
    CHECK(e.A.cols() == 3);
    CHECK(e.p() == 1);
    CHECK((e.A.rowwise().sum().array() == 1.0).all());
    CHECK(e.A(0, 0) == 1.0);
    CHECK(e.A(1, 2) == 1.0);
    CHECK(e.a_names == std::vector<std::string>{"env=a", "env=b", "env=c"});

    CHECK_THROWS_AS(parse_dataset_text("", "y"), ParseError);
    CHECK_THROWS_AS(parse_dataset_text("y,x\n1,2\n", "y"), ParseError);
    CHECK_THROWS_AS(parse_dataset_text("y,x\n1,2\n3\n", "y"), ParseError);
    CHECK_THROWS_AS(parse_dataset_text("y,x\n1,2\n3,z\n", "y"), ParseError);
    CHECK_THROWS_AS(parse_dataset_text("y,x\n1,2\n3,4\n", "w"), ConfigError);
    CHECK_THROWS_AS(parse_dataset_text("y,x\n1,2\n3,4\n", "y", {"y"}), ConfigError);
    try {
        parse_dataset_text("y,x\n1,2\n3,oops\n", "y");
        FAIL("expected a parse error");
    } catch (const ParseError& err) {
        CHECK(err.row() == 3);
        CHECK(err.col() == 2);
    }
}

TEST_CASE("number formatting round-trips") {
    for (double v : {0.1, -2.5e-300, 1.0 / 3.0, 123456789.125, 0.0}) {
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(-0.0) == "0");
}

TEST_CASE("transform emits the spectrum table") {
    TempDir tmp("cli_transform");
    const std::string in = tmp.write("d.csv", regression_csv(40, 6, 1));
    const Outcome o = call({"transform", "--input", in, "--response", "y", "--anchors", "env", "--kind", "trim", "--tau", "2.5"});
    REQUIRE(o.code == 0);
    check_provenance(o.out, "transform");
    const auto lines = body_lines(o.out);
    REQUIRE(lines.size() == 7);
    CHECK(lines[0] == "index,d,d_tilde");
    CHECK(lines[1].rfind("1,", 0) == 0);
    for (const std::string kind : {"pca", "lava", "identity"}) {
        std::vector<std::string> args = {"transform", "--input", in, "--anchors", "env", "--kind", kind};
        if (kind == "pca") {
            args.push_back("--qhat");
            args.push_back("1");
        }
        CHECK(call(args).code == 0);
    }
}

TEST_CASE("deconfound, ddlasso and anchor commands") {
    TempDir tmp("cli_fit");
    const std::string in = tmp.write("d.csv", regression_csv(80, 10, 2));
    const Outcome dec = call({"deconfound", "--input", in, "--response", "y", "--anchors", "env", "--lambda", "cv", "--folds", "4"});
    REQUIRE(dec.code == 0);
    check_provenance(dec.out, "deconfound");
    CHECK(body_lines(dec.out)[0] == "j,name,estimate");
    CHECK(body_lines(dec.out).size() == 11);
    const Outcome lava = call({"deconfound", "--input", in, "--response", "y", "--anchors", "env", "--kind", "lava", "--lambda", "0.05"});
    REQUIRE(lava.code == 0);
    CHECK(body_lines(lava.out)[0] == "j,name,estimate,dense");

    const Outcome dd = call({"ddlasso", "--input", in, "--response", "y", "--anchors", "env", "--coords", "1,x3", "--folds", "4"});
    REQUIRE(dd.code == 0);
    check_provenance(dd.out, "ddlasso");
    const auto rows = body_lines(dd.out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "j,estimate,se,ci_low,ci_high,p_value");
    CHECK(rows[1].rfind("1,", 0) == 0);
    CHECK(rows[2].rfind("3,", 0) == 0);

    const Outcome an = call({"anchor", "--input", in, "--response", "y", "--anchors", "env", "--gamma", "grid:0,1,inf"});
    REQUIRE(an.code == 0);
    check_provenance(an.out, "anchor");
    const auto ar = body_lines(an.out);
    CHECK(ar[0] == "gamma,lambda,j,name,estimate");
    CHECK(ar.size() == 1 + 3 * 11);
    CHECK(ar.back().rfind("inf,0,10,x10,", 0) == 0);
    CHECK(an.out.find("\"gamma\":[0.0,1.0,\"inf\"]") != std::string::npos);
}

TEST_CASE("simulate, replicate, coverage and robustness commands") {
    TempDir tmp("cli_exp");
    const std::string dense = tmp.write("dense.json", R"({"type":"dense","n":40,"p":20,"q":2,"s0":3,"seed":1})");
    const Outcome sim = call({"simulate", "--spec", dense, "--seed", "4"});
    REQUIRE(sim.code == 0);
    check_provenance(sim.out, "simulate");
    const auto srows = body_lines(sim.out);
    CHECK(srows.size() == 41);
    CHECK(srows[0].rfind("y,x1,x2,", 0) == 0);

    SemDocument doc;
    doc.spec = random_anchor_sem(2, 1, 1, 3);
    doc.n = 200;
    const std::string anchor = tmp.write("anchor.json", to_json(doc).dump());
    const Outcome asim = call({"simulate", "--spec", anchor, "--seed", "5", "--output", tmp.file("a.csv")});
    REQUIRE(asim.code == 0);
    const Outcome afit = call({"anchor", "--input", tmp.file("a.csv"), "--response", "y", "--anchors", "a1", "--gamma", "4"});
    CHECK(afit.code == 0);

    const std::string family = tmp.write("family.json", R"({"type":"dense","n":50,"p":20,"s0":3})");
    const Outcome rep = call({"replicate", "--spec", family, "--replicates", "2", "--output", tmp.file("rep.csv")});
    REQUIRE(rep.code == 0);
    const std::string rep_csv = testutil::slurp(tmp.file("rep.csv"));
    CHECK(rep_csv.rfind(std::string("# causalreg ") + kVersion, 0) == 0);
    CHECK(rep_csv.find("# table: mean\nmethod,K,mean_jaccard_distance,replicates\n") != std::string::npos);

    const Outcome cov = call({"coverage", "--spec", family, "--replicates", "2", "--folds", "3", "--coords", "2"});
    REQUIRE(cov.code == 0);
    const Json cj = Json::parse(cov.out);
    CHECK(cj.at("version") == kVersion);
    CHECK(cj.at("config").at("coords") == Json::array({2}));
    CHECK(cj.at("config").at("cli").at("command") == "coverage");

    const Outcome rob = call({"robustness", "--spec", anchor, "--gamma", "grid:1,inf"});
    REQUIRE(rob.code == 0);
    const Json rj = Json::parse(rob.out);
    CHECK(rj.at("experiment") == "robustness");
    CHECK(rj.at("config").at("gammas") == Json::array({1.0, "inf"}));
}

TEST_CASE("outputs are byte-identical on re-run and across thread counts") {
    TempDir tmp("cli_det");
    const std::string in = tmp.write("d.csv", regression_csv(60, 8, 3));
    const std::string plain = tmp.write("p.csv", regression_csv(60, 8, 3, false));
    const std::string family = tmp.write("family.json", R"({"type":"dense","n":40,"p":15,"s0":2})");
    const std::vector<std::vector<std::string>> commands = {
        {"transform", "--input", plain, "--response", "y", "--kind", "lava"},
        {"deconfound", "--input", plain, "--response", "y", "--folds", "3", "--seed", "11"},
        {"ddlasso", "--input", plain, "--response", "y", "--folds", "3", "--seed", "11"},
        {"anchor", "--input", in, "--response", "y", "--anchors", "env", "--gamma", "grid:0,2,inf", "--lambda", "cv", "--folds", "3"},
        {"replicate", "--spec", family, "--replicates", "3", "--seed", "2"},
    };
    for (const auto& args : commands) {
        CAPTURE(args[0]);
        const Outcome a = call(args);
        REQUIRE(a.code == 0);
        CHECK(call(args).out == a.out);
        auto threaded = args;
        threaded.push_back("--threads");
        threaded.push_back("3");
        CHECK(call(threaded).out == a.out);
    }
}

TEST_CASE("config files supply defaults that flags override") {
    TempDir tmp("cli_config");
    const std::string in = tmp.write("d.csv", regression_csv(40, 5, 4, false));
    const std::string conf = tmp.write("c.json", "{\"input\":\"" + in + "\",\"response\":\"y\",\"kind\":\"trim\",\"tau\":1.5}");
    const Outcome a = call({"transform", "--config", conf});
    const Outcome b = call({"transform", "--config", conf, "--tau", "0.5"});
    const Outcome c = call({"transform", "--input", in, "--response", "y", "--tau", "0.5"});
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(a.out != b.out);
    CHECK(body_lines(b.out) == body_lines(c.out));
    CHECK(call({"transform", "--config", tmp.write("bad.json", "{\"colour\":1}")}).code == 2);
    CHECK(call({"transform", "--config", tmp.write("broken.json", "{")}).code == 3);
}

TEST_CASE("exit codes") {
    TempDir tmp("cli_exit");
    const std::string in = tmp.write("d.csv", regression_csv(30, 4, 5, false));
    const std::string labelled = tmp.write("l.csv", regression_csv(30, 4, 5));
    CHECK(call({}).code == 2);
    CHECK(call({"frobnicate"}).code == 2);
    CHECK(call({"transform", "--input", in, "--bogus", "1"}).code == 2);
    CHECK(call({"transform", "--input", in, "--gamma", "2"}).code == 2);
    CHECK(call({"transform", "--input", in, "--kind", "pca"}).code == 2);
    CHECK(call({"transform", "--input", in, "--kind", "trim", "--qhat", "2"}).code == 2);
    CHECK(call({"transform", "--input", in, "--tau", "abc"}).code == 2);
    CHECK(call({"transform", "--input", in, "--seed", "-1"}).code == 2);
    CHECK(call({"transform", "--input", in, "--threads", "0"}).code == 2);
    CHECK(call({"transform", "--input", tmp.file("missing.csv")}).code == 2);
    CHECK(call({"deconfound", "--input", in}).code == 2);
    CHECK(call({"deconfound", "--input", in, "--response", "nope"}).code == 2);
    CHECK(call({"deconfound", "--input", in, "--response", "y", "--lambda", "0.1", "--folds", "3"}).code == 2);
    CHECK(call({"ddlasso", "--input", in, "--response", "y", "--coords", "9"}).code == 2);
    CHECK(call({"ddlasso", "--input", in, "--response", "y", "--level", "1.5"}).code == 2);
    CHECK(call({"anchor", "--input", labelled, "--response", "y"}).code == 2);
    CHECK(call({"deconfound", "--input", labelled, "--response", "y"}).code == 3);
    CHECK(call({"anchor", "--input", labelled, "--response", "y", "--anchors", "env", "--gamma", "-1"}).code == 2);
    CHECK(call({"simulate"}).code == 2);
    CHECK(call({"simulate", "--spec", tmp.write("s.json", "{\"type\":\"dense\",\"extra\":1}")}).code == 2);
    CHECK(call({"replicate", "--spec", tmp.write("r.json", "{\"type\":\"dense\",\"beta0\":[1]}")}).code == 2);

    CHECK(call({"transform", "--input", tmp.write("e.csv", "")}).code == 3);
    CHECK(call({"transform", "--input", tmp.write("bad.csv", "y,x\n1,2\n3,q\n")}).code == 3);
    CHECK(call({"simulate", "--spec", tmp.write("bad.json", "{oops")}).code == 3);
    const Outcome parse = call({"deconfound", "--input", tmp.file("bad.csv"), "--response", "y"});
    CHECK(parse.code == 3);
    CHECK(parse.err.find("row 3") != std::string::npos);

    // Rank-deficient least squares: duplicated column with lambda 0.
    const std::string dup = tmp.write("dup.csv", "y,x1,x2\n1,1,1\n2,2,2\n0,3,3\n5,4,4\n");
    CHECK(call({"deconfound", "--input", dup, "--response", "y", "--kind", "identity", "--lambda", "0"}).code == 4);
    CHECK(call({"--help"}).code == 0);
}

} // TEST_SUITE cli
