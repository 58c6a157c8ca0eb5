#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"
#include "edvqe/graph.hpp"
#include "edvqe/haplotype.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
    int code = 0;
    std::string out;
    std::string err;
};

Outcome run_cli(std::initializer_list<std::string> args) {
    std::vector<std::string> storage{"edvqe"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<const char *> argv;
    for (const auto &s : storage) {
        argv.push_back(s.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = edvqe::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path tmp_dir() {
    const char *env = std::getenv("EDVQE_TEST_TMP");
    fs::path dir = env ? fs::path(env) : fs::temp_directory_path() / "edvqe_cli_test";
    fs::create_directories(dir);
    return dir;
}

std::string tmp(const std::string &name) { return (tmp_dir() / name).string(); }

std::string slurp(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_text(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

std::vector<std::string> split(const std::string &line, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(line);
    while (std::getline(in, item, sep)) {
        parts.push_back(item);
    }
    if (!line.empty() && line.back() == sep) {
        parts.emplace_back();
    }
    return parts;
}

const std::string kFastConfig =
    R"({"inner_optimizer": {"max_iters": 60}, "qp2_optimizer": {"max_iters": 30}, "max_outer_iters": 4})";

} // namespace

TEST_CASE("help exits 0 and unknown subcommands exit 2") {
    CHECK(run_cli({"--help"}).code == 0);
    CHECK(run_cli({}).code == 2);
    CHECK(run_cli({"frobnicate"}).code == 2);
    CHECK(run_cli({"gen", "complete", "ten", "1", tmp("x.txt")}).code == 2);
}

TEST_CASE("gen writes a deterministic complete graph") {
    const auto a = tmp("gen_a.txt");
    const auto b = tmp("gen_b.txt");
    REQUIRE(run_cli({"gen", "complete", "100", "3587", a}).code == 0);
    REQUIRE(run_cli({"gen", "complete", "100", "3587", b}).code == 0);
    CHECK(slurp(a) == slurp(b));
    const auto g = edvqe::read_graph(a);
    CHECK(g.n_vertices() == 100);
    CHECK(g.edge_count() == 4950);
}

TEST_CASE("gen families and errors") {
    REQUIRE(run_cli({"gen", "cluster", "40", "1", tmp("cl.txt"), "--p-inter", "0"}).code == 0);
    CHECK(edvqe::read_graph(tmp("cl.txt")).edge_count() == 4 * 45);
    REQUIRE(run_cli({"gen", "regular3", "20", "1", tmp("r3.txt")}).code == 0);
    CHECK(edvqe::read_graph(tmp("r3.txt")).edge_count() == 30);
    const auto bad = run_cli({"gen", "hypercube", "10", "1", tmp("bad.txt")});
    CHECK(bad.code == 2);
    CHECK_FALSE(bad.err.empty());
    CHECK(run_cli({"gen", "complete", "10", "1", tmp("w.txt"), "--w-min", "5", "--w-max", "1"}).code == 2);
    CHECK(run_cli({"gen", "regular3", "5", "1", tmp("odd.txt")}).code == 1);
}

TEST_CASE("solve on an edgeless graph") {
    write_text(tmp("empty.txt"), "4 0\n");
    write_text(tmp("fast.json"), kFastConfig);
    const auto r = run_cli({"solve", tmp("empty.txt"), "--config", tmp("fast.json"), "--seed", "2"});
    REQUIRE(r.code == 0);
    const auto doc = json::parse(r.out);
    CHECK(doc["best"]["cut"] == 0.0);
    CHECK(doc["seed"] == 2);
}

TEST_CASE("solve is deterministic and writes side outputs") {
    REQUIRE(run_cli({"gen", "complete", "10", "7", tmp("k10.txt")}).code == 0);
    write_text(tmp("fast.json"), kFastConfig);
    const auto out_a = tmp("solve_a.json");
    const auto out_b = tmp("solve_b.json");
    const auto trace = tmp("trace.csv");
    const auto params = tmp("params.json");
    REQUIRE(run_cli({"solve", tmp("k10.txt"), "--config", tmp("fast.json"), "--seed", "3", "--out",
                     out_a, "--trace-out", trace, "--params-out", params})
                .code == 0);
    REQUIRE(run_cli({"solve", tmp("k10.txt"), "--config", tmp("fast.json"), "--seed", "3", "--out",
                     out_b})
                .code == 0);
    CHECK(slurp(out_a) == slurp(out_b));
    const auto doc = json::parse(slurp(out_a));
    const auto g = edvqe::read_graph(tmp("k10.txt"));
    const auto bits = edvqe::bits_from_string(doc["best"]["bits"].get<std::string>());
    CHECK(doc["best"]["cut"].get<double>() == doctest::Approx(edvqe::cut_value(g, bits)));
    CHECK(doc["best"]["cut"].get<double>() <= edvqe::brute_force_maxcut(g).cut + 1e-9);
    CHECK(doc["config"]["inner_optimizer"]["max_iters"] == 60);
    const auto trace_text = slurp(trace);
    CHECK(trace_text.rfind("iter,energy\n", 0) == 0);
    CHECK(json::parse(slurp(params)).contains("0"));
}

TEST_CASE("solve rejects bad configs and graphs") {
    write_text(tmp("bad_cfg.json"), R"({"subsystem_sise": 4})");
    REQUIRE(run_cli({"gen", "complete", "6", "1", tmp("k6.txt")}).code == 0);
    CHECK(run_cli({"solve", tmp("k6.txt"), "--config", tmp("bad_cfg.json")}).code == 2);
    write_text(tmp("broken.txt"), "3 1\n0 q 1\n");
    const auto r = run_cli({"solve", tmp("broken.txt")});
    CHECK(r.code == 1);
    CHECK(r.err.find("line 2") != std::string::npos);
    CHECK(run_cli({"solve", tmp("does_not_exist.txt")}).code == 1);
}

TEST_CASE("gw on K2 and nested projections") {
    write_text(tmp("k2.txt"), "2 1\n0 1 2.5\n");
    const auto r = run_cli({"gw", tmp("k2.txt"), "--R", "7", "--runs", "2"});
    REQUIRE(r.code == 0);
    const auto doc = json::parse(r.out);
    CHECK(doc["best"]["cut"] == 2.5);
    CHECK(doc["runs"].size() == 2);
    CHECK(doc["A_bar"] == 2.5);

    REQUIRE(run_cli({"gen", "complete", "14", "5", tmp("k14.txt")}).code == 0);
    const auto one = json::parse(run_cli({"gw", tmp("k14.txt"), "--projections", "1", "--seed", "4"}).out);
    const auto hundred = json::parse(run_cli({"gw", tmp("k14.txt"), "--R", "100", "--seed", "4"}).out);
    CHECK(hundred["best"]["cut"].get<double>() >= one["best"]["cut"].get<double>());
    const double opt = edvqe::brute_force_maxcut(edvqe::read_graph(tmp("k14.txt"))).cut;
    CHECK(hundred["best"]["cut"].get<double>() >= 0.878 * opt);
    const auto ranked = json::parse(run_cli({"gw", tmp("k14.txt"), "--rank", "3"}).out);
    CHECK(ranked["runs"][0]["rank"] == 3);
    CHECK(run_cli({"gw", tmp("k14.txt"), "--R", "0"}).code == 2);
}

TEST_CASE("warmstart never falls below its GW start") {
    REQUIRE(run_cli({"gen", "cluster", "20", "2", tmp("c20.txt")}).code == 0);
    write_text(tmp("fast.json"), kFastConfig);
    const auto r = run_cli({"warmstart", tmp("c20.txt"), "--config", tmp("fast.json"), "--R", "20"});
    REQUIRE(r.code == 0);
    const auto doc = json::parse(r.out);
    CHECK(doc["warm_start"]["best"]["cut"].get<double>() >= doc["gw"]["best"]["cut"].get<double>());
    CHECK(doc["warm_start"]["initial"]["bits"] == doc["gw"]["best"]["bits"]);
}

TEST_CASE("synth and phase") {
    const auto frags = tmp("frags.csv");
    const auto truth = tmp("truth.txt");
    REQUIRE(run_cli({"synth", "20", "40", "6", "0", "5", frags, "--truth-out", truth}).code == 0);
    const auto data = edvqe::load_fragments(frags);
    CHECK(data.n_reads() == 40);
    CHECK(edvqe::load_haplotype(truth).size() == 20);

    const auto with_truth = run_cli({"phase", frags, "--truth", truth, "--solver", "gw"});
    REQUIRE(with_truth.code == 0);
    const auto doc = json::parse(with_truth.out);
    CHECK(doc["mec"] == 0);
    CHECK(doc["completeness"] == 1.0);
    CHECK(doc["switch_error"] == 0.0);
    CHECK(doc["hamming_error"] == 0.0);

    const auto no_truth = json::parse(run_cli({"phase", frags, "--solver", "gw"}).out);
    CHECK(no_truth["switch_error"].is_null());
    CHECK(no_truth["hamming_error"].is_null());
    CHECK(no_truth["mec"] == 0);

    REQUIRE(run_cli({"synth", "12", "15", "4", "0.05", "6", tmp("small.txt"), "--format", "sparse"}).code == 0);
    const auto brute_a = run_cli({"phase", tmp("small.txt"), "--solver", "brute"});
    const auto brute_b = run_cli({"phase", tmp("small.txt"), "--solver", "brute"});
    REQUIRE(brute_a.code == 0);
    CHECK(brute_a.out == brute_b.out);
    CHECK(json::parse(brute_a.out)["read_partition"]["bits"].get<std::string>().size() == 15);

    CHECK(run_cli({"phase", frags, "--solver", "quantum"}).code == 2);
    CHECK(run_cli({"synth", "20", "40", "6", "0", "5", frags, "--format", "bam"}).code == 2);
    write_text(tmp("bad_frags.csv"), "1,0\n1,0,1\n");
    CHECK(run_cli({"phase", tmp("bad_frags.csv")}).code == 1);
}

TEST_CASE("bench smoke run") {
    write_text(tmp("spec.json"), R"({
        "family": "complete", "sizes": [12], "graph_seed": 1, "run_seeds": [0, 1],
        "R_list": [1, 10],
        "edvqe": {"inner_optimizer": {"max_iters": 40}, "qp2_optimizer": {"max_iters": 20},
                  "max_outer_iters": 3},
        "warm_start": true
    })");
    const auto csv = tmp("bench.csv");
    REQUIRE(run_cli({"bench", tmp("spec.json"), csv}).code == 0);
    std::istringstream in(slurp(csv));
    std::string line;
    std::getline(in, line);
    const auto header = split(line, ',');
    REQUIRE(header.size() == 13);
    CHECK(header[0] == "family");
    CHECK(header[4] == "A_bar");
    std::vector<std::string> metrics;
    while (std::getline(in, line)) {
        const auto cols = split(line, ',');
        REQUIRE(cols.size() == header.size());
        metrics.push_back(cols[2]);
        CHECK(cols[10] == "ok");
        const double edges = std::stod(cols[11]);
        CHECK(edges == 66);
        const auto cuts = split(cols[12], ';');
        REQUIRE(cuts.size() == 2);
        double sum = 0.0;
        for (const auto &c : cuts) {
            sum += std::stod(c);
        }
        CHECK(std::stod(cols[4]) == doctest::Approx(sum / 2 / edges).epsilon(1e-9));
    }
    CHECK(metrics == std::vector<std::string>{"GW(1)", "GW(10)", "Initial", "CNS1", "QP2", "WarmStart"});

    write_text(tmp("bad_spec.json"), R"({"family": "complete", "sizes": []})");
    CHECK(run_cli({"bench", tmp("bad_spec.json"), tmp("never.csv")}).code == 2);
}
