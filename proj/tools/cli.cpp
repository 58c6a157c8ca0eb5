#include "cli.hpp"

#include <fstream>
#include <optional>
#include <ostream>
#include <string>

#include <CLI11.hpp>

#include "edvqe/bench.hpp"
#include "edvqe/errors.hpp"
#include "edvqe/graph.hpp"
#include "edvqe/gw.hpp"
#include "edvqe/haplotype.hpp"
#include "edvqe/perturbation.hpp"
#include "edvqe/serialization.hpp"

namespace edvqe::cli {

namespace {

void emit(const Json &value, const std::string &path, std::ostream &out) {
    if (path.empty() || path == "-") {
        out << value.dump(2) << '\n';
    } else {
        save_json(path, value);
    }
}

std::ofstream open_output(const std::string &path) {
    std::ofstream file(path);
    if (!file) {
        throw Error("cannot open " + path + " for writing");
    }
    return file;
}

struct GenOptions {
    std::string family;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::string out;
    GraphParams params;
    bool integer = false;
    std::vector<double> intra;
    std::vector<double> inter;
};

struct SolveOptions {
    std::string graph;
    std::string config;
    std::uint64_t seed = 0;
    std::string out;
    std::string trace_out;
    std::string params_out;
};

struct GwOptions {
    std::string graph;
    std::string config;
    std::size_t projections = 100;
    std::size_t runs = 1;
    std::optional<std::size_t> rank;
    std::uint64_t seed = 0;
    std::string out;
};

struct WarmOptions {
    std::string graph;
    std::string config;
    std::string gw_config;
    std::size_t projections = 100;
    std::uint64_t seed = 0;
    std::string out;
};

struct PhaseOptions {
    std::string frags;
    std::string truth;
    std::string solver = "edvqe";
    std::string config;
    std::uint64_t seed = 0;
    std::string out;
};

struct BenchOptions {
    std::string spec;
    std::string out;
};

struct SynthOptions {
    std::size_t n_sites = 0;
    std::size_t n_reads = 0;
    std::size_t read_len = 0;
    double error_rate = 0.0;
    std::uint64_t seed = 0;
    std::string out;
    std::string truth_out;
    std::string format = "csv";
};

void cmd_gen(GenOptions o) {
    o.params.weight_kind = o.integer ? WeightKind::integer : WeightKind::real;
    if (!o.intra.empty()) {
        o.params.intra_range = {o.intra[0], o.intra[1]};
    }
    if (!o.inter.empty()) {
        o.params.inter_range = {o.inter[0], o.inter[1]};
    }
    const auto family = graph_family_from_string(o.family);
    write_graph(o.out, make_graph(family, o.n, o.seed, o.params));
}

void cmd_solve(const SolveOptions &o, std::ostream &out) {
    const auto graph = read_graph(o.graph);
    const auto config = o.config.empty() ? EdvqeConfig{} : edvqe_config_from_json(load_json(o.config));
    const auto result = edvqe_solve(graph, config, o.seed);
    if (!o.trace_out.empty()) {
        auto file = open_output(o.trace_out);
        write_energy_trace(file, result.initial_energy_trace);
    }
    if (!o.params_out.empty()) {
        save_json(o.params_out, params_to_json(result.initial_params));
    }
    emit(to_json(result, config), o.out, out);
}

void cmd_gw(const GwOptions &o, std::ostream &out) {
    const auto graph = read_graph(o.graph);
    auto config = o.config.empty() ? GwConfig{} : gw_config_from_json(load_json(o.config));
    config.projections = o.projections;
    if (o.rank) {
        config.rank = *o.rank;
    }
    config.validate();
    if (o.runs < 1) {
        throw InvalidConfig("runs must be at least 1");
    }
    const auto reports = gw_runs(graph, config, o.runs, o.seed);
    Json runs = Json::array();
    std::vector<double> cuts;
    std::size_t best = 0;
    for (std::size_t k = 0; k < reports.size(); ++k) {
        runs.push_back(to_json(reports[k], config));
        cuts.push_back(reports[k].best.cut);
        if (reports[k].best.cut > reports[best].best.cut) {
            best = k;
        }
    }
    Json doc{{"seed", o.seed},
             {"projections", o.projections},
             {"config", to_json(config)},
             {"edges", graph.edge_count()},
             {"best", to_json(reports[best].best)},
             {"A_bar", graph.edge_count() ? Json(normalized_avg_cut(cuts, graph.edge_count()))
                                          : Json(nullptr)},
             {"runs", runs}};
    emit(doc, o.out, out);
}

void cmd_warmstart(const WarmOptions &o, std::ostream &out) {
    const auto graph = read_graph(o.graph);
    const auto config = o.config.empty() ? EdvqeConfig{} : edvqe_config_from_json(load_json(o.config));
    auto gw_config = o.gw_config.empty() ? GwConfig{} : gw_config_from_json(load_json(o.gw_config));
    gw_config.projections = o.projections;
    gw_config.validate();
    const auto report = gw_solve(graph, gw_config, o.seed);
    const auto result = warm_start_solve(graph, report.best, config, o.seed);
    emit(Json{{"gw", to_json(report, gw_config)}, {"warm_start", to_json(result, config)}}, o.out,
         out);
}

void cmd_phase(const PhaseOptions &o, std::ostream &out) {
    const auto frags = load_fragments(o.frags);
    auto config = o.config.empty() ? PhasingConfig{} : phasing_config_from_json(load_json(o.config));
    config.solver = phasing_solver_from_string(o.solver);
    std::optional<Haplotype> truth;
    if (!o.truth.empty()) {
        truth = load_haplotype(o.truth);
    }
    const auto result = phase(frags, config, o.seed, truth);
    auto doc = to_json(result, config);
    doc["seed"] = o.seed;
    emit(doc, o.out, out);
}

void cmd_bench(const BenchOptions &o) {
    const auto spec = bench_spec_from_json(load_json(o.spec));
    const auto rows = run_bench(spec);
    auto file = open_output(o.out);
    write_bench_csv(file, rows);
}

void cmd_synth(const SynthOptions &o) {
    FragmentFormat format = FragmentFormat::csv;
    if (o.format == "sparse") {
        format = FragmentFormat::sparse;
    } else if (o.format != "csv") {
        throw InvalidConfig("format must be csv or sparse");
    }
    const auto data = gen_synthetic_diploid(o.n_sites, o.n_reads, o.read_len, o.error_rate, o.seed);
    write_fragments(o.out, data.frags, format);
    if (!o.truth_out.empty()) {
        write_haplotype(o.truth_out, data.truth_h1);
    }
}

} // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Entangled distributed VQE MaxCut solver and benchmarks", "edvqe"};
    app.require_subcommand(1);

    GenOptions gen;
    auto *gen_cmd = app.add_subcommand("gen", "Generate a graph instance");
    gen_cmd->add_option("family", gen.family, "complete | cluster | regular3")->required();
    gen_cmd->add_option("n", gen.n, "Vertex count")->required();
    gen_cmd->add_option("seed", gen.seed, "Generator seed")->required();
    gen_cmd->add_option("out", gen.out, "Output edge-list path")->required();
    gen_cmd->add_option("--w-min", gen.params.w_min, "Lower weight bound")->capture_default_str();
    gen_cmd->add_option("--w-max", gen.params.w_max, "Upper weight bound")->capture_default_str();
    gen_cmd->add_flag("--integer", gen.integer, "Integer weights");
    gen_cmd->add_option("--community-size", gen.params.community_size)->capture_default_str();
    gen_cmd->add_option("--p-inter", gen.params.p_inter)->capture_default_str();
    gen_cmd->add_option("--intra", gen.intra, "Intra-community weight range")->expected(2);
    gen_cmd->add_option("--inter", gen.inter, "Inter-community weight range")->expected(2);

    SolveOptions solve;
    auto *solve_cmd = app.add_subcommand("solve", "Run EDVQE on a graph");
    solve_cmd->add_option("graph", solve.graph, "Edge-list file")->required();
    solve_cmd->add_option("--config", solve.config, "EDVQE config JSON");
    solve_cmd->add_option("--seed", solve.seed)->capture_default_str();
    solve_cmd->add_option("--out", solve.out, "Result JSON (stdout if omitted)");
    solve_cmd->add_option("--trace-out", solve.trace_out, "Initial-phase energy trace CSV");
    solve_cmd->add_option("--params-out", solve.params_out, "Initial-phase parameters JSON");

    GwOptions gw;
    auto *gw_cmd = app.add_subcommand("gw", "Goemans-Williamson baseline");
    gw_cmd->add_option("graph", gw.graph, "Edge-list file")->required();
    gw_cmd->add_option("--R,--projections", gw.projections, "Hyperplane projections")
        ->capture_default_str();
    gw_cmd->add_option("--runs", gw.runs, "Independent runs")->capture_default_str();
    gw_cmd->add_option("--rank", gw.rank, "Embedding dimension (0 = automatic)");
    gw_cmd->add_option("--seed", gw.seed)->capture_default_str();
    gw_cmd->add_option("--config", gw.config, "GW config JSON");
    gw_cmd->add_option("--out", gw.out, "Report JSON (stdout if omitted)");

    WarmOptions warm;
    auto *warm_cmd = app.add_subcommand("warmstart", "EDVQE refinement started from GW");
    warm_cmd->add_option("graph", warm.graph, "Edge-list file")->required();
    warm_cmd->add_option("--R", warm.projections, "GW projections")->capture_default_str();
    warm_cmd->add_option("--seed", warm.seed)->capture_default_str();
    warm_cmd->add_option("--config", warm.config, "EDVQE config JSON");
    warm_cmd->add_option("--gw-config", warm.gw_config, "GW config JSON");
    warm_cmd->add_option("--out", warm.out, "Result JSON (stdout if omitted)");

    PhaseOptions ph;
    auto *phase_cmd = app.add_subcommand("phase", "Haplotype phasing from a fragment matrix");
    phase_cmd->add_option("frags", ph.frags, "Fragment file")->required();
    phase_cmd->add_option("--truth", ph.truth, "Truth haplotype file");
    phase_cmd->add_option("--solver", ph.solver, "edvqe | gw | brute")->capture_default_str();
    phase_cmd->add_option("--config", ph.config, "Phasing config JSON");
    phase_cmd->add_option("--seed", ph.seed)->capture_default_str();
    phase_cmd->add_option("--out", ph.out, "Result JSON (stdout if omitted)");

    BenchOptions bench;
    auto *bench_cmd = app.add_subcommand("bench", "Run a benchmark sweep");
    bench_cmd->add_option("spec", bench.spec, "Bench spec JSON")->required();
    bench_cmd->add_option("out", bench.out, "Output CSV")->required();

    SynthOptions synth;
    auto *synth_cmd = app.add_subcommand("synth", "Synthetic diploid fragment data");
    synth_cmd->add_option("n_sites", synth.n_sites)->required();
    synth_cmd->add_option("n_reads", synth.n_reads)->required();
    synth_cmd->add_option("read_len", synth.read_len)->required();
    synth_cmd->add_option("error_rate", synth.error_rate)->required();
    synth_cmd->add_option("seed", synth.seed)->required();
    synth_cmd->add_option("out", synth.out, "Fragment output path")->required();
    synth_cmd->add_option("--truth-out", synth.truth_out, "Truth haplotype output path");
    synth_cmd->add_option("--format", synth.format, "csv | sparse")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::CallForAllHelp &e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::ParseError &e) {
        app.exit(e, out, err);
        return 2;
    }

    try {
        if (gen_cmd->parsed()) {
            cmd_gen(gen);
        } else if (solve_cmd->parsed()) {
            cmd_solve(solve, out);
        } else if (gw_cmd->parsed()) {
            cmd_gw(gw, out);
        } else if (warm_cmd->parsed()) {
            cmd_warmstart(warm, out);
        } else if (phase_cmd->parsed()) {
            cmd_phase(ph, out);
        } else if (bench_cmd->parsed()) {
            cmd_bench(bench);
        } else if (synth_cmd->parsed()) {
            cmd_synth(synth);
        }
    } catch (const InvalidConfig &e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace edvqe::cli
