#include "edvqe/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "edvqe/errors.hpp"
#include "edvqe/rng.hpp"

namespace edvqe {

std::string to_string(GraphFamily family) {
    switch (family) {
    case GraphFamily::complete:
        return "complete";
    case GraphFamily::cluster:
        return "cluster";
    case GraphFamily::regular3:
        return "regular3";
    }
    return "unknown";
}

GraphFamily graph_family_from_string(const std::string &name) {
    if (name == "complete") {
        return GraphFamily::complete;
    }
    if (name == "cluster") {
        return GraphFamily::cluster;
    }
    if (name == "regular3") {
        return GraphFamily::regular3;
    }
    throw InvalidConfig("unknown graph family '" + name + "'");
}

WeightedGraph make_graph(GraphFamily family, std::size_t n, std::uint64_t seed,
                         const GraphParams &p) {
    switch (family) {
    case GraphFamily::complete:
        return gen_complete(n, seed, p.w_min, p.w_max, p.weight_kind);
    case GraphFamily::cluster:
        return gen_cluster(n, p.community_size, p.intra_range, p.inter_range, p.p_inter, seed,
                           p.weight_kind);
    case GraphFamily::regular3:
        return gen_regular(n, 3, seed, p.w_min, p.w_max, p.weight_kind);
    }
    throw InvalidConfig("unknown graph family");
}

void BenchSpec::validate() const {
    if (sizes.empty()) {
        throw InvalidConfig("bench sizes must not be empty");
    }
    if (run_seeds.empty()) {
        throw InvalidConfig("bench run_seeds must not be empty");
    }
    if (r_list.empty() || std::find(r_list.begin(), r_list.end(), 0u) != r_list.end()) {
        throw InvalidConfig("R_list must be non-empty with positive entries");
    }
    edvqe.validate();
    gw.validate();
}

namespace {

std::pair<double, double> read_range(const Json &j, const char *key) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw InvalidConfig(std::string(key) + " must be a [lo, hi] pair");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

template <typename T> std::vector<T> read_list(const Json &j, const char *key) {
    if (!j.is_array()) {
        throw InvalidConfig(std::string(key) + " must be a list");
    }
    std::vector<T> out;
    for (const auto &x : j) {
        if (!x.is_number_unsigned()) {
            throw InvalidConfig(std::string(key) + " entries must be non-negative integers");
        }
        out.push_back(x.get<T>());
    }
    return out;
}

double number(const Json &j, const char *key) {
    if (!j.is_number()) {
        throw InvalidConfig(std::string(key) + " must be a number");
    }
    return j.get<double>();
}

} // namespace

BenchSpec bench_spec_from_json(const Json &j) {
    static const char *const allowed[] = {
        "family",      "sizes",      "graph_seed",  "run_seeds",   "R_list",
        "edvqe",       "gw",         "run_edvqe",   "warm_start",  "w_min",
        "w_max",       "weight_kind", "community_size", "intra_range", "inter_range",
        "p_inter"};
    if (!j.is_object()) {
        throw InvalidConfig("bench spec must be a JSON object");
    }
    for (const auto &item : j.items()) {
        if (std::find_if(std::begin(allowed), std::end(allowed),
                         [&](const char *k) { return item.key() == k; }) == std::end(allowed)) {
            throw InvalidConfig("unknown key '" + item.key() + "' in bench spec");
        }
    }
    BenchSpec s;
    if (!j.contains("family") || !j.at("family").is_string()) {
        throw InvalidConfig("bench spec needs a string 'family'");
    }
    s.family = graph_family_from_string(j.at("family").get<std::string>());
    if (!j.contains("sizes")) {
        throw InvalidConfig("bench spec needs 'sizes'");
    }
    s.sizes = read_list<std::size_t>(j.at("sizes"), "sizes");
    if (j.contains("graph_seed")) {
        if (!j.at("graph_seed").is_number_unsigned()) {
            throw InvalidConfig("graph_seed must be a non-negative integer");
        }
        s.graph_seed = j.at("graph_seed").get<std::uint64_t>();
    }
    if (j.contains("run_seeds")) {
        s.run_seeds = read_list<std::uint64_t>(j.at("run_seeds"), "run_seeds");
    }
    if (j.contains("R_list")) {
        s.r_list = read_list<std::size_t>(j.at("R_list"), "R_list");
    }
    if (j.contains("edvqe")) {
        s.edvqe = edvqe_config_from_json(j.at("edvqe"));
    }
    if (j.contains("gw")) {
        s.gw = gw_config_from_json(j.at("gw"));
    }
    for (const char *flag : {"run_edvqe", "warm_start"}) {
        if (j.contains(flag)) {
            if (!j.at(flag).is_boolean()) {
                throw InvalidConfig(std::string(flag) + " must be a boolean");
            }
            (std::string(flag) == "run_edvqe" ? s.run_edvqe : s.warm_start) =
                j.at(flag).get<bool>();
        }
    }
    if (j.contains("w_min")) {
        s.graph.w_min = number(j.at("w_min"), "w_min");
    }
    if (j.contains("w_max")) {
        s.graph.w_max = number(j.at("w_max"), "w_max");
    }
    if (j.contains("weight_kind")) {
        const auto &k = j.at("weight_kind");
        if (k == "real") {
            s.graph.weight_kind = WeightKind::real;
        } else if (k == "integer") {
            s.graph.weight_kind = WeightKind::integer;
        } else {
            throw InvalidConfig("weight_kind must be \"real\" or \"integer\"");
        }
    }
    if (j.contains("community_size")) {
        if (!j.at("community_size").is_number_unsigned()) {
            throw InvalidConfig("community_size must be a positive integer");
        }
        s.graph.community_size = j.at("community_size").get<std::size_t>();
    }
    if (j.contains("intra_range")) {
        s.graph.intra_range = read_range(j.at("intra_range"), "intra_range");
    }
    if (j.contains("inter_range")) {
        s.graph.inter_range = read_range(j.at("inter_range"), "inter_range");
    }
    if (j.contains("p_inter")) {
        s.graph.p_inter = number(j.at("p_inter"), "p_inter");
    }
    s.validate();
    return s;
}

Json to_json(const BenchSpec &s) {
    return Json{{"family", to_string(s.family)},
                {"sizes", s.sizes},
                {"graph_seed", s.graph_seed},
                {"run_seeds", s.run_seeds},
                {"R_list", s.r_list},
                {"run_edvqe", s.run_edvqe},
                {"warm_start", s.warm_start},
                {"w_min", s.graph.w_min},
                {"w_max", s.graph.w_max},
                {"weight_kind", s.graph.weight_kind == WeightKind::real ? "real" : "integer"},
                {"community_size", s.graph.community_size},
                {"intra_range", {s.graph.intra_range.first, s.graph.intra_range.second}},
                {"inter_range", {s.graph.inter_range.first, s.graph.inter_range.second}},
                {"p_inter", s.graph.p_inter},
                {"edvqe", to_json(s.edvqe)},
                {"gw", to_json(s.gw)}};
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

BenchRow make_row(const BenchSpec &spec, std::size_t n, std::string metric, std::size_t r,
                  std::size_t edges) {
    BenchRow row;
    row.family = to_string(spec.family);
    row.n = n;
    row.metric = std::move(metric);
    row.r = r;
    row.edges = edges;
    return row;
}

void finish(BenchRow &row, std::vector<double> cuts, double seconds) {
    row.cuts = std::move(cuts);
    row.a_bar = normalized_avg_cut(row.cuts, row.edges);
    row.wall_time_s = seconds;
}

} // namespace

std::vector<BenchRow> run_bench(const BenchSpec &spec) {
    spec.validate();
    std::vector<BenchRow> rows;
    const std::size_t max_r = *std::max_element(spec.r_list.begin(), spec.r_list.end());
    std::vector<std::size_t> r_sorted = spec.r_list;
    std::sort(r_sorted.begin(), r_sorted.end());
    r_sorted.erase(std::unique(r_sorted.begin(), r_sorted.end()), r_sorted.end());

    for (const std::size_t n : spec.sizes) {
        std::optional<WeightedGraph> graph;
        try {
            graph = make_graph(spec.family, n, spec.graph_seed, spec.graph);
        } catch (const std::exception &e) {
            auto row = make_row(spec, n, "Graph", 0, 0);
            row.status = std::string("error: ") + e.what();
            rows.push_back(std::move(row));
            continue;
        }
        const std::size_t m = graph->edge_count();

        // GW: one embedding per run seed, rounded with nested projection
        // streams so every R reuses the same hyperplanes as gw_solve would.
        std::vector<BenchRow> gw_rows;
        for (const auto r : r_sorted) {
            gw_rows.push_back(make_row(spec, n, "GW(" + std::to_string(r) + ")", r, m));
        }
        std::vector<std::vector<double>> gw_cuts(r_sorted.size());
        std::vector<double> gw_seconds(r_sorted.size(), 0.0);
        std::vector<CutAssignment> gw_seed_solutions;
        try {
            for (const auto seed : spec.run_seeds) {
                const auto t0 = Clock::now();
                const auto embedding = bm_solve(*graph, spec.gw, derive_seed(seed, 0));
                const double embed_time = seconds_since(t0);
                for (std::size_t k = 0; k < r_sorted.size(); ++k) {
                    const auto t1 = Clock::now();
                    auto rounding =
                        hyperplane_round(embedding, r_sorted[k], *graph, derive_seed(seed, 1));
                    gw_seconds[k] += embed_time + seconds_since(t1);
                    gw_cuts[k].push_back(rounding.best.cut);
                    if (r_sorted[k] == max_r) {
                        gw_seed_solutions.push_back(std::move(rounding.best));
                    }
                }
            }
            for (std::size_t k = 0; k < r_sorted.size(); ++k) {
                finish(gw_rows[k], std::move(gw_cuts[k]), gw_seconds[k]);
            }
        } catch (const std::exception &e) {
            for (auto &row : gw_rows) {
                row.status = std::string("error: ") + e.what();
            }
            gw_seed_solutions.clear();
        }
        for (auto &row : gw_rows) {
            rows.push_back(std::move(row));
        }

        if (spec.run_edvqe) {
            auto initial = make_row(spec, n, "Initial", 0, m);
            auto cns = make_row(spec, n, "CNS1", 0, m);
            auto qp2 = make_row(spec, n, "QP2", 0, m);
            try {
                std::vector<double> c_init;
                std::vector<double> c_cns;
                std::vector<double> c_qp2;
                const auto t0 = Clock::now();
                for (const auto seed : spec.run_seeds) {
                    const auto result = edvqe_solve(*graph, spec.edvqe, seed);
                    c_init.push_back(result.initial.cut);
                    c_cns.push_back(result.cns1_stage_cut());
                    c_qp2.push_back(result.best.cut);
                }
                const double elapsed = seconds_since(t0);
                finish(initial, std::move(c_init), elapsed);
                finish(cns, std::move(c_cns), elapsed);
                finish(qp2, std::move(c_qp2), elapsed);
                cns.delta = cns.a_bar - initial.a_bar;
                qp2.delta = qp2.a_bar - cns.a_bar;
                if (initial.a_bar != 0.0) {
                    cns.pct = 100.0 * *cns.delta / initial.a_bar;
                    qp2.pct = 100.0 * *qp2.delta / initial.a_bar;
                }
            } catch (const std::exception &e) {
                for (auto *row : {&initial, &cns, &qp2}) {
                    row->status = std::string("error: ") + e.what();
                }
            }
            rows.push_back(std::move(initial));
            rows.push_back(std::move(cns));
            rows.push_back(std::move(qp2));
        }

        if (spec.warm_start) {
            auto warm = make_row(spec, n, "WarmStart", max_r, m);
            if (gw_seed_solutions.size() != spec.run_seeds.size()) {
                warm.status = "error: GW seed solutions unavailable";
            } else {
                try {
                    std::vector<double> cuts;
                    const auto t0 = Clock::now();
                    for (std::size_t k = 0; k < spec.run_seeds.size(); ++k) {
                        const auto result = warm_start_solve(*graph, gw_seed_solutions[k],
                                                             spec.edvqe, spec.run_seeds[k]);
                        cuts.push_back(result.best.cut);
                    }
                    finish(warm, std::move(cuts), seconds_since(t0));
                } catch (const std::exception &e) {
                    warm.status = std::string("error: ") + e.what();
                }
            }
            rows.push_back(std::move(warm));
        }
    }
    return rows;
}

void write_bench_csv(std::ostream &out, const std::vector<BenchRow> &rows) {
    out << "family,n,metric,R,A_bar,delta_cns1,delta_qp2,pct_cns1,pct_qp2,wall_time_s,status,"
           "edges,cuts\n";
    auto opt = [](const std::optional<double> &v) {
        std::ostringstream s;
        if (v) {
            s << std::setprecision(10) << *v;
        }
        return s.str();
    };
    for (const auto &row : rows) {
        const bool ok = row.status == "ok";
        std::string status = row.status;
        std::replace(status.begin(), status.end(), ',', ';');
        std::replace(status.begin(), status.end(), '\n', ' ');
        out << row.family << ',' << row.n << ',' << row.metric << ',';
        if (row.r > 0) {
            out << row.r;
        }
        out << ',';
        if (ok) {
            out << std::setprecision(10) << row.a_bar;
        }
        const bool is_cns = row.metric == "CNS1";
        const bool is_qp2 = row.metric == "QP2";
        out << ',' << (is_cns ? opt(row.delta) : "") << ',' << (is_qp2 ? opt(row.delta) : "")
            << ',' << (is_cns ? opt(row.pct) : "") << ',' << (is_qp2 ? opt(row.pct) : "") << ','
            << std::setprecision(6) << row.wall_time_s << ',' << status << ',' << row.edges
            << ',';
        for (std::size_t k = 0; k < row.cuts.size(); ++k) {
            out << (k ? ";" : "") << std::setprecision(17) << row.cuts[k];
        }
        out << '\n';
    }
}

} // namespace edvqe
