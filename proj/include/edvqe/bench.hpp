#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "edvqe/graph.hpp"
#include "edvqe/gw.hpp"
#include "edvqe/perturbation.hpp"
#include "edvqe/serialization.hpp"

namespace edvqe {

enum class GraphFamily { complete, cluster, regular3 };

std::string to_string(GraphFamily family);
GraphFamily graph_family_from_string(const std::string &name);

/// Generator parameters shared by the CLI `gen` command and the bench runner.
struct GraphParams {
    double w_min = 1.0;
    double w_max = 10.0;
    WeightKind weight_kind = WeightKind::real;
    std::size_t community_size = 10;
    std::pair<double, double> intra_range{5.0, 10.0};
    std::pair<double, double> inter_range{1.0, 3.0};
    double p_inter = 0.3;
};

WeightedGraph make_graph(GraphFamily family, std::size_t n, std::uint64_t seed,
                         const GraphParams &params = {});

struct BenchSpec {
    GraphFamily family = GraphFamily::complete;
    std::vector<std::size_t> sizes;
    std::uint64_t graph_seed = 3587;
    std::vector<std::uint64_t> run_seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::vector<std::size_t> r_list{1, 100};
    GraphParams graph{};
    EdvqeConfig edvqe{};
    GwConfig gw{};
    bool run_edvqe = true;
    bool warm_start = false;

    void validate() const;
};

BenchSpec bench_spec_from_json(const Json &j);
Json to_json(const BenchSpec &spec);

struct BenchRow {
    std::string family;
    std::size_t n = 0;
    std::string metric;
    /// Projection count for GW and warm-start rows, 0 otherwise.
    std::size_t r = 0;
    std::size_t edges = 0;
    /// Best cut of each run, in run-seed order.
    std::vector<double> cuts;
    double a_bar = 0.0;
    /// Stage gains in normalized cut units; set on the CNS1 and QP2 rows.
    std::optional<double> delta;
    std::optional<double> pct;
    double wall_time_s = 0.0;
    std::string status = "ok";
};

/// Rows per size: GW(R) for each R, then Initial, CNS1, QP2 and optionally
/// WarmStart. A failing group yields rows whose status carries the error.
std::vector<BenchRow> run_bench(const BenchSpec &spec);

/// Header: family,n,metric,R,A_bar,delta_cns1,delta_qp2,pct_cns1,pct_qp2,
/// wall_time_s,status,edges,cuts (cuts joined with ';').
void write_bench_csv(std::ostream &out, const std::vector<BenchRow> &rows);

} // namespace edvqe
