#include "edvqe/haplotype.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "edvqe/errors.hpp"
#include "edvqe/rng.hpp"

namespace edvqe {

FragmentMatrix::FragmentMatrix(std::size_t n_sites, std::vector<std::vector<SiteCall>> reads)
    : n_sites_(n_sites), reads_(std::move(reads)) {
    for (std::size_t r = 0; r < reads_.size(); ++r) {
        auto &calls = reads_[r];
        if (calls.empty()) {
            throw ValueError("read " + std::to_string(r) + " covers no site");
        }
        std::sort(calls.begin(), calls.end(),
                  [](const SiteCall &a, const SiteCall &b) { return a.site < b.site; });
        for (std::size_t k = 0; k < calls.size(); ++k) {
            if (calls[k].site >= n_sites_) {
                throw ValueError("read " + std::to_string(r) + " has a site out of range");
            }
            if (calls[k].value != 1 && calls[k].value != -1) {
                throw ValueError("read " + std::to_string(r) + " has a call other than +/-1");
            }
            if (k > 0 && calls[k].site == calls[k - 1].site) {
                throw ValueError("read " + std::to_string(r) + " repeats a site");
            }
        }
    }
}

std::vector<bool> FragmentMatrix::covered_sites() const {
    std::vector<bool> covered(n_sites_, false);
    for (const auto &read : reads_) {
        for (const auto &c : read) {
            covered[c.site] = true;
        }
    }
    return covered;
}

namespace {

bool skip_line(const std::string &line) {
    const auto pos = line.find_first_not_of(" \t\r");
    return pos == std::string::npos || line[pos] == '#';
}

long long parse_integer(const std::string &token, std::size_t lineno) {
    long long value = 0;
    const char *first = token.data();
    const char *last = token.data() + token.size();
    if (!token.empty() && token[0] == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || first == last) {
        throw ParseError("not an integer: '" + token + "'", lineno);
    }
    return value;
}

std::vector<std::string> split_dense(const std::string &line) {
    std::string normalized = line;
    std::replace(normalized.begin(), normalized.end(), ',', ' ');
    std::istringstream in(normalized);
    std::vector<std::string> tokens;
    std::string t;
    while (in >> t) {
        tokens.push_back(t);
    }
    return tokens;
}

} // namespace

FragmentMatrix read_fragments(std::istream &in) {
    std::string line;
    std::size_t lineno = 0;
    std::optional<FragmentFormat> format;
    std::size_t width = 0;
    std::size_t max_site = 0;
    std::vector<std::vector<SiteCall>> reads;
    while (std::getline(in, line)) {
        ++lineno;
        if (skip_line(line)) {
            continue;
        }
        if (!format) {
            format = line.find(':') != std::string::npos ? FragmentFormat::sparse
                                                         : FragmentFormat::csv;
        }
        std::vector<SiteCall> calls;
        if (*format == FragmentFormat::csv) {
            const auto tokens = split_dense(line);
            if (reads.empty()) {
                width = tokens.size();
            } else if (tokens.size() != width) {
                throw ParseError("row has " + std::to_string(tokens.size()) +
                                     " entries, expected " + std::to_string(width),
                                 lineno);
            }
            for (std::size_t s = 0; s < tokens.size(); ++s) {
                const auto v = parse_integer(tokens[s], lineno);
                if (v != 0 && v != 1 && v != -1) {
                    throw ValueError("entry must be 1, -1 or 0, got " + tokens[s], lineno);
                }
                if (v != 0) {
                    calls.push_back({s, static_cast<std::int8_t>(v)});
                }
            }
        } else {
            std::istringstream fields(line);
            std::string token;
            fields >> token; // read id
            while (fields >> token) {
                const auto colon = token.find(':');
                if (colon == std::string::npos) {
                    throw ParseError("expected site:value, got '" + token + "'", lineno);
                }
                const auto site = parse_integer(token.substr(0, colon), lineno);
                const auto v = parse_integer(token.substr(colon + 1), lineno);
                if (site < 0) {
                    throw ValueError("negative site index", lineno);
                }
                if (v != 0 && v != 1 && v != -1) {
                    throw ValueError("entry must be 1, -1 or 0, got " + token, lineno);
                }
                if (v != 0) {
                    calls.push_back({static_cast<std::size_t>(site), static_cast<std::int8_t>(v)});
                    max_site = std::max(max_site, static_cast<std::size_t>(site));
                }
            }
        }
        if (calls.empty()) {
            throw ValueError("read covers no site", lineno);
        }
        reads.push_back(std::move(calls));
    }
    if (reads.empty()) {
        throw ParseError("empty fragment file");
    }
    const std::size_t n_sites = *format == FragmentFormat::csv ? width : max_site + 1;
    try {
        return FragmentMatrix(n_sites, std::move(reads));
    } catch (const ValueError &e) {
        throw ValueError(e.what());
    }
}

FragmentMatrix load_fragments(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path);
    }
    return read_fragments(in);
}

void write_fragments(std::ostream &out, const FragmentMatrix &frags, FragmentFormat format) {
    for (std::size_t r = 0; r < frags.n_reads(); ++r) {
        const auto &calls = frags.read(r);
        if (format == FragmentFormat::sparse) {
            out << r;
            for (const auto &c : calls) {
                out << ' ' << c.site << ':' << static_cast<int>(c.value);
            }
            out << '\n';
            continue;
        }
        std::vector<int> row(frags.n_sites(), 0);
        for (const auto &c : calls) {
            row[c.site] = c.value;
        }
        for (std::size_t s = 0; s < row.size(); ++s) {
            out << (s ? "," : "") << row[s];
        }
        out << '\n';
    }
}

void write_fragments(const std::string &path, const FragmentMatrix &frags, FragmentFormat format) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot open " + path + " for writing");
    }
    write_fragments(out, frags, format);
}

Haplotype load_haplotype(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path);
    }
    Haplotype h;
    std::string token;
    while (in >> token) {
        const auto v = parse_integer(token, 0);
        if (v != 0 && v != 1 && v != -1) {
            throw ValueError("haplotype entries must be 1, -1 or 0");
        }
        h.push_back(static_cast<std::int8_t>(v));
    }
    if (h.empty()) {
        throw ParseError("empty haplotype file");
    }
    return h;
}

void write_haplotype(const std::string &path, const Haplotype &h) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot open " + path + " for writing");
    }
    for (std::size_t s = 0; s < h.size(); ++s) {
        out << (s ? " " : "") << static_cast<int>(h[s]);
    }
    out << '\n';
}

std::string haplotype_to_string(const Haplotype &h) {
    std::string s(h.size(), '?');
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (h[i] > 0) {
            s[i] = '1';
        } else if (h[i] < 0) {
            s[i] = '0';
        }
    }
    return s;
}

WeightedGraph build_conflict_graph(const FragmentMatrix &frags, ConflictMode mode) {
    const std::size_t n = frags.n_reads();
    // Reads sorted by first site let the pair scan stop once windows separate.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::size_t> first(n);
    std::vector<std::size_t> last(n);
    for (std::size_t r = 0; r < n; ++r) {
        first[r] = frags.read(r).front().site;
        last[r] = frags.read(r).back().site;
    }
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (last[i] < first[j] || last[j] < first[i]) {
                continue;
            }
            const auto &a = frags.read(i);
            const auto &b = frags.read(j);
            long long discordant = 0;
            long long concordant = 0;
            std::size_t x = 0;
            std::size_t y = 0;
            while (x < a.size() && y < b.size()) {
                if (a[x].site < b[y].site) {
                    ++x;
                } else if (b[y].site < a[x].site) {
                    ++y;
                } else {
                    (a[x].value == b[y].value ? concordant : discordant) += 1;
                    ++x;
                    ++y;
                }
            }
            if (mode == ConflictMode::discordant) {
                if (discordant > 0) {
                    edges.push_back({i, j, static_cast<double>(discordant)});
                }
            } else if (discordant != concordant) {
                edges.push_back({i, j, static_cast<double>(discordant - concordant)});
            }
        }
    }
    return WeightedGraph(n, std::move(edges));
}

std::vector<std::vector<std::size_t>> overlap_components(const FragmentMatrix &frags) {
    const std::size_t n = frags.n_reads();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    // Union every read with the first read seen at each of its sites.
    std::vector<std::size_t> owner(frags.n_sites(), n);
    for (std::size_t r = 0; r < n; ++r) {
        for (const auto &c : frags.read(r)) {
            if (owner[c.site] == n) {
                owner[c.site] = r;
            } else {
                const auto ra = find(r);
                const auto rb = find(owner[c.site]);
                if (ra != rb) {
                    parent[std::max(ra, rb)] = std::min(ra, rb);
                }
            }
        }
    }
    std::vector<std::vector<std::size_t>> groups;
    std::vector<std::size_t> index(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        const auto root = find(r);
        if (index[root] == n) {
            index[root] = groups.size();
            groups.emplace_back();
        }
        groups[index[root]].push_back(r);
    }
    return groups;
}

std::pair<Haplotype, Haplotype> consensus(const FragmentMatrix &frags,
                                          std::span<const std::uint8_t> read_partition) {
    if (read_partition.size() != frags.n_reads()) {
        throw DimensionError("partition length does not match the read count");
    }
    std::vector<long long> vote0(frags.n_sites(), 0);
    std::vector<long long> vote1(frags.n_sites(), 0);
    for (std::size_t r = 0; r < frags.n_reads(); ++r) {
        auto &vote = read_partition[r] ? vote1 : vote0;
        for (const auto &c : frags.read(r)) {
            vote[c.site] += c.value;
        }
    }
    Haplotype h1(frags.n_sites(), 0);
    Haplotype h2(frags.n_sites(), 0);
    for (std::size_t s = 0; s < frags.n_sites(); ++s) {
        if (vote0[s] != 0) {
            h1[s] = vote0[s] > 0 ? 1 : -1;
        } else if (vote1[s] != 0) {
            h1[s] = vote1[s] > 0 ? -1 : 1;
        }
        h2[s] = static_cast<std::int8_t>(-h1[s]);
    }
    return {h1, h2};
}

std::size_t mec_score(const FragmentMatrix &frags, const Haplotype &h1, const Haplotype &h2) {
    if (h1.size() != frags.n_sites() || h2.size() != frags.n_sites()) {
        throw DimensionError("haplotype length does not match the site count");
    }
    std::size_t total = 0;
    for (const auto &read : frags.reads()) {
        std::size_t miss1 = 0;
        std::size_t miss2 = 0;
        for (const auto &c : read) {
            if (h1[c.site] != 0 && h1[c.site] != c.value) {
                ++miss1;
            }
            if (h2[c.site] != 0 && h2[c.site] != c.value) {
                ++miss2;
            }
        }
        total += std::min(miss1, miss2);
    }
    return total;
}

namespace {

std::vector<bool> agreement(const Haplotype &predicted, const Haplotype &truth) {
    if (predicted.size() != truth.size()) {
        throw DimensionError("haplotypes cover different site counts");
    }
    std::vector<bool> agree;
    for (std::size_t s = 0; s < predicted.size(); ++s) {
        if (predicted[s] != 0 && truth[s] != 0) {
            agree.push_back(predicted[s] == truth[s]);
        }
    }
    return agree;
}

} // namespace

std::optional<double> switch_error_rate(const Haplotype &predicted, const Haplotype &truth) {
    const auto agree = agreement(predicted, truth);
    if (agree.size() < 2) {
        return std::nullopt;
    }
    std::size_t switches = 0;
    for (std::size_t k = 1; k < agree.size(); ++k) {
        if (agree[k] != agree[k - 1]) {
            ++switches;
        }
    }
    return static_cast<double>(switches) / static_cast<double>(agree.size() - 1);
}

std::optional<double> hamming_error_rate(const Haplotype &predicted, const Haplotype &truth) {
    const auto agree = agreement(predicted, truth);
    if (agree.empty()) {
        return std::nullopt;
    }
    const auto n = agree.size();
    const auto d = static_cast<std::size_t>(std::count(agree.begin(), agree.end(), false));
    return static_cast<double>(std::min(d, n - d)) / static_cast<double>(n);
}

double completeness(const Haplotype &predicted, const FragmentMatrix &frags) {
    if (frags.n_reads() == 0) {
        throw InvalidInput("completeness is undefined without reads");
    }
    if (predicted.size() != frags.n_sites()) {
        throw DimensionError("haplotype length does not match the site count");
    }
    const auto covered = frags.covered_sites();
    std::size_t n_covered = 0;
    std::size_t n_phased = 0;
    for (std::size_t s = 0; s < covered.size(); ++s) {
        if (covered[s]) {
            ++n_covered;
            if (predicted[s] != 0) {
                ++n_phased;
            }
        }
    }
    return static_cast<double>(n_phased) / static_cast<double>(n_covered);
}

PhasingResult phase(const FragmentMatrix &frags, const PhasingConfig &config, std::uint64_t seed,
                    const std::optional<Haplotype> &truth) {
    const auto graph = build_conflict_graph(frags, config.mode);
    const auto groups = overlap_components(frags);
    const std::size_t n = frags.n_reads();

    std::vector<std::size_t> group_of(n);
    std::vector<std::size_t> local(n);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (std::size_t k = 0; k < groups[g].size(); ++k) {
            group_of[groups[g][k]] = g;
            local[groups[g][k]] = k;
        }
    }
    std::vector<std::vector<Edge>> group_edges(groups.size());
    for (const auto &e : graph.edges()) {
        group_edges[group_of[e.u]].push_back({local[e.u], local[e.v], e.w});
    }

    PhasingResult result;
    result.components = groups.size();
    Bits bits(n, 0);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const auto &members = groups[g];
        if (members.size() < 2) {
            continue;
        }
        const WeightedGraph sub(members.size(), std::move(group_edges[g]));
        const auto sub_seed = derive_seed(seed, g);
        CutAssignment solved;
        switch (config.solver) {
        case PhasingSolver::brute:
            solved = brute_force_maxcut(sub);
            break;
        case PhasingSolver::gw:
            solved = gw_solve(sub, config.gw, sub_seed).best;
            break;
        case PhasingSolver::edvqe: {
            solved = edvqe_solve(sub, config.edvqe, sub_seed).best;
            const auto blocks = (members.size() + config.edvqe.subsystem_size - 1) /
                                config.edvqe.subsystem_size;
            result.max_subsystems = std::max(result.max_subsystems, blocks);
            break;
        }
        }
        for (std::size_t k = 0; k < members.size(); ++k) {
            bits[members[k]] = solved.bits[k];
        }
    }
    result.read_partition = make_assignment(graph, std::move(bits));
    std::tie(result.h1, result.h2) = consensus(frags, result.read_partition.bits);
    result.mec = mec_score(frags, result.h1, result.h2);
    result.completeness = completeness(result.h1, frags);
    if (truth) {
        result.switch_error = switch_error_rate(result.h1, *truth);
        result.hamming_error = hamming_error_rate(result.h1, *truth);
    }
    return result;
}

SyntheticDiploid gen_synthetic_diploid(std::size_t n_sites, std::size_t n_reads,
                                       std::size_t read_len, double error_rate,
                                       std::uint64_t seed) {
    if (n_sites < 1) {
        throw InvalidConfig("need at least one site");
    }
    if (read_len < 2) {
        throw InvalidConfig("read length must be at least 2");
    }
    if (!(error_rate >= 0.0 && error_rate <= 1.0)) {
        throw InvalidConfig("error rate must lie in [0, 1]");
    }
    const std::size_t len = std::min(read_len, n_sites);
    Rng rng(seed);
    SyntheticDiploid out;
    out.truth_h1.resize(n_sites);
    for (auto &x : out.truth_h1) {
        x = rng.bernoulli(0.5) ? 1 : -1;
    }
    std::vector<std::vector<SiteCall>> reads;
    reads.reserve(n_reads);
    for (std::size_t r = 0; r < n_reads; ++r) {
        const int sign = rng.bernoulli(0.5) ? -1 : 1;
        const std::size_t start = rng.below(n_sites - len + 1);
        std::vector<SiteCall> calls;
        calls.reserve(len);
        for (std::size_t s = start; s < start + len; ++s) {
            int value = sign * out.truth_h1[s];
            if (rng.bernoulli(error_rate)) {
                value = -value;
            }
            calls.push_back({s, static_cast<std::int8_t>(value)});
        }
        reads.push_back(std::move(calls));
    }
    // Aligned fragments are listed by position.
    std::stable_sort(reads.begin(), reads.end(),
                     [](const auto &a, const auto &b) { return a.front().site < b.front().site; });
    out.frags = FragmentMatrix(n_sites, std::move(reads));
    return out;
}

TrialSummary summarize_trials(std::span<const double> cuts, double reference_cut) {
    if (cuts.empty()) {
        throw InvalidInput("no trials to summarize");
    }
    if (!(reference_cut > 0.0)) {
        throw InvalidInput("reference cut must be positive");
    }
    const double tol = 1e-9 * reference_cut;
    TrialSummary s;
    s.best_cut = *std::max_element(cuts.begin(), cuts.end());
    std::size_t hits = 0;
    for (double c : cuts) {
        s.avg_cut += c;
        s.avg_approx_ratio += c / reference_cut;
        if (c >= reference_cut - tol) {
            ++hits;
        }
    }
    const auto m = static_cast<double>(cuts.size());
    s.avg_cut /= m;
    s.avg_approx_ratio /= m;
    s.success_rate = static_cast<double>(hits) / m;
    return s;
}

} // namespace edvqe
