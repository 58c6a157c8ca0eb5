#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "edvqe/graph.hpp"
#include "edvqe/gw.hpp"
#include "edvqe/perturbation.hpp"

namespace edvqe {

/// Allele call at one site: +1 (H1 allele), -1 (H2 allele).
struct SiteCall {
    std::size_t site;
    std::int8_t value;
};

/// Reads x SNP sites, stored sparsely (uninformative entries omitted).
class FragmentMatrix {
public:
    FragmentMatrix() = default;
    /// Every read needs at least one call; calls must be +/-1 at distinct
    /// sites below n_sites. Calls are sorted by site.
    FragmentMatrix(std::size_t n_sites, std::vector<std::vector<SiteCall>> reads);

    std::size_t n_reads() const { return reads_.size(); }
    std::size_t n_sites() const { return n_sites_; }
    const std::vector<SiteCall> &read(std::size_t r) const { return reads_[r]; }
    const std::vector<std::vector<SiteCall>> &reads() const { return reads_; }

    /// Sites covered by at least one read.
    std::vector<bool> covered_sites() const;

private:
    std::size_t n_sites_ = 0;
    std::vector<std::vector<SiteCall>> reads_;
};

/// Per-site haplotype: +1, -1, or 0 for unphased.
using Haplotype = std::vector<std::int8_t>;

enum class FragmentFormat { csv, sparse };

/// Dense rows ("1,-1,0" or whitespace separated) or sparse rows
/// ("read_id site:val site:val ..."), detected from the first data line.
FragmentMatrix read_fragments(std::istream &in);
FragmentMatrix load_fragments(const std::string &path);
void write_fragments(std::ostream &out, const FragmentMatrix &frags,
                     FragmentFormat format = FragmentFormat::csv);
void write_fragments(const std::string &path, const FragmentMatrix &frags,
                     FragmentFormat format = FragmentFormat::csv);

/// Truth file: one line of +1/-1 (0 allowed for unknown) separated by spaces.
Haplotype load_haplotype(const std::string &path);
void write_haplotype(const std::string &path, const Haplotype &h);

/// "10?1..." rendering: 1 for +1, 0 for -1, ? for unphased.
std::string haplotype_to_string(const Haplotype &h);

enum class ConflictMode { discordant, signed_weight };

/// Reads become vertices. For each pair with shared sites: d discordant,
/// a concordant calls. discordant: w = d (edge iff d > 0);
/// signed_weight: w = d - a (edge iff d != a).
WeightedGraph build_conflict_graph(const FragmentMatrix &frags, ConflictMode mode);

/// Groups of reads connected through shared sites, each sorted.
std::vector<std::vector<std::size_t>> overlap_components(const FragmentMatrix &frags);

/// Majority vote per site. h1 comes from partition-0 reads; on a tie or no
/// coverage it is the complement of partition 1's vote; otherwise unphased.
std::pair<Haplotype, Haplotype> consensus(const FragmentMatrix &frags,
                                          std::span<const std::uint8_t> read_partition);

/// Sum over reads of min(mismatches vs h1, mismatches vs h2) on phased sites.
std::size_t mec_score(const FragmentMatrix &frags, const Haplotype &h1, const Haplotype &h2);

/// Fraction of adjacent common phased sites where agreement with the truth
/// flips; absent with fewer than 2 common phased sites.
std::optional<double> switch_error_rate(const Haplotype &predicted, const Haplotype &truth);

/// min(d, n - d) / n over n common phased sites; absent when n = 0.
std::optional<double> hamming_error_rate(const Haplotype &predicted, const Haplotype &truth);

/// Phased sites / sites covered by at least one read.
double completeness(const Haplotype &predicted, const FragmentMatrix &frags);

enum class PhasingSolver { edvqe, gw, brute };

struct PhasingConfig {
    PhasingSolver solver = PhasingSolver::edvqe;
    ConflictMode mode = ConflictMode::signed_weight;
    EdvqeConfig edvqe{};
    GwConfig gw{};
};

struct PhasingResult {
    CutAssignment read_partition;
    Haplotype h1;
    Haplotype h2;
    std::size_t mec = 0;
    double completeness = 0.0;
    std::optional<double> switch_error;
    std::optional<double> hamming_error;
    std::size_t components = 0;
    /// Layout size of the largest component under the EDVQE solver.
    std::size_t max_subsystems = 0;
};

/// Conflict graph, MaxCut per overlap component, consensus and metrics.
/// Truth metrics are filled when `truth` is given.
PhasingResult phase(const FragmentMatrix &frags, const PhasingConfig &config, std::uint64_t seed,
                    const std::optional<Haplotype> &truth = std::nullopt);

struct SyntheticDiploid {
    FragmentMatrix frags;
    Haplotype truth_h1;
};

/// Random truth haplotype; each read copies H1 or H2 over a random window of
/// read_len sites with calls flipped independently at error_rate. Reads are
/// ordered by start site.
SyntheticDiploid gen_synthetic_diploid(std::size_t n_sites, std::size_t n_reads,
                                       std::size_t read_len, double error_rate,
                                       std::uint64_t seed);

/// Multi-trial summary against a reference cut (best cut, average cut,
/// fraction of trials reaching the reference, mean cut / reference).
struct TrialSummary {
    double best_cut = 0.0;
    double avg_cut = 0.0;
    double success_rate = 0.0;
    double avg_approx_ratio = 0.0;
};

TrialSummary summarize_trials(std::span<const double> cuts, double reference_cut);

} // namespace edvqe
