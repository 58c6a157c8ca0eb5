#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "edvqe/dvqe.hpp"
#include "edvqe/gw.hpp"
#include "edvqe/haplotype.hpp"
#include "edvqe/perturbation.hpp"

namespace edvqe {

using Json = nlohmann::ordered_json;

/// Parses a JSON file; malformed JSON raises ParseError.
Json load_json(const std::string &path);
void save_json(const std::string &path, const Json &value);

// Config readers start from `base` and override only the keys present.
// Unknown keys and ill-typed values raise InvalidConfig.

Json to_json(const OptimizerConfig &config);
OptimizerConfig optimizer_config_from_json(const Json &j, OptimizerConfig base = {});

Json to_json(const EdvqeConfig &config);
EdvqeConfig edvqe_config_from_json(const Json &j, EdvqeConfig base = {});

Json to_json(const GwConfig &config);
GwConfig gw_config_from_json(const Json &j, GwConfig base = {});

/// Keys: "mode" ("signed" or "discordant"), "edvqe", "gw".
/// The solver is chosen separately.
PhasingConfig phasing_config_from_json(const Json &j, PhasingConfig base = {});
Json to_json(const PhasingConfig &config);

std::string to_string(PhasingSolver solver);
PhasingSolver phasing_solver_from_string(const std::string &name);

Json to_json(const CutAssignment &assignment);
Json to_json(const SolveResult &result, const EdvqeConfig &config);
Json to_json(const GwReport &report, const GwConfig &config);
Json to_json(const PhasingResult &result, const PhasingConfig &config);

/// {"0": [...], "1": [...]} keyed by block index.
Json params_to_json(const BlockParams &params);

/// "iter,energy" rows, iteration 0 being the starting point.
void write_energy_trace(std::ostream &out, const std::vector<double> &trace);

} // namespace edvqe
