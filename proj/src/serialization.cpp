#include "edvqe/serialization.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <iomanip>
#include <ostream>

#include "edvqe/errors.hpp"

namespace edvqe {

Json load_json(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path);
    }
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error &e) {
        throw ParseError(path + ": " + e.what());
    }
}

void save_json(const std::string &path, const Json &value) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot open " + path + " for writing");
    }
    out << value.dump(2) << '\n';
}

namespace {

void check_keys(const Json &j, std::initializer_list<const char *> allowed, const char *what) {
    if (!j.is_object()) {
        throw InvalidConfig(std::string(what) + " must be a JSON object");
    }
    for (const auto &item : j.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(),
                                       [&](const char *k) { return item.key() == k; });
        if (!known) {
            throw InvalidConfig(std::string("unknown key '") + item.key() + "' in " + what);
        }
    }
}

template <typename T> void read_field(const Json &j, const char *key, T &out) {
    const auto it = j.find(key);
    if (it == j.end()) {
        return;
    }
    try {
        if constexpr (std::is_unsigned_v<T>) {
            if (!it->is_number_unsigned()) {
                throw InvalidConfig(std::string("'") + key + "' must be a non-negative integer");
            }
        } else if constexpr (std::is_same_v<T, bool>) {
            if (!it->is_boolean()) {
                throw InvalidConfig(std::string("'") + key + "' must be a boolean");
            }
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!it->is_number()) {
                throw InvalidConfig(std::string("'") + key + "' must be a number");
            }
        }
        out = it->template get<T>();
    } catch (const nlohmann::json::exception &e) {
        throw InvalidConfig(std::string("bad value for '") + key + "': " + e.what());
    }
}

std::string to_string(GradientMethod m) {
    return m == GradientMethod::adjoint ? "adjoint" : "parameter_shift";
}

std::string to_string(ConflictMode m) {
    return m == ConflictMode::signed_weight ? "signed" : "discordant";
}

Json optional_number(const std::optional<double> &value) {
    return value ? Json(*value) : Json(nullptr);
}

} // namespace

Json to_json(const OptimizerConfig &c) {
    return Json{{"learning_rate", c.learning_rate},
                {"beta1", c.beta1},
                {"beta2", c.beta2},
                {"epsilon", c.epsilon},
                {"max_iters", c.max_iters},
                {"grad_tol", c.grad_tol},
                {"energy_tol", c.energy_tol},
                {"patience", c.patience},
                {"gradient", to_string(c.gradient)}};
}

OptimizerConfig optimizer_config_from_json(const Json &j, OptimizerConfig c) {
    check_keys(j,
               {"learning_rate", "beta1", "beta2", "epsilon", "max_iters", "grad_tol",
                "energy_tol", "patience", "gradient"},
               "optimizer config");
    read_field(j, "learning_rate", c.learning_rate);
    read_field(j, "beta1", c.beta1);
    read_field(j, "beta2", c.beta2);
    read_field(j, "epsilon", c.epsilon);
    read_field(j, "max_iters", c.max_iters);
    read_field(j, "grad_tol", c.grad_tol);
    read_field(j, "energy_tol", c.energy_tol);
    read_field(j, "patience", c.patience);
    if (j.contains("gradient")) {
        const auto &g = j.at("gradient");
        if (g == "adjoint") {
            c.gradient = GradientMethod::adjoint;
        } else if (g == "parameter_shift") {
            c.gradient = GradientMethod::parameter_shift;
        } else {
            throw InvalidConfig("gradient must be \"adjoint\" or \"parameter_shift\"");
        }
    }
    c.validate();
    return c;
}

Json to_json(const EdvqeConfig &c) {
    return Json{{"subsystem_size", c.subsystem_size},
                {"ansatz_layers", c.ansatz_layers},
                {"m_samples", c.m_samples},
                {"outer_patience", c.outer_patience},
                {"max_outer_iters", c.max_outer_iters},
                {"theta_init_halfwidth", c.theta_init_halfwidth},
                {"pair_budget", c.pair_budget ? Json(*c.pair_budget) : Json(nullptr)},
                {"inner_optimizer", to_json(c.inner_optimizer)},
                {"qp2_optimizer", to_json(c.qp2_optimizer)}};
}

EdvqeConfig edvqe_config_from_json(const Json &j, EdvqeConfig c) {
    check_keys(j,
               {"subsystem_size", "ansatz_layers", "m_samples", "outer_patience",
                "max_outer_iters", "theta_init_halfwidth", "pair_budget", "inner_optimizer",
                "qp2_optimizer"},
               "edvqe config");
    read_field(j, "subsystem_size", c.subsystem_size);
    read_field(j, "ansatz_layers", c.ansatz_layers);
    read_field(j, "m_samples", c.m_samples);
    read_field(j, "outer_patience", c.outer_patience);
    read_field(j, "max_outer_iters", c.max_outer_iters);
    read_field(j, "theta_init_halfwidth", c.theta_init_halfwidth);
    if (j.contains("pair_budget")) {
        if (j.at("pair_budget").is_null()) {
            c.pair_budget.reset();
        } else {
            std::size_t budget = 0;
            read_field(j, "pair_budget", budget);
            c.pair_budget = budget;
        }
    }
    if (j.contains("inner_optimizer")) {
        c.inner_optimizer = optimizer_config_from_json(j.at("inner_optimizer"), c.inner_optimizer);
    }
    if (j.contains("qp2_optimizer")) {
        c.qp2_optimizer = optimizer_config_from_json(j.at("qp2_optimizer"), c.qp2_optimizer);
    }
    c.validate();
    return c;
}

Json to_json(const GwConfig &c) {
    return Json{{"rank", c.rank},
                {"ascent_iters", c.ascent_iters},
                {"ascent_lr", c.ascent_lr},
                {"restarts", c.restarts},
                {"projections", c.projections}};
}

GwConfig gw_config_from_json(const Json &j, GwConfig c) {
    check_keys(j, {"rank", "ascent_iters", "ascent_lr", "restarts", "projections"}, "gw config");
    read_field(j, "rank", c.rank);
    read_field(j, "ascent_iters", c.ascent_iters);
    read_field(j, "ascent_lr", c.ascent_lr);
    read_field(j, "restarts", c.restarts);
    read_field(j, "projections", c.projections);
    c.validate();
    return c;
}

std::string to_string(PhasingSolver solver) {
    switch (solver) {
    case PhasingSolver::edvqe:
        return "edvqe";
    case PhasingSolver::gw:
        return "gw";
    case PhasingSolver::brute:
        return "brute";
    }
    return "unknown";
}

PhasingSolver phasing_solver_from_string(const std::string &name) {
    if (name == "edvqe") {
        return PhasingSolver::edvqe;
    }
    if (name == "gw") {
        return PhasingSolver::gw;
    }
    if (name == "brute") {
        return PhasingSolver::brute;
    }
    throw InvalidConfig("unknown phasing solver '" + name + "'");
}

PhasingConfig phasing_config_from_json(const Json &j, PhasingConfig c) {
    check_keys(j, {"mode", "edvqe", "gw"}, "phasing config");
    if (j.contains("mode")) {
        const auto &m = j.at("mode");
        if (m == "signed") {
            c.mode = ConflictMode::signed_weight;
        } else if (m == "discordant") {
            c.mode = ConflictMode::discordant;
        } else {
            throw InvalidConfig("mode must be \"signed\" or \"discordant\"");
        }
    }
    if (j.contains("edvqe")) {
        c.edvqe = edvqe_config_from_json(j.at("edvqe"), c.edvqe);
    }
    if (j.contains("gw")) {
        c.gw = gw_config_from_json(j.at("gw"), c.gw);
    }
    return c;
}

Json to_json(const PhasingConfig &c) {
    return Json{{"solver", to_string(c.solver)},
                {"mode", to_string(c.mode)},
                {"edvqe", to_json(c.edvqe)},
                {"gw", to_json(c.gw)}};
}

Json to_json(const CutAssignment &a) {
    return Json{{"bits", bits_to_string(a.bits)}, {"cut", a.cut}};
}

Json to_json(const SolveResult &r, const EdvqeConfig &config) {
    Json iterations = Json::array();
    for (const auto &it : r.per_outer_iteration) {
        iterations.push_back({{"after_cns1", it.after_cns1}, {"after_qp2", it.after_qp2}});
    }
    return Json{{"seed", r.seed},
                {"config", to_json(config)},
                {"initial", to_json(r.initial)},
                {"best", to_json(r.best)},
                {"cns1_stage_cut", r.cns1_stage_cut()},
                {"delta_cns1", r.delta_cns1()},
                {"delta_qp2", r.delta_qp2()},
                {"iterations_run", r.iterations_run},
                {"outer_iterations", iterations},
                {"initial_energy_trace_length", r.initial_energy_trace.size()}};
}

Json to_json(const GwReport &r, const GwConfig &config) {
    return Json{{"seed", r.seed},
                {"config", to_json(config)},
                {"rank", r.rank},
                {"projections", r.projections},
                {"relaxation_value", r.relaxation_value},
                {"mean_cut", r.mean_cut},
                {"best", to_json(r.best)}};
}

Json to_json(const PhasingResult &r, const PhasingConfig &config) {
    return Json{{"config", to_json(config)},
                {"read_partition", to_json(r.read_partition)},
                {"h1", haplotype_to_string(r.h1)},
                {"h2", haplotype_to_string(r.h2)},
                {"mec", r.mec},
                {"completeness", r.completeness},
                {"switch_error", optional_number(r.switch_error)},
                {"hamming_error", optional_number(r.hamming_error)},
                {"components", r.components},
                {"max_subsystems", r.max_subsystems}};
}

Json params_to_json(const BlockParams &params) {
    Json out = Json::object();
    for (std::size_t b = 0; b < params.size(); ++b) {
        out[std::to_string(b)] = params[b];
    }
    return out;
}

void write_energy_trace(std::ostream &out, const std::vector<double> &trace) {
    out << "iter,energy\n" << std::setprecision(17);
    for (std::size_t i = 0; i < trace.size(); ++i) {
        out << i << ',' << trace[i] << '\n';
    }
}

} // namespace edvqe
