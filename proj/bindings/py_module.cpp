#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ucpd/harness.hpp"

namespace py = pybind11;
using namespace ucpd;

namespace {

std::vector<std::vector<double>> tensor_blocks(const LayeredTensor& t) {
    std::vector<std::vector<double>> out;
    for (int k = 0; k < t.layer_count(); ++k) {
        auto b = t.block(k);
        out.emplace_back(b.begin(), b.end());
    }
    return out;
}

LayeredTensor tensor_from_blocks(const MdpLayout& layout,
                                 const std::vector<std::vector<double>>& blocks) {
    LayeredTensor t(layout);
    if (static_cast<int>(blocks.size()) != t.layer_count())
        throw StructuralError("from_blocks: wrong number of layers");
    for (int k = 0; k < t.layer_count(); ++k) {
        if (static_cast<int>(blocks[k].size()) != t.block_size(k))
            throw StructuralError("from_blocks: wrong block size at layer " + std::to_string(k));
        auto b = t.block(k);
        for (std::size_t e = 0; e < b.size(); ++e) b[e] = blocks[k][e];
    }
    return t;
}

py::dict summary_dict(const RunSummary& s) {
    py::dict d;
    d["regret"] = s.regret;
    d["violation"] = s.violation;
    d["epochs"] = s.epochs;
    d["max_q_norm"] = s.max_q_norm;
    d["wall_seconds"] = s.wall_seconds;
    d["invariants_ok"] = s.invariants_ok;
    d["solver_failed"] = s.solver_failed;
    d["assertion_failures"] = s.assertion_failures;
    return d;
}

}  // namespace

PYBIND11_MODULE(_ucpd, m) {
    m.doc() = "occupancy-measure learner for online constrained layered MDPs";

    py::register_exception<StructuralError>(m, "StructuralError");
    py::register_exception<ParameterError>(m, "ParameterError");
    py::register_exception<DivergenceUndefined>(m, "DivergenceUndefinedError");
    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<InfeasibleError>(m, "InfeasibleError");

    py::class_<MdpLayout>(m, "MdpLayout")
        .def(py::init<std::vector<int>, int>(), py::arg("layer_sizes"), py::arg("actions"))
        .def_property_readonly("layer_count", &MdpLayout::layer_count)
        .def_property_readonly("action_count", &MdpLayout::action_count)
        .def_property_readonly("total_states", &MdpLayout::total_states)
        .def_property_readonly("layer_sizes", &MdpLayout::layer_sizes)
        .def("block_size", &MdpLayout::block_size);

    py::class_<LayeredTensor>(m, "LayeredTensor")
        .def(py::init([](const MdpLayout& layout, double fill) {
                 return LayeredTensor(layout, fill);
             }),
             py::arg("layout"), py::arg("fill") = 0.0)
        .def_static("from_blocks", &tensor_from_blocks, py::arg("layout"), py::arg("blocks"))
        .def("blocks", &tensor_blocks)
        .def("at", [](const LayeredTensor& t, int k, int i, int a, int j) { return t.at(k, i, a, j); })
        .def("set", [](LayeredTensor& t, int k, int i, int a, int j, double v) { t.at(k, i, a, j) = v; })
        .def_property_readonly("layer_count", &LayeredTensor::layer_count)
        .def("sum", &LayeredTensor::sum);

    py::class_<Policy>(m, "Policy")
        .def_readonly("rows", &Policy::pi)
        .def_readonly("action_count", &Policy::action_count)
        .def("prob", [](const Policy& p, int k, int i, int a) { return p.prob(k, i, a); });

    m.def("uniform_occupancy", &uniform_occupancy, py::arg("layout"));

    m.def(
        "validate_occupancy",
        [](const LayeredTensor& theta, const MdpLayout& layout) {
            const ValidationReport r = validate_occupancy(theta, layout);
            py::dict d;
            d["ok"] = r.ok;
            d["worst_residual"] = r.worst();
            std::vector<std::string> messages;
            for (const auto& v : r.violations) messages.push_back(v.describe());
            d["violations"] = messages;
            return d;
        },
        py::arg("theta"), py::arg("layout"));

    m.def("recover_policy", &recover_policy, py::arg("theta"));
    m.def("mix_with_uniform", &mix_with_uniform, py::arg("theta"), py::arg("lambda_"));
    m.def("unnormalized_kl", &unnormalized_kl, py::arg("theta"), py::arg("theta_ref"));
    m.def("inner_product", &inner_product, py::arg("func"), py::arg("theta"));

    m.def("confidence_radius", &confidence_radius, py::arg("pair_visits"),
          py::arg("next_layer_size"), py::arg("horizon"), py::arg("total_states"),
          py::arg("total_actions"), py::arg("zeta"));

    m.def(
        "make_random_mdp",
        [](const std::vector<int>& sizes, int actions, std::uint64_t seed) {
            auto [layout, model] = make_random_mdp(sizes, actions, seed);
            return py::make_tuple(layout, model.kernel);
        },
        py::arg("layer_sizes"), py::arg("actions"), py::arg("seed"));

    m.def(
        "true_occupancy",
        [](const Policy& policy, const LayeredTensor& kernel, const MdpLayout& layout) {
            TransitionModel model;
            model.kernel = kernel;
            model.validate(layout);
            return true_occupancy(policy, model, layout);
        },
        py::arg("policy"), py::arg("kernel"), py::arg("layout"));

    m.def(
        "theorem_schedule",
        [](int layer_count, int horizon, double zeta) {
            const AgentConfig cfg = theorem_schedule(layer_count, horizon, zeta, {});
            py::dict d;
            d["V"] = cfg.v_weight;
            d["alpha"] = cfg.alpha;
            d["lambda"] = cfg.lambda;
            return d;
        },
        py::arg("layer_count"), py::arg("horizon"), py::arg("zeta") = 0.1);

    m.def(
        "run_experiment",
        [](const std::string& config_text, py::object seed) {
            RunConfig cfg = parse_config_text(config_text, ".");
            if (!seed.is_none()) cfg.seed = seed.cast<std::uint64_t>();
            const RunLog log = run_experiment(cfg);
            py::dict d = summary_dict(log.summary);
            d["csv"] = csv_string(log);
            return d;
        },
        py::arg("config_text"), py::arg("seed") = py::none(),
        "Run one seeded experiment from flat key=value config text; returns the "
        "summary plus the full CSV log.");

    m.def(
        "best_fixed_oracle",
        [](const std::string& config_text) {
            const RunConfig cfg = parse_config_text(config_text, ".");
            const PreparedRun prepared = prepare_run(cfg);
            py::dict d;
            d["value"] = prepared.theta_star_value;
            d["theta"] = tensor_blocks(prepared.theta_star);
            d["thresholds"] = prepared.scenario.thresholds;
            return d;
        },
        py::arg("config_text"));
}
