#include "sfa/schedule.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace sfa {

using nlohmann::json;

double ScheduleLayer::tau_for(const std::string& group) const {
    if (tau_ns.has_value()) return *tau_ns;
    auto it = tau_ns_by_group.find(group);
    if (it == tau_ns_by_group.end()) {
        throw std::invalid_argument("schedule layer has no duration for group '" + group + "'");
    }
    return it->second;
}

std::vector<double> PulseSchedule::parameter_vector(const CouplingSet& couplings) const {
    std::vector<double> x;
    for (const auto& r : init) {
        x.push_back(r.alpha);
        x.push_back(r.beta);
    }
    for (const auto& layer : layers) {
        for (const auto& c : couplings) x.push_back(layer.tau_for(c.label));
        for (const auto& g : layer.gates) {
            x.push_back(g.alpha);
            x.push_back(g.beta);
            x.push_back(g.gamma);
        }
    }
    return x;
}

std::vector<GateStep> schedule_steps(const PulseSchedule& schedule, const CouplingSet& couplings) {
    std::vector<GateStep> steps;
    for (const auto& r : schedule.init) steps.push_back(RotationStep{r.q, r.alpha, r.beta});
    for (const auto& layer : schedule.layers) {
        for (const auto& c : couplings) {
            steps.push_back(EntangleStep{c.label, layer.tau_for(c.label)});
        }
        for (const auto& g : layer.gates) {
            steps.push_back(RotationStep{g.q, g.alpha, g.beta});
            steps.push_back(PhaseStep{g.q, g.gamma});
        }
    }
    return steps;
}

StateVector run_schedule(const PulseSchedule& schedule, const CouplingSet& couplings,
                         int num_qubits) {
    return run_steps(schedule_steps(schedule, couplings), couplings, num_qubits);
}

PulseSchedule schedule_from_json_text(const std::string& text) {
    json j = json::parse(text);
    PulseSchedule out;
    for (const auto& r : j.at("init")) {
        out.init.push_back({r.at("q").get<int>(), r.at("alpha").get<double>(),
                            r.at("beta").get<double>()});
    }
    for (const auto& l : j.at("layers")) {
        ScheduleLayer layer;
        if (l.contains("tau_ns")) {
            layer.tau_ns = l.at("tau_ns").get<double>();
        } else if (l.contains("tau_ns_by_group")) {
            for (const auto& [label, tau] : l.at("tau_ns_by_group").items()) {
                layer.tau_ns_by_group[label] = tau.get<double>();
            }
        } else {
            throw std::invalid_argument("schedule layer needs tau_ns or tau_ns_by_group");
        }
        for (const auto& g : l.at("gates")) {
            layer.gates.push_back({g.at("q").get<int>(), g.at("alpha").get<double>(),
                                   g.at("beta").get<double>(), g.at("gamma").get<double>()});
        }
        out.layers.push_back(std::move(layer));
    }
    return out;
}

std::string schedule_to_json_text(const PulseSchedule& schedule,
                                  const std::map<std::string, double>& metadata) {
    json j;
    j["init"] = json::array();
    for (const auto& r : schedule.init) {
        j["init"].push_back({{"q", r.q}, {"alpha", r.alpha}, {"beta", r.beta}});
    }
    j["layers"] = json::array();
    for (const auto& layer : schedule.layers) {
        json l;
        if (layer.tau_ns.has_value()) {
            l["tau_ns"] = *layer.tau_ns;
        } else {
            l["tau_ns_by_group"] = layer.tau_ns_by_group;
        }
        l["gates"] = json::array();
        for (const auto& g : layer.gates) {
            l["gates"].push_back(
                {{"q", g.q}, {"alpha", g.alpha}, {"beta", g.beta}, {"gamma", g.gamma}});
        }
        j["layers"].push_back(std::move(l));
    }
    if (!metadata.empty()) j["metadata"] = metadata;
    return j.dump(2) + "\n";
}

CouplingSet couplings_from_json_text(const std::string& text) {
    json j = json::parse(text);
    CouplingSet out;
    for (const auto& g : j.at("groups")) {
        CouplingMatrix c;
        c.label = g.at("label").get<std::string>();
        for (const auto& q : g.at("qubits")) c.qubits.push_back(q.get<int>());
        const auto& rows = g.at("g_eff_mhz");
        const auto n = static_cast<Eigen::Index>(c.qubits.size());
        c.g_eff_mhz = Eigen::MatrixXd::Zero(n, n);
        if (static_cast<Eigen::Index>(rows.size()) != n) {
            throw std::invalid_argument("couplings: g_eff_mhz row count mismatch");
        }
        for (Eigen::Index r = 0; r < n; ++r) {
            const auto& row = rows[static_cast<std::size_t>(r)];
            if (static_cast<Eigen::Index>(row.size()) != n) {
                throw std::invalid_argument("couplings: g_eff_mhz column count mismatch");
            }
            for (Eigen::Index col = 0; col < n; ++col) {
                c.g_eff_mhz(r, col) = row[static_cast<std::size_t>(col)].get<double>();
            }
        }
        c.validate();
        out.push_back(std::move(c));
    }
    if (out.empty()) throw std::invalid_argument("couplings: no groups");
    return out;
}

std::string couplings_to_json_text(const CouplingSet& couplings) {
    json j;
    j["groups"] = json::array();
    for (const auto& c : couplings) {
        json g;
        g["label"] = c.label;
        g["qubits"] = c.qubits;
        json rows = json::array();
        for (Eigen::Index r = 0; r < c.g_eff_mhz.rows(); ++r) {
            json row = json::array();
            for (Eigen::Index col = 0; col < c.g_eff_mhz.cols(); ++col) {
                row.push_back(c.g_eff_mhz(r, col));
            }
            rows.push_back(std::move(row));
        }
        g["g_eff_mhz"] = std::move(rows);
        j["groups"].push_back(std::move(g));
    }
    return j.dump(2) + "\n";
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

PulseSchedule load_schedule(const std::string& path) {
    return schedule_from_json_text(read_file(path));
}

CouplingSet load_couplings(const std::string& path) {
    return couplings_from_json_text(read_file(path));
}

int num_qubits_for(const CouplingSet& couplings) {
    int max_q = -1;
    for (const auto& c : couplings) {
        for (int q : c.qubits) max_q = std::max(max_q, q);
    }
    return max_q + 1;
}

}  // namespace sfa
