#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace pelsim {

/// Node that closes every circuit; always at 0 V.
inline constexpr const char* kGroundNode = "gnd";

enum class BranchKind {
    Resistor,            // value = ohms
    Inductor,            // value = henries, init = initial amperes (a->b)
    Capacitor,           // value = farads,  init = initial volts (va - vb)
    Diode,               // two-state: on_resistance / off_conductance, anode = a
    Switch,              // two-state, commanded per step
    VoltageSource,       // commanded volts (va - vb), carries its own current unknown
    CurrentSource,       // commanded amperes injected a->b
    TimeVaryingResistor, // commanded ohms
};

struct Branch {
    BranchKind kind{};
    std::string node_a;
    std::string node_b;
    double value = 0.0; // R/L/C for the passive kinds
    double init = 0.0;  // inductor current / capacitor voltage at t = 0
    double on_resistance = 0.0;
    double off_conductance = 0.0;
    bool initially_on = false;    // diode/switch starting hypothesis
    std::string label;            // optional, needed for probes and control hooks
};

enum class ProbeKind { NodeVoltage, BranchCurrent, InternalState };

struct Probe {
    ProbeKind kind{};
    std::string target; // node name, branch label, or "behavior.state"
    std::string column; // CSV column name; defaults to target when empty
};

class DiscretizedSystem;
class StepView;
class Controls;

/// Per-step hook owning controller/supervisor state. `bind` resolves names to
/// indices once, `on_step` runs before each solve with read access to the
/// previous accepted solution and write access to commanded branch values.
class Behavior {
  public:
    virtual ~Behavior() = default;
    virtual std::string label() const { return {}; }
    virtual void bind(const DiscretizedSystem& sys) = 0;
    virtual void on_step(const StepView& view, Controls& ctrl) = 0;
    virtual void collect_states(std::vector<std::pair<std::string, double>>& out) const {
        (void)out;
    }
};

struct Netlist {
    std::vector<Branch> branches;
    std::vector<Probe> probes;
    std::vector<std::unique_ptr<Behavior>> behaviors;

    Netlist() = default;
    Netlist(Netlist&&) = default;
    Netlist& operator=(Netlist&&) = default;
    Netlist(const Netlist&) = delete;
    Netlist& operator=(const Netlist&) = delete;

    int add_branch(Branch b) {
        branches.push_back(std::move(b));
        return static_cast<int>(branches.size()) - 1;
    }
    void add_probe(ProbeKind kind, std::string target, std::string column = {}) {
        probes.push_back(Probe{kind, std::move(target), std::move(column)});
    }
    void add_behavior(std::unique_ptr<Behavior> b) { behaviors.push_back(std::move(b)); }

    /// Appends another netlist's branches/probes/behaviors into this one.
    void merge(Netlist&& other) {
        for (auto& b : other.branches) branches.push_back(std::move(b));
        for (auto& p : other.probes) probes.push_back(std::move(p));
        for (auto& h : other.behaviors) behaviors.push_back(std::move(h));
    }
};

namespace detail {

inline bool stamps_conductance(BranchKind k) {
    switch (k) {
    case BranchKind::Resistor:
    case BranchKind::Inductor:
    case BranchKind::Capacitor:
    case BranchKind::Diode:
    case BranchKind::Switch:
    case BranchKind::TimeVaryingResistor:
        return true;
    default:
        return false;
    }
}

} // namespace detail

/// Structural checks run before assembly. Throws std::invalid_argument with
/// the offending node or branch named in the message.
inline void validate_netlist(const Netlist& nl) {
    if (nl.branches.empty()) throw std::invalid_argument("netlist: no branches");

    std::unordered_set<std::string> nodes;
    bool ground_seen = false;
    for (size_t i = 0; i < nl.branches.size(); ++i) {
        const Branch& b = nl.branches[i];
        if (b.node_a.empty() || b.node_b.empty())
            throw std::invalid_argument("netlist: branch " + std::to_string(i) +
                                        " has an empty node name");
        if (b.node_a == b.node_b)
            throw std::invalid_argument("netlist: branch " + std::to_string(i) +
                                        " connects node '" + b.node_a + "' to itself");
        nodes.insert(b.node_a);
        nodes.insert(b.node_b);
        if (b.node_a == kGroundNode || b.node_b == kGroundNode) ground_seen = true;

        switch (b.kind) {
        case BranchKind::Resistor:
        case BranchKind::Inductor:
        case BranchKind::Capacitor:
            if (!(b.value > 0.0))
                throw std::invalid_argument("netlist: branch " + std::to_string(i) +
                                            " requires a strictly positive value");
            break;
        case BranchKind::Diode:
        case BranchKind::Switch: {
            if (!(b.on_resistance > 0.0) || !(b.off_conductance > 0.0))
                throw std::invalid_argument("netlist: branch " + std::to_string(i) +
                                            " requires positive on-resistance and off-conductance");
            double ratio = 1.0 / (b.on_resistance * b.off_conductance);
            if (ratio < 1e6)
                throw std::invalid_argument(
                    "netlist: branch " + std::to_string(i) +
                    " on/off conductance ratio below 1e6 (got " + std::to_string(ratio) + ")");
            break;
        }
        default:
            break;
        }
    }
    if (!ground_seen)
        throw std::invalid_argument("netlist: ground node '" + std::string(kGroundNode) +
                                    "' does not appear in any branch");

    // Every node must reach ground through branches that stamp conductance,
    // otherwise the nodal system is singular.
    std::unordered_map<std::string, std::vector<std::string>> adj;
    for (const Branch& b : nl.branches) {
        if (!detail::stamps_conductance(b.kind)) continue;
        adj[b.node_a].push_back(b.node_b);
        adj[b.node_b].push_back(b.node_a);
    }
    std::unordered_set<std::string> reached;
    std::vector<std::string> stack{kGroundNode};
    reached.insert(kGroundNode);
    while (!stack.empty()) {
        std::string n = std::move(stack.back());
        stack.pop_back();
        auto it = adj.find(n);
        if (it == adj.end()) continue;
        for (const std::string& m : it->second)
            if (reached.insert(m).second) stack.push_back(m);
    }
    for (const std::string& n : nodes)
        if (!reached.count(n))
            throw std::invalid_argument("netlist: node '" + n +
                                        "' has no conductive path to ground (floating subcircuit)");
}

// Convenience constructors.

inline Branch resistor(std::string a, std::string b, double ohms, std::string label = {}) {
    Branch e;
    e.kind = BranchKind::Resistor;
    e.node_a = std::move(a);
    e.node_b = std::move(b);
    e.value = ohms;
    e.label = std::move(label);
    return e;
}

inline Branch inductor(std::string a, std::string b, double henries, double init_amps = 0.0,
                       std::string label = {}) {
    Branch e;
    e.kind = BranchKind::Inductor;
    e.node_a = std::move(a);
    e.node_b = std::move(b);
    e.value = henries;
    e.init = init_amps;
    e.label = std::move(label);
    return e;
}

inline Branch capacitor(std::string a, std::string b, double farads, double init_volts = 0.0,
                        std::string label = {}) {
    Branch e;
    e.kind = BranchKind::Capacitor;
    e.node_a = std::move(a);
    e.node_b = std::move(b);
    e.value = farads;
    e.init = init_volts;
    e.label = std::move(label);
    return e;
}

inline Branch diode(std::string anode, std::string cathode, double on_r = 1e-3,
                    double off_g = 1e-9, std::string label = {}) {
    Branch e;
    e.kind = BranchKind::Diode;
    e.node_a = std::move(anode);
    e.node_b = std::move(cathode);
    e.on_resistance = on_r;
    e.off_conductance = off_g;
    e.label = std::move(label);
    return e;
}

inline Branch controlled_switch(std::string a, std::string b, double on_r, double off_g,
                                bool initially_on, std::string label) {
    Branch e;
    e.kind = BranchKind::Switch;
    e.node_a = std::move(a);
    e.node_b = std::move(b);
    e.on_resistance = on_r;
    e.off_conductance = off_g;
    e.initially_on = initially_on;
    e.label = std::move(label);
    return e;
}

inline Branch voltage_source(std::string a, std::string b, std::string label) {
    Branch e;
    e.kind = BranchKind::VoltageSource;
    e.node_a = std::move(a);
    e.node_b = std::move(b);
    e.label = std::move(label);
    return e;
}

inline Branch current_source(std::string a, std::string b, std::string label) {
    Branch e;
    e.kind = BranchKind::CurrentSource;
    e.node_a = std::move(a);
    e.node_b = std::move(b);
    e.label = std::move(label);
    return e;
}

inline Branch variable_resistor(std::string a, std::string b, double initial_ohms,
                                std::string label) {
    Branch e;
    e.kind = BranchKind::TimeVaryingResistor;
    e.node_a = std::move(a);
    e.node_b = std::move(b);
    e.value = initial_ohms;
    e.label = std::move(label);
    return e;
}

} // namespace pelsim
