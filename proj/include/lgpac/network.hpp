#pragma once

// Data model for analog networks: channel kinds, module declarations, the
// wiring graph, and structural validation (dangling references, kind
// consistency, driver uniqueness, algebraic cycles).

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "lgpac/expr.hpp"
#include "lgpac/frechet.hpp"
#include "lgpac/limits.hpp"

namespace lgpac {

/// The four continuous channel kinds: real or function-valued, constant or
/// time-varying.
enum class ChannelKind { RScalar, XScalar, RStream, XStream };

constexpr bool is_stream(ChannelKind k) {
    return k == ChannelKind::RStream || k == ChannelKind::XStream;
}
constexpr bool is_x_kind(ChannelKind k) {
    return k == ChannelKind::XScalar || k == ChannelKind::XStream;
}
constexpr ChannelKind scalar_kind_of(ChannelKind stream) {
    return stream == ChannelKind::XStream ? ChannelKind::XScalar : ChannelKind::RScalar;
}
constexpr ChannelKind stream_kind_of(ChannelKind scalar) {
    return scalar == ChannelKind::XScalar ? ChannelKind::XStream : ChannelKind::RStream;
}
inline const char* to_string(ChannelKind k) {
    switch (k) {
        case ChannelKind::RScalar: return "rscalar";
        case ChannelKind::XScalar: return "xscalar";
        case ChannelKind::RStream: return "rstream";
        case ChannelKind::XStream: return "xstream";
    }
    return "?";
}
inline std::optional<ChannelKind> channel_kind_from_string(std::string_view s) {
    if (s == "rscalar") return ChannelKind::RScalar;
    if (s == "xscalar") return ChannelKind::XScalar;
    if (s == "rstream") return ChannelKind::RStream;
    if (s == "xstream") return ChannelKind::XStream;
    return std::nullopt;
}

enum class ModuleKind { Constant, Adder, Multiplier, Integrator, LimitContinuous, TimeSource };

inline const char* to_string(ModuleKind k) {
    switch (k) {
        case ModuleKind::Constant: return "const";
        case ModuleKind::Adder: return "add";
        case ModuleKind::Multiplier: return "mul";
        case ModuleKind::Integrator: return "integrator";
        case ModuleKind::LimitContinuous: return "limit";
        case ModuleKind::TimeSource: return "time";
    }
    return "?";
}

inline std::span<const char* const> module_port_names(ModuleKind k) {
    static constexpr const char* adder[] = {"a", "b"};
    static constexpr const char* integ[] = {"c", "u", "v"};
    static constexpr const char* limit[] = {"in"};
    switch (k) {
        case ModuleKind::Adder:
        case ModuleKind::Multiplier: return adder;
        case ModuleKind::Integrator: return integ;
        case ModuleKind::LimitContinuous: return limit;
        default: return {};
    }
}

/// One module instance. The module name doubles as the name of its output
/// channel. `inputs` aligns with module_port_names(kind); an empty entry is
/// an unconnected port, which acts as a proper input labeled "name.port".
struct ModuleDecl {
    std::string name;
    ModuleKind kind = ModuleKind::Constant;
    std::optional<ChannelKind> declared_kind;  // constants and integrators declare theirs
    AstPtr value;                              // Constant: expression of x (or a number)
    std::string modulus;                       // LimitContinuous: modulus reference
    std::vector<std::string> inputs;
};

struct InputDecl {
    std::string name;
    ChannelKind kind = ChannelKind::RStream;
};

struct WireDecl {
    std::string source;
    std::string module;
    std::string port;
};

/// The wiring graph: modules, declared proper-input channels, moduli, and
/// optional post-hoc wires. Building is permissive; validate() reports all
/// structural problems at once.
class Network {
public:
    void add_input(std::string name, ChannelKind kind) {
        inputs_.push_back({std::move(name), kind});
    }

    void add_modulus(std::string name, Modulus m) { moduli_.emplace_back(std::move(name), std::move(m)); }

    std::string add_constant(std::string name, ChannelKind kind, AstPtr value) {
        ModuleDecl m;
        m.name = name;
        m.kind = ModuleKind::Constant;
        m.declared_kind = kind;
        m.value = std::move(value);
        modules_.push_back(std::move(m));
        return name;
    }

    std::string add_constant(std::string name, ChannelKind kind, double v) {
        return add_constant(std::move(name), kind, ast_number(v));
    }

    std::string add_time(std::string name) {
        ModuleDecl m;
        m.name = name;
        m.kind = ModuleKind::TimeSource;
        modules_.push_back(std::move(m));
        return name;
    }

    std::string add_adder(std::string name, std::string a, std::string b) {
        ModuleDecl m;
        m.name = name;
        m.kind = ModuleKind::Adder;
        m.inputs = {std::move(a), std::move(b)};
        modules_.push_back(std::move(m));
        return name;
    }

    std::string add_multiplier(std::string name, std::string a, std::string b) {
        ModuleDecl m;
        m.name = name;
        m.kind = ModuleKind::Multiplier;
        m.inputs = {std::move(a), std::move(b)};
        modules_.push_back(std::move(m));
        return name;
    }

    std::string add_integrator(std::string name, ChannelKind out_kind, std::string c,
                               std::string u, std::string v) {
        ModuleDecl m;
        m.name = name;
        m.kind = ModuleKind::Integrator;
        m.declared_kind = out_kind;
        m.inputs = {std::move(c), std::move(u), std::move(v)};
        modules_.push_back(std::move(m));
        return name;
    }

    std::string add_limit(std::string name, std::string in, std::string modulus) {
        ModuleDecl m;
        m.name = name;
        m.kind = ModuleKind::LimitContinuous;
        m.modulus = std::move(modulus);
        m.inputs = {std::move(in)};
        modules_.push_back(std::move(m));
        return name;
    }

    void wire(std::string source, std::string module, std::string port) {
        wires_.push_back({std::move(source), std::move(module), std::move(port)});
    }

    void mark_output(std::string channel) { outputs_.push_back(std::move(channel)); }

    [[nodiscard]] std::span<const ModuleDecl> modules() const { return modules_; }
    [[nodiscard]] std::span<const InputDecl> inputs() const { return inputs_; }
    [[nodiscard]] std::span<const WireDecl> wires() const { return wires_; }
    [[nodiscard]] std::span<const std::string> outputs() const { return outputs_; }
    [[nodiscard]] std::span<const std::pair<std::string, Modulus>> moduli() const { return moduli_; }

    [[nodiscard]] const ModuleDecl* find_module(std::string_view name) const {
        for (const auto& m : modules_)
            if (m.name == name) return &m;
        return nullptr;
    }

    [[nodiscard]] const InputDecl* find_input(std::string_view name) const {
        for (const auto& i : inputs_)
            if (i.name == name) return &i;
        return nullptr;
    }

    [[nodiscard]] const Modulus* find_modulus(std::string_view name) const {
        for (const auto& [n, m] : moduli_)
            if (n == name) return &m;
        return nullptr;
    }

private:
    std::vector<ModuleDecl> modules_;
    std::vector<InputDecl> inputs_;
    std::vector<WireDecl> wires_;
    std::vector<std::string> outputs_;
    std::vector<std::pair<std::string, Modulus>> moduli_;
};

struct ValidationIssue {
    enum class Severity { Error, Note };
    Severity severity = Severity::Error;
    std::string code;     // stable machine-readable tag
    std::string message;
    std::string where;    // module or channel name
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    std::vector<std::string> proper_inputs;   // declared inputs + unconnected ports
    std::vector<std::string> mixed;           // module outputs consumed downstream
    std::vector<std::string> proper_outputs;  // unconsumed or explicitly marked
    std::map<std::string, ChannelKind> channel_kinds;

    [[nodiscard]] bool ok() const {
        for (const auto& i : issues)
            if (i.severity == ValidationIssue::Severity::Error) return false;
        return true;
    }

    [[nodiscard]] std::size_t error_count() const {
        std::size_t n = 0;
        for (const auto& i : issues)
            if (i.severity == ValidationIssue::Severity::Error) ++n;
        return n;
    }
};

namespace detail {

/// Effective input channel per port after merging inline bindings and wires.
/// Conflicting drivers are reported, first writer wins.
inline std::vector<std::vector<std::string>> resolve_inputs(const Network& net,
                                                            ValidationReport* report) {
    std::vector<std::vector<std::string>> eff;
    eff.reserve(net.modules().size());
    for (const auto& m : net.modules()) {
        auto ports = module_port_names(m.kind);
        std::vector<std::string> v(ports.size());
        for (std::size_t i = 0; i < ports.size() && i < m.inputs.size(); ++i) v[i] = m.inputs[i];
        eff.push_back(std::move(v));
    }
    for (const auto& w : net.wires()) {
        int mi = -1;
        for (std::size_t i = 0; i < net.modules().size(); ++i)
            if (net.modules()[i].name == w.module) { mi = static_cast<int>(i); break; }
        if (mi < 0) {
            if (report)
                report->issues.push_back({ValidationIssue::Severity::Error, "dangling-source",
                                          "wire targets unknown module '" + w.module + "'", w.module});
            continue;
        }
        auto ports = module_port_names(net.modules()[static_cast<std::size_t>(mi)].kind);
        int pi = -1;
        for (std::size_t i = 0; i < ports.size(); ++i)
            if (w.port == ports[i]) { pi = static_cast<int>(i); break; }
        if (pi < 0) {
            if (report)
                report->issues.push_back({ValidationIssue::Severity::Error, "unknown-port",
                                          "module '" + w.module + "' has no port '" + w.port + "'",
                                          w.module});
            continue;
        }
        auto& slot = eff[static_cast<std::size_t>(mi)][static_cast<std::size_t>(pi)];
        if (!slot.empty()) {
            if (report)
                report->issues.push_back({ValidationIssue::Severity::Error, "multiply-driven",
                                          "input " + w.module + "." + w.port +
                                              " is driven by both '" + slot + "' and '" + w.source + "'",
                                          w.module});
            continue;
        }
        slot = w.source;
    }
    return eff;
}

inline std::string auto_input_label(const ModuleDecl& m, std::size_t port) {
    return m.name + "." + module_port_names(m.kind)[port];
}

}  // namespace detail

/// Structural check of a network: reports dangling sources, duplicate names,
/// multiply-driven inputs, kind mismatches, unresolvable kinds, and algebraic
/// cycles (cycles that do not pass through an integrator output). Also
/// classifies channels into proper inputs, mixed, and proper outputs.
inline ValidationReport validate(const Network& net) {
    ValidationReport rep;
    auto err = [&rep](std::string code, std::string msg, std::string where) {
        rep.issues.push_back({ValidationIssue::Severity::Error, std::move(code), std::move(msg),
                              std::move(where)});
    };

    // name uniqueness across modules and declared inputs
    std::set<std::string> names;
    for (const auto& m : net.modules()) {
        if (m.name.empty()) err("bad-name", "module with empty name", m.name);
        if (!names.insert(m.name).second)
            err("duplicate-name", "channel name '" + m.name + "' declared more than once", m.name);
    }
    for (const auto& i : net.inputs())
        if (!names.insert(i.name).second)
            err("duplicate-name", "channel name '" + i.name + "' declared more than once", i.name);

    auto eff = detail::resolve_inputs(net, &rep);

    // channel kind table; unconnected ports become proper inputs whose kind
    // is inferred from the port that exposes them
    std::map<std::string, ChannelKind>& kinds = rep.channel_kinds;
    for (const auto& i : net.inputs()) kinds[i.name] = i.kind;
    for (const auto& m : net.modules()) {
        switch (m.kind) {
            case ModuleKind::Constant:
                if (m.declared_kind) {
                    kinds[m.name] = *m.declared_kind;
                    if (m.value && ast_uses(m.value, 'x') && !is_x_kind(*m.declared_kind))
                        err("kind-mismatch",
                            "constant '" + m.name + "' uses x but has a real kind", m.name);
                    if (m.value && ast_uses(m.value, 't'))
                        err("kind-mismatch",
                            "constant '" + m.name + "' must not depend on t", m.name);
                } else {
                    err("kind-unresolved", "constant '" + m.name + "' needs a declared kind", m.name);
                }
                break;
            case ModuleKind::TimeSource: kinds[m.name] = ChannelKind::RStream; break;
            case ModuleKind::Integrator:
                if (m.declared_kind && is_stream(*m.declared_kind)) {
                    kinds[m.name] = *m.declared_kind;
                } else {
                    err("kind-unresolved",
                        "integrator '" + m.name + "' needs a declared stream kind", m.name);
                }
                break;
            default: break;  // adders/multipliers/limits are inferred below
        }
    }

    // fixpoint propagation for adders, multipliers and limit outputs
    bool changed = true;
    int guard = 0;
    while (changed && guard++ < 1024) {
        changed = false;
        for (std::size_t mi = 0; mi < net.modules().size(); ++mi) {
            const auto& m = net.modules()[mi];
            if (m.kind == ModuleKind::Adder || m.kind == ModuleKind::Multiplier) {
                if (kinds.count(m.name)) continue;
                std::optional<ChannelKind> found;
                for (std::size_t p = 0; p < eff[mi].size(); ++p) {
                    const auto& src = eff[mi][p];
                    if (src.empty()) continue;
                    auto it = kinds.find(src);
                    if (it != kinds.end() && is_stream(it->second)) { found = it->second; break; }
                }
                if (found) {
                    kinds[m.name] = *found;
                    changed = true;
                }
            } else if (m.kind == ModuleKind::LimitContinuous) {
                if (kinds.count(m.name)) continue;
                const auto& src = eff[mi].empty() ? std::string() : eff[mi][0];
                auto it = src.empty() ? kinds.end() : kinds.find(src);
                if (it != kinds.end() && is_stream(it->second)) {
                    kinds[m.name] = scalar_kind_of(it->second);
                    changed = true;
                }
            }
        }
    }

    // assign kinds to unconnected ports (auto proper inputs)
    std::set<std::string> auto_labels;
    for (std::size_t mi = 0; mi < net.modules().size(); ++mi) {
        const auto& m = net.modules()[mi];
        for (std::size_t p = 0; p < eff[mi].size(); ++p) {
            if (!eff[mi][p].empty()) continue;
            std::string label = detail::auto_input_label(m, p);
            auto out_it = kinds.find(m.name);
            ChannelKind k = ChannelKind::RStream;
            bool known = true;
            if (m.kind == ModuleKind::Integrator && out_it != kinds.end()) {
                if (p == 0) k = scalar_kind_of(out_it->second);
                else if (p == 1) k = out_it->second;
                else k = ChannelKind::RStream;  // v defaults to the scalar time differential
            } else if ((m.kind == ModuleKind::Adder || m.kind == ModuleKind::Multiplier) &&
                       out_it != kinds.end()) {
                k = out_it->second;
            } else if (m.kind == ModuleKind::LimitContinuous) {
                err("kind-unresolved",
                    "limit '" + m.name + "' needs its input connected to a stream", m.name);
                known = false;
            } else {
                known = false;
            }
            if (known) kinds[label] = k;
            rep.proper_inputs.push_back(label);
            auto_labels.insert(label);
            eff[mi][p] = label;
        }
    }

    for (const auto& i : net.inputs()) rep.proper_inputs.push_back(i.name);

    // every referenced source must exist; kinds must agree at both ends
    std::set<std::string> consumed;
    for (std::size_t mi = 0; mi < net.modules().size(); ++mi) {
        const auto& m = net.modules()[mi];
        std::array<std::optional<ChannelKind>, 3> in_kinds;
        for (std::size_t p = 0; p < eff[mi].size(); ++p) {
            const auto& src = eff[mi][p];
            bool declared = net.find_module(src) != nullptr || net.find_input(src) != nullptr ||
                            auto_labels.count(src) > 0;
            if (!declared) {
                err("dangling-source",
                    "port " + m.name + "." + std::string(module_port_names(m.kind)[p]) +
                        " references unknown channel '" + src + "'",
                    m.name);
                continue;
            }
            consumed.insert(src);
            auto it = kinds.find(src);
            if (it != kinds.end()) in_kinds[p] = it->second;
        }
        switch (m.kind) {
            case ModuleKind::Adder:
            case ModuleKind::Multiplier: {
                if (in_kinds[0] && in_kinds[1]) {
                    if (*in_kinds[0] != *in_kinds[1] || !is_stream(*in_kinds[0]))
                        err("kind-mismatch",
                            std::string(to_string(m.kind)) + " '" + m.name +
                                "' needs two stream inputs of the same kind (got " +
                                to_string(*in_kinds[0]) + ", " + to_string(*in_kinds[1]) + ")",
                            m.name);
                } else if (!kinds.count(m.name)) {
                    err("kind-unresolved",
                        "cannot infer the stream kind of '" + m.name + "'", m.name);
                }
                break;
            }
            case ModuleKind::Integrator: {
                if (!kinds.count(m.name)) break;  // already reported
                ChannelKind out = kinds[m.name];
                if (in_kinds[0] && *in_kinds[0] != scalar_kind_of(out))
                    err("kind-mismatch",
                        "integrator '" + m.name + "' initial setting must be " +
                            to_string(scalar_kind_of(out)) + " (got " + to_string(*in_kinds[0]) + ")",
                        m.name);
                if (in_kinds[1] && *in_kinds[1] != out)
                    err("kind-mismatch",
                        "integrator '" + m.name + "' integrand must be " + to_string(out) +
                            " (got " + to_string(*in_kinds[1]) + ")",
                        m.name);
                if (in_kinds[2] && *in_kinds[2] != ChannelKind::RStream && *in_kinds[2] != out)
                    err("kind-mismatch",
                        "integrator '" + m.name + "' differential must be rstream or " +
                            to_string(out) + " (got " + to_string(*in_kinds[2]) + ")",
                        m.name);
                break;
            }
            case ModuleKind::LimitContinuous: {
                if (in_kinds[0] && !is_stream(*in_kinds[0]))
                    err("kind-mismatch",
                        "limit '" + m.name + "' input must be a stream (got " +
                            to_string(*in_kinds[0]) + ")",
                        m.name);
                if (net.find_modulus(m.modulus) == nullptr)
                    err("unknown-modulus",
                        "limit '" + m.name + "' references undeclared modulus '" + m.modulus + "'",
                        m.name);
                else if (net.find_modulus(m.modulus)->flavor() != Modulus::Flavor::Continuous)
                    err("modulus-flavor",
                        "limit '" + m.name + "' needs a continuous modulus", m.name);
                break;
            }
            default: break;
        }
    }

    // algebraic cycles: edges between modules, except out of integrators
    {
        std::map<std::string, int> producer;
        for (std::size_t mi = 0; mi < net.modules().size(); ++mi)
            producer[net.modules()[mi].name] = static_cast<int>(mi);
        std::vector<std::vector<int>> adj(net.modules().size());
        for (std::size_t mi = 0; mi < net.modules().size(); ++mi) {
            for (const auto& src : eff[mi]) {
                auto it = producer.find(src);
                if (it == producer.end()) continue;
                if (net.modules()[static_cast<std::size_t>(it->second)].kind == ModuleKind::Integrator)
                    continue;
                adj[static_cast<std::size_t>(it->second)].push_back(static_cast<int>(mi));
            }
        }
        std::vector<int> color(net.modules().size(), 0);
        std::vector<int> stack;
        std::function<bool(int)> dfs = [&](int v) -> bool {
            color[static_cast<std::size_t>(v)] = 1;
            stack.push_back(v);
            for (int w : adj[static_cast<std::size_t>(v)]) {
                if (color[static_cast<std::size_t>(w)] == 1) {
                    std::string cyc;
                    auto it = std::find(stack.begin(), stack.end(), w);
                    for (; it != stack.end(); ++it) {
                        cyc += net.modules()[static_cast<std::size_t>(*it)].name;
                        cyc += " -> ";
                    }
                    cyc += net.modules()[static_cast<std::size_t>(w)].name;
                    err("algebraic-cycle",
                        "cycle avoids every integrator output: " + cyc,
                        net.modules()[static_cast<std::size_t>(w)].name);
                    return true;
                }
                if (color[static_cast<std::size_t>(w)] == 0 && dfs(w)) return true;
            }
            stack.pop_back();
            color[static_cast<std::size_t>(v)] = 2;
            return false;
        };
        for (std::size_t v = 0; v < net.modules().size(); ++v)
            if (color[v] == 0 && dfs(static_cast<int>(v))) break;
    }

    // channel classification
    std::set<std::string> marked(net.outputs().begin(), net.outputs().end());
    for (const auto& m : net.modules()) {
        if (m.kind == ModuleKind::LimitContinuous) {
            rep.proper_outputs.push_back(m.name);
            continue;
        }
        if (consumed.count(m.name)) rep.mixed.push_back(m.name);
        if (!consumed.count(m.name) || marked.count(m.name)) rep.proper_outputs.push_back(m.name);
    }

    rep.issues.push_back({ValidationIssue::Severity::Note, "well-posedness",
                          "well-posedness is checked syntactically (no integrator-free cycles); "
                          "continuity of the induced map is not verified",
                          ""});
    return rep;
}

}  // namespace lgpac
