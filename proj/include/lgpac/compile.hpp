#pragma once

// Reduction of a validated network to a first-order ODE initial value
// problem: one state per integrator output (vectorized over grid points for
// function-valued streams), an algebraic expression DAG for every other
// channel, and derivative expressions for all stream channels obtained by
// closing the channel algebra under differentiation:
//   (const)' = 0, t' = 1, (u+v)' = u'+v', (uv)' = u'v+uv',
//   (integrator output)' = u * v'.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "lgpac/network.hpp"

namespace lgpac {

struct CompileError : std::runtime_error {
    enum class Code { NotValid, IllPosed, UnsupportedDerivative, LimitNotTerminal, BadInitial };
    CompileError(Code c, const std::string& msg) : std::runtime_error(msg), code(c) {}
    Code code;
};

enum class COp : std::uint8_t {
    Number,      // k
    GridValues,  // table ref, one value per grid point
    Time,        // t
    State,       // ref = state index
    ExtScalar,   // ref = external id (proper scalar input)
    ExtValue,    // ref = external id (proper stream input, value)
    ExtDeriv,    // ref = external id (proper stream input, declared derivative)
    Add,
    Mul,
};

struct CNode {
    COp op;
    int a = -1;
    int b = -1;
    int ref = -1;
    double k = 0.0;
};

struct InitSpec {
    enum class Tag { Number, GridValues, External };
    Tag tag = Tag::Number;
    double number = 0.0;
    int ref = -1;  // table index or external id
};

struct StateDecl {
    std::string channel;
    bool x_kind = false;
    int offset = 0;
    int width = 1;
    int dyn = -1;  // node computing the state derivative
    InitSpec init;
};

struct ExternalDecl {
    std::string label;
    ChannelKind kind = ChannelKind::RStream;
};

struct ChannelEntry {
    std::string name;
    ChannelKind kind = ChannelKind::RStream;
    int value_node = -1;
    int deriv_node = -1;  // streams only; scalars use the zero node
};

struct LimitTap {
    std::string output;   // limit module name
    std::string channel;  // stream feeding the limit
    std::string modulus;  // modulus reference
    ChannelKind input_kind = ChannelKind::XStream;
};

/// The executable form of a network: immutable, safe to share.
class CompiledSystem {
public:
    [[nodiscard]] std::span<const CNode> nodes() const { return nodes_; }
    [[nodiscard]] std::span<const StateDecl> states() const { return states_; }
    [[nodiscard]] std::span<const ExternalDecl> externals() const { return externals_; }
    [[nodiscard]] std::span<const ChannelEntry> channels() const { return channels_; }
    [[nodiscard]] std::span<const LimitTap> taps() const { return taps_; }
    [[nodiscard]] const GridPtr& grid() const { return grid_; }
    [[nodiscard]] int state_size() const { return state_size_; }
    [[nodiscard]] bool x_free() const { return x_free_; }
    [[nodiscard]] const std::vector<std::vector<double>>& grid_tables() const { return tables_; }
    [[nodiscard]] std::span<const char> dynamics_mask() const { return dyn_mask_; }

    [[nodiscard]] const ChannelEntry* find_channel(std::string_view name) const {
        for (const auto& c : channels_)
            if (c.name == name) return &c;
        return nullptr;
    }

    [[nodiscard]] const ChannelEntry& channel(std::string_view name) const {
        const auto* c = find_channel(name);
        if (!c) throw std::out_of_range("CompiledSystem: unknown channel '" + std::string(name) + "'");
        return *c;
    }

private:
    friend CompiledSystem compile(const Network&, GridPtr);

    std::vector<CNode> nodes_;
    std::vector<StateDecl> states_;
    std::vector<ExternalDecl> externals_;
    std::vector<ChannelEntry> channels_;
    std::vector<LimitTap> taps_;
    std::vector<std::vector<double>> tables_;
    std::vector<char> dyn_mask_;
    GridPtr grid_;
    int state_size_ = 0;
    bool x_free_ = true;
};

namespace detail {

struct NodeBuilder {
    std::vector<CNode>& pool;
    std::map<std::tuple<int, int, int, int, double>, int> memo;

    int intern(COp op, int a, int b, int ref, double k) {
        auto key = std::make_tuple(static_cast<int>(op), a, b, ref, k);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        pool.push_back({op, a, b, ref, k});
        int id = static_cast<int>(pool.size()) - 1;
        memo.emplace(key, id);
        return id;
    }

    int number(double k) { return intern(COp::Number, -1, -1, -1, k); }

    bool is_number(int n, double v) const {
        return pool[static_cast<std::size_t>(n)].op == COp::Number &&
               pool[static_cast<std::size_t>(n)].k == v;
    }

    int add(int a, int b) {
        if (is_number(a, 0)) return b;
        if (is_number(b, 0)) return a;
        const auto& na = pool[static_cast<std::size_t>(a)];
        const auto& nb = pool[static_cast<std::size_t>(b)];
        if (na.op == COp::Number && nb.op == COp::Number) return number(na.k + nb.k);
        return intern(COp::Add, a, b, -1, 0);
    }

    int mul(int a, int b) {
        if (is_number(a, 0) || is_number(b, 0)) return number(0);
        if (is_number(a, 1)) return b;
        if (is_number(b, 1)) return a;
        const auto& na = pool[static_cast<std::size_t>(a)];
        const auto& nb = pool[static_cast<std::size_t>(b)];
        if (na.op == COp::Number && nb.op == COp::Number) return number(na.k * nb.k);
        return intern(COp::Mul, a, b, -1, 0);
    }
};

}  // namespace detail

/// Compile a network against a spatial grid. Validation must pass; limit
/// outputs must not drive other modules; integrator differentials must not
/// feed back into their own derivative (that is a differential-algebraic
/// loop, not an ODE).
inline CompiledSystem compile(const Network& net, GridPtr grid) {
    ValidationReport rep = validate(net);
    if (!rep.ok()) {
        std::string msg = "compile: network fails validation:";
        for (const auto& i : rep.issues)
            if (i.severity == ValidationIssue::Severity::Error) msg += "\n  " + i.message;
        throw CompileError(CompileError::Code::NotValid, msg);
    }

    CompiledSystem sys;
    sys.grid_ = grid;
    auto eff = detail::resolve_inputs(net, nullptr);
    // re-apply the auto proper-input labels assigned during validation
    for (std::size_t mi = 0; mi < net.modules().size(); ++mi)
        for (std::size_t p = 0; p < eff[mi].size(); ++p)
            if (eff[mi][p].empty())
                eff[mi][p] = detail::auto_input_label(net.modules()[mi], p);

    const auto& kinds = rep.channel_kinds;
    auto kind_of = [&](const std::string& name) -> ChannelKind {
        auto it = kinds.find(name);
        if (it == kinds.end())
            throw CompileError(CompileError::Code::NotValid, "compile: unknown channel '" + name + "'");
        return it->second;
    };

    int npoints = static_cast<int>(grid->size());

    // limit outputs must be terminal
    std::map<std::string, const ModuleDecl*> limit_modules;
    for (const auto& m : net.modules())
        if (m.kind == ModuleKind::LimitContinuous) limit_modules[m.name] = &m;
    for (std::size_t mi = 0; mi < net.modules().size(); ++mi)
        for (const auto& src : eff[mi])
            if (limit_modules.count(src))
                throw CompileError(CompileError::Code::LimitNotTerminal,
                                   "compile: limit output '" + src +
                                       "' cannot drive other modules; limits are terminal");

    // states, one per integrator
    std::map<std::string, int> state_index;
    for (const auto& m : net.modules()) {
        if (m.kind != ModuleKind::Integrator) continue;
        StateDecl s;
        s.channel = m.name;
        s.x_kind = is_x_kind(*m.declared_kind);
        s.width = s.x_kind ? npoints : 1;
        s.offset = sys.state_size_;
        sys.state_size_ += s.width;
        state_index[m.name] = static_cast<int>(sys.states_.size());
        sys.states_.push_back(std::move(s));
    }

    // externals: declared inputs and auto labels, in deterministic order
    std::map<std::string, int> external_index;
    auto ensure_external = [&](const std::string& label, ChannelKind k) {
        auto it = external_index.find(label);
        if (it != external_index.end()) return it->second;
        int id = static_cast<int>(sys.externals_.size());
        sys.externals_.push_back({label, k});
        external_index.emplace(label, id);
        return id;
    };
    for (const auto& i : net.inputs()) ensure_external(i.name, i.kind);
    for (std::size_t mi = 0; mi < net.modules().size(); ++mi)
        for (const auto& src : eff[mi])
            if (!net.find_module(src) && !net.find_input(src)) ensure_external(src, kind_of(src));

    detail::NodeBuilder nb{sys.nodes_, {}};

    std::map<std::string, int> module_index;
    for (std::size_t mi = 0; mi < net.modules().size(); ++mi)
        module_index[net.modules()[mi].name] = static_cast<int>(mi);

    // value expressions; cycles terminate at integrator outputs (State leaves)
    std::map<std::string, int> value_memo;
    std::function<int(const std::string&)> value_of = [&](const std::string& ch) -> int {
        auto it = value_memo.find(ch);
        if (it != value_memo.end()) {
            if (it->second == -2)
                throw CompileError(CompileError::Code::IllPosed,
                                   "compile: algebraic cycle through '" + ch + "'");
            return it->second;
        }
        int node;
        auto mit = module_index.find(ch);
        if (mit == module_index.end()) {
            // proper input
            int ext = external_index.at(ch);
            ChannelKind k = kind_of(ch);
            node = is_stream(k) ? nb.intern(COp::ExtValue, -1, -1, ext, 0)
                                : nb.intern(COp::ExtScalar, -1, -1, ext, 0);
        } else {
            const auto& m = net.modules()[static_cast<std::size_t>(mit->second)];
            switch (m.kind) {
                case ModuleKind::Constant: {
                    if (!ast_uses(m.value, 'x')) {
                        node = nb.number(ast_eval(m.value, 0.0, 0.0));
                    } else {
                        std::vector<double> vals;
                        vals.reserve(grid->size());
                        for (double x : grid->points()) vals.push_back(ast_eval(m.value, x, 0.0));
                        sys.tables_.push_back(std::move(vals));
                        node = nb.intern(COp::GridValues, -1, -1,
                                         static_cast<int>(sys.tables_.size()) - 1, 0);
                    }
                    break;
                }
                case ModuleKind::TimeSource: node = nb.intern(COp::Time, -1, -1, -1, 0); break;
                case ModuleKind::Integrator:
                    node = nb.intern(COp::State, -1, -1, state_index.at(ch), 0);
                    break;
                case ModuleKind::Adder: {
                    value_memo[ch] = node = -2;  // placeholder; cycles pass through integrators
                    int a = value_of(eff[static_cast<std::size_t>(mit->second)][0]);
                    int b = value_of(eff[static_cast<std::size_t>(mit->second)][1]);
                    node = nb.add(a, b);
                    break;
                }
                case ModuleKind::Multiplier: {
                    value_memo[ch] = node = -2;
                    int a = value_of(eff[static_cast<std::size_t>(mit->second)][0]);
                    int b = value_of(eff[static_cast<std::size_t>(mit->second)][1]);
                    node = nb.mul(a, b);
                    break;
                }
                case ModuleKind::LimitContinuous:
                    throw CompileError(CompileError::Code::LimitNotTerminal,
                                       "compile: limit output '" + ch + "' has no stream value");
            }
        }
        value_memo[ch] = node;
        return node;
    };

    // derivative closure with a differential-loop guard on the states
    std::map<int, int> deriv_memo;
    std::vector<int> dyn_of(sys.states_.size(), -1);
    std::vector<char> dyn_in_progress(sys.states_.size(), 0);

    std::function<int(int)> deriv_of = [&](int node) -> int {
        auto it = deriv_memo.find(node);
        if (it != deriv_memo.end()) return it->second;
        const CNode n = sys.nodes_[static_cast<std::size_t>(node)];
        int d;
        switch (n.op) {
            case COp::Number:
            case COp::GridValues:
            case COp::ExtScalar: d = nb.number(0); break;
            case COp::Time: d = nb.number(1); break;
            case COp::ExtValue: d = nb.intern(COp::ExtDeriv, -1, -1, n.ref, 0); break;
            case COp::ExtDeriv:
                throw CompileError(CompileError::Code::UnsupportedDerivative,
                                   "compile: second derivative of a proper input is not available");
            case COp::Add: d = nb.add(deriv_of(n.a), deriv_of(n.b)); break;
            case COp::Mul:
                d = nb.add(nb.mul(deriv_of(n.a), n.b), nb.mul(n.a, deriv_of(n.b)));
                break;
            case COp::State: {
                int si = n.ref;
                if (dyn_of[static_cast<std::size_t>(si)] >= 0) {
                    d = dyn_of[static_cast<std::size_t>(si)];
                    break;
                }
                if (dyn_in_progress[static_cast<std::size_t>(si)])
                    throw CompileError(
                        CompileError::Code::IllPosed,
                        "compile: state '" + sys.states_[static_cast<std::size_t>(si)].channel +
                            "' differentiates itself through an integrator differential input");
                dyn_in_progress[static_cast<std::size_t>(si)] = 1;
                const auto& m = net.modules()[static_cast<std::size_t>(module_index.at(
                    sys.states_[static_cast<std::size_t>(si)].channel))];
                const auto& ports = eff[static_cast<std::size_t>(module_index.at(m.name))];
                int u_node = value_of(ports[1]);
                int dv = deriv_of(value_of(ports[2]));
                d = nb.mul(u_node, dv);
                dyn_of[static_cast<std::size_t>(si)] = d;
                dyn_in_progress[static_cast<std::size_t>(si)] = 0;
                break;
            }
            default: throw std::logic_error("compile: bad node op");
        }
        deriv_memo.emplace(node, d);
        return d;
    };

    // channels: proper inputs first, then module outputs, declaration order
    for (const auto& i : net.inputs()) {
        ChannelEntry e;
        e.name = i.name;
        e.kind = i.kind;
        e.value_node = value_of(i.name);
        sys.channels_.push_back(std::move(e));
    }
    for (const auto& m : net.modules()) {
        if (m.kind == ModuleKind::LimitContinuous) {
            const auto& ports = eff[static_cast<std::size_t>(module_index.at(m.name))];
            LimitTap tap;
            tap.output = m.name;
            tap.channel = ports[0];
            tap.modulus = m.modulus;
            tap.input_kind = kind_of(ports[0]);
            value_of(ports[0]);
            sys.taps_.push_back(std::move(tap));
            continue;
        }
        ChannelEntry e;
        e.name = m.name;
        e.kind = kind_of(m.name);
        e.value_node = value_of(m.name);
        sys.channels_.push_back(std::move(e));
    }
    // auto proper inputs that ended up referenced
    for (const auto& ext : sys.externals_) {
        if (sys.find_channel(ext.label)) continue;
        ChannelEntry e;
        e.name = ext.label;
        e.kind = ext.kind;
        e.value_node = value_of(ext.label);
        sys.channels_.push_back(std::move(e));
    }

    // dynamics for every state
    for (std::size_t si = 0; si < sys.states_.size(); ++si) {
        if (dyn_of[si] >= 0) continue;
        deriv_of(nb.intern(COp::State, -1, -1, static_cast<int>(si), 0));
    }
    for (std::size_t si = 0; si < sys.states_.size(); ++si) sys.states_[si].dyn = dyn_of[si];

    // close every stream channel under differentiation
    for (auto& e : sys.channels_)
        e.deriv_node = is_stream(e.kind) ? deriv_of(e.value_node) : nb.number(0);

    // initial settings from the c ports
    for (auto& s : sys.states_) {
        const auto& ports = eff[static_cast<std::size_t>(module_index.at(s.channel))];
        const std::string& c_src = ports[0];
        int cnode = value_of(c_src);
        const auto& n = sys.nodes_[static_cast<std::size_t>(cnode)];
        switch (n.op) {
            case COp::Number: s.init = {InitSpec::Tag::Number, n.k, -1}; break;
            case COp::GridValues: s.init = {InitSpec::Tag::GridValues, 0.0, n.ref}; break;
            case COp::ExtScalar: s.init = {InitSpec::Tag::External, 0.0, n.ref}; break;
            default:
                throw CompileError(CompileError::Code::BadInitial,
                                   "compile: initial setting of '" + s.channel +
                                       "' must come from a scalar constant or proper input");
        }
    }

    // mark the nodes the right-hand side needs
    sys.dyn_mask_.assign(sys.nodes_.size(), 0);
    std::function<void(int)> mark = [&](int node) {
        if (node < 0 || sys.dyn_mask_[static_cast<std::size_t>(node)]) return;
        sys.dyn_mask_[static_cast<std::size_t>(node)] = 1;
        const auto& n = sys.nodes_[static_cast<std::size_t>(node)];
        if (n.op == COp::Add || n.op == COp::Mul) {
            mark(n.a);
            mark(n.b);
        }
    };
    for (const auto& s : sys.states_) mark(s.dyn);

    // x-dependence: grid tables, function-valued externals, or wide states
    sys.x_free_ = sys.tables_.empty();
    for (const auto& s : sys.states_)
        if (s.x_kind) sys.x_free_ = false;
    for (const auto& ext : sys.externals_)
        if (is_x_kind(ext.kind)) sys.x_free_ = false;

    return sys;
}

/// A value or generator attached to a proper input. Stream bindings carry
/// their derivative explicitly; the integrator consumes differentials, so a
/// stream without a declared derivative cannot be bound.
class Binding {
public:
    static Binding r_scalar(double v) {
        Binding b(ChannelKind::RScalar);
        b.value_ = [v](double, double) { return v; };
        return b;
    }

    static Binding x_scalar(GridFunction g) {
        Binding b(ChannelKind::XScalar);
        b.grid_value_ = std::move(g);
        return b;
    }

    static Binding x_scalar(std::function<double(double)> fx) {
        Binding b(ChannelKind::XScalar);
        b.value_ = [fx = std::move(fx)](double, double x) { return fx(x); };
        return b;
    }

    static Binding r_stream(std::function<double(double)> v, std::function<double(double)> dv) {
        Binding b(ChannelKind::RStream);
        b.value_ = [v = std::move(v)](double t, double) { return v(t); };
        b.deriv_ = [dv = std::move(dv)](double t, double) { return dv(t); };
        return b;
    }

    static Binding x_stream(std::function<double(double, double)> v,
                            std::function<double(double, double)> dv) {
        Binding b(ChannelKind::XStream);
        b.value_ = std::move(v);
        b.deriv_ = std::move(dv);
        return b;
    }

    [[nodiscard]] ChannelKind kind() const { return kind_; }
    [[nodiscard]] bool has_derivative() const { return static_cast<bool>(deriv_); }
    [[nodiscard]] double value(double t, double x) const {
        if (value_) return value_(t, x);
        throw std::logic_error("Binding: grid-valued binding not materialized");
    }
    [[nodiscard]] double deriv(double t, double x) const { return deriv_(t, x); }
    [[nodiscard]] const std::optional<GridFunction>& grid_value() const { return grid_value_; }

private:
    explicit Binding(ChannelKind k) : kind_(k) {}
    ChannelKind kind_;
    std::function<double(double, double)> value_;
    std::function<double(double, double)> deriv_;
    std::optional<GridFunction> grid_value_;
};

using BindingMap = std::map<std::string, Binding>;

struct BindError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A compiled system with every proper input resolved: ready to simulate.
struct BoundNetwork {
    std::shared_ptr<const CompiledSystem> system;
    std::vector<std::vector<double>> external_scalars;  // per external id, per point
    std::vector<int> external_streams;                  // per external id: index into storage, -1 for scalars
    std::vector<double> initial_state;
    std::vector<Binding> storage;  // owns the bindings

    [[nodiscard]] const Binding& stream_binding(int ext) const {
        return storage[static_cast<std::size_t>(external_streams[static_cast<std::size_t>(ext)])];
    }
};

inline BoundNetwork bind_compiled(std::shared_ptr<const CompiledSystem> sys,
                                  const BindingMap& bindings) {
    BoundNetwork bn;
    bn.system = sys;
    const auto& grid = *sys->grid();
    int npoints = static_cast<int>(grid.size());

    bn.storage.reserve(sys->externals().size());
    std::vector<int> storage_of(sys->externals().size(), -1);
    for (std::size_t e = 0; e < sys->externals().size(); ++e) {
        const auto& ext = sys->externals()[e];
        auto it = bindings.find(ext.label);
        if (it == bindings.end())
            throw BindError("binding missing for proper input '" + ext.label + "'");
        if (it->second.kind() != ext.kind)
            throw BindError("binding for '" + ext.label + "' has kind " +
                            to_string(it->second.kind()) + ", expected " + to_string(ext.kind));
        if (is_stream(ext.kind) && !it->second.has_derivative())
            throw BindError("stream binding for '" + ext.label + "' must declare its derivative");
        bn.storage.push_back(it->second);
        storage_of[e] = static_cast<int>(bn.storage.size()) - 1;
    }
    for (const auto& [label, b] : bindings)
        if (std::none_of(sys->externals().begin(), sys->externals().end(),
                         [&](const ExternalDecl& d) { return d.label == label; }))
            throw BindError("binding refers to unknown proper input '" + label + "'");

    bn.external_scalars.resize(sys->externals().size());
    bn.external_streams.assign(sys->externals().size(), -1);
    for (std::size_t e = 0; e < sys->externals().size(); ++e) {
        const Binding& b = bn.storage[static_cast<std::size_t>(storage_of[e])];
        if (is_stream(b.kind())) {
            bn.external_streams[e] = storage_of[e];
            continue;
        }
        auto& vals = bn.external_scalars[e];
        vals.resize(static_cast<std::size_t>(npoints));
        if (b.grid_value()) {
            if (!b.grid_value()->grid()->same_as(grid))
                throw BindError("grid-valued binding for '" + sys->externals()[e].label +
                                "' lives on a different grid");
            for (int p = 0; p < npoints; ++p)
                vals[static_cast<std::size_t>(p)] = b.grid_value()->value(static_cast<std::size_t>(p));
        } else {
            for (int p = 0; p < npoints; ++p)
                vals[static_cast<std::size_t>(p)] = b.value(0.0, grid.point(static_cast<std::size_t>(p)));
        }
    }

    bn.initial_state.assign(static_cast<std::size_t>(sys->state_size()), 0.0);
    for (const auto& s : sys->states()) {
        for (int p = 0; p < s.width; ++p) {
            double v = 0;
            switch (s.init.tag) {
                case InitSpec::Tag::Number: v = s.init.number; break;
                case InitSpec::Tag::GridValues:
                    v = sys->grid_tables()[static_cast<std::size_t>(s.init.ref)]
                                          [static_cast<std::size_t>(p)];
                    break;
                case InitSpec::Tag::External:
                    v = bn.external_scalars[static_cast<std::size_t>(s.init.ref)]
                                           [static_cast<std::size_t>(p)];
                    break;
            }
            bn.initial_state[static_cast<std::size_t>(s.offset + p)] = v;
        }
    }
    return bn;
}

/// Compile and bind in one step.
inline BoundNetwork proper_input_binding(const Network& net, GridPtr grid,
                                         const BindingMap& bindings) {
    auto sys = std::make_shared<const CompiledSystem>(compile(net, std::move(grid)));
    return bind_compiled(std::move(sys), bindings);
}

/// Evaluate every node at (t, grid point) given the state vector; scratch
/// must have one slot per node. Node ids are topologically ordered by
/// construction, so a single forward sweep suffices.
inline void eval_nodes(const BoundNetwork& bn, double t, std::span<const double> y, int point,
                       std::span<double> scratch, bool dynamics_only) {
    const auto& sys = *bn.system;
    const auto nodes = sys.nodes();
    const auto mask = sys.dynamics_mask();
    double x = sys.grid()->point(static_cast<std::size_t>(point));
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (dynamics_only && !mask[i]) continue;
        const CNode& n = nodes[i];
        double v = 0;
        switch (n.op) {
            case COp::Number: v = n.k; break;
            case COp::GridValues:
                v = sys.grid_tables()[static_cast<std::size_t>(n.ref)][static_cast<std::size_t>(point)];
                break;
            case COp::Time: v = t; break;
            case COp::State: {
                const auto& s = sys.states()[static_cast<std::size_t>(n.ref)];
                v = y[static_cast<std::size_t>(s.offset + (s.width > 1 ? point : 0))];
                break;
            }
            case COp::ExtScalar:
                v = bn.external_scalars[static_cast<std::size_t>(n.ref)][static_cast<std::size_t>(point)];
                break;
            case COp::ExtValue: v = bn.stream_binding(n.ref).value(t, x); break;
            case COp::ExtDeriv: v = bn.stream_binding(n.ref).deriv(t, x); break;
            case COp::Add: v = scratch[static_cast<std::size_t>(n.a)] + scratch[static_cast<std::size_t>(n.b)]; break;
            case COp::Mul: v = scratch[static_cast<std::size_t>(n.a)] * scratch[static_cast<std::size_t>(n.b)]; break;
        }
        scratch[i] = v;
    }
}

/// Right-hand side of the compiled ODE system.
inline void eval_dynamics(const BoundNetwork& bn, double t, std::span<const double> y,
                          std::span<double> dydt, std::span<double> scratch) {
    const auto& sys = *bn.system;
    int npoints = sys.x_free() ? 1 : static_cast<int>(sys.grid()->size());
    for (int p = 0; p < npoints; ++p) {
        eval_nodes(bn, t, y, p, scratch, true);
        for (const auto& s : sys.states()) {
            if (s.width > 1)
                dydt[static_cast<std::size_t>(s.offset + p)] = scratch[static_cast<std::size_t>(s.dyn)];
            else if (p == 0)
                dydt[static_cast<std::size_t>(s.offset)] = scratch[static_cast<std::size_t>(s.dyn)];
        }
    }
}

}  // namespace lgpac
