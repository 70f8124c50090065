#include "vrf/graph.hpp"

#include "vrf/error.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace vrf {

namespace fm = formula;

std::string_view to_string(LinkKind k) {
    switch (k) {
    case LinkKind::Information: return "information";
    case LinkKind::Positioning: return "positioning";
    case LinkKind::Visibility: return "visibility";
    }
    return "?";
}

LinkKind parse_link_kind(std::string_view text) {
    for (LinkKind k : {LinkKind::Information, LinkKind::Positioning, LinkKind::Visibility})
        if (to_string(k) == text) return k;
    throw SceneError("unknown link kind '" + std::string(text) + "'");
}

void SceneGraph::add(ComponentSpec spec) {
    if (components.contains(spec.id)) throw SceneError("duplicate component id '" + spec.id + "'");
    std::string id = spec.id;
    components.emplace(std::move(id), std::move(spec));
}

std::string to_string(const Diagnostic& d) {
    return std::string(d.severity == Severity::Error ? "ERROR " : "WARNING ") + d.subject + ": " + d.message;
}

namespace {

template <class Fn> void for_each_scalar(const fm::Value& v, Fn&& fn) {
    if (v.is<bool>()) fn(std::string(), v.as<bool>() ? 1.0 : 0.0);
    else if (v.is_scalar()) fn(std::string(), v.to_real());
    else if (v.is<fm::Vector>()) {
        const auto& x = v.as<fm::Vector>();
        for (std::size_t i = 0; i < x.size(); ++i) fn("_" + std::to_string(i), x[i]);
    } else if (v.is<fm::Matrix>()) {
        const auto& m = v.as<fm::Matrix>();
        for (std::size_t r = 0; r < m.rows(); ++r)
            for (std::size_t c = 0; c < m.cols(); ++c) fn("_" + std::to_string(r) + "_" + std::to_string(c), m(r, c));
    }
}

const fm::Value& published_value(const Values& values, const std::string& name) {
    const auto it = values.find(name);
    if (it == values.end()) throw SceneError("output '" + name + "' was not published");
    return it->second;
}

}  // namespace

std::vector<std::string> Component::columns(const Values& published) const {
    std::vector<std::string> names;
    for (const auto& port : outputs())
        for_each_scalar(published_value(published, port.name),
                        [&](const std::string& suffix, double) { names.push_back(port.name + suffix); });
    return names;
}

fm::Vector flatten(const std::vector<Port>& ports, const Values& values) {
    fm::Vector row;
    for (const auto& port : ports)
        for_each_scalar(published_value(values, port.name), [&](const std::string&, double x) { row.push_back(x); });
    return row;
}

namespace {

using Adjacency = std::map<std::string, std::set<std::string>>;

/// Strongly connected components holding a cycle, each as a closed path
/// starting at its smallest id.
std::vector<std::vector<std::string>> cycles(const Adjacency& adj) {
    std::map<std::string, int> index, low;
    std::set<std::string> on_stack;
    std::vector<std::string> stack;
    std::vector<std::set<std::string>> sccs;
    int counter = 0;
    std::function<void(const std::string&)> visit = [&](const std::string& v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack.insert(v);
        if (const auto it = adj.find(v); it != adj.end())
            for (const auto& w : it->second) {
                if (!index.contains(w)) {
                    visit(w);
                    low[v] = std::min(low[v], low[w]);
                } else if (on_stack.contains(w)) {
                    low[v] = std::min(low[v], index[w]);
                }
            }
        if (low[v] == index[v]) {
            std::set<std::string> scc;
            std::string w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack.erase(w);
                scc.insert(w);
            } while (w != v);
            sccs.push_back(std::move(scc));
        }
    };
    for (const auto& [v, _] : adj)
        if (!index.contains(v)) visit(v);

    std::vector<std::vector<std::string>> out;
    for (const auto& scc : sccs) {
        const std::string& start = *scc.begin();
        const bool self_loop = adj.contains(start) && adj.at(start).contains(start);
        if (scc.size() == 1 && !self_loop) continue;
        // Shortest path back to start inside the component.
        std::map<std::string, std::string> prev;
        std::vector<std::string> frontier{start};
        bool closed = false;
        std::string last;
        while (!frontier.empty() && !closed) {
            std::vector<std::string> next;
            for (const auto& v : frontier) {
                for (const auto& w : adj.at(v)) {
                    if (!scc.contains(w)) continue;
                    if (w == start) {
                        closed = true;
                        last = v;
                        break;
                    }
                    if (prev.emplace(w, v).second) next.push_back(w);
                }
                if (closed) break;
            }
            frontier = std::move(next);
        }
        std::vector<std::string> path{start};
        for (std::string v = last; v != start; v = prev.at(v)) path.insert(path.begin() + 1, v);
        path.push_back(start);
        out.push_back(std::move(path));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string s;
    for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? std::string(sep) : std::string()) + parts[i];
    return s;
}

const Port* find_port(const std::vector<Port>& ports, std::string_view name) {
    const auto it = std::find_if(ports.begin(), ports.end(), [&](const Port& p) { return p.name == name; });
    return it == ports.end() ? nullptr : &*it;
}

bool renderable(std::string_view kind) { return kind == "shape" || kind == "star-source"; }

}  // namespace

std::vector<Diagnostic> validate(const SceneGraph& g) {
    std::vector<Diagnostic> out;
    auto error = [&](std::string subject, std::string message) {
        out.push_back({Severity::Error, std::move(subject), std::move(message)});
    };

    std::map<std::string, std::unique_ptr<Component>, std::less<>> built;
    for (const auto& [id, spec] : g.components) {
        if (id != spec.id) error(id, "component is filed under a different id '" + spec.id + "'");
        if (id.empty() || id == FrameForest::kZero || id.find('.') != std::string::npos) {
            error(id, "invalid component id");
            continue;
        }
        try {
            built.emplace(id, make_component(spec));
        } catch (const Error& e) {
            error(id, e.what());
        } catch (const nlohmann::json::exception& e) {
            error(id, std::string("bad parameters: ") + e.what());
        }
    }

    Adjacency information, positioning;
    std::map<std::string, std::vector<std::string>> parents;
    std::set<std::pair<std::string, std::string>> fed;
    for (std::size_t k = 0; k < g.links.size(); ++k) {
        const Link& l = g.links[k];
        const std::string subject = "link#" + std::to_string(k);
        bool dangling = false;
        for (const std::string* end : {&l.source, &l.target})
            if (!g.components.contains(*end)) {
                error(subject, "unknown component '" + *end + "'");
                dangling = true;
            }
        if (dangling) continue;
        const auto src = built.find(l.source);
        const auto dst = built.find(l.target);
        const bool both_built = src != built.end() && dst != built.end();

        switch (l.kind) {
        case LinkKind::Information: {
            information[l.source].insert(l.target);
            information[l.target];
            if (l.source_port.empty() || l.target_port.empty()) {
                error(subject, "information link needs ports on both ends");
                break;
            }
            if (!fed.emplace(l.target, l.target_port).second)
                error(subject, "input " + l.target + "." + l.target_port + " has more than one provider");
            if (!both_built) break;
            const auto outs = src->second->outputs();
            const auto ins = dst->second->inputs();
            const Port* from = find_port(outs, l.source_port);
            const Port* to = find_port(ins, l.target_port);
            if (!from) error(subject, "'" + l.source + "' has no output '" + l.source_port + "'");
            if (!to) error(subject, "'" + l.target + "' has no input '" + l.target_port + "'");
            if (from && to && !from->type.unifies_with(to->type))
                error(subject, "type mismatch: " + l.source + "." + l.source_port + " is " + fm::to_string(from->type) +
                                   ", " + l.target + "." + l.target_port + " expects " + fm::to_string(to->type));
            break;
        }
        case LinkKind::Positioning:
            positioning[l.target].insert(l.source);
            positioning[l.source];
            parents[l.target].push_back(l.source);
            if (!l.source_port.empty() || !l.target_port.empty()) error(subject, "positioning links take no ports");
            if (both_built)
                for (const auto* c : {src->second.get(), dst->second.get()})
                    if (!c->frame_bearing())
                        error(subject, "positioning needs frame-bearing ends, '" + c->id() + "' is a " +
                                           std::string(c->kind()));
            break;
        case LinkKind::Visibility: {
            if (!l.source_port.empty() || !l.target_port.empty()) error(subject, "visibility links take no ports");
            if (!both_built) break;
            const std::string_view a = src->second->kind(), b = dst->second->kind();
            if (!((a == "camera" && renderable(b)) || (b == "camera" && renderable(a))))
                error(subject, "visibility must join one camera and one shape or star-source, got " + std::string(a) +
                                   " and " + std::string(b));
            break;
        }
        }
    }

    for (const auto& [id, c] : built)
        for (const auto& port : c->inputs())
            if (!port.optional && !fed.contains({id, port.name})) error(id, "input '" + port.name + "' is not connected");

    for (const auto& path : cycles(information)) error(path.front(), "information cycle " + join(path, " -> "));
    for (const auto& [child, ps] : parents)
        if (ps.size() > 1) error(child, "multiple positioning parents: " + join(ps, ", "));
    for (auto path : cycles(positioning)) {
        // Edges point child to parent; report parent to child.
        std::reverse(path.begin(), path.end());
        error(path.front(), "positioning cycle " + join(path, " -> "));
    }
    return out;
}

std::vector<std::string> topo_order(const SceneGraph& g) {
    std::map<std::string, std::set<std::string>> consumers;
    std::map<std::string, int> pending;
    for (const auto& [id, _] : g.components) pending[id] = 0;
    for (const auto& l : g.links) {
        if (l.kind != LinkKind::Information) continue;
        if (!pending.contains(l.source) || !pending.contains(l.target))
            throw SceneError("information link references an unknown component");
        if (consumers[l.source].insert(l.target).second) ++pending[l.target];
    }
    std::set<std::string> ready;
    for (const auto& [id, n] : pending)
        if (n == 0) ready.insert(id);
    std::vector<std::string> order;
    while (!ready.empty()) {
        const std::string id = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(id);
        for (const auto& c : consumers[id])
            if (--pending[c] == 0) ready.insert(c);
    }
    if (order.size() != g.components.size()) throw SceneError("information links form a cycle");
    return order;
}

Runtime::Runtime(SceneGraph g, std::filesystem::path base_dir) : graph_(std::move(g)) {
    const auto diagnostics = validate(graph_);
    if (std::any_of(diagnostics.begin(), diagnostics.end(), [](const Diagnostic& d) { return d.severity == Severity::Error; })) {
        std::string msg = "invalid scene graph";
        for (const auto& d : diagnostics) msg += "\n" + to_string(d);
        throw SceneError(msg);
    }
    order_ = topo_order(graph_);
    for (const auto& [id, spec] : graph_.components) components_.emplace(id, make_component(spec, base_dir));

    std::map<std::string, std::string> parent;
    for (const auto& l : graph_.links)
        if (l.kind == LinkKind::Positioning) parent[l.target] = l.source;
    std::function<void(const std::string&)> place = [&](const std::string& id) {
        if (forest_.contains(id)) return;
        const auto it = parent.find(id);
        if (it != parent.end()) place(it->second);
        forest_.add(id, Pose6D::identity(), it == parent.end() ? std::string() : it->second);
    };
    for (const auto& [id, c] : components_)
        if (c->frame_bearing()) place(id);
}

const Component& Runtime::component(std::string_view id) const {
    const auto it = components_.find(id);
    if (it == components_.end()) throw SceneError("unknown component '" + std::string(id) + "'");
    return *it->second;
}

const Values& Runtime::outputs(std::string_view id) const {
    const auto it = table_.find(id);
    if (it == table_.end()) throw SceneError("no outputs published by '" + std::string(id) + "'");
    return it->second;
}

std::vector<const Link*> Runtime::links_into(std::string_view id) const {
    std::vector<const Link*> out;
    for (const auto& l : graph_.links)
        if (l.kind == LinkKind::Information && l.target == id) out.push_back(&l);
    return out;
}

Values Runtime::gather(const std::string& id) const {
    Values in;
    for (const Link* l : links_into(id)) in.insert_or_assign(l->target_port, published_value(outputs(l->source), l->source_port));
    return in;
}

void Runtime::publish(const Component& c, Values values) {
    for (const auto& port : c.outputs()) {
        const auto it = values.find(port.name);
        if (it == values.end()) throw TypeError("output '" + port.name + "' was not published");
        if (!port.type.admits(it->second))
            throw TypeError("runtime type violation: output '" + port.name + "' declared " + fm::to_string(port.type) +
                            ", got " + fm::to_string(fm::type_of(it->second)));
    }
    table_.insert_or_assign(c.id(), std::move(values));
}

void Runtime::resolve_frames() {
    for (const auto& [id, c] : components_)
        if (c->frame_bearing()) forest_.set_local(id, c->local_pose());
}

namespace {

template <class Fn> void run_guarded(const Component& c, double t, Fn&& fn) {
    const std::string context = "component '" + c.id() + "' at t=" + fm::format_real(t);
    try {
        fn();
    } catch (const Error& e) {
        rethrow_with_context(e, context);
    } catch (const std::exception& e) {
        throw Error(ErrorKind::Eval, context + ": " + e.what());
    }
}

}  // namespace

void Runtime::initialize(double t0) {
    table_.clear();
    for (const auto& id : order_) {
        Component& c = *components_.at(id);
        run_guarded(c, t0, [&] { publish(c, c.initialize(t0, gather(id))); });
    }
    resolve_frames();
    time_ = t0;
    initialized_ = true;
}

void Runtime::advance_to(double t_next) {
    if (!initialized_) throw SceneError("runtime stepped before initialize");
    if (!(t_next > time_)) throw SceneError("time must advance, got " + fm::format_real(t_next));
    for (const auto& id : order_) {
        Component& c = *components_.at(id);
        run_guarded(c, t_next, [&] { publish(c, c.step(time_, t_next, gather(id))); });
    }
    resolve_frames();
    time_ = t_next;
}

}  // namespace vrf
