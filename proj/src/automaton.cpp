#include "stcsp/automaton.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <json.hpp>

namespace stcsp {

std::size_t BuchiAutomaton::transition_count() const {
    std::size_t n = 0;
    for (const auto& ts : transitions) n += ts.size();
    return n;
}

std::size_t BuchiAutomaton::accepting_count() const {
    return static_cast<std::size_t>(std::count(accepting.begin(), accepting.end(), true));
}

StateId BuchiAutomaton::add_state(bool is_accepting) {
    accepting.push_back(is_accepting);
    transitions.emplace_back();
    if (!initial) initial = 0;
    return static_cast<StateId>(accepting.size() - 1);
}

void BuchiAutomaton::add_transition(StateId from, InstantaneousAssignment label, StateId to) {
    transitions.at(from).push_back({std::move(label), to});
}

std::optional<StateId> BuchiAutomaton::step(StateId from, const InstantaneousAssignment& label) const {
    for (const auto& t : transitions.at(from)) {
        if (t.label == label) return t.to;
    }
    return std::nullopt;
}

std::vector<std::uint32_t> BuchiAutomaton::user_positions() const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < vars.size(); ++i) {
        if (vars[i].origin == VarOrigin::User) out.push_back(i);
    }
    return out;
}

PrefixCapExceeded::PrefixCapExceeded(std::uint64_t bound_, std::uint64_t cap)
    : std::runtime_error("prefix count " + std::to_string(bound_) + " exceeds cap " + std::to_string(cap)),
      bound(bound_) {}

namespace {

// Tarjan, iterative; returns the component index of every state
std::vector<std::uint32_t> components(const BuchiAutomaton& a, std::uint32_t& count) {
    const std::size_t n = a.state_count();
    constexpr std::uint32_t kNone = UINT32_MAX;
    std::vector<std::uint32_t> index(n, kNone), low(n, 0), comp(n, kNone);
    std::vector<StateId> stack;
    std::vector<bool> on_stack(n, false);
    std::vector<std::pair<StateId, std::size_t>> call;
    std::uint32_t next_index = 0;
    count = 0;
    for (StateId root = 0; root < n; ++root) {
        if (index[root] != kNone) continue;
        call.push_back({root, 0});
        while (!call.empty()) {
            auto& [s, edge] = call.back();
            if (edge == 0 && index[s] == kNone) {
                index[s] = low[s] = next_index++;
                stack.push_back(s);
                on_stack[s] = true;
            }
            if (edge < a.transitions[s].size()) {
                StateId t = a.transitions[s][edge++].to;
                if (index[t] == kNone) {
                    call.push_back({t, 0});
                } else if (on_stack[t]) {
                    low[s] = std::min(low[s], index[t]);
                }
                continue;
            }
            if (low[s] == index[s]) {
                StateId w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = count;
                } while (w != s);
                ++count;
            }
            StateId done = s;
            call.pop_back();
            if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
        }
    }
    return comp;
}

}  // namespace

std::vector<bool> live_states(const BuchiAutomaton& a) {
    const std::size_t n = a.state_count();
    std::vector<bool> live(n, false);
    if (a.empty()) return live;

    // a state is productive when it can reach a cycle through an accepting state
    std::uint32_t count = 0;
    std::vector<std::uint32_t> comp = components(a, count);
    std::vector<std::uint32_t> size(count, 0);
    std::vector<bool> cyclic(count, false), has_accepting(count, false);
    for (StateId s = 0; s < n; ++s) {
        ++size[comp[s]];
        if (a.accepting[s]) has_accepting[comp[s]] = true;
        for (const auto& t : a.transitions[s]) {
            if (t.to == s) cyclic[comp[s]] = true;
        }
    }
    std::vector<std::vector<StateId>> preds(n);
    for (StateId s = 0; s < n; ++s) {
        for (const auto& t : a.transitions[s]) preds[t.to].push_back(s);
    }
    std::vector<bool> co(n, false);
    std::vector<StateId> work;
    for (StateId s = 0; s < n; ++s) {
        std::uint32_t c = comp[s];
        if (has_accepting[c] && (cyclic[c] || size[c] > 1)) {
            co[s] = true;
            work.push_back(s);
        }
    }
    while (!work.empty()) {
        StateId s = work.back();
        work.pop_back();
        for (StateId p : preds[s]) {
            if (!co[p]) {
                co[p] = true;
                work.push_back(p);
            }
        }
    }
    if (!co[*a.initial]) return live;
    work = {*a.initial};
    live[*a.initial] = true;
    while (!work.empty()) {
        StateId s = work.back();
        work.pop_back();
        for (const auto& t : a.transitions[s]) {
            if (co[t.to] && !live[t.to]) {
                live[t.to] = true;
                work.push_back(t.to);
            }
        }
    }
    return live;
}

BuchiAutomaton prune(const BuchiAutomaton& a) {
    std::vector<bool> live = live_states(a);
    BuchiAutomaton out;
    out.vars = a.vars;
    std::vector<StateId> remap(a.state_count(), 0);
    for (StateId s = 0; s < a.state_count(); ++s) {
        if (live[s]) remap[s] = out.add_state(a.accepting[s]);
    }
    if (out.state_count() == 0) return out;
    out.initial = remap[*a.initial];
    for (StateId s = 0; s < a.state_count(); ++s) {
        if (!live[s]) continue;
        for (const auto& t : a.transitions[s]) {
            if (live[t.to]) out.add_transition(remap[s], t.label, remap[t.to]);
        }
    }
    return out;
}

namespace {

InstantaneousAssignment project_label(const InstantaneousAssignment& label,
                                      const std::optional<std::vector<std::uint32_t>>& positions) {
    if (!positions) return label;
    InstantaneousAssignment out;
    out.reserve(positions->size());
    for (std::uint32_t p : *positions) out.push_back(label.at(p));
    return out;
}

}  // namespace

std::set<StreamPrefix> enumerate_prefixes(const BuchiAutomaton& a, std::size_t L,
                                          const std::optional<std::vector<std::uint32_t>>& positions,
                                          std::uint64_t cap) {
    std::set<StreamPrefix> out;
    if (a.empty()) return out;
    // layer: projected prefix -> states reached by some run spelling it
    std::map<StreamPrefix, std::set<StateId>> layer;
    layer[StreamPrefix{}] = {*a.initial};
    for (std::size_t depth = 0; depth < L; ++depth) {
        std::map<StreamPrefix, std::set<StateId>> next;
        for (const auto& [prefix, states] : layer) {
            for (StateId s : states) {
                for (const auto& t : a.transitions[s]) {
                    StreamPrefix ext = prefix;
                    ext.steps.push_back(project_label(t.label, positions));
                    next[std::move(ext)].insert(t.to);
                    if (next.size() > cap) throw PrefixCapExceeded(next.size(), cap);
                }
            }
        }
        layer = std::move(next);
    }
    for (auto& [prefix, states] : layer) out.insert(prefix);
    return out;
}

Run run(const BuchiAutomaton& a, const std::vector<InstantaneousAssignment>& labels) {
    if (a.empty()) throw InvalidRun("empty automaton has no runs");
    Run r;
    r.start = *a.initial;
    r.visited.push_back(r.start);
    StateId s = r.start;
    for (const auto& label : labels) {
        std::optional<StateId> to = a.step(s, label);
        if (!to) throw InvalidRun("no transition from state " + std::to_string(s) + " for step " +
                                  std::to_string(r.labels.size()));
        s = *to;
        r.labels.push_back(label);
        r.visited.push_back(s);
    }
    return r;
}

bool accepts_lasso(const BuchiAutomaton& a, const std::vector<InstantaneousAssignment>& stem,
                   const std::vector<InstantaneousAssignment>& cycle) {
    if (cycle.empty()) throw std::invalid_argument("lasso cycle must be non-empty");
    StateId s = run(a, stem).visited.back();
    // iterate the cycle until the state at the cycle boundary repeats
    std::map<StateId, std::size_t> seen;
    std::vector<bool> hit_accepting;
    for (;;) {
        auto [it, fresh] = seen.emplace(s, hit_accepting.size());
        if (!fresh) {
            for (std::size_t i = it->second; i < hit_accepting.size(); ++i) {
                if (hit_accepting[i]) return true;
            }
            return false;
        }
        bool acc = false;
        for (const auto& label : cycle) {
            std::optional<StateId> to = a.step(s, label);
            if (!to) throw InvalidRun("no transition inside the lasso cycle");
            s = *to;
            acc = acc || a.accepting[s];
        }
        hit_accepting.push_back(acc);
    }
}

std::optional<std::size_t> distance_to_accepting(const BuchiAutomaton& a) {
    return bfs_distance(a, [&](StateId s) { return a.accepting[s]; });
}

std::optional<StreamPrefix> first_projected_difference(const BuchiAutomaton& a, const std::vector<std::uint32_t>& pa,
                                                       const BuchiAutomaton& b, const std::vector<std::uint32_t>& pb,
                                                       std::size_t depth) {
    using Subset = std::vector<StateId>;
    struct Item {
        Subset sa, sb;
        StreamPrefix word;
    };
    if (a.empty() || b.empty()) {
        if (a.empty() && b.empty()) return std::nullopt;
        return StreamPrefix{};
    }
    std::set<std::pair<Subset, Subset>> seen;
    std::vector<Item> queue{{{*a.initial}, {*b.initial}, {}}};
    seen.insert({queue[0].sa, queue[0].sb});
    auto successors = [](const BuchiAutomaton& m, const Subset& from, const std::vector<std::uint32_t>& pos) {
        std::map<InstantaneousAssignment, std::set<StateId>> out;
        for (StateId s : from) {
            for (const auto& t : m.transitions[s]) out[project_label(t.label, pos)].insert(t.to);
        }
        return out;
    };
    for (std::size_t head = 0; head < queue.size(); ++head) {
        Item item = queue[head];
        if (item.word.length() >= depth) continue;
        auto na = successors(a, item.sa, pa);
        auto nb = successors(b, item.sb, pb);
        for (const auto& [label, ta] : na) {
            StreamPrefix w = item.word;
            w.steps.push_back(label);
            auto it = nb.find(label);
            if (it == nb.end()) return w;
            Subset sa(ta.begin(), ta.end()), sb(it->second.begin(), it->second.end());
            if (seen.insert({sa, sb}).second) queue.push_back({std::move(sa), std::move(sb), std::move(w)});
        }
        for (const auto& [label, tb] : nb) {
            if (!na.count(label)) {
                StreamPrefix w = item.word;
                w.steps.push_back(label);
                return w;
            }
        }
    }
    return std::nullopt;
}

namespace {

std::string label_text(const BuchiAutomaton& a, const InstantaneousAssignment& label,
                       const std::optional<std::vector<std::uint32_t>>& positions) {
    std::string out;
    auto emit = [&](std::uint32_t i) {
        if (!out.empty()) out += ",";
        out += a.vars[i].name + "=" + std::to_string(label[i]);
    };
    if (positions) {
        for (std::uint32_t p : *positions) emit(p);
    } else {
        for (std::uint32_t i = 0; i < label.size(); ++i) emit(i);
    }
    return out;
}

}  // namespace

std::string export_dot(const BuchiAutomaton& a, const std::optional<std::vector<std::uint32_t>>& positions) {
    std::ostringstream os;
    os << "digraph solution {\n  rankdir=LR;\n";
    for (StateId s = 0; s < a.state_count(); ++s) {
        os << "  s" << s << " [shape=" << (a.accepting[s] ? "doublecircle" : "circle") << "];\n";
    }
    if (a.initial) os << "  init [shape=point];\n  init -> s" << *a.initial << ";\n";
    for (StateId s = 0; s < a.state_count(); ++s) {
        for (const auto& t : a.transitions[s]) {
            os << "  s" << s << " -> s" << t.to << " [label=\"" << label_text(a, t.label, positions) << "\"];\n";
        }
    }
    os << "}\n";
    return os.str();
}

std::string export_json(const BuchiAutomaton& a) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["vars"] = ordered_json::array();
    for (const auto& v : a.vars) j["vars"].push_back({{"name", v.name}, {"lo", v.alphabet.lo}, {"hi", v.alphabet.hi}});
    j["initial"] = a.initial ? ordered_json(*a.initial) : ordered_json(nullptr);
    j["accepting"] = ordered_json::array();
    for (StateId s = 0; s < a.state_count(); ++s) {
        if (a.accepting[s]) j["accepting"].push_back(s);
    }
    j["states"] = a.state_count();
    j["transitions"] = ordered_json::array();
    for (StateId s = 0; s < a.state_count(); ++s) {
        for (const auto& t : a.transitions[s]) j["transitions"].push_back({{"from", s}, {"label", t.label}, {"to", t.to}});
    }
    return j.dump(2) + "\n";
}

BuchiAutomaton automaton_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    BuchiAutomaton a;
    for (const auto& v : j.at("vars")) {
        VarInfo info;
        info.name = v.at("name").get<std::string>();
        info.alphabet = Alphabet(v.at("lo").get<Value>(), v.at("hi").get<Value>());
        if (info.name.rfind("_aux", 0) == 0) {
            info.origin = VarOrigin::Auxiliary;
            info.aux_seq = static_cast<std::uint32_t>(std::stoul(info.name.substr(4)));
        }
        a.vars.push_back(info);
    }
    std::size_t states = j.value("states", std::size_t{0});
    std::set<StateId> acc;
    for (const auto& s : j.at("accepting")) acc.insert(s.get<StateId>());
    for (const auto& t : j.at("transitions")) {
        states = std::max<std::size_t>(states, std::max(t.at("from").get<StateId>(), t.at("to").get<StateId>()) + 1);
    }
    if (!j.at("initial").is_null()) states = std::max<std::size_t>(states, j.at("initial").get<StateId>() + 1);
    for (StateId s = 0; s < states; ++s) a.add_state(acc.count(s) > 0);
    a.initial = j.at("initial").is_null() ? std::nullopt : std::optional<StateId>(j.at("initial").get<StateId>());
    for (const auto& t : j.at("transitions")) {
        a.add_transition(t.at("from").get<StateId>(), t.at("label").get<InstantaneousAssignment>(), t.at("to").get<StateId>());
    }
    return a;
}

}  // namespace stcsp
