#pragma once

// Instantiation of tile algorithms at concrete t, dependence analysis,
// the out-of-place buffer transform, step composition, and DOT export.

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "builtins.hpp"
#include "dsl.hpp"

namespace tilecp {

struct Tile {
    std::string array;
    long i = 0, j = 0;
    long version = 0;  // 0 in place; >0 for renamed buffer versions
    auto operator<=>(const Tile&) const = default;
    std::string str() const {
        std::string s = array + "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
        if (version > 0) s += "@" + std::to_string(version);
        return s;
    }
};

struct TaskInstance {
    int id = 0;  // dense, program order
    Kind kind = Kind::POTRF;
    std::vector<long> indices;  // resolved loop indices, outermost first
    std::vector<Tile> reads;
    Tile write;
    std::string annotation;
    int step = 0;  // 0 for standalone programs; 1..3 for compositions

    std::string label() const {
        std::string s = kind_name(kind);
        s += "(" + std::to_string(write.i) + "," + std::to_string(write.j) + ")";
        return s;
    }
};

enum class Dep { RAW, WAR, WAW };

inline const char* dep_name(Dep d) {
    switch (d) {
        case Dep::RAW: return "RAW";
        case Dep::WAR: return "WAR";
        case Dep::WAW: return "WAW";
    }
    return "?";
}

struct Edge {
    int from, to;
    Dep dep;
    auto operator<=>(const Edge&) const = default;
};

enum class Mode { in_place, out_of_place };

struct TaskGraph {
    std::vector<TaskInstance> tasks;
    std::vector<Edge> edges;
    Mode mode = Mode::in_place;
    long t = 0;

    std::vector<std::vector<int>> successors() const {
        std::vector<std::vector<int>> succ(tasks.size());
        for (const auto& e : edges) succ[e.from].push_back(e.to);
        return succ;
    }
    std::vector<std::vector<int>> predecessors() const {
        std::vector<std::vector<int>> pred(tasks.size());
        for (const auto& e : edges) pred[e.to].push_back(e.from);
        return pred;
    }
};

namespace detail {

inline void expand(const std::vector<Node>& body, std::map<std::string, long>& env,
                   std::vector<long>& idxstack, long t, std::vector<TaskInstance>& out) {
    for (const auto& n : body) {
        if (std::holds_alternative<LoopNode>(n)) {
            const auto& l = std::get<LoopNode>(n);
            long first = l.lo.eval(env), last = l.hi.eval(env);
            long step = l.descending ? -1 : 1;
            if ((l.descending && first < last) || (!l.descending && first > last))
                continue;  // empty range
            for (long v = first;; v += step) {
                env[l.index] = v;
                idxstack.push_back(v);
                expand(l.body, env, idxstack, t, out);
                idxstack.pop_back();
                if (v == last) break;
            }
            env.erase(l.index);
        } else {
            const auto& tn = std::get<TaskNode>(n);
            TaskInstance ti;
            ti.id = (int)out.size();
            ti.kind = tn.kind;
            ti.indices = idxstack;
            ti.annotation = tn.annotation;
            auto resolve = [&](const TileRef& r) {
                Tile tile{r.array, r.row.eval(env), r.col.eval(env), 0};
                if (tile.i < 0 || tile.i >= t || tile.j < 0 || tile.j >= t || tile.j > tile.i)
                    throw std::runtime_error("tile out of lower-triangular bounds: " + tile.str());
                return tile;
            };
            ti.write = resolve(tn.write);
            for (const auto& r : tn.reads) ti.reads.push_back(resolve(r));
            out.push_back(std::move(ti));
        }
    }
}

}  // namespace detail

inline std::vector<TaskInstance> instantiate(const TileAlgorithm& alg, long t) {
    if (t < 1) throw std::invalid_argument("t must be >= 1");
    std::map<std::string, long> env{{alg.param, t}};
    std::vector<long> idxstack;
    std::vector<TaskInstance> out;
    detail::expand(alg.body, env, idxstack, t, out);
    return out;
}

// Dependence edges from per-tile access tracking: a read depends on the most
// recent writer (RAW); a write depends on every read since the previous write
// (WAR) and on the previous write (WAW).
inline TaskGraph build_dag(std::vector<TaskInstance> tasks, long t,
                           Mode mode = Mode::in_place) {
    TaskGraph g;
    g.t = t;
    g.mode = mode;
    std::map<Tile, int> last_write;
    std::map<Tile, std::vector<int>> reads_since;
    std::set<Edge> edges;
    for (const auto& task : tasks) {
        for (const auto& r : task.reads) {
            auto it = last_write.find(r);
            if (it != last_write.end() && it->second != task.id)
                edges.insert({it->second, task.id, Dep::RAW});
        }
        auto wit = last_write.find(task.write);
        if (wit != last_write.end()) {
            bool self_raw = false;
            for (const auto& r : task.reads)
                if (r == task.write) self_raw = true;
            if (!self_raw) edges.insert({wit->second, task.id, Dep::WAW});
        }
        for (int rd : reads_since[task.write])
            if (rd != task.id) edges.insert({rd, task.id, Dep::WAR});
        for (const auto& r : task.reads) reads_since[r].push_back(task.id);
        last_write[task.write] = task.id;
        reads_since[task.write].clear();
    }
    g.tasks = std::move(tasks);
    g.edges.assign(edges.begin(), edges.end());
    return g;
}

// Buffer transform: every write creates a fresh version of its tile; reads
// bind to the latest prior version (accumulations therefore stay serialized);
// one terminal unit-weight copy task depends on every final version.
inline TaskGraph to_out_of_place(std::vector<TaskInstance> tasks, long t) {
    std::map<Tile, long> version;  // current version per base tile
    for (auto& task : tasks) {
        for (auto& r : task.reads) {
            auto it = version.find(r);
            if (it != version.end()) r.version = it->second;
        }
        long v = ++version[task.write];
        task.write.version = v;
    }
    TaskInstance copy;
    copy.id = (int)tasks.size();
    copy.kind = Kind::BUFCPY;
    copy.annotation = "copy";
    copy.write = Tile{"OUT", 0, 0, 0};  // distinct buffer; no conflicts
    for (const auto& [tile, v] : version) {
        Tile final_tile = tile;
        final_tile.version = v;
        copy.reads.push_back(final_tile);
    }
    int step = tasks.empty() ? 0 : tasks.back().step;
    copy.step = step;
    tasks.push_back(std::move(copy));
    return build_dag(std::move(tasks), t, Mode::out_of_place);
}

inline TaskGraph to_out_of_place(const TaskGraph& g) {
    std::vector<TaskInstance> tasks = g.tasks;
    return to_out_of_place(std::move(tasks), g.t);
}

// Literal concatenation of the three steps; interleaving emerges from
// dependence analysis alone.
inline TaskGraph compose(const TileAlgorithm& step1, int trtri_variant,
                         const TileAlgorithm& step3, long t, Mode mode) {
    TileAlgorithm step2 =
        parse_algorithm(builtin_sources().at("TRTRI_V" + std::to_string(trtri_variant)));
    std::vector<TaskInstance> tasks;
    int stepno = 0;
    for (const TileAlgorithm* alg :
         {&step1, static_cast<const TileAlgorithm*>(&step2), &step3}) {
        ++stepno;
        for (auto& ti : instantiate(*alg, t)) {
            ti.id = (int)tasks.size();
            ti.step = stepno;
            tasks.push_back(std::move(ti));
        }
    }
    if (mode == Mode::out_of_place) return to_out_of_place(std::move(tasks), t);
    return build_dag(std::move(tasks), t, mode);
}

inline TaskGraph compose_cholinv(int variant, long t, Mode mode) {
    TileAlgorithm p = parse_algorithm(POTRF_SRC);
    TileAlgorithm l = parse_algorithm(LAUUM_SRC);
    return compose(p, variant, l, t, mode);
}

// Topological order by Kahn's algorithm with smallest-id tie break; throws on
// cycles (defensive; program-order edges cannot form one).
inline std::vector<int> topo_order(const TaskGraph& g) {
    std::vector<int> indeg(g.tasks.size(), 0);
    auto succ = g.successors();
    for (const auto& e : g.edges) ++indeg[e.to];
    std::set<int> ready;
    for (size_t i = 0; i < g.tasks.size(); ++i)
        if (indeg[i] == 0) ready.insert((int)i);
    std::vector<int> order;
    while (!ready.empty()) {
        int n = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(n);
        for (int s : succ[n])
            if (--indeg[s] == 0) ready.insert(s);
    }
    if (order.size() != g.tasks.size()) throw std::runtime_error("graph has a cycle");
    return order;
}

// Transitive reduction of the edge set (kept out of analysis; DOT export only).
inline std::vector<Edge> transitive_reduction(const TaskGraph& g) {
    size_t n = g.tasks.size();
    std::vector<std::set<int>> direct(n);
    for (const auto& e : g.edges) direct[e.from].insert(e.to);
    // reach[i] = nodes reachable from i via >= 2 hops or 1 hop; computed in
    // reverse topological order
    std::vector<std::set<int>> reach(n);
    std::vector<int> order = topo_order(g);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        int u = *it;
        for (int v : direct[u]) {
            reach[u].insert(v);
            reach[u].insert(reach[v].begin(), reach[v].end());
        }
    }
    std::vector<Edge> kept;
    for (const auto& e : g.edges) {
        bool redundant = false;
        for (int mid : direct[e.from]) {
            if (mid == e.to) continue;
            if (reach[mid].count(e.to)) { redundant = true; break; }
        }
        if (!redundant) kept.push_back(e);
    }
    return kept;
}

inline std::string export_dot(const TaskGraph& g, bool reduce = true) {
    static const char* step_colors[] = {"black", "royalblue", "darkorange", "forestgreen"};
    std::ostringstream os;
    os << "digraph taskgraph {\n  rankdir=TB;\n  node [shape=box, fontsize=10];\n";
    const int wu = 1;
    for (const auto& t : g.tasks) {
        os << "  n" << t.id << " [label=\"" << t.label() << " w=" << wu
           << "\", color=" << step_colors[t.step % 4] << "];\n";
    }
    std::vector<Edge> es = reduce ? transitive_reduction(g) : g.edges;
    for (const auto& e : es) {
        os << "  n" << e.from << " -> n" << e.to;
        if (e.dep == Dep::WAR) os << " [style=dashed]";
        else if (e.dep == Dep::WAW) os << " [style=dotted]";
        os << ";\n";
    }
    os << "}\n";
    return os.str();
}

inline std::string export_csv(const TaskGraph& g) {
    std::ostringstream os;
    os << "id,kind,i,j,k,weight_unit,weight_flop\n";
    auto flopw = [](Kind k) {
        switch (k) {
            case Kind::TRSM: case Kind::TRMM: case Kind::SYRK: return 3;
            case Kind::GEMM: return 6;
            default: return 1;
        }
    };
    for (const auto& t : g.tasks) {
        long i = t.indices.size() > 0 ? t.indices[0] : -1;
        long j = t.indices.size() > 1 ? t.indices[1] : -1;
        long k = t.indices.size() > 2 ? t.indices[2] : -1;
        os << t.id << "," << kind_name(t.kind) << "," << i << "," << j << "," << k
           << ",1," << flopw(t.kind) << "\n";
    }
    return os.str();
}

}  // namespace tilecp
