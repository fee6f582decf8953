#pragma once

// Weight models, longest-path computation, closed-form reference tables, and
// verification of computed versus reference lengths.

#include <algorithm>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "taskgraph.hpp"

namespace tilecp {

// One weight unit is b^3/3 flops; lesser terms of the per-kernel counts are
// dropped.
struct WeightModel {
    enum Variant { unit, flop_based } variant = unit;

    long weight(Kind k) const {
        if (variant == unit) return 1;
        switch (k) {
            case Kind::POTRF: case Kind::LAUUM: case Kind::TRTRI: case Kind::BUFCPY:
                return 1;
            case Kind::TRSM: case Kind::TRMM: case Kind::SYRK:
                return 3;
            case Kind::GEMM:
                return 6;
        }
        return 1;
    }
    const char* name() const { return variant == unit ? "unit" : "flop"; }
};

inline const WeightModel UNIT_WEIGHTS{WeightModel::unit};
inline const WeightModel FLOP_WEIGHTS{WeightModel::flop_based};

struct CpReport {
    long length = 0;
    std::vector<int> path;  // task ids along the heaviest chain
    std::optional<long> closed_form;
    bool match = false;
};

// Node-weighted longest path (both endpoints counted) by dynamic programming
// over a topological order; ties broken toward the smallest predecessor id.
inline CpReport critical_path(const TaskGraph& g, const WeightModel& w) {
    CpReport rep;
    if (g.tasks.empty()) return rep;
    std::vector<long> dist(g.tasks.size());
    std::vector<int> best_pred(g.tasks.size(), -1);
    auto pred = g.predecessors();
    for (int id : topo_order(g)) {
        long in = 0;
        int bp = -1;
        std::sort(pred[id].begin(), pred[id].end());
        for (int p : pred[id]) {
            if (dist[p] > in) { in = dist[p]; bp = p; }
        }
        dist[id] = in + w.weight(g.tasks[id].kind);
        best_pred[id] = bp;
    }
    int end = 0;
    for (size_t i = 1; i < g.tasks.size(); ++i)
        if (dist[i] > dist[end]) end = (int)i;
    rep.length = dist[end];
    for (int n = end; n != -1; n = best_pred[n]) rep.path.push_back(n);
    std::reverse(rep.path.begin(), rep.path.end());
    return rep;
}

// Exhaustive source-to-sink chain enumeration; independent oracle for small
// graphs.
inline long brute_force_longest_path(const TaskGraph& g, const WeightModel& w,
                                     size_t max_nodes = 40) {
    if (g.tasks.size() > max_nodes) throw std::invalid_argument("graph too large for brute force");
    if (g.tasks.empty()) return 0;
    auto succ = g.successors();
    long best = 0;
    std::vector<int> indeg(g.tasks.size(), 0);
    for (const auto& e : g.edges) ++indeg[e.to];
    auto dfs = [&](auto&& self, int node, long acc) -> void {
        acc += w.weight(g.tasks[node].kind);
        best = std::max(best, acc);
        for (int s : succ[node]) self(self, s, acc);
    };
    for (size_t i = 0; i < g.tasks.size(); ++i)
        if (indeg[i] == 0) dfs(dfs, (int)i, 0);
    return best;
}

inline long total_weight(const TaskGraph& g, const WeightModel& w) {
    long sum = 0;
    for (const auto& t : g.tasks) sum += w.weight(t.kind);
    return sum;
}

enum class Step { POTRF, LAUUM, TRTRI, CHOLINV };

inline const char* step_name(Step s) {
    switch (s) {
        case Step::POTRF: return "POTRF";
        case Step::LAUUM: return "LAUUM";
        case Step::TRTRI: return "TRTRI";
        case Step::CHOLINV: return "CHOLINV";
    }
    return "?";
}

// Published closed-form critical-path lengths.
inline long closed_form(Step step, int variant, Mode mode, const WeightModel& w, long t) {
    bool fl = w.variant == WeightModel::flop_based;
    auto bad = [&]() -> long {
        throw std::invalid_argument("unsupported closed-form combination");
    };
    switch (step) {
        case Step::POTRF:
            if (t < 2) return bad();
            return fl ? 9 * t - 10 : 3 * t - 2;
        case Step::LAUUM:
            if (mode == Mode::in_place) {
                if (t < 2) return bad();
                return fl ? 9 * t - 10 : 3 * t - 2;
            }
            if (t == 2) return fl ? 5 : t + 1;  // flop value 3t-1 at t=2
            if (t < 2) return bad();
            return fl ? 6 * t - 8 : t + 1;
        case Step::TRTRI: {
            if (t < 2 || variant < 1 || variant > 6) return bad();
            int v = (variant - 1) % 3 + 1;  // 4..6 mirror 1..3
            if (v == 1) {
                if (mode == Mode::out_of_place) return fl ? 9 * t - 10 : 2 * t;
                return fl ? 12 * t - 16 : 3 * t - 2;
            }
            if (v == 2) return fl ? 9 * t - 11 : 2 * t - 1;
            return fl ? 6 * t - 5 : t + 1;
        }
        case Step::CHOLINV: {
            if (t < 3 || variant < 1 || variant > 6) return bad();
            static const long in_u[] = {0, 3, 6, 3, 9, 8, 7};
            static const long in_uc[] = {0, 2, -1, 6, -6, -7, -3};
            static const long in_f[] = {0, 12, 18, 9, 30, 27, 24};
            static const long in_fc[] = {0, 2, -11, 23, -36, -34, -25};
            static const long out_u[] = {0, 3, 3, 3, 5, 5, 5};
            static const long out_uc[] = {0, 2, 2, 3, 0, -3, -2};
            static const long out_f[] = {0, 9, 9, 9, 18, 18, 21};
            static const long out_fc[] = {0, 1, 7, 11, -14, -19, -24};
            if (mode == Mode::in_place)
                return fl ? in_f[variant] * t + in_fc[variant] : in_u[variant] * t + in_uc[variant];
            return fl ? out_f[variant] * t + out_fc[variant] : out_u[variant] * t + out_uc[variant];
        }
    }
    return bad();
}

// Cells where the generated graphs provably cannot reach the published value;
// the model-true length is recorded instead. Two causes, both documented in
// the README: the x3x in-place flop form 9t+23 only binds for t >= 5, and the
// composed out-of-place block is inconsistent with the buffer model that
// reproduces every standalone out-of-place row (for x1x the pair (3t+2, 9t+1)
// is jointly unreachable by any statement order: the flop path is forced one
// unit above 9t+1 by the terminal copy, while the unit path cannot exceed
// 3t+1 without it).
inline std::optional<long> model_correction(Step step, int variant, Mode mode,
                                            const WeightModel& w, long t) {
    if (step != Step::CHOLINV) return std::nullopt;
    bool fl = w.variant == WeightModel::flop_based;
    if (mode == Mode::in_place) {
        if (variant == 3 && fl && t == 3) return 44;
        if (variant == 3 && fl && t == 4) return 56;
        return std::nullopt;
    }
    // Model-true composed out-of-place closed forms.
    static const long u[] = {0, 3, 3, 3, 5, 5, 4};
    static const long uc[] = {0, 1, 2, 1, -1, -4, 0};
    static const long f[] = {0, 9, 9, 9, 18, 18, 15};
    static const long fc[] = {0, 2, 5, 5, -14, -19, -9};
    long v = fl ? f[variant] * t + fc[variant] : u[variant] * t + uc[variant];
    if (v == closed_form(step, variant, mode, w, t)) return std::nullopt;
    return v;
}

// Published value overridden by the model-true value where they differ.
inline long expected_length(Step step, int variant, Mode mode, const WeightModel& w, long t) {
    if (auto c = model_correction(step, variant, mode, w, t)) return *c;
    return closed_form(step, variant, mode, w, t);
}

struct TableRow {
    Step step;
    int variant;  // 0 where not applicable
    Mode mode;
    WeightModel weights;
    long t;
    long computed = 0;
    long reference = 0;  // published closed form
    bool match = false;  // computed == reference
    bool known = false;  // mismatch documented as a model correction
};

inline TaskGraph make_graph(Step step, int variant, Mode mode, long t) {
    switch (step) {
        case Step::POTRF:
        case Step::LAUUM: {
            TileAlgorithm alg =
                parse_algorithm(step == Step::POTRF ? POTRF_SRC : LAUUM_SRC);
            auto tasks = instantiate(alg, t);
            if (mode == Mode::out_of_place) return to_out_of_place(std::move(tasks), t);
            return build_dag(std::move(tasks), t);
        }
        case Step::TRTRI: {
            TileAlgorithm alg = parse_algorithm(
                builtin_sources().at("TRTRI_V" + std::to_string(variant)));
            auto tasks = instantiate(alg, t);
            if (mode == Mode::out_of_place) return to_out_of_place(std::move(tasks), t);
            return build_dag(std::move(tasks), t);
        }
        case Step::CHOLINV:
            return compose_cholinv(variant, t, mode);
    }
    throw std::invalid_argument("bad step");
}

// Sweep every table row over the given t range; a row mismatches when the
// computed length differs from the published closed form, and is flagged
// `known` when the difference is a documented model correction.
inline std::vector<TableRow> verify_tables(long t_lo, long t_hi) {
    std::vector<TableRow> rows;
    auto run = [&](Step step, int variant, Mode mode, const WeightModel& w, long t) {
        TableRow row{step, variant, mode, w, t};
        TaskGraph g = make_graph(step, variant, mode, t);
        row.computed = critical_path(g, w).length;
        row.reference = closed_form(step, variant, mode, w, t);
        row.match = row.computed == row.reference;
        if (!row.match) {
            auto c = model_correction(step, variant, mode, w, t);
            row.known = c && *c == row.computed;
        }
        rows.push_back(row);
    };
    for (long t = t_lo; t <= t_hi; ++t) {
        for (const auto& w : {UNIT_WEIGHTS, FLOP_WEIGHTS}) {
            if (t >= 2) {
                run(Step::POTRF, 0, Mode::in_place, w, t);
                run(Step::LAUUM, 0, Mode::in_place, w, t);
                run(Step::LAUUM, 0, Mode::out_of_place, w, t);
                for (int v = 1; v <= 6; ++v) {
                    run(Step::TRTRI, v, Mode::in_place, w, t);
                    run(Step::TRTRI, v, Mode::out_of_place, w, t);
                }
            }
            if (t >= 3)
                for (int v = 1; v <= 6; ++v) {
                    run(Step::CHOLINV, v, Mode::in_place, w, t);
                    run(Step::CHOLINV, v, Mode::out_of_place, w, t);
                }
        }
    }
    return rows;
}

inline std::string verify_csv(const std::vector<TableRow>& rows) {
    std::ostringstream os;
    os << "step,variant,mode,weights,t,computed,closed_form,match\n";
    for (const auto& r : rows) {
        os << step_name(r.step) << "," << r.variant << ","
           << (r.mode == Mode::in_place ? "inplace" : "outofplace") << ","
           << r.weights.name() << "," << r.t << "," << r.computed << "," << r.reference
           << "," << (r.match ? "yes" : (r.known ? "known" : "NO")) << "\n";
    }
    return os.str();
}

}  // namespace tilecp
