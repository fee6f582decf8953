#pragma once

// Greedy list scheduling on p identical workers and the work/span
// performance upper bound.

#include <algorithm>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "cpath.hpp"
#include "taskgraph.hpp"

namespace tilecp {

struct Assignment {
    int task, worker;
    long start, finish;
};

struct ScheduleTrace {
    int p = 1;
    long makespan = 0;
    std::vector<Assignment> assignments;
};

// Event-driven greedy scheduler: whenever a worker is idle, the ready task
// with the smallest id runs next.
inline ScheduleTrace list_schedule(const TaskGraph& g, const WeightModel& w, int p) {
    if (p < 1) throw std::invalid_argument("p must be >= 1");
    ScheduleTrace tr;
    tr.p = p;
    size_t n = g.tasks.size();
    if (n == 0) return tr;
    auto succ = g.successors();
    std::vector<int> indeg(n, 0);
    for (const auto& e : g.edges) ++indeg[e.to];
    std::set<int> ready;
    for (size_t i = 0; i < n; ++i)
        if (indeg[i] == 0) ready.insert((int)i);

    // (finish time, worker, task) of running tasks
    using Ev = std::tuple<long, int, int>;
    std::priority_queue<Ev, std::vector<Ev>, std::greater<>> running;
    std::vector<int> idle;
    for (int i = p - 1; i >= 0; --i) idle.push_back(i);
    long now = 0;
    size_t done = 0;
    while (done < n) {
        while (!idle.empty() && !ready.empty()) {
            int task = *ready.begin();
            ready.erase(ready.begin());
            int worker = idle.back();
            idle.pop_back();
            long fin = now + w.weight(g.tasks[task].kind);
            tr.assignments.push_back({task, worker, now, fin});
            running.emplace(fin, worker, task);
        }
        if (running.empty()) throw std::runtime_error("deadlock: no ready task");
        now = std::get<0>(running.top());
        while (!running.empty() && std::get<0>(running.top()) == now) {
            auto [fin, worker, task] = running.top();
            running.pop();
            idle.push_back(worker);
            ++done;
            for (int s : succ[task])
                if (--indeg[s] == 0) ready.insert(s);
        }
        std::sort(idle.rbegin(), idle.rend());
    }
    tr.makespan = now;
    return tr;
}

// Structural replay check: every task starts at or after all predecessors
// finish, and no worker runs two tasks at once.
inline bool trace_valid(const TaskGraph& g, const ScheduleTrace& tr) {
    std::vector<long> start(g.tasks.size(), -1), finish(g.tasks.size(), -1);
    for (const auto& a : tr.assignments) {
        start[a.task] = a.start;
        finish[a.task] = a.finish;
    }
    for (const auto& e : g.edges)
        if (start[e.to] < finish[e.from]) return false;
    std::vector<std::vector<std::pair<long, long>>> spans(tr.p);
    for (const auto& a : tr.assignments) spans[a.worker].push_back({a.start, a.finish});
    for (auto& sp : spans) {
        std::sort(sp.begin(), sp.end());
        for (size_t i = 1; i < sp.size(); ++i)
            if (sp[i].first < sp[i - 1].second) return false;
    }
    return true;
}

struct PerfBound {
    double gamma;       // seconds per flop
    int p;
    double total_flops;
    double cp_flops;
    double u_p;         // flop rate upper bound
};

inline constexpr double DEFAULT_RATE_GFLOPS = 6.43;  // 1/gamma, sequential rate

// U(p) = (1/gamma) * min(p, total/cp); the unit b^3/3 cancels in the ratio.
inline PerfBound upper_bound(double total_flops, double cp_flops, int p, double gamma) {
    if (total_flops <= 0 || cp_flops <= 0 || p < 1 || gamma <= 0)
        throw std::invalid_argument("invalid performance-bound inputs");
    if (total_flops < cp_flops) throw std::invalid_argument("total below critical path");
    PerfBound b{gamma, p, total_flops, cp_flops, 0};
    b.u_p = (1.0 / gamma) * std::min((double)p, total_flops / cp_flops);
    return b;
}

// One row per worker count: the model bound next to the simulated makespan.
inline std::string bound_curve(const TaskGraph& g, const WeightModel& w,
                               const std::vector<int>& p_range, double gamma) {
    long total = total_weight(g, w);
    long cp = critical_path(g, w).length;
    std::ostringstream os;
    os << "p,u_p_gflops,makespan_units,cp_units,total_units\n";
    for (int p : p_range) {
        PerfBound b = upper_bound((double)total, (double)cp, p, gamma);
        ScheduleTrace tr = list_schedule(g, w, p);
        os << p << "," << b.u_p * 1e-9 << "," << tr.makespan << "," << cp << "," << total << "\n";
    }
    return os.str();
}

}  // namespace tilecp
