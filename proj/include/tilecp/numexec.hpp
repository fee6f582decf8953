#pragma once

// Scalar tile kernels and a dependence-respecting executor for generated
// graphs. Kernels are handwritten triple loops so the numeric layer is an
// oracle independent of any external library. Task annotations select the
// tile-level operation; W is the written tile's current value, R1/R2 the
// extra reads.

#include <cmath>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "taskgraph.hpp"

namespace tilecp {

using TileData = std::vector<double>;  // b*b row-major

struct TileMatrix {
    long t = 0, b = 0;
    std::map<std::pair<long, long>, TileData> tiles;  // lower-triangular region

    TileData& at(long i, long j) { return tiles.at({i, j}); }
    const TileData& at(long i, long j) const { return tiles.at({i, j}); }
};

namespace kern {

inline double& el(TileData& a, long b, long i, long j) { return a[i * b + j]; }
inline double el(const TileData& a, long b, long i, long j) { return a[i * b + j]; }

// W <- chol(W), lower factor, zero strict upper
inline void chol(TileData& w, long b) {
    for (long j = 0; j < b; ++j) {
        double d = el(w, b, j, j);
        for (long k = 0; k < j; ++k) d -= el(w, b, j, k) * el(w, b, j, k);
        if (d <= 0) throw std::runtime_error("factorization failure: nonpositive pivot");
        d = std::sqrt(d);
        el(w, b, j, j) = d;
        for (long i = j + 1; i < b; ++i) {
            double s = el(w, b, i, j);
            for (long k = 0; k < j; ++k) s -= el(w, b, i, k) * el(w, b, j, k);
            el(w, b, i, j) = s / d;
        }
        for (long i = 0; i < j; ++i) el(w, b, i, j) = 0;
    }
}

// W <- W^-1 for lower-triangular W, zero strict upper
inline void inv_lower(TileData& w, long b) {
    TileData x(b * b, 0.0);
    for (long c = 0; c < b; ++c) {
        for (long i = c; i < b; ++i) {
            double s = (i == c) ? 1.0 : 0.0;
            for (long k = c; k < i; ++k) s -= el(w, b, i, k) * el(x, b, k, c);
            el(x, b, i, c) = s / el(w, b, i, i);
        }
    }
    w = x;
}

enum class Side { left, right };
enum class Fam { none, t_first, t_second };  // transpose position in products

// W <- W op alpha*A*B with optional transposes; covers all product updates
inline void product_update(TileData& w, const TileData& a, const TileData& c, long b,
                           double alpha, bool ta, bool tb, bool overwrite) {
    TileData r(b * b, 0.0);
    for (long i = 0; i < b; ++i)
        for (long k = 0; k < b; ++k) {
            double av = ta ? el(a, b, k, i) : el(a, b, i, k);
            if (av == 0) continue;
            for (long j = 0; j < b; ++j) {
                double bv = tb ? el(c, b, j, k) : el(c, b, k, j);
                r[i * b + j] += av * bv;
            }
        }
    for (long i = 0; i < b * b; ++i) w[i] = (overwrite ? 0.0 : w[i]) + alpha * r[i];
}

// Solve X * L^T = W, overwrite W (L lower)
inline void solve_right_lt(TileData& w, const TileData& l, long b) {
    for (long i = 0; i < b; ++i)
        for (long j = 0; j < b; ++j) {
            double s = el(w, b, i, j);
            for (long k = 0; k < j; ++k) s -= el(w, b, i, k) * el(l, b, j, k);
            el(w, b, i, j) = s / el(l, b, j, j);
        }
}

// Solve L * X = sign*W, overwrite W (L lower)
inline void solve_left(TileData& w, const TileData& l, long b, double sign) {
    for (long j = 0; j < b; ++j)
        for (long i = 0; i < b; ++i) {
            double s = sign * el(w, b, i, j);
            for (long k = 0; k < i; ++k) s -= el(l, b, i, k) * el(w, b, k, j);
            el(w, b, i, j) = s / el(l, b, i, i);
        }
}

// Solve X * L = sign*W, overwrite W (L lower)
inline void solve_right(TileData& w, const TileData& l, long b, double sign) {
    for (long i = 0; i < b; ++i)
        for (long j = b - 1; j >= 0; --j) {
            double s = sign * el(w, b, i, j);
            for (long k = j + 1; k < b; ++k) s -= el(w, b, i, k) * el(l, b, k, j);
            el(w, b, i, j) = s / el(l, b, j, j);
        }
}

}  // namespace kern

// Dispatch on the annotation carried from the algorithm source.
inline void apply_kernel(const std::string& ann, TileData& w, const TileData* r1,
                         const TileData* r2, long b) {
    using namespace kern;
    if (ann == "chol") { chol(w, b); return; }
    if (ann == "inv") { inv_lower(w, b); return; }
    if (ann == "copy") return;  // handled by the executor
    if (ann == "W^T * W") {
        TileData a = w;
        product_update(w, a, a, b, 1.0, true, false, true);
        return;
    }
    if (!r1) throw std::runtime_error("kernel needs an operand: " + ann);
    if (ann == "W - R1*R1^T") { product_update(w, *r1, *r1, b, -1.0, false, true, false); return; }
    if (ann == "W + R1^T*R1") { product_update(w, *r1, *r1, b, 1.0, true, false, false); return; }
    if (ann == "W * R1^-T") { solve_right_lt(w, *r1, b); return; }
    if (ann == "W * R1") { TileData a = w; product_update(w, a, *r1, b, 1.0, false, false, true); return; }
    if (ann == "R1 * W") { TileData a = w; product_update(w, *r1, a, b, 1.0, false, false, true); return; }
    if (ann == "R1^T * W") { TileData a = w; product_update(w, *r1, a, b, 1.0, true, false, true); return; }
    if (ann == "-R1^-1 * W") { solve_left(w, *r1, b, -1.0); return; }
    if (ann == "R1^-1 * W") { solve_left(w, *r1, b, 1.0); return; }
    if (ann == "-W * R1^-1") { solve_right(w, *r1, b, -1.0); return; }
    if (ann == "W * R1^-1") { solve_right(w, *r1, b, 1.0); return; }
    if (!r2) throw std::runtime_error("kernel needs two operands: " + ann);
    if (ann == "W - R1*R2^T") { product_update(w, *r1, *r2, b, -1.0, false, true, false); return; }
    if (ann == "W + R1*R2") { product_update(w, *r1, *r2, b, 1.0, false, false, false); return; }
    if (ann == "W + R1^T*R2") { product_update(w, *r1, *r2, b, 1.0, true, false, false); return; }
    throw std::runtime_error("unknown kernel annotation: " + ann);
}

// Run the graph's tasks in the given topological order. Buffer versions get
// fresh storage; the terminal copy folds final versions back into the base
// tiles. The order is validated structurally before any kernel runs.
inline TileMatrix execute(const TaskGraph& g, const TileMatrix& input,
                          const std::vector<int>& order) {
    if (order.size() != g.tasks.size()) throw std::invalid_argument("order size mismatch");
    std::vector<int> pos(g.tasks.size(), -1);
    for (size_t i = 0; i < order.size(); ++i) {
        if (order[i] < 0 || order[i] >= (int)g.tasks.size() || pos[order[i]] != -1)
            throw std::invalid_argument("order is not a permutation");
        pos[order[i]] = (int)i;
    }
    for (const auto& e : g.edges)
        if (pos[e.from] >= pos[e.to])
            throw std::invalid_argument("order violates dependence " +
                                        std::to_string(e.from) + "->" + std::to_string(e.to));

    long b = input.b;
    std::map<Tile, TileData> store;
    for (const auto& [ij, data] : input.tiles)
        store[Tile{"A", ij.first, ij.second, 0}] = data;

    TileMatrix result = input;
    auto fetch = [&](const Tile& tl) -> const TileData& {
        auto it = store.find(tl);
        if (it == store.end()) throw std::runtime_error("missing tile " + tl.str());
        return it->second;
    };
    for (int id : order) {
        const TaskInstance& task = g.tasks[id];
        try {
            if (task.kind == Kind::BUFCPY) {
                for (const auto& r : task.reads) {
                    Tile base = r;
                    base.version = 0;
                    store[base] = fetch(r);
                }
                continue;
            }
            Tile w0 = task.reads.at(0);  // prior value of the written tile
            TileData w = fetch(w0);
            const TileData* r1 = task.reads.size() > 1 ? &fetch(task.reads[1]) : nullptr;
            const TileData* r2 = task.reads.size() > 2 ? &fetch(task.reads[2]) : nullptr;
            apply_kernel(task.annotation, w, r1, r2, b);
            store[task.write] = std::move(w);
        } catch (const std::exception& e) {
            throw std::runtime_error("task " + std::to_string(id) + " (" + task.label() +
                                     "): " + e.what());
        }
    }
    for (auto& [ij, data] : result.tiles)
        data = store.at(Tile{"A", ij.first, ij.second, 0});
    return result;
}

inline TileMatrix execute(const TaskGraph& g, const TileMatrix& input) {
    return execute(g, input, topo_order(g));
}

// A = M*M^T + n*I with M uniform from the seed; SPD with moderate condition.
inline TileMatrix make_spd(long t, long b, unsigned long seed) {
    if (t < 1 || b < 1) throw std::invalid_argument("t,b must be >= 1");
    long n = t * b;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> m(n * n);
    for (auto& x : m) x = dist(rng);
    std::vector<double> a(n * n, 0.0);
    for (long i = 0; i < n; ++i)
        for (long k = 0; k < n; ++k) {
            double v = m[i * n + k];
            for (long j = 0; j <= i; ++j) a[i * n + j] += v * m[j * n + k];
        }
    for (long i = 0; i < n; ++i) {
        a[i * n + i] += n;
        for (long j = i + 1; j < n; ++j) a[i * n + j] = a[j * n + i];
    }
    TileMatrix tm;
    tm.t = t;
    tm.b = b;
    for (long i = 0; i < t; ++i)
        for (long j = 0; j <= i; ++j) {
            TileData d(b * b);
            for (long r = 0; r < b; ++r)
                for (long c = 0; c < b; ++c) d[r * b + c] = a[(i * b + r) * n + (j * b + c)];
            tm.tiles[{i, j}] = std::move(d);
        }
    return tm;
}

// Assemble the dense symmetric matrix from the lower tiles.
inline std::vector<double> assemble(const TileMatrix& tm) {
    long n = tm.t * tm.b, b = tm.b;
    std::vector<double> a(n * n, 0.0);
    for (const auto& [ij, d] : tm.tiles) {
        auto [i, j] = ij;
        for (long r = 0; r < b; ++r)
            for (long c = 0; c < b; ++c) {
                a[(i * b + r) * n + (j * b + c)] = d[r * b + c];
                a[(j * b + c) * n + (i * b + r)] = d[r * b + c];
            }
    }
    return a;
}

// Unblocked textbook Cholesky inverse: independent oracle for the tiled runs.
inline std::vector<double> dense_cholesky_inverse(std::vector<double> a, long n) {
    // factor
    for (long j = 0; j < n; ++j) {
        double d = a[j * n + j];
        for (long k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
        if (d <= 0) throw std::runtime_error("oracle factorization failure");
        d = std::sqrt(d);
        a[j * n + j] = d;
        for (long i = j + 1; i < n; ++i) {
            double s = a[i * n + j];
            for (long k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
            a[i * n + j] = s / d;
        }
    }
    // solve L L^T X = I column by column
    std::vector<double> inv(n * n);
    std::vector<double> y(n);
    for (long c = 0; c < n; ++c) {
        for (long i = 0; i < n; ++i) {
            double s = (i == c) ? 1.0 : 0.0;
            for (long k = 0; k < i; ++k) s -= a[i * n + k] * y[k];
            y[i] = s / a[i * n + i];
        }
        for (long i = n - 1; i >= 0; --i) {
            double s = y[i];
            for (long k = i + 1; k < n; ++k) s -= a[k * n + i] * inv[k * n + c];
            inv[i * n + c] = s / a[i * n + i];
        }
    }
    return inv;
}

inline double frob_norm_residual(const std::vector<double>& a, const std::vector<double>& x,
                                 long n) {
    double acc = 0;
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) {
            double s = (i == j) ? -1.0 : 0.0;
            for (long k = 0; k < n; ++k) s += a[i * n + k] * x[k * n + j];
            acc += s * s;
        }
    return std::sqrt(acc);
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace tilecp
