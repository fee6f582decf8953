#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "tilecp/builtins.hpp"
#include "tilecp/dsl.hpp"
#include "tilecp/taskgraph.hpp"

using namespace tilecp;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    REQUIRE(f.good());
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

int count_task_nodes(const std::vector<Node>& body) {
    int n = 0;
    for (const auto& node : body) {
        if (std::holds_alternative<LoopNode>(node))
            n += count_task_nodes(std::get<LoopNode>(node).body);
        else
            ++n;
    }
    return n;
}

}  // namespace

TEST_CASE("single statement, no loops") {
    auto alg = parse_algorithm("algorithm tiny\nparam t\narray A\nPOTRF: A[0][0] <- A[0][0]\n");
    REQUIRE(alg.body.size() == 1);
    REQUIRE(std::holds_alternative<TaskNode>(alg.body[0]));
    const auto& task = std::get<TaskNode>(alg.body[0]);
    CHECK(task.kind == Kind::POTRF);
    CHECK(task.reads.size() == 1);
}

TEST_CASE("potrf source has four task statements under the documented nest") {
    auto alg = parse_algorithm(POTRF_SRC);
    CHECK(alg.name == "POTRF");
    CHECK(count_task_nodes(alg.body) == 4);  // SYRK, POTRF, GEMM, TRSM
    std::set<Kind> kinds;
    // collect kinds
    auto walk = [&](auto&& self, const std::vector<Node>& body) -> void {
        for (const auto& n : body) {
            if (std::holds_alternative<LoopNode>(n)) self(self, std::get<LoopNode>(n).body);
            else kinds.insert(std::get<TaskNode>(n).kind);
        }
    };
    walk(walk, alg.body);
    CHECK(kinds == std::set<Kind>{Kind::SYRK, Kind::POTRF, Kind::GEMM, Kind::TRSM});
}

TEST_CASE("unbound loop index is rejected") {
    const char* src =
        "algorithm bad\nparam t\narray A\nfor i = 0 .. k-1 {\nPOTRF: A[i][i] <- A[i][i]\n}\n";
    REQUIRE_THROWS_WITH(parse_algorithm(src),
                        Catch::Matchers::ContainsSubstring("unbound loop index"));
}

TEST_CASE("unknown kind is rejected") {
    REQUIRE_THROWS_WITH(parse_algorithm("algorithm x\nparam t\narray A\nFROB: A[0][0] <- A[0][0]\n"),
                        Catch::Matchers::ContainsSubstring("unknown kind"));
}

TEST_CASE("round trip: pretty print then reparse is structurally identical") {
    for (const auto& [name, src] : builtin_sources()) {
        auto a = parse_algorithm(src);
        auto b = parse_algorithm(pretty_print(a));
        CHECK(pretty_print(a) == pretty_print(b));
        CHECK(instantiate(a, 5).size() == instantiate(b, 5).size());
        // same task sequence
        auto ta = instantiate(a, 5), tb = instantiate(b, 5);
        for (size_t i = 0; i < ta.size(); ++i) {
            CHECK(ta[i].kind == tb[i].kind);
            CHECK(ta[i].write == tb[i].write);
            CHECK(ta[i].reads == tb[i].reads);
        }
    }
}

TEST_CASE("builtins include all steps, variants, and compositions") {
    auto m = builtin_algorithms();
    for (const char* n : {"POTRF", "LAUUM", "TRTRI_V1", "TRTRI_V2", "TRTRI_V3", "TRTRI_V4",
                          "TRTRI_V5", "TRTRI_V6", "CHOLINV_X1X", "CHOLINV_X6X"})
        CHECK(m.count(n) == 1);
}

TEST_CASE("shipped algorithm files match the embedded sources") {
    for (const auto& [name, src] : builtin_sources()) {
        std::string fn = name;
        for (auto& c : fn) c = (char)std::tolower((unsigned char)c);
        CHECK(slurp(std::string(TILECP_ALG_DIR) + "/" + fn + ".tilealg") == std::string(src));
    }
}

TEST_CASE("every step algorithm at t=1 is a single diagonal task") {
    std::map<std::string, Kind> diag = {{"POTRF", Kind::POTRF}, {"LAUUM", Kind::LAUUM}};
    for (int v = 1; v <= 6; ++v) diag["TRTRI_V" + std::to_string(v)] = Kind::TRTRI;
    for (const auto& [name, kind] : diag) {
        auto tasks = instantiate(parse_algorithm(builtin_sources().at(name)), 1);
        REQUIRE(tasks.size() == 1);
        CHECK(tasks[0].kind == kind);
    }
}

TEST_CASE("reversed variants are index mirrors of the forward ones") {
    // transpose-reversal map (i,j) -> (t-1-j, t-1-i) keeps the lower triangle
    const long t = 5;
    auto key_of = [t](const TaskInstance& task, bool mirrored) {
        auto map = [&](const Tile& tl) {
            return mirrored ? std::pair{t - 1 - tl.j, t - 1 - tl.i} : std::pair{tl.i, tl.j};
        };
        std::multiset<std::pair<long, long>> reads;
        for (const auto& r : task.reads) reads.insert(map(r));
        return std::tuple{task.kind, map(task.write), reads};
    };
    for (int v = 1; v <= 3; ++v) {
        auto fwd = instantiate(
            parse_algorithm(builtin_sources().at("TRTRI_V" + std::to_string(v))), t);
        auto rev = instantiate(
            parse_algorithm(builtin_sources().at("TRTRI_V" + std::to_string(v + 3))), t);
        REQUIRE(fwd.size() == rev.size());
        std::multiset<decltype(key_of(fwd[0], false))> a, b;
        for (const auto& task : fwd) a.insert(key_of(task, false));
        for (const auto& task : rev) b.insert(key_of(task, true));
        CHECK(a == b);
    }
}

TEST_CASE("empty loop ranges yield no tasks") {
    auto alg = parse_algorithm(
        "algorithm e\nparam t\narray A\nfor i = 1 .. 0 {\nPOTRF: A[i][i] <- A[i][i]\n}\n"
        "POTRF: A[0][0] <- A[0][0]\n");
    CHECK(instantiate(alg, 3).size() == 1);
}
