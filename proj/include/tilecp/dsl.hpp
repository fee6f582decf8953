#pragma once

// Line-oriented DSL for tiled loop-nest algorithms.
//
//   algorithm <name>
//   param t
//   array <name> [, <name>...]
//   for <idx> = <affine> .. <affine> [desc] {
//     <KIND>: <arr>[<affine>][<affine>] <- <arr>[<affine>][<affine>], ... [# annotation]
//   }
//
// Affine expressions: integer literals, loop indices, t, +, -, integer*index.
// Full-line comments start with '#'; a trailing '# ...' on a task line is an
// opaque annotation carried through to the numerical executor.

#include <cctype>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace tilecp {

enum class Kind { POTRF, LAUUM, TRTRI, TRSM, TRMM, SYRK, GEMM, BUFCPY };

inline const char* kind_name(Kind k) {
    switch (k) {
        case Kind::POTRF: return "POTRF";
        case Kind::LAUUM: return "LAUUM";
        case Kind::TRTRI: return "TRTRI";
        case Kind::TRSM:  return "TRSM";
        case Kind::TRMM:  return "TRMM";
        case Kind::SYRK:  return "SYRK";
        case Kind::GEMM:  return "GEMM";
        case Kind::BUFCPY: return "BUFCPY";
    }
    return "?";
}

inline Kind kind_from_name(const std::string& s) {
    static const std::map<std::string, Kind> m = {
        {"POTRF", Kind::POTRF}, {"LAUUM", Kind::LAUUM}, {"TRTRI", Kind::TRTRI},
        {"TRSM", Kind::TRSM},   {"TRMM", Kind::TRMM},   {"SYRK", Kind::SYRK},
        {"GEMM", Kind::GEMM},   {"BUFCPY", Kind::BUFCPY}};
    auto it = m.find(s);
    if (it == m.end()) throw std::runtime_error("unknown kind: " + s);
    return it->second;
}

// Affine expression: constant + sum of coeff*identifier.
struct Affine {
    long constant = 0;
    std::vector<std::pair<std::string, long>> terms;  // (identifier, coefficient)

    long eval(const std::map<std::string, long>& env) const {
        long v = constant;
        for (const auto& [id, c] : terms) {
            auto it = env.find(id);
            if (it == env.end()) throw std::runtime_error("unbound loop index: " + id);
            v += c * it->second;
        }
        return v;
    }
    std::string str() const {
        std::string s;
        for (const auto& [id, c] : terms) {
            if (c == 1) s += (s.empty() ? "" : "+") + id;
            else if (c == -1) s += "-" + id;
            else s += (s.empty() && c > 0 ? "" : (c > 0 ? "+" : "")) + std::to_string(c) + "*" + id;
        }
        if (constant != 0 || s.empty())
            s += (constant >= 0 && !s.empty() ? "+" : "") + std::to_string(constant);
        return s;
    }
};

struct TileRef {
    std::string array;
    Affine row, col;
};

struct LoopNode;
struct TaskNode;
using Node = std::variant<LoopNode, TaskNode>;

struct TaskNode {
    Kind kind;
    TileRef write;
    std::vector<TileRef> reads;  // ordered; may include the written tile (accumulation)
    std::string annotation;      // opaque; consumed only by the numerical executor
};

struct LoopNode {
    std::string index;
    Affine lo, hi;      // inclusive bounds in iteration order (first .. last)
    bool descending = false;
    std::vector<Node> body;
};

struct TileAlgorithm {
    std::string name;
    std::string param = "t";
    std::vector<std::string> arrays;
    std::vector<Node> body;
};

namespace detail {

struct Cursor {
    const std::string& s;
    size_t pos = 0;
    void skip_ws() { while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos; }
    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) { ++pos; return true; }
        return false;
    }
    bool eat(const std::string& w) {
        skip_ws();
        if (s.compare(pos, w.size(), w) == 0) { pos += w.size(); return true; }
        return false;
    }
    char peek() { skip_ws(); return pos < s.size() ? s[pos] : '\0'; }
    bool done() { skip_ws(); return pos >= s.size(); }
};

inline std::string parse_ident(Cursor& c) {
    c.skip_ws();
    size_t start = c.pos;
    while (c.pos < c.s.size() && (std::isalnum((unsigned char)c.s[c.pos]) || c.s[c.pos] == '_'))
        ++c.pos;
    if (c.pos == start) throw std::runtime_error("expected identifier");
    return c.s.substr(start, c.pos - start);
}

inline long parse_int(Cursor& c) {
    c.skip_ws();
    size_t start = c.pos;
    while (c.pos < c.s.size() && std::isdigit((unsigned char)c.s[c.pos])) ++c.pos;
    if (c.pos == start) throw std::runtime_error("expected integer");
    return std::stol(c.s.substr(start, c.pos - start));
}

// term := int | int '*' ident | ident
inline void parse_term(Cursor& c, long sign, Affine& out) {
    c.skip_ws();
    if (std::isdigit((unsigned char)c.peek())) {
        long v = parse_int(c);
        if (c.eat('*')) out.terms.emplace_back(parse_ident(c), sign * v);
        else out.constant += sign * v;
    } else {
        out.terms.emplace_back(parse_ident(c), sign);
    }
}

inline Affine parse_affine(Cursor& c) {
    Affine a;
    long sign = 1;
    if (c.eat('-')) sign = -1;
    parse_term(c, sign, a);
    for (;;) {
        if (c.eat('+')) parse_term(c, 1, a);
        else if (c.eat('-')) parse_term(c, -1, a);
        else break;
    }
    return a;
}

inline TileRef parse_tileref(Cursor& c) {
    TileRef r;
    r.array = parse_ident(c);
    if (!c.eat('[')) throw std::runtime_error("expected '['");
    r.row = parse_affine(c);
    if (!c.eat(']')) throw std::runtime_error("expected ']'");
    if (!c.eat('[')) throw std::runtime_error("expected '['");
    r.col = parse_affine(c);
    if (!c.eat(']')) throw std::runtime_error("expected ']'");
    return r;
}

}  // namespace detail

class ParseError : public std::runtime_error {
public:
    int line;
    ParseError(int ln, const std::string& msg)
        : std::runtime_error("line " + std::to_string(ln) + ": " + msg), line(ln) {}
};

inline TileAlgorithm parse_algorithm(const std::string& text) {
    TileAlgorithm alg;
    std::vector<std::vector<Node>*> stack;  // innermost loop body last
    std::vector<std::string> scope;         // in-scope loop indices
    stack.push_back(&alg.body);
    bool saw_name = false, saw_param = false;

    // validate that an affine uses only t and in-scope indices
    auto check_bound = [&](const Affine& a, int ln) {
        for (const auto& [id, c] : a.terms) {
            (void)c;
            if (id == alg.param) continue;
            bool found = false;
            for (const auto& s : scope) if (s == id) { found = true; break; }
            if (!found) throw ParseError(ln, "unbound loop index: " + id);
        }
    };

    int ln = 0;
    size_t start = 0;
    while (start <= text.size()) {
        size_t end = text.find('\n', start);
        std::string line = text.substr(start, end == std::string::npos ? std::string::npos : end - start);
        start = (end == std::string::npos) ? text.size() + 1 : end + 1;
        ++ln;

        // strip full-line comments and blanks (annotations handled on task lines)
        std::string trimmed = line;
        size_t f = trimmed.find_first_not_of(" \t\r");
        if (f == std::string::npos) continue;
        if (trimmed[f] == '#') continue;

        detail::Cursor c{line};
        try {
            if (c.eat(std::string("algorithm"))) {
                alg.name = detail::parse_ident(c);
                saw_name = true;
            } else if (c.eat(std::string("param"))) {
                alg.param = detail::parse_ident(c);
                saw_param = true;
            } else if (c.eat(std::string("array"))) {
                alg.arrays.push_back(detail::parse_ident(c));
                while (c.eat(',')) alg.arrays.push_back(detail::parse_ident(c));
            } else if (c.eat(std::string("for"))) {
                LoopNode loop;
                loop.index = detail::parse_ident(c);
                for (const auto& s : scope)
                    if (s == loop.index) throw ParseError(ln, "loop index shadows " + s);
                if (loop.index == alg.param) throw ParseError(ln, "loop index shadows param");
                if (!c.eat('=')) throw ParseError(ln, "expected '='");
                loop.lo = detail::parse_affine(c);
                if (!c.eat(std::string(".."))) throw ParseError(ln, "expected '..'");
                loop.hi = detail::parse_affine(c);
                loop.descending = c.eat(std::string("desc"));
                if (!c.eat('{')) throw ParseError(ln, "expected '{'");
                check_bound(loop.lo, ln);
                check_bound(loop.hi, ln);
                stack.back()->push_back(loop);
                scope.push_back(loop.index);
                stack.push_back(&std::get<LoopNode>(stack.back()->back()).body);
            } else if (c.peek() == '}') {
                c.eat('}');
                if (stack.size() == 1) throw ParseError(ln, "unmatched '}'");
                stack.pop_back();
                scope.pop_back();
            } else {
                TaskNode task;
                std::string kw = detail::parse_ident(c);
                task.kind = kind_from_name(kw);
                if (!c.eat(':')) throw ParseError(ln, "expected ':'");
                task.write = detail::parse_tileref(c);
                check_bound(task.write.row, ln);
                check_bound(task.write.col, ln);
                if (c.eat(std::string("<-"))) {
                    task.reads.push_back(detail::parse_tileref(c));
                    while (c.eat(',')) task.reads.push_back(detail::parse_tileref(c));
                }
                for (const auto& r : task.reads) {
                    check_bound(r.row, ln);
                    check_bound(r.col, ln);
                }
                if (c.eat('#')) {
                    size_t p = c.pos;
                    while (p < line.size() && (line[p] == ' ' || line[p] == '\t')) ++p;
                    size_t e = line.find_last_not_of(" \t\r");
                    task.annotation = (e == std::string::npos || e < p) ? "" : line.substr(p, e - p + 1);
                    c.pos = line.size();
                }
                if (!c.done()) throw ParseError(ln, "trailing input");
                stack.back()->push_back(task);
            }
            if (c.peek() == '#') c.pos = line.size();
            if (!c.done()) throw ParseError(ln, "trailing input");
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            throw ParseError(ln, e.what());
        }
    }
    if (stack.size() != 1) throw ParseError(ln, "unterminated loop");
    if (!saw_name) throw ParseError(1, "missing algorithm name");
    if (!saw_param) throw ParseError(1, "missing param declaration");
    return alg;
}

namespace detail {

inline void print_node(const Node& n, std::string& out, int depth) {
    std::string ind(2 * depth, ' ');
    if (std::holds_alternative<LoopNode>(n)) {
        const auto& l = std::get<LoopNode>(n);
        out += ind + "for " + l.index + " = " + l.lo.str() + " .. " + l.hi.str() +
               (l.descending ? " desc" : "") + " {\n";
        for (const auto& ch : l.body) print_node(ch, out, depth + 1);
        out += ind + "}\n";
    } else {
        const auto& t = std::get<TaskNode>(n);
        auto ref = [](const TileRef& r) {
            return r.array + "[" + r.row.str() + "][" + r.col.str() + "]";
        };
        out += ind + std::string(kind_name(t.kind)) + ": " + ref(t.write);
        if (!t.reads.empty()) {
            out += " <- " + ref(t.reads[0]);
            for (size_t i = 1; i < t.reads.size(); ++i) out += ", " + ref(t.reads[i]);
        }
        if (!t.annotation.empty()) out += " # " + t.annotation;
        out += "\n";
    }
}

}  // namespace detail

inline std::string pretty_print(const TileAlgorithm& alg) {
    std::string out = "algorithm " + alg.name + "\nparam " + alg.param + "\n";
    if (!alg.arrays.empty()) {
        out += "array " + alg.arrays[0];
        for (size_t i = 1; i < alg.arrays.size(); ++i) out += ", " + alg.arrays[i];
        out += "\n";
    }
    for (const auto& n : alg.body) detail::print_node(n, out, 0);
    return out;
}

}  // namespace tilecp
