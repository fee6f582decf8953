#pragma once

// Canonical algorithm sources. The same texts are shipped as files under
// algorithms/; these embedded copies make the library self-contained.
//
// Annotation strings name the tile-level operation on the write target W and
// the extra reads R1, R2; the numerical executor interprets them.

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "dsl.hpp"

namespace tilecp {

// Cholesky factorization, lower format: A = L*L^T, L stored in place.
inline constexpr const char* POTRF_SRC = R"(algorithm POTRF
param t
array A
for j = 0 .. t-1 {
  for k = 0 .. j-1 {
    SYRK: A[j][j] <- A[j][j], A[j][k] # W - R1*R1^T
  }
  POTRF: A[j][j] <- A[j][j] # chol
  for i = j+1 .. t-1 {
    for k = 0 .. j-1 {
      GEMM: A[i][j] <- A[i][j], A[i][k], A[j][k] # W - R1*R2^T
    }
  }
  for i = j+1 .. t-1 {
    TRSM: A[i][j] <- A[i][j], A[j][j] # W * R1^-T
  }
}
)";

// Triangular-transpose product: A <- T^T * T on the lower triangle.
inline constexpr const char* LAUUM_SRC = R"(algorithm LAUUM
param t
array A
for i = 0 .. t-1 {
  for j = 0 .. i-1 {
    TRMM: A[i][j] <- A[i][j], A[i][i] # R1^T * W
  }
  LAUUM: A[i][i] <- A[i][i] # W^T * W
  for j = 0 .. i-1 {
    for k = i+1 .. t-1 {
      GEMM: A[i][j] <- A[i][j], A[k][i], A[k][j] # W + R1^T*R2
    }
  }
  for k = i+1 .. t-1 {
    SYRK: A[i][i] <- A[i][i], A[k][i] # W + R1^T*R1
  }
}
)";

// Left inverse, per-tile form: T[i][j] = -L[i][i]^-1 (L[i][j] T[j][j] + sum_k L[i][k] T[k][j]).
inline constexpr const char* TRTRI_V1_SRC = R"(algorithm TRTRI_V1
param t
array A
for j = 0 .. t-1 {
  TRTRI: A[j][j] <- A[j][j] # inv
  for i = j+1 .. t-1 {
    TRMM: A[i][j] <- A[i][j], A[j][j] # W * R1
    for k = j+1 .. i-1 {
      GEMM: A[i][j] <- A[i][j], A[i][k], A[k][j] # W + R1*R2
    }
    TRSM: A[i][j] <- A[i][j], A[i][i] # -R1^-1 * W
  }
}
)";

// Left inverse, deferred diagonal: column accumulations first, diagonal
// inversion deferred to the end of the column.
inline constexpr const char* TRTRI_V2_SRC = R"(algorithm TRTRI_V2
param t
array A
for j = 0 .. t-1 {
  for i = j+1 .. t-1 {
    for k = j+1 .. i-1 {
      GEMM: A[i][j] <- A[i][j], A[i][k], A[k][j] # W + R1*R2
    }
    TRSM: A[i][j] <- A[i][j], A[i][i] # -R1^-1 * W
  }
  for i = j+1 .. t-1 {
    TRSM: A[i][j] <- A[i][j], A[j][j] # W * R1^-1
  }
  TRTRI: A[j][j] <- A[j][j] # inv
}
)";

// Left inverse, right-looking sweep: scale column k, broadcast updates into
// earlier columns, finish row k, invert the diagonal last.
inline constexpr const char* TRTRI_V3_SRC = R"(algorithm TRTRI_V3
param t
array A
for k = 0 .. t-1 {
  for m = k+1 .. t-1 {
    TRSM: A[m][k] <- A[m][k], A[k][k] # -W * R1^-1
  }
  for m = k+1 .. t-1 {
    for n = 0 .. k-1 {
      GEMM: A[m][n] <- A[m][n], A[m][k], A[k][n] # W + R1*R2
    }
  }
  for n = 0 .. k-1 {
    TRSM: A[k][n] <- A[k][n], A[k][k] # R1^-1 * W
  }
  TRTRI: A[k][k] <- A[k][k] # inv
}
)";

// Right inverse, per-tile form (transpose-reversal dual of variant 1):
// T[i][j] = -(T[i][i] L[i][j] + sum_k T[i][k] L[k][j]) L[j][j]^-1.
inline constexpr const char* TRTRI_V4_SRC = R"(algorithm TRTRI_V4
param t
array A
for j = t-1 .. 0 desc {
  for i = t-1 .. j+1 desc {
    TRMM: A[i][j] <- A[i][j], A[i][i] # R1 * W
    for k = i-1 .. j+1 desc {
      GEMM: A[i][j] <- A[i][j], A[i][k], A[k][j] # W + R1*R2
    }
    TRSM: A[i][j] <- A[i][j], A[j][j] # -W * R1^-1
  }
  TRTRI: A[j][j] <- A[j][j] # inv
}
)";

// Right inverse, deferred diagonal (dual of variant 2).
inline constexpr const char* TRTRI_V5_SRC = R"(algorithm TRTRI_V5
param t
array A
for i = t-1 .. 0 desc {
  for j = i-1 .. 0 desc {
    for k = i-1 .. j+1 desc {
      GEMM: A[i][j] <- A[i][j], A[i][k], A[k][j] # W + R1*R2
    }
    TRSM: A[i][j] <- A[i][j], A[j][j] # -W * R1^-1
  }
  for j = i-1 .. 0 desc {
    TRSM: A[i][j] <- A[i][j], A[i][i] # R1^-1 * W
  }
  TRTRI: A[i][i] <- A[i][i] # inv
}
)";

// Right inverse, right-looking sweep (dual of variant 3).
inline constexpr const char* TRTRI_V6_SRC = R"(algorithm TRTRI_V6
param t
array A
for c = t-1 .. 0 desc {
  for j = 0 .. c-1 {
    TRSM: A[c][j] <- A[c][j], A[c][c] # -R1^-1 * W
  }
  for i = c+1 .. t-1 {
    for j = 0 .. c-1 {
      GEMM: A[i][j] <- A[i][j], A[i][c], A[c][j] # W + R1*R2
    }
  }
  for i = c+1 .. t-1 {
    TRSM: A[i][c] <- A[i][c], A[c][c] # W * R1^-1
  }
  TRTRI: A[c][c] <- A[c][c] # inv
}
)";

inline const std::map<std::string, const char*>& builtin_sources() {
    static const std::map<std::string, const char*> m = {
        {"POTRF", POTRF_SRC},       {"LAUUM", LAUUM_SRC},
        {"TRTRI_V1", TRTRI_V1_SRC}, {"TRTRI_V2", TRTRI_V2_SRC},
        {"TRTRI_V3", TRTRI_V3_SRC}, {"TRTRI_V4", TRTRI_V4_SRC},
        {"TRTRI_V5", TRTRI_V5_SRC}, {"TRTRI_V6", TRTRI_V6_SRC}};
    return m;
}

// Concatenate the three steps of the full inversion into one program over A.
inline TileAlgorithm make_cholinv(int variant) {
    if (variant < 1 || variant > 6) throw std::invalid_argument("variant must be 1..6");
    TileAlgorithm p = parse_algorithm(POTRF_SRC);
    TileAlgorithm v = parse_algorithm(builtin_sources().at("TRTRI_V" + std::to_string(variant)));
    TileAlgorithm l = parse_algorithm(LAUUM_SRC);
    TileAlgorithm out;
    out.name = "CHOLINV_X" + std::to_string(variant) + "X";
    out.param = "t";
    out.arrays = {"A"};
    for (auto& n : p.body) out.body.push_back(std::move(n));
    for (auto& n : v.body) out.body.push_back(std::move(n));
    for (auto& n : l.body) out.body.push_back(std::move(n));
    return out;
}

inline std::map<std::string, TileAlgorithm> builtin_algorithms() {
    std::map<std::string, TileAlgorithm> m;
    for (const auto& [name, src] : builtin_sources()) m.emplace(name, parse_algorithm(src));
    for (int v = 1; v <= 6; ++v) {
        TileAlgorithm a = make_cholinv(v);
        m.emplace(a.name, std::move(a));
    }
    return m;
}

}  // namespace tilecp
