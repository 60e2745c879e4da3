#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "fitchmi/surface.hpp"

namespace fitchmi::testing {

inline std::string fixture_path(const std::string& rel) { return std::string(FITCHMI_SOURCE_DIR) + "/" + rel; }

inline std::string read_file(const std::string& rel) {
  std::ifstream in(fixture_path(rel), std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ModuleAST load_module(const std::string& rel) { return parse_module(read_file(rel)); }

// Peano prelude without theorems.
inline const char* kPeanoPrelude = R"(data ℕ = Zero | S(ℕ)

rule sum-zero for all (n : ℕ) : ⊢ Sum(Zero, n, n)

rule sum-s for all (n₁, n₂, n₃ : ℕ) : Sum(n₁, n₂, n₃) ⊢ Sum(S(n₁), n₂, S(n₃))
)";

}  // namespace fitchmi::testing
