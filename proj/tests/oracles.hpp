#pragma once
// Reference implementations kept deliberately separate from the library code paths.

#include "fivechain/instruction.hpp"

#include <optional>
#include <vector>

namespace oracle {

using fivechain::Int;
using fivechain::Instruction;
using fivechain::Slope;

struct Group {
    size_t rank = 0;
    std::vector<Int> torsion;  // invariant factors > 1
};

// invariant factors from determinantal divisors d_k = gcd of all k x k minors
Group snf(const std::vector<std::vector<Int>>& rows, size_t ngens);

// |H1| of a closed Seifert space over S^2, |prod p_i * sum q_i/p_i|; 0 means infinite
Int sphere_order(const std::vector<std::pair<Int, Int>>& fibers);

// H1 of the closed 5-chain filling from its linking matrix
Group chain_h1(const std::vector<Slope>& alpha);

// exceptional iff some element of the symmetry orbit contains one of the seven
// isolated instructions; nullopt if the orbit does not close within the cap
std::optional<bool> exceptional_by_orbit(const Instruction& x, size_t cap = 4000);

}  // namespace oracle

#include "fivechain/seifert.hpp"

#include <random>

namespace testgen {

// random closed descriptors of every shape, fibres unnormalized
fivechain::Descriptor random_descriptor(std::mt19937_64& rng);
fivechain::Instruction random_instruction(std::mt19937_64& rng, fivechain::Manifold m, int empties = 0);

}  // namespace testgen
