#pragma once

#include "fivechain/slope.hpp"

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace fivechain {

enum class Manifold { M3 = 3, M4 = 4, M5 = 5 };

inline int slot_count(Manifold m) { return static_cast<int>(m); }
std::string to_string(Manifold m);

struct Instruction {
    Manifold manifold = Manifold::M5;
    std::vector<Slope> s;

    Instruction() : s(5) {}
    Instruction(Manifold m, std::vector<Slope> slots);

    int size() const { return static_cast<int>(s.size()); }
    const Slope& operator[](int i) const { return s[static_cast<size_t>(i)]; }
    Slope& operator[](int i) { return s[static_cast<size_t>(i)]; }
    int empty_count() const;
    bool closed() const { return empty_count() == 0; }

    bool operator==(const Instruction&) const = default;
    auto operator<=>(const Instruction& o) const {
        if (auto c = manifold <=> o.manifold; c != 0) return c;
        return s <=> o.s;
    }
};

// "(s0,s1,...)", missing trailing slots are Empty
Instruction parse_instruction(std::string_view text, Manifold m);
std::string to_string(const Instruction& x);

// ---- symmetry maps ----

struct InapplicableGenerator : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Map3 is the homology-preserving reading (slot 3 sends a to a/(a-1)).
// Map3AsPrinted keeps (1-a)^-1 in slot 3 and exists for auditing only.
enum class SymmetryKind { Rot, Refl, Map3, BlowDown, Fig8, Map3AsPrinted };
std::string to_string(SymmetryKind k);

Instruction apply_symmetry(SymmetryKind kind, const Instruction& x);
bool symmetry_applicable(SymmetryKind kind, const Instruction& x);

// slot permutation plus per-slot Mobius map: out[i] = mats[i](in[src[i]])
struct SlotMap {
    std::vector<int> src;
    std::vector<Mob> mats;

    static SlotMap identity(int n);
    int size() const { return static_cast<int>(src.size()); }
    SlotMap after(const SlotMap& h) const;  // this o h
    Instruction operator()(const Instruction& x) const;
    Slope slot(const Instruction& x, int i) const { return mats[i](x[src[i]]); }

    bool operator==(const SlotMap&) const = default;
    auto operator<=>(const SlotMap&) const = default;
};

SlotMap generator_map(SymmetryKind kind);  // Rot, Refl, Map3, Map3AsPrinted only
std::vector<SlotMap> close_group(const std::vector<SlotMap>& gens, size_t cap = 1u << 20);

// <Rot, Refl, Map3> on M5; order 120
const std::vector<SlotMap>& group_m5();
// cusp-fixing symmetries of M4 in its own coordinates; order 32
const std::vector<SlotMap>& group_m4();
std::vector<SlotMap> dihedral_group(int n);

Instruction dihedral_class_rep(const Instruction& x);

// ---- orbits ----

struct OrbitBudget {
    size_t max_elements = 50000;
    Int max_magnitude = 1000000;
};

struct OrbitResult {
    std::set<Instruction> elements;
    bool saturated = true;
    size_t max_orbit = 0;
    Int max_magnitude = 0;
};

OrbitResult full_orbit(const Instruction& x, const OrbitBudget& budget = {});

// ---- patterns and factoring ----

bool contains_pattern(const Instruction& x, const Instruction& pattern);
bool factors_through_m4(const Instruction& x);
bool factors_through_m3(const Instruction& x);
const std::vector<Instruction>& m3_factoring_patterns();  // the 18 two-slope classes
const std::vector<Instruction>& isolated_m5_instructions();  // the seven isolated exceptional instructions

Instruction m4_to_m5(const Instruction& x);
// removes a -1 at slot i, adds 1 to both neighbours, reads the cycle from i+1
Instruction blow_down_at(const Instruction& x, int i);

// ---- M3 ----

const std::vector<std::vector<Slope>>& m3_isolated_list();
bool m3_is_exceptional(const Instruction& x);

// ---- exceptionality decision ----
// Exact for the 5-chain family: reduces through M4 and M3 by blowing down
// -1 slots, otherwise compares with the closed isolated instructions.
bool exceptional_m5(const Instruction& x);
bool exceptional_m4(const Instruction& x);

// values
const std::vector<Slope>& values_one();        // [[1]] = {0,1,inf}
const std::vector<Slope>& values_minus_one();  // [[-1]] = {-1,1/2,2}
const std::vector<Slope>& values_minus_two();  // [[-2]]
const std::vector<Slope>& m4_base_values();    // {0,1,2,inf}
const std::vector<Slope>& m4_minus_one_values();  // {-1,1/2,3,3/2}
const std::vector<Slope>& m4_m1_values();         // {-2,2/3,4,4/3}
bool in(const Slope& s, const std::vector<Slope>& set);

}  // namespace fivechain
