#pragma once

#include "fivechain/instruction.hpp"

#include <json.hpp>

#include <functional>
#include <string>
#include <vector>

namespace fivechain {

struct Fiber {
    Int p = 0, q = 0;
    bool operator==(const Fiber&) const = default;
    auto operator<=>(const Fiber& o) const {
        if (p != o.p) return p < o.p ? std::strong_ordering::less : std::strong_ordering::greater;
        if (q != o.q) return q < o.q ? std::strong_ordering::less : std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }
};

enum class Base { Disc, Annulus, Sphere, ProjectivePlane };

struct Piece {
    Base base = Base::Sphere;
    std::vector<Fiber> fibers;
    Int twist = 0;  // carried (1, twist) fibre

    int boundary_count() const { return base == Base::Disc ? 1 : base == Base::Annulus ? 2 : 0; }
    int genuine_fibers() const;
    bool operator==(const Piece&) const = default;
};

// row-major [[a,b],[c,d]]
struct Mat2 {
    Int a = 1, b = 0, c = 0, d = 1;
    Int det() const { return a * d - b * c; }
    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Mat2 operator-() const { return {-a, -b, -c, -d}; }
    Mat2 inverse() const;  // det must be +-1
    bool operator==(const Mat2&) const = default;
};

enum class Shape { Closed, Union, SelfGlued, TorusBundle, WithBoundary };

// Closed: pieces[0] over Sphere or ProjectivePlane.
// Union: pieces[0] glued to pieces[1] (both Disc) by glue.
// SelfGlued: pieces[0] over Annulus, its two boundaries glued by glue.
// TorusBundle: glue is the monodromy.
// WithBoundary: pieces (and glue, if they came from a union) with unfilled (0,0) fibres.
//
// Homology convention for a gluing B from left to right:
//   mu_L = B.a mu_R + B.c t_R,  t_L = B.b mu_R + B.d t_R
struct Descriptor {
    Shape shape = Shape::Closed;
    std::vector<Piece> pieces;
    Mat2 glue;
    int unglued = 0;
    bool reducible_candidate = false;

    bool operator==(const Descriptor&) const = default;
};

struct AbelianGroup {
    size_t rank = 0;
    std::vector<Int> torsion;  // d1 | d2 | ..., each >= 2

    bool operator==(const AbelianGroup&) const = default;
    std::string str() const;
    bool finite() const { return rank == 0; }
    Int order() const;  // 0 when infinite
};

struct NotClosed : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnsupportedSlope : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Smith normal form of an integer relation matrix on ngens generators
AbelianGroup abelian_group_from_relations(const std::vector<std::vector<Int>>& rows, size_t ngens);

Descriptor fill_m5(const std::vector<Slope>& alpha, const Slope& beta);
Descriptor fill_m4(const std::vector<Slope>& alpha, const Slope& beta);

AbelianGroup first_homology(const Descriptor& d);

// H1 of a closed filling of the 5-chain from its surgery presentation
// (framings on the diagonal, linking numbers +1,+1,+1,+1,-1 around the cycle).
AbelianGroup chain_homology_m5(const Instruction& x);
// through the M4 -> M5 translation with slot 3 as the filled cusp
AbelianGroup chain_homology_m4(const Instruction& x);

// ---- normal form ----
struct NormalizationMove {
    std::string name;
    std::function<Descriptor(const Descriptor&)> apply;
};
const std::vector<NormalizationMove>& normalization_moves();
Descriptor normalize(const Descriptor& d);

bool is_lens_like(const Descriptor& d);
bool is_toroidal(const Descriptor& d);

// ---- text and json ----
std::string to_string(const Descriptor& d);
std::string to_string(Base b);
nlohmann::json to_json(const Descriptor& d);
Descriptor descriptor_from_json(const nlohmann::json& j);
nlohmann::json int_to_json(const Int& v);
Int int_from_json(const nlohmann::json& j);

}  // namespace fivechain
