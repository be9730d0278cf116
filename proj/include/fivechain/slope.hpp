#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fivechain {

using Int = boost::multiprecision::cpp_int;

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Extended rational p/q with q >= 1, plus Infinity (1/0) and Empty (0/0).
class Slope {
  public:
    enum class Kind : std::uint8_t { Empty = 0, Infinity = 1, Finite = 2 };

    Slope() = default;  // Empty

    static Slope empty() { return {}; }
    static Slope inf();
    static Slope of(long long p, long long q = 1);
    // Canonicalizes any pair; (0,0) gives Empty, (p,0) gives Infinity.
    static Slope frac(Int p, Int q);

    Kind kind() const { return kind_; }
    bool is_empty() const { return kind_ == Kind::Empty; }
    bool is_inf() const { return kind_ == Kind::Infinity; }
    bool is_finite() const { return kind_ == Kind::Finite; }

    // Homogeneous coordinates; Infinity is (1,0), Empty is (0,0).
    const Int& num() const { return p_; }
    const Int& den() const { return q_; }

    std::string str() const;

    bool operator==(const Slope& o) const { return kind_ == o.kind_ && p_ == o.p_ && q_ == o.q_; }
    std::strong_ordering operator<=>(const Slope& o) const;

  private:
    Kind kind_ = Kind::Empty;
    Int p_ = 0, q_ = 0;
};

Slope parse_slope(std::string_view text);
Slope slope_invert(const Slope& s);
// a + b*s, b must be +1 or -1
Slope slope_affine(const Slope& s, long long a, long long b);
Int distance(const Slope& a, const Slope& b);

// Integer 2x2 matrix acting on slopes as p/q -> (a p + b q)/(c p + d q).
struct Mob {
    long long a = 1, b = 0, c = 0, d = 1;

    static Mob identity() { return {1, 0, 0, 1}; }
    static Mob shift(long long k) { return {1, k, 0, 1}; }

    long long det() const { return a * d - b * c; }
    Mob operator*(const Mob& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    // inverse up to sign, valid as a slope map for det = +-1
    Mob inverse() const { return Mob{d, -b, -c, a}.canonical(); }
    // projective normal form: first nonzero entry positive
    Mob canonical() const;
    Slope operator()(const Slope& s) const;

    bool operator==(const Mob&) const = default;
    auto operator<=>(const Mob&) const = default;
};

std::string to_string(const Mob& m);

struct SlopeHash {
    std::size_t operator()(const Slope& s) const;
};

}  // namespace fivechain
