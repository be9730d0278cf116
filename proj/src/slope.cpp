#include "fivechain/slope.hpp"

#include <boost/functional/hash.hpp>

#include <cctype>
#include <optional>

namespace fivechain {

Slope Slope::inf() {
    Slope s;
    s.kind_ = Kind::Infinity;
    s.p_ = 1;
    s.q_ = 0;
    return s;
}

Slope Slope::of(long long p, long long q) { return frac(Int(p), Int(q)); }

Slope Slope::frac(Int p, Int q) {
    if (p == 0 && q == 0) return {};
    if (q == 0) return inf();
    if (q < 0) {
        p = -p;
        q = -q;
    }
    Int g = boost::multiprecision::gcd(p < 0 ? Int(-p) : p, q);
    Slope s;
    s.kind_ = Kind::Finite;
    s.p_ = p / g;
    s.q_ = q / g;
    return s;
}

std::string Slope::str() const {
    switch (kind_) {
    case Kind::Empty: return "-";
    case Kind::Infinity: return "inf";
    default: break;
    }
    if (q_ == 1) return p_.str();
    return p_.str() + "/" + q_.str();
}

std::strong_ordering Slope::operator<=>(const Slope& o) const {
    if (kind_ != o.kind_) return kind_ <=> o.kind_;
    if (p_ != o.p_) return p_ < o.p_ ? std::strong_ordering::less : std::strong_ordering::greater;
    if (q_ != o.q_) return q_ < o.q_ ? std::strong_ordering::less : std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

namespace {

std::optional<Int> parse_int(std::string_view t) {
    size_t i = 0;
    bool neg = false;
    if (i < t.size() && (t[i] == '-' || t[i] == '+')) {
        neg = t[i] == '-';
        ++i;
    }
    if (i == t.size()) return std::nullopt;
    Int v = 0;
    for (; i < t.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(t[i]))) return std::nullopt;
        v = v * 10 + (t[i] - '0');
    }
    return neg ? Int(-v) : v;
}

std::string_view trim(std::string_view t) {
    while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.remove_prefix(1);
    while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.remove_suffix(1);
    return t;
}

}  // namespace

Slope parse_slope(std::string_view text) {
    auto t = trim(text);
    if (t == "-") return Slope::empty();
    if (t == "inf" || t == "Inf" || t == "oo") return Slope::inf();
    auto slash = t.find('/');
    if (slash == std::string_view::npos) {
        auto p = parse_int(t);
        if (!p) throw ParseError("malformed slope: '" + std::string(text) + "'");
        return Slope::frac(*p, 1);
    }
    auto p = parse_int(trim(t.substr(0, slash)));
    auto q = parse_int(trim(t.substr(slash + 1)));
    if (!p || !q) throw ParseError("malformed slope: '" + std::string(text) + "'");
    if (*p == 0 && *q == 0) throw ParseError("0/0 is ambiguous; write '-' for the empty slope");
    return Slope::frac(*p, *q);
}

Slope slope_invert(const Slope& s) {
    if (s.is_empty()) return s;
    return Slope::frac(s.den(), s.num());
}

Slope slope_affine(const Slope& s, long long a, long long b) {
    if (b != 1 && b != -1) throw std::invalid_argument("slope_affine: b must be +-1");
    if (!s.is_finite()) return s;
    return Slope::frac(a * s.den() + b * s.num(), s.den());
}

Int distance(const Slope& a, const Slope& b) {
    if (a.is_empty() || b.is_empty()) throw std::invalid_argument("distance: empty slope is not a slope");
    Int v = a.num() * b.den() - a.den() * b.num();
    return v < 0 ? Int(-v) : v;
}

Mob Mob::canonical() const {
    for (long long x : {a, b, c, d}) {
        if (x == 0) continue;
        if (x < 0) return {-a, -b, -c, -d};
        return *this;
    }
    return *this;
}

Slope Mob::operator()(const Slope& s) const {
    if (s.is_empty()) return s;
    const Int& p = s.num();
    const Int& q = s.den();
    return Slope::frac(a * p + b * q, c * p + d * q);
}

std::string to_string(const Mob& m) {
    return "[[" + std::to_string(m.a) + "," + std::to_string(m.b) + "],[" + std::to_string(m.c) + "," +
           std::to_string(m.d) + "]]";
}

std::size_t SlopeHash::operator()(const Slope& s) const {
    std::size_t h = static_cast<std::size_t>(s.kind());
    boost::hash_combine(h, boost::multiprecision::hash_value(s.num()));
    boost::hash_combine(h, boost::multiprecision::hash_value(s.den()));
    return h;
}

}  // namespace fivechain
