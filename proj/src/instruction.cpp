#include "fivechain/instruction.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <mutex>

namespace fivechain {

std::string to_string(Manifold m) {
    switch (m) {
    case Manifold::M3: return "M3";
    case Manifold::M4: return "M4";
    default: return "M5";
    }
}

Instruction::Instruction(Manifold m, std::vector<Slope> slots) : manifold(m), s(std::move(slots)) {
    if (size() != slot_count(m)) throw std::invalid_argument("instruction length does not match manifold");
}

int Instruction::empty_count() const {
    return static_cast<int>(std::count_if(s.begin(), s.end(), [](const Slope& x) { return x.is_empty(); }));
}

Instruction parse_instruction(std::string_view text, Manifold m) {
    auto t = text;
    while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.remove_prefix(1);
    while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.remove_suffix(1);
    if (t.size() < 2 || t.front() != '(' || t.back() != ')')
        throw ParseError("instruction must be written as (s0,s1,...): '" + std::string(text) + "'");
    t = t.substr(1, t.size() - 2);
    std::vector<Slope> slots;
    bool blank = t.find_first_not_of(" \t") == std::string_view::npos;
    if (!blank) {
        size_t pos = 0;
        while (true) {
            auto comma = t.find(',', pos);
            slots.push_back(parse_slope(t.substr(pos, comma == std::string_view::npos ? t.npos : comma - pos)));
            if (comma == std::string_view::npos) break;
            pos = comma + 1;
        }
    }
    if (static_cast<int>(slots.size()) > slot_count(m))
        throw ParseError("too many slots for " + to_string(m) + ": '" + std::string(text) + "'");
    slots.resize(static_cast<size_t>(slot_count(m)));
    return Instruction(m, std::move(slots));
}

std::string to_string(const Instruction& x) {
    std::string r = "(";
    for (int i = 0; i < x.size(); ++i) {
        if (i) r += ",";
        r += x[i].str();
    }
    return r + ")";
}

std::string to_string(SymmetryKind k) {
    switch (k) {
    case SymmetryKind::Rot: return "Rot";
    case SymmetryKind::Refl: return "Refl";
    case SymmetryKind::Map3: return "Map3";
    case SymmetryKind::BlowDown: return "BlowDown";
    case SymmetryKind::Fig8: return "Fig8";
    case SymmetryKind::Map3AsPrinted: return "Map3AsPrinted";
    }
    return "?";
}

// ---- slot maps ----

namespace {

const Mob kI{1, 0, 0, 1};
const Mob kInv{0, 1, 1, 0};        // 1/x
const Mob kOneMinus{-1, 1, 0, 1};  // 1-x
const Mob kInvOneMinus{0, 1, -1, 1};  // 1/(1-x)
const Mob kXOverXm1{1, 0, 1, -1};     // x/(x-1)

}  // namespace

SlotMap SlotMap::identity(int n) {
    SlotMap g;
    for (int i = 0; i < n; ++i) g.src.push_back(i);
    g.mats.assign(static_cast<size_t>(n), kI);
    return g;
}

SlotMap SlotMap::after(const SlotMap& h) const {
    SlotMap r;
    int n = size();
    r.src.resize(n);
    r.mats.resize(n);
    for (int i = 0; i < n; ++i) {
        r.src[i] = h.src[src[i]];
        r.mats[i] = (mats[i] * h.mats[src[i]]).canonical();
    }
    return r;
}

Instruction SlotMap::operator()(const Instruction& x) const {
    Instruction y = x;
    for (int i = 0; i < size(); ++i) y[i] = mats[i](x[src[i]]);
    return y;
}

SlotMap generator_map(SymmetryKind kind) {
    switch (kind) {
    case SymmetryKind::Rot: return {{4, 0, 1, 2, 3}, {kI, kI, kI, kI, kI}};
    case SymmetryKind::Refl: return {{4, 3, 2, 1, 0}, {kI, kI, kI, kI, kI}};
    case SymmetryKind::Map3: return {{1, 0, 2, 3, 4}, {kInv, kInv, kOneMinus, kXOverXm1, kOneMinus}};
    case SymmetryKind::Map3AsPrinted:
        return {{1, 0, 2, 3, 4}, {kInv, kInv, kOneMinus, kInvOneMinus, kOneMinus}};
    default: throw std::invalid_argument("generator_map: not a slot map");
    }
}

std::vector<SlotMap> close_group(const std::vector<SlotMap>& gens, size_t cap) {
    std::set<SlotMap> seen;
    std::vector<SlotMap> order, frontier;
    auto id = SlotMap::identity(gens.at(0).size());
    seen.insert(id);
    order.push_back(id);
    frontier.push_back(id);
    while (!frontier.empty() && seen.size() < cap) {
        std::vector<SlotMap> next;
        for (auto& h : frontier)
            for (auto& g : gens) {
                auto k = g.after(h);
                if (seen.insert(k).second) {
                    order.push_back(k);
                    next.push_back(std::move(k));
                }
            }
        frontier = std::move(next);
    }
    return order;
}

const std::vector<SlotMap>& group_m5() {
    static const std::vector<SlotMap> g = close_group(
        {generator_map(SymmetryKind::Rot), generator_map(SymmetryKind::Refl), generator_map(SymmetryKind::Map3)});
    return g;
}

// M4 coordinates gamma relate to M5 by delta = (g0-1, g1, g2, g3-1, -1). Elements of G
// fixing slot 4 and the value -1 there descend to M4 after conjugating by that shift.
const std::vector<SlotMap>& group_m4() {
    static const std::vector<SlotMap> g = [] {
        auto sh = [](int j) { return j == 0 || j == 3 ? 1 : 0; };
        std::vector<SlotMap> gens;
        for (auto& h : group_m5()) {
            if (h.src[4] != 4 || h.mats[4](Slope::of(-1)) != Slope::of(-1)) continue;
            SlotMap l;
            for (int i = 0; i < 4; ++i) {
                l.src.push_back(h.src[i]);
                l.mats.push_back((Mob::shift(sh(i)) * h.mats[i] * Mob::shift(-sh(h.src[i]))).canonical());
            }
            gens.push_back(l);
        }
        gens.push_back({{3, 0, 1, 2}, {kI, kI, kI, kI}});
        return close_group(gens);
    }();
    return g;
}

std::vector<SlotMap> dihedral_group(int n) {
    SlotMap rot, refl;
    for (int i = 0; i < n; ++i) {
        rot.src.push_back((i + n - 1) % n);
        refl.src.push_back(n - 1 - i);
    }
    rot.mats.assign(n, kI);
    refl.mats.assign(n, kI);
    return close_group({rot, refl});
}

namespace {

const std::vector<SlotMap>& dihedral_cached(int n) {
    static const std::vector<SlotMap> d3 = dihedral_group(3), d4 = dihedral_group(4), d5 = dihedral_group(5);
    return n == 3 ? d3 : n == 4 ? d4 : d5;
}

const Slope kM1 = Slope::of(-1);
const Slope kM2 = Slope::of(-2);

}  // namespace

bool symmetry_applicable(SymmetryKind kind, const Instruction& x) {
    if (x.manifold != Manifold::M5) return false;
    switch (kind) {
    case SymmetryKind::BlowDown: return x[0] == kM1;
    case SymmetryKind::Fig8: return x[0] == kM1 && x[1] == kM2 && x[2] == kM2 && x[3] == kM2;
    default: return true;
    }
}

Instruction apply_symmetry(SymmetryKind kind, const Instruction& x) {
    if (!symmetry_applicable(kind, x))
        throw InapplicableGenerator(to_string(kind) + " does not apply to " + to_string(x));
    switch (kind) {
    case SymmetryKind::BlowDown:
        return Instruction(Manifold::M5,
                           {x[1], kM1, slope_affine(x[2], -1, 1), x[3], slope_affine(x[4], 1, 1)});
    case SymmetryKind::Fig8: {
        Instruction y = x;
        y[4] = slope_affine(x[4], -6, -1);
        return y;
    }
    default: return generator_map(kind)(x);
    }
}

Instruction dihedral_class_rep(const Instruction& x) {
    Instruction best = x;
    for (auto& g : dihedral_cached(x.size())) best = std::min(best, g(x));
    return best;
}

// ---- orbits ----

OrbitResult full_orbit(const Instruction& x, const OrbitBudget& budget) {
    if (x.manifold != Manifold::M5) throw std::invalid_argument("full_orbit: M5 only");
    OrbitResult r;
    auto magnitude = [](const Instruction& y) {
        Int m = 0;
        for (auto& s : y.s) {
            if (!s.is_finite()) continue;
            m = std::max(m, Int(boost::multiprecision::abs(s.num())));
            m = std::max(m, s.den());
        }
        return m;
    };
    std::deque<Instruction> queue{x};
    r.elements.insert(x);
    r.max_magnitude = magnitude(x);
    const SymmetryKind kinds[] = {SymmetryKind::Rot, SymmetryKind::Refl, SymmetryKind::Map3, SymmetryKind::BlowDown,
                                  SymmetryKind::Fig8};
    while (!queue.empty()) {
        auto y = std::move(queue.front());
        queue.pop_front();
        for (auto k : kinds) {
            if (!symmetry_applicable(k, y)) continue;
            auto z = apply_symmetry(k, y);
            if (r.elements.count(z)) continue;
            auto mag = magnitude(z);
            if (mag > budget.max_magnitude || r.elements.size() >= budget.max_elements) {
                r.saturated = false;
                continue;
            }
            r.max_magnitude = std::max(r.max_magnitude, mag);
            r.elements.insert(z);
            queue.push_back(std::move(z));
        }
    }
    r.max_orbit = r.elements.size();
    return r;
}

// ---- patterns ----

bool contains_pattern(const Instruction& x, const Instruction& pattern) {
    if (x.size() != pattern.size()) return false;
    for (auto& g : dihedral_cached(x.size())) {
        bool ok = true;
        for (int i = 0; i < x.size() && ok; ++i)
            if (!pattern[i].is_empty() && g.slot(x, i) != pattern[i]) ok = false;
        if (ok) return true;
    }
    return false;
}

namespace {

std::vector<Slope> parse_list(std::initializer_list<const char*> xs) {
    std::vector<Slope> r;
    for (auto t : xs) r.push_back(parse_slope(t));
    return r;
}

}  // namespace

const std::vector<Slope>& values_one() {
    static const auto v = parse_list({"0", "1", "inf"});
    return v;
}
const std::vector<Slope>& values_minus_one() {
    static const auto v = parse_list({"-1", "1/2", "2"});
    return v;
}
const std::vector<Slope>& values_minus_two() {
    static const auto v = parse_list({"-2", "-1/2", "1/3", "2/3", "3/2", "3"});
    return v;
}
const std::vector<Slope>& m4_base_values() {
    static const auto v = parse_list({"0", "1", "2", "inf"});
    return v;
}
const std::vector<Slope>& m4_minus_one_values() {
    static const auto v = parse_list({"-1", "1/2", "3", "3/2"});
    return v;
}
const std::vector<Slope>& m4_m1_values() {
    static const auto v = parse_list({"-2", "2/3", "4", "4/3"});
    return v;
}

bool in(const Slope& s, const std::vector<Slope>& set) { return std::find(set.begin(), set.end(), s) != set.end(); }

bool factors_through_m4(const Instruction& x) {
    return std::any_of(x.s.begin(), x.s.end(), [](const Slope& s) { return in(s, values_minus_one()); });
}

const std::vector<Instruction>& m3_factoring_patterns() {
    // [((a)_0, (b)_k)] as listed, k is the slot of the second slope
    static const std::vector<Instruction> pats = [] {
        const struct {
            const char* a;
            const char* b;
            int k;
        } raw[] = {
            {"-1", "-2", 1},  {"1/2", "2/3", 2},  {"1/2", "3", 1},   {"1/2", "3/2", 1}, {"2/3", "2", 1},
            {"1/2", "1/3", 2}, {"2", "-1/2", 2},  {"1/3", "2", 1},   {"-1", "3", 2},    {"-1", "3/2", 2},
            {"2", "-2", 2},   {"-1", "-1/2", 1}, {"-1", "-1", 2},   {"-1", "1/2", 2},  {"1/2", "2", 2},
            {"-1", "2", 1},   {"-1", "1/2", 1},  {"2", "2", 2},
        };
        std::vector<Instruction> r;
        for (auto& p : raw) {
            Instruction x;
            x[0] = parse_slope(p.a);
            x[p.k] = parse_slope(p.b);
            r.push_back(x);
        }
        return r;
    }();
    return pats;
}

bool factors_through_m3(const Instruction& x) {
    if (x.manifold != Manifold::M5) throw std::invalid_argument("factors_through_m3: M5 only");
    for (auto& p : m3_factoring_patterns())
        if (contains_pattern(x, p)) return true;
    return false;
}

const std::vector<Instruction>& isolated_m5_instructions() {
    static const std::vector<Instruction> v = [] {
        std::vector<Instruction> r;
        for (auto t : {"(inf)", "(-1,-2,-2,-1)", "(-1,-2,-3,-2,-4)", "(-1,-2,-2,-3,-5)", "(-1,-3,-2,-2,-3)",
                       "(-2,-1/2,3,3,-1/2)", "(-2,-2,-2,-2,-2)"})
            r.push_back(parse_instruction(t, Manifold::M5));
        return r;
    }();
    return v;
}

Instruction m4_to_m5(const Instruction& x) {
    if (x.manifold != Manifold::M4) throw std::invalid_argument("m4_to_m5: M4 instruction expected");
    return Instruction(Manifold::M5,
                       {slope_affine(x[0], -1, 1), x[1], x[2], slope_affine(x[3], -1, 1), Slope::of(-1)});
}

Instruction blow_down_at(const Instruction& x, int i) {
    int n = x.size();
    if (n < 4 || x[i] != kM1) throw std::invalid_argument("blow_down_at: slot is not -1");
    auto y = x.s;
    int a = (i + n - 1) % n, b = (i + 1) % n;
    y[a] = slope_affine(y[a], 1, 1);
    y[b] = slope_affine(y[b], 1, 1);
    std::vector<Slope> out;
    for (int k = 1; k < n; ++k) out.push_back(y[(i + k) % n]);
    return Instruction(n == 5 ? Manifold::M4 : Manifold::M3, std::move(out));
}

// ---- M3 ----

const std::vector<std::vector<Slope>>& m3_isolated_list() {
    static const std::vector<std::vector<Slope>> v = [] {
        std::vector<std::vector<Slope>> r;
        for (auto t : {"(0)", "(1)", "(2)", "(3)", "(inf)", "(-1,-1)", "(4,1/2)", "(3/2,5/2)", "(5,5,1/2)",
                       "(4,4,2/3)", "(4,3/2,3/2)", "(4,1/3,-1)", "(8/3,3/2,3/2)", "(5/2,5/2,4/3)", "(5/2,5/3,5/3)",
                       "(7/3,7/3,3/2)", "(-1,-2,-2)", "(-1,-2,-3)", "(-1,-2,-4)", "(-1,-2,-5)", "(-1,-3,-3)",
                       "(-2,-2,-2)"}) {
            auto x = parse_instruction(t, Manifold::M3);
            std::vector<Slope> e;
            for (auto& s : x.s)
                if (!s.is_empty()) e.push_back(s);
            r.push_back(e);
        }
        return r;
    }();
    return v;
}

bool m3_is_exceptional(const Instruction& x) {
    if (x.manifold != Manifold::M3) throw std::invalid_argument("m3_is_exceptional: M3 instruction expected");
    for (auto& pat : m3_isolated_list()) {
        // injective assignment of pattern entries to slots
        std::vector<int> idx{0, 1, 2};
        do {
            bool ok = true;
            for (size_t j = 0; j < pat.size() && ok; ++j) ok = x[idx[j]] == pat[j];
            if (ok) return true;
        } while (std::next_permutation(idx.begin(), idx.end()));
    }
    return false;
}

// ---- exceptionality ----

namespace {

const std::set<Instruction>& closed_isolated_orbit_m5() {
    static const std::set<Instruction> v = [] {
        std::set<Instruction> r;
        for (auto t : {"(-2,-1/2,3,3,-1/2)", "(-2,-2,-2,-2,-2)"}) {
            auto x = parse_instruction(t, Manifold::M5);
            for (auto& g : group_m5()) r.insert(g(x));
        }
        return r;
    }();
    return v;
}

const std::set<Instruction>& m1_orbit_m4() {
    static const std::set<Instruction> v = [] {
        std::set<Instruction> r;
        auto x = parse_instruction("(-2,-2,-2,-2)", Manifold::M4);
        for (auto& g : group_m4()) r.insert(g(x));
        return r;
    }();
    return v;
}

}  // namespace

bool exceptional_m4(const Instruction& x) {
    if (x.manifold != Manifold::M4) throw std::invalid_argument("exceptional_m4: M4 instruction expected");
    for (auto& s : x.s)
        if (in(s, m4_base_values())) return true;
    for (auto& g : group_m4())
        for (int i = 0; i < 4; ++i)
            if (in(x[g.src[i]], m4_minus_one_values()) && g.slot(x, i) == kM1)
                return m3_is_exceptional(blow_down_at(g(x), i));
    return x.closed() && m1_orbit_m4().count(x) > 0;
}

bool exceptional_m5(const Instruction& x) {
    if (x.manifold != Manifold::M5) throw std::invalid_argument("exceptional_m5: M5 instruction expected");
    for (auto& s : x.s)
        if (in(s, values_one())) return true;
    for (auto& g : group_m5())
        for (int i = 0; i < 5; ++i)
            if (in(x[g.src[i]], values_minus_one()) && g.slot(x, i) == kM1)
                return exceptional_m4(blow_down_at(g(x), i));
    return x.closed() && closed_isolated_orbit_m5().count(x) > 0;
}

}  // namespace fivechain
