#include "oracles.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>

namespace oracle {

namespace {

Int det(std::vector<std::vector<Int>> m) {
    // fraction-free Bareiss elimination
    size_t n = m.size();
    if (n == 0) return 1;
    int sign = 1;
    Int prev = 1;
    for (size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k] == 0) {
            size_t r = k + 1;
            while (r < n && m[r][k] == 0) ++r;
            if (r == n) return 0;
            std::swap(m[k], m[r]);
            sign = -sign;
        }
        for (size_t i = k + 1; i < n; ++i)
            for (size_t j = k + 1; j < n; ++j) m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
        prev = m[k][k];
    }
    return sign * m[n - 1][n - 1];
}

void subsets(size_t n, size_t k, std::vector<std::vector<size_t>>& out) {
    std::vector<bool> pick(n, false);
    std::fill(pick.begin(), pick.begin() + static_cast<long>(k), true);
    do {
        std::vector<size_t> s;
        for (size_t i = 0; i < n; ++i)
            if (pick[i]) s.push_back(i);
        out.push_back(s);
    } while (std::prev_permutation(pick.begin(), pick.end()));
}

Int gcd(Int a, Int b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        Int t = a % b;
        a = b;
        b = t;
    }
    return a;
}

}  // namespace

Group snf(const std::vector<std::vector<Int>>& rows, size_t ngens) {
    std::vector<Int> d{1};
    size_t maxk = std::min(rows.size(), ngens);
    for (size_t k = 1; k <= maxk; ++k) {
        std::vector<std::vector<size_t>> rs, cs;
        subsets(rows.size(), k, rs);
        subsets(ngens, k, cs);
        Int g = 0;
        for (auto& r : rs)
            for (auto& c : cs) {
                std::vector<std::vector<Int>> m(k, std::vector<Int>(k));
                for (size_t i = 0; i < k; ++i)
                    for (size_t j = 0; j < k; ++j) m[i][j] = rows[r[i]][c[j]];
                g = gcd(g, det(m));
                if (g == 1) break;
            }
        if (g == 0) break;
        d.push_back(g);
    }
    Group out;
    size_t r = d.size() - 1;
    out.rank = ngens - r;
    for (size_t k = 1; k <= r; ++k) {
        Int f = d[k] / d[k - 1];
        if (f > 1) out.torsion.push_back(f);
    }
    return out;
}

Int sphere_order(const std::vector<std::pair<Int, Int>>& fibers) {
    Int prod = 1, sum = 0;
    for (auto& [p, q] : fibers) prod *= p;
    for (auto& [p, q] : fibers) sum += q * (prod / p);
    return sum < 0 ? Int(-sum) : sum;
}

Group chain_h1(const std::vector<Slope>& a) {
    // component i links i-1 and i+1; the closing crossing has the opposite sign
    std::vector<std::vector<Int>> rows(5, std::vector<Int>(5, 0));
    for (int i = 0; i < 5; ++i) {
        int j = (i + 1) % 5;
        Int l = i == 4 ? -1 : 1;
        rows[i][j] += a[i].den() * l;
        rows[j][i] += a[j].den() * l;
        rows[i][i] += a[i].num();
    }
    return snf(rows, 5);
}

namespace {

Slope inv(const Slope& s) { return Slope::frac(s.den(), s.num()); }
Slope add(const Slope& s, long long k) { return s.is_finite() ? Slope::frac(s.num() + k * s.den(), s.den()) : s; }
Slope neg(const Slope& s) { return s.is_finite() ? Slope::frac(-s.num(), s.den()) : s; }

std::vector<std::vector<Slope>> neighbours(const std::vector<Slope>& a) {
    std::vector<std::vector<Slope>> out;
    out.push_back({a[4], a[0], a[1], a[2], a[3]});
    out.push_back({a[4], a[3], a[2], a[1], a[0]});
    // slot 3 as x/(x-1); 1-x on an Empty slot stays Empty
    Slope s3 = a[3].is_finite() ? Slope::frac(a[3].num(), a[3].num() - a[3].den()) : a[3].is_inf() ? Slope::of(1) : a[3];
    out.push_back({inv(a[1]), inv(a[0]), add(neg(a[2]), 1), s3, add(neg(a[4]), 1)});
    Slope m1 = Slope::of(-1), m2 = Slope::of(-2);
    if (a[0] == m1) out.push_back({a[1], m1, add(a[2], -1), a[3], add(a[4], 1)});
    if (a[1] == m1) out.push_back({m1, a[0], add(a[2], 1), a[3], add(a[4], -1)});  // inverse move
    if (a[0] == m1 && a[1] == m2 && a[2] == m2 && a[3] == m2) out.push_back({m1, m2, m2, m2, add(neg(a[4]), -6)});
    return out;
}

bool contains(const std::vector<Slope>& a, const std::vector<Slope>& pat) {
    for (int r = 0; r < 5; ++r)
        for (int f = 0; f < 2; ++f) {
            bool ok = true;
            for (int i = 0; i < 5 && ok; ++i) {
                int j = f ? (5 + r - i) % 5 : (r + i) % 5;
                if (!pat[i].is_empty()) ok = a[j] == pat[i];
            }
            if (ok) return true;
        }
    return false;
}

}  // namespace

std::optional<bool> exceptional_by_orbit(const Instruction& x, size_t cap) {
    static const std::vector<std::vector<Slope>> isolated = [] {
        std::vector<std::vector<Slope>> v;
        for (auto t : {"(inf)", "(-1,-2,-2,-1)", "(-1,-2,-3,-2,-4)", "(-1,-2,-2,-3,-5)", "(-1,-3,-2,-2,-3)",
                       "(-2,-1/2,3,3,-1/2)", "(-2,-2,-2,-2,-2)"})
            v.push_back(fivechain::parse_instruction(t, fivechain::Manifold::M5).s);
        return v;
    }();
    std::set<std::vector<Slope>> seen{x.s};
    std::deque<std::vector<Slope>> todo{x.s};
    while (!todo.empty()) {
        auto a = todo.front();
        todo.pop_front();
        for (auto& p : isolated)
            if (contains(a, p)) return true;
        for (auto& b : neighbours(a))
            if (seen.insert(b).second) {
                if (seen.size() > cap) return std::nullopt;
                todo.push_back(b);
            }
    }
    return false;
}

}  // namespace oracle

namespace testgen {

using namespace fivechain;

namespace {

int uni(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

std::vector<Fiber> fibers(std::mt19937_64& rng, int lo, int hi) {
    std::vector<Fiber> f;
    for (int i = 0, n = uni(rng, lo, hi); i < n; ++i) {
        int p, q;
        do {
            p = uni(rng, -7, 7);
            q = uni(rng, -9, 9);
            if (p == 0 && uni(rng, 0, 3) != 0) p = 2;  // (0,q) fibres, but not too often
        } while (std::gcd(p, q) != 1);
        f.push_back({p, q});
    }
    return f;
}

Mat2 unimodular(std::mt19937_64& rng, int det) {
    Mat2 m = det < 0 ? Mat2{0, 1, 1, 0} : Mat2{};
    for (int i = 0, n = uni(rng, 1, 4); i < n; ++i) {
        long long k = uni(rng, -3, 3);
        m = (i % 2 ? Mat2{1, k, 0, 1} : Mat2{1, 0, k, 1}) * m;
    }
    if (uni(rng, 0, 1)) m = -m;
    return m;
}

}  // namespace

Descriptor random_descriptor(std::mt19937_64& rng) {
    Descriptor d;
    switch (uni(rng, 0, 5)) {
    case 0:
    case 1:
        d.shape = Shape::Closed;
        d.pieces = {Piece{Base::Sphere, fibers(rng, 0, 4), uni(rng, -3, 3)}};
        break;
    case 2:
        d.shape = Shape::Closed;
        d.pieces = {Piece{Base::ProjectivePlane, fibers(rng, 0, 3), uni(rng, -2, 2)}};
        break;
    case 3:
        d.shape = Shape::Union;
        d.pieces = {Piece{Base::Disc, fibers(rng, 0, 3), uni(rng, -2, 2)},
                    Piece{Base::Disc, fibers(rng, 0, 3), uni(rng, -2, 2)}};
        d.glue = unimodular(rng, -1);
        break;
    case 4:
        d.shape = Shape::SelfGlued;
        d.pieces = {Piece{Base::Annulus, fibers(rng, 0, 2), uni(rng, -2, 2)}};
        d.glue = unimodular(rng, -1);
        break;
    default:
        d.shape = Shape::TorusBundle;
        d.glue = unimodular(rng, uni(rng, 0, 1) ? 1 : -1);
        break;
    }
    return d;
}

Instruction random_instruction(std::mt19937_64& rng, Manifold m, int empties) {
    static const char* vals[] = {"-2", "-3", "2", "3", "1/2", "-1/2", "1/3", "2/3", "3/2", "4", "5", "-4",
                                 "7/2", "5/3", "-5/3", "7", "-7/2", "9/4", "-1", "6", "4/3", "-3/2", "5/2", "-9"};
    int n = slot_count(m);
    std::vector<Slope> s;
    for (int i = 0; i < n; ++i) s.push_back(i >= n - empties ? Slope::empty() : parse_slope(vals[uni(rng, 0, 23)]));
    return Instruction(m, s);
}

}  // namespace testgen
