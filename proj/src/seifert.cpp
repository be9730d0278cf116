#include "fivechain/seifert.hpp"

#include <algorithm>
#include <map>

namespace fivechain {

using boost::multiprecision::abs;

int Piece::genuine_fibers() const {
    return static_cast<int>(std::count_if(fibers.begin(), fibers.end(), [](const Fiber& f) { return abs(f.p) >= 2; }));
}

Mat2 Mat2::inverse() const {
    Int dt = det();
    if (dt != 1 && dt != -1) throw std::invalid_argument("Mat2::inverse: not unimodular");
    return {d * dt, -b * dt, -c * dt, a * dt};
}

// ---- abelian groups ----

std::string AbelianGroup::str() const {
    std::vector<std::string> parts;
    if (rank == 1) parts.push_back("Z");
    else if (rank > 1) parts.push_back("Z^" + std::to_string(rank));
    for (auto& d : torsion) parts.push_back("Z/" + d.str());
    if (parts.empty()) return "0";
    std::string r = parts[0];
    for (size_t i = 1; i < parts.size(); ++i) r += " + " + parts[i];
    return r;
}

Int AbelianGroup::order() const {
    if (rank) return 0;
    Int r = 1;
    for (auto& d : torsion) r *= d;
    return r;
}

AbelianGroup abelian_group_from_relations(const std::vector<std::vector<Int>>& rows, size_t ngens) {
    std::vector<std::vector<Int>> m;
    for (auto& r : rows) {
        auto row = r;
        row.resize(ngens);
        m.push_back(std::move(row));
    }
    size_t R = m.size(), C = ngens;
    std::vector<Int> diag;
    size_t t = 0;
    while (t < R && t < C) {
        // pivot of least absolute value in the remaining block
        size_t pi = R, pj = C;
        for (size_t i = t; i < R; ++i)
            for (size_t j = t; j < C; ++j)
                if (m[i][j] != 0 && (pi == R || abs(m[i][j]) < abs(m[pi][pj]))) {
                    pi = i;
                    pj = j;
                }
        if (pi == R) break;
        std::swap(m[t], m[pi]);
        for (auto& row : m) std::swap(row[t], row[pj]);
        bool clean = true;
        for (size_t i = t + 1; i < R; ++i) {
            if (m[i][t] == 0) continue;
            Int k = m[i][t] / m[t][t];
            for (size_t j = t; j < C; ++j) m[i][j] -= k * m[t][j];
            if (m[i][t] != 0) clean = false;
        }
        for (size_t j = t + 1; j < C; ++j) {
            if (m[t][j] == 0) continue;
            Int k = m[t][j] / m[t][t];
            for (size_t i = t; i < R; ++i) m[i][j] -= k * m[i][t];
            if (m[t][j] != 0) clean = false;
        }
        if (!clean) continue;  // a smaller remainder appeared, pick again
        diag.push_back(abs(m[t][t]));
        ++t;
    }
    for (size_t i = 0; i < diag.size(); ++i)
        for (size_t j = i + 1; j < diag.size(); ++j) {
            Int g = boost::multiprecision::gcd(diag[i], diag[j]);
            Int l = diag[i] / g * diag[j];
            diag[i] = g;
            diag[j] = l;
        }
    AbelianGroup g;
    g.rank = ngens - diag.size();
    for (auto& d : diag)
        if (d != 1) g.torsion.push_back(d);
    return g;
}

// ---- filling formulas ----

namespace {

Fiber fib(const Slope& s) { return {s.num(), s.den()}; }

Descriptor make_union(std::vector<Fiber> l, std::vector<Fiber> r) {
    Descriptor d;
    d.shape = Shape::Union;
    d.pieces = {Piece{Base::Disc, std::move(l), 0}, Piece{Base::Disc, std::move(r), 0}};
    d.glue = {0, 1, 1, 0};
    return d;
}

Descriptor make_closed(std::vector<Fiber> f) {
    Descriptor d;
    d.shape = Shape::Closed;
    d.pieces = {Piece{Base::Sphere, std::move(f), 0}};
    return d;
}

Descriptor mark_boundary(Descriptor d) {
    int holes = 0;
    for (auto& p : d.pieces)
        for (auto& f : p.fibers)
            if (f.p == 0 && f.q == 0) ++holes;
    if (holes) {
        d.shape = Shape::WithBoundary;
        d.unglued = holes;
    }
    return d;
}

}  // namespace

Descriptor fill_m5(const std::vector<Slope>& alpha, const Slope& beta) {
    if (alpha.size() != 4) throw std::invalid_argument("fill_m5: four slopes expected");
    auto [a, b] = fib(alpha[0]);
    auto [c, d] = fib(alpha[1]);
    auto [e, f] = fib(alpha[2]);
    auto [g, h] = fib(alpha[3]);
    if (beta.is_inf()) return mark_boundary(make_union({{a, -b}, {d, c}}, {{f, e}, {g, -h}}));
    if (beta == Slope::of(1)) return mark_boundary(make_union({{a - b, b}, {e, f}}, {{g - h, h}, {c, d}}));
    if (beta == Slope::of(0)) return mark_boundary(make_union({{b, b - a}, {h, -g}}, {{c - d, c}, {e - f, f}}));
    throw UnsupportedSlope("fill_m5: no filling formula for slope " + beta.str());
}

Descriptor fill_m4(const std::vector<Slope>& alpha, const Slope& beta) {
    if (alpha.size() != 3) throw std::invalid_argument("fill_m4: three slopes expected");
    auto [a, b] = fib(alpha[0]);
    auto [c, d] = fib(alpha[1]);
    auto [e, f] = fib(alpha[2]);
    if (beta.is_inf()) return mark_boundary(make_closed({{a, b}, {d, -c}, {e, f}}));
    if (beta == Slope::of(2)) return mark_boundary(make_union({{a - b, b}, {e - f, f}}, {{c, d}, {2, -1}}));
    if (beta == Slope::of(1)) return mark_boundary(make_closed({{a - 2 * b, b}, {c - d, c}, {e - 2 * f, f}}));
    if (beta == Slope::of(0)) return mark_boundary(make_union({{f, -e}, {b, 2 * b - a}}, {{2, 1}, {c - 2 * d, d}}));
    throw UnsupportedSlope("fill_m4: no filling formula for slope " + beta.str());
}

// ---- homology ----

namespace {

struct Presentation {
    size_t gens = 0;
    std::vector<std::map<size_t, Int>> rows;

    size_t fresh() { return gens++; }
    void add(std::map<size_t, Int> r) { rows.push_back(std::move(r)); }

    struct PieceGens {
        size_t t;
        std::vector<size_t> mu;
    };

    PieceGens piece(const Piece& p) {
        PieceGens pg;
        pg.t = fresh();
        for (int i = 0; i < p.boundary_count(); ++i) pg.mu.push_back(fresh());
        std::map<size_t, Int> sum;
        for (auto m : pg.mu) sum[m] += 1;
        auto fibres = p.fibers;
        if (p.twist != 0) fibres.push_back({1, p.twist});
        for (auto& f : fibres) {
            if (f.p == 0 && f.q == 0) throw NotClosed("descriptor has an unfilled boundary");
            auto c = fresh();
            sum[c] += 1;
            std::map<size_t, Int> r;
            r[c] += f.p;
            r[pg.t] += f.q;
            add(r);
        }
        if (p.base == Base::ProjectivePlane) {
            auto a = fresh();
            sum[a] += 2;
            add({{pg.t, 2}});
        }
        add(sum);
        return pg;
    }

    // mu_L = B.a mu_R + B.c t_R,  t_L = B.b mu_R + B.d t_R
    void glue(size_t muL, size_t tL, size_t muR, size_t tR, const Mat2& B) {
        std::map<size_t, Int> r1, r2;
        r1[muL] += 1;
        r1[muR] -= B.a;
        r1[tR] -= B.c;
        r2[tL] += 1;
        r2[muR] -= B.b;
        r2[tR] -= B.d;
        add(r1);
        add(r2);
    }

    AbelianGroup group() const {
        std::vector<std::vector<Int>> m;
        for (auto& r : rows) {
            std::vector<Int> v(gens);
            for (auto& [k, x] : r) v[k] += x;
            m.push_back(std::move(v));
        }
        return abelian_group_from_relations(m, gens);
    }
};

}  // namespace

AbelianGroup first_homology(const Descriptor& d) {
    Presentation P;
    switch (d.shape) {
    case Shape::WithBoundary: throw NotClosed("descriptor has an unfilled boundary");
    case Shape::Closed: {
        if (d.pieces.size() != 1 || d.pieces[0].boundary_count() != 0)
            throw NotClosed("closed descriptor needs one piece over S2 or RP2");
        P.piece(d.pieces[0]);
        break;
    }
    case Shape::Union: {
        auto L = P.piece(d.pieces.at(0));
        auto R = P.piece(d.pieces.at(1));
        if (L.mu.size() != 1 || R.mu.size() != 1) throw NotClosed("union pieces must each have one boundary");
        P.glue(L.mu[0], L.t, R.mu[0], R.t, d.glue);
        break;
    }
    case Shape::SelfGlued: {
        auto A = P.piece(d.pieces.at(0));
        if (A.mu.size() != 2) throw NotClosed("self-gluing needs an annulus piece");
        P.fresh();  // the loop through the gluing
        P.glue(A.mu[0], A.t, A.mu[1], A.t, d.glue);
        break;
    }
    case Shape::TorusBundle: {
        auto x = P.fresh(), y = P.fresh();
        P.fresh();
        const auto& A = d.glue;
        P.add({{x, A.a - 1}, {y, A.c}});
        P.add({{x, A.b}, {y, A.d - 1}});
        break;
    }
    }
    return P.group();
}

AbelianGroup chain_homology_m5(const Instruction& x) {
    if (x.manifold != Manifold::M5) throw std::invalid_argument("chain_homology_m5: M5 instruction expected");
    static const int eps[5] = {1, 1, 1, 1, -1};
    Int lk[5][5] = {};
    for (int i = 0; i < 5; ++i) {
        int j = (i + 1) % 5;
        lk[i][j] += eps[i];
        lk[j][i] += eps[i];
    }
    std::vector<std::vector<Int>> rows;
    for (int i = 0; i < 5; ++i) {
        if (x[i].is_empty()) continue;
        std::vector<Int> r(5);
        for (int j = 0; j < 5; ++j) r[j] = x[i].den() * lk[i][j];
        r[i] = x[i].num();
        rows.push_back(std::move(r));
    }
    return abelian_group_from_relations(rows, 5);
}

AbelianGroup chain_homology_m4(const Instruction& x) { return chain_homology_m5(m4_to_m5(x)); }

// ---- normalization ----

namespace {

bool is_solid_torus(const Piece& p) {
    if (p.base != Base::Disc) return false;
    return p.fibers.size() <= 1;
}

// meridian of a solid torus piece in its (mu, t) basis
std::pair<Int, Int> meridian(const Piece& p) {
    if (p.fibers.empty()) return {1, -p.twist};
    const auto& f = p.fibers[0];
    return {f.p, -(f.q + f.p * p.twist)};
}

Descriptor move_sign(const Descriptor& d) {
    Descriptor r = d;
    for (auto& p : r.pieces)
        for (auto& f : p.fibers)
            if (f.p < 0 || (f.p == 0 && f.q < 0)) {
                f.p = -f.p;
                f.q = -f.q;
            }
    return r;
}

Descriptor move_trivial(const Descriptor& d) {
    Descriptor r = d;
    for (auto& p : r.pieces) {
        std::vector<Fiber> keep;
        for (auto& f : p.fibers) {
            if (f.p == 1) p.twist += f.q;
            else if (f.p == -1) p.twist -= f.q;
            else keep.push_back(f);
        }
        p.fibers = std::move(keep);
    }
    return r;
}

Descriptor move_reduce(const Descriptor& d) {
    Descriptor r = d;
    for (auto& p : r.pieces)
        for (auto& f : p.fibers) {
            if (f.p < 2) continue;
            Int rem = f.q % f.p;
            if (rem < 0) rem += f.p;
            p.twist += (f.q - rem) / f.p;
            f.q = rem;
        }
    return r;
}

Descriptor move_push_twist(const Descriptor& d) {
    Descriptor r = d;
    if (r.shape == Shape::Union) {
        Int bl = r.pieces[0].twist, br = r.pieces[1].twist;
        r.glue = r.glue * Mat2{1, 0, -bl, 1};
        r.glue = Mat2{1, 0, br, 1} * r.glue;
        r.pieces[0].twist = r.pieces[1].twist = 0;
    } else if (r.shape == Shape::SelfGlued) {
        Int b = r.pieces[0].twist;
        r.glue = r.glue * Mat2{1, 0, -b, 1};
        r.pieces[0].twist = 0;
    }
    return r;
}

Descriptor move_absorb(const Descriptor& d) {
    if (d.shape != Shape::Union) return d;
    Piece L = d.pieces[0], R = d.pieces[1];
    Mat2 B = d.glue;
    if (!is_solid_torus(R)) {
        if (!is_solid_torus(L)) return d;
        std::swap(L, R);
        B = B.inverse();
    }
    auto [x, y] = meridian(R);
    Int dt = B.det();
    Fiber nf{(x * B.d - y * B.b) * dt, (B.a * y - B.c * x) * dt};
    Descriptor r;
    r.shape = Shape::Closed;
    r.reducible_candidate = d.reducible_candidate;
    L.base = Base::Sphere;
    L.fibers.push_back(nf);
    r.pieces = {L};
    return r;
}

Descriptor move_flag(const Descriptor& d) {
    Descriptor r = d;
    for (auto& p : r.pieces)
        for (auto& f : p.fibers) {
            if (f.p != 0 || f.q == 0) continue;
            if (r.shape == Shape::Union && p.base == Base::Disc) r.reducible_candidate = true;
            if (r.shape == Shape::Closed) {
                // a fibre-parallel filling: connected sum of the other fibres' lens spaces
                if (p.genuine_fibers() >= 2) r.reducible_candidate = true;
                try {
                    if (!first_homology(d).finite()) r.reducible_candidate = true;
                } catch (const NotClosed&) {
                }
            }
        }
    return r;
}

std::string order_key(const Descriptor& d) { return to_json(d).dump(); }

Descriptor move_order(const Descriptor& d) {
    Descriptor r = d;
    for (auto& p : r.pieces) std::sort(p.fibers.begin(), p.fibers.end());
    if (r.shape == Shape::Union || r.shape == Shape::SelfGlued) {
        std::vector<Descriptor> cands;
        for (int swap = 0; swap < 2; ++swap)
            for (int neg = 0; neg < 2; ++neg) {
                // negating both basis curves on one side only makes sense with two separate fibres
                if (neg && r.shape == Shape::SelfGlued) continue;
                Descriptor c = r;
                if (swap) {
                    c.glue = c.glue.inverse();
                    if (c.shape == Shape::Union) std::swap(c.pieces[0], c.pieces[1]);
                }
                if (neg) c.glue = -c.glue;
                cands.push_back(c);
            }
        r = *std::min_element(cands.begin(), cands.end(),
                              [](const Descriptor& a, const Descriptor& b) { return order_key(a) < order_key(b); });
    }
    return r;
}

}  // namespace

const std::vector<NormalizationMove>& normalization_moves() {
    static const std::vector<NormalizationMove> moves = {
        {"M1 fibre sign", move_sign},           {"M2 trivial fibre", move_trivial},
        {"M3 q-reduction", move_reduce},        {"M2/M3 twist transfer", move_push_twist},
        {"M4 solid torus", move_absorb},        {"M5 reducible flag", move_flag},
        {"M6 ordering", move_order},
    };
    return moves;
}

Descriptor normalize(const Descriptor& d) {
    if (d.shape == Shape::WithBoundary || d.shape == Shape::TorusBundle) return d;
    Descriptor cur = d;
    for (int it = 0; it < 64; ++it) {
        Descriptor next = cur;
        for (auto& m : normalization_moves()) next = m.apply(next);
        if (next == cur) return cur;
        cur = std::move(next);
    }
    return cur;
}

bool is_lens_like(const Descriptor& d) {
    auto n = normalize(d);
    if (n.shape != Shape::Closed || n.reducible_candidate) return false;
    const auto& p = n.pieces[0];
    if (p.base != Base::Sphere) return false;
    for (auto& f : p.fibers)
        if (f.p == 0) return false;
    return p.genuine_fibers() <= 2;
}

bool is_toroidal(const Descriptor& d) {
    auto n = normalize(d);
    switch (n.shape) {
    case Shape::Union:
    case Shape::SelfGlued:
    case Shape::TorusBundle: return true;
    case Shape::Closed: return n.pieces[0].base == Base::ProjectivePlane && n.pieces[0].genuine_fibers() >= 2;
    default: return false;
    }
}

// ---- text / json ----

std::string to_string(Base b) {
    switch (b) {
    case Base::Disc: return "D";
    case Base::Annulus: return "A";
    case Base::Sphere: return "S2";
    default: return "RP2";
    }
}

namespace {

Base base_from_string(const std::string& s) {
    if (s == "D") return Base::Disc;
    if (s == "A") return Base::Annulus;
    if (s == "S2") return Base::Sphere;
    if (s == "RP2") return Base::ProjectivePlane;
    throw ParseError("unknown base '" + s + "'");
}

std::string piece_str(const Piece& p) {
    std::string r = to_string(p.base) + "[";
    for (size_t i = 0; i < p.fibers.size(); ++i) {
        if (i) r += ",";
        r += "(" + p.fibers[i].p.str() + "," + p.fibers[i].q.str() + ")";
    }
    if (p.twist != 0) r += std::string(p.fibers.empty() ? "" : "; ") + "e=" + p.twist.str();
    return r + "]";
}

std::string mat_str(const Mat2& m) {
    return "[[" + m.a.str() + "," + m.b.str() + "],[" + m.c.str() + "," + m.d.str() + "]]";
}

nlohmann::json mat_json(const Mat2& m) {
    return {{int_to_json(m.a), int_to_json(m.b)}, {int_to_json(m.c), int_to_json(m.d)}};
}

Mat2 mat_from(const nlohmann::json& j) {
    return {int_from_json(j.at(0).at(0)), int_from_json(j.at(0).at(1)), int_from_json(j.at(1).at(0)),
            int_from_json(j.at(1).at(1))};
}

nlohmann::json piece_json(const Piece& p) {
    nlohmann::json f = nlohmann::json::array();
    for (auto& x : p.fibers) f.push_back({int_to_json(x.p), int_to_json(x.q)});
    nlohmann::json j = {{"base", to_string(p.base)}, {"fibers", f}};
    if (p.twist != 0) j["twist"] = int_to_json(p.twist);
    return j;
}

Piece piece_from(const nlohmann::json& j) {
    Piece p;
    p.base = base_from_string(j.at("base").get<std::string>());
    for (auto& f : j.at("fibers")) p.fibers.push_back({int_from_json(f.at(0)), int_from_json(f.at(1))});
    if (j.contains("twist")) p.twist = int_from_json(j.at("twist"));
    return p;
}

}  // namespace

std::string to_string(const Descriptor& d) {
    std::string r;
    switch (d.shape) {
    case Shape::Closed: r = piece_str(d.pieces.at(0)); break;
    case Shape::Union: r = piece_str(d.pieces.at(0)) + " U" + mat_str(d.glue) + " " + piece_str(d.pieces.at(1)); break;
    case Shape::SelfGlued: r = piece_str(d.pieces.at(0)) + " /" + mat_str(d.glue); break;
    case Shape::TorusBundle: r = "T" + mat_str(d.glue); break;
    case Shape::WithBoundary: {
        for (size_t i = 0; i < d.pieces.size(); ++i) r += (i ? " , " : "") + piece_str(d.pieces[i]);
        r += " (" + std::to_string(d.unglued) + " unfilled)";
        break;
    }
    }
    if (d.reducible_candidate) r += " {reducible?}";
    return r;
}

nlohmann::json int_to_json(const Int& v) {
    if (v >= std::numeric_limits<long long>::min() && v <= std::numeric_limits<long long>::max())
        return static_cast<long long>(v);
    return v.str();
}

Int int_from_json(const nlohmann::json& j) {
    if (j.is_number_integer()) return Int(j.get<long long>());
    if (j.is_string()) return Int(j.get<std::string>());
    throw ParseError("expected an integer in descriptor json");
}

nlohmann::json to_json(const Descriptor& d) {
    nlohmann::json j = {{"version", 1}};
    switch (d.shape) {
    case Shape::Closed:
        j["shape"] = "closed";
        j["piece"] = piece_json(d.pieces.at(0));
        break;
    case Shape::Union:
        j["shape"] = "union";
        j["left"] = piece_json(d.pieces.at(0));
        j["glue"] = mat_json(d.glue);
        j["right"] = piece_json(d.pieces.at(1));
        break;
    case Shape::SelfGlued:
        j["shape"] = "self_glued";
        j["piece"] = piece_json(d.pieces.at(0));
        j["glue"] = mat_json(d.glue);
        break;
    case Shape::TorusBundle:
        j["shape"] = "torus_bundle";
        j["monodromy"] = mat_json(d.glue);
        break;
    case Shape::WithBoundary: {
        j["shape"] = "with_boundary";
        nlohmann::json ps = nlohmann::json::array();
        for (auto& p : d.pieces) ps.push_back(piece_json(p));
        j["pieces"] = ps;
        j["glue"] = mat_json(d.glue);
        j["unglued"] = d.unglued;
        break;
    }
    }
    if (d.reducible_candidate) j["reducible_candidate"] = true;
    return j;
}

Descriptor descriptor_from_json(const nlohmann::json& j) {
    try {
        if (j.contains("version") && j.at("version").get<int>() != 1) throw ParseError("unsupported descriptor version");
        Descriptor d;
        auto shape = j.at("shape").get<std::string>();
        if (shape == "closed") {
            d.shape = Shape::Closed;
            d.pieces = {piece_from(j.at("piece"))};
        } else if (shape == "union") {
            d.shape = Shape::Union;
            d.pieces = {piece_from(j.at("left")), piece_from(j.at("right"))};
            d.glue = mat_from(j.at("glue"));
        } else if (shape == "self_glued") {
            d.shape = Shape::SelfGlued;
            d.pieces = {piece_from(j.at("piece"))};
            d.glue = mat_from(j.at("glue"));
        } else if (shape == "torus_bundle") {
            d.shape = Shape::TorusBundle;
            d.glue = mat_from(j.at("monodromy"));
        } else if (shape == "with_boundary") {
            d.shape = Shape::WithBoundary;
            for (auto& p : j.at("pieces")) d.pieces.push_back(piece_from(p));
            if (j.contains("glue")) d.glue = mat_from(j.at("glue"));
            d.unglued = j.value("unglued", 0);
        } else {
            throw ParseError("unknown descriptor shape '" + shape + "'");
        }
        d.reducible_candidate = j.value("reducible_candidate", false);
        return d;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed descriptor json: ") + e.what());
    }
}

}  // namespace fivechain
