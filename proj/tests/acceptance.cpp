// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.
#include "oracles.hpp"

#include "fivechain/classify.hpp"

#include <chrono>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

using namespace fivechain;

namespace {

// pinned sizes; every comparison below is exact
constexpr size_t kGridPerRow = 50;
constexpr size_t kRandomHyperbolic = 100;
constexpr size_t kRandomDescriptors = 1000;
constexpr size_t kRandomInstructions = 1000;
constexpr std::uint64_t kSeed = 20240601;

int failures = 0;

void report(int n, bool ok, const std::string& what, const std::string& detail) {
    std::cout << "criterion " << n << ": " << (ok ? "PASS" : "FAIL") << "  " << what;
    if (!detail.empty()) std::cout << "  [" << detail << "]";
    std::cout << std::endl;
    if (!ok) ++failures;
}

std::set<Slope> parse_set(std::initializer_list<const char*> v) {
    std::set<Slope> s;
    for (auto t : v) s.insert(parse_slope(t));
    return s;
}

std::string set_str(const std::set<Slope>& s) {
    std::string r;
    for (auto& x : s) r += (r.empty() ? "" : " ") + x.str();
    return "{" + r + "}";
}

std::set<Slope> base_set(Manifold m) {
    return m == Manifold::M5 ? parse_set({"0", "1", "inf"}) : parse_set({"0", "1", "2", "inf"});
}

// ---- 1 ----
void orbit_identities() {
    std::vector<std::pair<const char*, std::set<Slope>>> cases = {
        {"(1)", parse_set({"1", "inf", "0"})},
        {"(-1)", parse_set({"-1", "1/2", "2"})},
        {"(-2)", parse_set({"-2", "-1/2", "1/3", "2/3", "3/2", "3"})},
    };
    bool ok = true;
    std::string detail;
    for (auto& [seed, want] : cases) {
        auto r = full_orbit(parse_instruction(seed, Manifold::M5));
        std::set<Slope> got;
        for (auto& x : r.elements)
            if (x.empty_count() == 4)
                for (auto& s : x.s)
                    if (!s.is_empty()) got.insert(s);
        bool good = r.saturated && got == want;
        ok = ok && good;
        detail += std::string(detail.empty() ? "" : "; ") + seed + " -> " + set_str(got);
    }
    report(1, ok, "single-slope orbits give the three value sets", detail);
}

// ---- 2 ----
void table_regeneration() {
    auto r = verify_tables();
    std::ostringstream d;
    d << "rule reading: " << r.chosen_variant;
    for (auto& c : r.counts) {
        d << "; table " << c.table << " " << c.rows << " rows/" << c.classes << " classes";
        if (!c.diffs.empty()) d << " (" << c.diffs.size() << " diffs)";
    }
    report(2, r.tables_match(), "Tables 1-6 regenerated with zero diffs", d.str());
    for (auto& c : r.counts)
        for (auto& x : c.diffs) std::cout << "    table " << c.table << ": " << x << "\n";
}

// ---- 3 and the instances reused by 7 ----
struct Grid {
    Instruction x;
    Manifold m;
};

std::vector<Grid> lookups() {
    const auto& t = tables();
    std::vector<Grid> used;
    bool ok = true;
    size_t rows = 0, instances = 0, short_rows = 0, wrong = 0;
    std::string first_bad;
    for (auto& row : t.rows) {
        Manifold m = row.manifold;
        int c = slot_count(m) - 1;
        std::set<Slope> want = base_set(m);
        auto extra = row.betas();
        want.insert(extra.begin(), extra.end());
        auto inst = sample_instances(row, row.parametric() ? kGridPerRow : 1);
        if (row.parametric()) {
            ++rows;
            if (inst.size() < kGridPerRow) {
                ++short_rows;
                ok = false;
                if (first_bad.empty()) first_bad = row.group + " has only " + std::to_string(inst.size()) + " instances";
            }
        }
        for (auto& x : inst) {
            ++instances;
            auto got = (m == Manifold::M5 ? exceptional_slopes_m5(x, c) : exceptional_slopes_m4(x, c)).values();
            auto direct = m == Manifold::M5 ? direct_exceptional_m5(x, c) : direct_exceptional_m4(x, c);
            if (got != want || direct != want) {
                ok = false;
                ++wrong;
                if (first_bad.empty())
                    first_bad = to_string(x) + " gives " + set_str(got) + ", direct " + set_str(direct) + ", row " +
                                set_str(want);
            }
            used.push_back({x, m});
        }
    }

    std::mt19937_64 rng(kSeed);
    size_t random_checked = 0;
    for (Manifold m : {Manifold::M5, Manifold::M4}) {
        int c = slot_count(m) - 1;
        auto rows = table_family_rows(t, m);
        size_t done = 0, tries = 0;
        while (done < kRandomHyperbolic && tries < 100 * kRandomHyperbolic) {
            ++tries;
            auto x = testgen::random_instruction(rng, m, 1);
            if (m == Manifold::M5 ? (factors_through_m4(x) || exceptional_m5(x))
                                  : (factors_through_m3(m4_to_m5(x)) || exceptional_m4(x)))
                continue;
            auto extras = m == Manifold::M5 ? lookup_extras_m5(rows, x, c) : lookup_extras_m4(rows, x, c);
            if (!extras.empty()) continue;
            ++done;
            auto got = (m == Manifold::M5 ? exceptional_slopes_m5(x, c) : exceptional_slopes_m4(x, c)).values();
            auto direct = m == Manifold::M5 ? direct_exceptional_m5(x, c) : direct_exceptional_m4(x, c);
            if (got != base_set(m) || direct != base_set(m)) {
                ok = false;
                ++wrong;
                if (first_bad.empty()) first_bad = to_string(x) + " gives " + set_str(got) + ", direct " + set_str(direct);
            }
        }
        random_checked += done;
        if (done < kRandomHyperbolic) ok = false;
    }
    std::ostringstream d;
    d << rows << " parametric rows, " << instances << " table instances, " << random_checked
      << " random non-matching; " << short_rows << " short rows, " << wrong << " wrong";
    if (!first_bad.empty()) d << "; first: " << first_bad;
    report(3, ok, "E_tau lookups equal the row sets and the base sets", d.str());
    return used;
}

// ---- 4 ----
void flash() {
    auto r = check_flash();
    std::ostringstream d;
    d << "(a) " << r.no_distance8() << " (b) " << r.distance4_ok() << " (c) " << r.maxima_ok() << " [" << r.max_m5
      << "," << r.max_m4 << "] (d) " << r.no_reducible();
    report(4, r.ok(), "flash audit: no distance 8, distance 4 never lens+toroidal, maxima 5/6, no reducible", d.str());
    for (auto& x : r.reducible) std::cout << "    reducible: " << x << "\n";
    std::cout << "    reducible with exterior H1 = Z: " << r.reducible_knot_like.size() << "\n";
    for (auto& p : r.distance4)
        std::cout << "    distance 4: entry " << p.entry << " (" << p.a.str() << ", " << p.b.str() << ")\n";
}

// ---- 5 ----
void homology_conservation() {
    std::mt19937_64 rng(kSeed + 5);
    size_t bad = 0;
    std::string first;
    for (size_t i = 0; i < kRandomDescriptors; ++i) {
        auto d = testgen::random_descriptor(rng);
        auto h = first_homology(d);
        for (auto& m : normalization_moves())
            if (!(first_homology(m.apply(d)) == h)) {
                ++bad;
                if (first.empty()) first = m.name + " on " + to_string(d);
            }
        if (!(first_homology(normalize(d)) == h)) ++bad;
    }
    // the two named spheres against the oracle's own presentation
    auto sphere_oracle = [](std::vector<std::pair<long long, long long>> f) {
        size_t n = f.size();
        std::vector<std::vector<Int>> rows;
        for (size_t i = 0; i < n; ++i) {
            std::vector<Int> r(n + 1, 0);
            r[i] = f[i].first;
            r[n] = f[i].second;
            rows.push_back(r);
        }
        std::vector<Int> sum(n + 1, 1);
        sum[n] = 0;
        rows.push_back(sum);
        auto g = oracle::snf(rows, n + 1);
        return AbelianGroup{g.rank, g.torsion};
    };
    Descriptor a, b;
    a.pieces = {Piece{Base::Sphere, {{2, -1}, {3, 1}, {7, 1}}, 0}};
    b.pieces = {Piece{Base::Sphere, {{2, -1}, {4, 1}, {5, 1}}, 0}};
    auto ha = first_homology(a), hb = first_homology(b);
    bool named = ha == AbelianGroup{} && hb == AbelianGroup{0, {2}} && ha == sphere_oracle({{2, -1}, {3, 1}, {7, 1}}) &&
                 hb == sphere_oracle({{2, -1}, {4, 1}, {5, 1}});
    std::ostringstream d;
    d << kRandomDescriptors << " descriptors, " << bad << " changes; trivial group: " << (ha.str()) << ", Z/2: " << hb.str();
    if (!first.empty()) d << "; first: " << first;
    report(5, bad == 0 && named, "normalization moves preserve H1", d.str());
}

// ---- 6 ----
void symmetry_algebra() {
    std::mt19937_64 rng(kSeed + 6);
    auto rot = [](const Instruction& y) { return apply_symmetry(SymmetryKind::Rot, y); };
    auto refl = [](const Instruction& y) { return apply_symmetry(SymmetryKind::Refl, y); };
    size_t bad = 0, fig8 = 0;
    for (size_t i = 0; i < kRandomInstructions; ++i) {
        auto x = testgen::random_instruction(rng, Manifold::M5, static_cast<int>(rng() % 3));
        if (!(rot(rot(rot(rot(rot(x))))) == x)) ++bad;
        if (!(refl(refl(x)) == x)) ++bad;
        if (!(refl(rot(refl(x))) == rot(rot(rot(rot(x)))))) ++bad;
        // Fig8 domain: (-1,-2,-2,-2,a)
        Instruction y(Manifold::M5, {Slope::of(-1), Slope::of(-2), Slope::of(-2), Slope::of(-2), x[0]});
        if (symmetry_applicable(SymmetryKind::Fig8, y)) {
            ++fig8;
            auto z = apply_symmetry(SymmetryKind::Fig8, y);
            if (!(apply_symmetry(SymmetryKind::Fig8, z) == y)) ++bad;
        }
    }
    report(6, bad == 0 && fig8 == kRandomInstructions, "Rot^5, Refl^2, Refl Rot Refl = Rot^-1, Fig8^2 = id",
           std::to_string(kRandomInstructions) + " instructions, " + std::to_string(fig8) + " in the Fig8 domain, " +
               std::to_string(bad) + " violations");
}

// ---- 7 ----
std::optional<AbelianGroup> refill_m5(const Instruction& y) {
    // bring a slot with a formula slope to position 4 by a rotation, then fill
    for (int k = 0; k < 5; ++k) {
        const Slope& s = y[k];
        if (!(s.is_inf() || s == Slope::of(0) || s == Slope::of(1))) continue;
        std::vector<Slope> a;
        for (int i = 1; i <= 4; ++i) a.push_back(y[(k + i) % 5]);
        return first_homology(fill_m5(a, s));
    }
    return std::nullopt;
}

void cross_formula(const std::vector<Grid>& used) {
    size_t checks = 0, bad = 0, skipped = 0;
    std::string first;
    const SymmetryKind kinds[] = {SymmetryKind::Rot, SymmetryKind::Refl, SymmetryKind::Map3, SymmetryKind::BlowDown,
                                  SymmetryKind::Fig8};
    for (auto& g : used) {
        if (g.m == Manifold::M5) {
            for (auto beta : {Slope::inf(), Slope::of(0), Slope::of(1)}) {
                Instruction y = g.x;
                y[4] = beta;
                std::vector<Slope> a(y.s.begin(), y.s.begin() + 4);
                auto h = first_homology(fill_m5(a, beta));
                for (auto k : kinds) {
                    if (!symmetry_applicable(k, y)) continue;
                    auto r = refill_m5(apply_symmetry(k, y));
                    if (!r) {
                        ++skipped;
                        continue;
                    }
                    ++checks;
                    if (!(*r == h)) {
                        ++bad;
                        if (first.empty()) first = to_string(k) + " on " + to_string(y);
                    }
                }
            }
        } else {
            for (auto beta : {Slope::inf(), Slope::of(0), Slope::of(1), Slope::of(2)}) {
                Instruction y = g.x;
                y[3] = beta;
                auto h = first_homology(fill_m4({y[0], y[1], y[2]}, beta));
                // native M4 symmetries whose image keeps a formula slope on the cusp
                for (auto& s : group_m4()) {
                    auto z = s(y);
                    if (!(z[3].is_inf() || z[3] == Slope::of(0) || z[3] == Slope::of(1) || z[3] == Slope::of(2))) {
                        ++skipped;
                        continue;
                    }
                    ++checks;
                    if (!(first_homology(fill_m4({z[0], z[1], z[2]}, z[3])) == h)) {
                        ++bad;
                        if (first.empty()) first = "M4 symmetry on " + to_string(y);
                    }
                }
                // and through M5, where the translated instruction has a -1 slot
                auto w = m4_to_m5(y);
                for (auto k : kinds) {
                    if (!symmetry_applicable(k, w)) continue;
                    auto r = refill_m5(apply_symmetry(k, w));
                    if (!r) {
                        ++skipped;
                        continue;
                    }
                    ++checks;
                    if (!(*r == h)) {
                        ++bad;
                        if (first.empty()) first = to_string(k) + " on " + to_string(w);
                    }
                }
            }
        }
    }
    std::ostringstream d;
    d << used.size() << " instances, " << checks << " refills, " << bad << " H1 changes, " << skipped
      << " images without a formula slope";
    if (!first.empty()) d << "; first: " << first;
    report(7, bad == 0 && checks > 0, "fillings agree in H1 before and after a symmetry", d.str());
}

}  // namespace

int main() {
    auto t0 = std::chrono::steady_clock::now();
    orbit_identities();
    table_regeneration();
    auto used = lookups();
    flash();
    homology_conservation();
    symmetry_algebra();
    cross_formula(used);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (failures ? std::to_string(failures) + " criteria failed" : "all criteria passed") << " in " << secs
              << " s" << std::endl;
    return failures ? 1 : 0;
}
