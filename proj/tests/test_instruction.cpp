#include "oracles.hpp"

#include "fivechain/instruction.hpp"

#include <doctest.h>

#include <random>

using namespace fivechain;

namespace {

Instruction m5(const char* t) { return parse_instruction(t, Manifold::M5); }
Instruction m4(const char* t) { return parse_instruction(t, Manifold::M4); }
Instruction m3(const char* t) { return parse_instruction(t, Manifold::M3); }

std::set<Slope> single_slope_values(const char* seed) {
    auto r = full_orbit(m5(seed));
    REQUIRE(r.saturated);
    std::set<Slope> out;
    for (auto& x : r.elements)
        if (x.empty_count() == 4)
            for (auto& s : x.s)
                if (!s.is_empty()) out.insert(s);
    return out;
}

std::set<Slope> slopes(std::initializer_list<const char*> v) {
    std::set<Slope> s;
    for (auto t : v) s.insert(parse_slope(t));
    return s;
}

const char* kVals[] = {"-2", "-1", "-3", "2", "3", "1/2", "-1/2", "1/3", "2/3", "3/2", "4", "5",
                       "-4", "7/2", "5/3", "-", "inf", "0", "1", "-5/3"};

Instruction random_m5(std::mt19937_64& rng) {
    std::vector<Slope> s;
    for (int i = 0; i < 5; ++i) s.push_back(parse_slope(kVals[rng() % 20]));
    return Instruction(Manifold::M5, s);
}

}  // namespace

TEST_CASE("parsing fills trailing slots with Empty") {
    auto x = m5("(-2,5,3,7)");
    CHECK(x[4].is_empty());
    CHECK(to_string(x) == "(-2,5,3,7,-)");
    CHECK_THROWS(parse_instruction("(1,2,3,4,5,6)", Manifold::M5));
    CHECK_THROWS(parse_instruction("-2,5", Manifold::M5));
}

TEST_CASE("symmetry map examples") {
    CHECK(apply_symmetry(SymmetryKind::Rot, m5("(-2,-2,-2,-2,-)")) == m5("(-,-2,-2,-2,-2)"));
    CHECK(apply_symmetry(SymmetryKind::BlowDown, m5("(-1,-2,-2,-2,-)")) == m5("(-2,-1,-3,-2,-)"));
    CHECK(apply_symmetry(SymmetryKind::Fig8, m5("(-1,-2,-2,-2,-1)")) == m5("(-1,-2,-2,-2,-5)"));
    // slot 3 uses x/(x-1); the printed (1-x)^-1 is kept separately
    CHECK(apply_symmetry(SymmetryKind::Map3, m5("(-1,-2,-2,-2,-)")) == m5("(-1/2,-1,3,2/3,-)"));
    CHECK(apply_symmetry(SymmetryKind::Map3AsPrinted, m5("(-1,-2,-2,-2,-)")) == m5("(-1/2,-1,3,1/3,-)"));
    CHECK_THROWS_AS(apply_symmetry(SymmetryKind::BlowDown, m5("(-2,-2,-2,-2,-)")), InapplicableGenerator);
    CHECK_THROWS_AS(apply_symmetry(SymmetryKind::Fig8, m5("(-1,-2,-2,-3,-)")), InapplicableGenerator);
}

TEST_CASE("group orders") {
    CHECK(group_m5().size() == 120);
    CHECK(group_m4().size() == 32);
    CHECK(dihedral_group(5).size() == 10);
    CHECK(dihedral_group(4).size() == 8);
    CHECK(dihedral_group(3).size() == 6);
}

TEST_CASE("dihedral representatives") {
    CHECK(dihedral_class_rep(m5("(-,-2,-2,-2,-2)")) == dihedral_class_rep(m5("(-2,-2,-2,-2,-)")));
    CHECK(dihedral_class_rep(m5("(-,-1)")) == dihedral_class_rep(m5("(-1)")));
    // minimum over the ten images, computed by hand
    auto x = m5("(-2,5,3,7,-)");
    Instruction best = x;
    for (int r = 0; r < 5; ++r)
        for (int f = 0; f < 2; ++f) {
            Instruction y = x;
            for (int i = 0; i < 5; ++i) y[i] = x[f ? (5 + r - i) % 5 : (r + i) % 5];
            best = std::min(best, y);
        }
    CHECK(dihedral_class_rep(x) == best);
    CHECK(dihedral_class_rep(x)[0].is_empty());
}

TEST_CASE("single-slope orbits") {
    CHECK(single_slope_values("(1)") == slopes({"1", "inf", "0"}));
    CHECK(single_slope_values("(-1)") == slopes({"-1", "1/2", "2"}));
    CHECK(single_slope_values("(-2)") == slopes({"-2", "-1/2", "1/3", "2/3", "3/2", "3"}));
}

TEST_CASE("orbit budget is reported, not raised") {
    OrbitBudget b;
    b.max_elements = 3;
    auto r = full_orbit(m5("(-2,5,3,7,-)"), b);
    CHECK_FALSE(r.saturated);
    CHECK(r.elements.count(m5("(-2,5,3,7,-)")) == 1);
}

TEST_CASE("patterns and factoring") {
    CHECK(contains_pattern(m5("(-1,-2,-2,-1,7)"), m5("(-1,-2,-2,-1,-)")));
    CHECK_FALSE(contains_pattern(m5("(-2,-2,-2,-2,-)"), m5("(-1,-,-1)")));
    CHECK(contains_pattern(m5("(3,1/2,-,4,5)"), m5("(-,-,-,-,-)")));
    CHECK(factors_through_m4(m5("(-2,1/2,3,3,-)")));
    CHECK_FALSE(factors_through_m4(m5("(-2,-2,-2,-2,-)")));
    CHECK_FALSE(factors_through_m4(m5("(-,-,-,-,-)")));
    CHECK(factors_through_m3(m5("(-1,-2,4,5,-)")));
    CHECK(factors_through_m3(m5("(2,4,2,5,-)")));
    CHECK_FALSE(factors_through_m3(m5("(-2,-2,-2,-2,-)")));
    CHECK(m3_factoring_patterns().size() == 18);
    CHECK(isolated_m5_instructions().size() == 7);
}

TEST_CASE("M4 to M5 translation") {
    CHECK(m4_to_m5(m4("(-2,-1/2,-2,-)")) == m5("(-3,-1/2,-2,-,-1)"));
    CHECK(m4_to_m5(m4("(-,-,-,-)")) == m5("(-,-,-,-,-1)"));
    CHECK(m4_to_m5(m4("(-2,-2,-2,-)")) == m5("(-3,-2,-2,-,-1)"));
}

TEST_CASE("M3 exceptional list") {
    CHECK(m3_is_exceptional(m3("(5,5,1/2)")));
    CHECK(m3_is_exceptional(m3("(7,-1,-1)")));
    CHECK(m3_is_exceptional(m3("(-2,-2,0)")));
    CHECK(m3_is_exceptional(m3("(1/2,5,5)")));
    CHECK_FALSE(m3_is_exceptional(m3("(5,5,1/3)")));
    CHECK_FALSE(m3_is_exceptional(m3("(-2,-2,-3)")));
}

TEST_CASE("property: dihedral relations on random instructions") {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 1000; ++i) {
        auto x = random_m5(rng);
        auto rot = [](const Instruction& y) { return apply_symmetry(SymmetryKind::Rot, y); };
        auto refl = [](const Instruction& y) { return apply_symmetry(SymmetryKind::Refl, y); };
        CHECK(rot(rot(rot(rot(rot(x))))) == x);
        CHECK(refl(refl(x)) == x);
        CHECK(refl(rot(refl(x))) == rot(rot(rot(rot(x)))));
        CHECK(dihedral_class_rep(dihedral_class_rep(x)) == dihedral_class_rep(x));
        CHECK(dihedral_class_rep(rot(x)) == dihedral_class_rep(x));
        CHECK(factors_through_m4(apply_symmetry(SymmetryKind::Map3, x)) == factors_through_m4(x));
    }
}

TEST_CASE("exceptionality agrees with the orbit oracle") {
    std::mt19937_64 rng(22);
    int decided = 0;
    for (int i = 0; i < 500; ++i) {
        auto x = random_m5(rng);
        auto o = oracle::exceptional_by_orbit(x);
        if (!o) continue;
        ++decided;
        CHECK_MESSAGE(exceptional_m5(x) == *o, to_string(x));
    }
    CHECK(decided > 450);
    for (auto& x : isolated_m5_instructions()) CHECK(exceptional_m5(x));
    CHECK_FALSE(exceptional_m5(m5("(-2,-2,-2,-2,-)")));
    CHECK_FALSE(exceptional_m5(m5("(-2,5,3,7,-)")));
}

TEST_CASE("M4 exceptionality through the translation") {
    for (auto t : {"(-2,-2,-2,-)", "(-2,5/3,-2,-)", "(9/2,7,-9,-)", "(-2,-1/2,-2,-)", "(0,3,4,-)", "(-1,3,4,-)"}) {
        auto x = m4(t);
        CHECK_MESSAGE(exceptional_m4(x) == exceptional_m5(m4_to_m5(x)), t);
    }
}
