#pragma once

#include "fivechain/instruction.hpp"
#include "fivechain/seifert.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace fivechain {

// ---- families ----

// slot i is a constant slope or a free parameter (nullopt)
struct Family {
    std::vector<std::optional<Slope>> slots;

    int free_count() const;
    bool contains(const Family& smaller) const;  // every instance of smaller is one of ours
    std::optional<Family> intersect(const Family& o) const;
    bool matches(const Instruction& x) const;  // compares the first slots.size() slots
    std::string str() const;

    bool operator==(const Family&) const = default;
    auto operator<=>(const Family&) const = default;
};

struct FamilyRow {
    Family family;
    std::set<Slope> betas;
    bool operator==(const FamilyRow&) const = default;
    auto operator<=>(const FamilyRow&) const = default;
};

// integer linear expression in single-letter parameters: "2s-r", "-u-2v", "q"
Int eval_linear(const std::string& expr, const std::map<char, Int>& vars);

// ---- embedded tables ----

struct TableExtra {
    Slope beta;
    std::string label;
    std::string tex;
    nlohmann::json descriptor;  // fibre entries may be parameter expressions
};

struct TableRow {
    int table = 0;
    std::string group;
    Manifold manifold = Manifold::M5;
    std::vector<std::string> alpha;         // as printed
    std::vector<std::string> param;         // per slot: "" or "p/q"
    Family family;
    std::vector<TableExtra> extras;

    std::set<Slope> betas() const;
    bool parametric() const { return family.free_count() > 0; }
    std::string alpha_str() const;
    // alpha must agree with family; parameters are read off the free slots
    Descriptor descriptor(size_t extra, const std::vector<Slope>& alpha) const;
};

struct TableData {
    std::vector<TableRow> rows;
    std::vector<std::string> warnings;  // load-time checks that did not pass
};

struct TableDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

TableData load_tables(const std::string& json_text);
// FIVECHAIN_TABLES overrides the compiled-in copy
const TableData& tables();
std::vector<FamilyRow> table_family_rows(const TableData& t, Manifold m);

// ---- exceptional slope sets ----

struct FactorsThroughM4 : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct FactorsThroughM3 : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ExceptionalInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CuspNotEmpty : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExceptionalSlope {
    Slope slope;
    Descriptor descriptor;
    std::string source;  // "formula" or the table group
};

struct SlopeSet {
    Manifold manifold = Manifold::M5;
    int cusp = 4;
    std::vector<ExceptionalSlope> slopes;  // sorted by slope

    std::set<Slope> values() const;
    std::string str() const;  // "-2 -1 0 1 inf", numeric order with inf last
    nlohmann::json to_json() const;
};

SlopeSet exceptional_slopes_m5(const Instruction& x, int cusp);
SlopeSet exceptional_slopes_m4(const Instruction& x, int cusp);

// extras read off a list of families, in the same frames as the table lookup
std::set<Slope> lookup_extras_m5(const std::vector<FamilyRow>& rows, const Instruction& x, int cusp);
std::set<Slope> lookup_extras_m4(const std::vector<FamilyRow>& rows, const Instruction& x, int cusp);

// decides every candidate slope with the exceptionality test, no tables involved
std::set<Slope> direct_exceptional_m5(const Instruction& x, int cusp);
std::set<Slope> direct_exceptional_m4(const Instruction& x, int cusp);

// ---- M3 reduction rules ----

struct RuleEntry {
    std::optional<Slope> constant;
    int slot = 0;
    Mob map = Mob::identity();
};

struct ReductionRule {
    std::string id;       // "l-1", "l1/2:a3=3", ...
    std::string set;      // "l-1", "l1/2", "l2"
    std::string variant;  // "" for the engine reading, otherwise the alternative's name
    std::string formula;  // verbatim
    std::optional<std::pair<int, Slope>> when;  // case slot and value
    Slope beta;
    std::vector<RuleEntry> triple;
};

struct InapplicableRule : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RuleVariant {
    bool reading_a = false;      // duplicated heading read as alpha1 = 1/3
    bool printed_a2m2 = false;   // l2, alpha2 = -2 as printed
    bool printed_a1mh = false;   // l2, alpha1 = -1/2 as printed
    std::string name() const;
    static std::vector<RuleVariant> all_reported();
};

const std::vector<ReductionRule>& reduction_rules();  // every rule and variant
std::vector<ReductionRule> active_rules(const RuleVariant& v);
Instruction reduce_to_m3(const Instruction& x, const ReductionRule& r);

struct LSets {
    std::vector<FamilyRow> l, l_minus1, l_half, l_two;
};
LSets rebuild_l_sets(const RuleVariant& v = {});

// ---- regeneration ----

struct RegenClass {
    FamilyRow rep;
    std::vector<size_t> table_rows;  // indices into TableData::rows
    bool covered = false;            // specialization of a listed family with the same slopes
    int table = 0;                   // attributed table
};

struct Pipeline {
    size_t members = 0, strata = 0;
    std::vector<FamilyRow> rows;
    std::vector<RegenClass> classes;
};

Pipeline run_m5_pipeline(const TableData& t, const RuleVariant& v = {});
Pipeline run_m4_pipeline(const TableData& t);
// pipeline rows with the default variant, cached
const std::vector<FamilyRow>& regenerated_rows(Manifold m);

struct TableCount {
    int table = 0;
    size_t rows = 0, classes = 0;
    std::vector<std::string> diffs;
};

struct H1Check {
    std::string where;
    std::string table_h1, chain_h1;
    bool ok = true;
};

struct VerifyReport {
    std::vector<std::pair<std::string, size_t>> variant_diffs;
    std::string chosen_variant;
    std::vector<TableCount> counts;
    std::vector<std::string> notes;
    std::vector<H1Check> h1;
    std::vector<std::string> load_warnings;

    bool tables_match() const;
    bool h1_match() const;
    bool ok() const { return tables_match() && h1_match(); }
    nlohmann::json to_json() const;
};

VerifyReport verify_tables();

// ---- atlas and the distance audit ----

// deterministic parameter grid, keeping instances whose regenerated slope set is the row's
std::vector<Instruction> sample_instances(const TableRow& row, size_t n);

struct AtlasEntry {
    size_t row = 0;
    Instruction instance;  // cusp slot Empty
    int cusp = 4;
    SlopeSet eslopes;
};

std::vector<AtlasEntry> build_atlas();
nlohmann::json export_atlas();

struct DistancePair {
    size_t entry = 0;
    Slope a, b;
    Int distance = 0;
    bool lens_a = false, toroidal_a = false, lens_b = false, toroidal_b = false;
    bool lens_and_toroidal() const { return (lens_a && toroidal_b) || (lens_b && toroidal_a); }
};

struct FlashReport {
    size_t entries = 0;
    std::vector<DistancePair> distance8, distance4;
    size_t max_m5 = 0, max_m4 = 0;
    std::vector<std::string> reducible;
    // reducible entries whose exterior has H1 = Z, i.e. could be a knot exterior in S^3
    std::vector<std::string> reducible_knot_like;
    bool only_known_pair = true;  // the single distance-4 pair claimed for the chain-link fillings

    bool no_distance8() const { return distance8.empty(); }
    bool distance4_ok() const;
    bool maxima_ok() const { return max_m5 == 5 && max_m4 == 6; }
    bool no_reducible() const { return reducible.empty(); }
    bool ok() const { return no_distance8() && distance4_ok() && maxima_ok() && no_reducible(); }
    nlohmann::json to_json() const;
};

FlashReport check_flash();

}  // namespace fivechain
