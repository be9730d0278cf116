#include "fivechain/classify.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace fivechain {

const char* embedded_tables_json();  // generated at build time

namespace {

const Slope kM1 = Slope::of(-1);
const Slope kM2 = Slope::of(-2);

std::vector<Slope> concat(std::initializer_list<const std::vector<Slope>*> parts) {
    std::vector<Slope> r;
    for (auto* p : parts) r.insert(r.end(), p->begin(), p->end());
    return r;
}

// slopes a hyperbolic, non-factoring instruction never carries
const std::vector<Slope>& excluded_m5() {
    static const auto v = concat({&values_one(), &values_minus_one()});
    return v;
}
const std::vector<Slope>& excluded_m4() {
    static const auto v = concat({&m4_base_values(), &m4_minus_one_values()});
    return v;
}
const std::vector<Slope>& excluded(Manifold m) { return m == Manifold::M5 ? excluded_m5() : excluded_m4(); }

int cusp_slot(Manifold m) { return m == Manifold::M5 ? 4 : 3; }

bool numeric_less(const Slope& a, const Slope& b) {
    if (a.is_inf() != b.is_inf()) return b.is_inf();
    if (a.is_inf()) return false;
    return a.num() * b.den() < b.num() * a.den();
}

std::string set_str(const std::set<Slope>& s) {
    std::vector<Slope> v(s.begin(), s.end());
    std::sort(v.begin(), v.end(), numeric_less);
    std::string r = "{";
    for (size_t i = 0; i < v.size(); ++i) r += (i ? "," : "") + v[i].str();
    return r + "}";
}

std::string row_str(const FamilyRow& r) { return r.family.str() + " " + set_str(r.betas); }

// rotation carrying slot c to the cusp slot
SlotMap rotation_to_cusp(int n, int c) {
    SlotMap r = SlotMap::identity(n);
    for (int i = 0; i < n; ++i) r.src[i] = ((i + c - (n - 1)) % n + n) % n;
    return r;
}

Instruction with_slot(Instruction x, int i, const Slope& s) {
    x[i] = s;
    return x;
}

}  // namespace

// ---- families ----

int Family::free_count() const {
    return static_cast<int>(std::count(slots.begin(), slots.end(), std::nullopt));
}

bool Family::contains(const Family& o) const {
    for (size_t i = 0; i < slots.size(); ++i)
        if (slots[i] && slots[i] != o.slots[i]) return false;
    return true;
}

std::optional<Family> Family::intersect(const Family& o) const {
    Family r;
    for (size_t i = 0; i < slots.size(); ++i) {
        if (!slots[i]) r.slots.push_back(o.slots[i]);
        else if (!o.slots[i] || slots[i] == o.slots[i]) r.slots.push_back(slots[i]);
        else return std::nullopt;
    }
    return r;
}

bool Family::matches(const Instruction& x) const {
    for (size_t i = 0; i < slots.size(); ++i) {
        const auto& v = x[static_cast<int>(i)];
        if (slots[i]) {
            if (v != *slots[i]) return false;
        } else if (!v.is_finite()) {
            return false;
        }
    }
    return true;
}

std::string Family::str() const {
    std::string r = "(";
    for (size_t i = 0; i < slots.size(); ++i) r += (i ? "," : "") + (slots[i] ? slots[i]->str() : std::string("*"));
    return r + ")";
}

Int eval_linear(const std::string& expr, const std::map<char, Int>& vars) {
    Int total = 0;
    size_t i = 0;
    auto fail = [&] { throw ParseError("bad parameter expression '" + expr + "'"); };
    if (expr.empty()) fail();
    while (i < expr.size()) {
        int sign = 1;
        if (expr[i] == '+' || expr[i] == '-') {
            sign = expr[i] == '-' ? -1 : 1;
            ++i;
        } else if (i != 0) {
            fail();
        }
        Int coef = 1;
        bool digits = false;
        if (i < expr.size() && std::isdigit(static_cast<unsigned char>(expr[i]))) {
            coef = 0;
            while (i < expr.size() && std::isdigit(static_cast<unsigned char>(expr[i]))) {
                coef = coef * 10 + (expr[i] - '0');
                ++i;
                digits = true;
            }
        }
        Int term = coef;
        if (i < expr.size() && std::isalpha(static_cast<unsigned char>(expr[i]))) {
            auto it = vars.find(expr[i]);
            if (it == vars.end()) throw ParseError(std::string("unbound parameter '") + expr[i] + "'");
            term *= it->second;
            ++i;
        } else if (!digits) {
            fail();
        }
        total += sign * term;
    }
    return total;
}

// ---- tables ----

std::set<Slope> TableRow::betas() const {
    std::set<Slope> r;
    for (auto& e : extras) r.insert(e.beta);
    return r;
}

std::string TableRow::alpha_str() const {
    std::string r = "(";
    for (size_t i = 0; i < alpha.size(); ++i) r += (i ? "," : "") + alpha[i];
    return r + ")";
}

namespace {

nlohmann::json substitute(const nlohmann::json& j, const std::map<char, Int>& vars) {
    if (j.is_string()) {
        const auto& s = j.get_ref<const std::string&>();
        return int_to_json(eval_linear(s, vars));
    }
    if (j.is_array()) {
        nlohmann::json r = nlohmann::json::array();
        for (auto& e : j) r.push_back(substitute(e, vars));
        return r;
    }
    if (j.is_object()) {
        nlohmann::json r = nlohmann::json::object();
        for (auto& [k, v] : j.items())
            r[k] = (v.is_object() || k == "fibers" || k == "glue" || k == "monodromy") ? substitute(v, vars) : v;
        return r;
    }
    return j;
}

}  // namespace

Descriptor TableRow::descriptor(size_t k, const std::vector<Slope>& a) const {
    std::map<char, Int> vars;
    for (size_t i = 0; i < param.size(); ++i) {
        if (param[i].empty()) continue;
        if (i >= a.size() || !a[i].is_finite()) throw std::invalid_argument("descriptor: parameter slot is not finite");
        vars[param[i][0]] = a[i].num();
        vars[param[i][2]] = a[i].den();
    }
    return descriptor_from_json(substitute(extras.at(k).descriptor, vars));
}

namespace {

TableData parse_tables(const std::string& text) {
    TableData t;
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw TableDataError(std::string("table data: ") + e.what());
    }
    if (!doc.is_object() || doc.value("version", 0) != 1) throw TableDataError("table data: unsupported version");
    if (!doc.contains("rows") || !doc["rows"].is_array()) throw TableDataError("table data: rows missing");
    for (auto& jr : doc.at("rows")) {
        TableRow r;
        r.table = jr.at("table").get<int>();
        r.group = jr.at("group").get<std::string>();
        r.manifold = jr.at("manifold").get<std::string>() == "M4" ? Manifold::M4 : Manifold::M5;
        for (auto& a : jr.at("alpha")) {
            auto s = a.get<std::string>();
            r.alpha.push_back(s);
            bool named = std::any_of(s.begin(), s.end(), [](char c) { return std::isalpha(static_cast<unsigned char>(c)); });
            if (named && s != "inf") {
                if (s.size() != 3 || s[1] != '/') throw TableDataError("table data: parameter slot '" + s + "'");
                r.param.push_back(s);
                r.family.slots.push_back(std::nullopt);
            } else {
                r.param.push_back("");
                r.family.slots.push_back(parse_slope(s));
            }
        }
        if (static_cast<int>(r.alpha.size()) != cusp_slot(r.manifold))
            throw TableDataError("table data: row " + r.group + " has the wrong number of slots");
        for (auto& je : jr.at("extras"))
            r.extras.push_back({parse_slope(je.at("beta").get<std::string>()), je.value("label", ""),
                                je.value("tex", ""), je.at("descriptor")});
        t.rows.push_back(std::move(r));
    }

    for (auto& r : t.rows) {
        std::vector<Slope> sample;
        for (size_t i = 0; i < r.alpha.size(); ++i) sample.push_back(r.family.slots[i] ? *r.family.slots[i] : Slope::of(7, 3));
        for (size_t k = 0; k < r.extras.size(); ++k) {
            Descriptor d = r.descriptor(k, sample);
            Int det = d.glue.det();
            bool glued = d.shape == Shape::Union || d.shape == Shape::SelfGlued;
            if (glued && det != -1)
                t.warnings.push_back("row " + r.group + " " + r.alpha_str() + ": gluing " + to_string(d) +
                                     " has determinant " + det.str());
            if (d.shape == Shape::TorusBundle && det != 1 && det != -1)
                t.warnings.push_back("row " + r.group + ": monodromy determinant " + det.str());
        }
        if (r.parametric()) continue;
        auto full = sample;
        full.push_back(Slope::empty());
        Instruction x(r.manifold, full);
        if (r.manifold == Manifold::M5) {
            if (factors_through_m4(x)) t.warnings.push_back("row " + r.group + " " + r.alpha_str() + " factors through M4");
            else if (exceptional_m5(x)) t.warnings.push_back("row " + r.group + " " + r.alpha_str() + " is exceptional");
        } else {
            if (factors_through_m3(m4_to_m5(x)))
                t.warnings.push_back("row " + r.group + " " + r.alpha_str() + " factors through M3");
            else if (exceptional_m4(x)) t.warnings.push_back("row " + r.group + " " + r.alpha_str() + " is exceptional");
        }
    }
    return t;
}

}  // namespace

TableData load_tables(const std::string& text) {
    try {
        return parse_tables(text);
    } catch (const nlohmann::json::exception& e) {
        throw TableDataError(std::string("table data: ") + e.what());
    } catch (const ParseError& e) {
        throw TableDataError(std::string("table data: ") + e.what());
    }
}

const TableData& tables() {
    static const TableData t = [] {
        if (const char* path = std::getenv("FIVECHAIN_TABLES"); path && *path) {
            std::ifstream in(path);
            if (!in) throw TableDataError(std::string("cannot read FIVECHAIN_TABLES=") + path);
            std::stringstream ss;
            ss << in.rdbuf();
            return load_tables(ss.str());
        }
        return load_tables(embedded_tables_json());
    }();
    return t;
}

std::vector<FamilyRow> table_family_rows(const TableData& t, Manifold m) {
    std::vector<FamilyRow> r;
    for (auto& row : t.rows)
        if (row.manifold == m) r.push_back({row.family, row.betas()});
    return r;
}

// ---- slope sets ----

std::set<Slope> SlopeSet::values() const {
    std::set<Slope> r;
    for (auto& s : slopes) r.insert(s.slope);
    return r;
}

std::string SlopeSet::str() const {
    std::string r;
    for (auto& s : slopes) r += (r.empty() ? "" : " ") + s.slope.str();
    return r;
}

nlohmann::json SlopeSet::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (auto& s : slopes) {
        nlohmann::json e = {{"slope", s.slope.str()}, {"source", s.source}, {"descriptor", fivechain::to_json(s.descriptor)}};
        try {
            e["h1"] = first_homology(s.descriptor).str();
        } catch (const NotClosed&) {
        }
        arr.push_back(e);
    }
    return {{"manifold", to_string(manifold)}, {"cusp", cusp}, {"count", slopes.size()}, {"slopes", arr}};
}

namespace {

struct Frame {
    SlotMap g;
    Instruction y;
};

// images of x with the cusp moved to the last slot and slot 0 at -2 (M5), or the cusp fixed (M4)
std::vector<Frame> frames(const Instruction& x, int cusp) {
    std::vector<Frame> out;
    if (x.manifold == Manifold::M5) {
        for (auto& g : group_m5()) {
            if (g.src[4] != cusp) continue;
            if (g.slot(x, 0) != kM2) continue;
            out.push_back({g, g(x)});
        }
    } else {
        auto rot = rotation_to_cusp(4, cusp);
        for (auto& h : group_m4()) {
            if (h.src[3] != 3) continue;
            auto g = h.after(rot);
            out.push_back({g, g(x)});
        }
    }
    return out;
}

void check_cusp(const Instruction& x, int cusp) {
    if (cusp < 0 || cusp >= x.size()) throw std::invalid_argument("cusp index out of range");
    if (!x[cusp].is_empty()) throw CuspNotEmpty("slot " + std::to_string(cusp) + " is not Empty in " + to_string(x));
}

std::set<Slope> lookup(const std::vector<FamilyRow>& rows, const Instruction& x, int cusp) {
    std::set<Slope> r;
    int n = cusp_slot(x.manifold);
    for (auto& f : frames(x, cusp)) {
        Mob back = f.g.mats[n].inverse();
        for (auto& row : rows)
            if (row.family.matches(f.y))
                for (auto& b : row.betas) r.insert(back(b));
    }
    return r;
}

SlopeSet assemble(const Instruction& x, int cusp) {
    Manifold m = x.manifold;
    int n = cusp_slot(m);
    SlopeSet out;
    out.manifold = m;
    out.cusp = cusp;
    auto rot = rotation_to_cusp(n + 1, cusp);
    auto z = rot(x);
    std::vector<Slope> a(z.s.begin(), z.s.begin() + n);
    std::map<Slope, ExceptionalSlope> found;
    for (auto& b : m == Manifold::M5 ? values_one() : m4_base_values())
        found[b] = {b, m == Manifold::M5 ? fill_m5(a, b) : fill_m4(a, b), "formula"};
    const auto& t = tables();
    for (auto& f : frames(x, cusp)) {
        Mob back = f.g.mats[n].inverse();
        std::vector<Slope> ya(f.y.s.begin(), f.y.s.begin() + n);
        for (auto& row : t.rows) {
            if (row.manifold != m || !row.family.matches(f.y)) continue;
            for (size_t k = 0; k < row.extras.size(); ++k) {
                Slope b = back(row.extras[k].beta);
                if (!found.count(b)) found[b] = {b, row.descriptor(k, ya), "table " + row.group};
            }
        }
    }
    for (auto& [s, e] : found) out.slopes.push_back(e);
    std::sort(out.slopes.begin(), out.slopes.end(),
              [](const ExceptionalSlope& p, const ExceptionalSlope& q) { return numeric_less(p.slope, q.slope); });
    return out;
}

}  // namespace

SlopeSet exceptional_slopes_m5(const Instruction& x, int cusp) {
    if (x.manifold != Manifold::M5) throw std::invalid_argument("exceptional_slopes_m5: M5 instruction expected");
    check_cusp(x, cusp);
    if (factors_through_m4(x)) throw FactorsThroughM4(to_string(x) + " factors through M4");
    if (exceptional_m5(x)) throw ExceptionalInput(to_string(x) + " is exceptional");
    return assemble(x, cusp);
}

SlopeSet exceptional_slopes_m4(const Instruction& x, int cusp) {
    if (x.manifold != Manifold::M4) throw std::invalid_argument("exceptional_slopes_m4: M4 instruction expected");
    check_cusp(x, cusp);
    auto z = rotation_to_cusp(4, cusp)(x);
    if (factors_through_m3(m4_to_m5(z))) throw FactorsThroughM3(to_string(x) + " factors through M3");
    if (exceptional_m4(x)) throw ExceptionalInput(to_string(x) + " is exceptional");
    return assemble(x, cusp);
}

std::set<Slope> lookup_extras_m5(const std::vector<FamilyRow>& rows, const Instruction& x, int cusp) {
    return lookup(rows, x, cusp);
}

std::set<Slope> lookup_extras_m4(const std::vector<FamilyRow>& rows, const Instruction& x, int cusp) {
    return lookup(rows, x, cusp);
}

std::set<Slope> direct_exceptional_m5(const Instruction& x, int cusp) {
    std::set<Slope> r;
    for (auto& c : concat({&values_one(), &values_minus_one(), &values_minus_two()}))
        if (exceptional_m5(with_slot(x, cusp, c))) r.insert(c);
    return r;
}

std::set<Slope> direct_exceptional_m4(const Instruction& x, int cusp) {
    std::set<Slope> r;
    for (auto& c : concat({&m4_base_values(), &m4_minus_one_values(), &m4_m1_values()}))
        if (exceptional_m4(with_slot(x, cusp, c))) r.insert(c);
    return r;
}

// ---- reduction rules ----

std::string RuleVariant::name() const {
    std::vector<std::string> parts;
    parts.push_back(reading_a ? "heading read as alpha1=1/3" : "heading read as alpha2=1/3");
    if (printed_a2m2) parts.push_back("alpha2=-2 as printed");
    if (printed_a1mh) parts.push_back("alpha1=-1/2 as printed");
    std::string r;
    for (auto& p : parts) r += (r.empty() ? "" : ", ") + p;
    return r;
}

std::vector<RuleVariant> RuleVariant::all_reported() {
    return {{false, false, false}, {true, false, false}, {false, true, false}, {false, false, true}, {true, true, true}};
}

namespace {

RuleEntry C(const char* s) { return {parse_slope(s), 0, Mob::identity()}; }
RuleEntry V(int slot, long long a, long long b, long long c, long long d) { return {std::nullopt, slot, {a, b, c, d}}; }
std::optional<std::pair<int, Slope>> W(int slot, const char* v) { return std::make_pair(slot, parse_slope(v)); }

}  // namespace

const std::vector<ReductionRule>& reduction_rules() {
    static const std::vector<ReductionRule> rules = {
        {"l-1", "l-1", "", "M_3(\\alpha_1+1, \\alpha_2, \\alpha_3+2)", std::nullopt, kM1,
         {V(1, 1, 1, 0, 1), V(2, 1, 0, 0, 1), V(3, 1, 2, 0, 1)}},
        {"l1/2:a3=3", "l1/2", "", "M_3\\big(5, \\alpha_2^{-1}, \\alpha_1^{-1}+1\\big)", W(3, "3"), Slope::of(1, 2),
         {C("5"), V(2, 0, 1, 1, 0), V(1, 1, 1, 1, 0)}},
        {"l1/2:a3=3/2", "l1/2", "", "M_3\\big(-1, (1-\\alpha_2)^{-1}, 3-\\alpha_1^{-1} \\big)", W(3, "3/2"),
         Slope::of(1, 2), {C("-1"), V(2, 0, 1, -1, 1), V(1, 3, -1, 1, 0)}},
        {"l1/2:a1=1/3", "l1/2", "", "M_3\\big(2+(1-\\alpha_3)^{-1},-2, 1+(1-\\alpha_2)^{-1}\\big)", W(1, "1/3"),
         Slope::of(1, 2), {V(3, -2, 3, -1, 1), C("-2"), V(2, -1, 2, -1, 1)}},
        {"l1/2:a2=1/3", "l1/2", "", "M_3\\big(\\tfrac 73, 1+(1-\\alpha_1)^{-1}, \\alpha_3\\big)", W(2, "1/3"),
         Slope::of(1, 2), {C("7/3"), V(1, -1, 2, -1, 1), V(3, 1, 0, 0, 1)}},
        {"l1/2:a1=1/3(second)", "l1/2", "heading as printed", "M_3\\big(\\tfrac 73, 1+(1-\\alpha_1)^{-1}, \\alpha_3\\big)",
         W(1, "1/3"), Slope::of(1, 2), {C("7/3"), V(1, -1, 2, -1, 1), V(3, 1, 0, 0, 1)}},
        {"l1/2:a1=2/3", "l1/2", "", "M_3\\big(\\tfrac 23, 2+(1-\\alpha_2^{-1})^{-1}, 1+(1-\\alpha_3^{-1})^{-1}\\big)",
         W(1, "2/3"), Slope::of(1, 2), {C("2/3"), V(2, 3, -2, 1, -1), V(3, 2, -1, 1, -1)}},
        {"l1/2:a2=2/3", "l1/2", "", "M_3\\big(\\tfrac 53, 2+(1-\\alpha_1^{-1})^{-1}, (1-\\alpha_3^{-1})^{-1}\\big)",
         W(2, "2/3"), Slope::of(1, 2), {C("5/3"), V(1, 3, -2, 1, -1), V(3, 1, 0, 1, -1)}},
        {"l2:a1=-2", "l2", "", "M_3\\big(\\tfrac 72, 1-\\alpha_2^{-1}, 1+(1-\\alpha_3)^{-1}\\big)", W(1, "-2"),
         Slope::of(2), {C("7/2"), V(2, 1, -1, 1, 0), V(3, -1, 2, -1, 1)}},
        {"l2:a2=-2", "l2", "", "M_3\\big(\\tfrac 43, 1-\\alpha_1^{-1}, 3-\\alpha_3^{-1}\\big)", W(2, "-2"), Slope::of(2),
         {C("4/3"), V(1, 1, -1, 1, 0), V(3, 3, -1, 1, 0)}},
        {"l2:a2=-2(printed)", "l2", "printed", "M_3\\big(\\tfrac 43, 1-\\alpha_1^{-1}, 3-\\alpha_1^{-1}\\big)", W(2, "-2"),
         Slope::of(2), {C("4/3"), V(1, 1, -1, 1, 0), V(1, 3, -1, 1, 0)}},
        {"l2:a1=-1/2", "l2", "", "M_3\\big(3+(\\alpha_3-1)^{-1}, 1-\\alpha_2, \\tfrac 12\\big)", W(1, "-1/2"),
         Slope::of(2), {V(3, 3, -2, 1, -1), V(2, 1, -1, 0, -1), C("1/2")}},
        {"l2:a1=-1/2(printed)", "l2", "printed", "M_3\\big(2+(\\alpha_3-1)^{-1}, 1-\\alpha_1, \\tfrac 12\\big)",
         W(1, "-1/2"), Slope::of(2), {V(3, 2, -1, 1, -1), V(1, -1, 1, 0, 1), C("1/2")}},
        {"l2:a2=-1/2", "l2", "", "M_3\\big(\\tfrac 83, 1-\\alpha_1, 1+\\alpha_3^{-1}\\big)", W(2, "-1/2"), Slope::of(2),
         {C("8/3"), V(1, -1, 1, 0, 1), V(3, 1, 1, 1, 0)}},
        {"l2:a3=2/3", "l2", "", "M_3\\big(2-\\alpha_2, -\\tfrac 12,2+\\alpha_1^{-1} \\big)", W(3, "2/3"), Slope::of(2),
         {V(2, -1, 2, 0, 1), C("-1/2"), V(1, 2, 1, 1, 0)}},
        {"l2:a3=1/3", "l2", "", "M_3\\big(\\alpha_2+2, \\tfrac 13,2-\\alpha_1^{-1}\\big)", W(3, "1/3"), Slope::of(2),
         {V(2, 1, 2, 0, 1), C("1/3"), V(1, 2, -1, 1, 0)}},
    };
    return rules;
}

std::vector<ReductionRule> active_rules(const RuleVariant& v) {
    std::vector<ReductionRule> r;
    for (auto& rule : reduction_rules()) {
        bool use = rule.variant.empty();
        if (rule.id == "l1/2:a2=1/3") use = !v.reading_a;
        if (rule.id == "l1/2:a1=1/3(second)") use = v.reading_a;
        if (rule.id == "l2:a2=-2") use = !v.printed_a2m2;
        if (rule.id == "l2:a2=-2(printed)") use = v.printed_a2m2;
        if (rule.id == "l2:a1=-1/2") use = !v.printed_a1mh;
        if (rule.id == "l2:a1=-1/2(printed)") use = v.printed_a1mh;
        if (use) r.push_back(rule);
    }
    return r;
}

Instruction reduce_to_m3(const Instruction& x, const ReductionRule& r) {
    if (x.manifold != Manifold::M5 || x[0] != kM2 || x[4] != r.beta)
        throw InapplicableRule("rule " + r.id + " needs (-2,a1,a2,a3," + r.beta.str() + "), got " + to_string(x));
    if (r.when && x[r.when->first] != r.when->second)
        throw InapplicableRule("rule " + r.id + " needs slot " + std::to_string(r.when->first) + " = " +
                               r.when->second.str());
    std::vector<Slope> out;
    for (auto& e : r.triple) out.push_back(e.constant ? *e.constant : e.map(x[e.slot]));
    return Instruction(Manifold::M3, out);
}

namespace {

using Member = std::pair<Family, Slope>;

// injective placements of k pattern values into n positions
std::vector<std::vector<int>> placements(int k, int n) {
    std::set<std::vector<int>> r;
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    do r.insert(std::vector<int>(idx.begin(), idx.begin() + k));
    while (std::next_permutation(idx.begin(), idx.end()));
    return {r.begin(), r.end()};
}

// all (-2, a1, a2, a3) families on which the rule lands on an isolated M3 instruction
std::set<Member> solve_rule(const ReductionRule& r) {
    std::set<Member> out;
    for (auto& iso : m3_isolated_list()) {
        for (auto& pos : placements(static_cast<int>(iso.size()), 3)) {
            std::map<int, Slope> assign;
            bool ok = true;
            for (size_t j = 0; j < iso.size() && ok; ++j) {
                const auto& e = r.triple[pos[j]];
                if (e.constant) {
                    ok = *e.constant == iso[j];
                    continue;
                }
                Slope v = e.map.inverse()(iso[j]);
                auto [it, fresh] = assign.emplace(e.slot, v);
                if (!fresh && it->second != v) ok = false;
            }
            if (!ok) continue;
            if (r.when) {
                auto it = assign.find(r.when->first);
                if (it != assign.end() && it->second != r.when->second) continue;
                assign[r.when->first] = r.when->second;
            }
            if (std::any_of(assign.begin(), assign.end(), [](auto& kv) { return in(kv.second, excluded_m5()); })) continue;
            Family f{{kM2, std::nullopt, std::nullopt, std::nullopt}};
            for (auto& [s, v] : assign) f.slots[s] = v;
            out.insert({f, r.beta});
        }
    }
    return out;
}

const std::vector<Instruction>& l_members() {
    static const std::vector<Instruction> v = [] {
        std::vector<Instruction> r;
        for (auto t : {"(-2,1/4,3/2,4/3,1/2)", "(-2,-1/2,3,3,-1/2)", "(-2,1/3,3,1/3,-2)", "(-2,-2,1/3,3,1/3)",
                       "(-2,-1/2,-2,3/2,3/2)", "(-2,3/2,3/2,-2,-1/2)", "(-2,-2,-2,-2,-2)", "(-2,1/3,3/2,3/2,1/3)"})
            r.push_back(parse_instruction(t, Manifold::M5));
        return r;
    }();
    return v;
}

std::vector<FamilyRow> as_rows(const std::set<Member>& s) {
    std::vector<FamilyRow> r;
    for (auto& [f, b] : s) r.push_back({f, {b}});
    return r;
}

}  // namespace

LSets rebuild_l_sets(const RuleVariant& v) {
    LSets out;
    std::set<Member> lm1, lh, l2, l;
    for (auto& rule : active_rules(v)) {
        auto s = solve_rule(rule);
        auto& dst = rule.set == "l-1" ? lm1 : rule.set == "l1/2" ? lh : l2;
        dst.insert(s.begin(), s.end());
    }
    for (auto& x : l_members()) l.insert({Family{{x[0], x[1], x[2], x[3]}}, x[4]});
    out.l = as_rows(l);
    out.l_minus1 = as_rows(lm1);
    out.l_half = as_rows(lh);
    out.l_two = as_rows(l2);
    return out;
}

// ---- regeneration ----

namespace {

std::vector<FamilyRow> strata_rows(const std::set<Member>& members, size_t& nstrata) {
    std::set<Family> strata;
    for (auto& [f, b] : members) strata.insert(f);
    for (;;) {
        std::set<Family> fresh;
        std::vector<Family> cur(strata.begin(), strata.end());
        for (size_t i = 0; i < cur.size(); ++i)
            for (size_t j = i + 1; j < cur.size(); ++j)
                if (auto k = cur[i].intersect(cur[j]); k && !strata.count(*k)) fresh.insert(*k);
        if (fresh.empty()) break;
        strata.insert(fresh.begin(), fresh.end());
    }
    nstrata = strata.size();
    auto B = [&](const Family& s) {
        std::set<Slope> r;
        for (auto& [f, b] : members)
            if (f.contains(s)) r.insert(b);
        return r;
    };
    std::vector<FamilyRow> rows;
    for (auto& s : strata) {
        auto b = B(s);
        bool keep = true;
        for (auto& t : strata)
            if (t != s && t.contains(s) && B(t) == b) {
                keep = false;
                break;
            }
        if (keep) rows.push_back({s, b});
    }
    return rows;
}

const std::vector<SlotMap>& cusp_stabilizer(Manifold m) {
    static const std::vector<SlotMap> h5 = [] {
        std::vector<SlotMap> r;
        for (auto& g : group_m5())
            if (g.src[4] == 4) r.push_back(g);
        return r;
    }();
    static const std::vector<SlotMap> h4 = [] {
        std::vector<SlotMap> r;
        for (auto& g : group_m4())
            if (g.src[3] == 3) r.push_back(g);
        return r;
    }();
    return m == Manifold::M5 ? h5 : h4;
}

std::set<FamilyRow> images(const FamilyRow& row, Manifold m) {
    std::set<FamilyRow> out;
    int n = cusp_slot(m);
    for (auto& g : cusp_stabilizer(m)) {
        FamilyRow r;
        for (int i = 0; i < n; ++i) {
            const auto& v = row.family.slots[g.src[i]];
            r.family.slots.push_back(v ? std::optional<Slope>(g.mats[i](*v)) : std::nullopt);
        }
        if (m == Manifold::M5 && r.family.slots[0] != kM2) continue;
        for (auto& b : row.betas) r.betas.insert(g.mats[n](b));
        out.insert(std::move(r));
    }
    return out;
}

Pipeline classify_rows(const TableData& t, Manifold m, const std::set<Member>& members) {
    Pipeline p;
    p.members = members.size();
    p.rows = strata_rows(members, p.strata);

    std::map<FamilyRow, FamilyRow> cls_of;
    std::vector<FamilyRow> reps;
    for (auto& r : p.rows) {
        if (cls_of.count(r)) continue;
        auto ims = images(r, m);
        const auto& rep = *ims.begin();
        reps.push_back(rep);
        for (auto& x : ims) cls_of[x] = rep;
    }
    std::sort(reps.begin(), reps.end());
    reps.erase(std::unique(reps.begin(), reps.end()), reps.end());
    std::map<FamilyRow, size_t> index;
    for (auto& r : reps) {
        index[r] = p.classes.size();
        p.classes.push_back({r, {}, false, 0});
    }
    std::vector<std::pair<size_t, std::set<FamilyRow>>> table_images;
    for (size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        if (row.manifold != m) continue;
        FamilyRow key{row.family, row.betas()};
        table_images.push_back({i, images(key, m)});
        auto it = cls_of.find(key);
        if (it != cls_of.end()) p.classes[index[it->second]].table_rows.push_back(i);
    }
    for (auto& c : p.classes) {
        if (!c.table_rows.empty()) {
            c.table = t.rows[c.table_rows[0]].table;
            continue;
        }
        for (auto& im : images(c.rep, m)) {
            for (auto& [ti, tims] : table_images)
                for (auto& tim : tims)
                    if (tim.betas == im.betas && tim.family != im.family && tim.family.contains(im.family)) c.covered = true;
            if (c.covered) break;
        }
        if (m == Manifold::M5) c.table = c.rep.betas.size() >= 2 ? 1 : c.rep.family.free_count() > 0 ? 2 : 3;
        else c.table = c.rep.betas.size() >= 2 ? 5 : 6;
    }
    return p;
}

std::set<Member> m5_members(const RuleVariant& v) {
    std::set<Member> members;
    for (auto& rule : active_rules(v)) {
        auto s = solve_rule(rule);
        members.insert(s.begin(), s.end());
    }
    for (auto& x : l_members()) members.insert({Family{{x[0], x[1], x[2], x[3]}}, x[4]});
    return members;
}

std::set<Member> m4_members() {
    std::set<Member> members;
    for (auto& h : cusp_stabilizer(Manifold::M4)) {
        for (auto& b : m4_minus_one_values()) {
            if (h.mats[3](b) != kM1) continue;
            // blowing down slot 3 adds one to slots 0 and 2
            std::vector<RuleEntry> ent;
            for (int i = 0; i < 3; ++i)
                ent.push_back({std::nullopt, h.src[i], Mob::shift(i == 1 ? 0 : 1) * h.mats[i]});
            for (auto& iso : m3_isolated_list()) {
                for (auto& pos : placements(static_cast<int>(iso.size()), 3)) {
                    std::map<int, Slope> assign;
                    bool ok = true;
                    for (size_t j = 0; j < iso.size() && ok; ++j) {
                        const auto& e = ent[pos[j]];
                        Slope v = e.map.inverse()(iso[j]);
                        auto [it, fresh] = assign.emplace(e.slot, v);
                        if (!fresh && it->second != v) ok = false;
                    }
                    if (!ok) continue;
                    if (std::any_of(assign.begin(), assign.end(), [](auto& kv) { return in(kv.second, excluded_m4()); }))
                        continue;
                    Family f{{std::nullopt, std::nullopt, std::nullopt}};
                    for (auto& [s, v] : assign) f.slots[s] = v;
                    members.insert({f, b});
                }
            }
        }
    }
    auto m1 = parse_instruction("(-2,-2,-2,-2)", Manifold::M4);
    for (auto& g : group_m4()) {
        auto x = g(m1);
        if (in(x[0], excluded_m4()) || in(x[1], excluded_m4()) || in(x[2], excluded_m4())) continue;
        members.insert({Family{{x[0], x[1], x[2]}}, x[3]});
    }
    return members;
}

std::vector<TableCount> count_tables(const TableData& t, const Pipeline& p, std::vector<int> ids) {
    std::vector<TableCount> out;
    for (int id : ids) {
        TableCount c;
        c.table = id;
        for (size_t i = 0; i < t.rows.size(); ++i) {
            if (t.rows[i].table != id) continue;
            ++c.rows;
            bool found = false;
            for (auto& k : p.classes)
                if (std::count(k.table_rows.begin(), k.table_rows.end(), i)) found = true;
            if (!found)
                c.diffs.push_back("missing: row " + t.rows[i].group + " " + t.rows[i].alpha_str() + " " +
                                  set_str(t.rows[i].betas()) + " is not regenerated");
        }
        for (auto& k : p.classes) {
            if (k.table != id) continue;
            if (k.table_rows.empty() && k.covered) continue;
            ++c.classes;
            if (k.table_rows.empty()) c.diffs.push_back("unlisted: class " + row_str(k.rep));
            if (k.table_rows.size() > 1) {
                std::string s = "duplicate: rows";
                for (auto i : k.table_rows) s += " " + t.rows[i].group + t.rows[i].alpha_str();
                c.diffs.push_back(s + " are one class");
            }
        }
        if (c.rows != c.classes && c.diffs.empty())
            c.diffs.push_back("count: " + std::to_string(c.classes) + " classes for " + std::to_string(c.rows) + " rows");
        out.push_back(std::move(c));
    }
    return out;
}

size_t total_diffs(const std::vector<TableCount>& cs) {
    size_t n = 0;
    for (auto& c : cs) n += c.diffs.size();
    return n;
}

}  // namespace

Pipeline run_m5_pipeline(const TableData& t, const RuleVariant& v) { return classify_rows(t, Manifold::M5, m5_members(v)); }

Pipeline run_m4_pipeline(const TableData& t) { return classify_rows(t, Manifold::M4, m4_members()); }

const std::vector<FamilyRow>& regenerated_rows(Manifold m) {
    static const std::vector<FamilyRow> r5 = [] {
        size_t n;
        return strata_rows(m5_members({}), n);
    }();
    static const std::vector<FamilyRow> r4 = [] {
        size_t n;
        return strata_rows(m4_members(), n);
    }();
    return m == Manifold::M5 ? r5 : r4;
}

bool VerifyReport::tables_match() const {
    for (auto& c : counts)
        if (!c.diffs.empty() || c.rows != c.classes) return false;
    return true;
}

bool VerifyReport::h1_match() const {
    return std::all_of(h1.begin(), h1.end(), [](const H1Check& c) { return c.ok; });
}

nlohmann::json VerifyReport::to_json() const {
    nlohmann::json j;
    nlohmann::json vs = nlohmann::json::array();
    for (auto& [n, d] : variant_diffs) vs.push_back({{"variant", n}, {"diffs", d}});
    j["variants"] = vs;
    j["chosen_variant"] = chosen_variant;
    nlohmann::json cs = nlohmann::json::array();
    for (auto& c : counts)
        cs.push_back({{"table", c.table}, {"rows", c.rows}, {"classes", c.classes}, {"diffs", c.diffs},
                      {"match", c.diffs.empty() && c.rows == c.classes}});
    j["tables"] = cs;
    nlohmann::json hs = nlohmann::json::array();
    for (auto& h : h1)
        if (!h.ok) hs.push_back({{"where", h.where}, {"table", h.table_h1}, {"chain", h.chain_h1}});
    j["h1_checked"] = h1.size();
    j["h1_mismatches"] = hs;
    j["notes"] = notes;
    j["load_warnings"] = load_warnings;
    j["tables_match"] = tables_match();
    j["h1_match"] = h1_match();
    j["ok"] = ok();
    return j;
}

VerifyReport verify_tables() {
    const auto& t = tables();
    VerifyReport rep;
    rep.load_warnings = t.warnings;

    std::vector<TableCount> best;
    size_t best_n = SIZE_MAX;
    Pipeline best_p;
    for (auto& v : RuleVariant::all_reported()) {
        auto p = run_m5_pipeline(t, v);
        auto cs = count_tables(t, p, {1, 2, 3, 4});
        size_t n = total_diffs(cs);
        rep.variant_diffs.push_back({v.name(), n});
        if (n < best_n) {
            best_n = n;
            best = cs;
            best_p = p;
            rep.chosen_variant = v.name();
        }
    }
    auto p4 = run_m4_pipeline(t);
    rep.counts = best;
    for (auto& c : count_tables(t, p4, {5, 6})) rep.counts.push_back(c);

    rep.notes.push_back("M5: " + std::to_string(best_p.members) + " l-set members, " + std::to_string(best_p.strata) +
                        " strata, " + std::to_string(best_p.rows.size()) + " rows, " +
                        std::to_string(best_p.classes.size()) + " classes");
    rep.notes.push_back("M4: " + std::to_string(p4.members) + " members, " + std::to_string(p4.strata) + " strata, " +
                        std::to_string(p4.rows.size()) + " rows, " + std::to_string(p4.classes.size()) + " classes");
    size_t covered = 0;
    for (auto* p : {&best_p, &p4})
        for (auto& c : p->classes)
            if (c.table_rows.empty() && c.covered) ++covered;
    rep.notes.push_back(std::to_string(covered) +
                        " regenerated classes are specializations of listed families with the same slopes");
    // listed rows that are themselves specializations of another listed family
    for (size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        auto ims = images({r.family, r.betas()}, r.manifold);
        bool cov = false;
        for (size_t j = 0; j < t.rows.size() && !cov; ++j) {
            if (j == i || t.rows[j].manifold != r.manifold || !t.rows[j].parametric()) continue;
            for (auto& tim : images({t.rows[j].family, t.rows[j].betas()}, r.manifold))
                for (auto& im : ims)
                    if (tim.betas == im.betas && tim.family != im.family && tim.family.contains(im.family)) cov = true;
        }
        if (cov) rep.notes.push_back("row " + r.group + " " + r.alpha_str() + " is a specialization of a parametric row");
    }

    // displayed descriptors against the surgery presentation
    for (auto& r : t.rows) {
        std::vector<std::vector<Slope>> inst;
        if (r.parametric()) {
            for (auto& x : sample_instances(r, 3)) inst.push_back({x.s.begin(), x.s.begin() + cusp_slot(r.manifold)});
        } else {
            std::vector<Slope> a;
            for (auto& s : r.family.slots) a.push_back(*s);
            inst.push_back(a);
        }
        for (auto& a : inst)
            for (size_t k = 0; k < r.extras.size(); ++k) {
                auto full = a;
                full.push_back(r.extras[k].beta);
                Instruction x(r.manifold, full);
                H1Check h;
                h.where = "row " + r.group + " " + to_string(x);
                h.table_h1 = first_homology(r.descriptor(k, a)).str();
                h.chain_h1 = (r.manifold == Manifold::M5 ? chain_homology_m5(x) : chain_homology_m4(x)).str();
                h.ok = h.table_h1 == h.chain_h1;
                rep.h1.push_back(h);
            }
    }
    return rep;
}

// ---- atlas ----

std::vector<Instruction> sample_instances(const TableRow& row, size_t n) {
    Manifold m = row.manifold;
    int c = cusp_slot(m);
    auto build = [&](const std::vector<Slope>& params) {
        std::vector<Slope> s;
        size_t k = 0;
        for (auto& v : row.family.slots) s.push_back(v ? *v : params[k++]);
        s.push_back(Slope::empty());
        return Instruction(m, s);
    };
    if (!row.parametric()) return {build({})};

    std::vector<Slope> values;
    for (long long den = 1; den <= 6; ++den)
        for (long long num = -24; num <= 24; ++num) {
            if (std::gcd(num, den) != 1) continue;
            auto s = Slope::of(num, den);
            if (!in(s, excluded(m))) values.push_back(s);
        }
    std::stable_sort(values.begin(), values.end(), [](const Slope& a, const Slope& b) {
        auto w = [](const Slope& s) { return boost::multiprecision::abs(s.num()) + s.den(); };
        return w(a) < w(b);
    });

    std::vector<Instruction> out;
    auto consider = [&](const std::vector<Slope>& params) {
        auto x = build(params);
        if (m == Manifold::M5) {
            if (factors_through_m4(x) || exceptional_m5(x)) return;
        } else if (factors_through_m3(m4_to_m5(x)) || exceptional_m4(x)) {
            return;
        }
        if (lookup(regenerated_rows(m), x, c) != row.betas()) return;
        out.push_back(x);
    };
    int nfree = row.family.free_count();
    if (nfree == 1) {
        for (size_t i = 0; i < values.size() && out.size() < n; ++i) consider({values[i]});
    } else {
        for (size_t s = 0; s < 2 * values.size() && out.size() < n; ++s)
            for (size_t i = 0; i <= s && out.size() < n; ++i) {
                size_t j = s - i;
                if (i < values.size() && j < values.size()) consider({values[i], values[j]});
            }
    }
    return out;
}

std::vector<AtlasEntry> build_atlas() {
    std::vector<AtlasEntry> out;
    const auto& t = tables();
    for (size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        auto inst = sample_instances(r, 1);
        if (inst.empty()) continue;
        AtlasEntry e;
        e.row = i;
        e.instance = inst[0];
        e.cusp = cusp_slot(r.manifold);
        e.eslopes = r.manifold == Manifold::M5 ? exceptional_slopes_m5(e.instance, e.cusp)
                                                : exceptional_slopes_m4(e.instance, e.cusp);
        out.push_back(std::move(e));
    }
    return out;
}

nlohmann::json export_atlas() {
    const auto& t = tables();
    nlohmann::json j = nlohmann::json::object();
    for (auto& e : build_atlas()) {
        const auto& r = t.rows[e.row];
        nlohmann::json slopes = nlohmann::json::array();
        for (auto& s : e.eslopes.slopes) {
            nlohmann::json se = {{"slope", s.slope.str()},
                                 {"source", s.source},
                                 {"descriptor", to_json(s.descriptor)},
                                 {"normal_form", to_string(normalize(s.descriptor))},
                                 {"h1", first_homology(s.descriptor).str()}};
            slopes.push_back(se);
        }
        nlohmann::json d4 = nlohmann::json::array();
        for (size_t a = 0; a < e.eslopes.slopes.size(); ++a)
            for (size_t b = a + 1; b < e.eslopes.slopes.size(); ++b) {
                auto d = distance(e.eslopes.slopes[a].slope, e.eslopes.slopes[b].slope);
                if (d >= 4) d4.push_back({e.eslopes.slopes[a].slope.str(), e.eslopes.slopes[b].slope.str(), int_to_json(d)});
            }
        j[to_string(dihedral_class_rep(e.instance))] = {{"table", r.table},
                                                         {"group", r.group},
                                                         {"alpha", r.alpha_str()},
                                                         {"instance", to_string(e.instance)},
                                                         {"cusp", e.cusp},
                                                         {"e_tau", e.eslopes.slopes.size()},
                                                         {"slopes", slopes},
                                                         {"pairs_at_distance_4_or_more", d4}};
    }
    return {{"version", 1}, {"atlas", j}};
}

bool FlashReport::distance4_ok() const {
    bool seen = false;
    for (auto& p : distance4) {
        if (p.lens_and_toroidal()) return false;
        std::set<Slope> ab{p.a, p.b};
        if (ab == std::set<Slope>{Slope::of(-1), Slope::of(3)}) seen = true;
    }
    return seen;
}

nlohmann::json FlashReport::to_json() const {
    auto pairs = [](const std::vector<DistancePair>& v) {
        nlohmann::json a = nlohmann::json::array();
        for (auto& p : v)
            a.push_back({{"entry", p.entry},
                         {"slopes", {p.a.str(), p.b.str()}},
                         {"distance", int_to_json(p.distance)},
                         {"lens", {p.lens_a, p.lens_b}},
                         {"toroidal", {p.toroidal_a, p.toroidal_b}},
                         {"lens_and_toroidal", p.lens_and_toroidal()}});
        return a;
    };
    return {{"entries", entries},
            {"no_distance_8", no_distance8()},
            {"distance_4_not_lens_and_toroidal", distance4_ok()},
            {"max_e_tau", {{"M5", max_m5}, {"M4", max_m4}}},
            {"max_e_tau_ok", maxima_ok()},
            {"no_reducible_candidate", no_reducible()},
            {"distance_8_pairs", pairs(distance8)},
            {"distance_4_pairs", pairs(distance4)},
            {"reducible", reducible},
            {"reducible_with_exterior_h1_z", reducible_knot_like},
            {"single_distance_4_pair", only_known_pair},
            {"ok", ok()}};
}

FlashReport check_flash() {
    FlashReport rep;
    auto atlas = build_atlas();
    const auto& t = tables();
    rep.entries = atlas.size();
    for (size_t k = 0; k < atlas.size(); ++k) {
        const auto& e = atlas[k];
        const auto& row = t.rows[e.row];
        auto& mx = row.manifold == Manifold::M5 ? rep.max_m5 : rep.max_m4;
        mx = std::max(mx, e.eslopes.slopes.size());
        const auto& sl = e.eslopes.slopes;
        for (auto& s : sl)
            if (normalize(s.descriptor).reducible_candidate) {
                auto h = row.manifold == Manifold::M5 ? chain_homology_m5(e.instance) : chain_homology_m4(e.instance);
                std::string what = to_string(e.instance) + " slope " + s.slope.str() + " (exterior H1 " + h.str() + ")";
                rep.reducible.push_back(what);
                if (h.rank == 1 && h.torsion.empty()) rep.reducible_knot_like.push_back(what);
            }
        for (size_t a = 0; a < sl.size(); ++a)
            for (size_t b = a + 1; b < sl.size(); ++b) {
                DistancePair p;
                p.entry = k;
                p.a = sl[a].slope;
                p.b = sl[b].slope;
                p.distance = distance(p.a, p.b);
                if (p.distance != 4 && p.distance != 8) continue;
                p.lens_a = is_lens_like(sl[a].descriptor);
                p.lens_b = is_lens_like(sl[b].descriptor);
                p.toroidal_a = is_toroidal(sl[a].descriptor);
                p.toroidal_b = is_toroidal(sl[b].descriptor);
                (p.distance == 8 ? rep.distance8 : rep.distance4).push_back(p);
                if (p.distance == 4 && !(row.manifold == Manifold::M4 && row.alpha_str() == "(-2,-1/2,-2)"))
                    rep.only_known_pair = false;
            }
    }
    return rep;
}

}  // namespace fivechain
