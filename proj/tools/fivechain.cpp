// fivechain: exceptional fillings of the chain-link exteriors M3, M4, M5
#include "fivechain/classify.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace fivechain;
using nlohmann::json;

namespace {

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

bool g_json = false;

int emit(const json& j, const std::string& text, int code) {
    if (g_json) std::cout << j.dump(2) << "\n";
    else std::cout << text << (text.empty() || text.back() == '\n' ? "" : "\n");
    return code;
}

int fail(int code, const std::string& kind, const std::string& msg) {
    std::cerr << "fivechain: " << msg << "\n";
    if (g_json) std::cout << json{{"error", kind}, {"message", msg}}.dump(2) << "\n";
    return code;
}

Manifold manifold_arg(const std::string& s) {
    if (s == "m5" || s == "M5") return Manifold::M5;
    if (s == "m4" || s == "M4") return Manifold::M4;
    throw InputError("manifold must be m5 or m4, got '" + s + "'");
}

std::string read_all(const std::string& path) {
    if (path == "-") {
        std::stringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json group_json(const AbelianGroup& g) {
    json t = json::array();
    for (auto& d : g.torsion) t.push_back(int_to_json(d));
    return {{"h1", g.str()}, {"rank", g.rank}, {"torsion", t}};
}

int cmd_dist(const std::string& a, const std::string& b) {
    auto d = distance(parse_slope(a), parse_slope(b));
    return emit({{"a", parse_slope(a).str()}, {"b", parse_slope(b).str()}, {"distance", int_to_json(d)}}, d.str(), 0);
}

int cmd_orbit(const std::string& text, size_t budget) {
    auto x = parse_instruction(text, Manifold::M5);
    OrbitBudget b;
    b.max_elements = budget;
    auto r = full_orbit(x, b);
    json el = json::array();
    std::string out;
    for (auto& e : r.elements) {
        el.push_back(to_string(e));
        out += to_string(e) + "\n";
    }
    out += std::to_string(r.elements.size()) + " elements, " + (r.saturated ? "saturated" : "budget exhausted");
    return emit({{"seed", to_string(x)},
                 {"size", r.elements.size()},
                 {"saturated", r.saturated},
                 {"max_magnitude", r.max_magnitude.str()},
                 {"elements", el}},
                out, 0);
}

int cmd_eslopes(const std::string& m, const std::string& text, int cusp) {
    Manifold man = manifold_arg(m);
    auto x = parse_instruction(text, man);
    SlopeSet s = man == Manifold::M5 ? exceptional_slopes_m5(x, cusp) : exceptional_slopes_m4(x, cusp);
    auto j = s.to_json();
    j["instruction"] = to_string(x);
    return emit(j, s.str(), 0);
}

int cmd_fill(const std::string& m, const std::string& text, const std::string& slope) {
    Manifold man = manifold_arg(m);
    auto x = parse_instruction(text, man);
    int n = slot_count(man) - 1;
    if (!x[n].is_empty()) throw InputError("the filled cusp (last slot) must be Empty");
    std::vector<Slope> a(x.s.begin(), x.s.begin() + n);
    Slope b = parse_slope(slope);
    Descriptor d = man == Manifold::M5 ? fill_m5(a, b) : fill_m4(a, b);
    json j = {{"descriptor", to_json(d)}, {"text", to_string(d)}};
    std::string out = to_string(d);
    if (d.shape != Shape::WithBoundary) {
        auto n = normalize(d);
        auto h = first_homology(d);
        j["normal_form"] = to_json(n);
        j["h1"] = h.str();
        out += "\nnormal form: " + to_string(n) + "\nH1: " + h.str();
    }
    return emit(j, out, 0);
}

int cmd_homology(const std::string& path) {
    json doc;
    try {
        doc = json::parse(read_all(path));
    } catch (const json::exception& e) {
        throw InputError(std::string("descriptor json: ") + e.what());
    }
    Descriptor d = descriptor_from_json(doc);
    auto h = first_homology(d);
    auto j = group_json(h);
    j["descriptor"] = to_json(d);
    return emit(j, h.str(), 0);
}

int cmd_verify_tables() {
    auto r = verify_tables();
    std::ostringstream os;
    os << "rule variants (total diffs):\n";
    for (auto& [n, d] : r.variant_diffs) os << "  " << d << "  " << n << "\n";
    os << "chosen: " << r.chosen_variant << "\n";
    for (auto& c : r.counts) {
        os << "table " << c.table << ": " << c.rows << " rows, " << c.classes << " classes"
           << (c.diffs.empty() && c.rows == c.classes ? "  ok" : "  MISMATCH") << "\n";
        for (auto& d : c.diffs) os << "    " << d << "\n";
    }
    size_t bad = 0;
    for (auto& h : r.h1)
        if (!h.ok) {
            ++bad;
            os << "H1 mismatch: " << h.where << ": table " << h.table_h1 << ", surgery " << h.chain_h1 << "\n";
        }
    os << "H1 checks: " << r.h1.size() - bad << "/" << r.h1.size() << " agree\n";
    for (auto& n : r.notes) os << "note: " << n << "\n";
    for (auto& w : r.load_warnings) os << "data: " << w << "\n";
    os << (r.ok() ? "verified" : "mismatch");
    return emit(r.to_json(), os.str(), r.ok() ? 0 : 1);
}

int cmd_verify_flash() {
    auto r = check_flash();
    std::ostringstream os;
    os << "atlas entries: " << r.entries << "\n";
    os << "no pair at distance 8: " << (r.no_distance8() ? "true" : "false") << "\n";
    os << "distance-4 pairs never lens and toroidal: " << (r.distance4_ok() ? "true" : "false") << "\n";
    for (auto& p : r.distance4)
        os << "    entry " << p.entry << " (" << p.a.str() << ", " << p.b.str() << ") lens " << p.lens_a << "/"
           << p.lens_b << " toroidal " << p.toroidal_a << "/" << p.toroidal_b << "\n";
    os << "max e_tau M5 = " << r.max_m5 << ", M4 = " << r.max_m4 << ": " << (r.maxima_ok() ? "true" : "false") << "\n";
    os << "no reducible candidate: " << (r.no_reducible() ? "true" : "false") << "\n";
    for (auto& x : r.reducible) os << "    " << x << "\n";
    os << "reducible with exterior H1 = Z: " << r.reducible_knot_like.size() << "\n";
    os << "only M4(-2,-1/2,-2) has a distance-4 pair: " << (r.only_known_pair ? "true" : "false") << "\n";
    os << (r.ok() ? "verified" : "mismatch");
    return emit(r.to_json(), os.str(), r.ok() ? 0 : 1);
}

int cmd_export(const std::string& what, const std::string& path) {
    if (what != "atlas") throw InputError("export supports 'atlas' only");
    auto j = export_atlas();
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << j.dump(1) << "\n";
    return emit({{"written", path}, {"entries", j["atlas"].size()}}, "wrote " + std::to_string(j["atlas"].size()) +
                                                                         " entries to " + path, 0);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exceptional fillings of the chain-link exteriors M3, M4, M5"};
    app.require_subcommand(1);
    app.add_flag("--json", g_json, "emit one JSON document on stdout");

    std::string a, b, c;
    int cusp = -1;
    size_t budget = OrbitBudget{}.max_elements;

    auto* dist = app.add_subcommand("dist", "distance between two slopes");
    dist->add_option("a", a)->required();
    dist->add_option("b", b)->required();

    auto* orbit = app.add_subcommand("orbit", "orbit of an M5 instruction under the symmetry maps");
    orbit->add_option("instr", a)->required();
    orbit->add_option("--budget", budget, "element cap");

    auto* es = app.add_subcommand("eslopes", "exceptional slopes at a cusp");
    es->add_option("manifold", a)->required();
    es->add_option("instr", b)->required();
    es->add_option("--cusp", cusp)->required();

    auto* fill = app.add_subcommand("fill", "descriptor of a filling by formula");
    fill->add_option("manifold", a)->required();
    fill->add_option("instr", b)->required();
    fill->add_option("slope", c)->required();

    auto* hom = app.add_subcommand("homology", "first homology of a descriptor json file ('-' for stdin)");
    hom->add_option("file", a)->required();

    auto* ver = app.add_subcommand("verify", "verify tables | verify flash");
    ver->add_option("what", a)->required();

    auto* exp = app.add_subcommand("export", "export atlas <path>");
    exp->add_option("what", a)->required();
    exp->add_option("path", b)->required();

    for (auto* sc : {dist, orbit, es, fill, hom, ver, exp}) sc->add_flag("--json", g_json, "emit JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (dist->parsed()) return cmd_dist(a, b);
        if (orbit->parsed()) return cmd_orbit(a, budget);
        if (es->parsed()) return cmd_eslopes(a, b, cusp);
        if (fill->parsed()) return cmd_fill(a, b, c);
        if (hom->parsed()) return cmd_homology(a);
        if (ver->parsed()) {
            if (a == "tables") return cmd_verify_tables();
            if (a == "flash") return cmd_verify_flash();
            throw InputError("verify expects 'tables' or 'flash'");
        }
        if (exp->parsed()) return cmd_export(a, b);
    } catch (const FactorsThroughM4& e) {
        return fail(2, "factors_through_m4", e.what());
    } catch (const FactorsThroughM3& e) {
        return fail(2, "factors_through_m3", e.what());
    } catch (const ExceptionalInput& e) {
        return fail(2, "exceptional_input", e.what());
    } catch (const CuspNotEmpty& e) {
        return fail(2, "cusp_not_empty", e.what());
    } catch (const UnsupportedSlope& e) {
        return fail(2, "unsupported_slope", e.what());
    } catch (const NotClosed& e) {
        return fail(2, "not_closed", e.what());
    } catch (const TableDataError& e) {
        return fail(2, "table_data", e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(2, "table_data", e.what());
    } catch (const ParseError& e) {
        return fail(2, "parse_error", e.what());
    } catch (const InputError& e) {
        return fail(2, "input_error", e.what());
    } catch (const std::invalid_argument& e) {
        return fail(2, "input_error", e.what());
    }
    return fail(2, "usage", app.help());
}
