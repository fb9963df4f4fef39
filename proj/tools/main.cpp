#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tailforge/json_io.hpp"

using namespace tailforge;

namespace {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::vector<long> parse_grid(const std::string& text) {
    std::vector<long> grid;
    if (text.find(':') != std::string::npos) {
        // start:stop:factor, geometric
        double start, stop, factor;
        char c1, c2;
        std::istringstream in(text);
        if (!(in >> start >> c1 >> stop >> c2 >> factor) || c1 != ':' ||
            c2 != ':' || factor <= 1.0 || start < 1.0)
            throw parameter_domain_error("bad grid spec: " + text);
        double x = start;
        while (x <= stop + 0.5) {
            long n = std::lround(x);
            if (grid.empty() || n > grid.back()) grid.push_back(n);
            x *= factor;
        }
    } else {
        std::istringstream in(text);
        std::string tok;
        while (std::getline(in, tok, ',')) {
            if (tok.empty()) continue;
            grid.push_back(std::stol(tok));
        }
    }
    if (grid.empty()) throw parameter_domain_error("empty grid: " + text);
    return grid;
}

std::vector<double> read_number_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parameter_domain_error("cannot open file: " + path);
    std::vector<double> vals;
    double x;
    while (in >> x) vals.push_back(x);
    if (vals.empty()) throw parameter_domain_error("no numbers in " + path);
    return vals;
}

struct Options {
    std::string family;
    double c = 1.0;
    double beta = 2.0;
    double lambda = 1.0;
    double t = 1.0;
    double q = 0.5;
    std::string list_file;
    std::string alpha_file;
    long n = -1;
    std::string grid;
    double tol = 1e-6;
    double residual_tol = -1.0;
    long samples = 100000;
    std::uint64_t seed = 12345;
    std::string format = "json";
    std::string out;
    std::string config;
};

void apply_config(Options& o, const CLI::App& cmd) {
    if (o.config.empty()) return;
    std::ifstream in(o.config);
    if (!in) throw parameter_domain_error("cannot open config: " + o.config);
    json j;
    in >> j;
    static const std::vector<std::string> known = {
        "sequence", "n",      "grid", "tol",    "residual_tol",
        "samples",  "seed",   "format", "out"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw parameter_domain_error("unknown config field: " + it.key());
    }
    auto unset = [&](const char* flag) { return cmd.count(flag) == 0; };
    if (j.contains("sequence") && unset("--family")) {
        auto seq = sequence_from_json(j["sequence"]);  // validates
        o.family = seq->family();
        json p = j["sequence"].value("params", json::object());
        if (p.contains("c")) o.c = p["c"];
        if (p.contains("beta")) o.beta = p["beta"];
        if (p.contains("lambda")) o.lambda = p["lambda"];
        if (p.contains("t")) o.t = p["t"];
        if (p.contains("q")) o.q = p["q"];
    }
    if (j.contains("n") && unset("--n")) o.n = j["n"];
    if (j.contains("grid") && unset("--grid")) o.grid = j["grid"];
    if (j.contains("tol") && unset("--tol")) o.tol = j["tol"];
    if (j.contains("residual_tol") && unset("--residual-tol"))
        o.residual_tol = j["residual_tol"];
    if (j.contains("samples") && unset("--samples")) o.samples = j["samples"];
    if (j.contains("seed") && unset("--seed"))
        o.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("format") && unset("--format")) o.format = j["format"];
    if (j.contains("out") && unset("--out")) o.out = j["out"];
}

SequencePtr build_sequence(const Options& o) {
    if (o.family == "polynomial")
        return std::make_shared<PolynomialSeq>(o.c, o.beta);
    if (o.family == "stretched-exp")
        return std::make_shared<StretchedExpSeq>(o.c, o.beta);
    if (o.family == "gnedin-sinh")
        return std::make_shared<GnedinSinhSeq>(o.lambda);
    if (o.family == "gnedin-cosh")
        return std::make_shared<GnedinCoshSeq>(o.lambda);
    if (o.family == "ginibre-gamma")
        return std::make_shared<GinibreGammaSeq>(o.t);
    if (o.family == "records-geom")
        return std::make_shared<RecordsGeomSeq>(o.q);
    if (o.family == "explicit-list")
        return std::make_shared<ExplicitListSeq>(read_number_file(o.list_file));
    if (o.family == "records-list")
        return std::make_shared<RecordsListSeq>(read_number_file(o.alpha_file));
    throw unsupported_family_error("unknown family: " + o.family);
}

void emit(const Options& o, const std::string& text) {
    if (o.out.empty()) {
        std::cout << text << "\n";
    } else {
        std::ofstream f(o.out);
        if (!f) throw parameter_domain_error("cannot open output: " + o.out);
        f << text << "\n";
    }
}

// explicit closed form for the four analyzed parametric cases, if any
std::optional<ExplicitAsymptotic> explicit_form(const Options& o, long n) {
    if (o.family == "polynomial") return thm4a(o.c, o.beta, n);
    if (o.family == "stretched-exp") {
        if (o.beta < 1.0) return thm4b(o.c, o.beta, n);
        if (o.beta == 1.0) return thm4c(o.c, n);
        return thm4d(o.c, o.beta, n);
    }
    return std::nullopt;
}

int cmd_saddle(const Options& o) {
    if (o.n < 0) throw parameter_domain_error("saddle: --n is required");
    auto seq = build_sequence(o);
    auto sol = solve(*seq, o.n, o.residual_tol);
    if (o.format == "csv") {
        std::string text =
            "n,s,psi,psi_prime,psi_double_prime,residual\n" +
            std::to_string(sol.n) + "," + fmt17(sol.s) + "," + fmt17(sol.psi) +
            "," + fmt17(sol.psi_prime) + "," + fmt17(sol.psi_double_prime) +
            "," + fmt17(sol.residual);
        emit(o, text);
    } else {
        json j = to_json(sol);
        j["sequence"] = sequence_to_json(*seq);
        emit(o, j.dump(2));
    }
    return 0;
}

int cmd_classify(const Options& o) {
    if (o.grid.empty()) throw parameter_domain_error("classify: --grid required");
    auto seq = build_sequence(o);
    auto rep = classify(*seq, parse_grid(o.grid));
    json j = to_json(rep);
    j["sequence"] = sequence_to_json(*seq);
    emit(o, j.dump(2));
    return rep.label == RegimeLabel::undetermined ? 4 : 0;
}

int cmd_compare(const Options& o) {
    if (o.grid.empty()) throw parameter_domain_error("compare: --grid required");
    auto seq = build_sequence(o);
    auto grid = parse_grid(o.grid);
    auto rep = classify(*seq, grid);
    if (rep.label == RegimeLabel::undetermined) {
        emit(o, to_json(rep).dump(2));
        return 4;
    }
    std::optional<double> c0;
    if (rep.c_data && rep.c_data->c0) c0 = rep.c_data->c0->value;
    auto pmf = exact_pmf(*seq, grid.back(), o.tol);

    json rows = json::array();
    std::string csv =
        "n,log_exact,log_generic,log_explicit,gap_generic,gap_explicit";
    double prev_gap = std::nan("");
    for (long n : grid) {
        double log_exact = pmf.log_p[n];
        double log_generic = estimate(*seq, n, rep.label, c0).log_point;
        auto ex = explicit_form(o, n);
        double log_explicit = ex ? ex->log_value : std::nan("");
        double gap_g = std::fabs(log_generic - log_exact);
        double gap_e = ex ? std::fabs(log_explicit - log_exact) : std::nan("");
        json row = {{"n", n},
                    {"log_exact", log_exact},
                    {"log_generic", log_generic},
                    {"gap_generic", gap_g}};
        if (ex) {
            row["log_explicit"] = log_explicit;
            row["gap_explicit"] = gap_e;
        }
        if (!std::isnan(prev_gap) && prev_gap > 0.0)
            row["gap_ratio"] = gap_g / prev_gap;
        prev_gap = gap_g;
        rows.push_back(row);
        csv += "\n" + std::to_string(n) + "," + fmt17(log_exact) + "," +
               fmt17(log_generic) + "," + fmt17(log_explicit) + "," +
               fmt17(gap_g) + "," + fmt17(gap_e);
    }
    if (o.format == "csv") {
        emit(o, csv);
    } else {
        json j = {{"sequence", sequence_to_json(*seq)},
                  {"regime", regime_name(rep.label)},
                  {"rows", rows}};
        emit(o, j.dump(2));
    }
    return 0;
}

int cmd_mc(const Options& o) {
    if (o.n < 0) throw parameter_domain_error("mc: --n is required");
    auto seq = build_sequence(o);
    auto mc = mc_tilted(*seq, o.n, o.samples, o.seed);
    if (o.format == "csv") {
        emit(o,
             "n,s,log_point_estimate,std_error_log,samples,seed,hits\n" +
                 std::to_string(mc.n) + "," + fmt17(mc.s) + "," +
                 fmt17(mc.log_point_estimate) + "," +
                 fmt17(mc.std_error_log) + "," + std::to_string(mc.samples) +
                 "," + std::to_string(mc.seed) + "," +
                 std::to_string(mc.hits));
    } else {
        json j = to_json(mc);
        j["sequence"] = sequence_to_json(*seq);
        emit(o, j.dump(2));
    }
    return 0;
}

int cmd_terms(const Options& o) {
    if (o.n < 0) throw parameter_domain_error("terms: --n is required");
    auto ex = explicit_form(o, o.n);
    if (!ex)
        throw unsupported_family_error(
            "terms: no explicit closed form for family " + o.family);
    if (o.format == "csv") {
        std::string csv = "name,value";
        for (const auto& t : ex->terms)
            csv += "\n" + t.name + "," + fmt17(t.value);
        csv += "\nlog_value," + fmt17(ex->log_value);
        emit(o, csv);
    } else {
        emit(o, to_json(*ex).dump(2));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"saddle-point analysis of infinite sums of independent "
                 "indicator variables"};
    app.require_subcommand(1);

    Options o;
    std::string cmd_name;
    std::vector<CLI::App*> cmds;
    for (const char* name :
         {"saddle", "classify", "compare", "mc", "terms"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--family", o.family);
        sub->add_option("--c", o.c);
        sub->add_option("--beta", o.beta);
        sub->add_option("--lambda", o.lambda);
        sub->add_option("--t", o.t);
        sub->add_option("--q", o.q);
        sub->add_option("--list-file", o.list_file);
        sub->add_option("--alpha-file", o.alpha_file);
        sub->add_option("--n", o.n);
        sub->add_option("--grid", o.grid);
        sub->add_option("--tol", o.tol);
        sub->add_option("--residual-tol", o.residual_tol);
        sub->add_option("--samples", o.samples);
        sub->add_option("--seed", o.seed);
        sub->add_option("--format", o.format)
            ->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--out", o.out);
        sub->add_option("--config", o.config);
        sub->callback([&cmd_name, name] { cmd_name = name; });
        cmds.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 3;
    }

    try {
        const CLI::App* active = app.get_subcommands().front();
        apply_config(o, *active);
        if (o.family.empty())
            throw parameter_domain_error("--family is required");
        if (cmd_name == "saddle") return cmd_saddle(o);
        if (cmd_name == "classify") return cmd_classify(o);
        if (cmd_name == "compare") return cmd_compare(o);
        if (cmd_name == "mc") return cmd_mc(o);
        return cmd_terms(o);
    } catch (const level_too_small_error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const no_solution_error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const cannot_estimate_error& e) {
        std::cerr << e.what() << "\n";
        return 4;
    } catch (const truncation_failure& e) {
        std::cerr << e.what() << "\n";
        return 5;
    } catch (const table_too_short_error& e) {
        std::cerr << e.what() << "\n";
        return 5;
    } catch (const transfer_invalid_error& e) {
        std::cerr << e.what() << "\n";
        return 5;
    } catch (const json::exception& e) {
        std::cerr << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 3;
    }
}
