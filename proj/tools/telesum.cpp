// telesum: symbolic simplification of generic double sums, parameterized
// telescoping, and exact verification against the identity corpus.

#include "telesum/corpus.hpp"
#include "telesum/specialize.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

using namespace telesum;

namespace {

enum ExitCode { kPass = 0, kVerifyFail = 1, kUnsupported = 2, kUsage = 3 };

PrintFormat parse_format(const std::string& f) {
    if (f == "plain") return PrintFormat::Plain;
    if (f == "latex") return PrintFormat::Latex;
    if (f == "json") return PrintFormat::Json;
    throw CLI::ValidationError("--format must be plain, latex or json");
}

std::string show(const SumExpr& e, PrintFormat fmt) { return print(e, fmt); }

/// Splits on top-level commas (bracket-depth aware).
std::vector<std::string> split_pieces(const std::vector<std::string>& raw) {
    std::vector<std::string> out;
    for (const auto& s : raw) {
        int depth = 0;
        std::string cur;
        for (char ch : s) {
            if (ch == '(' || ch == '[') ++depth;
            if (ch == ')' || ch == ']') --depth;
            if (ch == ',' && depth == 0) {
                if (!cur.empty()) out.push_back(cur);
                cur.clear();
                continue;
            }
            cur += ch;
        }
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

unsigned long long initial_seed() {
    if (const char* env = std::getenv("TELESUM_SEED")) return std::stoull(env);
    return kDefaultOracleSeed;
}

int cmd_reduce(const std::string& expr_text, int max_constraints, bool simple_sums,
               PrintFormat fmt, unsigned long long seed) {
    ReductionResult r = reduce_generic(parse_expr(expr_text), max_constraints, seed);
    if (fmt == PrintFormat::Json) {
        std::cout << r.to_json().dump(2) << "\n";
        return r.tag == ReductionResult::Tag::Unreduced ? kUnsupported : kPass;
    }
    const SumExpr& closed = simple_sums ? r.closed_simple : r.closed_grouped;
    std::cout << "input:       " << show(r.input, fmt) << "\n";
    std::cout << "closed form: " << show(closed, fmt) << "\n";
    for (const auto& c : r.constraints)
        std::cout << "constraint:  " << c.fresh << "[" << r.outer << "+1] - " << c.fresh << "["
                  << r.outer << "] = " << show(normalize(c.rhs_expr(r.outer)), fmt) << "\n";
    if (!r.params.empty()) {
        std::cout << "parameters: ";
        for (const auto& p : r.params) std::cout << " " << p;
        std::cout << "\n";
    }
    std::cout << "case:        "
              << (r.tag == ReductionResult::Tag::InRing          ? "solved-in-ring"
                  : r.tag == ReductionResult::Tag::WithExtension ? "solved-with-extension"
                  : r.tag == ReductionResult::Tag::WithConstraints
                      ? "solved-with-constraints"
                      : "unreduced (constraint budget exhausted)")
              << "\n";
    return r.tag == ReductionResult::Tag::Unreduced ? kUnsupported : kPass;
}

int cmd_specialize(const std::string& source, const std::string& atom, bool collapse,
                   PrintFormat fmt, unsigned long long seed) {
    nlohmann::json j;
    if (source == "-") {
        j = nlohmann::json::parse(std::cin);
    } else {
        std::ifstream in(source);
        if (in) {
            j = nlohmann::json::parse(in);
        } else {
            // convenience: treat the argument as an expression and reduce it
            ReductionResult r = reduce_generic(parse_expr(source), 1, seed);
            j = r.to_json();
        }
    }
    ReductionResult r = ReductionResult::from_json(j);
    SpecializeResult s = specialize(r, atom, collapse);
    if (fmt == PrintFormat::Json) {
        std::cout << s.to_json().dump(2) << "\n";
        return s.ok ? kPass : kVerifyFail;
    }
    if (!s.ok) {
        std::cout << "specialization failed: " << s.failure << "\n";
        return kVerifyFail;
    }
    for (const auto& [p, v] : s.constants) std::cout << "constant:  " << p << " = " << v << "\n";
    for (const auto& [y, e] : s.solved_sequences)
        std::cout << "sequence:  " << y << "(k) = " << show(e, fmt) << "\n";
    std::cout << "identity:  " << show(s.lhs, fmt) << " = " << show(s.rhs, fmt) << "\n";
    if (!s.provisos.empty()) {
        std::cout << "provisos: ";
        for (const auto& p : s.provisos) std::cout << " " << p;
        std::cout << "\n";
    }
    return kPass;
}

int cmd_telescope(const std::vector<std::string>& raw_pieces, PrintFormat fmt) {
    auto pieces = split_pieces(raw_pieces);
    if (pieces.empty()) throw CLI::ValidationError("--pieces requires at least one expression");
    Embedding emb;
    std::vector<TowerElem> elems;
    for (const auto& p : pieces) elems.push_back(emb.embed(parse_expr(p)));
    Tower& tw = emb.tower;
    TowerElem rhs = elems[0];
    std::vector<std::string> params;
    for (size_t i = 1; i < elems.size(); ++i) {
        std::string c = i == 1 ? "c" : "c" + std::to_string(i);
        params.push_back(c);
        rhs = te_add(tw, rhs, te_scale(tw, elems[i], RatFunc::var(c)));
    }
    auto sol = solve_tower_diff(tw, rhs, params);
    if (!sol.solved) {
        if (fmt == PrintFormat::Json) std::cout << "{\"solution\": null}\n";
        else std::cout << "no solution\n";
        return kPass;
    }
    TowerElem g = sol.g;
    std::map<std::string, RatFunc> constants;
    for (const auto& p : params) {
        RatFunc v = sol.constants.count(p) ? sol.constants.at(p) : RatFunc::var(p);
        if (v == RatFunc::var(p)) v = RatFunc(0);
        constants[p] = v;
    }
    for (auto& [m, c] : g.terms)
        for (const auto& [p, v] : constants) c = c.substitute(p, v);
    g = te_normalize(tw, g);
    SumExpr gexpr = to_expression(g, tw);
    if (fmt == PrintFormat::Json) {
        nlohmann::json out;
        out["coefficients"].push_back("1");
        for (const auto& p : params) out["coefficients"].push_back(constants[p].str());
        out["certificate"] = print(gexpr);
        std::cout << out.dump(2) << "\n";
        return kPass;
    }
    std::cout << "{1";
    for (const auto& p : params) std::cout << ", " << constants[p];
    std::cout << ", " << show(gexpr, fmt) << "}\n";
    for (const auto& p : params) std::cout << "constant:    " << p << " = " << constants[p] << "\n";
    std::cout << "telescoper:  Y(k) = " << show(gexpr, fmt) << "\n";
    return kPass;
}

int report_and_exit(const CheckReport& rep, PrintFormat fmt) {
    if (fmt == PrintFormat::Json) {
        std::cout << rep.to_json().dump(2) << "\n";
    } else {
        std::cout << (rep.passed() ? "pass" : rep.status == CheckReport::Status::Fail ? "FAIL" : "skipped")
                  << ", " << rep.points_checked << " points";
        if (rep.witness) {
            std::cout << "; witness:";
            for (const auto& [k, v] : rep.witness->point) std::cout << " " << k << "=" << v;
            std::cout << " lhs=" << rep.witness->lhs << " rhs=" << rep.witness->rhs;
        }
        std::cout << "\n";
    }
    return rep.status == CheckReport::Status::Fail ? kVerifyFail : kPass;
}

int cmd_verify(const std::string& identity, const std::vector<long long>& grid_sizes,
               const std::vector<std::string>& provisos,
               const std::vector<std::string>& param_binds, const std::string& corpus_path,
               PrintFormat fmt, unsigned long long seed) {
    if (identity.rfind("corpus:", 0) == 0) {
        std::string id = identity.substr(7);
        for (const auto& e : load_corpus(corpus_path)) {
            if (e.id != id) continue;
            CorpusEntry entry = e;
            for (size_t i = 0; i < grid_sizes.size() && i < entry.grid.size(); ++i)
                entry.grid[i].hi = grid_sizes[i];
            return report_and_exit(run_corpus_entry(entry, seed), fmt);
        }
        std::cerr << "no corpus entry named " << id << "\n";
        return kUsage;
    }
    auto [lhs, rhs] = parse_identity(identity);
    Binding base;
    std::set<std::string> bound;
    for (const auto& pb : param_binds) {
        auto eq = pb.find('=');
        if (eq == std::string::npos) throw CLI::ValidationError("--param expects name=value");
        base.params[pb.substr(0, eq)] = BigRational::from_string(pb.substr(eq + 1));
        bound.insert(pb.substr(0, eq));
    }
    std::set<std::string> fv = free_vars(lhs);
    for (const auto& v : free_vars(rhs)) fv.insert(v);
    std::vector<GridVar> grid;
    size_t gi = 0;
    for (const auto& v : fv) {
        if (bound.count(v)) continue;
        long long hi = gi < grid_sizes.size() ? grid_sizes[gi] : 8;
        grid.push_back({v, 0, hi});
        ++gi;
    }
    return report_and_exit(check_identity(lhs, rhs, grid, base, provisos), fmt);
}

int cmd_corpus(const std::string& filter, const std::string& corpus_path, PrintFormat fmt,
               unsigned long long seed) {
    auto entries = load_corpus(corpus_path);
    bool all = true;
    nlohmann::json results = nlohmann::json::array();
    for (const auto& e : entries) {
        if (!filter.empty() && e.id.find(filter) == std::string::npos) continue;
        CheckReport rep = run_corpus_entry(e, seed);
        all = all && rep.passed();
        if (fmt == PrintFormat::Json) {
            nlohmann::json r = rep.to_json();
            r["id"] = e.id;
            results.push_back(r);
        } else {
            std::cout << "[" << (rep.passed() ? "PASS" : "FAIL") << "] " << e.id << " ("
                      << rep.points_checked << " points)";
            if (rep.witness) {
                std::cout << " witness:";
                for (const auto& [k, v] : rep.witness->point) std::cout << " " << k << "=" << v;
            }
            std::cout << "\n";
        }
    }
    if (fmt == PrintFormat::Json) std::cout << results.dump(2) << "\n";
    return all ? kPass : kVerifyFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"telesum: reduce generic double sums to single nested sums, discharge the\n"
                 "extracted telescoping constraints for concrete sequences, and verify every\n"
                 "identity with an exact brute-force oracle."};
    app.require_subcommand(1);

    std::string format = "plain";
    unsigned long long seed = initial_seed();
    app.add_option("--format", format, "output format: plain, latex or json")
        ->capture_default_str();
    app.add_option("--seed", seed, "seed for randomized oracle tables")->capture_default_str();

    auto* red = app.add_subcommand("reduce", "simplify a generic double sum");
    std::string red_expr;
    int red_budget = 1;
    bool red_simple = false;
    red->add_option("expr", red_expr, "the sum, e.g. Sum(k,0,a,k*X[k]*Sum(j,0,k,X[j]))")->required();
    red->add_option("--extract-constraints", red_budget, "fresh-sequence budget")->capture_default_str();
    red->add_flag("--simple-sums", red_simple, "print the fully split sum representation");

    auto* spec = app.add_subcommand("specialize", "substitute a concrete sequence for X");
    std::string spec_src, spec_atom;
    bool spec_nocollapse = false;
    spec->add_option("result", spec_src, "reduce output as JSON (path, or - for stdin), or an expression")
        ->required();
    spec->add_option("--atom", spec_atom, "target sequence: binom, binom2, invbinom, harmonic, ...")
        ->required();
    spec->add_flag("--no-collapse", spec_nocollapse, "keep sums that telescope in closed form");

    auto* tel = app.add_subcommand("telescope", "parameterized telescoping over the pieces");
    std::vector<std::string> tel_pieces;
    tel->add_option("--pieces", tel_pieces, "summand pieces; first has coefficient 1")->required();

    auto* ver = app.add_subcommand("verify", "oracle-check an identity or corpus entry");
    std::string ver_ident, ver_corpus = default_corpus_path();
    std::vector<long long> ver_grid;
    std::vector<std::string> ver_prov, ver_params;
    ver->add_option("identity", ver_ident, "\"lhs = rhs\" or corpus:ID")->required();
    ver->add_option("--grid", ver_grid, "grid upper bounds per free variable")->delimiter(',');
    ver->add_option("--proviso", ver_prov, "point filters, e.g. a<=n");
    ver->add_option("--param", ver_params, "fixed parameter values, e.g. x=3/2");
    ver->add_option("--corpus", ver_corpus, "corpus file path");

    auto* cor = app.add_subcommand("corpus", "run the full regression corpus");
    std::string cor_filter, cor_path = default_corpus_path();
    cor->add_option("--filter", cor_filter, "only entries whose id contains this string");
    cor->add_option("--corpus", cor_path, "corpus file path");

    CLI11_PARSE(app, argc, argv);

    try {
        PrintFormat fmt = parse_format(format);
        if (red->parsed()) return cmd_reduce(red_expr, red_budget, red_simple, fmt, seed);
        if (spec->parsed()) return cmd_specialize(spec_src, spec_atom, !spec_nocollapse, fmt, seed);
        if (tel->parsed()) return cmd_telescope(tel_pieces, fmt);
        if (ver->parsed()) return cmd_verify(ver_ident, ver_grid, ver_prov, ver_params, ver_corpus, fmt, seed);
        if (cor->parsed()) return cmd_corpus(cor_filter, cor_path, fmt, seed);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kUnsupported;
    } catch (const UnsupportedError& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        return kUnsupported;
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUnsupported;
    }
    return kUsage;
}
