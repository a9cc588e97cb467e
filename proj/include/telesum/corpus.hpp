#pragma once

#include "telesum/oracle.hpp"
#include "telesum/parser.hpp"

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace telesum {

/// One regression identity: expression texts, verification grid, provisos,
/// generic symbols needing random tables, and recurrence-defined sequences.
struct CorpusEntry {
    std::string id;
    std::string anchor;
    std::string lhs_text, rhs_text;
    std::vector<GridVar> grid;
    std::vector<std::string> provisos;
    std::vector<std::string> generic;
    struct Recurrence {
        std::string fresh;
        std::string rhs_text;
        std::vector<std::string> params;
    };
    std::vector<Recurrence> constraints;
    std::map<std::string, std::vector<std::string>> param_values;
    int tables = 1;
};

inline std::vector<CorpusEntry> load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open corpus file " + path);
    std::vector<CorpusEntry> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        CorpusEntry e;
        e.id = j.at("id").get<std::string>();
        e.anchor = j.value("anchor", "");
        e.lhs_text = j.at("lhs").get<std::string>();
        e.rhs_text = j.at("rhs").get<std::string>();
        for (const auto& g : j.at("grid"))
            e.grid.push_back({g.at(0).get<std::string>(), g.at(1).get<long long>(), g.at(2).get<long long>()});
        for (const auto& p : j.value("provisos", nlohmann::json::array()))
            e.provisos.push_back(p.get<std::string>());
        for (const auto& s : j.value("generic", nlohmann::json::array()))
            e.generic.push_back(s.get<std::string>());
        for (const auto& c : j.value("constraints", nlohmann::json::array())) {
            CorpusEntry::Recurrence r;
            r.fresh = c.at("fresh").get<std::string>();
            r.rhs_text = c.at("rhs").get<std::string>();
            for (const auto& p : c.value("params", nlohmann::json::array()))
                r.params.push_back(p.get<std::string>());
            e.constraints.push_back(r);
        }
        if (j.count("param_values"))
            for (const auto& [key, vals] : j.at("param_values").items())
                for (const auto& v : vals) e.param_values[key].push_back(v.get<std::string>());
        e.tables = j.value("tables", 1);
        out.push_back(std::move(e));
    }
    return out;
}

/// Exact verification of one entry. Generic symbols get random tables from
/// the seed; recurrence-bound sequences are built pointwise from their
/// defining equations with random initial values and parameters.
inline CheckReport run_corpus_entry(const CorpusEntry& e, unsigned long long seed) {
    SumExpr lhs = parse_expr(e.lhs_text);
    SumExpr rhs = parse_expr(e.rhs_text);
    std::mt19937_64 rng(seed);
    long long amax = 0;
    for (const auto& g : e.grid) amax = std::max(amax, g.hi);

    // enumerate bound parameter-value combinations (e.g. several x values)
    std::vector<std::map<std::string, BigRational>> param_sets{{}};
    for (const auto& [name, vals] : e.param_values) {
        std::vector<std::map<std::string, BigRational>> next;
        for (const auto& base : param_sets)
            for (const auto& v : vals) {
                auto m = base;
                m[name] = BigRational::from_string(v);
                next.push_back(m);
            }
        param_sets = next;
    }

    CheckReport total;
    total.seed = seed;
    int rounds = e.generic.empty() && e.constraints.empty() ? 1 : e.tables;
    for (int round = 0; round < rounds; ++round) {
        for (const auto& ps : param_sets) {
            Binding b;
            b.params = ps;
            for (const auto& sym : e.generic)
                b.tables[sym] = random_table(rng, static_cast<size_t>(amax) + 6);
            for (const auto& c : e.constraints) {
                for (const auto& p : c.params)
                    if (!b.params.count(p)) b.params[p] = random_rational(rng);
                SumExpr rec = parse_expr(c.rhs_text);
                std::vector<BigRational> y;
                y.push_back(random_rational(rng));
                for (long long k = 0; k + 1 <= amax + 4; ++k)
                    y.push_back(y.back() + eval_sequence(rec, b, "a", k));
                b.tables[c.fresh] = y;
            }
            CheckReport rep = check_identity(lhs, rhs, e.grid, b, e.provisos);
            total.points_checked += rep.points_checked;
            if (!rep.passed() && rep.status == CheckReport::Status::Fail) {
                rep.points_checked = total.points_checked;
                rep.seed = seed;
                return rep;
            }
        }
    }
    return total;
}

inline std::string default_corpus_path() {
#ifdef TELESUM_DATA_DIR
    return std::string(TELESUM_DATA_DIR) + "/corpus.json";
#else
    return "data/corpus.json";
#endif
}

}  // namespace telesum
