#include "telesum/embed.hpp"
#include "telesum/oracle.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace telesum;

namespace {
RatFunc RF(const std::string& s) { return RatFunc(MultiPoly::parse(s)); }

// the harmonic tower Q(k)[s], sigma(s) = s + 1/(k+1), s ~ H_k
Tower harmonic_tower() {
    auto [tw, el] = from_expression(parse_expr("harmonic(k)"));
    return tw;
}
}  // namespace

TEST_CASE("apply_sigma on the harmonic tower") {
    Tower tw = harmonic_tower();
    TowerElem s = te_gen(tw, 0, 1);
    // sigma(s) = s + 1/(k+1)
    TowerElem ss = apply_sigma(s, tw);
    CHECK(te_equal(tw, ss, te_add(tw, s, te_coeff(tw, RF("1") / RF("k + 1")))));
    // sigma(k s) = (k+1)(s + 1/(k+1))
    TowerElem ks = te_scale(tw, s, RF("k"));
    TowerElem expect = te_scale(tw, ss, RF("k + 1"));
    CHECK(te_equal(tw, apply_sigma(ks, tw), expect));
    // constants are fixed
    TowerElem c = te_coeff(tw, RF("n + 3"));
    CHECK(te_equal(tw, apply_sigma(c, tw), c));
    // automorphism: sigma is invertible on normal forms
    TowerElem e = te_add(tw, te_pow(tw, s, 2), te_scale(tw, s, RF("k^2 + 1")));
    CHECK(te_equal(tw, embed_detail::apply_sigma_inv(apply_sigma(e, tw), tw), e));
}

TEST_CASE("ev on towers") {
    Tower tw = harmonic_tower();
    TowerElem s = te_gen(tw, 0, 1);
    CHECK(ev(s, tw, 3) == BigRational(BigInt(11), BigInt(6)));  // H_3
    // ev(k*s, i) = i H_i
    TowerElem ks = te_scale(tw, s, RF("k"));
    for (long long i = 0; i <= 8; ++i) CHECK(ev(ks, tw, i) == BigRational(i) * harmonic_number(i));

    auto [tw2, b] = from_expression(parse_expr("binom(n,k)"));
    CHECK(ev(b, tw2, 2, {{"n", BigRational(4)}}) == BigRational(6));
}

TEST_CASE("ev/sigma commutation on random tower elements") {
    auto [tw, el0] = from_expression(parse_expr("binom(n,k)*Sum(j,0,k,binom(n,j)) + harmonic(k)"));
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> coef(-3, 3), kd(0, 2), ge(0, 1);
    std::map<std::string, BigRational> params{{"n", BigRational(9)}};
    long long thr = tw.threshold();
    for (int iter = 0; iter < 25; ++iter) {
        TowerElem e;
        for (int t = 0; t < 3; ++t) {
            std::vector<int> mono(tw.exts.size(), 0);
            for (size_t g = 0; g < tw.exts.size(); ++g) mono[g] = ge(rng);
            RatFunc c = RF(std::to_string(coef(rng))) * RatFunc(MultiPoly::var("k", kd(rng)));
            e.terms[mono] += c;
        }
        e = te_normalize(tw, e);
        TowerElem se = apply_sigma(e, tw);
        auto vals = ev_range(e, tw, 26, params);
        auto svals = ev_range(se, tw, 26, params);
        for (long long i = std::max(thr, 0LL); i <= 25; ++i) CHECK(svals[i] == vals[i + 1]);
    }
}

TEST_CASE("check_sigma_ext") {
    // beta = 1/(k+1) over Q(k): admissible (harmonic is a genuine extension)
    Tower base;
    CHECK(!check_sigma_ext(te_coeff(base, RF("1") / RF("k + 1")), base));

    // beta = sigma(k * k!) over the factorial ring: witness (k+1) k!
    auto [ftw, kfact] = from_expression(parse_expr("k*factorial(k)"));
    TowerElem beta = apply_sigma(kfact, ftw);
    auto w = check_sigma_ext(beta, ftw);
    REQUIRE(w);
    CHECK(te_equal(ftw, te_sub(ftw, apply_sigma(*w, ftw), *w), beta));

    // beta = binom(n,k+1) over the binomial ring: admissible
    auto [btw, b] = from_expression(parse_expr("binom(n,k)"));
    CHECK(!check_sigma_ext(apply_sigma(b, btw), btw));

    // extend_sigma refuses an inadmissible extension
    CHECK_THROWS(extend_sigma(ftw, "bad", beta, RatFunc(0), parse_expr("factorial(k)")));
}

TEST_CASE("from_expression structures") {
    auto [tw, el] = from_expression(parse_expr("Sum(j,0,k,binom(n,j))"));
    REQUIRE(tw.exts.size() == 2);
    CHECK(tw.exts[0].kind == ExtKind::Pi);
    CHECK(tw.exts[1].kind == ExtKind::Sigma);
    std::vector<int> smono{0, 1};
    REQUIRE(el.terms.count(smono));

    auto [tw2, el2] = from_expression(parse_expr("harmonic(k)"));
    REQUIRE(tw2.exts.size() == 1);
    CHECK(tw2.exts[0].kind == ExtKind::Sigma);

    // collapsible sum: Sum j*j! = (k+1)! - 1 with no new Sigma generator
    auto [tw3, el3] = from_expression(parse_expr("Sum(j,0,k,j*factorial(j))"));
    REQUIRE(tw3.exts.size() == 1);
    CHECK(tw3.exts[0].kind == ExtKind::Pi);
    for (long long i = 0; i <= 6; ++i) {
        BigRational expect = eval_atom("factorial", {BigRational(i + 1)}) - BigRational(1);
        CHECK(ev(el3, tw3, i) == expect);
    }
    // generator reuse: binom appears once
    auto [tw4, el4] = from_expression(parse_expr("binom(n,k)*Sum(j,0,k,binom(n,j))"));
    int pis = 0;
    for (const auto& e : tw4.exts) pis += e.kind == ExtKind::Pi ? 1 : 0;
    CHECK(pis == 1);
}

TEST_CASE("from/to expression round trip agrees with the oracle") {
    std::vector<std::string> cases = {
        "harmonic(k)",
        "Sum(j,0,k,binom(n,j))",
        "k*binom(n,k)^2",
        "(-1)^k*Sum(j,0,k,binom(n,j))^2 + harmonic(k)",
        "Sum(j,0,k,j*factorial(j))",
        "invbinom(n,k)",
    };
    Binding b;
    b.params["n"] = BigRational(12);
    for (const auto& s : cases) {
        SumExpr e = parse_expr(s);
        auto [tw, el] = from_expression(e);
        SumExpr back = to_expression(el, tw);
        INFO(s << "  ->  " << print(back));
        for (long long i = tw.threshold(); i <= 12; ++i) {
            BigRational direct = eval_sequence(e, b, "k", i);
            BigRational via = eval_sequence(back, b, "k", i);
            BigRational tower_val = ev(el, tw, i, b.params);
            CHECK(direct == via);
            CHECK(direct == tower_val);
        }
    }
}

TEST_CASE("sigma_layer_telescope") {
    Tower tw = harmonic_tower();
    TowerElem s = te_gen(tw, 0, 1);
    // solve sigma(g) - g = sigma(s): g = (k+1)s - k, i.e. Sum H = (k+1)H_k - k
    TowerElem f = apply_sigma(s, tw);
    auto g = sigma_layer_telescope(f, tw);
    REQUIRE(g);
    TowerElem expect = te_add(tw, te_scale(tw, s, RF("k + 1")), te_coeff(tw, RF("0 - k")));
    CHECK(te_equal(tw, *g, expect));
    // degree bound: deg_s(g) <= deg_s(f) + 1
    int dg = 0;
    for (const auto& [m, c] : g->terms) dg = std::max(dg, m[0]);
    CHECK(dg <= 2);

    // f = 0 -> g = 0
    auto g0 = sigma_layer_telescope(TowerElem{}, tw);
    REQUIRE(g0);
    CHECK(g0->is_zero());

    // brute-force check of the witness: Sum_{j=1}^k H_j = (k+1)H_k - k
    for (long long k = 0; k <= 20; ++k) {
        BigRational lhs(0);
        for (long long j = 1; j <= k; ++j) lhs += harmonic_number(j);
        CHECK(lhs == BigRational(k + 1) * harmonic_number(k) - BigRational(k));
    }

    // over the concrete binomial tower the double sum collapses:
    // C1(a,n) = (a+1-n/2) S(a) + ((a+1)/2) binom(n,a+1); the generic-ring
    // analogue has no solution (covered by the genring tests)
    auto [btw, bel] = from_expression(parse_expr("Sum(j,0,k,binom(n,j))"));
    TowerElem fs = apply_sigma(te_gen(btw, 1, 1), btw);
    auto gb = sigma_layer_telescope(fs, btw);
    REQUIRE(gb);
    CHECK(te_equal(btw, te_sub(btw, apply_sigma(*gb, btw), *gb), fs));
    // numeric cross-check of the collapsed form at n = 5
    std::map<std::string, BigRational> pp{{"n", BigRational(5)}};
    for (long long a = 0; a <= 8; ++a) {
        BigRational c1(0);
        for (long long k = 0; k <= a; ++k)
            for (long long j = 0; j <= k; ++j) c1 += binomial(BigRational(5), j);
        BigRational got = ev(*gb, btw, a, pp) - ev(*gb, btw, 0, pp) +
                          binomial(BigRational(5), 0);  // g(a) - g(0) + f(0)
        CHECK(c1 == got);
    }
}

TEST_CASE("harmonic parameterized layer: the c-family stays free") {
    Tower tw = harmonic_tower();
    TowerElem s = te_gen(tw, 0, 1);
    // sigma(y) - y = (k+1-2c) sigma(s)
    TowerElem f = te_scale(tw, apply_sigma(s, tw), RF("k + 1") - RF("2") * RatFunc::var("c"));
    auto r = solve_tower_diff(tw, f, {"c"});
    REQUIRE(r.solved);
    CHECK(r.constants.at("c") == RatFunc::var("c"));  // every c admits a solution
    // with c = 0 the solution matches (k(k+1)/2) H_k - k(k-1)/4 up to a constant
    TowerElem g0 = r.g;
    for (auto& [m, c] : g0.terms) c = c.substitute("c", RatFunc(0));
    g0 = te_normalize(tw, g0);
    TowerElem expect = te_add(tw, te_scale(tw, s, RF("1/2*k^2 + 1/2*k")),
                              te_coeff(tw, RF("0 - 1/4*k^2 + 1/4*k")));
    TowerElem diff = te_sub(tw, g0, expect);
    CHECK(diff.is_coeff());
    RatFunc d = diff.coeff_value();
    CHECK(!d.has_var("k"));
}
