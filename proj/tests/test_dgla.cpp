#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "gcdeform/dgla.hpp"

using namespace gcdef;

namespace {

Poly rnd_poly(const PolyCtxPtr& c, std::mt19937_64& rng, int maxdeg = 2,
              bool complex_coeffs = false) {
    std::uniform_int_distribution<int> dco(-3, 3);
    Poly p(c);
    for (int t = 0; t < 4; ++t) {
        Expo e(c->nvars(), 0);
        int budget = maxdeg;
        for (int i = 0; i < c->n_geom; ++i) {
            int k = (int)(rng() % (budget + 1));
            e[i] = k;
            budget -= k;
        }
        QI co = complex_coeffs ? QI(Q(dco(rng)), Q(dco(rng))) : QI(Q(dco(rng)));
        p += Poly::monomial(c, e, co);
    }
    return p;
}

GenSection rnd_section(const PolyCtxPtr& c, std::mt19937_64& rng) {
    GenSection x = GenSection::zero(c);
    for (int i = 0; i < c->n_geom; ++i) x.vf.comp[i] = rnd_poly(c, rng);
    for (int i = 0; i < c->n_geom; ++i) x.form.add_term({i}, rnd_poly(c, rng));
    return x;
}

GenSection rnd_msection(const PolyCtxPtr& c, const Poly& eps, std::mt19937_64& rng) {
    GenSection x = GenSection::zero(c);
    for (int i = 0; i < c->n_geom; ++i) x.vf.comp[i] = rnd_poly(c, rng) * eps;
    for (int i = 0; i < c->n_geom; ++i) x.form.add_term({i}, rnd_poly(c, rng) * eps);
    return x;
}

VectorField rnd_mvf(const PolyCtxPtr& c, const Poly& eps, std::mt19937_64& rng) {
    VectorField v(c);
    for (int i = 0; i < c->n_geom; ++i) v.comp[i] = rnd_poly(c, rng) * eps;
    return v;
}

// a K-element from Z-side data (tau, h), with the canonical ambient lift
KElement lifted_k_element(const Brane& B, const VectorField& tau, const Poly& h) {
    auto amb = B.Z.ambient.ctx;
    VectorField eta(amb);
    for (size_t zi = 0; zi < B.Z.kept.size(); ++zi)
        eta.comp[B.Z.kept[zi]] = B.Z.lift_poly(tau.comp[zi]);
    DiffForm w = B.Z.lift_form(contract(tau, B.F) - ext_d(DiffForm::from_function(h)));
    return make_k_element(B, GenSection(eta, w), RElement{tau, h});
}

Vec ev(int n, int i, Q co = Q(1)) {
    Vec v((size_t)n);
    v[(size_t)i] = QI(co);
    return v;
}

Vec unit(int n, int i) { return ev(n, i); }

Vec vadd(const Vec& a, const Vec& b) {
    Vec r = a;
    for (size_t i = 0; i < r.size(); ++i) r[i] = r[i] + b[i];
    return r;
}

// one degree-1 generator a and one degree-2 generator c with [a,a] = c, d = 0
FDGLA g_quad() {
    std::map<int, int> dims{{1, 1}, {2, 1}};
    std::map<std::pair<int, int>, std::vector<std::vector<Vec>>> br;
    br[{1, 1}] = {{ev(1, 0)}};
    return make_fdgla(dims, {}, br);
}

// e (deg 0), a (deg 1), c (deg 2): [e,a] = a, [e,c] = 2c, [a,a] = c, d = 0
FDGLA g_weight() {
    std::map<int, int> dims{{0, 1}, {1, 1}, {2, 1}};
    std::map<std::pair<int, int>, std::vector<std::vector<Vec>>> br;
    br[{0, 1}] = {{ev(1, 0)}};
    br[{1, 0}] = {{ev(1, 0, Q(-1))}};
    br[{0, 2}] = {{ev(1, 0, Q(2))}};
    br[{2, 0}] = {{ev(1, 0, Q(-2))}};
    br[{1, 1}] = {{ev(1, 0)}};
    return make_fdgla(dims, {}, br);
}

// e1, e2 (deg 0) with [e1,e2] = e2, a (deg 1) with [e1,a] = a, [e2,a] = 0
FDGLA g_solv() {
    std::map<int, int> dims{{0, 2}, {1, 1}};
    std::map<std::pair<int, int>, std::vector<std::vector<Vec>>> br;
    br[{0, 0}] = {{Vec(2), ev(2, 1)}, {ev(2, 1, Q(-1)), Vec(2)}};
    br[{0, 1}] = {{ev(1, 0)}, {Vec(1)}};
    br[{1, 0}] = {{ev(1, 0, Q(-1)), Vec(1)}};
    return make_fdgla(dims, {}, br);
}

// abelian: e (deg 0), a (deg 1), d e = a
FDGLA g_ab() {
    std::map<int, int> dims{{0, 1}, {1, 1}};
    std::map<int, ExactMatrix> diff{{0, ExactMatrix::identity(1)}};
    return make_fdgla(dims, diff, {});
}

// abelian with H^1 of dimension one: d e = a1, a2 closed and not exact
FDGLA g_h1() {
    std::map<int, int> dims{{0, 1}, {1, 2}};
    std::map<int, ExactMatrix> diff{
        {0, ExactMatrix::from_rows({{QI(1)}, {QI(0)}}, 1)}};
    return make_fdgla(dims, diff, {});
}

}  // namespace

TEST_CASE("cochain complexes: betti numbers, representatives, coboundaries") {
    // 0 -> Q^2 -> Q -> 0 with d = (1 1)
    CochainComplex C =
        make_complex({2, 1}, {ExactMatrix::from_rows({{QI(1), QI(1)}}, 2)});
    CHECK(betti(C, 0) == 1);
    CHECK(betti(C, 1) == 0);
    auto reps0 = cohomology_reps(C, 0);
    REQUIRE(reps0.size() == 1);
    CHECK(C.d[0].apply(reps0[0]) == Vec{QI(0)});
    CHECK_FALSE(is_coboundary(C, 0, reps0[0]));

    Vec v{QI(Q(2))};
    Vec prim;
    REQUIRE(is_coboundary(C, 1, v, &prim));
    CHECK(C.d[0].apply(prim) == v);

    // d^2 != 0 is rejected
    CHECK_THROWS(make_complex(
        {1, 1, 1}, {ExactMatrix::identity(1), ExactMatrix::identity(1)}));
}

TEST_CASE("finite DGLAs: axiom validation") {
    CHECK_NOTHROW((void)g_quad());
    CHECK_NOTHROW((void)g_weight());
    CHECK_NOTHROW((void)g_solv());

    // graded antisymmetry: [a,e] must be -[e,a] across degrees 0 and 1
    {
        std::map<int, int> dims{{0, 1}, {1, 1}};
        std::map<std::pair<int, int>, std::vector<std::vector<Vec>>> br;
        br[{0, 1}] = {{ev(1, 0)}};
        br[{1, 0}] = {{ev(1, 0)}};
        CHECK_THROWS((void)make_fdgla(dims, {}, br));
    }
    // Jacobi: a perturbed three-dimensional algebra in degree 0
    {
        std::map<int, int> dims{{0, 3}};
        std::vector<std::vector<Vec>> T(3, std::vector<Vec>(3, Vec(3)));
        T[0][1] = ev(3, 2);
        T[1][0] = ev(3, 2, Q(-1));
        T[1][2] = ev(3, 0);
        T[2][1] = ev(3, 0, Q(-1));
        T[2][0] = ev(3, 0);
        T[0][2] = ev(3, 0, Q(-1));
        std::map<std::pair<int, int>, std::vector<std::vector<Vec>>> br{{{0, 0}, T}};
        CHECK_THROWS((void)make_fdgla(dims, {}, br));
    }
    // Leibniz: d a = c but [e,c] = 0 while [e,a] = a
    {
        std::map<int, int> dims{{0, 1}, {1, 1}, {2, 1}};
        std::map<int, ExactMatrix> diff{{1, ExactMatrix::identity(1)}};
        std::map<std::pair<int, int>, std::vector<std::vector<Vec>>> br;
        br[{0, 1}] = {{ev(1, 0)}};
        br[{1, 0}] = {{ev(1, 0, Q(-1))}};
        CHECK_THROWS((void)make_fdgla(dims, diff, br));
    }
    // d^2 = 0
    {
        std::map<int, int> dims{{0, 1}, {1, 1}, {2, 1}};
        std::map<int, ExactMatrix> diff{{0, ExactMatrix::identity(1)},
                                        {1, ExactMatrix::identity(1)}};
        CHECK_THROWS((void)make_fdgla(dims, diff, {}));
    }
}

TEST_CASE("Maurer-Cartan elements and residuals over Artin coefficients") {
    FDGLA g = g_quad();
    ArtinAlgebra A3 = artin_dual(3);
    ArtinAlgebra A2 = artin_dual(2);
    auto c3 = A3.ctx();
    auto c2 = A2.ctx();
    Poly e3 = Poly::var(c3, "eps");
    Poly e2 = Poly::var(c2, "eps");

    // over eps^3 = 0 the element eps a has residual (1/2) eps^2 c
    GradedElement x3 = g.basis(1, 0, c3) * e3;
    MCResult r3 = mc_check(g, x3);
    CHECK_FALSE(r3.ok);
    REQUIRE(r3.residual.c.size() == 1);
    CHECK(r3.residual.c[0] == e3 * e3 * QI(Q(1, 2)));

    // over dual numbers the square vanishes
    GradedElement x2 = g.basis(1, 0, c2) * e2;
    CHECK(mc_check(g, x2).ok);

    // eps^2 a is Maurer-Cartan over eps^3 = 0
    CHECK(mc_check(g, g.basis(1, 0, c3) * (e3 * e3)).ok);

    // wrong degree and non-nilpotent coefficients are rejected
    CHECK_THROWS((void)mc_check(g, g.basis(2, 0, c2) * e2));
    CHECK_THROWS((void)mc_check(g, g.basis(1, 0, c2)));

    // a DGLA concentrated in degree 0 has exactly one object
    FDGLA g0 = g_solv();
    std::map<int, int> d0dims{{0, 2}};
    FDGLA gonly = make_fdgla(d0dims, {}, {{{0, 0}, g0.br.at({0, 0})}});
    GradedElement none = gonly.zero(1, c2);
    CHECK(mc_check(gonly, none).ok);
    CHECK(deligne_equivalent(gonly, none, none, A2.nilpotency_order));
}

TEST_CASE("the gauge action: abelian formula, MC preservation, composition") {
    ArtinAlgebra A3 = artin_dual(3);
    auto c3 = A3.ctx();
    Poly e3 = Poly::var(c3, "eps");
    int ord = A3.nilpotency_order;

    // abelian: e^y . x = x - dy
    {
        FDGLA g = g_ab();
        CHECK(is_abelian(g));
        GradedElement x = g.basis(1, 0, c3) * (e3 * QI(Q(5)));
        GradedElement y = g.basis(0, 0, c3) * (e3 + e3 * e3 * QI(Q(2)));
        CHECK(gauge_act(g, y, x, ord) == x - g.d(y));
    }
    // MC is preserved
    {
        FDGLA g = g_weight();
        GradedElement x = g.basis(1, 0, c3) * (e3 * e3);
        REQUIRE(mc_check(g, x).ok);
        GradedElement y = g.basis(0, 0, c3) * e3;
        CHECK(mc_check(g, gauge_act(g, y, x, ord)).ok);
    }
    // composition law through BCH on a non-abelian degree 0
    {
        FDGLA g = g_solv();
        CHECK_FALSE(is_abelian(g));
        GradedElement y = g.basis(0, 0, c3) * e3;
        GradedElement z = g.basis(0, 1, c3) * e3;
        GradedElement w = bch(
            y, z,
            [&](const GradedElement& p, const GradedElement& q) {
                return g.bracket(p, q);
            },
            ord);
        GradedElement x = g.basis(1, 0, c3) * e3;
        CHECK(gauge_act(g, w, x, ord) ==
              gauge_act(g, y, gauge_act(g, z, x, ord), ord));
    }
    // gauge parameters must be degree 0 and nilpotent
    {
        FDGLA g = g_ab();
        GradedElement x = g.basis(1, 0, c3) * e3;
        CHECK_THROWS((void)gauge_act(g, x, x, ord));
        CHECK_THROWS((void)gauge_act(g, g.basis(0, 0, c3), x, ord));
    }
}

TEST_CASE("the Deligne groupoid: pi_0 and orbit testing") {
    ArtinAlgebra A2 = artin_dual(2);
    auto c2 = A2.ctx();
    Poly e2 = Poly::var(c2, "eps");

    FDGLA g = g_h1();
    Pi0Abelian p = deligne_pi0_abelian(g);
    CHECK(p.dim == 1);
    CHECK(p.reps.size() == 1);

    // non-abelian input is rejected by the abelian classifier
    CHECK_THROWS((void)deligne_pi0_abelian(g_weight()));

    // orbits in the abelian case: exact directions die, the rest survive
    GradedElement zero = g.zero(1, c2);
    CHECK(deligne_equivalent(g, g.basis(1, 0, c2) * e2, zero, 2));
    CHECK_FALSE(deligne_equivalent(g, g.basis(1, 1, c2) * e2, zero, 2));
    CHECK(deligne_equivalent(g, g.basis(1, 1, c2) * e2, g.basis(1, 1, c2) * e2, 2));

    // non-abelian positive case: a constructed gauge image is recognized
    ArtinAlgebra A3 = artin_dual(3);
    auto c3 = A3.ctx();
    Poly e3 = Poly::var(c3, "eps");
    FDGLA gs = g_solv();
    GradedElement x = gs.basis(1, 0, c3) * e3;
    GradedElement y = gs.basis(0, 0, c3) * (e3 * QI(Q(3)));
    CHECK(deligne_equivalent(gs, x, gauge_act(gs, y, x, 3), 3));

    // with no degree-0 part the orbit of zero is trivial
    FDGLA gq = g_quad();
    CHECK_FALSE(deligne_equivalent(gq, gq.basis(1, 0, c2) * e2, gq.zero(1, c2), 2));
}

TEST_CASE("obstruction lifting along small extensions") {
    ArtinAlgebra A3 = artin_dual(3);
    ArtinAlgebra A2 = artin_dual(2);
    auto c2 = A2.ctx();
    auto c3 = A3.ctx();
    ArtinHom pr = make_artin_hom(A3, A2, {Poly::var(c2, "eps")});
    auto chain = small_extension_chain(pr);
    REQUIRE(chain.size() == 1);

    // [a,a] = c obstructs the first-order element at second order
    FDGLA g = g_quad();
    GradedElement x = g.basis(1, 0, c2) * Poly::var(c2, "eps");
    REQUIRE(mc_check(g, x).ok);
    LiftResult res = obstruction_lift(g, chain[0], x);
    CHECK_FALSE(res.lifted);
    REQUIRE(res.obstruction.size() == 1);
    CHECK(res.obstruction[0] == QI(Q(1, 2)));

    // zero always lifts to zero
    LiftResult z = obstruction_lift(g, chain[0], g.zero(1, c2));
    CHECK(z.lifted);
    CHECK(z.lift.is_zero());

    // with a second generator b and d b = c the obstruction is absorbed
    std::map<int, int> dims{{1, 2}, {2, 1}};
    std::map<int, ExactMatrix> diff{
        {1, ExactMatrix::from_rows({{QI(0), QI(1)}}, 2)}};
    std::map<std::pair<int, int>, std::vector<std::vector<Vec>>> br;
    br[{1, 1}] = {{ev(1, 0), Vec(1)}, {Vec(1), Vec(1)}};
    FDGLA g5 = make_fdgla(dims, diff, br);
    GradedElement x5 = g5.basis(1, 0, c2) * Poly::var(c2, "eps");
    REQUIRE(mc_check(g5, x5).ok);
    LiftResult l5 = obstruction_lift(g5, chain[0], x5);
    REQUIRE(l5.lifted);
    CHECK(mc_check(g5, l5.lift).ok);
    Poly e3 = Poly::var(c3, "eps");
    REQUIRE(l5.lift.c.size() == 2);
    CHECK(l5.lift.c[0] == e3);
    CHECK(l5.lift.c[1] == e3 * e3 * QI(Q(-1, 2)));
}

TEST_CASE("callable carriers: spot-checked Lie axioms for the section algebras") {
    std::mt19937_64 rng(61);
    Chart ch = make_chart({"t1", "t2", "t3", "t4"});
    std::vector<GenSection> secs;
    for (int i = 0; i < 3; ++i) secs.push_back(rnd_section(ch.ctx, rng));

    ConcreteDGLA<GenSection> sym;
    sym.bracket = [](const GenSection& a, const GenSection& b) {
        return ghat_bracket(a, b);
    };
    CHECK(lie_axioms_hold(sym, secs));

    // the Courant bracket fails Jacobi on generic sections
    ConcreteDGLA<GenSection> cou;
    cou.bracket = [](const GenSection& a, const GenSection& b) {
        return courant_bracket(a, b);
    };
    CHECK_FALSE(lie_axioms_hold(cou, secs));

    // the fiber-product algebra of a brane
    Chart lch = make_chart({"x", "y"});
    Brane B = standard_brane(lch, 1, 0, 0);
    auto zc = B.Z.zchart.ctx;
    std::vector<KElement> ks;
    for (int i = 0; i < 3; ++i) {
        VectorField tau(zc);
        tau.comp[0] = rnd_poly(zc, rng);
        ks.push_back(lifted_k_element(B, tau, rnd_poly(zc, rng)));
    }
    ConcreteDGLA<KElement> kk;
    kk.bracket = [&](const KElement& a, const KElement& b) {
        return k_bracket(B, a, b);
    };
    CHECK(lie_axioms_hold(kk, ks));
}

TEST_CASE("totalization of semicosimplicial complexes") {
    CochainComplex pt = make_complex({1}, {});
    std::map<int, ExactMatrix> idm{{0, ExactMatrix::identity(1)}};

    // two copies of Q with identity cofaces: H^0 = H^1 = Q
    {
        SemiCxComplex s = make_semicx({pt, pt}, {{idm, idm}});
        CochainComplex T = tot(s);
        REQUIRE(T.dims == std::vector<int>{1, 1});
        CHECK(betti(T, 0) == 1);
        CHECK(betti(T, 1) == 1);
    }
    // the Cech nerve of the constant sheaf on two vertices and one edge
    {
        CochainComplex l0 = make_complex({2}, {});
        CochainComplex l1 = make_complex({1}, {});
        std::map<int, ExactMatrix> f0{
            {0, ExactMatrix::from_rows({{QI(0), QI(1)}}, 2)}};
        std::map<int, ExactMatrix> f1{
            {0, ExactMatrix::from_rows({{QI(1), QI(0)}}, 2)}};
        CochainComplex T = tot(make_semicx({l0, l1}, {{f0, f1}}));
        REQUIRE(T.dims == std::vector<int>{2, 1});
        CHECK(betti(T, 0) == 1);
        CHECK(betti(T, 1) == 0);
    }
    // a single level totalizes to itself
    {
        CochainComplex T = tot(make_semicx({pt}, {}));
        CHECK(T.dims == std::vector<int>{1});
        CHECK(betti(T, 0) == 1);
    }
    // internal differentials enter with the level sign and D^2 = 0 holds
    {
        CochainComplex l = make_complex({1, 1}, {ExactMatrix::identity(1)});
        std::map<int, ExactMatrix> idm2{{0, ExactMatrix::identity(1)},
                                        {1, ExactMatrix::identity(1)}};
        CochainComplex T = tot(make_semicx({l, l}, {{idm2, idm2}}));
        REQUIRE(T.dims == std::vector<int>{1, 2, 1});
        CHECK(betti(T, 0) == 0);
        CHECK(betti(T, 1) == 0);
        CHECK(betti(T, 2) == 0);
    }
    // a violated cosimplicial identity is rejected
    {
        std::map<int, ExactMatrix> twice{
            {0, ExactMatrix::from_rows({{QI(2)}}, 1)}};
        CHECK_THROWS((void)make_semicx({pt, pt, pt}, {{idm, idm}, {idm, idm, twice}}));
    }
    // cofaces must be chain maps
    {
        CochainComplex l0 = make_complex({1, 1}, {ExactMatrix::identity(1)});
        CochainComplex l1 = make_complex({1, 1}, {ExactMatrix(1, 1)});
        std::map<int, ExactMatrix> idm2{{0, ExactMatrix::identity(1)},
                                        {1, ExactMatrix::identity(1)}};
        CHECK_THROWS((void)make_semicx({l0, l1}, {{idm2, idm2}}));
    }
}

TEST_CASE("bisemicosimplicial totalization") {
    std::vector<std::vector<int>> dim{{1, 1}, {1, 1}};
    ExactMatrix I = ExactMatrix::identity(1);
    std::vector<std::vector<std::vector<ExactMatrix>>> hface{{{I, I}, {I, I}}};
    std::vector<std::vector<std::vector<ExactMatrix>>> vface{{{I, I}}, {{I, I}}};
    BisemiComplex B = make_bisemi(dim, hface, vface);
    CHECK(B.rows() == 2);
    CHECK(B.cols() == 2);
    CochainComplex T = tot(B);
    REQUIRE(T.dims == std::vector<int>{1, 2, 1});
    CHECK(betti(T, 0) == 1);
    CHECK(betti(T, 1) == 2);
    CHECK(betti(T, 2) == 1);

    // the two coface families must commute
    auto bad = vface;
    bad[1][0][1] = ExactMatrix::from_rows({{QI(2)}}, 1);
    CHECK_THROWS((void)make_bisemi(dim, hface, bad));
}

TEST_CASE("the brane complex on a one-chart cover") {
    Chart ch = make_chart({"x", "y"});
    GCStructure J = standard_gc(ch, 1, 0);
    Brane B = standard_brane(ch, 1, 0, 0);
    VComplex V = build_v(B, J, make_cover(1, {}), 2);

    int h = (int)V.h_basis.size();
    int k = (int)V.k_basis.size();
    int t = (int)V.t_basis.size();
    REQUIRE(h > 0);
    REQUIRE(k > 0);
    REQUIRE(t > 0);
    REQUIRE(V.C.dims.size() >= 4);
    CHECK(V.C.dims[0] == h + k);
    CHECK(V.C.dims[1] == h + t);
    CHECK(V.C.dims[2] == h);
    CHECK(V.C.dims[3] == h);

    // D^2 = 0 across the whole totalization
    for (size_t i = 0; i + 1 < V.C.d.size(); ++i)
        CHECK((V.C.d[i + 1] * V.C.d[i]).is_zero());

    // the basis sections really are holomorphic
    LFrame lf = l_frame(J);
    for (int i = 0; i < t; ++i)
        CHECK(is_gen_holomorphic(J, lf, V.t_basis[i]).holomorphic);
    for (int i = 0; i < h; ++i)
        CHECK(is_gen_holomorphic(J, lf, V.h_basis[i]).holomorphic);

    // the comparison matrices express H and the ambient parts of K over T
    auto combo = [&](const Vec& co) {
        GenSection s = GenSection::zero(ch.ctx);
        for (int a = 0; a < t; ++a) s = s + V.t_basis[(size_t)a] * co[(size_t)a];
        return s;
    };
    for (int i = 0; i < h; ++i) {
        Vec col((size_t)t);
        for (int a = 0; a < t; ++a) col[(size_t)a] = V.h_mat.at(a, i);
        CHECK(combo(col) == V.h_basis[(size_t)i]);
    }
    for (int j = 0; j < k; ++j) {
        Vec col((size_t)t);
        for (int a = 0; a < t; ++a) col[(size_t)a] = V.chi_mat.at(a, j);
        CHECK(combo(col) == V.k_basis[(size_t)j].amb);
    }

    // the first total differential: (z, y) -> h(z) - chi(y) in the T block
    for (int i = 0; i < h; ++i) {
        Vec r = V.C.d[0].apply(unit(V.C.dims[0], V.h_offset(0) + i));
        for (int a = 0; a < h; ++a) CHECK(r[(size_t)a] == QI(0));
        for (int a = 0; a < t; ++a)
            CHECK(r[(size_t)(V.t_offset(1, 0) + a)] == V.h_mat.at(a, i));
    }
    for (int j = 0; j < k; ++j) {
        Vec r = V.C.d[0].apply(unit(V.C.dims[0], V.k_offset(0, 0) + j));
        for (int a = 0; a < h; ++a) CHECK(r[(size_t)a] == QI(0));
        for (int a = 0; a < t; ++a)
            CHECK(r[(size_t)(V.t_offset(1, 0) + a)] == -V.chi_mat.at(a, j));
    }
}

TEST_CASE("bracket closure of the truncated spans") {
    Chart ch = make_chart({"x", "y"});
    GCStructure J = standard_gc(ch, 1, 0);
    Brane B = standard_brane(ch, 1, 0, 0);

    // affine data closes under all brackets
    VComplex V1 = build_v(B, J, make_cover(1, {}), 1);
    ClosureReport r1 = bracket_closure(V1);
    CHECK(r1.closed);
    CHECK(r1.detail.empty());

    // quadratic Hamiltonian fields produce cubic brackets: reported, not cut
    VComplex V2 = build_v(B, J, make_cover(1, {}), 2);
    ClosureReport r2 = bracket_closure(V2);
    CHECK_FALSE(r2.closed);
    CHECK(r2.detail.find("bracket") != std::string::npos);
}

TEST_CASE("the brane complex over a two-chart cover and the comparison map") {
    std::mt19937_64 rng(67);
    Chart ch = make_chart({"t1", "t2", "t3", "t4"});
    GCStructure J = standard_gc(ch, 0, 2);
    Brane B = standard_brane(ch, 0, 2, 1);
    NerveCover two = make_cover(2, {{0, 1}});
    VComplex V = build_v(B, J, two, 1);
    BraneFrame fr = brane_frame(B, J);

    int h = (int)V.h_basis.size();
    int k = (int)V.k_basis.size();
    int t = (int)V.t_basis.size();
    REQUIRE(V.C.dims.size() >= 4);
    CHECK(V.C.dims[0] == h + 2 * k);
    CHECK(V.C.dims[1] == h + k + 2 * t);
    CHECK(V.C.dims[2] == h + t);
    CHECK(V.C.dims[3] == h);

    // the zero cocycle maps to the zero cochain
    BAlgForm z0 = phi_map(V, Vec((size_t)V.C.dims[2]));
    CHECK(z0.is_zero());

    // coboundaries map to exact cochains
    std::uniform_int_distribution<int> dco(-2, 2);
    for (int trial = 0; trial < 3; ++trial) {
        Vec b((size_t)V.C.dims[1]);
        for (auto& q : b) q = QI(Q(dco(rng)));
        BAlgForm w = phi_map(V, V.C.d[1].apply(b));
        CHECK(is_exact2(fr, w, V.D + 1));
    }

    // linearity on cocycles
    auto cocycles = V.C.d[2].kernel_basis();
    if (cocycles.size() >= 2) {
        BAlgForm w1 = phi_map(V, cocycles[0]);
        BAlgForm w2 = phi_map(V, cocycles[1]);
        CHECK(phi_map(V, vadd(cocycles[0], cocycles[1])) == w1 + w2);
    }

    // the induced map on H^2 stays injective
    H2Result h2 = h2_total(V);
    CHECK(h2.dim == (int)h2.reps.size());
    CHECK(phi_injective_on_h2(V));
}

TEST_CASE("descent of Deligne data matches the deformation groupoid") {
    std::mt19937_64 rng(71);
    ArtinAlgebra A = artin_dual(2);
    Chart ch = make_chart({"t1", "t2", "t3", "t4"}, &A);
    GCStructure J = standard_gc(ch, 0, 2);
    Brane B = standard_brane(ch, 0, 2, 1);
    Poly eps = Poly::var(ch.ctx, "eps");
    auto zc = B.Z.zchart.ctx;
    Poly ze = Poly::var(zc, "eps");
    int ord = 2;
    NerveCover two = make_cover(2, {{0, 1}});

    // a Deligne 1-cocycle over the cover: vertex sections x_a in T and an
    // edge gauge y_01 in K with chi(y_01) x_1 = x_0
    KElement y01 = lifted_k_element(B, rnd_mvf(zc, ze, rng), rnd_poly(zc, rng) * ze);
    GenSection x1 = rnd_msection(ch.ctx, eps, rng);
    GenSection x0 = x1 + y01.amb;

    DescentDatum dd;
    dd.cover = two;
    dd.objs.emplace(1, brane_act(trivial_deformation(B, ord), sym_exp(x1, ord)));
    dd.objs.emplace(0, brane_act(trivial_deformation(B, ord),
                                 sym_mul(chi_exp(y01, ord), sym_exp(x1, ord))));
    dd.psi.emplace(std::make_pair(0, 1), sigma_morphism(B, y01, ord));
    CHECK(descent_validate(dd).empty());

    // the Deligne data is recovered from the descent datum: the vertex
    // objects determine x_a up to the embedding, the edge morphism returns
    // (tau, h) on the nose
    for (int a : {0, 1}) {
        const GenSection& xa = (a == 0) ? x0 : x1;
        VectorField xi = realize_xi(dd.objs.at(a));
        for (int j = 0; j < ch.ctx->n_geom; ++j)
            CHECK(B.Z.restrict_poly(xi.comp[(size_t)j]) ==
                  B.Z.restrict_poly(xa.vf.comp[(size_t)j]));
        CHECK(dd.objs.at(a).bundle.u.at(0) == B.Z.restrict_form(xa.form));
    }
    const Equivalence& psi = dd.psi.at({0, 1});
    CHECK(psi.tau == y01.bdry.xi);
    CHECK(psi.g.at(0) == y01.bdry.f);

    // breaking the cocycle identity chi(y_01) x_1 = x_0 is detected
    GenSection offx = GenSection::zero(ch.ctx);
    offx.form.add_term({0}, eps);  // a kept direction, so the object moves
    DescentDatum bad = dd;
    bad.objs.at(0) =
        brane_act(trivial_deformation(B, ord), sym_exp(x0 + offx, ord));
    CHECK_FALSE(descent_validate(bad).empty());
}
