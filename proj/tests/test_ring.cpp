#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "gcdeform/matrix.hpp"
#include "gcdeform/poly.hpp"
#include "gcdeform/rational.hpp"

using namespace gcdef;

static PolyCtxPtr xy() { return make_ctx({"x", "y"}); }

static Poly random_poly(const PolyCtxPtr& c, std::mt19937_64& rng, int maxdeg = 3) {
    std::uniform_int_distribution<int> dexp(0, maxdeg);
    std::uniform_int_distribution<int> dco(-4, 4);
    Poly p(c);
    for (int t = 0; t < 5; ++t) {
        Expo e(c->nvars(), 0);
        int budget = maxdeg;
        for (int i = 0; i < c->n_geom; ++i) {
            int k = dexp(rng) % (budget + 1);
            e[i] = k;
            budget -= k;
        }
        p.add_term(e, QI(Q(dco(rng))));
    }
    return p;
}

TEST_CASE("rational round trip and normalization") {
    Q q(-6, 8);
    CHECK(q == Q(-3, 4));
    CHECK(numerator(q) == -3);
    CHECK(denominator(q) == 4);
    CHECK(q_to_string(q) == "-3/4");
    CHECK(q_from_string("-3/4") == q);
    CHECK(q_from_string("7") == Q(7));
    CHECK(q_to_string(Q(5)) == "5");
}

TEST_CASE("gaussian rationals form a field with involutive conjugation") {
    QI z(Q(2), Q(-3));
    CHECK(z.conj().conj() == z);
    CHECK((z * z.conj()).re == z.norm());
    CHECK((z * z.conj()).im == 0);
    CHECK(z.norm() == Q(13));
    QI w(Q(1, 2), Q(1, 3));
    CHECK((z / w) * w == z);
    CHECK((z * w) / w == z);
    CHECK(QI::i() * QI::i() == QI(-1));
}

TEST_CASE("poly_mul basic identities") {
    auto c = xy();
    Poly x = Poly::var(c, "x"), y = Poly::var(c, "y"), one = Poly::one(c);
    CHECK((x + one) * (x - one) == x * x - one);           // difference of squares
    CHECK((x * Poly::zero(c)).is_zero());                  // annihilator
    Poly lhs = (x + y) * (x + y);
    Poly rhs = x * x + QI(2) * (x * y) + y * y;            // hand expansion
    CHECK(lhs == rhs);
}

TEST_CASE("poly_partial") {
    auto c = xy();
    Poly x = Poly::var(c, "x"), y = Poly::var(c, "y");
    CHECK((x * x * y).partial("x") == QI(2) * (x * y));    // power rule
    CHECK((x * x).partial("y").is_zero());                 // constant in y
    Poly s = x + y;
    CHECK((s * s * s).partial("x") == QI(3) * (s * s));    // expand-then-differentiate
    CHECK_THROWS(x.partial("z"));
}

TEST_CASE("ring axioms and mixed partials on random triples") {
    auto c = xy();
    std::mt19937_64 rng(12345);
    for (int it = 0; it < 50; ++it) {
        Poly p = random_poly(c, rng), q = random_poly(c, rng), r = random_poly(c, rng);
        CHECK((p * q) * r == p * (q * r));
        CHECK(p * (q + r) == p * q + p * r);
        CHECK(p * q == q * p);
        CHECK(p.partial(0).partial(1) == p.partial(1).partial(0));
    }
}

TEST_CASE("graded-lex term order is canonical") {
    auto c = xy();
    Poly p = Poly::var(c, "y") + Poly::var(c, "x") * Poly::var(c, "x");
    // degree-1 term sorts before degree-2 term
    CHECK(p.to_string() == "y + x^2");
}

TEST_CASE("kernel_basis canonical cases") {
    CHECK(ExactMatrix::identity(2).kernel_basis().empty());  // injective
    ExactMatrix z(2, 3);
    CHECK(z.kernel_basis().size() == 3);                     // everything in kernel
    ExactMatrix m(2, 2);
    m.at(0, 0) = QI(1); m.at(0, 1) = QI(2);
    m.at(1, 0) = QI(2); m.at(1, 1) = QI(4);
    auto kb = m.kernel_basis();
    REQUIRE(kb.size() == 1);
    // canonical RREF representative of span{(-2,1)}
    CHECK(kb[0][0] == QI(1));
    CHECK(kb[0][1] == QI(Q(-1, 2)));
    for (auto& v : kb) {
        auto mv = m.apply(v);
        for (auto& e : mv) CHECK(e.is_zero());
    }
}

TEST_CASE("rank-nullity and exact kernels on random matrices") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> dco(-3, 3);
    for (int it = 0; it < 40; ++it) {
        int r = 1 + (int)(rng() % 4), c = 1 + (int)(rng() % 4);
        ExactMatrix m(r, c);
        for (auto& e : m.a) e = QI(Q(dco(rng)));
        auto kb = m.kernel_basis();
        CHECK(m.rank() + (int)kb.size() == c);
        for (auto& v : kb) {
            auto mv = m.apply(v);
            for (auto& e : mv) CHECK(e.is_zero());
        }
    }
}

TEST_CASE("quotient_dim") {
    // im = ker -> 0
    std::vector<Vec> a = {{QI(1), QI(0)}};
    CHECK(quotient_dim(a, a, 2).dim == 0);
    // no relations
    CHECK(quotient_dim({}, a, 2).dim == 1);
    // containment violated
    std::vector<Vec> b = {{QI(0), QI(1)}};
    CHECK_THROWS(quotient_dim(b, a, 2));
    // polynomial de Rham H^0 on R^1, degree <= 3: ker d = constants, im = 0.
    // 0-forms with basis 1,x,x^2,x^3; d matrix maps to coefficients of 1,x,x^2.
    ExactMatrix d(3, 4);
    d.at(0, 1) = QI(1); d.at(1, 2) = QI(2); d.at(2, 3) = QI(3);
    auto ker = d.kernel_basis();
    CHECK(quotient_dim({}, ker, 4).dim == 1);
}

TEST_CASE("solve") {
    ExactMatrix m(2, 2);
    m.at(0, 0) = QI(1); m.at(0, 1) = QI(1);
    m.at(1, 0) = QI(0); m.at(1, 1) = QI(2);
    auto x = m.solve({QI(3), QI(4)});
    REQUIRE(x.has_value());
    CHECK((*x)[0] == QI(1));
    CHECK((*x)[1] == QI(2));
    ExactMatrix s(2, 1);
    s.at(0, 0) = QI(1); s.at(1, 0) = QI(1);
    CHECK(!s.solve({QI(0), QI(1)}).has_value());
}

TEST_CASE("formal variables: nilpotent reduction inside poly arithmetic") {
    auto c = make_ctx({"x"}, {"eps"}, {{2}});
    Poly x = Poly::var(c, "x"), e = Poly::var(c, "eps");
    CHECK((e * e).is_zero());
    CHECK((x + e) * (x + e) == x * x + QI(2) * (x * e));
    CHECK(e.in_maximal_ideal());
    CHECK(!(x + e).in_maximal_ideal());
    CHECK(e.formal_valuation() == 1);
}

TEST_CASE("time integral") {
    auto c = make_ctx({"x"}, {}, {}, true);
    Poly b = Poly::var(c, "x"), t = Poly::var(c, "t");
    CHECK(b.time_integral() == b);                               // constant in t
    CHECK((b * t).time_integral() == b * QI(Q(1, 2)));           // b/2
    Poly p = b + (b * b) * t * t;
    CHECK(p.time_integral() == b + (b * b) * QI(Q(1, 3)));       // termwise
}
