#pragma once

// Local Artin R-algebras presented by monomial ideals, algebra homomorphisms,
// small extensions, and the finite monomial basis / nilpotency data that makes
// every exponential series in the library terminate exactly.
//
// Elements of an algebra (and A-valued coefficients elsewhere) are ordinary
// Poly values over a context whose formal variables are the algebra
// generators; see poly.hpp.

#include <string>
#include <vector>

#include "gcdeform/poly.hpp"

namespace gcdef {

struct ArtinAlgebra {
    std::vector<std::string> gens;     // generator labels (positive degree)
    std::vector<Expo> relations;       // monomial ideal generators, exponents over gens
    std::vector<Expo> basis;           // finite monomial basis of A (includes 1)
    std::vector<Expo> mbasis;          // positive-degree basis monomials (basis of m)
    int nilpotency_order = 1;          // least N with m^N = 0

    // Context for elements of A itself (no geometric variables).
    PolyCtxPtr ctx() const { return make_ctx({}, gens, relations); }
    // Context for A-valued polynomial functions on a chart.
    PolyCtxPtr ctx_on(std::vector<std::string> geometric, bool with_time = false) const {
        return make_ctx(std::move(geometric), gens, relations, with_time);
    }

    bool same_as(const ArtinAlgebra& o) const {
        return gens == o.gens && relations == o.relations;
    }
};

// Build an algebra from generator labels and relation monomials (exponent
// vectors over the generators). Throws when the quotient is not Artinian
// (infinite monomial basis) or when 1 lies in the ideal.
ArtinAlgebra make_artin(std::vector<std::string> gens, std::vector<Expo> relations);

// Convenience: R[eps]/(eps^(N)) with N = power killed (basis 1..eps^(N-1)).
ArtinAlgebra artin_dual(int power, const std::string& name = "eps");

struct ArtinHom {
    ArtinAlgebra source, target;
    std::vector<Poly> images;  // one element of target per source generator

    // Apply to an element of the source algebra (Poly over source.ctx()).
    Poly apply(const Poly& x) const;
    bool is_surjective() const;
};

// Validates unitality/multiplicativity (images kill every relation monomial)
// and locality (images lie in the maximal ideal).
ArtinHom make_artin_hom(ArtinAlgebra source, ArtinAlgebra target, std::vector<Poly> images);
ArtinHom compose(const ArtinHom& g, const ArtinHom& f);  // g after f

struct SmallExtension {
    ArtinHom hom;            // surjective, principal kernel
    Poly kernel_generator;   // element of hom.source annihilated by m
};

// Factor a surjective hom through a finite chain of small extensions, from the
// source down to the target. Requires the kernel to be spanned by source basis
// monomials (true for all quotient maps between monomial presentations used
// here); throws otherwise.
std::vector<SmallExtension> small_extension_chain(const ArtinHom& hom);

// ---------------------------------------------------------------------------
// Generic nilpotent exponential calculus. A value type V needs +, unary -,
// scaling by QI, is_zero(), and a caller-supplied bilinear bracket/action.
// All series terminate by nilpotency; `order` is a strict bound on the depth
// after which iterated brackets/actions vanish (use the algebra's
// nilpotency_order).

template <class V, class W, class Action>
W exp_action(const V& x, const W& v, Action act, int order) {
    W result = v;
    W term = v;
    Q fact(1);
    for (int k = 1; k <= order + 1; ++k) {
        term = act(x, term);
        if (term.is_zero()) return result;
        fact *= k;
        result = result + term * QI(Q(1) / fact);
    }
    if (!act(x, term).is_zero())
        throw std::domain_error("exp_action: series does not terminate (input not nilpotent)");
    return result;
}

// s-polynomial with V coefficients, used internally by bch.
template <class V>
struct SPoly {
    std::vector<V> c;  // c[k] is the coefficient of s^k
    void trim() {
        while (!c.empty() && c.back().is_zero()) c.pop_back();
    }
    bool operator==(const SPoly& o) const {
        SPoly a = *this, b = o;
        a.trim();
        b.trim();
        if (a.c.size() != b.c.size()) return false;
        for (size_t i = 0; i < a.c.size(); ++i)
            if (!(a.c[i] - b.c[i]).is_zero()) return false;
        return true;
    }
};

// Baker-Campbell-Hausdorff: the unique z with e^x e^y = e^z, computed by
// Picard iteration of dz/ds = psi(ad_z)(y), z(0) = x, where
// psi(w) = w/(1 - e^{-w}) expands with Bernoulli coefficients. Exact and
// terminating because every bracket raises the m-adic valuation.
template <class V, class Bracket>
V bch(const V& x, const V& y, Bracket br, int order) {
    // psi_k = B+_k / k! for k = 0..8 (odd Bernoulli numbers beyond 1 vanish).
    static const Q psi[9] = {Q(1),        Q(1, 2),  Q(1, 12), Q(0), Q(-1, 720),
                             Q(0),        Q(1, 30240), Q(0),  Q(-1, 1209600)};
    if (order > 8)
        throw std::domain_error("bch: nilpotency order beyond tabulated psi coefficients");
    SPoly<V> z;
    z.c = {x};
    for (int iter = 0; iter <= order + 2; ++iter) {
        // w(s) = sum_k psi_k ad_z(s)^k (y)
        SPoly<V> adky;
        adky.c = {y};
        SPoly<V> w;
        w.c = {y * QI(psi[0])};
        for (int k = 1; k <= order && k <= 8; ++k) {
            // adky <- [z(s), adky(s)]
            SPoly<V> next;
            next.c.assign(z.c.size() + adky.c.size(), x - x /*zero of V*/);
            for (size_t i = 0; i < z.c.size(); ++i)
                for (size_t j = 0; j < adky.c.size(); ++j)
                    next.c[i + j] = next.c[i + j] + br(z.c[i], adky.c[j]);
            next.trim();
            adky = next;
            if (adky.c.empty()) break;
            if (psi[k] == 0) continue;
            if (w.c.size() < adky.c.size()) w.c.resize(adky.c.size(), x - x);
            for (size_t j = 0; j < adky.c.size(); ++j)
                w.c[j] = w.c[j] + adky.c[j] * QI(psi[k]);
        }
        // znew(s) = x + \int_0^s w
        SPoly<V> znew;
        znew.c.assign(w.c.size() + 1, x - x);
        znew.c[0] = x;
        for (size_t k = 0; k < w.c.size(); ++k)
            znew.c[k + 1] = znew.c[k + 1] + w.c[k] * QI(Q(1, static_cast<long>(k) + 1));
        znew.trim();
        if (znew == z) break;
        z = znew;
        if (iter == order + 2)
            throw std::domain_error("bch: Picard iteration failed to stabilize");
    }
    // z(1)
    V out = x - x;
    for (const V& coef : z.c) out = out + coef;
    return out;
}

// Given the logarithm family l(t) of a one-parameter group homomorphism
// phi(t) = e^{l(t)} (l represented by its t-coefficients), return the unique x
// with phi(t) = e^{tx}; throws when the family is not a homomorphism.
template <class V>
V one_param_decompose_log(const std::vector<V>& lcoef) {
    if (lcoef.empty()) throw std::invalid_argument("empty family");
    if (!lcoef[0].is_zero()) throw std::invalid_argument("family does not start at identity");
    V x = lcoef.size() > 1 ? lcoef[1] : lcoef[0];  // l'(0)
    for (size_t k = 2; k < lcoef.size(); ++k)
        if (!lcoef[k].is_zero())
            throw std::invalid_argument("family is not a one-parameter homomorphism");
    return x;
}

}  // namespace gcdef
