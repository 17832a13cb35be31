#include "gcdeform/artin.hpp"

#include "gcdeform/matrix.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace gcdef {

namespace {

bool divides(const Expo& r, const Expo& e) {
    for (size_t i = 0; i < r.size(); ++i)
        if (e[i] < r[i]) return false;
    return true;
}

int total(const Expo& e) {
    int d = 0;
    for (int x : e) d += x;
    return d;
}

}  // namespace

ArtinAlgebra make_artin(std::vector<std::string> gens, std::vector<Expo> relations) {
    ArtinAlgebra a;
    a.gens = std::move(gens);
    int g = static_cast<int>(a.gens.size());
    for (Expo& r : relations) {
        if ((int)r.size() != g) throw std::invalid_argument("relation exponent length mismatch");
        if (total(r) == 0) throw std::invalid_argument("1 lies in the ideal");
        a.relations.push_back(r);
    }
    std::sort(a.relations.begin(), a.relations.end());
    a.relations.erase(std::unique(a.relations.begin(), a.relations.end()), a.relations.end());
    // Finiteness: each generator needs a pure power inside the ideal.
    for (int i = 0; i < g; ++i) {
        bool pure = false;
        for (const Expo& r : a.relations) {
            bool only_i = r[i] > 0;
            for (int j = 0; j < g && only_i; ++j)
                if (j != i && r[j] > 0) only_i = false;
            if (only_i) { pure = true; break; }
        }
        if (!pure)
            throw std::invalid_argument("quotient is not Artinian: generator " + a.gens[i] +
                                        " has no pure-power relation");
    }
    // Enumerate the monomial basis (monomials not divisible by any relation).
    std::set<Expo> seen;
    std::vector<Expo> frontier = {Expo(g, 0)};
    seen.insert(frontier[0]);
    while (!frontier.empty()) {
        std::vector<Expo> next;
        for (const Expo& e : frontier)
            for (int i = 0; i < g; ++i) {
                Expo f = e;
                f[i] += 1;
                bool dead = false;
                for (const Expo& r : a.relations)
                    if (divides(r, f)) { dead = true; break; }
                if (!dead && seen.insert(f).second) next.push_back(f);
            }
        frontier = std::move(next);
    }
    a.basis.assign(seen.begin(), seen.end());
    std::sort(a.basis.begin(), a.basis.end(), [](const Expo& x, const Expo& y) {
        if (total(x) != total(y)) return total(x) < total(y);
        return x < y;
    });
    int maxdeg = 0;
    for (const Expo& e : a.basis) {
        maxdeg = std::max(maxdeg, total(e));
        if (total(e) > 0) a.mbasis.push_back(e);
    }
    a.nilpotency_order = maxdeg + 1;
    return a;
}

ArtinAlgebra artin_dual(int power, const std::string& name) {
    return make_artin({name}, {{power}});
}

Poly ArtinHom::apply(const Poly& x) const {
    PolyCtxPtr tctx = target.ctx();
    if (x.ctx->n_geom != 0 || (int)x.ctx->vars.size() != (int)source.gens.size())
        throw std::invalid_argument("ArtinHom::apply expects an element of the source algebra");
    Poly out = Poly::zero(tctx);
    for (auto& [e, v] : x.terms) {
        Poly term = Poly::constant(tctx, v);
        for (size_t i = 0; i < source.gens.size(); ++i)
            for (int k = 0; k < e[i]; ++k) term = term * images[i];
        out += term;
    }
    return out;
}

bool ArtinHom::is_surjective() const {
    // By Nakayama: surjective iff generator images span m/m^2 of the target.
    // Rows indexed by the degree-1 monomials that survive in the target basis.
    std::vector<int> live;
    for (const Expo& e : target.mbasis)
        if (total(e) == 1)
            for (size_t i = 0; i < e.size(); ++i)
                if (e[i] == 1) live.push_back(static_cast<int>(i));
    ExactMatrix m(static_cast<int>(live.size()), static_cast<int>(images.size()));
    for (int j = 0; j < (int)images.size(); ++j)
        for (auto& [e, v] : images[j].terms)
            if (total(e) == 1)
                for (int r = 0; r < (int)live.size(); ++r)
                    if (e[live[r]] == 1) m.at(r, j) = v;
    return m.rank() == (int)live.size();
}

ArtinHom make_artin_hom(ArtinAlgebra source, ArtinAlgebra target, std::vector<Poly> images) {
    if (images.size() != source.gens.size())
        throw std::invalid_argument("need one image per source generator");
    ArtinHom h{std::move(source), std::move(target), std::move(images)};
    PolyCtxPtr tctx = h.target.ctx();
    for (const Poly& im : h.images) {
        im.check_ctx(Poly::zero(tctx));
        if (!im.in_maximal_ideal())
            throw std::invalid_argument("generator image not in the maximal ideal");
    }
    // Multiplicativity on the monomial presentation: relations must map to 0.
    for (const Expo& r : h.source.relations) {
        Poly val = Poly::one(tctx);
        for (size_t i = 0; i < h.source.gens.size(); ++i)
            for (int k = 0; k < r[i]; ++k) val = val * h.images[i];
        if (!val.is_zero())
            throw std::invalid_argument("images do not kill a relation monomial");
    }
    return h;
}

ArtinHom compose(const ArtinHom& g, const ArtinHom& f) {
    if (!f.target.same_as(g.source)) throw std::invalid_argument("homs not composable");
    std::vector<Poly> images;
    for (const Poly& im : f.images) images.push_back(g.apply(im));
    return make_artin_hom(f.source, g.target, std::move(images));
}

std::vector<SmallExtension> small_extension_chain(const ArtinHom& hom) {
    if (!hom.is_surjective()) throw std::invalid_argument("small_extension_chain: hom not surjective");
    PolyCtxPtr sctx = hom.source.ctx();
    // Identify source basis monomials killed by the hom, and require the rest
    // to map to linearly independent images (kernel spanned by monomials).
    std::vector<Expo> killed;
    std::vector<Poly> surviving_images;
    for (const Expo& e : hom.source.mbasis) {
        Poly mono = Poly::monomial(sctx, e, QI(1));
        Poly im = hom.apply(mono);
        if (im.is_zero()) killed.push_back(e);
        else surviving_images.push_back(im);
    }
    // dimension check: #surviving (+1 for unity) must equal dim target
    if (surviving_images.size() + killed.size() != hom.source.mbasis.size() ||
        surviving_images.size() != hom.target.mbasis.size())
        throw std::invalid_argument(
            "small_extension_chain: kernel is not spanned by basis monomials (unsupported)");
    // Quotient one killed monomial at a time, highest total degree first.
    std::sort(killed.begin(), killed.end(), [](const Expo& x, const Expo& y) {
        if (total(x) != total(y)) return total(x) > total(y);
        return x > y;
    });
    std::vector<SmallExtension> chain;
    ArtinAlgebra current = hom.source;
    std::vector<Expo> extra;
    for (const Expo& kmono : killed) {
        extra.push_back(kmono);
        std::vector<Expo> rel = hom.source.relations;
        rel.insert(rel.end(), extra.begin(), extra.end());
        ArtinAlgebra next = make_artin(hom.source.gens, rel);
        std::vector<Poly> imgs;
        PolyCtxPtr nctx = next.ctx();
        for (const std::string& gname : current.gens) imgs.push_back(Poly::var(nctx, gname));
        SmallExtension ext;
        ext.hom = make_artin_hom(current, next, std::move(imgs));
        ext.kernel_generator = Poly::monomial(current.ctx(), kmono, QI(1));
        chain.push_back(ext);
        current = next;
    }
    // Final link: identify `current` with the target through the hom's images.
    if (!current.same_as(hom.target)) {
        std::vector<Poly> imgs;
        PolyCtxPtr tctx = hom.target.ctx();
        for (size_t i = 0; i < current.gens.size(); ++i) imgs.push_back(hom.images[i]);
        ArtinHom iso = make_artin_hom(current, hom.target, std::move(imgs));
        if (!chain.empty()) {
            // fold the isomorphism into the last link so the chain composes to hom
            SmallExtension& last = chain.back();
            last.hom = compose(iso, last.hom);
        } else {
            // hom itself is an isomorphism; nothing to factor
        }
    }
    return chain;
}

}  // namespace gcdef
