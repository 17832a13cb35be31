#include "gcdeform/deform.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace gcdef {

namespace {

PolyCtxPtr bundle_ctx(const HermData& base) {
    if (base.a.empty()) throw std::invalid_argument("bundle data has no vertices");
    return base.a.begin()->second.ctx;
}

DiffForm uval(const BundleDeformation& L, int i) {
    auto it = L.u.find(i);
    return it == L.u.end() ? DiffForm(bundle_ctx(L.base), 1) : it->second;
}

Poly gval(const std::map<int, Poly>& g, int i, const PolyCtxPtr& ctx) {
    auto it = g.find(i);
    return it == g.end() ? Poly::zero(ctx) : it->second;
}

Poly iota_fn(const VectorField& xi, const DiffForm& w) {
    // contraction of a 1-form down to a function
    return contract(xi, w).coef({});
}

DiffForm d_fn(const Poly& f) { return ext_d(DiffForm::from_function(f)); }

// \int_0^1 e^{t tau}(p) dt = sum_k L(tau)^k(p) / (k! (k+1)), exact by nilpotency.
Poly exp_integral(const VectorField& tau, const Poly& p, int order) {
    Poly acc = p;
    Poly term = p;
    Q fact(1);
    for (int k = 1; k <= order + 1; ++k) {
        term = tau.apply(term);
        if (term.is_zero()) return acc;
        fact *= k;
        acc += term * QI(Q(1) / (fact * (k + 1)));
    }
    if (!tau.apply(term).is_zero())
        throw std::domain_error("exp_integral: flow is not nilpotent");
    return acc;
}

// Monomials in the geometric variables of total degree <= D, in a fixed order.
void monomials_up_to(const PolyCtxPtr& ctx, int D, std::vector<Expo>& out) {
    Expo e(ctx->nvars(), 0);
    std::function<void(int, int)> rec = [&](int i, int left) {
        if (i == ctx->n_geom) {
            out.push_back(e);
            return;
        }
        for (int k = 0; k <= left; ++k) {
            e[i] = k;
            rec(i + 1, left - k);
        }
        e[i] = 0;
    };
    rec(0, D);
}

// A spanning forest of the nerve's 1-skeleton: parent[v] = -1 for roots,
// otherwise the BFS parent; visit order is returned for propagation.
struct Forest {
    std::vector<int> parent;
    std::vector<int> bfs_order;
};

Forest spanning_forest(const NerveCover& cover) {
    std::vector<std::vector<int>> adj(cover.verts);
    for (auto& e : cover.of_dim(1)) {
        adj[e[0]].push_back(e[1]);
        adj[e[1]].push_back(e[0]);
    }
    Forest f;
    f.parent.assign(cover.verts, -2);
    for (int r = 0; r < cover.verts; ++r) {
        if (f.parent[r] != -2) continue;
        f.parent[r] = -1;
        std::vector<int> queue{r};
        for (size_t qi = 0; qi < queue.size(); ++qi) {
            int v = queue[qi];
            f.bfs_order.push_back(v);
            for (int w : adj[v])
                if (f.parent[w] == -2) {
                    f.parent[w] = v;
                    queue.push_back(w);
                }
        }
    }
    return f;
}

}  // namespace

// ---------------------------------------------------------------------------
// Bundle deformations

Poly BundleDeformation::fval(int i, int j) const {
    if (i == j) return Poly::zero(bundle_ctx(base));
    bool flip = i > j;
    auto it = f.find(flip ? std::make_pair(j, i) : std::make_pair(i, j));
    Poly v = it == f.end() ? Poly::zero(bundle_ctx(base)) : it->second;
    return flip ? -v : v;
}

Poly BundleDeformation::c_hat(int i, int j) const { return base.cval(i, j) + fval(i, j); }

DiffForm BundleDeformation::a_hat(int i) const { return base.a.at(i) + uval(*this, i); }

bool BundleDeformation::operator==(const BundleDeformation& o) const {
    if (base.cover.verts != o.base.cover.verts) return false;
    for (int v = 0; v < base.cover.verts; ++v)
        if (!(a_hat(v) == o.a_hat(v))) return false;
    for (auto& e : base.cover.of_dim(1)) {
        if (!(base.cval(e[0], e[1]) - o.base.cval(e[0], e[1])).is_zero()) return false;
        if (!(fval(e[0], e[1]) - o.fval(e[0], e[1])).is_zero()) return false;
    }
    return true;
}

BundleDeformation make_bundle_deformation(HermData base,
                                          std::map<std::pair<int, int>, Poly> f,
                                          std::map<int, DiffForm> u) {
    BundleDeformation L{std::move(base), std::move(f), std::move(u)};
    const NerveCover& cov = L.base.cover;
    for (auto& [key, p] : L.f) {
        if (!(key.first < key.second) || !cov.has({key.first, key.second}))
            throw std::invalid_argument("transition deformation on a non-edge");
        if (!p.in_maximal_ideal())
            throw std::invalid_argument("transition deformation not in the maximal ideal");
    }
    for (auto& [v, w] : L.u) {
        if (v < 0 || v >= cov.verts)
            throw std::invalid_argument("connection deformation on a non-vertex");
        if (w.deg != 1) throw std::invalid_argument("connection deformation must be a 1-form");
        if (!w.in_maximal_ideal())
            throw std::invalid_argument("connection deformation not in the maximal ideal");
    }
    for (auto& e : cov.of_dim(1))
        if (!(uval(L, e[1]) - uval(L, e[0]) == d_fn(L.fval(e[0], e[1]))))
            throw std::invalid_argument("connection deformations do not match d f on an edge");
    for (auto& t : cov.of_dim(2))
        if (!(L.fval(t[1], t[2]) - L.fval(t[0], t[2]) + L.fval(t[0], t[1])).is_zero())
            throw std::invalid_argument("transition deformations violate the cocycle identity");
    return L;
}

BundleDeformation trivial_bundle_deformation(const HermData& base) {
    return make_bundle_deformation(base, {}, {});
}

bool is_bundle_morphism(const BundleDeformation& from, const BundleDeformation& to,
                        const std::map<int, Poly>& g) {
    PolyCtxPtr ctx = bundle_ctx(from.base);
    const NerveCover& cov = from.base.cover;
    for (auto& [v, p] : g)
        if (!p.in_maximal_ideal()) return false;
    for (auto& e : cov.of_dim(1)) {
        Poly gi = gval(g, e[0], ctx), gj = gval(g, e[1], ctx);
        if (!(to.fval(e[0], e[1]) - from.fval(e[0], e[1]) - gj + gi).is_zero()) return false;
    }
    for (int v = 0; v < cov.verts; ++v)
        if (!(uval(to, v) - uval(from, v) == d_fn(gval(g, v, ctx)))) return false;
    return true;
}

BundleDeformation bundle_act(const SymElement& x, const BundleDeformation& L) {
    std::map<std::pair<int, int>, Poly> nf;
    std::map<int, DiffForm> nu;
    for (auto& e : L.base.cover.of_dim(1)) {
        Poly v = exp_vf_on_function(x.xi, L.c_hat(e[0], e[1]), x.order) - L.base.cval(e[0], e[1]);
        if (!v.is_zero()) nf[{e[0], e[1]}] = v;
    }
    for (int v = 0; v < L.base.cover.verts; ++v) {
        DiffForm w = exp_vf_on_form(x.xi, L.a_hat(v), x.order) - x.u - L.base.a.at(v);
        if (!w.is_zero()) nu[v] = w;
    }
    return make_bundle_deformation(L.base, std::move(nf), std::move(nu));
}

std::map<int, Poly> bundle_act_morphism(const SymElement& x, const std::map<int, Poly>& g) {
    std::map<int, Poly> out;
    for (auto& [v, p] : g) out[v] = exp_vf_on_function(x.xi, p, x.order);
    return out;
}

std::pair<std::map<int, Poly>, BundleDeformation> normalize_transitions(
    const BundleDeformation& L) {
    PolyCtxPtr ctx = bundle_ctx(L.base);
    Forest forest = spanning_forest(L.base.cover);
    std::map<int, Poly> g;
    for (int v : forest.bfs_order) {
        int p = forest.parent[v];
        // solve g_J - g_I = -f_IJ so the acted edge parts vanish
        g[v] = p < 0 ? Poly::zero(ctx) : g[p] - L.fval(p, v);
    }
    for (auto& e : L.base.cover.of_dim(1))
        if (!(L.fval(e[0], e[1]) + g[e[1]] - g[e[0]]).is_zero())
            throw std::domain_error(
                "transition deformation is not exact over the nerve (holonomy on a non-tree edge)");
    std::map<int, DiffForm> nu;
    for (int v = 0; v < L.base.cover.verts; ++v) {
        DiffForm w = uval(L, v) + d_fn(g[v]);
        if (!w.is_zero()) nu[v] = w;
    }
    return {g, make_bundle_deformation(L.base, {}, std::move(nu))};
}

// ---------------------------------------------------------------------------
// Brane deformations

Poly BraneDeformation::rho_apply(const Poly& ambient) const {
    return ambient.subst_geometric(base.Z.zchart.ctx, rho);
}

DiffForm BraneDeformation::rho_apply_form(const DiffForm& ambient) const {
    DiffForm out(base.Z.zchart.ctx, ambient.deg);
    for (auto& [idx, coef] : ambient.comps) {
        DiffForm term = DiffForm::from_function(rho_apply(coef));
        for (int i : idx) term = wedge(term, d_fn(rho[i]));
        out += term;
    }
    return out;
}

BraneDeformation make_brane_deformation(Brane base, std::vector<Poly> rho,
                                        BundleDeformation bundle, int order) {
    if ((int)rho.size() != base.Z.ambient.dim())
        throw std::invalid_argument("need one coordinate image per ambient coordinate");
    PolyCtxPtr zc = base.Z.zchart.ctx;
    for (size_t zi = 0; zi < base.Z.kept.size(); ++zi)
        if (!(rho[base.Z.kept[zi]] - Poly::var(zc, (int)zi)).in_maximal_ideal())
            throw std::invalid_argument("coordinate image does not reduce to the restriction");
    for (int j : base.Z.killed)
        if (!rho[j].in_maximal_ideal())
            throw std::invalid_argument("killed-coordinate image does not reduce to zero");
    if (order < 1) throw std::invalid_argument("nilpotency order must be positive");
    // bundle must deform this brane's Hermitian data
    for (int v = 0; v < base.L.cover.verts; ++v)
        if (!(bundle.base.a.at(v) == base.L.a.at(v)))
            throw std::invalid_argument("bundle deformation is over different connection data");
    for (auto& e : base.L.cover.of_dim(1))
        if (!(bundle.base.cval(e[0], e[1]) - base.L.cval(e[0], e[1])).is_zero())
            throw std::invalid_argument("bundle deformation is over different transition data");
    return BraneDeformation{std::move(base), std::move(rho), std::move(bundle), order};
}

BraneDeformation trivial_deformation(const Brane& B, int order) {
    std::vector<Poly> rho;
    for (int j = 0; j < B.Z.ambient.dim(); ++j)
        rho.push_back(B.Z.restrict_poly(Poly::var(B.Z.ambient.ctx, j)));
    return make_brane_deformation(B, std::move(rho), trivial_bundle_deformation(B.L), order);
}

bool deformations_equal(const BraneDeformation& a, const BraneDeformation& b) {
    if (a.rho.size() != b.rho.size()) return false;
    for (size_t j = 0; j < a.rho.size(); ++j)
        if (!(a.rho[j] - b.rho[j]).is_zero()) return false;
    return a.bundle == b.bundle;
}

VectorField realize_xi(const BraneDeformation& B) {
    PolyCtxPtr amb = B.base.Z.ambient.ctx;
    VectorField xi(amb);
    for (int iter = 0; iter <= B.order + 1; ++iter) {
        bool done = true;
        std::vector<Poly> residual;
        for (int j = 0; j < B.base.Z.ambient.dim(); ++j) {
            Poly image = B.base.Z.restrict_poly(
                exp_vf_on_function(xi, Poly::var(amb, j), B.order));
            residual.push_back(B.rho[j] - image);
            if (!residual.back().is_zero()) done = false;
        }
        if (done) return xi;
        for (int j = 0; j < B.base.Z.ambient.dim(); ++j)
            xi.comp[j] += B.base.Z.lift_poly(residual[j]);
    }
    throw std::domain_error("realize_xi: iteration failed to converge");
}

BraneDeformation brane_act(const BraneDeformation& B, const SymElement& g) {
    PolyCtxPtr amb = B.base.Z.ambient.ctx;
    std::vector<Poly> nrho;
    for (int j = 0; j < B.base.Z.ambient.dim(); ++j)
        nrho.push_back(B.rho_apply(exp_vf_on_function(g.xi, Poly::var(amb, j), B.order)));
    DiffForm rw = B.rho_apply_form(g.u);
    std::map<int, DiffForm> nu;
    for (int v = 0; v < B.base.L.cover.verts; ++v) {
        DiffForm w = uval(B.bundle, v) + rw;
        if (!w.is_zero()) nu[v] = w;
    }
    return make_brane_deformation(
        B.base, std::move(nrho),
        make_bundle_deformation(B.bundle.base, B.bundle.f, std::move(nu)), B.order);
}

BraneDeformation induced_deformation(const Brane& B, const GenSection& x, int order) {
    if (!x.in_maximal_ideal())
        throw std::invalid_argument("deforming section must lie in the maximal ideal");
    return brane_act(trivial_deformation(B, order), sym_exp(x, order));
}

bool is_compatible_deformation(const BraneDeformation& B, const GCStructure& J) {
    VectorField xi = realize_xi(B);
    std::vector<GenSection> gens = kb_generators(B.base);
    for (int v = 0; v < B.base.L.cover.verts; ++v) {
        SymElement g{B.base.Z.lift_form(uval(B.bundle, v)), xi, B.order};
        GenEndo Jv = sym_act_endo(g, J.endo);
        for (size_t i = 0; i < gens.size(); ++i)
            for (size_t j = i; j < gens.size(); ++j)
                if (!B.base.Z.vanishes_on_z(pairing(Jv.apply(gens[i]), gens[j])))
                    return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Equivalences

Equivalence identity_equivalence(const BraneDeformation& B) {
    return Equivalence{VectorField(B.base.Z.zchart.ctx), {},
                       SymElement::identity(B.base.Z.ambient.ctx, B.order)};
}

bool equivalences_equal(const Equivalence& a, const Equivalence& b) {
    if (!(a.tau == b.tau)) return false;
    if (!(a.z == b.z)) return false;
    PolyCtxPtr ctx = a.tau.ctx;
    std::map<int, Poly> all;
    for (auto& [v, p] : a.g) all.emplace(v, Poly::zero(ctx));
    for (auto& [v, p] : b.g) all.emplace(v, Poly::zero(ctx));
    for (auto& [v, zero] : all)
        if (!(gval(a.g, v, ctx) - gval(b.g, v, ctx)).is_zero()) return false;
    return true;
}

BraneDeformation apply_equivalence(const BraneDeformation& B, const VectorField& tau,
                                   const std::map<int, Poly>& g) {
    PolyCtxPtr zc = B.base.Z.zchart.ctx;
    std::vector<Poly> nrho;
    for (const Poly& r : B.rho) nrho.push_back(exp_vf_on_function(tau, r, B.order));
    SymElement flow{DiffForm(zc, 1), tau, B.order};
    BundleDeformation T = bundle_act(flow, B.bundle);
    // {g_I}: L' -> T determines L'
    std::map<std::pair<int, int>, Poly> nf;
    std::map<int, DiffForm> nu;
    for (auto& e : B.base.L.cover.of_dim(1)) {
        Poly v = T.fval(e[0], e[1]) - gval(g, e[1], zc) + gval(g, e[0], zc);
        if (!v.is_zero()) nf[{e[0], e[1]}] = v;
    }
    for (int v = 0; v < B.base.L.cover.verts; ++v) {
        DiffForm w = uval(T, v) - d_fn(gval(g, v, zc));
        if (!w.is_zero()) nu[v] = w;
    }
    return make_brane_deformation(
        B.base, std::move(nrho),
        make_bundle_deformation(B.base.L, std::move(nf), std::move(nu)), B.order);
}

bool is_equivalence(const BraneDeformation& from, const BraneDeformation& to,
                    const Equivalence& psi) {
    if (!psi.tau.in_maximal_ideal()) return false;
    for (auto& [v, p] : psi.g)
        if (!p.in_maximal_ideal()) return false;
    BraneDeformation lhs = apply_equivalence(from, psi.tau, psi.g);
    BraneDeformation rhs = psi.z.is_identity() ? to : brane_act(to, psi.z);
    return deformations_equal(lhs, rhs);
}

Equivalence equiv_compose(const Equivalence& psi2, const Equivalence& psi1, int order) {
    Equivalence out;
    out.tau = bch(psi2.tau, psi1.tau,
                  [](const VectorField& a, const VectorField& b) { return lie_bracket(a, b); },
                  order);
    PolyCtxPtr ctx = out.tau.ctx;
    std::map<int, Poly> all;
    for (auto& [v, p] : psi1.g) all.emplace(v, Poly::zero(ctx));
    for (auto& [v, p] : psi2.g) all.emplace(v, Poly::zero(ctx));
    for (auto& [v, zero] : all) {
        Poly p = exp_vf_on_function(psi2.tau, gval(psi1.g, v, ctx), order) + gval(psi2.g, v, ctx);
        if (!p.is_zero()) out.g[v] = p;
    }
    out.z = sym_mul(psi2.z, psi1.z);
    return out;
}

Equivalence equiv_inverse(const Equivalence& psi, int order) {
    Equivalence out;
    out.tau = -psi.tau;
    for (auto& [v, p] : psi.g) {
        Poly q = -exp_vf_on_function(out.tau, p, order);
        if (!q.is_zero()) out.g[v] = q;
    }
    out.z = sym_inv(psi.z);
    return out;
}

// ---------------------------------------------------------------------------
// First-order theory

Poly formal_linear_part(const Poly& p, const std::string& name) {
    int idx = p.ctx->var_index(name);
    Poly out(p.ctx);
    for (auto& [e, v] : p.terms) {
        if (e[idx] != 1) continue;
        Expo f = e;
        f[idx] = 0;
        out.add_term(f, v);
    }
    return out;
}

namespace {

std::string eps_name(const PolyCtxPtr& ctx) {
    std::string name;
    for (int i = ctx->n_geom; i < ctx->nvars(); ++i) {
        if (i == ctx->t_index) continue;
        if (!name.empty())
            throw std::invalid_argument("first-order theory needs a single formal generator");
        name = ctx->vars[i];
    }
    if (name.empty())
        throw std::invalid_argument("first-order theory needs dual-number coefficients");
    return name;
}

}  // namespace

BAlgForm first_order_class(const BraneDeformation& B, const GCStructure& J) {
    PolyCtxPtr zc = B.base.Z.zchart.ctx;
    std::string eps = eps_name(zc);
    auto [gamma, nb] = normalize_transitions(B.bundle);
    // with vanishing edge parts the connection deformations agree on every
    // edge; a connected nerve gives one global 1-form
    DiffForm u = uval(nb, 0);
    for (int v = 1; v < nb.base.cover.verts; ++v)
        if (!(uval(nb, v) == u))
            throw std::domain_error("first_order_class needs a connected nerve");
    GenSection x(realize_xi(B), B.base.Z.lift_form(u));
    BAlgForm cls = normal_mu(brane_frame(B.base, J), x);
    BAlgForm out = BAlgForm::zero(cls.ctx, cls.deg, cls.M);
    out.f = formal_linear_part(cls.f, eps);
    auto strip = [&](const std::vector<Poly>& src, std::vector<Poly>& dst) {
        for (size_t i = 0; i < src.size(); ++i) dst[i] = formal_linear_part(src[i], eps);
    };
    strip(cls.a, out.a);
    strip(cls.ab, out.ab);
    strip(cls.abc, out.abc);
    return out;
}

std::optional<BAlgForm> exactness_witness(const BraneFrame& fr, const BAlgForm& w) {
    if (w.deg != 1) throw std::invalid_argument("exactness test expects a degree-1 cochain");
    PolyCtxPtr ctx = w.ctx;
    int D = -1;
    for (const Poly& p : w.a) D = std::max(D, p.geometric_degree());
    if (D < 0) return BAlgForm::zero(ctx, 0, w.M);
    std::vector<Expo> pots, mons;
    monomials_up_to(ctx, D + 1, pots);
    monomials_up_to(ctx, D, mons);
    std::map<Expo, int> mon_index;
    for (size_t i = 0; i < mons.size(); ++i) mon_index[mons[i]] = (int)i;
    auto encode = [&](const BAlgForm& v) {
        Vec out((size_t)w.M * mons.size());
        for (int a = 0; a < w.M; ++a)
            for (auto& [e, c] : v.a[a].terms) {
                auto it = mon_index.find(e);
                if (it == mon_index.end())
                    throw std::domain_error("coefficient escapes the degree truncation");
                out[(size_t)a * mons.size() + it->second] = c;
            }
        return out;
    };
    ExactMatrix m((int)((size_t)w.M * mons.size()), (int)pots.size());
    for (size_t j = 0; j < pots.size(); ++j) {
        BAlgForm img = delta_l(fr, BAlgForm::from_function(
                                       Poly::monomial(ctx, pots[j], QI(1)), w.M));
        Vec col = encode(img);
        for (size_t i = 0; i < col.size(); ++i) m.at((int)i, (int)j) = col[i];
    }
    std::optional<Vec> sol = m.solve(encode(w));
    if (!sol) return std::nullopt;
    Poly pot = Poly::zero(ctx);
    for (size_t j = 0; j < pots.size(); ++j)
        pot += Poly::monomial(ctx, pots[j], (*sol)[j]);
    return BAlgForm::from_function(pot, w.M);
}

bool is_exact(const BraneFrame& fr, const BAlgForm& w) {
    return exactness_witness(fr, w).has_value();
}

// ---------------------------------------------------------------------------
// Restricted symmetries

RElement r_bracket(const DiffForm& F, const RElement& a, const RElement& b) {
    return RElement{lie_bracket(a.xi, b.xi),
                    a.xi.apply(b.f) - b.xi.apply(a.f) + iota_fn(b.xi, contract(a.xi, F))};
}

GenSection mu_r(const DiffForm& F, const RElement& a) {
    return GenSection(a.xi, contract(a.xi, F) - d_fn(a.f));
}

KElement make_k_element(const Brane& B, GenSection amb, RElement bdry) {
    const CoordSubmanifold& Z = B.Z;
    for (int j : Z.killed)
        if (!Z.vanishes_on_z(amb.vf.comp[j]))
            throw std::invalid_argument("ambient part is not tangent to Z");
    if (!(Z.restrict_tangent(amb.vf) == bdry.xi))
        throw std::invalid_argument("boundary vector field does not match the restriction");
    if (!(Z.restrict_form(amb.form) == contract(bdry.xi, B.F) - d_fn(bdry.f)))
        throw std::invalid_argument("boundary potential does not match the restricted form");
    return KElement{std::move(amb), std::move(bdry)};
}

KElement k_bracket(const Brane& B, const KElement& a, const KElement& b) {
    return make_k_element(B, ghat_bracket(a.amb, b.amb), r_bracket(B.F, a.bdry, b.bdry));
}

SymElement chi_exp(const KElement& y, int order) { return sym_exp(y.amb, order); }

Equivalence sigma_morphism(const Brane& B, const KElement& y, int order) {
    Equivalence out;
    out.tau = y.bdry.xi;
    for (auto& [v, a] : B.L.a) {
        Poly p = exp_integral(out.tau, iota_fn(out.tau, a) + y.bdry.f, order);
        if (!p.is_zero()) out.g[v] = p;
    }
    out.z = SymElement::identity(B.Z.ambient.ctx, order);
    return out;
}

// ---------------------------------------------------------------------------
// Descent

namespace {

std::string simplex_str(const std::vector<int>& s) {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
    os << ")";
    return os.str();
}

}  // namespace

std::vector<std::string> descent_validate(const DescentDatum& D) {
    std::vector<std::string> out;
    for (int v = 0; v < D.cover.verts; ++v)
        if (!D.objs.count(v)) out.push_back("vertex " + simplex_str({v}) + ": missing object");
    if (!out.empty()) return out;
    int order = D.objs.empty() ? 2 : D.objs.begin()->second.order;
    for (auto& e : D.cover.of_dim(1)) {
        auto it = D.psi.find({e[0], e[1]});
        if (it == D.psi.end()) {
            out.push_back("edge " + simplex_str(e) + ": missing transition");
            continue;
        }
        if (!is_equivalence(D.objs.at(e[1]), D.objs.at(e[0]), it->second))
            out.push_back("edge " + simplex_str(e) + ": transition is not an equivalence");
    }
    for (auto& t : D.cover.of_dim(2)) {
        auto ab = D.psi.find({t[0], t[1]});
        auto bc = D.psi.find({t[1], t[2]});
        auto ac = D.psi.find({t[0], t[2]});
        if (ab == D.psi.end() || bc == D.psi.end() || ac == D.psi.end()) continue;
        if (!equivalences_equal(equiv_compose(ab->second, bc->second, order), ac->second))
            out.push_back("triangle " + simplex_str(t) + ": cocycle fails");
    }
    return out;
}

DescentDatum restrict_global(const BraneDeformation& B, const NerveCover& cover) {
    DescentDatum D;
    D.cover = cover;
    for (int v = 0; v < cover.verts; ++v) D.objs.emplace(v, B);
    for (auto& e : cover.of_dim(1))
        D.psi.emplace(std::make_pair(e[0], e[1]), identity_equivalence(B));
    return D;
}

BraneDeformation reassemble(const DescentDatum& D) {
    std::vector<std::string> bad = descent_validate(D);
    if (!bad.empty()) throw std::invalid_argument("invalid descent datum: " + bad.front());
    if (D.objs.empty()) throw std::invalid_argument("empty descent datum");
    for (auto& [e, psi] : D.psi)
        if (!psi.z.is_identity())
            throw std::domain_error("reassembly requires strict transitions");
    int order = D.objs.begin()->second.order;
    PolyCtxPtr zc = D.objs.begin()->second.base.Z.zchart.ctx;

    // tau of the transition objs[b] -> objs[a] for arbitrary vertex order
    auto tau_of = [&](int a, int b) {
        return a < b ? D.psi.at({a, b}).tau : -D.psi.at({b, a}).tau;
    };
    Forest forest = spanning_forest(D.cover);
    // flows sigma_v aligning all embeddings: e^{sigma_b} = e^{sigma_a} e^{tau_ab}
    std::map<int, VectorField> sigma;
    for (int v : forest.bfs_order) {
        int p = forest.parent[v];
        sigma[v] = p < 0 ? VectorField(zc)
                         : bch(sigma[p], tau_of(p, v),
                               [](const VectorField& a, const VectorField& b) {
                                   return lie_bracket(a, b);
                               },
                               order);
    }

    // per-vertex correction: normalize bundle transitions, then apply sigma
    std::map<int, Equivalence> phi;
    for (auto& [v, obj] : D.objs) {
        auto [gam, nb] = normalize_transitions(obj.bundle);
        Equivalence norm;
        norm.tau = VectorField(zc);
        for (auto& [i, p] : gam)
            if (!p.is_zero()) norm.g[i] = -p;
        norm.z = SymElement::identity(obj.base.Z.ambient.ctx, order);
        Equivalence flow = norm;
        flow.g.clear();
        flow.tau = sigma[v];
        phi[v] = equiv_compose(flow, norm, order);
    }

    std::map<int, BraneDeformation> objs2;
    for (auto& [v, obj] : D.objs)
        objs2.emplace(v, apply_equivalence(obj, phi[v].tau, phi[v].g));

    // conjugated transitions must be pure bundle shifts by a global function
    std::map<std::pair<int, int>, Poly> shift;
    for (auto& e : D.cover.of_dim(1)) {
        Equivalence t = equiv_compose(
            equiv_compose(phi[e[0]], D.psi.at({e[0], e[1]}), order),
            equiv_inverse(phi[e[1]], order), order);
        if (!t.tau.is_zero())
            throw std::domain_error("descent flow holonomy on edge " + simplex_str(e));
        Poly common = gval(t.g, 0, zc);
        for (auto& [i, p] : t.g)
            if (!(p - common).is_zero())
                throw std::domain_error("descent bundle shift is not global on edge " +
                                        simplex_str(e));
        shift[{e[0], e[1]}] = common;
    }
    auto shift_of = [&](int a, int b) {
        return a < b ? shift[{a, b}] : -shift[{b, a}];
    };

    // absorb the shifts: h_b = h_a - shift_ab on the forest, verified elsewhere
    std::map<int, Poly> h;
    for (int v : forest.bfs_order) {
        int p = forest.parent[v];
        h[v] = p < 0 ? Poly::zero(zc) : h[p] - shift_of(p, v);
    }
    for (auto& e : D.cover.of_dim(1))
        if (!(shift_of(e[0], e[1]) - h[e[0]] + h[e[1]]).is_zero())
            throw std::domain_error("descent shift holonomy on edge " + simplex_str(e));

    std::optional<BraneDeformation> glued;
    for (auto& [v, obj] : objs2) {
        std::map<int, Poly> gv;
        for (int i = 0; i < obj.base.L.cover.verts; ++i)
            if (!h[v].is_zero()) gv[i] = -h[v];
        BraneDeformation final_v = apply_equivalence(obj, VectorField(zc), gv);
        if (!glued)
            glued = final_v;
        else if (!deformations_equal(*glued, final_v))
            throw std::domain_error("descent datum is not effective over this nerve");
    }
    return *glued;
}

// ---------------------------------------------------------------------------
// Transports

BraneDeformation transport_gamma(const BraneDeformation& B, const std::map<int, Poly>& g) {
    PolyCtxPtr zc = B.base.Z.zchart.ctx;
    HermData nh;
    nh.cover = B.base.L.cover;
    for (auto& e : nh.cover.of_dim(1))
        nh.c.emplace(std::make_pair(e[0], e[1]), B.base.L.cval(e[0], e[1]) +
                                                     gval(g, e[1], zc) - gval(g, e[0], zc));
    for (auto& [v, a] : B.base.L.a) nh.a.emplace(v, a + d_fn(gval(g, v, zc)));
    Brane nb = make_brane(B.base.Z, std::move(nh));
    return make_brane_deformation(nb, B.rho,
                                  make_bundle_deformation(nb.L, B.bundle.f, B.bundle.u),
                                  B.order);
}

BraneDeformation transport_refine(const BraneDeformation& B, const NerveCover& finer,
                                  const std::vector<int>& sigma) {
    if ((int)sigma.size() != finer.verts)
        throw std::invalid_argument("need one image vertex per refined vertex");
    const NerveCover& old = B.base.L.cover;
    for (int v : sigma)
        if (v < 0 || v >= old.verts) throw std::invalid_argument("refinement image out of range");
    HermData nh;
    nh.cover = finer;
    std::map<std::pair<int, int>, Poly> nf;
    std::map<int, DiffForm> nu;
    for (auto& e : finer.of_dim(1)) {
        int a = sigma[e[0]], b = sigma[e[1]];
        if (a != b && !old.has({std::min(a, b), std::max(a, b)}))
            throw std::invalid_argument("refinement does not map the edge " + simplex_str(e) +
                                        " into the nerve");
        nh.c.emplace(std::make_pair(e[0], e[1]), B.base.L.cval(a, b));
        Poly f = B.bundle.fval(a, b);
        if (!f.is_zero()) nf.emplace(std::make_pair(e[0], e[1]), std::move(f));
    }
    for (int v = 0; v < finer.verts; ++v) {
        nh.a.emplace(v, B.base.L.a.at(sigma[v]));
        DiffForm w = uval(B.bundle, sigma[v]);
        if (!w.is_zero()) nu.emplace(v, std::move(w));
    }
    Brane nb = make_brane(B.base.Z, std::move(nh));
    return make_brane_deformation(
        nb, B.rho, make_bundle_deformation(nb.L, std::move(nf), std::move(nu)), B.order);
}

BraneDeformation transport_btransform(const BraneDeformation& B, const DiffForm& u) {
    if (u.deg != 1) throw std::invalid_argument("transport expects an ambient 1-form");
    DiffForm ru = B.base.Z.restrict_form(u);
    HermData nh;
    nh.cover = B.base.L.cover;
    nh.c = B.base.L.c;
    for (auto& [v, a] : B.base.L.a) nh.a.emplace(v, a - ru);
    Brane nb = make_brane(B.base.Z, std::move(nh));
    DiffForm delta = ru - B.rho_apply_form(u);
    std::map<int, DiffForm> nu;
    for (int v = 0; v < nh.cover.verts; ++v) {
        DiffForm w = uval(B.bundle, v) + delta;
        if (!w.is_zero()) nu.emplace(v, std::move(w));
    }
    return make_brane_deformation(
        nb, B.rho, make_bundle_deformation(nb.L, B.bundle.f, std::move(nu)), B.order);
}

}  // namespace gcdef
