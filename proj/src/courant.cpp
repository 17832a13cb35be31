#include "gcdeform/courant.hpp"

#include <stdexcept>

namespace gcdef {

GenSection GenSection::real_part() const {
    GenSection r = *this;
    for (Poly& p : r.vf.comp) p = p.real_part();
    DiffForm f(form.ctx, 1);
    for (auto& [i, p] : form.comps) f.add_term(i, p.real_part());
    r.form = f;
    return r;
}
GenSection GenSection::imag_part() const {
    GenSection r = *this;
    for (Poly& p : r.vf.comp) p = p.imag_part();
    DiffForm f(form.ctx, 1);
    for (auto& [i, p] : form.comps) f.add_term(i, p.imag_part());
    r.form = f;
    return r;
}
GenSection GenSection::conj() const {
    GenSection r = *this;
    for (Poly& p : r.vf.comp) p = p.conj();
    DiffForm f(form.ctx, 1);
    for (auto& [i, p] : form.comps) f.add_term(i, p.conj());
    r.form = f;
    return r;
}

Poly pairing(const GenSection& x, const GenSection& y) {
    Poly s = contract(x.vf, y.form).coef({}) + contract(y.vf, x.form).coef({});
    return s * QI(Q(1, 2));
}

GenSection dorfman(const GenSection& x, const GenSection& y) {
    return GenSection(lie_bracket(x.vf, y.vf),
                      lie_derivative(x.vf, y.form) - contract(y.vf, ext_d(x.form)));
}

GenSection courant_bracket(const GenSection& x, const GenSection& y) {
    GenSection d = dorfman(x, y);
    d.form = d.form - ext_d(DiffForm::from_function(pairing(x, y)));
    return d;
}

GenSection ghat_bracket(const GenSection& x, const GenSection& y) {
    return GenSection(lie_bracket(x.vf, y.vf),
                      lie_derivative(x.vf, y.form) - lie_derivative(y.vf, x.form));
}

GenSection ghat_act(const GenSection& x, const GenSection& alpha) { return dorfman(x, alpha); }

GenSection b_transform(const DiffForm& B, const GenSection& x) {
    if (B.deg != 2) throw std::invalid_argument("b_transform expects a 2-form");
    if (!ext_d(B).is_zero()) throw std::invalid_argument("b_transform: B is not closed");
    return GenSection(x.vf, x.form - contract(x.vf, B));
}

GenEndo GenEndo::identity(const PolyCtxPtr& c) {
    GenEndo e(c, c->n_geom);
    for (int i = 0; i < 2 * e.n; ++i) e.at(i, i) = Poly::one(c);
    return e;
}

GenSection GenEndo::basis_section(const PolyCtxPtr& c, int j) {
    int n = c->n_geom;
    if (j < n) return GenSection(VectorField::basis(c, j), DiffForm(c, 1));
    return GenSection(VectorField(c), DiffForm::monomial_form(c, {j - n}, Poly::one(c)));
}

GenSection GenEndo::apply(const GenSection& x) const {
    std::vector<Poly> in(2 * n, Poly::zero(ctx));
    for (int i = 0; i < n; ++i) in[i] = x.vf.comp[i];
    for (int i = 0; i < n; ++i) in[n + i] = x.form.coef({i});
    GenSection out = GenSection::zero(ctx);
    for (int i = 0; i < 2 * n; ++i) {
        Poly acc = Poly::zero(ctx);
        for (int j = 0; j < 2 * n; ++j)
            if (!at(i, j).is_zero() && !in[j].is_zero()) acc += at(i, j) * in[j];
        if (i < n)
            out.vf.comp[i] = acc;
        else
            out.form.add_term({i - n}, acc);
    }
    return out;
}

GenSection GenEndo::column(int j) const {
    GenSection out = GenSection::zero(ctx);
    for (int i = 0; i < n; ++i) out.vf.comp[i] = at(i, j);
    for (int i = 0; i < n; ++i) out.form.add_term({i}, at(n + i, j));
    return out;
}

void GenEndo::set_column(int j, const GenSection& v) {
    for (int i = 0; i < n; ++i) at(i, j) = v.vf.comp[i];
    for (int i = 0; i < n; ++i) at(n + i, j) = v.form.coef({i});
}

GenEndo GenEndo::operator+(const GenEndo& o) const {
    GenEndo r = *this;
    for (size_t k = 0; k < m.size(); ++k) r.m[k] += o.m[k];
    return r;
}
GenEndo GenEndo::operator-() const {
    GenEndo r = *this;
    for (Poly& p : r.m) p = -p;
    return r;
}
GenEndo GenEndo::operator*(const QI& s) const {
    GenEndo r = *this;
    for (Poly& p : r.m) p = p * s;
    return r;
}
GenEndo GenEndo::compose(const GenEndo& o) const {
    GenEndo r(ctx, n);
    for (int i = 0; i < 2 * n; ++i)
        for (int k = 0; k < 2 * n; ++k) {
            if (at(i, k).is_zero()) continue;
            for (int j = 0; j < 2 * n; ++j)
                if (!o.at(k, j).is_zero()) r.at(i, j) += at(i, k) * o.at(k, j);
        }
    return r;
}
bool GenEndo::is_zero() const {
    for (const Poly& p : m)
        if (!p.is_zero()) return false;
    return true;
}

GenEndo ghat_act_endo(const GenSection& x, const GenEndo& F) {
    // Function-linear, so columns on the constant frame determine it.
    GenEndo r(F.ctx, F.n);
    for (int j = 0; j < 2 * F.n; ++j) {
        GenSection ej = GenEndo::basis_section(F.ctx, j);
        GenSection col = ghat_act(x, F.apply(ej)) - F.apply(ghat_act(x, ej));
        r.set_column(j, col);
    }
    return r;
}

SymElement SymElement::identity(const PolyCtxPtr& c, int order) {
    SymElement g;
    g.u = DiffForm(c, 1);
    g.xi = VectorField(c);
    g.order = order;
    return g;
}

SymElement sym_mul(const SymElement& g, const SymElement& h) {
    // e^{(0,u)} e^{(xi,0)} e^{(0,v)} e^{(eta,0)}
    //   = e^{(0, u + e^{xi} v)} e^{(bch(xi,eta), 0)}
    SymElement r;
    r.order = std::max(g.order, h.order);
    r.u = g.u + exp_vf_on_form(g.xi, h.u, r.order);
    r.xi = bch(
        g.xi, h.xi,
        [](const VectorField& a, const VectorField& b) { return lie_bracket(a, b); }, r.order);
    return r;
}

SymElement sym_inv(const SymElement& g) {
    SymElement r;
    r.order = g.order;
    r.xi = -g.xi;
    r.u = -exp_vf_on_form(-g.xi, g.u, g.order);
    return r;
}

GenSection sym_act_section(const SymElement& g, const GenSection& x) {
    GenSection mid(exp_vf_on_vf(g.xi, x.vf, g.order), exp_vf_on_form(g.xi, x.form, g.order));
    // e^{(0,u)} acts as the B-transform by du.
    return GenSection(mid.vf, mid.form - contract(mid.vf, ext_d(g.u)));
}

GenEndo sym_act_endo(const SymElement& g, const GenEndo& F) {
    SymElement gi = sym_inv(g);
    GenEndo r(F.ctx, F.n);
    for (int j = 0; j < 2 * F.n; ++j) {
        GenSection ej = GenEndo::basis_section(F.ctx, j);
        r.set_column(j, sym_act_section(g, F.apply(sym_act_section(gi, ej))));
    }
    return r;
}

SymElement sym_exp(const GenSection& x, int order) {
    if (!x.in_maximal_ideal())
        throw std::domain_error("sym_exp: element is not nilpotent (not in m)");
    SymElement g;
    g.order = order;
    g.xi = x.vf;
    // a^xi = sum_k L(xi)^k(a) / (k! (k+1))
    DiffForm term = x.form;
    DiffForm acc = term;  // k = 0 term
    Q kfact(1);
    for (int k = 1; k <= order + 1 && !term.is_zero(); ++k) {
        term = lie_derivative(x.vf, term);
        kfact *= k;
        acc += term * QI(Q(1) / (kfact * (k + 1)));
    }
    g.u = acc;
    return g;
}

DiffForm exp_split_invert(const VectorField& xi, const DiffForm& u, int order) {
    // Solve a from u = sum_k L(xi)^k(a)/(k!(k+1)) by successive substitution:
    // a = u - (correction terms), converging in the m-adic filtration.
    DiffForm a = u;
    for (int it = 0; it <= order + 1; ++it) {
        GenSection probe(xi, a);
        DiffForm u_of_a = sym_exp(probe, order).u;
        DiffForm err = u_of_a - u;
        if (err.is_zero()) return a;
        a = a - err;
    }
    throw std::domain_error("exp_split_invert: iteration failed to converge");
}

GenSection one_param_decompose(const SymElement& family) {
    const PolyCtxPtr& c = family.xi.ctx;
    if (c->t_index < 0) throw std::invalid_argument("family context has no time variable");
    // x = d/dt at t=0
    GenSection x = GenSection::zero(c);
    for (int i = 0; i < c->n_geom; ++i) x.vf.comp[i] = family.xi.comp[i].t_coefficient(1);
    for (auto& [idx, p] : family.u.comps) x.form.add_term(idx, p.t_coefficient(1));
    // verify g(t) = e^{tx}
    Poly t = Poly::var(c, "t");
    SymElement check = sym_exp(x * t, family.order);
    if (!(check == family))
        throw std::invalid_argument("family is not a one-parameter homomorphism");
    return x;
}

}  // namespace gcdef
