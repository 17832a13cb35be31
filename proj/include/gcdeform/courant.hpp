#pragma once

// The standard Courant algebroid TX (+) T*X on a polynomial chart: pairing,
// Dorfman and Courant brackets, B-transforms, the Lie algebra of generalized
// symmetries with bracket
//     [(xi,a),(eta,b)] = ([xi,eta], L(xi)b - L(eta)a),
// and its formal exponential group, whose elements are kept in the canonical
// factored shape e^{(0,u)} e^{(xi,0)}.

#include "gcdeform/cartan.hpp"

namespace gcdef {

struct GenSection {
    VectorField vf;
    DiffForm form;  // degree 1

    GenSection() = default;
    GenSection(VectorField v, DiffForm f) : vf(std::move(v)), form(std::move(f)) {}
    static GenSection zero(const PolyCtxPtr& c) {
        return GenSection(VectorField(c), DiffForm(c, 1));
    }
    const PolyCtxPtr& ctx() const { return vf.ctx; }

    bool is_zero() const { return vf.is_zero() && form.is_zero(); }
    GenSection operator+(const GenSection& o) const {
        return GenSection(vf + o.vf, form + o.form);
    }
    GenSection operator-() const { return GenSection(-vf, -form); }
    GenSection operator-(const GenSection& o) const { return *this + (-o); }
    GenSection operator*(const QI& s) const { return GenSection(vf * s, form * s); }
    GenSection operator*(const Poly& f) const { return GenSection(vf * f, form * f); }
    bool operator==(const GenSection& o) const { return (*this - o).is_zero(); }
    bool in_maximal_ideal() const { return vf.in_maximal_ideal() && form.in_maximal_ideal(); }

    GenSection real_part() const;
    GenSection imag_part() const;
    GenSection conj() const;
};

// <x,y> = (iota(xi)b + iota(eta)a) / 2
Poly pairing(const GenSection& x, const GenSection& y);

// Dorfman bracket ([xi,eta], L(xi)b - iota(eta)da).
GenSection dorfman(const GenSection& x, const GenSection& y);

// Courant bracket = Dorfman - (0, d<x,y>); antisymmetric.
GenSection courant_bracket(const GenSection& x, const GenSection& y);

// Lie bracket of generalized symmetries ([xi,eta], L(xi)b - L(eta)a).
GenSection ghat_bracket(const GenSection& x, const GenSection& y);

// Infinitesimal action of the symmetry x on the section alpha; same formula
// as the Dorfman bracket.
GenSection ghat_act(const GenSection& x, const GenSection& alpha);

// (xi, a - iota(xi)B) for a closed 2-form B.
GenSection b_transform(const DiffForm& B, const GenSection& x);

// Endomorphisms of TX (+) T*X with polynomial entries, acting blockwise on
// (vf, form) with columns indexed (d/dx^1..d/dx^n, dx^1..dx^n).
struct GenEndo {
    PolyCtxPtr ctx;
    int n = 0;
    std::vector<Poly> m;  // (2n)x(2n), row-major

    GenEndo() = default;
    GenEndo(PolyCtxPtr c, int dim)
        : ctx(c), n(dim), m(static_cast<size_t>(4) * dim * dim, Poly::zero(c)) {}
    static GenEndo identity(const PolyCtxPtr& c);

    Poly& at(int i, int j) { return m[static_cast<size_t>(i) * 2 * n + j]; }
    const Poly& at(int i, int j) const { return m[static_cast<size_t>(i) * 2 * n + j]; }

    GenSection apply(const GenSection& x) const;
    GenSection column(int j) const;      // image of the j-th basis section
    static GenSection basis_section(const PolyCtxPtr& c, int j);
    void set_column(int j, const GenSection& v);

    GenEndo operator+(const GenEndo& o) const;
    GenEndo operator-() const;
    GenEndo operator-(const GenEndo& o) const { return *this + (-o); }
    GenEndo operator*(const QI& s) const;
    GenEndo compose(const GenEndo& o) const;  // this after o
    bool is_zero() const;
    bool operator==(const GenEndo& o) const { return (*this - o).is_zero(); }
};

// Infinitesimal action on endomorphisms: (x.F)(alpha) = x.(F alpha) - F(x.alpha).
GenEndo ghat_act_endo(const GenSection& x, const GenEndo& F);

// A formal symmetry-group element in the canonical factored shape
// g = e^{(0,u)} e^{(xi,0)}, with u, xi supported in the maximal ideal.
struct SymElement {
    DiffForm u;      // degree-1 form part
    VectorField xi;  // vector-field part
    int order = 2;   // nilpotency order of the ambient Artin algebra

    static SymElement identity(const PolyCtxPtr& c, int order);
    bool is_identity() const { return u.is_zero() && xi.is_zero(); }
    bool operator==(const SymElement& o) const {
        return (u - o.u).is_zero() && (xi - o.xi).is_zero();
    }
};

SymElement sym_mul(const SymElement& g, const SymElement& h);  // g h
SymElement sym_inv(const SymElement& g);
GenSection sym_act_section(const SymElement& g, const GenSection& x);
GenEndo sym_act_endo(const SymElement& g, const GenEndo& F);

// Prop.-"exponential"-style splitting: for (xi,a) in m (x) ghat,
// e^{(xi,a)} = e^{(0,a^xi)} e^{(xi,0)} with a^xi = \int_0^1 e^{t xi}(a) dt.
// Computed exactly as a^xi = sum_k L(xi)^k(a) / (k! (k+1)).
SymElement sym_exp(const GenSection& x, int order);

// Inverse of a |-> a^xi for fixed xi: recover a from u = a^xi.
DiffForm exp_split_invert(const VectorField& xi, const DiffForm& u, int order);

// One-parameter families: given a family g(t) (context contains t) in
// canonical form, return x with g(t) = e^{tx}; throws when the family is not
// a one-parameter homomorphism.
GenSection one_param_decompose(const SymElement& family);

}  // namespace gcdef
