#pragma once

// Formal exterior calculus on R^n with polynomial coefficients: vector
// fields, differential forms, wedge, d, contraction, Lie derivative, the
// Jacobi-Lie bracket, and the formal time integral. Coefficients may carry
// nilpotent Artin generators and the time variable through their context.
//
// Sign conventions (enforced by the test suite):
//   iota(xi)(dx^i1 ^ ... ^ dx^ik) contracts the FIRST slot;
//   L(xi) = d iota(xi) + iota(xi) d;  iota([xi,eta]) = [L(xi), iota(eta)].

#include <map>
#include <string>
#include <vector>

#include "gcdeform/artin.hpp"
#include "gcdeform/poly.hpp"

namespace gcdef {

struct Chart {
    PolyCtxPtr ctx;           // geometric vars are the chart coordinates
    int split = -1;           // for standard models: first `split` coords are
                              // x-type, the rest y-type; -1 when unused
    int dim() const { return ctx->n_geom; }
    std::string coord(int i) const { return ctx->vars[i]; }
};

inline Chart make_chart(std::vector<std::string> coords, const ArtinAlgebra* artin = nullptr,
                        bool with_time = false, int split = -1) {
    Chart c;
    if (artin)
        c.ctx = artin->ctx_on(std::move(coords), with_time);
    else
        c.ctx = make_ctx(std::move(coords), {}, {}, with_time);
    c.split = split;
    return c;
}

class VectorField {
public:
    PolyCtxPtr ctx;
    std::vector<Poly> comp;  // one per chart coordinate

    VectorField() = default;
    explicit VectorField(PolyCtxPtr c)
        : ctx(c), comp(static_cast<size_t>(c->n_geom), Poly::zero(c)) {}

    static VectorField basis(const PolyCtxPtr& c, int i, Poly coef) {
        VectorField v(c);
        v.comp[i] = std::move(coef);
        return v;
    }
    static VectorField basis(const PolyCtxPtr& c, int i) {
        return basis(c, i, Poly::one(c));
    }

    bool is_zero() const {
        for (const Poly& p : comp)
            if (!p.is_zero()) return false;
        return true;
    }
    VectorField operator+(const VectorField& o) const {
        VectorField r = *this;
        for (size_t i = 0; i < comp.size(); ++i) r.comp[i] += o.comp[i];
        return r;
    }
    VectorField operator-() const {
        VectorField r = *this;
        for (Poly& p : r.comp) p = -p;
        return r;
    }
    VectorField operator-(const VectorField& o) const { return *this + (-o); }
    VectorField operator*(const QI& s) const {
        VectorField r = *this;
        for (Poly& p : r.comp) p = p * s;
        return r;
    }
    VectorField operator*(const Poly& f) const {
        VectorField r = *this;
        for (Poly& p : r.comp) p = p * f;
        return r;
    }
    VectorField& operator+=(const VectorField& o) { *this = *this + o; return *this; }
    bool operator==(const VectorField& o) const { return (*this - o).is_zero(); }

    // Derivation on functions: xi(f) = sum xi^i d f/d x^i.
    Poly apply(const Poly& f) const {
        Poly r = Poly::zero(ctx);
        for (size_t i = 0; i < comp.size(); ++i) r += comp[i] * f.partial(static_cast<int>(i));
        return r;
    }
    bool in_maximal_ideal() const {
        for (const Poly& p : comp)
            if (!p.in_maximal_ideal()) return false;
        return true;
    }
};

class DiffForm {
public:
    PolyCtxPtr ctx;
    int deg = 0;
    std::map<std::vector<int>, Poly> comps;  // strictly increasing index tuples

    DiffForm() = default;
    DiffForm(PolyCtxPtr c, int k) : ctx(std::move(c)), deg(k) {}

    static DiffForm from_function(const Poly& f) {
        DiffForm w(f.ctx, 0);
        if (!f.is_zero()) w.comps[{}] = f;
        return w;
    }
    // coefficient * dx^{i1} ^ ... (indices need not be sorted; sign handled)
    static DiffForm monomial_form(const PolyCtxPtr& c, std::vector<int> idx, Poly coef);

    bool is_zero() const { return comps.empty(); }
    void add_term(std::vector<int> idx, const Poly& coef);  // sorts, signs, merges

    DiffForm operator+(const DiffForm& o) const;
    DiffForm operator-() const;
    DiffForm operator-(const DiffForm& o) const { return *this + (-o); }
    DiffForm operator*(const QI& s) const;
    DiffForm operator*(const Poly& f) const;
    DiffForm& operator+=(const DiffForm& o) { *this = *this + o; return *this; }
    bool operator==(const DiffForm& o) const { return (*this - o).is_zero(); }

    Poly coef(const std::vector<int>& idx) const {
        auto it = comps.find(idx);
        return it == comps.end() ? Poly::zero(ctx) : it->second;
    }
    bool in_maximal_ideal() const {
        for (auto& [i, p] : comps)
            if (!p.in_maximal_ideal()) return false;
        return true;
    }
};

DiffForm wedge(const DiffForm& a, const DiffForm& b);
DiffForm ext_d(const DiffForm& w);
DiffForm contract(const VectorField& xi, const DiffForm& w);
DiffForm lie_derivative(const VectorField& xi, const DiffForm& w);
VectorField lie_bracket(const VectorField& xi, const VectorField& eta);

// Formal time integral / evaluation, componentwise.
VectorField time_integral(const VectorField& v);
DiffForm time_integral(const DiffForm& w);
VectorField eval_time(const VectorField& v, const Q& t);
DiffForm eval_time(const DiffForm& w, const Q& t);
VectorField shift_time(const VectorField& v, int k);
DiffForm shift_time(const DiffForm& w, int k);

// Exponentiated actions e^{xi} for xi a nilpotent (m-valued) vector field.
Poly exp_vf_on_function(const VectorField& xi, const Poly& f, int order);
DiffForm exp_vf_on_form(const VectorField& xi, const DiffForm& w, int order);
VectorField exp_vf_on_vf(const VectorField& xi, const VectorField& v, int order);

}  // namespace gcdef
