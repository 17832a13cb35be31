#pragma once

// Exact multivariate polynomials with Gaussian-rational coefficients over a
// shared variable context. A context carries two kinds of variables:
//
//   * geometric variables (chart coordinates) — differentiable, substitutable;
//   * formal variables — nilpotent generators of a local Artin algebra
//     presented by a monomial ideal, plus (optionally) a formal time
//     variable t used for one-parameter families and the formal integral
//     "\int_0^1 b t^n dt := b/(n+1)".
//
// A single Poly therefore realizes all the coefficient rings used by the
// library: Q, Q[i], A-valued and complexified-A-valued polynomial functions.
// Terms whose formal part is divisible by a relation monomial are dropped on
// the fly, so nilpotency truncates every series exactly.

#include <algorithm>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "gcdeform/rational.hpp"

namespace gcdef {

using Expo = std::vector<int>;  // exponent vector, one entry per context var

struct PolyCtx {
    std::vector<std::string> vars;           // geometric vars first
    int n_geom = 0;                          // how many leading vars are geometric
    int t_index = -1;                        // index of the time variable, or -1
    std::vector<Expo> relations;             // monomial ideal generators (formal part only)

    int nvars() const { return static_cast<int>(vars.size()); }
    bool is_geometric(int i) const { return i < n_geom; }

    int var_index(const std::string& name) const {
        for (int i = 0; i < nvars(); ++i)
            if (vars[i] == name) return i;
        throw std::invalid_argument("unknown variable: " + name);
    }

    // True when the term with exponent e is killed by the monomial ideal.
    bool reduced_to_zero(const Expo& e) const {
        for (const Expo& r : relations) {
            bool divides = true;
            for (int i = 0; i < nvars() && divides; ++i)
                if (e[i] < r[i]) divides = false;
            if (divides) return true;
        }
        return false;
    }

    bool same_as(const PolyCtx& o) const {
        return vars == o.vars && n_geom == o.n_geom && t_index == o.t_index &&
               relations == o.relations;
    }
};

using PolyCtxPtr = std::shared_ptr<const PolyCtx>;

inline PolyCtxPtr make_ctx(std::vector<std::string> geometric,
                           std::vector<std::string> formal = {},
                           std::vector<Expo> formal_relations = {},
                           bool with_time = false) {
    auto ctx = std::make_shared<PolyCtx>();
    ctx->n_geom = static_cast<int>(geometric.size());
    ctx->vars = std::move(geometric);
    for (auto& f : formal) ctx->vars.push_back(std::move(f));
    if (with_time) {
        ctx->t_index = ctx->nvars();
        ctx->vars.push_back("t");
    }
    int nv = ctx->nvars();
    int formal_base = ctx->n_geom;
    for (const Expo& r : formal_relations) {
        Expo full(nv, 0);
        for (size_t j = 0; j < r.size(); ++j) full[formal_base + j] = r[j];
        ctx->relations.push_back(std::move(full));
    }
    // Canonical order for structural equality of contexts.
    std::sort(ctx->relations.begin(), ctx->relations.end());
    for (int i = 0; i < nv; ++i)
        for (int j = i + 1; j < nv; ++j)
            if (ctx->vars[i] == ctx->vars[j])
                throw std::invalid_argument("duplicate variable: " + ctx->vars[i]);
    return ctx;
}

// Graded lexicographic order on exponent vectors.
struct GrLex {
    bool operator()(const Expo& a, const Expo& b) const {
        long da = 0, db = 0;
        for (int e : a) da += e;
        for (int e : b) db += e;
        if (da != db) return da < db;
        return a < b;  // lexicographic tie-break
    }
};

class Poly {
public:
    PolyCtxPtr ctx;
    std::map<Expo, QI, GrLex> terms;

    Poly() = default;
    explicit Poly(PolyCtxPtr c) : ctx(std::move(c)) {}

    static Poly zero(PolyCtxPtr c) { return Poly(std::move(c)); }
    static Poly constant(PolyCtxPtr c, QI v) {
        Poly p(c);
        if (!v.is_zero()) p.terms.emplace(Expo(c->nvars(), 0), std::move(v));
        return p;
    }
    static Poly one(PolyCtxPtr c) { return constant(std::move(c), QI(1)); }
    static Poly var(const PolyCtxPtr& c, int i, QI coef = QI(1)) {
        Poly p(c);
        Expo e(c->nvars(), 0);
        e[i] = 1;
        if (!c->reduced_to_zero(e) && !coef.is_zero()) p.terms.emplace(std::move(e), std::move(coef));
        return p;
    }
    static Poly var(const PolyCtxPtr& c, const std::string& name) {
        return var(c, c->var_index(name));
    }
    static Poly monomial(const PolyCtxPtr& c, Expo e, QI coef) {
        Poly p(c);
        if ((int)e.size() != c->nvars()) throw std::invalid_argument("bad exponent length");
        if (!coef.is_zero() && !c->reduced_to_zero(e)) p.terms.emplace(std::move(e), std::move(coef));
        return p;
    }

    bool is_zero() const { return terms.empty(); }

    void check_ctx(const Poly& o) const {
        if (ctx == o.ctx) return;
        if (!ctx || !o.ctx || !ctx->same_as(*o.ctx))
            throw std::invalid_argument("polynomial variable-context mismatch");
    }

    void add_term(const Expo& e, const QI& v) {
        if (v.is_zero() || ctx->reduced_to_zero(e)) return;
        auto it = terms.find(e);
        if (it == terms.end()) {
            terms.emplace(e, v);
        } else {
            it->second += v;
            if (it->second.is_zero()) terms.erase(it);
        }
    }

    Poly operator+(const Poly& o) const {
        check_ctx(o);
        Poly r = *this;
        for (auto& [e, v] : o.terms) r.add_term(e, v);
        return r;
    }
    Poly operator-() const {
        Poly r = *this;
        for (auto& [e, v] : r.terms) v = -v;
        return r;
    }
    Poly operator-(const Poly& o) const { return *this + (-o); }
    Poly& operator+=(const Poly& o) { *this = *this + o; return *this; }
    Poly& operator-=(const Poly& o) { *this = *this - o; return *this; }

    Poly operator*(const Poly& o) const {
        check_ctx(o);
        Poly r(ctx);
        int nv = ctx->nvars();
        for (auto& [ea, va] : terms)
            for (auto& [eb, vb] : o.terms) {
                Expo e(nv);
                for (int i = 0; i < nv; ++i) e[i] = ea[i] + eb[i];
                r.add_term(e, va * vb);
            }
        return r;
    }
    Poly operator*(const QI& s) const {
        Poly r(ctx);
        if (s.is_zero()) return r;
        r.terms = terms;
        for (auto& [e, v] : r.terms) v = v * s;
        return r;
    }
    Poly& operator*=(const Poly& o) { *this = *this * o; return *this; }

    bool operator==(const Poly& o) const {
        check_ctx(o);
        return terms == o.terms;
    }
    bool operator!=(const Poly& o) const { return !(*this == o); }

    // Exact partial derivative with respect to a geometric variable.
    Poly partial(int i) const {
        if (!ctx->is_geometric(i))
            throw std::invalid_argument("derivative in non-geometric variable");
        Poly r(ctx);
        for (auto& [e, v] : terms) {
            if (e[i] == 0) continue;
            Expo f = e;
            f[i] -= 1;
            r.add_term(f, v * QI(Q(e[i])));
        }
        return r;
    }
    Poly partial(const std::string& name) const { return partial(ctx->var_index(name)); }

    // Substitute 0 for every variable in `which` (by index).
    Poly subst_zero(const std::vector<int>& which) const {
        std::vector<char> kill(ctx->nvars(), 0);
        for (int i : which) kill[i] = 1;
        Poly r(ctx);
        for (auto& [e, v] : terms) {
            bool drop = false;
            for (int i = 0; i < ctx->nvars() && !drop; ++i)
                if (kill[i] && e[i] > 0) drop = true;
            if (!drop) r.add_term(e, v);
        }
        return r;
    }

    // Evaluate the geometric variables at an exact rational point; formal
    // variables survive. `point` has one entry per geometric variable.
    Poly eval_geometric(const std::vector<Q>& point) const {
        if ((int)point.size() != ctx->n_geom)
            throw std::invalid_argument("evaluation point has wrong dimension");
        Poly r(ctx);
        for (auto& [e, v] : terms) {
            QI c = v;
            for (int i = 0; i < ctx->n_geom; ++i)
                for (int k = 0; k < e[i]; ++k) c = c * QI(point[i]);
            Expo f = e;
            for (int i = 0; i < ctx->n_geom; ++i) f[i] = 0;
            r.add_term(f, c);
        }
        return r;
    }

    // Formal integral over the time variable: b t^n  ->  b / (n+1),
    // i.e. the exact value of \int_0^1 p dt. Result has no t-dependence.
    Poly time_integral() const {
        if (ctx->t_index < 0) throw std::logic_error("context has no time variable");
        Poly r(ctx);
        for (auto& [e, v] : terms) {
            int n = e[ctx->t_index];
            Expo f = e;
            f[ctx->t_index] = 0;
            r.add_term(f, v * QI(Q(1, n + 1)));
        }
        return r;
    }

    // Substitute an exact rational value for the time variable.
    Poly eval_time(const Q& tval) const {
        if (ctx->t_index < 0) throw std::logic_error("context has no time variable");
        Poly r(ctx);
        for (auto& [e, v] : terms) {
            QI c = v;
            for (int k = 0; k < e[ctx->t_index]; ++k) c = c * QI(tval);
            Expo f = e;
            f[ctx->t_index] = 0;
            r.add_term(f, c);
        }
        return r;
    }

    // Coefficient of t^k (a polynomial without t-dependence).
    Poly t_coefficient(int k) const {
        if (ctx->t_index < 0) throw std::logic_error("context has no time variable");
        Poly r(ctx);
        for (auto& [e, v] : terms) {
            if (e[ctx->t_index] != k) continue;
            Expo f = e;
            f[ctx->t_index] = 0;
            r.add_term(f, v);
        }
        return r;
    }

    // Multiply by t^k.
    Poly shift_time(int k) const {
        if (ctx->t_index < 0) throw std::logic_error("context has no time variable");
        Poly r(ctx);
        for (auto& [e, v] : terms) {
            Expo f = e;
            f[ctx->t_index] += k;
            r.add_term(f, v);
        }
        return r;
    }

    // Least total degree in the formal (non-time, non-geometric) variables;
    // returns a large sentinel for the zero polynomial. This is the m-adic
    // valuation used to truncate nilpotent series.
    int formal_valuation() const {
        int best = 1 << 20;
        for (auto& [e, v] : terms) {
            (void)v;
            int d = 0;
            for (int i = ctx->n_geom; i < ctx->nvars(); ++i)
                if (i != ctx->t_index) d += e[i];
            best = std::min(best, d);
        }
        return best;
    }

    // True when every term has positive Artin degree (lies in m ⊗ ...).
    bool in_maximal_ideal() const { return is_zero() || formal_valuation() >= 1; }

    // Substitute polynomials for geometric variables (used by pullbacks along
    // coordinate maps). `images[i]` replaces geometric variable i; formal
    // variables and t are carried through unchanged into images' context.
    Poly subst_geometric(const PolyCtxPtr& target, const std::vector<Poly>& images) const {
        if ((int)images.size() != ctx->n_geom)
            throw std::invalid_argument("substitution needs one image per geometric variable");
        Poly r = Poly::zero(target);
        for (auto& [e, v] : terms) {
            Poly term = Poly::constant(target, v);
            for (int i = 0; i < ctx->n_geom; ++i)
                for (int k = 0; k < e[i]; ++k) term = term * images[i];
            // formal part carried over by name lookup
            for (int i = ctx->n_geom; i < ctx->nvars(); ++i)
                if (e[i] > 0) {
                    Poly f = Poly::var(target, ctx->vars[i]);
                    for (int k = 0; k < e[i]; ++k) term = term * f;
                }
            r += term;
        }
        return r;
    }

    // Total degree in geometric variables (max over terms), -1 for zero.
    int geometric_degree() const {
        int best = -1;
        for (auto& [e, v] : terms) {
            (void)v;
            int d = 0;
            for (int i = 0; i < ctx->n_geom; ++i) d += e[i];
            best = std::max(best, d);
        }
        return best;
    }

    bool is_real() const {
        for (auto& [e, v] : terms) {
            (void)e;
            if (v.im != 0) return false;
        }
        return true;
    }

    Poly real_part() const {
        Poly r(ctx);
        for (auto& [e, v] : terms) r.add_term(e, QI(v.re));
        return r;
    }
    Poly imag_part() const {
        Poly r(ctx);
        for (auto& [e, v] : terms) r.add_term(e, QI(v.im));
        return r;
    }
    Poly conj() const {
        Poly r(ctx);
        for (auto& [e, v] : terms) r.add_term(e, v.conj());
        return r;
    }

    std::string to_string() const {
        if (terms.empty()) return "0";
        std::string s;
        bool first = true;
        for (auto& [e, v] : terms) {
            if (!first) s += " + ";
            first = false;
            std::string c = qi_to_string(v);
            bool any = false;
            std::string mono;
            for (int i = 0; i < ctx->nvars(); ++i) {
                if (e[i] == 0) continue;
                if (any) mono += "*";
                any = true;
                mono += ctx->vars[i];
                if (e[i] > 1) mono += "^" + std::to_string(e[i]);
            }
            if (!any) s += c;
            else if (c == "1") s += mono;
            else if (c == "-1") s += "-" + mono;
            else s += "(" + c + ")*" + mono;
        }
        return s;
    }
};

inline Poly operator*(const QI& s, const Poly& p) { return p * s; }

}  // namespace gcdef
