#include "gcdeform/cartan.hpp"

#include <algorithm>
#include <stdexcept>

namespace gcdef {

namespace {

// Sort indices; return 0 for a repeated index, else the permutation sign.
int sort_sign(std::vector<int>& idx) {
    int sign = 1;
    for (size_t i = 0; i + 1 < idx.size(); ++i)
        for (size_t j = 0; j + 1 < idx.size() - i; ++j)
            if (idx[j] > idx[j + 1]) {
                std::swap(idx[j], idx[j + 1]);
                sign = -sign;
            }
    for (size_t i = 0; i + 1 < idx.size(); ++i)
        if (idx[i] == idx[i + 1]) return 0;
    return sign;
}

}  // namespace

void DiffForm::add_term(std::vector<int> idx, const Poly& coef) {
    if ((int)idx.size() != deg) throw std::invalid_argument("index tuple degree mismatch");
    if (coef.is_zero()) return;
    int sign = sort_sign(idx);
    if (sign == 0) return;
    Poly c = sign == 1 ? coef : -coef;
    auto it = comps.find(idx);
    if (it == comps.end()) {
        comps.emplace(std::move(idx), std::move(c));
    } else {
        it->second += c;
        if (it->second.is_zero()) comps.erase(it);
    }
}

DiffForm DiffForm::monomial_form(const PolyCtxPtr& c, std::vector<int> idx, Poly coef) {
    DiffForm w(c, static_cast<int>(idx.size()));
    w.add_term(std::move(idx), std::move(coef));
    return w;
}

DiffForm DiffForm::operator+(const DiffForm& o) const {
    if (deg != o.deg) throw std::invalid_argument("form degree mismatch");
    DiffForm r = *this;
    for (auto& [i, p] : o.comps) r.add_term(i, p);
    return r;
}
DiffForm DiffForm::operator-() const {
    DiffForm r = *this;
    for (auto& [i, p] : r.comps) p = -p;
    return r;
}
DiffForm DiffForm::operator*(const QI& s) const {
    DiffForm r(ctx, deg);
    if (s.is_zero()) return r;
    r.comps = comps;
    for (auto& [i, p] : r.comps) p = p * s;
    return r;
}
DiffForm DiffForm::operator*(const Poly& f) const {
    DiffForm r(ctx, deg);
    for (auto& [i, p] : comps) r.add_term(i, p * f);
    return r;
}

DiffForm wedge(const DiffForm& a, const DiffForm& b) {
    DiffForm r(a.ctx, a.deg + b.deg);
    for (auto& [ia, pa] : a.comps)
        for (auto& [ib, pb] : b.comps) {
            std::vector<int> idx = ia;
            idx.insert(idx.end(), ib.begin(), ib.end());
            r.add_term(std::move(idx), pa * pb);
        }
    return r;
}

DiffForm ext_d(const DiffForm& w) {
    DiffForm r(w.ctx, w.deg + 1);
    int n = w.ctx->n_geom;
    for (auto& [idx, p] : w.comps)
        for (int i = 0; i < n; ++i) {
            Poly dp = p.partial(i);
            if (dp.is_zero()) continue;
            std::vector<int> e = {i};
            e.insert(e.end(), idx.begin(), idx.end());
            r.add_term(std::move(e), dp);
        }
    return r;
}

DiffForm contract(const VectorField& xi, const DiffForm& w) {
    if (w.deg == 0) throw std::invalid_argument("cannot contract a 0-form");
    DiffForm r(w.ctx, w.deg - 1);
    for (auto& [idx, p] : w.comps)
        for (size_t a = 0; a < idx.size(); ++a) {
            const Poly& xc = xi.comp[idx[a]];
            if (xc.is_zero()) continue;
            std::vector<int> rest;
            for (size_t b = 0; b < idx.size(); ++b)
                if (b != a) rest.push_back(idx[b]);
            Poly c = p * xc;
            if (a % 2 == 1) c = -c;
            r.add_term(std::move(rest), c);
        }
    return r;
}

DiffForm lie_derivative(const VectorField& xi, const DiffForm& w) {
    if (w.deg == 0) {
        // L(xi) f = xi(f)
        return DiffForm::from_function(xi.apply(w.coef({})));
    }
    return ext_d(contract(xi, w)) + contract(xi, ext_d(w));
}

VectorField lie_bracket(const VectorField& xi, const VectorField& eta) {
    VectorField r(xi.ctx);
    int n = xi.ctx->n_geom;
    for (int i = 0; i < n; ++i) {
        Poly c = Poly::zero(xi.ctx);
        for (int j = 0; j < n; ++j)
            c += xi.comp[j] * eta.comp[i].partial(j) - eta.comp[j] * xi.comp[i].partial(j);
        r.comp[i] = c;
    }
    return r;
}

VectorField time_integral(const VectorField& v) {
    VectorField r = v;
    for (Poly& p : r.comp) p = p.time_integral();
    return r;
}
DiffForm time_integral(const DiffForm& w) {
    DiffForm r(w.ctx, w.deg);
    for (auto& [i, p] : w.comps) r.add_term(i, p.time_integral());
    return r;
}
VectorField eval_time(const VectorField& v, const Q& t) {
    VectorField r = v;
    for (Poly& p : r.comp) p = p.eval_time(t);
    return r;
}
DiffForm eval_time(const DiffForm& w, const Q& t) {
    DiffForm r(w.ctx, w.deg);
    for (auto& [i, p] : w.comps) r.add_term(i, p.eval_time(t));
    return r;
}
VectorField shift_time(const VectorField& v, int k) {
    VectorField r = v;
    for (Poly& p : r.comp) p = p.shift_time(k);
    return r;
}
DiffForm shift_time(const DiffForm& w, int k) {
    DiffForm r(w.ctx, w.deg);
    for (auto& [i, p] : w.comps) r.add_term(i, p.shift_time(k));
    return r;
}

Poly exp_vf_on_function(const VectorField& xi, const Poly& f, int order) {
    return exp_action(
        xi, f, [](const VectorField& v, const Poly& g) { return v.apply(g); }, order);
}
DiffForm exp_vf_on_form(const VectorField& xi, const DiffForm& w, int order) {
    return exp_action(
        xi, w, [](const VectorField& v, const DiffForm& a) { return lie_derivative(v, a); },
        order);
}
VectorField exp_vf_on_vf(const VectorField& xi, const VectorField& v, int order) {
    return exp_action(
        xi, v, [](const VectorField& a, const VectorField& b) { return lie_bracket(a, b); },
        order);
}

}  // namespace gcdef
