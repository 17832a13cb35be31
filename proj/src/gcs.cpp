#include "gcdeform/gcs.hpp"

#include <stdexcept>

namespace gcdef {

namespace {

const QI kI = QI(Q(0), Q(1));

bool poly_is_constant(const Poly& p) {
    for (auto& [e, v] : p.terms) {
        (void)v;
        for (int x : e)
            if (x != 0) return false;
    }
    return true;
}

QI constant_value(const Poly& p) {
    if (p.is_zero()) return QI(0);
    if (!poly_is_constant(p)) throw std::invalid_argument("expected a constant coefficient");
    return p.terms.begin()->second;
}

// Move a polynomial into another context carrying the same variable names.
Poly transfer(const Poly& p, const PolyCtxPtr& to) {
    Poly r(to);
    for (auto& [e, v] : p.terms) {
        Expo f(to->nvars(), 0);
        for (int i = 0; i < p.ctx->nvars(); ++i)
            if (e[i] > 0) f[to->var_index(p.ctx->vars[i])] = e[i];
        r.add_term(f, v);
    }
    return r;
}

// 2<u,v> for constant coordinate vectors of length 2N.
QI pair2(const Vec& u, const Vec& v) {
    int N = (int)u.size() / 2;
    QI s(0);
    for (int i = 0; i < N; ++i) s += u[i] * v[N + i] + v[i] * u[N + i];
    return s;
}

}  // namespace

bool GCStructure::constant_coefficients() const {
    for (const Poly& p : endo.m)
        if (!poly_is_constant(p)) return false;
    return true;
}

VectorField GCStructure::apply_P(const DiffForm& a) const {
    int N = dim();
    VectorField r(chart.ctx);
    for (int i = 0; i < N; ++i) {
        Poly acc = Poly::zero(chart.ctx);
        for (int j = 0; j < N; ++j) {
            const Poly& e = endo.at(i, N + j);
            if (!e.is_zero()) acc += e * a.coef({j});
        }
        r.comp[i] = acc;
    }
    return r;
}

DiffForm GCStructure::apply_K(const DiffForm& a) const {
    int N = dim();
    DiffForm r(chart.ctx, 1);
    for (int i = 0; i < N; ++i) {
        Poly acc = Poly::zero(chart.ctx);
        for (int j = 0; j < N; ++j) {
            const Poly& e = endo.at(N + i, N + j);
            if (!e.is_zero()) acc += e * a.coef({j});
        }
        r.add_term({i}, acc);
    }
    return r;
}

GCStructure make_gc(const Chart& chart, GenEndo endo) {
    int N = chart.dim();
    if (endo.n != N) throw std::invalid_argument("endomorphism size does not match chart");
    GenEndo sq = endo.compose(endo);
    if (!(sq == -GenEndo::identity(chart.ctx)))
        throw std::invalid_argument("endomorphism does not square to -id");
    for (int i = 0; i < 2 * N; ++i)
        for (int j = i; j < 2 * N; ++j) {
            GenSection ei = GenEndo::basis_section(chart.ctx, i);
            GenSection ej = GenEndo::basis_section(chart.ctx, j);
            if (!(pairing(endo.apply(ei), endo.apply(ej)) == pairing(ei, ej)))
                throw std::invalid_argument("endomorphism does not preserve the pairing");
        }
    return GCStructure{chart, std::move(endo)};
}

GCStructure make_complex_gc(const Chart& chart, const std::vector<Poly>& J) {
    int N = chart.dim();
    if ((int)J.size() != N * N) throw std::invalid_argument("complex-structure matrix size");
    // J^2 = -id on TX
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            Poly acc = Poly::zero(chart.ctx);
            for (int k = 0; k < N; ++k) acc += J[i * N + k] * J[k * N + j];
            Poly want = i == j ? -Poly::one(chart.ctx) : Poly::zero(chart.ctx);
            if (!(acc == want))
                throw std::invalid_argument("matrix is not an almost complex structure");
        }
    GenEndo e(chart.ctx, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            e.at(i, j) = -J[i * N + j];
            e.at(N + i, N + j) = J[j * N + i];  // dual map
        }
    return make_gc(chart, std::move(e));
}

GCStructure make_symplectic_gc(const Chart& chart, const DiffForm& omega) {
    int N = chart.dim();
    if (omega.deg != 2) throw std::invalid_argument("omega must be a 2-form");
    if (!ext_d(omega).is_zero()) throw std::invalid_argument("omega is not closed");
    // w(xi) = iota(xi)omega as a constant matrix
    ExactMatrix W(N, N);
    for (int j = 0; j < N; ++j) {
        DiffForm col = contract(VectorField::basis(chart.ctx, j), omega);
        for (int i = 0; i < N; ++i) W.at(i, j) = constant_value(col.coef({i}));
    }
    if (W.rank() != N) throw std::invalid_argument("omega is degenerate");
    // invert W by solving W X = I column by column
    ExactMatrix Winv(N, N);
    for (int j = 0; j < N; ++j) {
        Vec e(N, QI(0));
        e[j] = QI(1);
        auto x = W.solve(e);
        for (int i = 0; i < N; ++i) Winv.at(i, j) = (*x)[i];
    }
    GenEndo en(chart.ctx, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            en.at(N + i, j) = Poly::constant(chart.ctx, W.at(i, j));
            en.at(i, N + j) = Poly::constant(chart.ctx, -Winv.at(i, j));
        }
    return make_gc(chart, std::move(en));
}

GCStructure product_gc(const GCStructure& A, const GCStructure& B, const Chart& chart) {
    int Na = A.dim(), Nb = B.dim(), N = Na + Nb;
    if (chart.dim() != N) throw std::invalid_argument("product chart dimension mismatch");
    auto map_a = [&](int i) { return i < Na ? i : N + (i - Na); };
    auto map_b = [&](int i) { return i < Nb ? Na + i : N + Na + (i - Nb); };
    GenEndo e(chart.ctx, N);
    for (int i = 0; i < 2 * Na; ++i)
        for (int j = 0; j < 2 * Na; ++j)
            if (!A.endo.at(i, j).is_zero())
                e.at(map_a(i), map_a(j)) = transfer(A.endo.at(i, j), chart.ctx);
    for (int i = 0; i < 2 * Nb; ++i)
        for (int j = 0; j < 2 * Nb; ++j)
            if (!B.endo.at(i, j).is_zero())
                e.at(map_b(i), map_b(j)) = transfer(B.endo.at(i, j), chart.ctx);
    return make_gc(chart, std::move(e));
}

GCStructure standard_gc(const Chart& chart, int m, int n) {
    int N = 2 * m + 2 * n;
    if (chart.dim() != N) throw std::invalid_argument("standard model needs dim 2m+2n");
    auto one = Poly::one(chart.ctx);
    GenEndo e(chart.ctx, N);
    for (int i = 0; i < m; ++i) {
        e.at(N + m + i, i) = -one;  // (ds_i-direction, 0) -> (0, -ds^{m+i})
        e.at(N + i, m + i) = one;   // (ds_{m+i}-direction, 0) -> (0, ds^i)
        e.at(m + i, N + i) = -one;  // (0, ds^i) -> (-ds_{m+i}-direction, 0)
        e.at(i, N + m + i) = one;   // (0, ds^{m+i}) -> (ds_i-direction, 0)
    }
    int o = 2 * m;
    for (int j = 0; j < n; ++j) {
        e.at(o + 2 * j + 1, o + 2 * j) = -one;
        e.at(o + 2 * j, o + 2 * j + 1) = one;
        e.at(N + o + 2 * j, N + o + 2 * j + 1) = one;
        e.at(N + o + 2 * j + 1, N + o + 2 * j) = -one;
    }
    return make_gc(chart, std::move(e));
}

GenSection nijenhuis(const GCStructure& J, const GenSection& A, const GenSection& B) {
    const GenEndo& e = J.endo;
    return courant_bracket(e.apply(A), e.apply(B)) - e.apply(courant_bracket(e.apply(A), B)) -
           e.apply(courant_bracket(A, e.apply(B))) - courant_bracket(A, B);
}

bool is_integrable(const GCStructure& J) {
    int N = J.dim();
    for (int i = 0; i < 2 * N; ++i)
        for (int j = i + 1; j < 2 * N; ++j) {
            GenSection a = GenEndo::basis_section(J.chart.ctx, i);
            GenSection b = GenEndo::basis_section(J.chart.ctx, j);
            if (!nijenhuis(J, a, b).is_zero()) return false;
        }
    return true;
}

std::vector<Poly> poisson_of(const GCStructure& J) {
    int N = J.dim();
    std::vector<Poly> P;
    P.reserve((size_t)N * N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) P.push_back(J.endo.at(i, N + j));
    return P;
}

int type_at(const GCStructure& J, const std::vector<Q>& point) {
    int N = J.dim();
    ExactMatrix P(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            P.at(i, j) = constant_value(J.endo.at(i, N + j).eval_geometric(point));
    int r = P.rank();
    if (N % 2 != 0 || r % 2 != 0) throw std::logic_error("odd dimension or Poisson rank");
    return N / 2 - r / 2;
}

Poly LFrame::anchor_apply(int a, const Poly& f) const {
    Poly r = Poly::zero(ctx);
    for (int i = 0; i < N; ++i)
        if (!basis[a][i].is_zero()) r += f.partial(i) * basis[a][i];
    return r;
}

GenSection LFrame::section(int a) const {
    GenSection s = GenSection::zero(ctx);
    for (int i = 0; i < N; ++i) {
        s.vf.comp[i] = Poly::constant(ctx, basis[a][i]);
        s.form.add_term({i}, Poly::constant(ctx, basis[a][N + i]));
    }
    return s;
}

LFrame l_frame(const GCStructure& J) {
    if (!J.constant_coefficients())
        throw std::invalid_argument("eigenbundle frames need constant coefficients");
    int N = J.dim();
    ExactMatrix M(2 * N, 2 * N);
    for (int i = 0; i < 2 * N; ++i) {
        for (int j = 0; j < 2 * N; ++j) M.at(i, j) = constant_value(J.endo.at(i, j));
        M.at(i, i) -= kI;
    }
    std::vector<Vec> basis = M.kernel_basis();
    if ((int)basis.size() != N) throw std::invalid_argument("wrong +i eigenspace dimension");
    for (int a = 0; a < N; ++a)
        for (int b = a; b < N; ++b)
            if (!pair2(basis[a], basis[b]).is_zero())
                throw std::logic_error("eigenbundle is not isotropic");
    LFrame fr;
    fr.ctx = J.chart.ctx;
    fr.N = N;
    fr.basis = std::move(basis);
    fr.pair_mat = ExactMatrix(N, N);
    for (int a = 0; a < N; ++a) {
        Vec cb(2 * N);
        for (int b = 0; b < N; ++b) {
            for (int i = 0; i < 2 * N; ++i) cb[i] = fr.basis[b][i].conj();
            fr.pair_mat.at(a, b) = pair2(cb, fr.basis[a]);
        }
    }
    if (fr.pair_mat.rank() != N) throw std::logic_error("frame pairing is degenerate");
    return fr;
}

AlgebroidForm AlgebroidForm::zero(const PolyCtxPtr& c, int deg, int N) {
    AlgebroidForm r;
    r.ctx = c;
    r.deg = deg;
    r.N = N;
    r.f = Poly::zero(c);
    if (deg == 1) r.a.assign(N, Poly::zero(c));
    if (deg == 2) r.ab.assign((size_t)N * N, Poly::zero(c));
    return r;
}

AlgebroidForm AlgebroidForm::from_function(const Poly& f, int N) {
    AlgebroidForm r = zero(f.ctx, 0, N);
    r.f = f;
    return r;
}

bool AlgebroidForm::is_zero() const {
    if (!f.is_zero()) return false;
    for (const Poly& p : a)
        if (!p.is_zero()) return false;
    for (const Poly& p : ab)
        if (!p.is_zero()) return false;
    return true;
}

AlgebroidForm AlgebroidForm::operator+(const AlgebroidForm& o) const {
    if (deg != o.deg || N != o.N) throw std::invalid_argument("algebroid form mismatch");
    AlgebroidForm r = *this;
    r.f += o.f;
    for (size_t i = 0; i < a.size(); ++i) r.a[i] += o.a[i];
    for (size_t i = 0; i < ab.size(); ++i) r.ab[i] += o.ab[i];
    return r;
}

AlgebroidForm AlgebroidForm::operator-() const {
    AlgebroidForm r = *this;
    r.f = -r.f;
    for (Poly& p : r.a) p = -p;
    for (Poly& p : r.ab) p = -p;
    return r;
}

AlgebroidForm AlgebroidForm::operator*(const QI& s) const {
    AlgebroidForm r = *this;
    r.f = r.f * s;
    for (Poly& p : r.a) p = p * s;
    for (Poly& p : r.ab) p = p * s;
    return r;
}

AlgebroidForm mu(const LFrame& fr, const GenSection& x) {
    AlgebroidForm r = AlgebroidForm::zero(fr.ctx, 1, fr.N);
    for (int k = 0; k < fr.N; ++k) {
        Poly acc = Poly::zero(fr.ctx);
        for (int i = 0; i < fr.N; ++i) {
            if (!fr.basis[k][fr.N + i].is_zero()) acc += x.vf.comp[i] * fr.basis[k][fr.N + i];
            if (!fr.basis[k][i].is_zero()) acc += x.form.coef({i}) * fr.basis[k][i];
        }
        r.a[k] = acc;
    }
    return r;
}

AlgebroidForm delta_L(const LFrame& fr, const AlgebroidForm& alpha) {
    int N = fr.N;
    if (alpha.deg == 0) {
        AlgebroidForm r = AlgebroidForm::zero(fr.ctx, 1, N);
        for (int k = 0; k < N; ++k) r.a[k] = fr.anchor_apply(k, alpha.f);
        return r;
    }
    if (alpha.deg == 1) {
        // constant frame: the Dorfman bracket of frame vectors vanishes
        AlgebroidForm r = AlgebroidForm::zero(fr.ctx, 2, N);
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j)
                r.ab[(size_t)i * N + j] =
                    fr.anchor_apply(i, alpha.a[j]) - fr.anchor_apply(j, alpha.a[i]);
        return r;
    }
    throw std::invalid_argument("delta_L implemented in degrees 0 and 1 only");
}

HoloResult is_gen_holomorphic(const GCStructure& J, const LFrame& fr, const GenSection& x) {
    HoloResult r;
    r.delta_mu = delta_L(fr, mu(fr, x));
    r.act_J = ghat_act_endo(x, J.endo);
    bool h1 = r.delta_mu.is_zero(), h2 = r.act_J.is_zero();
    if (h1 != h2) throw std::logic_error("holomorphicity criteria disagree");
    r.holomorphic = h1;
    return r;
}

GenSection gen_hamiltonian(const GCStructure& J, const Poly& f) {
    DiffForm df = ext_d(DiffForm::from_function(f));
    GenSection zdf(VectorField(J.chart.ctx), df);
    GenSection s = J.endo.apply(zdf) - GenSection(VectorField(J.chart.ctx), df * kI);
    return s.real_part();
}

Poly hamiltonian_bracket_witness(const GCStructure& J, const Poly& f, const Poly& g) {
    Poly fR = f.real_part(), fI = f.imag_part();
    Poly gR = g.real_part(), gI = g.imag_part();
    DiffForm dfR = ext_d(DiffForm::from_function(fR));
    DiffForm dgR = ext_d(DiffForm::from_function(gR));
    VectorField PdfR = J.apply_P(dfR), PdgR = J.apply_P(dgR);
    Poly h = PdfR.apply(gR);                                      // iota(P df)dg
    h -= contract(PdgR, J.apply_K(dfR)).coef({}) * kI;            // -i iota(P dg)K df
    h += PdfR.apply(gI) * kI;                                     // f real, g imaginary
    h -= PdgR.apply(fI) * kI;                                     // f imaginary, g real
    return h;
}

}  // namespace gcdef
