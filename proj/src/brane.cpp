#include "gcdeform/brane.hpp"

#include <algorithm>
#include <set>
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

// 2<u,v> for constant coordinate vectors of length 2N.
QI pair2(const Vec& u, const Vec& v) {
    int N = (int)u.size() / 2;
    QI s(0);
    for (int i = 0; i < N; ++i) s += u[i] * v[N + i] + v[i] * u[N + i];
    return s;
}

bool is_integer(const QI& v) {
    return v.im == 0 && denominator(v.re) == 1;
}

}  // namespace

Poly CoordSubmanifold::restrict_poly(const Poly& p) const {
    Poly r(zchart.ctx);
    int nz = zchart.ctx->nvars();
    for (auto& [e, v] : p.terms) {
        bool drop = false;
        for (int k : killed)
            if (e[k] > 0) { drop = true; break; }
        if (drop) continue;
        Expo f(nz, 0);
        for (size_t i = 0; i < kept.size(); ++i) f[i] = e[kept[i]];
        for (int i = ambient.ctx->n_geom; i < ambient.ctx->nvars(); ++i)
            if (e[i] > 0) f[zchart.ctx->var_index(ambient.ctx->vars[i])] = e[i];
        r.add_term(f, v);
    }
    return r;
}

DiffForm CoordSubmanifold::restrict_form(const DiffForm& w) const {
    DiffForm r(zchart.ctx, w.deg);
    std::vector<int> pos(ambient.dim(), -1);
    for (size_t i = 0; i < kept.size(); ++i) pos[kept[i]] = (int)i;
    for (auto& [idx, coef] : w.comps) {
        bool drop = false;
        std::vector<int> zi;
        zi.reserve(idx.size());
        for (int i : idx) {
            if (pos[i] < 0) { drop = true; break; }
            zi.push_back(pos[i]);
        }
        if (drop) continue;
        Poly c = restrict_poly(coef);
        if (!c.is_zero()) r.add_term(zi, c);
    }
    return r;
}

VectorField CoordSubmanifold::restrict_tangent(const VectorField& v) const {
    VectorField r(zchart.ctx);
    for (size_t i = 0; i < kept.size(); ++i) r.comp[i] = restrict_poly(v.comp[kept[i]]);
    return r;
}

Poly CoordSubmanifold::lift_poly(const Poly& p) const {
    Poly r(ambient.ctx);
    int na = ambient.ctx->nvars();
    for (auto& [e, v] : p.terms) {
        Expo f(na, 0);
        for (size_t i = 0; i < kept.size(); ++i) f[kept[i]] = e[i];
        for (int i = zchart.ctx->n_geom; i < zchart.ctx->nvars(); ++i)
            if (e[i] > 0) f[ambient.ctx->var_index(zchart.ctx->vars[i])] = e[i];
        r.add_term(f, v);
    }
    return r;
}

DiffForm CoordSubmanifold::lift_form(const DiffForm& w) const {
    DiffForm r(ambient.ctx, w.deg);
    for (auto& [idx, coef] : w.comps) {
        std::vector<int> ai;
        ai.reserve(idx.size());
        for (int i : idx) ai.push_back(kept[i]);
        r.add_term(ai, lift_poly(coef));
    }
    return r;
}

bool CoordSubmanifold::vanishes_on_z(const Poly& p) const {
    for (auto& [e, v] : p.terms) {
        (void)v;
        bool has_killed = false;
        for (int k : killed)
            if (e[k] > 0) { has_killed = true; break; }
        if (!has_killed) return false;
    }
    return true;
}

CoordSubmanifold make_subm(const Chart& ambient, std::vector<int> kept) {
    std::sort(kept.begin(), kept.end());
    if (std::adjacent_find(kept.begin(), kept.end()) != kept.end())
        throw std::invalid_argument("duplicate retained coordinate index");
    for (int i : kept)
        if (i < 0 || i >= ambient.dim())
            throw std::invalid_argument("retained coordinate index out of range");
    CoordSubmanifold Z;
    Z.ambient = ambient;
    Z.kept = kept;
    std::vector<char> is_kept(ambient.dim(), 0);
    for (int i : kept) is_kept[i] = 1;
    for (int i = 0; i < ambient.dim(); ++i)
        if (!is_kept[i]) Z.killed.push_back(i);
    // Chart on Z: the retained coordinate names over the same formal data.
    const PolyCtx& actx = *ambient.ctx;
    std::vector<std::string> geo;
    for (int i : kept) geo.push_back(actx.vars[i]);
    bool with_time = actx.t_index >= 0;
    std::vector<std::string> formal;
    for (int i = actx.n_geom; i < actx.nvars(); ++i)
        if (i != actx.t_index) formal.push_back(actx.vars[i]);
    std::vector<Expo> rels;
    for (const Expo& r : actx.relations) {
        Expo f(formal.size(), 0);
        for (size_t j = 0; j < formal.size(); ++j) f[j] = r[actx.n_geom + (int)j];
        rels.push_back(std::move(f));
    }
    Z.zchart.ctx = make_ctx(std::move(geo), std::move(formal), std::move(rels), with_time);
    Z.zchart.split = -1;
    return Z;
}

bool NerveCover::has(const std::vector<int>& s) const {
    std::vector<int> t = s;
    std::sort(t.begin(), t.end());
    return std::find(simplices.begin(), simplices.end(), t) != simplices.end();
}

std::vector<std::vector<int>> NerveCover::of_dim(int k) const {
    std::vector<std::vector<int>> r;
    for (const auto& s : simplices)
        if ((int)s.size() == k + 1) r.push_back(s);
    return r;
}

NerveCover make_cover(int verts, std::vector<std::vector<int>> generators) {
    if (verts <= 0) throw std::invalid_argument("cover needs at least one vertex");
    std::set<std::vector<int>> all;
    for (int v = 0; v < verts; ++v) all.insert({v});
    for (auto& g : generators) {
        std::sort(g.begin(), g.end());
        g.erase(std::unique(g.begin(), g.end()), g.end());
        for (int v : g)
            if (v < 0 || v >= verts) throw std::invalid_argument("cover vertex out of range");
        // all nonempty faces of the generator
        int n = (int)g.size();
        for (int mask = 1; mask < (1 << n); ++mask) {
            std::vector<int> face;
            for (int i = 0; i < n; ++i)
                if (mask & (1 << i)) face.push_back(g[i]);
            all.insert(std::move(face));
        }
    }
    NerveCover c;
    c.verts = verts;
    c.simplices.assign(all.begin(), all.end());
    std::sort(c.simplices.begin(), c.simplices.end(),
              [](const std::vector<int>& a, const std::vector<int>& b) {
                  if (a.size() != b.size()) return a.size() < b.size();
                  return a < b;
              });
    return c;
}

Poly HermData::cval(int i, int j) const {
    if (a.empty()) throw std::logic_error("line-bundle data has no vertices");
    const PolyCtxPtr& ctx = a.begin()->second.ctx;
    if (i == j) return Poly::zero(ctx);
    bool flip = i > j;
    if (flip) std::swap(i, j);
    auto it = c.find({i, j});
    if (it == c.end()) throw std::invalid_argument("missing transition exponent c_IJ");
    return flip ? -it->second : it->second;
}

Brane make_brane(CoordSubmanifold Z, HermData L) {
    const PolyCtxPtr& zc = Z.zchart.ctx;
    if (L.cover.verts <= 0) throw std::invalid_argument("brane cover is empty");
    for (int v = 0; v < L.cover.verts; ++v) {
        auto it = L.a.find(v);
        if (it == L.a.end()) throw std::invalid_argument("missing connection form a_I");
        if (it->second.deg != 1) throw std::invalid_argument("connection form must have degree 1");
        if (!it->second.ctx->same_as(*zc))
            throw std::invalid_argument("connection form lives on the wrong chart");
    }
    for (const auto& e : L.cover.of_dim(1)) {
        Poly cij = L.cval(e[0], e[1]);
        DiffForm want = ext_d(DiffForm::from_function(cij));
        if (!(L.a.at(e[1]) - L.a.at(e[0]) == want))
            throw std::invalid_argument("a_J - a_I != dc_IJ on an edge");
    }
    for (const auto& t : L.cover.of_dim(2)) {
        Poly coc = L.cval(t[1], t[2]) - L.cval(t[0], t[2]) + L.cval(t[0], t[1]);
        if (!poly_is_constant(coc) || !is_integer(constant_value(coc)))
            throw std::invalid_argument("transition cocycle is not an integer constant");
    }
    DiffForm F = ext_d(L.a.at(0));
    for (int v = 1; v < L.cover.verts; ++v)
        if (!(ext_d(L.a.at(v)) == F))
            throw std::invalid_argument("connection forms have differing curvature");
    if (!ext_d(F).is_zero()) throw std::logic_error("curvature is not closed");
    Brane B;
    B.Z = std::move(Z);
    B.L = std::move(L);
    B.F = std::move(F);
    return B;
}

bool gen_tangent_membership(const CoordSubmanifold& Z, const DiffForm& F, const GenSection& x) {
    for (int k : Z.killed)
        if (!Z.restrict_poly(x.vf.comp[k]).is_zero()) return false;
    VectorField xiZ = Z.restrict_tangent(x.vf);
    return Z.restrict_form(x.form) == contract(xiZ, F);
}

bool in_KB(const Brane& B, const GenSection& x) {
    return gen_tangent_membership(B.Z, B.F, x);
}

std::vector<GenSection> kb_generators(const Brane& B) {
    const CoordSubmanifold& Z = B.Z;
    const PolyCtxPtr& ac = Z.ambient.ctx;
    std::vector<GenSection> gens;
    // tangent directions of Z, completed by the F-induced form part
    for (size_t i = 0; i < Z.kept.size(); ++i) {
        GenSection g = GenSection::zero(ac);
        g.vf = VectorField::basis(ac, Z.kept[i]);
        g.form = Z.lift_form(contract(VectorField::basis(Z.zchart.ctx, (int)i), B.F));
        gens.push_back(std::move(g));
    }
    // conormal directions
    for (int k : Z.killed) {
        GenSection g = GenSection::zero(ac);
        g.form.add_term({k}, Poly::one(ac));
        gens.push_back(std::move(g));
    }
    // sections vanishing on Z
    for (int k : Z.killed) {
        Poly yk = Poly::var(ac, k);
        for (int j = 0; j < Z.ambient.dim(); ++j) {
            GenSection g = GenSection::zero(ac);
            g.vf = VectorField::basis(ac, j, yk);
            gens.push_back(std::move(g));
        }
        for (int i : Z.kept) {
            GenSection g = GenSection::zero(ac);
            g.form.add_term({i}, yk);
            gens.push_back(std::move(g));
        }
    }
    return gens;
}

CompatResult brane_compatible(const Brane& B, const GCStructure& J) {
    std::vector<GenSection> gens = kb_generators(B);
    CompatResult r;
    for (size_t i = 0; i < gens.size(); ++i)
        for (size_t j = i; j < gens.size(); ++j) {
            Poly q = pairing(J.endo.apply(gens[i]), gens[j]);
            if (!B.Z.vanishes_on_z(q)) {
                r.ok = false;
                r.gi = (int)i;
                r.gj = (int)j;
                r.residue = q;
                return r;
            }
        }
    r.residue = Poly::zero(B.Z.ambient.ctx);
    return r;
}

bool lwl_check(const Brane& B, const GCStructure& J) {
    const CoordSubmanifold& Z = B.Z;
    int N = J.dim();
    std::vector<Poly> P = poisson_of(J);
    // deterministic rational sample grid on Z
    std::vector<std::vector<Q>> points;
    std::vector<Q> origin(N, Q(0));
    points.push_back(origin);
    const std::vector<Q> vals = {Q(1), Q(-1), Q(2)};
    for (int i : Z.kept)
        for (const Q& v : vals) {
            std::vector<Q> p = origin;
            p[i] = v;
            points.push_back(std::move(p));
        }
    for (size_t a = 0; a < Z.kept.size(); ++a)
        for (size_t b = a + 1; b < Z.kept.size(); ++b) {
            std::vector<Q> p = origin;
            p[Z.kept[a]] = Q(1);
            p[Z.kept[b]] = Q(1);
            points.push_back(p);
            p[Z.kept[b]] = Q(-1, 2);
            points.push_back(std::move(p));
        }

    int common_rank = -1;
    for (const auto& pt : points) {
        ExactMatrix Pz(N, N);
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j)
                Pz.at(i, j) = constant_value(P[(size_t)i * N + j].eval_geometric(pt));
        // S = column space of Pz
        std::vector<Vec> cols;
        for (int j = 0; j < N; ++j) {
            Vec c(N);
            for (int i = 0; i < N; ++i) c[i] = Pz.at(i, j);
            cols.push_back(std::move(c));
        }
        ExactMatrix S = ExactMatrix::from_rows(cols, N);
        S.rref();
        std::vector<Vec> sbasis;
        for (int i = 0; i < S.rows; ++i) {
            Vec v = S.row(i);
            bool nz = false;
            for (auto& x : v)
                if (!x.is_zero()) nz = true;
            if (nz) sbasis.push_back(std::move(v));
        }
        int rank = (int)sbasis.size();
        if (common_rank < 0) common_rank = rank;
        if (rank != common_rank)
            throw std::domain_error("Poisson distribution has non-constant rank along Z");
        if (rank == 0) continue;  // zero distribution: vacuously Lagrangian
        // W = T_zZ ∩ S: combinations of the S-basis whose killed components vanish
        ExactMatrix A((int)Z.killed.size(), rank);
        for (size_t kk = 0; kk < Z.killed.size(); ++kk)
            for (int j = 0; j < rank; ++j) A.at((int)kk, j) = sbasis[j][Z.killed[kk]];
        std::vector<Vec> wcoef = A.kernel_basis();
        if ((int)wcoef.size() != rank / 2) return false;
        std::vector<Vec> wbasis;
        for (const Vec& cvec : wcoef) {
            Vec w(N, QI(0));
            for (int j = 0; j < rank; ++j)
                for (int i = 0; i < N; ++i) w[i] += cvec[j] * sbasis[j][i];
            wbasis.push_back(std::move(w));
        }
        // isotropy of W for omega(xi, eta) = a(xi) with P a = eta
        for (const Vec& w1 : wbasis)
            for (const Vec& w2 : wbasis) {
                auto a = Pz.solve(w2);
                if (!a) throw std::domain_error("sample vector escapes the distribution");
                QI omega(0);
                for (int i = 0; i < N; ++i) omega += (*a)[i] * w1[i];
                if (!omega.is_zero()) return false;
            }
    }
    return true;
}

Poly BraneFrame::anchor_apply(int a, const Poly& f) const {
    Poly r = Poly::zero(Z.zchart.ctx);
    for (size_t i = 0; i < Z.kept.size(); ++i)
        if (!l[a][Z.kept[i]].is_zero()) r += f.partial((int)i) * l[a][Z.kept[i]];
    return r;
}

GenSection BraneFrame::section(int a) const {
    const PolyCtxPtr& ac = Z.ambient.ctx;
    GenSection s = GenSection::zero(ac);
    for (int i = 0; i < N; ++i) {
        s.vf.comp[i] = Poly::constant(ac, l[a][i]);
        s.form.add_term({i}, Poly::constant(ac, l[a][N + i]));
    }
    return s;
}

BraneFrame brane_frame(const Brane& B, const GCStructure& J) {
    if (!J.constant_coefficients())
        throw std::invalid_argument("brane frames need a constant-coefficient structure");
    for (auto& [idx, coef] : B.F.comps) {
        (void)idx;
        if (!poly_is_constant(coef))
            throw std::invalid_argument("brane frames need constant curvature coefficients");
    }
    if (!brane_compatible(B, J).ok) throw std::invalid_argument("incompatible brane");
    const CoordSubmanifold& Z = B.Z;
    int N = J.dim();
    BraneFrame fr;
    fr.Z = Z;
    fr.N = N;
    fr.M = N / 2;
    // constant frame of T(Z,F)
    for (size_t i = 0; i < Z.kept.size(); ++i) {
        Vec v(2 * N, QI(0));
        v[Z.kept[i]] = QI(1);
        DiffForm a = contract(VectorField::basis(Z.zchart.ctx, (int)i), B.F);
        for (size_t j = 0; j < Z.kept.size(); ++j)
            v[N + Z.kept[j]] = constant_value(a.coef({(int)j}));
        fr.tb.push_back(std::move(v));
    }
    for (int k : Z.killed) {
        Vec v(2 * N, QI(0));
        v[N + k] = QI(1);
        fr.tb.push_back(std::move(v));
    }
    for (int a = 0; a < N; ++a)
        for (int b = a; b < N; ++b)
            if (!pair2(fr.tb[a], fr.tb[b]).is_zero())
                throw std::logic_error("generalized tangent frame is not isotropic");
    // l = ker(J - i) inside the span of the frame
    ExactMatrix Jc(2 * N, 2 * N);
    for (int i = 0; i < 2 * N; ++i)
        for (int j = 0; j < 2 * N; ++j) Jc.at(i, j) = constant_value(J.endo.at(i, j));
    ExactMatrix M(2 * N, N);
    for (int a = 0; a < N; ++a) {
        Vec jim = Jc.apply(fr.tb[a]);
        for (int i = 0; i < 2 * N; ++i) M.at(i, a) = jim[i] - kI * fr.tb[a][i];
    }
    std::vector<Vec> coefs = M.kernel_basis();
    if ((int)coefs.size() != fr.M)
        throw std::logic_error("wrong +i eigenspace dimension on the brane");
    std::vector<Vec> lvecs;
    for (const Vec& c : coefs) {
        Vec v(2 * N, QI(0));
        for (int a = 0; a < N; ++a)
            for (int i = 0; i < 2 * N; ++i) v[i] += c[a] * fr.tb[a][i];
        lvecs.push_back(std::move(v));
    }
    ExactMatrix lm = ExactMatrix::from_rows(lvecs, 2 * N);
    lm.rref();
    for (int i = 0; i < lm.rows; ++i) {
        Vec v = lm.row(i);
        bool nz = false;
        for (auto& x : v)
            if (!x.is_zero()) nz = true;
        if (nz) fr.l.push_back(std::move(v));
    }
    if ((int)fr.l.size() != fr.M) throw std::logic_error("eigenframe lost rank");
    // complement representatives for the generalized normal bundle
    std::vector<Vec> span = fr.tb;
    for (int r = 0; r < 2 * N && (int)fr.nb.size() < N; ++r) {
        Vec e(2 * N, QI(0));
        e[r] = QI(1);
        if (!in_span(span, e)) {
            span.push_back(e);
            fr.nb.push_back(std::move(e));
        }
    }
    if ((int)fr.nb.size() != N) throw std::logic_error("normal complement incomplete");
    // the pairing of the complement with l must realize N(Z,F) ~ l-dual
    ExactMatrix R(N, N);
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < fr.M; ++b) {
            QI z = pair2(fr.nb[a], fr.l[b]);
            R.at(a, 2 * b) = QI(z.re);
            R.at(a, 2 * b + 1) = QI(z.im);
        }
    if (R.rank() != N) throw std::logic_error("normal pairing is degenerate");
    return fr;
}

BAlgForm BAlgForm::zero(const PolyCtxPtr& c, int deg, int M) {
    BAlgForm r;
    r.ctx = c;
    r.deg = deg;
    r.M = M;
    r.f = Poly::zero(c);
    if (deg == 1) r.a.assign(M, Poly::zero(c));
    if (deg == 2) r.ab.assign((size_t)M * M, Poly::zero(c));
    if (deg == 3) r.abc.assign((size_t)M * M * M, Poly::zero(c));
    return r;
}

BAlgForm BAlgForm::from_function(const Poly& f, int M) {
    BAlgForm r = zero(f.ctx, 0, M);
    r.f = f;
    return r;
}

bool BAlgForm::is_zero() const {
    if (!f.is_zero()) return false;
    for (const Poly& p : a)
        if (!p.is_zero()) return false;
    for (const Poly& p : ab)
        if (!p.is_zero()) return false;
    for (const Poly& p : abc)
        if (!p.is_zero()) return false;
    return true;
}

BAlgForm BAlgForm::operator+(const BAlgForm& o) const {
    if (deg != o.deg || M != o.M) throw std::invalid_argument("algebroid form mismatch");
    BAlgForm r = *this;
    r.f += o.f;
    for (size_t i = 0; i < a.size(); ++i) r.a[i] += o.a[i];
    for (size_t i = 0; i < ab.size(); ++i) r.ab[i] += o.ab[i];
    for (size_t i = 0; i < abc.size(); ++i) r.abc[i] += o.abc[i];
    return r;
}

BAlgForm BAlgForm::operator-() const {
    BAlgForm r = *this;
    r.f = -r.f;
    for (Poly& p : r.a) p = -p;
    for (Poly& p : r.ab) p = -p;
    for (Poly& p : r.abc) p = -p;
    return r;
}

BAlgForm BAlgForm::operator*(const QI& s) const {
    BAlgForm r = *this;
    r.f = r.f * s;
    for (Poly& p : r.a) p = p * s;
    for (Poly& p : r.ab) p = p * s;
    for (Poly& p : r.abc) p = p * s;
    return r;
}

BAlgForm delta_l(const BraneFrame& fr, const BAlgForm& alpha) {
    int M = fr.M;
    const PolyCtxPtr& zc = fr.Z.zchart.ctx;
    // Constant frames: the induced bracket of frame sections vanishes, so only
    // the anchor terms of the Cartan formula survive.
    if (alpha.deg == 0) {
        BAlgForm r = BAlgForm::zero(zc, 1, M);
        for (int i = 0; i < M; ++i) r.a[i] = fr.anchor_apply(i, alpha.f);
        return r;
    }
    if (alpha.deg == 1) {
        BAlgForm r = BAlgForm::zero(zc, 2, M);
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < M; ++j)
                r.ab[(size_t)i * M + j] =
                    fr.anchor_apply(i, alpha.a[j]) - fr.anchor_apply(j, alpha.a[i]);
        return r;
    }
    if (alpha.deg == 2) {
        BAlgForm r = BAlgForm::zero(zc, 3, M);
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < M; ++j)
                for (int k = 0; k < M; ++k)
                    r.abc[((size_t)i * M + j) * M + k] =
                        fr.anchor_apply(i, alpha.ab[(size_t)j * M + k]) -
                        fr.anchor_apply(j, alpha.ab[(size_t)i * M + k]) +
                        fr.anchor_apply(k, alpha.ab[(size_t)i * M + j]);
        return r;
    }
    throw std::invalid_argument("delta_l implemented in degrees 0..2 only");
}

BAlgForm normal_mu(const BraneFrame& fr, const GenSection& x) {
    BAlgForm r = BAlgForm::zero(fr.Z.zchart.ctx, 1, fr.M);
    for (int b = 0; b < fr.M; ++b)
        r.a[b] = fr.Z.restrict_poly(pairing(x, fr.section(b)) * QI(2));
    return r;
}

namespace {

// Strictly increasing index tuples of size k in [0, M).
std::vector<std::vector<int>> index_tuples(int M, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    auto rec = [&](auto&& self, int start) -> void {
        if ((int)cur.size() == k) {
            out.push_back(cur);
            return;
        }
        for (int i = start; i < M; ++i) {
            cur.push_back(i);
            self(self, i + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

// Monomials in the geometric variables of `ctx` of total degree <= D, in a
// deterministic (graded lexicographic) order.
std::vector<Expo> monomials_up_to(const PolyCtxPtr& ctx, int D) {
    std::vector<Expo> out;
    Expo cur(ctx->nvars(), 0);
    auto rec = [&](auto&& self, int var, int rem) -> void {
        if (var == ctx->n_geom) {
            out.push_back(cur);
            return;
        }
        for (int e = 0; e <= rem; ++e) {
            cur[var] = e;
            self(self, var + 1, rem - e);
        }
        cur[var] = 0;
    };
    rec(rec, 0, D);
    std::sort(out.begin(), out.end(), GrLex());
    return out;
}

struct FormBasis {
    int deg = 0;
    int M = 0;
    std::vector<std::vector<int>> tuples;
    std::vector<Expo> mons;
    std::map<Expo, int, GrLex> mon_index;

    int dim() const { return (int)(tuples.size() * mons.size()); }
};

FormBasis form_basis(const PolyCtxPtr& ctx, int M, int deg, int D) {
    FormBasis b;
    b.deg = deg;
    b.M = M;
    b.tuples = index_tuples(M, deg);
    b.mons = monomials_up_to(ctx, D);
    for (size_t i = 0; i < b.mons.size(); ++i) b.mon_index[b.mons[i]] = (int)i;
    return b;
}

const Poly& component(const BAlgForm& w, const std::vector<int>& t) {
    switch (w.deg) {
        case 0: return w.f;
        case 1: return w.a[t[0]];
        case 2: return w.ab[(size_t)t[0] * w.M + t[1]];
        default: return w.abc[((size_t)t[0] * w.M + t[1]) * w.M + t[2]];
    }
}

Vec encode(const BAlgForm& w, const FormBasis& b) {
    Vec v((size_t)b.dim(), QI(0));
    size_t nm = b.mons.size();
    for (size_t ti = 0; ti < b.tuples.size(); ++ti) {
        const Poly& p = component(w, b.tuples[ti]);
        for (auto& [e, c] : p.terms) {
            auto it = b.mon_index.find(e);
            if (it == b.mon_index.end())
                throw std::domain_error("coefficient escapes the degree truncation");
            v[ti * nm + it->second] = c;
        }
    }
    return v;
}

BAlgForm decode(const Vec& v, const FormBasis& b, const PolyCtxPtr& ctx) {
    BAlgForm w = BAlgForm::zero(ctx, b.deg, b.M);
    size_t nm = b.mons.size();
    for (size_t ti = 0; ti < b.tuples.size(); ++ti) {
        Poly p(ctx);
        for (size_t mi = 0; mi < nm; ++mi)
            if (!v[ti * nm + mi].is_zero()) p.add_term(b.mons[mi], v[ti * nm + mi]);
        if (p.is_zero()) continue;
        const auto& t = b.tuples[ti];
        // fill the full antisymmetric storage from the independent component
        if (b.deg == 0) w.f = p;
        if (b.deg == 1) w.a[t[0]] = p;
        if (b.deg == 2) {
            w.ab[(size_t)t[0] * b.M + t[1]] = p;
            w.ab[(size_t)t[1] * b.M + t[0]] = -p;
        }
        if (b.deg == 3) {
            const int perm[6][4] = {{0, 1, 2, 1},  {1, 0, 2, -1}, {1, 2, 0, 1},
                                    {0, 2, 1, -1}, {2, 0, 1, 1},  {2, 1, 0, -1}};
            for (auto& pr : perm) {
                Poly q = pr[3] == 1 ? p : -p;
                w.abc[((size_t)t[pr[0]] * b.M + t[pr[1]]) * b.M + t[pr[2]]] = q;
            }
        }
    }
    return w;
}

BAlgForm basis_form(const FormBasis& b, size_t ti, size_t mi, const PolyCtxPtr& ctx) {
    Vec v((size_t)b.dim(), QI(0));
    v[ti * b.mons.size() + mi] = QI(1);
    return decode(v, b, ctx);
}

// Shared ker/im computation; potentials are bounded by Dpot (= D for the
// literal truncated complex, D + 1 for the stable quotient).
CohomologyResult cohomology_impl(const Brane& B, const GCStructure& J, int k, int D, int Dpot) {
    if (k < 0 || k > 2) throw std::invalid_argument("cohomology implemented for k in 0..2");
    if (D < 0) throw std::invalid_argument("negative degree bound");
    BraneFrame fr = brane_frame(B, J);
    const PolyCtxPtr& zc = fr.Z.zchart.ctx;
    FormBasis bk = form_basis(zc, fr.M, k, D);
    FormBasis bk1 = form_basis(zc, fr.M, k + 1, D);
    // D_k as a matrix: columns are images of the monomial basis forms
    ExactMatrix Dk(bk1.dim(), bk.dim());
    for (size_t ti = 0; ti < bk.tuples.size(); ++ti)
        for (size_t mi = 0; mi < bk.mons.size(); ++mi) {
            Vec col = encode(delta_l(fr, basis_form(bk, ti, mi, zc)), bk1);
            int j = (int)(ti * bk.mons.size() + mi);
            for (int i = 0; i < bk1.dim(); ++i) Dk.at(i, j) = col[i];
        }
    std::vector<Vec> ker = Dk.kernel_basis();
    std::vector<Vec> im;
    if (k > 0) {
        FormBasis bkm = form_basis(zc, fr.M, k - 1, Dpot);
        for (size_t ti = 0; ti < bkm.tuples.size(); ++ti)
            for (size_t mi = 0; mi < bkm.mons.size(); ++mi)
                im.push_back(encode(delta_l(fr, basis_form(bkm, ti, mi, zc)), bk));
    }
    QuotientResult q = quotient_dim(im, ker, bk.dim());
    CohomologyResult r;
    r.dim = q.dim;
    for (const Vec& v : q.representatives) r.reps.push_back(decode(v, bk, zc));
    return r;
}

}  // namespace

CohomologyResult cohomology(const Brane& B, const GCStructure& J, int k, int D) {
    return cohomology_impl(B, J, k, D, D);
}

CohomologyResult stable_cohomology(const Brane& B, const GCStructure& J, int k, int D) {
    return cohomology_impl(B, J, k, D, D + 1);
}

Brane standard_brane(const Chart& chart, int m, int n, int k) {
    if (chart.dim() != 2 * m + 2 * n)
        throw std::invalid_argument("standard model needs dim 2m+2n");
    if (k < 0 || k > n) throw std::invalid_argument("complex rank out of range");
    std::vector<int> kept;
    for (int i = 0; i < m; ++i) kept.push_back(i);
    for (int i = 0; i < 2 * k; ++i) kept.push_back(2 * m + i);
    CoordSubmanifold Z = make_subm(chart, std::move(kept));
    HermData L;
    L.cover = make_cover(1, {});
    L.a[0] = DiffForm(Z.zchart.ctx, 1);
    return make_brane(std::move(Z), std::move(L));
}

}  // namespace gcdef
