#pragma once

// The DGLA layer: finite exact DGLAs with Maurer-Cartan theory and the gauge
// action, Deligne classification data, (bi)semicosimplicial cochain complexes
// with totalization, the two-row complex V built from a brane and a cover,
// the comparison map into algebroid cohomology, and obstruction lifting
// along small extensions.

#include <functional>
#include <optional>

#include "gcdeform/deform.hpp"

namespace gcdef {

// ---------------------------------------------------------------------------
// Finite cochain complexes over exact scalars.

struct CochainComplex {
    std::vector<int> dims;        // dims[k] = dim C^k, k = 0..K
    std::vector<ExactMatrix> d;   // d[k]: C^k -> C^{k+1}, one per k < K
};

// Validates shapes and d o d = 0.
CochainComplex make_complex(std::vector<int> dims, std::vector<ExactMatrix> d);
int betti(const CochainComplex& C, int k);
// Canonical cocycle representatives of a basis of H^k.
std::vector<Vec> cohomology_reps(const CochainComplex& C, int k);
// Is the k-cocycle v a coboundary? Optionally returns a primitive.
bool is_coboundary(const CochainComplex& C, int k, const Vec& v, Vec* primitive = nullptr);

// ---------------------------------------------------------------------------
// Finite DGLAs with a graded basis and exact structure constants. Elements
// carry Artin-algebra coefficients (Poly over a geometry-free context).

struct GradedElement {
    int deg = 0;
    PolyCtxPtr ctx;  // coefficient context (Artin generators, no geometry)
    std::vector<Poly> c;

    bool is_zero() const;
    GradedElement operator+(const GradedElement& o) const;
    GradedElement operator-() const;
    GradedElement operator-(const GradedElement& o) const { return *this + (-o); }
    GradedElement operator*(const QI& s) const;
    GradedElement operator*(const Poly& f) const;
    bool operator==(const GradedElement& o) const { return (*this - o).is_zero(); }
    bool in_maximal_ideal() const;
};

struct FDGLA {
    std::map<int, int> dims;              // basis size per degree
    std::map<int, ExactMatrix> diff;      // d_k: degree k -> k+1
    // [e^k_i, e^l_j] in coordinates of degree k+l; key (k,l), entry [i][j]
    std::map<std::pair<int, int>, std::vector<std::vector<Vec>>> br;

    int dim(int k) const;
    GradedElement zero(int deg, const PolyCtxPtr& ctx) const;
    GradedElement basis(int deg, int i, const PolyCtxPtr& ctx) const;
    GradedElement d(const GradedElement& x) const;
    GradedElement bracket(const GradedElement& x, const GradedElement& y) const;
};

// Validates d^2 = 0, graded antisymmetry, the graded Leibniz rule, and the
// graded Jacobi identity on all basis triples.
FDGLA make_fdgla(std::map<int, int> dims, std::map<int, ExactMatrix> diff,
                 std::map<std::pair<int, int>, std::vector<std::vector<Vec>>> br);

struct MCResult {
    bool ok = false;
    GradedElement residual;  // dx + [x,x]/2
};
MCResult mc_check(const FDGLA& g, const GradedElement& x);

// e^y . x = x + sum_n (ad_y^n / (n+1)!) ([y,x] - dy); preserves MC.
GradedElement gauge_act(const FDGLA& g, const GradedElement& y, const GradedElement& x,
                        int order);

bool is_abelian(const FDGLA& g);

// For abelian g: pi_0 of the Deligne groupoid is H^1(g) (x) m; returns the
// H^1 data. Throws on non-abelian input.
struct Pi0Abelian {
    int dim = 0;
    std::vector<Vec> reps;
};
Pi0Abelian deligne_pi0_abelian(const FDGLA& g);

// Orbit membership under the gauge group, solved layer by layer along the
// m-adic filtration; exact for any nilpotent coefficients.
bool deligne_equivalent(const FDGLA& g, const GradedElement& x, const GradedElement& y,
                        int order);

// Lift of a Maurer-Cartan element along a small extension: either a lift or
// the obstruction, a degree-2 cocycle of g whose class in H^2(g) (x) I is the
// obstruction class.
struct LiftResult {
    bool lifted = false;
    GradedElement lift;  // over the extension's source algebra
    Vec obstruction;     // coordinates in degree 2 when not lifted
};
LiftResult obstruction_lift(const FDGLA& g, const SmallExtension& ext,
                            const GradedElement& x);

// ---------------------------------------------------------------------------
// DGLAs presented by callables on section-type carriers (concentrated in
// degree 0 unless a differential is supplied). Axioms are spot-verified on
// caller-supplied sample elements; the carrier needs +, unary -, is_zero.

template <class V>
struct ConcreteDGLA {
    std::function<V(const V&, const V&)> bracket;
    std::function<V(const V&)> differential;  // empty: d = 0
};

template <class V>
bool lie_axioms_hold(const ConcreteDGLA<V>& g, const std::vector<V>& samples) {
    for (const V& x : samples)
        for (const V& y : samples)
            if (!(g.bracket(x, y) + g.bracket(y, x)).is_zero()) return false;
    for (const V& x : samples)
        for (const V& y : samples)
            for (const V& z : samples) {
                V jac = g.bracket(x, g.bracket(y, z)) + g.bracket(y, g.bracket(z, x)) +
                        g.bracket(z, g.bracket(x, y));
                if (!jac.is_zero()) return false;
            }
    if (g.differential)
        for (const V& x : samples)
            for (const V& y : samples) {
                V leib = g.differential(g.bracket(x, y)) - g.bracket(g.differential(x), y) -
                         g.bracket(x, g.differential(y));
                if (!leib.is_zero()) return false;
            }
    return true;
}

// ---------------------------------------------------------------------------
// Semicosimplicial cochain complexes and totalization.

struct SemiCxComplex {
    std::vector<CochainComplex> level;  // level[n], n = 0..N
    // coface[n][i] acts per internal degree: matrices level n deg k -> level n+1 deg k
    std::vector<std::vector<std::map<int, ExactMatrix>>> coface;
};

// Validates the cosimplicial identities d^j d^i = d^i d^{j-1} for i < j and
// that cofaces are chain maps.
SemiCxComplex make_semicx(std::vector<CochainComplex> level,
                          std::vector<std::vector<std::map<int, ExactMatrix>>> coface);

// Tot: C^k = (+)_n level[n]^{k-n} (blocks in ascending n), with
// D = (-1)^n d_n + sum_i (-1)^i coface_i; D^2 = 0 is verified.
CochainComplex tot(const SemiCxComplex& V);

// A bisemicosimplicial complex with entries concentrated in degree 0:
// dim[m][n] for horizontal level m and vertical level n, horizontal cofaces
// hface[m][n][i]: (m,n) -> (m+1,n), vertical vface[m][n][i]: (m,n) -> (m,n+1).
struct BisemiComplex {
    std::vector<std::vector<int>> dim;
    std::vector<std::vector<std::vector<ExactMatrix>>> hface;
    std::vector<std::vector<std::vector<ExactMatrix>>> vface;

    int rows() const { return dim.empty() ? 0 : (int)dim[0].size(); }
    int cols() const { return (int)dim.size(); }
};

// Validates both families of cosimplicial identities and their commutation.
BisemiComplex make_bisemi(std::vector<std::vector<int>> dim,
                          std::vector<std::vector<std::vector<ExactMatrix>>> hface,
                          std::vector<std::vector<std::vector<ExactMatrix>>> vface);

// Row-first totalization: Tot of each row V_{*,n} (entries in internal
// degree m), assembled into a semicosimplicial complex over n.
SemiCxComplex tot_rows(const BisemiComplex& V);
CochainComplex tot(const BisemiComplex& V);

// ---------------------------------------------------------------------------
// The two-row complex of a brane over a cover: the top row is the nerve of
// the generalized holomorphic sections T, the bottom row H (+) the nerve of
// the fiber-product algebra K, realized as polynomial-degree <= D
// truncations on the full chart (so all restrictions are identities).

struct VComplex {
    Brane B;
    GCStructure J;
    NerveCover cover;
    int D = 0;

    std::vector<GenSection> t_basis;  // holomorphic sections, degree <= D
    std::vector<KElement> k_basis;    // fiber-product elements over t_basis
    std::vector<GenSection> h_basis;  // independent Hamiltonian sections
    ExactMatrix chi_mat;              // K -> T in these bases
    ExactMatrix h_mat;                // H -> T in these bases

    BisemiComplex V;
    CochainComplex C;  // tot(V)

    // block offsets inside C^k: [H | K per k-simplex | T per (k-1)-simplex]
    int h_offset(int k) const;
    int k_offset(int k, int simplex_index) const;
    int t_offset(int k, int simplex_index) const;
};

VComplex build_v(const Brane& B, const GCStructure& J, const NerveCover& cover, int D);

// Do the truncated spans close under their brackets? Reports the first
// offending pair instead of truncating silently.
struct ClosureReport {
    bool closed = true;
    std::string detail;
};
ClosureReport bracket_closure(const VComplex& V);

struct H2Result {
    int dim = 0;
    std::vector<Vec> reps;
};
H2Result h2_total(const VComplex& V);

// The comparison map on a 2-cocycle of C: reduce to vanishing H- and
// function-parts, take the normal pairing of the edge sections, solve the
// Cech primitive, and return the resulting closed degree-2 cochain.
BAlgForm phi_map(const VComplex& V, const Vec& cocycle);

// Is the degree-2 cochain delta_l of a degree-1 cochain with coefficients of
// degree <= D?
bool is_exact2(const BraneFrame& fr, const BAlgForm& w, int D);

// Rank test: the images of a basis of H^2(C) stay independent modulo
// delta_l-exact degree-2 cochains.
bool phi_injective_on_h2(const VComplex& V);

}  // namespace gcdef
