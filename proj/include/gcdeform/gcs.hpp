#pragma once

// Generalized complex structures on polynomial charts: the complex and
// symplectic constructors and their products, integrability via the Nijenhuis
// tensor, the +i eigenbundle L with its Dolbeault-type operator delta_L,
// Poisson/type data, generalized holomorphic and Hamiltonian sections.

#include "gcdeform/courant.hpp"
#include "gcdeform/matrix.hpp"

namespace gcdef {

struct GCStructure {
    Chart chart;
    GenEndo endo;  // preserves the pairing, squares to -id

    int dim() const { return chart.dim(); }
    bool constant_coefficients() const;

    // Block P = J_12 applied to a 1-form, giving a vector field, and
    // K = J_22 applied to a 1-form, giving a 1-form.
    VectorField apply_P(const DiffForm& a) const;
    DiffForm apply_K(const DiffForm& a) const;
};

// Validates J^2 = -id and pairing preservation.
GCStructure make_gc(const Chart& chart, GenEndo endo);

// Block form diag(-J, J^dual) for an almost complex structure J given as an
// n x n row-major matrix acting on tangent components.
GCStructure make_complex_gc(const Chart& chart, const std::vector<Poly>& J);

// Block form [[0, -w^{-1}], [w, 0]], where the map w(xi) = iota(xi)omega.
// Requires omega closed with constant coefficients and invertible.
GCStructure make_symplectic_gc(const Chart& chart, const DiffForm& omega);

// Product structure on a chart whose coordinates are the concatenation of the
// two factor charts' coordinates (matched by name).
GCStructure product_gc(const GCStructure& a, const GCStructure& b, const Chart& product_chart);

// The standard model on R^{2m+2n}: the first 2m coordinates carry the
// symplectic structure omega = sum_i ds^{m+i} ^ ds^i, the last 2n the complex
// structure pairing coordinates (2j-1, 2j). The chart must have dim 2m+2n.
GCStructure standard_gc(const Chart& chart, int m, int n);

// Nij(A,B) = [JA,JB]_C - J[JA,B]_C - J[A,JB]_C - [A,B]_C.
GenSection nijenhuis(const GCStructure& J, const GenSection& A, const GenSection& B);

// Nijenhuis vanishing on all constant basis pairs (sufficient by tensoriality).
bool is_integrable(const GCStructure& J);

// The Poisson block P as an n x n row-major polynomial matrix.
std::vector<Poly> poisson_of(const GCStructure& J);

// type = dim/2 - rank(P at the point)/2.
int type_at(const GCStructure& J, const std::vector<Q>& point);

// Constant frame of the +i eigenbundle L.
struct LFrame {
    PolyCtxPtr ctx;
    int N = 0;                    // chart dimension = rank of L
    std::vector<Vec> basis;       // N constant vectors of length 2N, RREF-canonical
    ExactMatrix pair_mat;         // (a,b) -> 2<conj(l_b), l_a>, invertible

    // anchor of the a-th frame vector applied to a function
    Poly anchor_apply(int a, const Poly& f) const;
    GenSection section(int a) const;  // the frame vector as a constant GenSection
};

LFrame l_frame(const GCStructure& J);

// A section of Lambda^k L-dual (k <= 2) stored by its values on the frame.
struct AlgebroidForm {
    PolyCtxPtr ctx;
    int deg = 0;
    int N = 0;
    Poly f;                 // deg 0
    std::vector<Poly> a;    // deg 1, a[i] = alpha(l_i)
    std::vector<Poly> ab;   // deg 2, row-major antisymmetric, ab[i*N+j] = alpha(l_i,l_j)

    static AlgebroidForm zero(const PolyCtxPtr& c, int deg, int N);
    static AlgebroidForm from_function(const Poly& f, int N);
    bool is_zero() const;
    AlgebroidForm operator+(const AlgebroidForm& o) const;
    AlgebroidForm operator-() const;
    AlgebroidForm operator-(const AlgebroidForm& o) const { return *this + (-o); }
    AlgebroidForm operator*(const QI& s) const;
    bool operator==(const AlgebroidForm& o) const { return (*this - o).is_zero(); }
};

// mu(x) = 2<x,.>|_L as a degree-1 algebroid form.
AlgebroidForm mu(const LFrame& fr, const GenSection& x);

// delta_L in degrees 0 and 1 (constant frames).
AlgebroidForm delta_L(const LFrame& fr, const AlgebroidForm& alpha);

struct HoloResult {
    bool holomorphic = false;
    AlgebroidForm delta_mu;  // degree-2 residual
    GenEndo act_J;           // x . J residual
};

// Checks delta_L mu(x) = 0 and x.J = 0 (the two must agree).
HoloResult is_gen_holomorphic(const GCStructure& J, const LFrame& fr, const GenSection& x);

// x_f = Re(J(0,df) - (0, i df)).
GenSection gen_hamiltonian(const GCStructure& J, const Poly& f);

// A witness h with [x_f, x_g] = x_h for the symmetry Lie-algebra bracket.
Poly hamiltonian_bracket_witness(const GCStructure& J, const Poly& f, const Poly& g);

}  // namespace gcdef
