#pragma once

// Generalized submanifolds and branes on coordinate subspaces: the
// generalized tangent bundle T(Z,F), the extension space K, compatibility
// with a GC structure, the leaf-wise-Lagrangian test, the Lie algebroid l
// with delta_l, degree-truncated algebroid cohomology, and the generalized
// normal bundle pairing.

#include <map>

#include "gcdeform/gcs.hpp"

namespace gcdef {

// A coordinate subspace Z = {y^k = 0} of an ambient chart. "Kept" coordinates
// restrict to coordinates on Z; "killed" ones vanish on Z.
struct CoordSubmanifold {
    Chart ambient;
    std::vector<int> kept;    // sorted ambient indices retained on Z
    std::vector<int> killed;  // sorted complement
    Chart zchart;             // chart on Z (kept coordinate names, same formal data)

    int zdim() const { return (int)kept.size(); }

    Poly restrict_poly(const Poly& p) const;       // rho: set killed vars to 0
    DiffForm restrict_form(const DiffForm& w) const;  // pullback i^*
    VectorField restrict_tangent(const VectorField& v) const;  // kept components
    Poly lift_poly(const Poly& p) const;           // pi^*: y-independent lift
    DiffForm lift_form(const DiffForm& w) const;
    bool vanishes_on_z(const Poly& p) const;       // membership in I^Z
};

CoordSubmanifold make_subm(const Chart& ambient, std::vector<int> kept);

// Abstract simplicial nerve of a cover: vertices 0..verts-1 and a
// downward-closed family of simplices (stored as sorted vertex tuples).
struct NerveCover {
    int verts = 0;
    std::vector<std::vector<int>> simplices;

    bool has(const std::vector<int>& s) const;
    std::vector<std::vector<int>> of_dim(int k) const;  // (k+1)-tuples
};

NerveCover make_cover(int verts, std::vector<std::vector<int>> generators);

// Hermitian line-bundle data on Z over an abstract cover: per-edge transition
// exponents c_IJ (with c_JI = -c_IJ) and per-vertex connection 1-forms a_I.
struct HermData {
    NerveCover cover;
    std::map<std::pair<int, int>, Poly> c;  // key (I,J) with I < J
    std::map<int, DiffForm> a;

    Poly cval(int i, int j) const;  // c_IJ for any order
};

struct Brane {
    CoordSubmanifold Z;
    HermData L;
    DiffForm F;  // curvature on the Z chart, F = da_I
};

// Validates: a_J - a_I = dc_IJ on edges; c_JK - c_IK + c_IJ constant integer
// on triangles; all da_I equal and closed.
Brane make_brane(CoordSubmanifold Z, HermData L);

// Is the restriction of x a section of T(Z,F)?
bool gen_tangent_membership(const CoordSubmanifold& Z, const DiffForm& F, const GenSection& x);
bool in_KB(const Brane& B, const GenSection& x);

// Module generators of K over the ambient function ring.
std::vector<GenSection> kb_generators(const Brane& B);

struct CompatResult {
    bool ok = true;
    int gi = -1, gj = -1;  // indices of a violating generator pair
    Poly residue;          // Q_J value not vanishing on Z
};

// Q_J(k,k') = <Jk,k'> lies in I^Z on all generator pairs.
CompatResult brane_compatible(const Brane& B, const GCStructure& J);

// Leaf-wise-Lagrangian test on a deterministic rational sample grid; throws
// when the Poisson rank is not constant over the sampled points of Z.
bool lwl_check(const Brane& B, const GCStructure& J);

struct BraneFrame {
    CoordSubmanifold Z;
    int N = 0;                 // ambient dimension
    int M = 0;                 // rank of l = N/2
    std::vector<Vec> tb;       // N constant basis vectors of T(Z,F), length 2N
    std::vector<Vec> l;        // M canonical basis vectors of the +i eigenspace
    std::vector<Vec> nb;       // N complement representatives for N(Z,F)

    Poly anchor_apply(int a, const Poly& f) const;  // on Z-chart polynomials
    GenSection section(int a) const;  // l-frame vector as a constant ambient section
};

BraneFrame brane_frame(const Brane& B, const GCStructure& J);

// A section of Lambda^k l-dual (k <= 3) by its values on the l-frame,
// with Z-polynomial coefficients.
struct BAlgForm {
    PolyCtxPtr ctx;  // Z chart context
    int deg = 0;
    int M = 0;
    Poly f;                // deg 0
    std::vector<Poly> a;   // deg 1
    std::vector<Poly> ab;  // deg 2, row-major antisymmetric M x M
    std::vector<Poly> abc; // deg 3, full antisymmetric M x M x M

    static BAlgForm zero(const PolyCtxPtr& c, int deg, int M);
    static BAlgForm from_function(const Poly& f, int M);
    bool is_zero() const;
    BAlgForm operator+(const BAlgForm& o) const;
    BAlgForm operator-() const;
    BAlgForm operator-(const BAlgForm& o) const { return *this + (-o); }
    BAlgForm operator*(const QI& s) const;
    bool operator==(const BAlgForm& o) const { return (*this - o).is_zero(); }
};

// delta_l in degrees 0..2 (constant frames).
BAlgForm delta_l(const BraneFrame& fr, const BAlgForm& alpha);

// mu(q(r(x))) = 2<x,.>|_l restricted to Z, for an ambient section x.
BAlgForm normal_mu(const BraneFrame& fr, const GenSection& x);

struct CohomologyResult {
    int dim = 0;
    std::vector<BAlgForm> reps;
};

// H^k of (Lambda^* l-dual, delta_l) on coefficients of total degree <= D.
CohomologyResult cohomology(const Brane& B, const GCStructure& J, int k, int D);

// The degree-<= D part of the untruncated polynomial cohomology: cocycles of
// coefficient degree <= D modulo delta_l of potentials of degree <= D + 1.
// Since delta_l lowers coefficient degree by exactly one on constant frames,
// this quotient is free of truncation-boundary classes.
CohomologyResult stable_cohomology(const Brane& B, const GCStructure& J, int k, int D);

// The standard brane Z_0^k in the standard model chart (dim 2m+2n): keeps the
// first m symplectic coordinates and the first 2k complex ones, trivial L.
Brane standard_brane(const Chart& chart, int m, int n, int k);

}  // namespace gcdef
