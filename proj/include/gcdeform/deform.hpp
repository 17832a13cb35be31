#pragma once

// Formal deformations of branes over local Artin coefficients: deformations
// of the Hermitian bundle data over the nerve, deformations of the embedding
// through formal flows, equivalences and the deformation groupoid,
// compatibility with a generalized complex structure, the first-order class
// in algebroid cohomology, the restricted-symmetry Lie algebra and its
// induced equivalences, descent data over covers, and transports along
// symmetries of the undeformed brane.

#include <optional>
#include <utility>

#include "gcdeform/brane.hpp"

namespace gcdef {

// ---------------------------------------------------------------------------
// Bundle deformations. All data lives on the Z chart of a brane; the Artin
// generators of the chart context supply the maximal ideal m. A deformation
// adds an m-valued exponent f_IJ to each transition and an m-valued 1-form
// u_I to each connection form.

struct BundleDeformation {
    HermData base;
    std::map<std::pair<int, int>, Poly> f;  // key (I,J) with I < J, values in m
    std::map<int, DiffForm> u;              // per-vertex, degree 1, values in m

    Poly fval(int i, int j) const;          // f_IJ for any order, f_JI = -f_IJ
    Poly c_hat(int i, int j) const;         // c_IJ + f_IJ
    DiffForm a_hat(int i) const;            // a_I + u_I

    bool operator==(const BundleDeformation& o) const;
};

// Validates: membership in m, u_J - u_I = d f_IJ on edges, and the exact
// cocycle identity f_JK - f_IK + f_IJ = 0 on triangles.
BundleDeformation make_bundle_deformation(HermData base,
                                          std::map<std::pair<int, int>, Poly> f,
                                          std::map<int, DiffForm> u);
BundleDeformation trivial_bundle_deformation(const HermData& base);

// {g_I}: from -> to, i.e. to.f_IJ = from.f_IJ + g_J - g_I and
// to.u_I = from.u_I + d g_I, with every g_I in m.
bool is_bundle_morphism(const BundleDeformation& from, const BundleDeformation& to,
                        const std::map<int, Poly>& g);

// Left action of a Z-level symmetry x = e^{(0,w)} e^{(tau,0)}:
// c_hat'_IJ = e^tau c_hat_IJ and a_hat'_I = e^tau a_hat_I - w.
BundleDeformation bundle_act(const SymElement& x, const BundleDeformation& L);
// The matching action on morphisms, g_I -> e^tau g_I.
std::map<int, Poly> bundle_act_morphism(const SymElement& x, const std::map<int, Poly>& g);

// A morphism gamma from the input to a deformation whose edge parts all
// vanish, found by propagating over a spanning forest of the nerve; throws
// when the edge parts are not exact in the nerve 1-cohomology.
std::pair<std::map<int, Poly>, BundleDeformation> normalize_transitions(
    const BundleDeformation& L);

// ---------------------------------------------------------------------------
// Brane deformations. The embedding deforms through the induced ring map
// rho_hat: ambient functions -> Z functions, recorded by its values on the
// ambient coordinates. rho_hat = rho e^xi for a (non-unique) formal ambient
// vector field xi recovered by realize_xi.

struct BraneDeformation {
    Brane base;
    std::vector<Poly> rho;  // Z-chart image of each ambient coordinate
    BundleDeformation bundle;
    int order = 2;  // nilpotency order of the Artin coefficients

    Poly rho_apply(const Poly& ambient) const;
    DiffForm rho_apply_form(const DiffForm& ambient) const;
};

// Validates: rho reduces to the coordinate restriction mod m, and the bundle
// data deforms the brane's Hermitian data.
BraneDeformation make_brane_deformation(Brane base, std::vector<Poly> rho,
                                        BundleDeformation bundle, int order);
BraneDeformation trivial_deformation(const Brane& B, int order);

bool deformations_equal(const BraneDeformation& a, const BraneDeformation& b);

// An ambient formal vector field xi with rho_hat = rho e^{xi}, built with
// y-independent corrections by m-adic iteration.
VectorField realize_xi(const BraneDeformation& B);

// Right action of an ambient symmetry g = e^{(0,w)} e^{(eta,0)}:
// rho' = rho_hat e^{eta} on coordinates, u'_I = u_I + rho_hat(w).
BraneDeformation brane_act(const BraneDeformation& B, const SymElement& g);

// The deformation B . e^{x} of the undeformed brane, for x in m.
BraneDeformation induced_deformation(const Brane& B, const GenSection& x, int order);

// Compatibility with J: for some (equivalently any) realization xi and
// ambient lifts of the u_I, the transported pairing <(e^{u_I} e^{xi} . J) k, k'>
// lies in I^Z on all generator pairs of K, at every vertex.
bool is_compatible_deformation(const BraneDeformation& B, const GCStructure& J);

// ---------------------------------------------------------------------------
// Equivalences. A morphism B -> B' consists of a flow e^tau on Z, per-vertex
// bundle functions g_I, and an ambient symmetry z identifying B' . z with the
// strict image of B. Strict morphisms have z = 1.

struct Equivalence {
    VectorField tau;         // Z-chart vector field in m
    std::map<int, Poly> g;   // per-vertex Z functions in m
    SymElement z;            // ambient correction; identity for strict morphisms
};

Equivalence identity_equivalence(const BraneDeformation& B);
bool equivalences_equal(const Equivalence& a, const Equivalence& b);

// The strict image of B under (tau, g): rho' = e^tau rho_hat and the bundle
// determined by {g_I}: L' -> e^tau . L.
BraneDeformation apply_equivalence(const BraneDeformation& B, const VectorField& tau,
                                   const std::map<int, Poly>& g);

// Does psi define a morphism from -> to, i.e. strict image of `from` equals
// to . psi.z?
bool is_equivalence(const BraneDeformation& from, const BraneDeformation& to,
                    const Equivalence& psi);

// (psi2 o psi1): tau by BCH, g_I = e^{tau2} g1_I + g2_I, z = z2 z1.
Equivalence equiv_compose(const Equivalence& psi2, const Equivalence& psi1, int order);
Equivalence equiv_inverse(const Equivalence& psi, int order);

// ---------------------------------------------------------------------------
// First-order theory over dual-number coefficients eps^2 = 0.

// Coefficient of the first power of the named formal generator, with the
// generator stripped.
Poly formal_linear_part(const Poly& p, const std::string& name);

// The class of a compatible deformation: normalize transitions, realize xi,
// and evaluate the generalized normal pairing on (xi, lift of the common u).
// Returns a degree-1 cochain with eps-free coefficients.
BAlgForm first_order_class(const BraneDeformation& B, const GCStructure& J);

// Is w = delta_l of a degree-(k-1) cochain with polynomial coefficients of
// one degree higher? Degree-1 input only. The witness is canonical.
std::optional<BAlgForm> exactness_witness(const BraneFrame& fr, const BAlgForm& w);
bool is_exact(const BraneFrame& fr, const BAlgForm& w);

// ---------------------------------------------------------------------------
// The restricted-symmetry algebra on Z and its fiber product with ambient
// brane symmetries.

struct RElement {
    VectorField xi;  // Z chart
    Poly f;          // Z chart

    bool is_zero() const { return xi.is_zero() && f.is_zero(); }
    RElement operator+(const RElement& o) const { return {xi + o.xi, f + o.f}; }
    RElement operator-() const { return {-xi, -f}; }
    RElement operator-(const RElement& o) const { return *this + (-o); }
    RElement operator*(const QI& s) const { return {xi * s, f * s}; }
    bool operator==(const RElement& o) const { return (*this - o).is_zero(); }
};

// [(xi,f),(eta,g)] = ([xi,eta], xi(g) - eta(f) + iota(eta) iota(xi) F).
RElement r_bracket(const DiffForm& F, const RElement& a, const RElement& b);

// The Lie homomorphism (xi,f) -> (xi, iota(xi)F - df) into symmetries of
// T(Z,F).
GenSection mu_r(const DiffForm& F, const RElement& a);

struct KElement {
    GenSection amb;  // ambient (eta, w) with eta tangent to Z
    RElement bdry;   // (tau, h) on Z

    bool is_zero() const { return amb.is_zero() && bdry.is_zero(); }
    KElement operator+(const KElement& o) const { return {amb + o.amb, bdry + o.bdry}; }
    KElement operator-() const { return {-amb, -bdry}; }
    KElement operator-(const KElement& o) const { return *this + (-o); }
    KElement operator*(const QI& s) const { return {amb * s, bdry * s}; }
    bool operator==(const KElement& o) const { return (*this - o).is_zero(); }
};

// Validates: eta tangent to Z with restriction tau, and
// w|_Z = iota(tau) F - d h.
KElement make_k_element(const Brane& B, GenSection amb, RElement bdry);
KElement k_bracket(const Brane& B, const KElement& a, const KElement& b);

// The ambient symmetry e^{amb} of e^y.
SymElement chi_exp(const KElement& y, int order);

// The strict equivalence induced by e^y on any deformation: tau from the
// boundary part and g_I = \int_0^1 e^{t tau}(iota(tau) a_I + h) dt.
Equivalence sigma_morphism(const Brane& B, const KElement& y, int order);

// ---------------------------------------------------------------------------
// Descent. Objects over the vertices of an abstract ambient cover, glued by
// equivalences psi_ab: objs[b] -> objs[a] on edges.

struct DescentDatum {
    NerveCover cover;
    std::map<int, BraneDeformation> objs;
    std::map<std::pair<int, int>, Equivalence> psi;  // key (a,b) with a < b
};

// Every violated condition, each located at its simplex; empty when valid.
std::vector<std::string> descent_validate(const DescentDatum& D);

DescentDatum restrict_global(const BraneDeformation& B, const NerveCover& cover);

// Glue a valid datum over a forest-acyclic nerve back to a single
// deformation; throws when an obstruction survives on a non-tree edge.
BraneDeformation reassemble(const DescentDatum& D);

// ---------------------------------------------------------------------------
// Transports along symmetries of the undeformed brane; each is an
// equivalence of deformation groupoids applied to one object.

// Re-present the undeformed bundle by gamma: c_IJ += g_J - g_I,
// a_I += d g_I (real g, integer-compatible); deformation parts unchanged.
BraneDeformation transport_gamma(const BraneDeformation& B, const std::map<int, Poly>& g);

// Pull back along a vertex map sigma into a finer nerve.
BraneDeformation transport_refine(const BraneDeformation& B, const NerveCover& finer,
                                  const std::vector<int>& sigma);

// B-field transport by an ambient 1-form u: the base moves to
// a_I - rho(u), F - d rho(u); the deformation picks up rho(u) - rho_hat(u).
BraneDeformation transport_btransform(const BraneDeformation& B, const DiffForm& u);

}  // namespace gcdef
