#pragma once

#include "cmtheta/util.hpp"

#include <memory>
#include <string>
#include <vector>

namespace cmtheta {

// ---------------------------------------------------------------------------
// Imaginary quadratic field K = Q(sqrt(d)), d < 0 squarefree.
//
// D = disc = d if d = 1 mod 4, else 4d.  The ring of integers is Z[w] with
// w = (D + sqrt(D)) / 2, so trace(w) = D and N(w) = (D^2 - D)/4, and the
// conjugate is wbar = D - w.
// ---------------------------------------------------------------------------

class Field {
public:
    explicit Field(long d);

    long d() const { return d_; }
    const Int& disc() const { return D_; }
    const Int& omega_norm() const { return Nw_; }   // N(w)
    const Int& omega_trace() const { return D_; }   // tr(w) = D

    // Splitting of a rational prime l: +1 split, -1 inert, 0 ramified.
    int splitting(const Int& l) const;

    bool operator==(const Field& o) const { return d_ == o.d_; }

private:
    long d_;
    Int D_, Nw_;
};

// ---------------------------------------------------------------------------
// Algebraic integers x + y*w
// ---------------------------------------------------------------------------

struct QuadInt {
    const Field* F = nullptr;
    Int x = 0, y = 0;

    QuadInt() = default;
    QuadInt(const Field& f, Int xx, Int yy) : F(&f), x(std::move(xx)), y(std::move(yy)) {}

    QuadInt operator+(const QuadInt& o) const;
    QuadInt operator-(const QuadInt& o) const;
    QuadInt operator*(const QuadInt& o) const;
    QuadInt operator-() const;
    bool operator==(const QuadInt& o) const { return x == o.x && y == o.y; }
    bool is_zero() const { return x == 0 && y == 0; }

    QuadInt conj() const;   // x + y*(D - w) = (x + yD) - y*w
    Int norm() const;       // x^2 + D x y + N(w) y^2  (positive definite)
    Int trace() const;      // 2x + D y

    std::string str() const;
};

// ---------------------------------------------------------------------------
// Nonzero integral ideals in Hermite normal form:
//   I = a Z + (b + c w) Z   with c | a, c | b, 0 <= b < a, and ac = N(I).
// ---------------------------------------------------------------------------

class Ideal {
public:
    Ideal() = default;

    static Ideal from_hnf(const Field& f, Int a, Int b, Int c);
    static Ideal from_generators(const Field& f, const std::vector<QuadInt>& gens);
    static Ideal principal(const QuadInt& g);
    static Ideal unit_ideal(const Field& f);

    const Field& field() const { return *F_; }
    const Int& a() const { return a_; }
    const Int& b() const { return b_; }
    const Int& c() const { return c_; }
    Int norm() const { return a_ * c_; }
    bool is_unit_ideal() const { return a_ == 1 && c_ == 1; }

    Ideal operator*(const Ideal& o) const;
    bool operator==(const Ideal& o) const { return a_ == o.a_ && b_ == o.b_ && c_ == o.c_; }
    bool operator<(const Ideal& o) const; // lex on (a, c, b), for canonical ordering

    Ideal conj() const;

    // Exact quotient: this = q * other must hold; throws BadInputError otherwise.
    Ideal divide_exact(const Ideal& other) const;

    bool contains(const QuadInt& g) const;
    bool divides(const Ideal& other) const; // this | other
    bool is_coprime_to(const Ideal& other) const;

    // Residues: the transversal {x + y w : 0 <= x < a, 0 <= y < c}.
    QuadInt reduce(const QuadInt& g) const;
    std::vector<QuadInt> residues() const; // all N(I) of them, lex order

    std::string hnf_str() const; // "a,b,c"

private:
    const Field* F_ = nullptr;
    Int a_ = 1, b_ = 0, c_ = 1;
};

// Prime ideals above a rational prime l, each with its residue degree.
struct PrimeAbove {
    Ideal ideal;
    int residue_degree = 1; // 1 for split/ramified, 2 for inert
    int ramification = 1;   // 2 for ramified
};
std::vector<PrimeAbove> primes_above(const Field& f, const Int& l);

// All integral ideals of norm exactly n, ordered lex by (a, c, b).
std::vector<Ideal> ideals_of_norm(const Field& f, const Int& n);

// Factor an ideal into prime ideals with exponents (primes ordered by the
// rational prime below, then canonically among conjugates).
std::vector<std::pair<Ideal, int>> factor_ideal(const Ideal& I);

// ---------------------------------------------------------------------------
// Units
// ---------------------------------------------------------------------------

struct UnitGroup {
    QuadInt generator; // -1, i (d=-1), or zeta_6 (d=-3)
    long order;        // 2, 4, or 6
    std::vector<QuadInt> all() const;
};
UnitGroup unit_group(const Field& f);

// ---------------------------------------------------------------------------
// Binary quadratic forms (A, B, C) with B^2 - 4AC = D, used as an independent
// model of the class group.
// ---------------------------------------------------------------------------

struct QuadForm {
    Int A, B, C;
    bool operator==(const QuadForm& o) const { return A == o.A && B == o.B && C == o.C; }
    bool operator<(const QuadForm& o) const;
};

// All reduced forms of discriminant D: |B| <= A <= C, and B >= 0 if |B| = A
// or A = C.
std::vector<QuadForm> reduced_forms(const Int& D);
QuadForm reduce_form(QuadForm f);
QuadForm ideal_to_form(const Ideal& I);
Ideal form_to_ideal(const Field& f, const QuadForm& q);

// ---------------------------------------------------------------------------
// Class group with discrete logarithms
// ---------------------------------------------------------------------------

class ClassGroup {
public:
    explicit ClassGroup(const Field& f);

    const Field& field() const { return *F_; }
    const AbelianGroup& structure() const { return G_; }
    Int h() const { return G_.order(); }

    // Coordinates of [I] w.r.t. the canonical (SNF) generators.
    std::vector<Int> dlog(const Ideal& I) const;

    // Ideal representatives of the canonical generators.
    const std::vector<Ideal>& generators() const { return gens_; }

    // Representatives coprime to a given modulus, one per canonical generator
    // (smallest-norm ideals in the right classes).
    std::vector<Ideal> coprime_generators(const Ideal& modulus) const;

private:
    const Field* F_;
    AbelianGroup G_;
    std::vector<Ideal> gens_;              // canonical generator reps
    std::vector<Ideal> closure_gens_;      // original generating primes
    std::map<std::string, std::vector<Int>> words_; // form key -> word on closure gens
};

// A generator of a principal ideal, normalized so that among all unit
// multiples the representative has first nonzero coordinate positive and is
// lex-smallest as (x, y).  Throws NotPrincipalError if I is not principal.
QuadInt principal_generator(const Ideal& I);

// Shared per-discriminant field registry (Field instances must outlive the
// objects holding pointers to them).
const Field& field_for(long d);

} // namespace cmtheta
