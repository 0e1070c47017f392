#pragma once

#include "cmtheta/kfield.hpp"
#include "cmtheta/util.hpp"

#include <boost/multiprecision/mpfr.hpp>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace cmtheta {

// ~200-bit real arithmetic for complex embeddings.
using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<60>>;

struct CNum {
    Real re, im;
};

CNum cnum_add(const CNum& a, const CNum& b);
CNum cnum_sub(const CNum& a, const CNum& b);
CNum cnum_mul(const CNum& a, const CNum& b);
CNum cnum_scale(const CNum& a, const Real& s);
Real cnum_abs(const CNum& a);

class Tower;

// Element of a value ring, stored as a dense rational coordinate vector over
// the monomial basis  zeta^i * s^eps * r_1^{e_1} ... r_k^{e_k}.  The dense
// form is the normal form: two elements are equal iff their coordinates are.
class TowerElem {
public:
    TowerElem() = default;

    const Tower* tower() const { return T_; }
    const std::vector<Rat>& coords() const { return c_; }
    bool is_zero() const;
    bool is_rational() const;      // supported on the monomial 1 only
    Rat rational_value() const;    // requires is_rational()

    TowerElem operator+(const TowerElem& o) const;
    TowerElem operator-(const TowerElem& o) const;
    TowerElem operator-() const;
    TowerElem operator*(const TowerElem& o) const;
    bool operator==(const TowerElem& o) const;
    bool operator!=(const TowerElem& o) const { return !(*this == o); }

    TowerElem scale(const Rat& s) const;
    TowerElem inverse() const;              // throws ZeroDivisorError
    TowerElem pow(const Int& n) const;      // negative n inverts first

    std::string str() const;

private:
    friend class Tower;
    TowerElem(const Tower* T, std::vector<Rat> c) : T_(T), c_(std::move(c)) {}
    const Tower* T_ = nullptr;
    std::vector<Rat> c_;
};

// Value ring Q(zeta_M)[s]/(s^2 - D)[r_1,...]/(r_j^{m_j} - alpha_j).
//
// The quadratic stage is only materialized when sqrt(D) does not already lie
// in Q(zeta_M) (i.e. when |D| does not divide M); otherwise sqrt(D) is the
// quadratic Gauss sum in the cyclotomic part and the base is plain Q(zeta_M).
// Radical stages may fail to be fields; that is fine for the arithmetic here
// (inversion reports zero divisors).
class Tower {
public:
    struct RadicalSpec {
        long power;               // m_j >= 2
        std::vector<Rat> alpha;   // coords over the tower of all earlier stages
    };

    // field_d = 0 requests a plain cyclotomic ring (no sqrt(D) available).
    Tower(long M, long field_d, std::vector<RadicalSpec> radicals = {});
    Tower(const Tower&) = delete;
    Tower& operator=(const Tower&) = delete;

    long cyclotomic_order() const { return M_; }
    long field_d() const { return d_; }
    long disc() const { return D_; }
    bool has_quadratic_stage() const { return bd_ == 2; }
    std::size_t radical_count() const { return rad_.size(); }
    long radical_power(std::size_t j) const { return rad_[j].power; }
    TowerElem radical_base(std::size_t j) const; // alpha_j as an element
    std::size_t dim() const { return dim_; }

    TowerElem zero() const;
    TowerElem one() const;
    TowerElem from_rational(const Rat& q) const;
    TowerElem from_coords(std::vector<Rat> c) const;
    TowerElem zeta() const;
    TowerElem zeta_power(const Int& k) const;
    TowerElem zeta_of_order(const Int& n) const; // requires n | M
    TowerElem sqrt_disc() const;                 // requires field_d != 0
    TowerElem radical(std::size_t j) const;
    TowerElem embed_quadint(const QuadInt& x) const;

    // Ring embedding into a compatible tower: to.M must be a multiple of M,
    // the quadratic data must agree, and `to` must carry the same radical
    // stages (checked by transferring each alpha).
    static TowerElem transfer(const TowerElem& x, const Tower& to);

    CNum embed_complex(const TowerElem& x) const;

    std::string describe() const;

private:
    friend class TowerElem;
    friend class ResidueContext;
    friend class PadicContext;

    std::vector<Rat> mul_level(std::size_t level, const Rat* A, const Rat* B) const;
    std::vector<Rat> mul_full(const std::vector<Rat>& A, const std::vector<Rat>& B) const;
    TowerElem make(std::vector<Rat> c) const { return TowerElem(this, std::move(c)); }

    long M_;
    long d_;   // field discriminant parameter d (0 = none)
    long D_;   // fundamental discriminant (0 = none)
    int bd_;   // 1 or 2: dimension of the quadratic layer over Q(zeta_M)
    std::size_t phi_;
    std::vector<Int> cyclo_;               // Phi_M coefficients (monic, degree phi_)
    std::vector<std::vector<Int>> red_;    // x^(phi+u) mod Phi_M, u = 0..phi-2
    struct Radical {
        long power;
        std::vector<Rat> alpha;            // padded to the previous stage's dim
    };
    std::vector<Radical> rad_;
    std::vector<std::size_t> subdim_;      // subdim_[j] = dim of stage j (j = 0..k)
    std::size_t dim_;
};

std::vector<Int> cyclotomic_polynomial(long M);

// Reduction of tower values to a finite field F_{p^k} = F_p[t]/(h), for an odd
// prime p not dividing the leading data denominators.  All choices (h, the
// image of zeta, of sqrt(D), of each radical) are deterministic lex-minimal.
class ResidueContext {
public:
    using FqElem = std::vector<Int>; // length k, entries in [0, p)

    ResidueContext(const Tower& T, const Int& p);

    const Int& p() const { return p_; }
    std::size_t degree() const { return k_; }
    const std::vector<Int>& modulus_poly() const { return h_; }

    FqElem reduce(const TowerElem& x) const; // throws NotIntegralError
    bool reduces_to_zero(const TowerElem& x) const;

    FqElem fq_mul(const FqElem& a, const FqElem& b) const;
    FqElem fq_pow(const FqElem& a, Int e) const;
    FqElem fq_inverse(const FqElem& a) const;
    FqElem fq_one() const;
    bool fq_is_zero(const FqElem& a) const;

    std::string describe() const;

private:
    const Tower* T_;
    Int p_;
    std::size_t k_ = 0;
    std::vector<Int> h_;                    // monic modulus, coefficients in [0,p)
    std::vector<FqElem> monomial_images_;   // image of each basis monomial
};

// p-adic valuations on the radical-free part of a tower, for odd p coprime to
// M and D; normalized with v(p) = 1 (the relevant completion is unramified).
class PadicContext {
public:
    PadicContext(const Tower& T, const Int& p);

    const Int& p() const { return p_; }
    std::size_t degree() const { return k_; }

    // x must be supported on the radical-free subtower.  Returns infinity for
    // x = 0; throws PrecisionExceededError if the working precision cap is hit.
    ExtRational valuation(const TowerElem& x);

private:
    void lift_to(long target_prec);

    const Tower* T_;
    Int p_;
    std::size_t k_ = 0;
    std::vector<Int> h_;
    long prec_ = 0;                            // current exponent e in p^e
    Int pe_;                                   // p^prec_
    std::vector<std::vector<Int>> base_images_; // images of zeta^i s^eps in W
    std::vector<Int> zeta_res_, sqrt_res_;      // residue-level seeds
};

} // namespace cmtheta
