#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cmtheta {

using Int = boost::multiprecision::mpz_int;
using Rat = boost::multiprecision::mpq_rational;

// ---------------------------------------------------------------------------
// Elementary number theory
// ---------------------------------------------------------------------------

// Kronecker symbol (a|n), fully general.
int kronecker(const Int& a, const Int& n);

// Deterministic-for-our-sizes primality (Miller-Rabin, 40 rounds).
bool is_probable_prime(const Int& n);

// Factor n > 0 into (prime, exponent) pairs, primes ascending.
// Trial division plus Pollard rho with fixed deterministic parameters.
std::vector<std::pair<Int, int>> factor(const Int& n);

// All positive divisors of n, ascending.
std::vector<Int> divisors(const Int& n);

// Euler phi.
Int euler_phi(const Int& n);

// Moebius mu.
int moebius(const Int& n);

// a^e mod m (e >= 0, m > 1).
Int pow_mod(Int a, Int e, const Int& m);

// Modular inverse; throws BadInputError if gcd(a, m) != 1.
Int inv_mod(const Int& a, const Int& m);

// Smallest nonnegative residue.
Int mod_floor(const Int& a, const Int& m);

// Square root of a modulo odd prime p (Tonelli-Shanks, deterministic
// non-residue search).  Returns nullopt if a is a non-residue.
std::optional<Int> sqrt_mod_prime(const Int& a, const Int& p);

// Exact integer square root if n is a perfect square.
std::optional<Int> exact_sqrt(const Int& n);

// p-adic valuation of a nonzero rational.
long padic_valuation(const Rat& x, const Int& p);

// ---------------------------------------------------------------------------
// Rational numbers extended by +infinity (used for valuation bounds)
// ---------------------------------------------------------------------------

struct ExtRational {
    bool infinite = false;
    Rat value = 0; // meaningful only when !infinite

    static ExtRational infinity() { return ExtRational{true, 0}; }
    static ExtRational of(const Rat& v) { return ExtRational{false, v}; }

    ExtRational operator+(const ExtRational& o) const {
        if (infinite || o.infinite) return infinity();
        return of(value + o.value);
    }
    bool operator==(const ExtRational& o) const {
        if (infinite != o.infinite) return false;
        return infinite || value == o.value;
    }
    bool operator<(const ExtRational& o) const {
        if (infinite) return false;
        if (o.infinite) return true;
        return value < o.value;
    }
    std::string str() const;

    // Parse "inf" or a rational "a/b" / "a".
    static ExtRational parse(const std::string& s);
};

// ---------------------------------------------------------------------------
// Integer matrices and Smith normal form
// ---------------------------------------------------------------------------

struct IntMat {
    std::size_t rows = 0, cols = 0;
    std::vector<Int> a; // row-major

    IntMat() = default;
    IntMat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, Int(0)) {}
    Int& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    const Int& at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    static IntMat identity(std::size_t n);
    IntMat operator*(const IntMat& o) const;
    std::vector<Int> apply(const std::vector<Int>& v) const; // matrix * column
    bool operator==(const IntMat& o) const { return rows == o.rows && cols == o.cols && a == o.a; }
};

// Smith normal form: U * M * V = D with U, V unimodular and D diagonal with
// d1 | d2 | ... (nonnegative).  Uinv is the inverse of U.
struct SmithResult {
    IntMat D, U, Uinv, V;
};
SmithResult smith_normal_form(const IntMat& M);

// ---------------------------------------------------------------------------
// Finite abelian groups presented by generators/relations
// ---------------------------------------------------------------------------

struct PPartResult; // defined below (contains an AbelianGroup)

// G = Z^n / (columns of R); SNF yields invariant factors d1 | d2 | ... > 1 and
// a discrete-log map on exponent vectors.
class AbelianGroup {
public:
    AbelianGroup() = default; // trivial group

    // Build from a relation matrix with n generators (rows) and arbitrary
    // relation columns.
    static AbelianGroup from_relations(std::size_t n_gens, const IntMat& relations);

    const std::vector<Int>& orders() const { return orders_; }
    Int order() const;
    Int exponent() const; // lcm of invariant factors (largest, by divisibility)
    std::size_t rank() const { return orders_.size(); }

    // Map an exponent vector on the original n generators to canonical
    // coordinates (one per invariant factor, reduced mod d_i).
    std::vector<Int> dlog(const std::vector<Int>& exps) const;

    // Expression of each canonical generator as an exponent vector on the
    // original generators (column of Uinv).
    std::vector<Int> canonical_generator(std::size_t i) const;

    // The p-part: orders p^{v_p(d_i)} (ones dropped); second member maps
    // canonical coords of this group to canonical coords of the p-part.
    PPartResult p_part(const Int& p) const;

    // All characters, as exponent tuples t (0 <= t_i < d_i), enumerated in
    // lexicographic order.  A character sends canonical coords x to
    // zeta_e^{ sum_i t_i x_i e/d_i } where e = exponent().
    std::vector<std::vector<Int>> characters() const;

    // Character pairing: exponent k in Z/e with value zeta_e^k.
    Int character_exponent(const std::vector<Int>& chi, const std::vector<Int>& coords) const;

private:
    std::size_t n_gens_ = 0;
    std::vector<Int> orders_;   // d_i > 1 ascending by divisibility
    IntMat U_;                  // maps generator-exponent vectors to SNF coords
    IntMat Uinv_;
    std::vector<std::size_t> kept_; // indices of diagonal entries > 1
};

struct PPartResult {
    AbelianGroup group;
    std::vector<std::size_t> source_index; // which d_i each p-part factor came from
};

// ---------------------------------------------------------------------------
// Generic finite-group closure with polycyclic presentation
// ---------------------------------------------------------------------------

// Builds the multiplicative closure of a generating set in a (commutative)
// monoid of elements of type Key (a canonical, hashable/orderable form), and a
// polycyclic presentation: for each generator g_i, the least o_i >= 1 with
// g_i^{o_i} in <g_1..g_{i-1}>, and such an expression.  Everything is
// deterministic: generators are processed in the given order, BFS is FIFO.
struct ClosureResult {
    // element key -> exponent vector (one entry per generator)
    std::map<std::string, std::vector<Int>> element_words;
    // relation columns: o_i * g_i - sum_{j<i} e_ij g_j = 0
    IntMat relations;
    Int size = 1;
};

// mul: (key, key) -> key;  id: identity key.
ClosureResult close_group(const std::string& id_key,
                          const std::vector<std::string>& generator_keys,
                          const std::function<std::string(const std::string&, const std::string&)>& mul);

// ---------------------------------------------------------------------------
// Misc
// ---------------------------------------------------------------------------

std::string rat_to_string(const Rat& q);
Rat rat_from_string(const std::string& s);

} // namespace cmtheta
