#pragma once

#include "cmtheta/kfield.hpp"
#include "cmtheta/rayclass.hpp"
#include "cmtheta/tower.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace cmtheta {

// Finite-order character on residues coprime to an integer modulus, with
// values in a shared value ring.
class DirichletCharacter {
public:
    DirichletCharacter() = default;
    DirichletCharacter(Int modulus, std::shared_ptr<const Tower> ring,
                       std::map<Int, TowerElem> values);

    const Int& modulus() const { return modulus_; }
    const std::shared_ptr<const Tower>& ring() const { return ring_; }

    bool is_coprime(const Int& n) const;
    TowerElem value(const Int& n) const; // throws CoprimalityError

    // Pointwise product; the factors must share a ring.  The modulus of the
    // product is lcm of the moduli unless an explicit one is supplied.
    DirichletCharacter times(const DirichletCharacter& o, const Int& modulus = 0) const;

private:
    Int modulus_ = 1;
    std::shared_ptr<const Tower> ring_;
    std::map<Int, TowerElem> values_; // keyed by residues in [0, modulus)
};

// The quadratic character attached to the field (values +-1 via the Kronecker
// symbol at the discriminant), with modulus |D|.
DirichletCharacter kronecker_character(const Field& F, std::shared_ptr<const Tower> ring);

// An algebraic Hecke character of the imaginary quadratic field: modulus f,
// infinity type (a, b), determined by a finite-order character eps on
// (O/f)^x plus a root choice per class-group generator.  On principal ideals
//   psi((alpha)) = alpha^{-a} conj(alpha)^{-b} eps(alpha).
// Values live in a tower Q(zeta_M)(sqrt D)(r_j), one radical stage per
// class-group generator of order >= 2.
class GrossenChar {
public:
    // All characters of the given modulus and type, deterministically ordered
    // (eps exponent tuples ascending, then root-choice tuples ascending).
    // Empty when the unit-compatibility constraint has no solution.
    static std::vector<GrossenChar> build(const Field& F, const Ideal& f, long a, long b);

    // |H_f| when unit compatibility is solvable, else 0 (= build(...).size(),
    // but without constructing the characters).
    static Int count(const Field& F, const Ideal& f, long a, long b);

    const Field& field() const { return *F_; }
    Ideal modulus() const;                     // conjugated view flips f
    std::pair<long, long> infinity_type() const;
    const std::shared_ptr<const Tower>& ring() const { return T_; }
    const RayClassGroup& ray_group() const { return *rc_; }
    std::shared_ptr<const RayClassGroup> ray_group_ptr() const { return rc_; }

    bool is_conjugated() const { return conj_; }
    const std::vector<Int>& eps_exponents() const { return eps_; }
    const std::vector<Int>& root_exponents() const { return roots_; }

    bool is_coprime(const Ideal& I) const;

    // psi(I); throws CoprimalityError if I shares a factor with the modulus.
    TowerElem evaluate(const Ideal& I) const;

    // eps(x mod f) for x coprime to f.
    TowerElem eps_value(const QuadInt& x) const;

    GrossenChar conjugate() const; // I -> psi(conj I), type (b, a)

    // For type (-t, 0), t >= 1: the rational character chi with
    // chi(n) = psi((n)) / n^t on integers coprime to N(f).
    DirichletCharacter induced_dirichlet() const;

    nlohmann::json to_json() const;
    static GrossenChar from_json(const nlohmann::json& j);

    // Stable identity on (field, modulus, type, eps, roots, conjugated).
    std::string key() const;

private:
    GrossenChar() = default;

    TowerElem evaluate_base(const Ideal& I) const; // un-conjugated modulus
    TowerElem principal_value(const QuadInt& alpha) const;
    TowerElem class_gen_power(std::size_t j, const Int& e) const;

    const Field* F_ = nullptr;
    std::shared_ptr<const RayClassGroup> rc_;
    std::shared_ptr<const Tower> T_;
    long a_ = 0, b_ = 0;
    std::vector<Int> eps_;   // exponent tuple over residue canonical generators
    std::vector<Int> roots_; // k_j twist per class generator (0 <= k_j < h_j)
    bool conj_ = false;
    std::shared_ptr<std::map<std::string, TowerElem>> memo_;
};

} // namespace cmtheta
