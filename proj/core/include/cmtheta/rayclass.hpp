#pragma once

#include "cmtheta/kfield.hpp"
#include "cmtheta/util.hpp"

#include <map>
#include <string>
#include <vector>

namespace cmtheta {

// Multiplicative group of residues (O/n)^x, with canonical generators
// (invariant-factor decomposition) and discrete logarithms.
class UnitResidueGroup {
public:
    explicit UnitResidueGroup(const Ideal& n);

    const Ideal& modulus() const { return n_; }
    const AbelianGroup& structure() const { return G_; }
    Int order() const { return G_.order(); }

    bool is_coprime(const QuadInt& x) const;

    // Canonical coordinates of x mod n; throws BadInputError if x is not
    // coprime to n.
    std::vector<Int> dlog(const QuadInt& x) const;

    // Residue representing canonical generator i (0 <= i < structure().rank()).
    const QuadInt& canonical_generator(std::size_t i) const { return gens_[i]; }

private:
    Ideal n_;
    std::vector<Ideal> prime_divisors_;
    AbelianGroup G_;
    std::map<std::string, std::vector<Int>> words_; // residue key -> closure word
    std::vector<QuadInt> gens_;
};

// Ray class group H_n: fractional ideals coprime to n modulo principal ideals
// admitting a generator congruent to 1 mod n.  Presented on the canonical
// residue generators (through their principal lifts) and on class group
// representatives coprime to n.
class RayClassGroup {
public:
    RayClassGroup(const Field& f, const Ideal& n);

    const Field& field() const { return *F_; }
    const Ideal& modulus() const { return n_; }
    const AbelianGroup& structure() const { return G_; }
    const UnitResidueGroup& residue_group() const { return R_; }
    const ClassGroup& class_group() const { return Cl_; }
    Int order() const { return G_.order(); }

    // Canonical coordinates of the class [I]; I must be coprime to n.
    std::vector<Int> log(const Ideal& I) const;

    // I * prod_j C_j^{k_j} = (alpha) with C_j the stored class representatives;
    // this pins every evaluation of a character at I down to residue data.
    struct Decomposition {
        QuadInt alpha;
        std::vector<Int> class_exponents; // k_j, 0 <= k_j < h_j
    };
    Decomposition decompose(const Ideal& I) const;

    const std::vector<Ideal>& class_representatives() const { return cl_gens_; }
    const std::vector<Int>& class_orders() const { return cl_orders_; }
    // Principal lifts of the canonical residue generators.
    const std::vector<Ideal>& residue_lifts() const { return lifts_; }

    // Smallest-norm integral ideal coprime to n whose class is canonical
    // generator i.
    Ideal canonical_generator_ideal(std::size_t i) const;

    // Matrix of the natural projection from a finer group (n | n'): maps the
    // finer group's canonical coordinates to this group's.
    IntMat transition_from(const RayClassGroup& finer) const;
    std::vector<Int> project(const RayClassGroup& finer, const std::vector<Int>& coords) const;

    // Largest quotient of p-power order, with the induced discrete log.
    struct PPart {
        const RayClassGroup* parent = nullptr;
        AbelianGroup group;
        std::vector<std::size_t> source_index; // parent coord feeding each slot
        Int order() const { return group.order(); }
        std::vector<Int> reduce(const std::vector<Int>& parent_coords) const;
        std::vector<Int> log(const Ideal& I) const;
    };
    PPart p_part(const Int& p) const;

private:
    const Field* F_;
    Ideal n_;
    UnitResidueGroup R_;
    ClassGroup Cl_;
    std::vector<Ideal> cl_gens_;
    std::vector<Int> cl_orders_;
    std::vector<Ideal> lifts_;
    AbelianGroup G_;
};

} // namespace cmtheta
