#include "cmtheta/rayclass.hpp"

#include "cmtheta/errors.hpp"

#include <sstream>

namespace cmtheta {

namespace {

std::string residue_key(const QuadInt& x) {
    std::ostringstream os;
    os << x.x << "," << x.y;
    return os.str();
}

} // namespace

// ---------------------------------------------------------------------------
// UnitResidueGroup
// ---------------------------------------------------------------------------

UnitResidueGroup::UnitResidueGroup(const Ideal& n) : n_(n) {
    for (const auto& [P, e] : factor_ideal(n_)) prime_divisors_.push_back(P);

    const Field& f = n_.field();
    std::map<std::string, QuadInt> by_key;
    QuadInt one = n_.reduce(QuadInt(f, 1, 0));
    std::string id = residue_key(one);
    by_key.emplace(id, one);

    std::vector<std::string> gen_keys;
    std::vector<QuadInt> gen_vals;
    for (const QuadInt& r : n_.residues()) {
        if (!is_coprime(r)) continue;
        std::string k = residue_key(r);
        by_key.emplace(k, r);
        gen_keys.push_back(k);
        gen_vals.push_back(r);
    }

    auto mul = [&](const std::string& k1, const std::string& k2) {
        QuadInt p = n_.reduce(by_key.at(k1) * by_key.at(k2));
        std::string k = residue_key(p);
        by_key.emplace(k, p);
        return k;
    };

    ClosureResult cl = close_group(id, gen_keys, mul);
    words_ = std::move(cl.element_words);
    G_ = AbelianGroup::from_relations(gen_keys.size(), cl.relations);

    Int e = G_.exponent();
    for (std::size_t i = 0; i < G_.rank(); ++i) {
        std::vector<Int> w = G_.canonical_generator(i);
        QuadInt acc = one;
        for (std::size_t j = 0; j < gen_vals.size(); ++j) {
            Int k = mod_floor(w[j], e);
            QuadInt base = gen_vals[j];
            while (k > 0) {
                if ((k & 1) != 0) acc = n_.reduce(acc * base);
                base = n_.reduce(base * base);
                k >>= 1;
            }
        }
        gens_.push_back(acc);
    }
}

bool UnitResidueGroup::is_coprime(const QuadInt& x) const {
    for (const Ideal& P : prime_divisors_)
        if (P.contains(x)) return false;
    return true;
}

std::vector<Int> UnitResidueGroup::dlog(const QuadInt& x) const {
    QuadInt r = n_.reduce(x);
    auto it = words_.find(residue_key(r));
    if (it == words_.end())
        throw BadInputError("residue dlog: element not coprime to the modulus");
    return G_.dlog(it->second);
}

// ---------------------------------------------------------------------------
// RayClassGroup
// ---------------------------------------------------------------------------

RayClassGroup::RayClassGroup(const Field& f, const Ideal& n)
    : F_(&f), n_(n), R_(n), Cl_(f) {
    cl_gens_ = Cl_.coprime_generators(n_);
    cl_orders_ = Cl_.structure().orders();

    std::size_t r = R_.structure().rank();
    std::size_t s = cl_gens_.size();
    for (std::size_t i = 0; i < r; ++i)
        lifts_.push_back(Ideal::principal(R_.canonical_generator(i)));

    // Relation columns on generators [q_1..q_r, c_1..c_s]:
    //   d_i q_i = 0                        (residue generator orders)
    //   dlog(u0) . q = 0                   (unit embeds trivially)
    //   h_j c_j - dlog(gamma_j) . q = 0    (c_j^{h_j} = (gamma_j))
    std::vector<std::vector<Int>> cols;
    for (std::size_t i = 0; i < r; ++i) {
        std::vector<Int> col(r + s, Int(0));
        col[i] = R_.structure().orders()[i];
        cols.push_back(std::move(col));
    }
    {
        UnitGroup U = unit_group(f);
        std::vector<Int> du = R_.dlog(U.generator);
        std::vector<Int> col(r + s, Int(0));
        for (std::size_t i = 0; i < r; ++i) col[i] = du[i];
        cols.push_back(std::move(col));
    }
    for (std::size_t j = 0; j < s; ++j) {
        Ideal pw = Ideal::unit_ideal(f);
        for (Int k = 0; k < cl_orders_[j]; ++k) pw = pw * cl_gens_[j];
        QuadInt gamma = principal_generator(pw);
        std::vector<Int> dg = R_.dlog(gamma);
        std::vector<Int> col(r + s, Int(0));
        for (std::size_t i = 0; i < r; ++i) col[i] = -dg[i];
        col[r + j] = cl_orders_[j];
        cols.push_back(std::move(col));
    }

    IntMat rel(r + s, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (std::size_t i = 0; i < r + s; ++i) rel.at(i, j) = cols[j][i];
    G_ = AbelianGroup::from_relations(r + s, rel);
}

RayClassGroup::Decomposition RayClassGroup::decompose(const Ideal& I) const {
    if (!I.is_coprime_to(n_))
        throw BadInputError("ray class decomposition: ideal not coprime to the modulus");
    std::vector<Int> v = Cl_.dlog(I);
    Decomposition d;
    Ideal A = I;
    for (std::size_t j = 0; j < cl_gens_.size(); ++j) {
        Int k = mod_floor(cl_orders_[j] - v[j], cl_orders_[j]);
        d.class_exponents.push_back(k);
        for (Int t = 0; t < k; ++t) A = A * cl_gens_[j];
    }
    d.alpha = principal_generator(A);
    return d;
}

std::vector<Int> RayClassGroup::log(const Ideal& I) const {
    Decomposition d = decompose(I);
    std::size_t r = R_.structure().rank();
    std::size_t s = cl_gens_.size();
    std::vector<Int> word(r + s, Int(0));
    std::vector<Int> e = R_.dlog(d.alpha);
    for (std::size_t i = 0; i < r; ++i) word[i] = e[i];
    for (std::size_t j = 0; j < s; ++j) word[r + j] = -d.class_exponents[j];
    return G_.dlog(word);
}

Ideal RayClassGroup::canonical_generator_ideal(std::size_t i) const {
    std::vector<Int> target(G_.rank(), Int(0));
    target[i] = 1;
    for (Int m = 1; m <= 1000000; ++m) {
        for (const Ideal& J : ideals_of_norm(*F_, m)) {
            if (!J.is_coprime_to(n_)) continue;
            if (log(J) == target) return J;
        }
    }
    throw BadInputError("no small ideal found for ray class generator");
}

IntMat RayClassGroup::transition_from(const RayClassGroup& finer) const {
    if (!n_.divides(finer.n_))
        throw BadInputError("ray class projection requires the coarser modulus to divide the finer");
    std::size_t rp = finer.R_.structure().rank();
    std::size_t sp = finer.cl_gens_.size();
    // Images (in this group) of the finer presentation generators.
    IntMat M0(G_.rank(), rp + sp);
    for (std::size_t j = 0; j < rp; ++j) {
        std::vector<Int> im = log(finer.lifts_[j]);
        for (std::size_t i = 0; i < G_.rank(); ++i) M0.at(i, j) = im[i];
    }
    for (std::size_t j = 0; j < sp; ++j) {
        std::vector<Int> im = log(finer.cl_gens_[j]);
        for (std::size_t i = 0; i < G_.rank(); ++i) M0.at(i, rp + j) = im[i];
    }
    // Express the finer canonical generators as words on its presentation.
    IntMat W(rp + sp, finer.G_.rank());
    for (std::size_t j = 0; j < finer.G_.rank(); ++j) {
        std::vector<Int> w = finer.G_.canonical_generator(j);
        for (std::size_t i = 0; i < rp + sp; ++i) W.at(i, j) = w[i];
    }
    IntMat M = M0 * W;
    for (std::size_t i = 0; i < G_.rank(); ++i)
        for (std::size_t j = 0; j < finer.G_.rank(); ++j)
            M.at(i, j) = mod_floor(M.at(i, j), G_.orders()[i]);
    return M;
}

std::vector<Int> RayClassGroup::project(const RayClassGroup& finer,
                                        const std::vector<Int>& coords) const {
    IntMat M = transition_from(finer);
    std::vector<Int> v = M.apply(coords);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = mod_floor(v[i], G_.orders()[i]);
    return v;
}

RayClassGroup::PPart RayClassGroup::p_part(const Int& p) const {
    PPartResult r = G_.p_part(p);
    PPart out;
    out.parent = this;
    out.group = std::move(r.group);
    out.source_index = std::move(r.source_index);
    return out;
}

std::vector<Int> RayClassGroup::PPart::reduce(const std::vector<Int>& parent_coords) const {
    // Z/d -> Z/p^v is reduction mod p^v (well-defined since p^v | d).
    std::vector<Int> out(source_index.size());
    for (std::size_t i = 0; i < source_index.size(); ++i)
        out[i] = mod_floor(parent_coords[source_index[i]], group.orders()[i]);
    return out;
}

std::vector<Int> RayClassGroup::PPart::log(const Ideal& I) const {
    return reduce(parent->log(I));
}

} // namespace cmtheta
