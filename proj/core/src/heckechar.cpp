#include "cmtheta/heckechar.hpp"

#include "cmtheta/errors.hpp"

#include <algorithm>
#include <sstream>

namespace cmtheta {

// ---------------------------------------------------------------------------
// DirichletCharacter
// ---------------------------------------------------------------------------

DirichletCharacter::DirichletCharacter(Int modulus, std::shared_ptr<const Tower> ring,
                                       std::map<Int, TowerElem> values)
    : modulus_(std::move(modulus)), ring_(std::move(ring)), values_(std::move(values)) {
    if (modulus_ < 1) throw BadInputError("character modulus must be positive");
}

bool DirichletCharacter::is_coprime(const Int& n) const {
    return gcd(mod_floor(n, modulus_), modulus_) == 1 || modulus_ == 1;
}

TowerElem DirichletCharacter::value(const Int& n) const {
    if (modulus_ == 1) return ring_->one();
    Int r = mod_floor(n, modulus_);
    auto it = values_.find(r);
    if (it == values_.end())
        throw CoprimalityError("character argument shares a factor with the modulus");
    return it->second;
}

DirichletCharacter DirichletCharacter::times(const DirichletCharacter& o,
                                             const Int& modulus) const {
    if (ring_.get() != o.ring_.get())
        throw BadInputError("character product requires a common value ring");
    Int m = modulus != 0 ? modulus : lcm(modulus_, o.modulus_);
    if (m % modulus_ != 0 || m % o.modulus_ != 0)
        throw BadInputError("product modulus must be divisible by both moduli");
    std::map<Int, TowerElem> vals;
    for (Int r = 0; r < m; ++r) {
        if (gcd(r, m) != 1 && m != 1) continue;
        vals.emplace(r, value(r) * o.value(r));
    }
    return DirichletCharacter(m, ring_, std::move(vals));
}

DirichletCharacter kronecker_character(const Field& F, std::shared_ptr<const Tower> ring) {
    Int m = -F.disc();
    std::map<Int, TowerElem> vals;
    for (Int r = 0; r < m; ++r) {
        int k = kronecker(F.disc(), r);
        if (k == 0) continue;
        vals.emplace(r, ring->from_rational(Rat(k)));
    }
    return DirichletCharacter(m, std::move(ring), std::move(vals));
}

// ---------------------------------------------------------------------------
// GrossenChar construction
// ---------------------------------------------------------------------------

namespace {

// zeta_M exponent of eps at a residue, given the character tuple.
Int eps_exponent_mod_M(const UnitResidueGroup& R, const std::vector<Int>& chi,
                       const QuadInt& x, long M) {
    const AbelianGroup& G = R.structure();
    Int E = G.exponent();
    Int k = G.character_exponent(chi, R.dlog(x));
    return mod_floor(k * (Int(M) / E), Int(M));
}

struct BuildData {
    std::shared_ptr<const RayClassGroup> rc;
    long M = 1;
    bool solvable = false;
    Int czeta = 0; // zeta_M exponent the eps-value at the fundamental unit must hit
};

BuildData prepare(const Field& F, const Ideal& f, long a, long b) {
    BuildData bd;
    bd.rc = std::make_shared<RayClassGroup>(F, f);
    const UnitResidueGroup& R = bd.rc->residue_group();

    Int M = R.structure().exponent();
    for (const Int& h : bd.rc->class_orders()) M = lcm(M, h);
    bd.M = static_cast<long>(M);

    // Unit compatibility: eps(u0) must equal u0^a * conj(u0)^b, a root of
    // unity; solvable iff that target is a power of zeta_M reachable by some
    // character (checked by locating it among all zeta_M powers).
    Tower T(bd.M, F.d());
    UnitGroup U = unit_group(F);
    TowerElem tau = T.embed_quadint(U.generator).pow(Int(a)) *
                    T.embed_quadint(U.generator.conj()).pow(Int(b));
    TowerElem acc = T.one();
    TowerElem z = T.zeta();
    for (long c = 0; c < bd.M; ++c) {
        if (acc == tau) {
            bd.czeta = c;
            // the value must also be attainable: its order must divide the
            // order of u0 in (O/f)^x, equivalently tau^m == 1
            std::vector<Int> w = R.dlog(U.generator);
            Int m = 1;
            const std::vector<Int>& d = R.structure().orders();
            for (std::size_t i = 0; i < d.size(); ++i)
                m = lcm(m, d[i] / gcd(d[i], w[i]));
            Int cm = mod_floor(Int(c) * m, Int(bd.M));
            bd.solvable = (cm == 0);
            return bd;
        }
        acc = acc * z;
    }
    bd.solvable = false;
    return bd;
}

} // namespace

std::vector<GrossenChar> GrossenChar::build(const Field& F, const Ideal& f,
                                            long a, long b) {
    if (f.norm() < 1) throw BadInputError("character modulus must be nonzero");
    BuildData bd = prepare(F, f, a, b);
    if (!bd.solvable) return {};
    const RayClassGroup& rc = *bd.rc;
    const UnitResidueGroup& R = rc.residue_group();
    const AbelianGroup& GR = R.structure();
    const long M = bd.M;
    Int E = GR.exponent();
    UnitGroup U = unit_group(F);
    std::vector<Int> w = R.dlog(U.generator);

    auto base = std::make_shared<Tower>(M, F.d());

    std::vector<GrossenChar> out;
    for (const std::vector<Int>& chi : GR.characters()) {
        Int ku = GR.character_exponent(chi, w);
        if (mod_floor(ku * (Int(M) / E), Int(M)) != bd.czeta) continue;

        // Build the value tower for this eps: one radical stage per class
        // generator, r_j^{h_j} = psi((gamma_j)).
        const std::vector<Ideal>& cg = rc.class_representatives();
        const std::vector<Int>& ho = rc.class_orders();
        std::vector<Tower::RadicalSpec> specs;
        std::size_t cur_dim = base->dim();
        for (std::size_t j = 0; j < cg.size(); ++j) {
            Ideal P = Ideal::unit_ideal(F);
            for (Int t = 0; t < ho[j]; ++t) P = P * cg[j];
            QuadInt gamma = principal_generator(P);
            Int ke = GR.character_exponent(chi, R.dlog(gamma));
            TowerElem beta = base->embed_quadint(gamma).pow(Int(-a)) *
                             base->embed_quadint(gamma.conj()).pow(Int(-b)) *
                             base->zeta_power(ke * (Int(M) / E));
            std::vector<Rat> alpha = beta.coords();
            alpha.resize(cur_dim, Rat(0));
            specs.push_back(Tower::RadicalSpec{static_cast<long>(ho[j]), std::move(alpha)});
            cur_dim *= static_cast<std::size_t>(ho[j]);
        }
        std::shared_ptr<const Tower> T =
            specs.empty() ? std::shared_ptr<const Tower>(base)
                          : std::make_shared<const Tower>(M, F.d(), specs);

        // All root choices, last index fastest (lexicographic tuples).
        std::vector<Int> roots(cg.size(), Int(0));
        while (true) {
            GrossenChar g;
            g.F_ = &F;
            g.rc_ = bd.rc;
            g.T_ = T;
            g.a_ = a;
            g.b_ = b;
            g.eps_ = chi;
            g.roots_ = roots;
            g.memo_ = std::make_shared<std::map<std::string, TowerElem>>();
            out.push_back(std::move(g));

            std::size_t j = cg.size();
            while (j > 0) {
                --j;
                roots[j] += 1;
                if (roots[j] < ho[j]) break;
                roots[j] = 0;
                if (j == 0) goto done_roots;
            }
            if (cg.empty()) break;
        }
    done_roots:;
    }
    return out;
}

Int GrossenChar::count(const Field& F, const Ideal& f, long a, long b) {
    if (f.norm() < 1) throw BadInputError("character modulus must be nonzero");
    BuildData bd = prepare(F, f, a, b);
    return bd.solvable ? bd.rc->order() : Int(0);
}

// ---------------------------------------------------------------------------
// Accessors and evaluation
// ---------------------------------------------------------------------------

Ideal GrossenChar::modulus() const {
    return conj_ ? rc_->modulus().conj() : rc_->modulus();
}

std::pair<long, long> GrossenChar::infinity_type() const {
    return conj_ ? std::make_pair(b_, a_) : std::make_pair(a_, b_);
}

bool GrossenChar::is_coprime(const Ideal& I) const {
    Ideal J = conj_ ? I.conj() : I;
    return J.is_coprime_to(rc_->modulus());
}

TowerElem GrossenChar::eps_value(const QuadInt& x) const {
    QuadInt y = conj_ ? x.conj() : x;
    const UnitResidueGroup& R = rc_->residue_group();
    if (!R.is_coprime(y))
        throw CoprimalityError("eps argument shares a factor with the modulus");
    Int e = eps_exponent_mod_M(R, eps_, y, T_->cyclotomic_order());
    return T_->zeta_power(e);
}

TowerElem GrossenChar::principal_value(const QuadInt& alpha) const {
    return T_->embed_quadint(alpha).pow(Int(-a_)) *
           T_->embed_quadint(alpha.conj()).pow(Int(-b_)) *
           T_->zeta_power(eps_exponent_mod_M(rc_->residue_group(), eps_, alpha,
                                             T_->cyclotomic_order()));
}

TowerElem GrossenChar::class_gen_power(std::size_t j, const Int& e) const {
    const Int& h = rc_->class_orders()[j];
    Int m = mod_floor(e, h);
    Int q = (e - m) / h;
    // psi(C_j) = r_j * zeta_M^{k_j M / h_j};  psi(C_j)^{h_j} = beta_j
    long M = T_->cyclotomic_order();
    TowerElem val = T_->radical(j).pow(m) *
                    T_->zeta_power(roots_[j] * m * (Int(M) / h));
    if (q != 0) val = val * T_->radical_base(j).pow(q);
    return val;
}

TowerElem GrossenChar::evaluate_base(const Ideal& I) const {
    if (!I.is_coprime_to(rc_->modulus()))
        throw CoprimalityError("ideal shares a factor with the character modulus");
    std::string k = I.hnf_str();
    auto it = memo_->find(k);
    if (it != memo_->end()) return it->second;
    RayClassGroup::Decomposition dec = rc_->decompose(I);
    TowerElem val = principal_value(dec.alpha);
    for (std::size_t j = 0; j < dec.class_exponents.size(); ++j)
        if (dec.class_exponents[j] != 0)
            val = val * class_gen_power(j, -dec.class_exponents[j]);
    memo_->emplace(std::move(k), val);
    return val;
}

TowerElem GrossenChar::evaluate(const Ideal& I) const {
    return evaluate_base(conj_ ? I.conj() : I);
}

GrossenChar GrossenChar::conjugate() const {
    GrossenChar g = *this;
    g.conj_ = !conj_;
    return g;
}

DirichletCharacter GrossenChar::induced_dirichlet() const {
    auto [ta, tb] = infinity_type();
    if (tb != 0 || ta >= 0)
        throw BadInputError("induced rational character requires infinity type (-t, 0), t >= 1");
    Int N = rc_->modulus().norm();
    std::map<Int, TowerElem> vals;
    for (Int r = 0; r < N; ++r) {
        if (gcd(r, N) != 1) continue;
        vals.emplace(r, eps_value(QuadInt(*F_, r, Int(0))));
    }
    if (N == 1) vals.emplace(Int(0), T_->one());
    return DirichletCharacter(N, T_, std::move(vals));
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

nlohmann::json GrossenChar::to_json() const {
    const Ideal& f = rc_->modulus();
    nlohmann::json j;
    j["field_d"] = F_->d();
    j["modulus_hnf"] = {f.a().convert_to<long long>(), f.b().convert_to<long long>(),
                        f.c().convert_to<long long>()};
    j["infinity_type"] = {a_, b_};
    std::vector<long long> eps, roots;
    for (const Int& e : eps_) eps.push_back(e.convert_to<long long>());
    for (const Int& r : roots_) roots.push_back(r.convert_to<long long>());
    j["eps_exponents"] = eps;
    j["class_root_exponents"] = roots;
    j["conjugated"] = conj_;
    return j;
}

GrossenChar GrossenChar::from_json(const nlohmann::json& j) {
    const Field& F = field_for(j.at("field_d").get<long>());
    auto hnf = j.at("modulus_hnf");
    Ideal f = Ideal::from_hnf(F, Int(hnf.at(0).get<long long>()),
                              Int(hnf.at(1).get<long long>()),
                              Int(hnf.at(2).get<long long>()));
    long a = j.at("infinity_type").at(0).get<long>();
    long b = j.at("infinity_type").at(1).get<long>();

    std::vector<GrossenChar> all = build(F, f, a, b);
    std::vector<Int> eps, roots;
    for (const auto& e : j.at("eps_exponents")) eps.push_back(Int(e.get<long long>()));
    for (const auto& r : j.at("class_root_exponents")) roots.push_back(Int(r.get<long long>()));
    for (GrossenChar& g : all) {
        if (g.eps_ == eps && g.roots_ == roots) {
            if (j.value("conjugated", false)) g.conj_ = true;
            return g;
        }
    }
    throw BadInputError("character data does not match any character of the "
                        "given modulus and type");
}

std::string GrossenChar::key() const {
    std::ostringstream os;
    os << "d=" << F_->d() << ";f=" << rc_->modulus().hnf_str() << ";type=(" << a_
       << "," << b_ << ");eps=";
    for (const Int& e : eps_) os << e << ",";
    os << ";roots=";
    for (const Int& r : roots_) os << r << ",";
    if (conj_) os << ";conj";
    return os.str();
}

} // namespace cmtheta
