#include "cmtheta/kfield.hpp"
#include "cmtheta/errors.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <sstream>

namespace cmtheta {

// ---------------------------------------------------------------------------
// Field
// ---------------------------------------------------------------------------

Field::Field(long d) : d_(d) {
    if (d >= 0) throw BadInputError("field requires d < 0");
    // squarefree check
    Int dd = -Int(d);
    for (const auto& [p, e] : factor(dd))
        if (e > 1) throw BadInputError("field requires squarefree d");
    D_ = (mod_floor(Int(d), 4) == 1) ? Int(d) : Int(4) * d;
    Nw_ = (D_ * D_ - D_) / 4;
}

int Field::splitting(const Int& l) const {
    return kronecker(D_, l);
}

const Field& field_for(long d) {
    static std::map<long, std::unique_ptr<Field>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(d);
    if (it == cache.end())
        it = cache.emplace(d, std::make_unique<Field>(d)).first;
    return *it->second;
}

// ---------------------------------------------------------------------------
// QuadInt
// ---------------------------------------------------------------------------

QuadInt QuadInt::operator+(const QuadInt& o) const { return {*F, x + o.x, y + o.y}; }
QuadInt QuadInt::operator-(const QuadInt& o) const { return {*F, x - o.x, y - o.y}; }
QuadInt QuadInt::operator-() const { return {*F, -x, -y}; }

QuadInt QuadInt::operator*(const QuadInt& o) const {
    // w^2 = D w - N(w)
    const Int& D = F->disc();
    const Int& Nw = F->omega_norm();
    return {*F, x * o.x - y * o.y * Nw, x * o.y + o.x * y + y * o.y * D};
}

QuadInt QuadInt::conj() const { return {*F, x + y * F->disc(), -y}; }

Int QuadInt::norm() const {
    return x * x + F->disc() * x * y + F->omega_norm() * y * y;
}

Int QuadInt::trace() const { return 2 * x + F->disc() * y; }

std::string QuadInt::str() const {
    std::ostringstream os;
    os << x;
    if (y != 0) os << (y > 0 ? "+" : "") << y << "*w";
    return os.str();
}

// ---------------------------------------------------------------------------
// Ideal
// ---------------------------------------------------------------------------

Ideal Ideal::unit_ideal(const Field& f) {
    Ideal I;
    I.F_ = &f;
    return I;
}

Ideal Ideal::from_hnf(const Field& f, Int a, Int b, Int c) {
    if (a <= 0 || c <= 0) throw BadInputError("HNF requires a, c > 0");
    if (a % c != 0 || b % c != 0) throw BadInputError("HNF requires c | a and c | b");
    b = mod_floor(b, a);
    QuadInt g(f, b, c);
    if (g.norm() % (a * c) != 0)
        throw BadInputError("HNF triple is not a lattice closed under multiplication by w");
    Ideal I;
    I.F_ = &f;
    I.a_ = std::move(a);
    I.b_ = std::move(b);
    I.c_ = std::move(c);
    return I;
}

// Row HNF of a list of (x, y) lattice vectors spanning a finite-index
// sublattice of Z^2 (coordinates in the basis 1, w).
static void hnf_rows(std::vector<std::pair<Int, Int>>& rows, Int& a, Int& b, Int& c) {
    // Reduce to two rows:  (a, 0) and (b, c)  with c | a, c | b, 0 <= b < a.
    // First find c = gcd of all y-coordinates via extended reduction.
    c = 0;
    Int bx = 0; // x-coordinate accompanying the y-gcd row
    for (auto& [x, y] : rows) {
        // Combine (bx, c) and (x, y) to make the second coordinate gcd(c, y).
        while (y != 0) {
            if (c == 0) { std::swap(bx, x); std::swap(c, y); continue; }
            Int q = y / c;
            x -= q * bx;
            y -= q * c;
            if (y != 0) { std::swap(bx, x); std::swap(c, y); }
        }
    }
    if (c < 0) { c = -c; bx = -bx; }
    // Remaining rows all have y = 0; a = gcd of x-coordinates.
    a = 0;
    for (auto& [x, y] : rows) a = gcd(a, x);
    a = abs(a);
    if (a == 0 || c == 0) throw BadInputError("generators do not span a finite-index lattice");
    b = mod_floor(bx, a);
}

Ideal Ideal::from_generators(const Field& f, const std::vector<QuadInt>& gens) {
    // Each generator g contributes rows g = (x, y) and g*w = (-y Nw, x + y D).
    std::vector<std::pair<Int, Int>> rows;
    for (const QuadInt& g : gens) {
        rows.emplace_back(g.x, g.y);
        QuadInt gw = g * QuadInt(f, 0, 1);
        rows.emplace_back(gw.x, gw.y);
    }
    Int a, b, c;
    hnf_rows(rows, a, b, c);
    return from_hnf(f, a, b, c);
}

Ideal Ideal::principal(const QuadInt& g) {
    if (g.is_zero()) throw BadInputError("zero ideal");
    return from_generators(*g.F, {g});
}

Ideal Ideal::operator*(const Ideal& o) const {
    // Products of the Z-basis elements generate the product lattice.
    const Field& f = *F_;
    QuadInt g1(f, a_, 0), g2(f, b_, c_), h1(f, o.a_, 0), h2(f, o.b_, o.c_);
    return from_generators(f, {g1 * h1, g1 * h2, g2 * h1, g2 * h2});
}

bool Ideal::operator<(const Ideal& o) const {
    if (a_ != o.a_) return a_ < o.a_;
    if (c_ != o.c_) return c_ < o.c_;
    return b_ < o.b_;
}

Ideal Ideal::conj() const {
    // Conjugate lattice: spanned by (a, 0) and conj(b + c w) = (b + cD, -c).
    const Field& f = *F_;
    QuadInt g2(f, b_, c_);
    return from_generators(f, {QuadInt(f, a_, 0), g2.conj()});
}

Ideal Ideal::divide_exact(const Ideal& other) const {
    // this / other = this * conj(other) / N(other), entrywise on the HNF.
    Ideal t = *this * other.conj();
    Int n = other.norm();
    if (t.a_ % n != 0 || t.b_ % n != 0 || t.c_ % n != 0)
        throw BadInputError("divide_exact: not divisible");
    return from_hnf(*F_, t.a_ / n, t.b_ / n, t.c_ / n);
}

bool Ideal::contains(const QuadInt& g) const {
    // g = s*(a,0) + t*(b,c): t = y/c must be integral, then x - t b divisible by a.
    if (g.y % c_ != 0) return false;
    Int t = g.y / c_;
    return (g.x - t * b_) % a_ == 0;
}

bool Ideal::divides(const Ideal& other) const {
    return contains(QuadInt(*F_, other.a_, 0)) && contains(QuadInt(*F_, other.b_, other.c_));
}

bool Ideal::is_coprime_to(const Ideal& other) const {
    const Field& f = *F_;
    std::vector<QuadInt> gens{QuadInt(f, a_, 0), QuadInt(f, b_, c_),
                              QuadInt(f, other.a_, 0), QuadInt(f, other.b_, other.c_)};
    return Ideal::from_generators(f, gens).is_unit_ideal();
}

QuadInt Ideal::reduce(const QuadInt& g) const {
    Int y = mod_floor(g.y, c_);
    Int t = (g.y - y) / c_;
    Int x = mod_floor(g.x - t * b_, a_);
    return {*F_, x, y};
}

std::vector<QuadInt> Ideal::residues() const {
    std::vector<QuadInt> out;
    out.reserve(static_cast<std::size_t>(norm()));
    for (Int x = 0; x < a_; ++x)
        for (Int y = 0; y < c_; ++y) out.emplace_back(*F_, x, y);
    return out;
}

std::string Ideal::hnf_str() const {
    std::ostringstream os;
    os << a_ << "," << b_ << "," << c_;
    return os.str();
}

// ---------------------------------------------------------------------------
// Primes, ideal enumeration, factorization
// ---------------------------------------------------------------------------

std::vector<PrimeAbove> primes_above(const Field& f, const Int& l) {
    if (!is_probable_prime(l)) throw BadInputError("primes_above: not a prime");
    int s = f.splitting(l);
    std::vector<PrimeAbove> out;
    if (s == -1) {
        out.push_back({Ideal::from_hnf(f, l, 0, l), 2, 1});
        return out;
    }
    // Roots of x^2 - D x + N(w) = 0 mod l; then P = (l, w - r) has HNF
    // (l, (-r) mod l, 1).
    std::vector<Int> roots;
    if (l == 2) {
        for (Int r = 0; r < 2; ++r)
            if (mod_floor(r * r - f.disc() * r + f.omega_norm(), l) == 0) roots.push_back(r);
    } else {
        // discriminant of the quadratic is D
        auto sq = sqrt_mod_prime(f.disc(), l);
        if (!sq) throw BadInputError("primes_above: internal splitting disagreement");
        Int inv2 = inv_mod(2, l);
        roots.push_back(mod_floor((f.disc() + *sq) * inv2, l));
        roots.push_back(mod_floor((f.disc() - *sq) * inv2, l));
        std::sort(roots.begin(), roots.end());
        roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    }
    for (const Int& r : roots)
        out.push_back({Ideal::from_hnf(f, l, mod_floor(-r, l), 1), 1, s == 0 ? 2 : 1});
    std::sort(out.begin(), out.end(),
              [](const PrimeAbove& x, const PrimeAbove& y) { return x.ideal < y.ideal; });
    if (s == 0 && out.size() != 1) {
        // ramified: the two roots coincide mod l
        out.resize(1);
    }
    return out;
}

std::vector<Ideal> ideals_of_norm(const Field& f, const Int& n) {
    if (n <= 0) throw BadInputError("ideals_of_norm: n must be positive");
    std::vector<Ideal> out;
    for (const Int& c : divisors(n)) {
        if ((n / c) % c != 0) continue; // need c | a where a = n/c
        Int a = n / c;
        for (Int b0 = 0; b0 * c < a; ++b0) {
            Int b = b0 * c;
            if (QuadInt(f, b, c).norm() % (a * c) == 0)
                out.push_back(Ideal::from_hnf(f, a, b, c));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::pair<Ideal, int>> factor_ideal(const Ideal& I) {
    std::vector<std::pair<Ideal, int>> out;
    Ideal rest = I;
    for (const auto& [l, e_norm] : factor(I.norm())) {
        for (const PrimeAbove& P : primes_above(I.field(), l)) {
            int e = 0;
            while (P.ideal.divides(rest)) {
                rest = rest.divide_exact(P.ideal);
                ++e;
            }
            if (e > 0) out.emplace_back(P.ideal, e);
        }
    }
    if (!rest.is_unit_ideal()) throw BadInputError("factor_ideal: incomplete factorization");
    return out;
}

// ---------------------------------------------------------------------------
// Units
// ---------------------------------------------------------------------------

std::vector<QuadInt> UnitGroup::all() const {
    std::vector<QuadInt> us;
    QuadInt u(*generator.F, 1, 0);
    for (long k = 0; k < order; ++k) {
        us.push_back(u);
        u = u * generator;
    }
    return us;
}

UnitGroup unit_group(const Field& f) {
    if (f.d() == -1) return {QuadInt(f, 2, 1), 4};  // i = w + 2 when D = -4
    if (f.d() == -3) return {QuadInt(f, 2, 1), 6};  // zeta_6 = w + 2 when D = -3
    return {QuadInt(f, -1, 0), 2};
}

// ---------------------------------------------------------------------------
// Quadratic forms
// ---------------------------------------------------------------------------

bool QuadForm::operator<(const QuadForm& o) const {
    if (A != o.A) return A < o.A;
    if (B != o.B) return B < o.B;
    return C < o.C;
}

QuadForm reduce_form(QuadForm f) {
    for (;;) {
        // Normalize: -A < B <= A.
        if (!(-f.A < f.B && f.B <= f.A)) {
            Int r = f.A - mod_floor(f.A - f.B, 2 * f.A); // representative in (-A, A]
            Int k = (f.B - r) / (2 * f.A);
            f.C = f.C - k * f.B + k * k * f.A;
            f.B = r;
            continue;
        }
        if (f.A > f.C) {
            f = {f.C, -f.B, f.A};
            continue;
        }
        if (f.A == f.C && f.B < 0) {
            f.B = -f.B;
            continue;
        }
        if (f.B == -f.A) { // not reached given normalization, kept for safety
            f.B = f.A;
            continue;
        }
        return f;
    }
}

std::vector<QuadForm> reduced_forms(const Int& D) {
    std::vector<QuadForm> out;
    // |B| <= A <= sqrt(|D|/3)
    Int bound = sqrt(Int(abs(D) / 3)) + 1;
    for (Int A = 1; A <= bound; ++A) {
        for (Int B = -A + 1; B <= A; ++B) {
            Int num = B * B - D;
            if (num % (4 * A) != 0) continue;
            Int C = num / (4 * A);
            if (C < A) continue;
            if (B < 0 && (A == C)) continue; // require B >= 0 when A = C
            // B >= 0 when |B| = A is enforced by B range (-A excluded).
            out.push_back({A, B, C});
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

QuadForm ideal_to_form(const Ideal& I) {
    // Strip the content c; for the primitive part (a', b', 1) take
    // A = a', B = -(2 b' + D), C = N(b' + w)/a', then reduce.  The sign on B
    // makes this map the two-sided inverse of form_to_ideal (the opposite
    // sign gives the conjugate ideal).
    const Field& f = I.field();
    Int a = I.a() / I.c(), b = I.b() / I.c();
    QuadInt g(f, b, 1);
    QuadForm q{a, -(2 * b + f.disc()), g.norm() / a};
    return reduce_form(q);
}

Ideal form_to_ideal(const Field& f, const QuadForm& q) {
    // Ideal (A, (-B + sqrt(D))/2) = A Z + (b + w) Z with b = (-B - D)/2 mod A.
    Int b = mod_floor((-q.B - f.disc()) / 2, q.A);
    return Ideal::from_hnf(f, q.A, b, 1);
}

// ---------------------------------------------------------------------------
// Class group
// ---------------------------------------------------------------------------

static std::string form_key(const QuadForm& q) {
    std::ostringstream os;
    os << q.A << "," << q.B << "," << q.C;
    return os.str();
}

// Canonical representative of the class of I: the ideal of the reduced form.
static Ideal canonical_class_rep(const Ideal& I) {
    return form_to_ideal(I.field(), ideal_to_form(I));
}

ClassGroup::ClassGroup(const Field& f) : F_(&f) {
    // Generators: classes of prime ideals of norm <= Minkowski bound.
    // Elements are represented by reduced forms (canonical per class).
    Int bound = sqrt(Int(abs(f.disc()))) / 2 + 2; // comfortably above (2/pi)sqrt|D|
    std::map<std::string, QuadForm> by_key;
    std::vector<std::string> gen_keys;
    Int pB = mod_floor(f.disc(), 2);
    QuadForm unit = reduce_form({Int(1), pB, (pB * pB - f.disc()) / 4});
    by_key[form_key(unit)] = unit;

    for (Int l = 2; l <= bound; ++l) {
        if (!is_probable_prime(l)) continue;
        if (f.splitting(l) == -1) continue;
        for (const PrimeAbove& P : primes_above(f, l)) {
            QuadForm q = ideal_to_form(P.ideal);
            std::string k = form_key(q);
            by_key[k] = q;
            gen_keys.push_back(k);
            closure_gens_.push_back(P.ideal);
        }
    }

    auto mul = [&](const std::string& k1, const std::string& k2) {
        const QuadForm &q1 = by_key.at(k1), &q2 = by_key.at(k2);
        Ideal prod = form_to_ideal(*F_, q1) * form_to_ideal(*F_, q2);
        QuadForm q = ideal_to_form(prod);
        std::string k = form_key(q);
        by_key.emplace(k, q);
        return k;
    };

    ClosureResult cl = close_group(form_key(unit), gen_keys, mul);
    words_ = std::move(cl.element_words);
    G_ = AbelianGroup::from_relations(gen_keys.size(), cl.relations);

    // Ideal representatives of the canonical generators.
    for (std::size_t i = 0; i < G_.rank(); ++i) {
        std::vector<Int> w = G_.canonical_generator(i);
        Ideal rep = Ideal::unit_ideal(f);
        for (std::size_t j = 0; j < closure_gens_.size(); ++j) {
            Int e = mod_floor(w[j], G_.order()); // exponents only matter mod class order
            for (Int k = 0; k < e; ++k) rep = canonical_class_rep(rep * closure_gens_[j]);
        }
        gens_.push_back(rep);
    }
}

std::vector<Int> ClassGroup::dlog(const Ideal& I) const {
    QuadForm q = ideal_to_form(I);
    auto it = words_.find(form_key(q));
    if (it == words_.end()) throw BadInputError("class group dlog: unknown class");
    return G_.dlog(it->second);
}

std::vector<Ideal> ClassGroup::coprime_generators(const Ideal& modulus) const {
    std::vector<Ideal> out;
    for (std::size_t i = 0; i < G_.rank(); ++i) {
        std::vector<Int> target;
        {
            std::vector<Int> e(G_.rank(), Int(0));
            e[i] = 1;
            target = e;
        }
        bool found = false;
        for (Int n = 1; !found && n <= 100000; ++n) {
            for (const Ideal& J : ideals_of_norm(*F_, n)) {
                if (!J.is_coprime_to(modulus)) continue;
                if (dlog(J) == target) {
                    out.push_back(J);
                    found = true;
                    break;
                }
            }
        }
        if (!found) throw BadInputError("no coprime class representative found");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Principal generators
// ---------------------------------------------------------------------------

QuadInt principal_generator(const Ideal& I) {
    const Field& f = I.field();
    Int N = I.norm();
    const Int D = f.disc();
    // N(x + y w) = (x + D y / 2)^2 + |D| y^2 / 4  =>  y^2 <= 4N/|D|.
    Int ybound = sqrt(Int(4 * N / abs(D))) + 1;
    std::vector<QuadInt> candidates;
    for (Int y = -ybound; y <= ybound; ++y) {
        // x^2 + D x y + (Nw y^2 - N) = 0; discriminant = D y^2 + 4N.
        Int disc = D * y * y + 4 * N;
        if (disc < 0) continue;
        auto s = exact_sqrt(disc);
        if (!s) continue;
        for (int sign : {+1, -1}) {
            Int num = -D * y + sign * *s;
            if (num % 2 != 0) continue;
            QuadInt g(f, num / 2, y);
            if (g.is_zero() || g.norm() != N) continue;
            if (Ideal::principal(g) == I) candidates.push_back(g);
            if (*s == 0) break;
        }
    }
    if (candidates.empty()) throw NotPrincipalError("ideal " + I.hnf_str() + " is not principal");
    // Normalize: first nonzero coordinate positive, then lex-smallest (x, y).
    std::vector<QuadInt> normalized;
    for (const QuadInt& g : candidates) {
        bool pos = (g.x != 0) ? (g.x > 0) : (g.y > 0);
        normalized.push_back(pos ? g : -g);
    }
    std::sort(normalized.begin(), normalized.end(), [](const QuadInt& p, const QuadInt& q) {
        if (p.x != q.x) return p.x < q.x;
        return p.y < q.y;
    });
    return normalized.front();
}

} // namespace cmtheta
