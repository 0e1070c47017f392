#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cmtheta/errors.hpp"
#include "cmtheta/kfield.hpp"

#include <random>
#include <set>

using namespace cmtheta;

TEST_CASE("field invariants") {
    const Field& f7 = field_for(-7);
    CHECK(f7.disc() == -7);
    CHECK(f7.omega_norm() == 14);
    const Field& f1 = field_for(-1);
    CHECK(f1.disc() == -4);
    CHECK(f1.omega_norm() == 5);
    CHECK_THROWS_AS(Field(-4), BadInputError);
    CHECK_THROWS_AS(Field(5), BadInputError);
    // omega satisfies w^2 = D w - N(w)
    for (long d : {-1L, -2L, -3L, -5L, -7L, -11L, -23L}) {
        const Field& f = field_for(d);
        QuadInt w(f, 0, 1);
        QuadInt wsq = w * w;
        CHECK(wsq.x == -f.omega_norm());
        CHECK(wsq.y == f.disc());
        CHECK(w.norm() == f.omega_norm());
        CHECK(w.trace() == f.disc());
        CHECK((w + w.conj()).x == f.disc());
        CHECK((w * w.conj()).x == f.omega_norm());
        CHECK((w * w.conj()).y == 0);
    }
}

TEST_CASE("quadint arithmetic properties") {
    std::mt19937_64 rng(7);
    for (long d : {-1L, -7L, -5L, -23L}) {
        const Field& f = field_for(d);
        for (int t = 0; t < 40; ++t) {
            QuadInt a(f, Int(static_cast<long>(rng() % 19)) - 9, Int(static_cast<long>(rng() % 19)) - 9);
            QuadInt b(f, Int(static_cast<long>(rng() % 19)) - 9, Int(static_cast<long>(rng() % 19)) - 9);
            CHECK((a * b).norm() == a.norm() * b.norm());
            CHECK((a * b).conj() == a.conj() * b.conj());
            CHECK(a.norm() >= 0);
            CHECK(a.norm() == (a * a.conj()).x);
        }
    }
}

TEST_CASE("ideal HNF and residues") {
    const Field& f = field_for(-7);
    Ideal I = Ideal::from_hnf(f, 4, 1, 1);
    CHECK(I.norm() == 4);
    // residues form a transversal: reduce is idempotent and surjective
    auto rs = I.residues();
    CHECK(rs.size() == 4);
    for (const QuadInt& r : rs) CHECK(I.reduce(r) == r);
    // reduction respects the lattice: g - reduce(g) is in I
    std::mt19937_64 rng(11);
    for (int t = 0; t < 50; ++t) {
        QuadInt g(f, Int(static_cast<long>(rng() % 41)) - 20, Int(static_cast<long>(rng() % 41)) - 20);
        QuadInt r = I.reduce(g);
        CHECK(I.contains(g - r));
    }
    CHECK_THROWS_AS(Ideal::from_hnf(f, 4, 1, 2), BadInputError); // c must divide b
    CHECK_THROWS_AS(Ideal::from_hnf(f, 5, 1, 1), BadInputError); // not w-stable
}

TEST_CASE("ideals_of_norm frozen values for d=-7") {
    const Field& f = field_for(-7);
    auto ideals = ideals_of_norm(f, 4);
    REQUIRE(ideals.size() == 3);
    CHECK(ideals[0].hnf_str() == "2,0,2");
    CHECK(ideals[1].hnf_str() == "4,1,1");
    CHECK(ideals[2].hnf_str() == "4,2,1");
}

// Independent oracle: count ideals of norm n by brute force over all HNF
// triples (no divisor-structure shortcuts).
static int brute_count_ideals(const Field& f, long n) {
    int count = 0;
    for (long a = 1; a <= n; ++a) {
        if (n % a != 0) continue;
        long c = n / a;
        if (a % c != 0) continue;
        for (long b = 0; b < a; b += c)
            if (QuadInt(f, b, c).norm() % (a * c) == 0) ++count;
    }
    return count;
}

TEST_CASE("ideals_of_norm vs brute force and multiplicativity") {
    for (long d : {-1L, -7L, -5L, -23L}) {
        const Field& f = field_for(d);
        for (long n = 1; n <= 60; ++n)
            CHECK(ideals_of_norm(f, n).size() == static_cast<std::size_t>(brute_count_ideals(f, n)));
    }
}

TEST_CASE("splitting of primes, d=-7 inert list") {
    const Field& f = field_for(-7);
    std::set<long> inert;
    for (long l : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47}) {
        if (f.splitting(l) == -1) inert.insert(l);
    }
    CHECK(inert == std::set<long>{3, 5, 13, 17, 19, 31, 41, 47});
}

TEST_CASE("primes_above structure") {
    for (long d : {-1L, -7L, -5L, -23L}) {
        const Field& f = field_for(d);
        for (long l : {2, 3, 5, 7, 11, 13}) {
            auto ps = primes_above(f, l);
            int s = f.splitting(l);
            if (s == 1) {
                REQUIRE(ps.size() == 2);
                CHECK(ps[0].ideal * ps[1].ideal == Ideal::principal(QuadInt(f, l, 0)));
                CHECK(ps[0].ideal.conj() == ps[1].ideal);
            } else if (s == -1) {
                REQUIRE(ps.size() == 1);
                CHECK(ps[0].ideal == Ideal::principal(QuadInt(f, l, 0)));
                CHECK(ps[0].residue_degree == 2);
            } else {
                REQUIRE(ps.size() == 1);
                CHECK(ps[0].ideal * ps[0].ideal == Ideal::principal(QuadInt(f, l, 0)));
                CHECK(ps[0].ramification == 2);
            }
            for (const auto& P : ps) CHECK(P.ideal.norm() == Int(l) * (s == -1 ? l : 1));
        }
    }
}

TEST_CASE("ideal multiplication properties") {
    std::mt19937_64 rng(23);
    for (long d : {-1L, -7L, -5L}) {
        const Field& f = field_for(d);
        std::vector<Ideal> pool;
        for (long n = 2; n <= 30; ++n)
            for (const Ideal& I : ideals_of_norm(f, n)) pool.push_back(I);
        for (int t = 0; t < 40; ++t) {
            const Ideal& I = pool[rng() % pool.size()];
            const Ideal& J = pool[rng() % pool.size()];
            Ideal IJ = I * J;
            CHECK(IJ.norm() == I.norm() * J.norm());
            CHECK(IJ == J * I);
            CHECK(IJ.divide_exact(J) == I);
            CHECK(I.divides(IJ));
            CHECK(IJ.conj() == I.conj() * J.conj());
            // N(I) in I
            CHECK(I.contains(QuadInt(f, I.norm(), 0)));
            // I * conj(I) = (N(I))
            CHECK(I * I.conj() == Ideal::principal(QuadInt(f, I.norm(), 0)));
        }
    }
}

TEST_CASE("ideal factorization") {
    const Field& f = field_for(-7);
    for (long n : {12L, 70L, 49L, 98L, 36L}) {
        for (const Ideal& I : ideals_of_norm(f, n)) {
            auto fac = factor_ideal(I);
            Ideal prod = Ideal::unit_ideal(f);
            for (const auto& [P, e] : fac)
                for (int k = 0; k < e; ++k) prod = prod * P;
            CHECK(prod == I);
        }
    }
}

TEST_CASE("class groups: frozen orders") {
    CHECK(ClassGroup(field_for(-1)).h() == 1);
    CHECK(ClassGroup(field_for(-7)).h() == 1);
    CHECK(ClassGroup(field_for(-163)).h() == 1);
    ClassGroup cl5(field_for(-5));
    CHECK(cl5.h() == 2);
    ClassGroup cl23(field_for(-23));
    CHECK(cl23.h() == 3);
    REQUIRE(cl23.structure().orders().size() == 1);
    CHECK(cl23.structure().orders()[0] == 3);
    ClassGroup cl47(field_for(-47));
    CHECK(cl47.h() == 5);
}

TEST_CASE("class group dlog is a homomorphism") {
    for (long d : {-5L, -23L, -47L, -14L}) {
        const Field& f = field_for(d);
        ClassGroup cl(f);
        std::vector<Ideal> pool;
        for (long n = 2; n <= 25; ++n)
            for (const Ideal& I : ideals_of_norm(f, n)) pool.push_back(I);
        std::mt19937_64 rng(31);
        for (int t = 0; t < 30; ++t) {
            const Ideal& I = pool[rng() % pool.size()];
            const Ideal& J = pool[rng() % pool.size()];
            auto dI = cl.dlog(I), dJ = cl.dlog(J), dIJ = cl.dlog(I * J);
            for (std::size_t i = 0; i < dI.size(); ++i)
                CHECK(dIJ[i] == (dI[i] + dJ[i]) % cl.structure().orders()[i]);
        }
        // principal ideals have trivial dlog
        for (const auto& g : {QuadInt(f, 3, 1), QuadInt(f, 5, 2), QuadInt(f, 7, 0)}) {
            if (g.is_zero()) continue;
            auto dl = cl.dlog(Ideal::principal(g));
            for (const Int& x : dl) CHECK(x == 0);
        }
    }
}

TEST_CASE("class number via reduced forms matches closure construction") {
    for (long d : {-1L, -2L, -3L, -5L, -6L, -7L, -10L, -11L, -13L, -14L, -15L,
                   -17L, -19L, -21L, -23L, -26L, -29L, -31L, -35L, -39L, -47L, -71L}) {
        const Field& f = field_for(d);
        CHECK(ClassGroup(f).h() == Int(reduced_forms(f.disc()).size()));
    }
}

TEST_CASE("form <-> ideal round trip") {
    for (long d : {-5L, -23L, -47L, -14L, -31L}) {
        const Field& f = field_for(d);
        for (const QuadForm& q : reduced_forms(f.disc())) {
            Ideal I = form_to_ideal(f, q);
            CHECK(ideal_to_form(I) == q);
        }
    }
}

TEST_CASE("principal generators") {
    const Field& f7 = field_for(-7);
    // (w) has norm 14
    QuadInt w(f7, 0, 1);
    QuadInt g = principal_generator(Ideal::principal(w));
    CHECK(Ideal::principal(g) == Ideal::principal(w));
    CHECK(g.norm() == 14);
    // sqrt(-7) = 2w + 7 (check norm 7), generator of the ramified prime
    QuadInt r7(f7, 7, 2);
    CHECK(r7.norm() == 7);
    auto ps = primes_above(f7, 7);
    CHECK(Ideal::principal(r7) == ps[0].ideal);
    QuadInt g7 = principal_generator(ps[0].ideal);
    CHECK(Ideal::principal(g7) == ps[0].ideal);

    // normalization: canonical among unit multiples, deterministic
    const Field& f1 = field_for(-1);
    auto ps5 = primes_above(f1, 5);
    QuadInt g5 = principal_generator(ps5[0].ideal);
    CHECK(g5.norm() == 5);
    CHECK(Ideal::principal(g5) == ps5[0].ideal);
    bool firstpos = (g5.x != 0) ? (g5.x > 0) : (g5.y > 0);
    CHECK(firstpos);

    // non-principal ideal in d=-5: (2, w) has norm 2
    const Field& f5 = field_for(-5);
    auto ps2 = primes_above(f5, 2);
    CHECK_THROWS_AS(principal_generator(ps2[0].ideal), NotPrincipalError);
}

TEST_CASE("units") {
    CHECK(unit_group(field_for(-1)).order == 4);
    CHECK(unit_group(field_for(-3)).order == 6);
    CHECK(unit_group(field_for(-7)).order == 2);
    for (long d : {-1L, -3L, -7L}) {
        UnitGroup u = unit_group(field_for(d));
        QuadInt x = u.generator;
        CHECK(x.norm() == 1);
        QuadInt p(*x.F, 1, 0);
        for (long k = 1; k < u.order; ++k) {
            p = p * x;
            if (k < u.order) CHECK(!(p == QuadInt(*x.F, 1, 0)));
        }
        p = p * x;
        CHECK(p == QuadInt(*x.F, 1, 0));
        CHECK(u.all().size() == static_cast<std::size_t>(u.order));
    }
}

TEST_CASE("coprime class generators") {
    const Field& f = field_for(-5);
    ClassGroup cl(f);
    Ideal mod = Ideal::principal(QuadInt(f, 2, 0)); // (2)
    auto gens = cl.coprime_generators(mod);
    REQUIRE(gens.size() == 1);
    CHECK(gens[0].is_coprime_to(mod));
    auto dl = cl.dlog(gens[0]);
    CHECK(dl[0] == 1);
}
