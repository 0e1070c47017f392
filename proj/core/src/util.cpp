#include "cmtheta/util.hpp"
#include "cmtheta/errors.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace cmtheta {

// ---------------------------------------------------------------------------
// Elementary number theory
// ---------------------------------------------------------------------------

int kronecker(const Int& a, const Int& n) {
    return mpz_kronecker(a.backend().data(), n.backend().data());
}

bool is_probable_prime(const Int& n) {
    if (n < 2) return false;
    return mpz_probab_prime_p(n.backend().data(), 40) != 0;
}

static Int pollard_rho(const Int& n) {
    // Deterministic sequence of polynomial offsets; n is odd, composite,
    // not a prime power handled by caller loops.
    for (Int c = 1; ; ++c) {
        Int x = 2, y = 2, d = 1;
        while (d == 1) {
            x = mod_floor(x * x + c, n);
            y = mod_floor(y * y + c, n);
            y = mod_floor(y * y + c, n);
            d = gcd(Int(abs(x - y)), n);
        }
        if (d != n) return d;
    }
}

static void factor_into(Int n, std::map<Int, int>& out) {
    if (n <= 1) return;
    if (is_probable_prime(n)) {
        out[n]++;
        return;
    }
    for (Int p : {Int(2), Int(3), Int(5), Int(7), Int(11), Int(13)}) {
        if (n % p == 0) {
            out[p]++;
            factor_into(n / p, out);
            return;
        }
    }
    // Trial division up to a modest bound before falling back to rho.
    for (Int p = 17; p * p <= n && p < 100000; p += 2) {
        if (n % p == 0) {
            out[p]++;
            factor_into(n / p, out);
            return;
        }
    }
    if (is_probable_prime(n)) {
        out[n]++;
        return;
    }
    Int d = pollard_rho(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

std::vector<std::pair<Int, int>> factor(const Int& n) {
    if (n <= 0) throw BadInputError("factor: argument must be positive");
    std::map<Int, int> m;
    factor_into(n, m);
    return {m.begin(), m.end()};
}

std::vector<Int> divisors(const Int& n) {
    std::vector<Int> ds{1};
    for (const auto& [p, e] : factor(n)) {
        std::size_t sz = ds.size();
        Int pk = 1;
        for (int k = 1; k <= e; ++k) {
            pk *= p;
            for (std::size_t i = 0; i < sz; ++i) ds.push_back(ds[i] * pk);
        }
    }
    std::sort(ds.begin(), ds.end());
    return ds;
}

Int euler_phi(const Int& n) {
    Int r = n;
    for (const auto& [p, e] : factor(n)) r = r / p * (p - 1);
    return r;
}

int moebius(const Int& n) {
    int sign = 1;
    for (const auto& [p, e] : factor(n)) {
        if (e > 1) return 0;
        sign = -sign;
    }
    return sign;
}

Int pow_mod(Int a, Int e, const Int& m) {
    Int r;
    mpz_powm(r.backend().data(), a.backend().data(), e.backend().data(), m.backend().data());
    return r;
}

Int inv_mod(const Int& a, const Int& m) {
    Int r;
    if (!mpz_invert(r.backend().data(), a.backend().data(), m.backend().data()))
        throw BadInputError("inv_mod: element not invertible");
    return r;
}

Int mod_floor(const Int& a, const Int& m) {
    Int r = a % m;
    if (r < 0) r += abs(m);
    return r;
}

std::optional<Int> sqrt_mod_prime(const Int& a0, const Int& p) {
    Int a = mod_floor(a0, p);
    if (p == 2) return a; // 0->0, 1->1
    if (a == 0) return Int(0);
    if (kronecker(a, p) != 1) return std::nullopt;
    // Tonelli-Shanks with the smallest quadratic non-residue as auxiliary.
    Int q = p - 1;
    long s = 0;
    while (q % 2 == 0) { q /= 2; ++s; }
    if (s == 1) return pow_mod(a, (p + 1) / 4, p);
    Int z = 2;
    while (kronecker(z, p) != -1) ++z;
    Int m = s, c = pow_mod(z, q, p), t = pow_mod(a, q, p), r = pow_mod(a, (q + 1) / 2, p);
    while (t != 1) {
        Int tt = t;
        long i = 0;
        while (tt != 1) { tt = tt * tt % p; ++i; }
        Int b = c;
        for (Int j = 0; j < m - i - 1; ++j) b = b * b % p;
        m = i;
        c = b * b % p;
        t = t * c % p;
        r = r * b % p;
    }
    return r;
}

std::optional<Int> exact_sqrt(const Int& n) {
    if (n < 0) return std::nullopt;
    Int r = sqrt(n);
    if (r * r == n) return r;
    return std::nullopt;
}

long padic_valuation(const Rat& x, const Int& p) {
    if (x == 0) throw BadInputError("padic_valuation: zero has no finite valuation");
    Int num = numerator(x), den = denominator(x);
    long v = 0;
    while (num % p == 0) { num /= p; ++v; }
    while (den % p == 0) { den /= p; --v; }
    return v;
}

// ---------------------------------------------------------------------------
// ExtRational
// ---------------------------------------------------------------------------

std::string ExtRational::str() const {
    if (infinite) return "inf";
    return rat_to_string(value);
}

ExtRational ExtRational::parse(const std::string& s) {
    if (s == "inf" || s == "+inf" || s == "infinity") return infinity();
    return of(rat_from_string(s));
}

// ---------------------------------------------------------------------------
// IntMat / Smith normal form
// ---------------------------------------------------------------------------

IntMat IntMat::identity(std::size_t n) {
    IntMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

IntMat IntMat::operator*(const IntMat& o) const {
    if (cols != o.rows) throw BadInputError("IntMat: dimension mismatch");
    IntMat r(rows, o.cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t k = 0; k < cols; ++k) {
            const Int& x = at(i, k);
            if (x == 0) continue;
            for (std::size_t j = 0; j < o.cols; ++j) r.at(i, j) += x * o.at(k, j);
        }
    return r;
}

std::vector<Int> IntMat::apply(const std::vector<Int>& v) const {
    if (v.size() != cols) throw BadInputError("IntMat::apply: dimension mismatch");
    std::vector<Int> r(rows, Int(0));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) r[i] += at(i, j) * v[j];
    return r;
}

namespace {

// Row/column operations maintaining U*M0*V = M, with Uinv = U^{-1}.
struct SnfWork {
    IntMat M, U, Uinv, V;

    void swap_rows(std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t k = 0; k < M.cols; ++k) std::swap(M.at(i, k), M.at(j, k));
        for (std::size_t k = 0; k < U.cols; ++k) std::swap(U.at(i, k), U.at(j, k));
        for (std::size_t k = 0; k < Uinv.rows; ++k) std::swap(Uinv.at(k, i), Uinv.at(k, j));
    }
    void swap_cols(std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t k = 0; k < M.rows; ++k) std::swap(M.at(k, i), M.at(k, j));
        for (std::size_t k = 0; k < V.rows; ++k) std::swap(V.at(k, i), V.at(k, j));
    }
    // row i -= q * row j
    void row_sub(std::size_t i, std::size_t j, const Int& q) {
        if (q == 0) return;
        for (std::size_t k = 0; k < M.cols; ++k) M.at(i, k) -= q * M.at(j, k);
        for (std::size_t k = 0; k < U.cols; ++k) U.at(i, k) -= q * U.at(j, k);
        // E = I - q e_ij  =>  E^{-1} = I + q e_ij ; Uinv := Uinv * E^{-1}
        for (std::size_t k = 0; k < Uinv.rows; ++k) Uinv.at(k, j) += q * Uinv.at(k, i);
    }
    // col i -= q * col j
    void col_sub(std::size_t i, std::size_t j, const Int& q) {
        if (q == 0) return;
        for (std::size_t k = 0; k < M.rows; ++k) M.at(k, i) -= q * M.at(k, j);
        for (std::size_t k = 0; k < V.rows; ++k) V.at(k, i) -= q * V.at(k, j);
    }
    void negate_row(std::size_t i) {
        for (std::size_t k = 0; k < M.cols; ++k) M.at(i, k) = -M.at(i, k);
        for (std::size_t k = 0; k < U.cols; ++k) U.at(i, k) = -U.at(i, k);
        for (std::size_t k = 0; k < Uinv.rows; ++k) Uinv.at(k, i) = -Uinv.at(k, i);
    }
};

} // namespace

SmithResult smith_normal_form(const IntMat& M0) {
    SnfWork w{M0, IntMat::identity(M0.rows), IntMat::identity(M0.rows),
              IntMat::identity(M0.cols)};
    std::size_t n = std::min(M0.rows, M0.cols);
    auto eliminate_from = [&](std::size_t start) {
        for (std::size_t t = start; t < n; ++t) {
            // Find pivot: smallest nonzero |entry| in the remaining block.
            std::size_t pi = t, pj = t;
            bool found = false;
            Int best = 0;
            for (std::size_t i = t; i < w.M.rows; ++i)
                for (std::size_t j = t; j < w.M.cols; ++j) {
                    Int v = abs(w.M.at(i, j));
                    if (v != 0 && (!found || v < best)) { found = true; best = v; pi = i; pj = j; }
                }
            if (!found) break;
            w.swap_rows(t, pi);
            w.swap_cols(t, pj);
            // Eliminate row/column t; repeat until clean (remainders may revive).
            bool dirty = true;
            while (dirty) {
                dirty = false;
                for (std::size_t i = t + 1; i < w.M.rows; ++i) {
                    if (w.M.at(i, t) == 0) continue;
                    Int q = w.M.at(i, t) / w.M.at(t, t);
                    w.row_sub(i, t, q);
                    if (w.M.at(i, t) != 0) { w.swap_rows(t, i); dirty = true; }
                }
                for (std::size_t j = t + 1; j < w.M.cols; ++j) {
                    if (w.M.at(t, j) == 0) continue;
                    Int q = w.M.at(t, j) / w.M.at(t, t);
                    w.col_sub(j, t, q);
                    if (w.M.at(t, j) != 0) { w.swap_cols(t, j); dirty = true; }
                }
            }
            if (w.M.at(t, t) < 0) w.negate_row(t);
        }
    };
    eliminate_from(0);
    // Enforce the divisibility chain d_t | d_{t+1}: fold the offending column
    // into column t and re-diagonalize from t (gcd/lcm refinement; terminates
    // since each fold refines the diagonal in the divisibility order).
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t t = 0; t + 1 < n; ++t) {
            const Int& a = w.M.at(t, t);
            const Int& b = w.M.at(t + 1, t + 1);
            if (a == 0 && b != 0) { // zero pivots must trail
                w.swap_rows(t, t + 1);
                w.swap_cols(t, t + 1);
                changed = true;
            } else if (a != 0 && b % a != 0) {
                w.col_sub(t, t + 1, Int(-1)); // col t += col t+1
                eliminate_from(t);
                changed = true;
            }
        }
    }
    return SmithResult{w.M, w.U, w.Uinv, w.V};
}

// ---------------------------------------------------------------------------
// AbelianGroup
// ---------------------------------------------------------------------------

AbelianGroup AbelianGroup::from_relations(std::size_t n_gens, const IntMat& relations) {
    if (relations.rows != n_gens) throw BadInputError("relation matrix must have one row per generator");
    SmithResult snf = smith_normal_form(relations);
    AbelianGroup g;
    g.n_gens_ = n_gens;
    g.U_ = snf.U;
    g.Uinv_ = snf.Uinv;
    std::size_t n = std::min(relations.rows, relations.cols);
    for (std::size_t i = 0; i < n_gens; ++i) {
        Int d = (i < n) ? snf.D.at(i, i) : Int(0);
        if (d == 0)
            throw BadInputError("relations do not present a finite group");
        if (d > 1) {
            g.orders_.push_back(d);
            g.kept_.push_back(i);
        }
    }
    return g;
}

Int AbelianGroup::order() const {
    Int o = 1;
    for (const Int& d : orders_) o *= d;
    return o;
}

Int AbelianGroup::exponent() const {
    return orders_.empty() ? Int(1) : orders_.back();
}

std::vector<Int> AbelianGroup::dlog(const std::vector<Int>& exps) const {
    if (exps.size() != n_gens_) throw BadInputError("dlog: wrong exponent-vector length");
    std::vector<Int> full = U_.apply(exps);
    std::vector<Int> out;
    out.reserve(orders_.size());
    for (std::size_t k = 0; k < kept_.size(); ++k)
        out.push_back(mod_floor(full[kept_[k]], orders_[k]));
    return out;
}

std::vector<Int> AbelianGroup::canonical_generator(std::size_t i) const {
    std::vector<Int> col(n_gens_, Int(0));
    for (std::size_t r = 0; r < n_gens_; ++r) col[r] = Uinv_.at(r, kept_[i]);
    return col;
}

PPartResult AbelianGroup::p_part(const Int& p) const {
    PPartResult res;
    AbelianGroup& q = res.group;
    q.n_gens_ = 0; // p-part dlog goes through source coordinates, below
    for (std::size_t i = 0; i < orders_.size(); ++i) {
        Int d = orders_[i], pk = 1;
        while (d % p == 0) { d /= p; pk *= p; }
        if (pk > 1) {
            q.orders_.push_back(pk);
            res.source_index.push_back(i);
        }
    }
    return res;
}

std::vector<std::vector<Int>> AbelianGroup::characters() const {
    std::vector<std::vector<Int>> out;
    std::vector<Int> cur(orders_.size(), Int(0));
    Int total = order();
    for (Int c = 0; c < total; ++c) {
        out.push_back(cur);
        for (std::size_t i = orders_.size(); i-- > 0;) {
            cur[i] += 1;
            if (cur[i] < orders_[i]) break;
            cur[i] = 0;
        }
    }
    if (out.empty()) out.push_back({});
    return out;
}

Int AbelianGroup::character_exponent(const std::vector<Int>& chi,
                                     const std::vector<Int>& coords) const {
    Int e = exponent(), k = 0;
    for (std::size_t i = 0; i < orders_.size(); ++i)
        k += chi[i] * coords[i] * (e / orders_[i]);
    return mod_floor(k, e);
}

// ---------------------------------------------------------------------------
// Group closure
// ---------------------------------------------------------------------------

ClosureResult close_group(
    const std::string& id_key, const std::vector<std::string>& generator_keys,
    const std::function<std::string(const std::string&, const std::string&)>& mul) {
    std::size_t n = generator_keys.size();
    ClosureResult res;
    res.relations = IntMat(n, n);

    // subgroup[i] = elements of <g_0..g_{i-1}> with exponent-vector words.
    std::map<std::string, std::vector<Int>> sub;
    sub[id_key] = std::vector<Int>(n, Int(0));

    for (std::size_t i = 0; i < n; ++i) {
        // Find o_i = least power of g_i landing in the current subgroup.
        Int o = 1;
        std::string acc = generator_keys[i];
        while (sub.find(acc) == sub.end()) {
            acc = mul(acc, generator_keys[i]);
            ++o;
        }
        const std::vector<Int>& w = sub.at(acc);
        for (std::size_t j = 0; j < n; ++j) res.relations.at(j, i) = -w[j];
        res.relations.at(i, i) += o;
        // Extend the subgroup: multiply existing elements by g_i^k, k < o.
        std::map<std::string, std::vector<Int>> next = sub;
        std::string gik = id_key;
        for (Int k = 1; k < o; ++k) {
            gik = mul(gik, generator_keys[i]);
            for (const auto& [key, word] : sub) {
                std::string prod = mul(key, gik);
                auto word2 = word;
                word2[i] += k;
                next.emplace(prod, std::move(word2));
            }
        }
        sub = std::move(next);
        res.size *= o;
    }
    res.element_words = std::move(sub);
    return res;
}

// ---------------------------------------------------------------------------
// Misc
// ---------------------------------------------------------------------------

std::string rat_to_string(const Rat& q) {
    std::ostringstream os;
    os << q;
    return os.str();
}

Rat rat_from_string(const std::string& s) {
    try {
        return Rat(s);
    } catch (const std::exception&) {
        throw BadInputError("cannot parse rational: " + s);
    }
}

} // namespace cmtheta
