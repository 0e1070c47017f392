#include "cmtheta/tower.hpp"

#include "cmtheta/errors.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace cmtheta {

// ---------------------------------------------------------------------------
// Complex helpers
// ---------------------------------------------------------------------------

CNum cnum_add(const CNum& a, const CNum& b) { return {a.re + b.re, a.im + b.im}; }
CNum cnum_sub(const CNum& a, const CNum& b) { return {a.re - b.re, a.im - b.im}; }
CNum cnum_mul(const CNum& a, const CNum& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
CNum cnum_scale(const CNum& a, const Real& s) { return {a.re * s, a.im * s}; }
Real cnum_abs(const CNum& a) { return sqrt(a.re * a.re + a.im * a.im); }

namespace {

CNum principal_root(const CNum& z, long m) {
    Real rho = cnum_abs(z);
    if (rho == 0) return {Real(0), Real(0)};
    Real theta = atan2(z.im, z.re);
    Real r = exp(log(rho) / m);
    Real t = theta / m;
    return {r * cos(t), r * sin(t)};
}

// ---------------------------------------------------------------------------
// Integer polynomial helpers (little-endian coefficient vectors)
// ---------------------------------------------------------------------------

std::vector<Int> ipoly_mul(const std::vector<Int>& a, const std::vector<Int>& b) {
    std::vector<Int> r(a.size() + b.size() - 1, Int(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    }
    return r;
}

// Exact division by x^k - 1.
std::vector<Int> ipoly_div_xk1(const std::vector<Int>& a, long k) {
    long n = static_cast<long>(a.size()) - 1;
    if (n < k) throw BadInputError("cyclotomic division underflow");
    std::vector<Int> q(n - k + 1, Int(0));
    std::vector<Int> r = a;
    for (long i = n; i >= k; --i) {
        Int c = r[i];
        if (c == 0) continue;
        q[i - k] = c;
        r[i] = 0;
        r[i - k] += c;
    }
    for (long i = 0; i < k; ++i)
        if (r[i] != 0) throw BadInputError("cyclotomic division not exact");
    return q;
}

long disc_of_d(long d) {
    long r = ((d % 4) + 4) % 4;
    return r == 1 ? d : 4 * d;
}

} // namespace

std::vector<Int> cyclotomic_polynomial(long M) {
    if (M < 1) throw BadInputError("cyclotomic order must be >= 1");
    std::vector<Int> num{Int(1)};
    std::vector<long> dens;
    for (const Int& dd : divisors(Int(M))) {
        long d = static_cast<long>(dd);
        int mu = static_cast<int>(moebius(Int(d)));
        if (mu == 0) continue;
        if (mu == 1) {
            std::vector<Int> f(M / d + 1, Int(0));
            f[0] = -1;
            f[M / d] = 1;
            num = ipoly_mul(num, f);
        } else {
            dens.push_back(M / d);
        }
    }
    for (long k : dens) num = ipoly_div_xk1(num, k);
    while (num.size() > 1 && num.back() == 0) num.pop_back();
    return num;
}

// ---------------------------------------------------------------------------
// Tower construction
// ---------------------------------------------------------------------------

Tower::Tower(long M, long field_d, std::vector<RadicalSpec> radicals)
    : M_(M), d_(field_d) {
    if (M_ < 1) throw BadInputError("cyclotomic order must be >= 1");
    if (d_ != 0) {
        field_for(d_); // validates d (negative, squarefree)
        D_ = disc_of_d(d_);
        bd_ = (M_ % (-D_) == 0) ? 1 : 2;
    } else {
        D_ = 0;
        bd_ = 1;
    }
    phi_ = static_cast<std::size_t>(euler_phi(Int(M_)));
    cyclo_ = cyclotomic_polynomial(M_);
    if (cyclo_.size() != phi_ + 1 || cyclo_.back() != 1)
        throw BadInputError("cyclotomic polynomial inconsistency");

    // red_[u] = x^(phi+u) mod Phi_M for u = 0 .. phi-2
    if (phi_ >= 1) {
        std::vector<Int> cur(phi_, Int(0)); // x^phi mod Phi = -(low part)
        for (std::size_t i = 0; i < phi_; ++i) cur[i] = -cyclo_[i];
        for (std::size_t u = 0; u + 1 < phi_; ++u) {
            red_.push_back(cur);
            // multiply by x and reduce once
            std::vector<Int> nxt(phi_, Int(0));
            Int top = cur[phi_ - 1];
            for (std::size_t i = phi_ - 1; i >= 1; --i) nxt[i] = cur[i - 1];
            nxt[0] = 0;
            if (top != 0)
                for (std::size_t i = 0; i < phi_; ++i) nxt[i] += top * -cyclo_[i];
            cur = std::move(nxt);
        }
        if (phi_ == 1) red_.clear();
        else if (red_.size() < phi_ - 1) red_.push_back(cur);
    }

    subdim_.push_back(static_cast<std::size_t>(bd_) * phi_);
    for (const RadicalSpec& rs : radicals) {
        if (rs.power < 2) throw BadInputError("radical power must be >= 2");
        if (rs.alpha.size() != subdim_.back())
            throw BadInputError("radical base has wrong dimension");
        bool allzero = true;
        for (const Rat& c : rs.alpha)
            if (c != 0) { allzero = false; break; }
        if (allzero) throw BadInputError("radical base must be nonzero");
        rad_.push_back(Radical{rs.power, rs.alpha});
        subdim_.push_back(subdim_.back() * static_cast<std::size_t>(rs.power));
    }
    dim_ = subdim_.back();
}

// ---------------------------------------------------------------------------
// Multiplication
// ---------------------------------------------------------------------------

std::vector<Rat> Tower::mul_level(std::size_t level, const Rat* A, const Rat* B) const {
    if (level == 0) {
        const std::size_t n = phi_;
        const std::size_t tn = 2 * n - 1;
        std::vector<Rat> tmp(static_cast<std::size_t>(bd_) * tn, Rat(0));
        for (int e1 = 0; e1 < bd_; ++e1)
            for (int e2 = 0; e2 < bd_; ++e2) {
                int es = e1 + e2;
                bool mulD = false;
                if (es == 2) { es = 0; mulD = true; }
                const Rat* a = A + static_cast<std::size_t>(e1) * n;
                const Rat* b = B + static_cast<std::size_t>(e2) * n;
                Rat* dst = tmp.data() + static_cast<std::size_t>(es) * tn;
                for (std::size_t i = 0; i < n; ++i) {
                    if (a[i] == 0) continue;
                    Rat ai = mulD ? Rat(a[i] * D_) : a[i];
                    for (std::size_t j = 0; j < n; ++j) {
                        if (b[j] == 0) continue;
                        dst[i + j] += ai * b[j];
                    }
                }
            }
        std::vector<Rat> out(static_cast<std::size_t>(bd_) * n, Rat(0));
        for (int e = 0; e < bd_; ++e) {
            const Rat* src = tmp.data() + static_cast<std::size_t>(e) * tn;
            Rat* dst = out.data() + static_cast<std::size_t>(e) * n;
            for (std::size_t u = 0; u < n; ++u) dst[u] += src[u];
            for (std::size_t u = n; u < tn; ++u) {
                if (src[u] == 0) continue;
                const std::vector<Int>& row = red_[u - n];
                for (std::size_t t = 0; t < n; ++t)
                    if (row[t] != 0) dst[t] += src[u] * row[t];
            }
        }
        return out;
    }

    const Radical& R = rad_[level - 1];
    const std::size_t s = subdim_[level - 1];
    const long m = R.power;
    auto slice_zero = [s](const Rat* p) {
        for (std::size_t i = 0; i < s; ++i)
            if (p[i] != 0) return false;
        return true;
    };
    std::vector<std::vector<Rat>> C(static_cast<std::size_t>(2 * m - 1),
                                    std::vector<Rat>(s, Rat(0)));
    for (long e1 = 0; e1 < m; ++e1) {
        const Rat* a = A + static_cast<std::size_t>(e1) * s;
        if (slice_zero(a)) continue;
        for (long e2 = 0; e2 < m; ++e2) {
            const Rat* b = B + static_cast<std::size_t>(e2) * s;
            if (slice_zero(b)) continue;
            std::vector<Rat> prod = mul_level(level - 1, a, b);
            std::vector<Rat>& dst = C[static_cast<std::size_t>(e1 + e2)];
            for (std::size_t t = 0; t < s; ++t) dst[t] += prod[t];
        }
    }
    for (long e = 2 * m - 2; e >= m; --e) {
        std::vector<Rat>& src = C[static_cast<std::size_t>(e)];
        if (slice_zero(src.data())) continue;
        std::vector<Rat> folded = mul_level(level - 1, src.data(), R.alpha.data());
        std::vector<Rat>& dst = C[static_cast<std::size_t>(e - m)];
        for (std::size_t t = 0; t < s; ++t) dst[t] += folded[t];
    }
    std::vector<Rat> out(s * static_cast<std::size_t>(m));
    for (long e = 0; e < m; ++e)
        for (std::size_t t = 0; t < s; ++t)
            out[static_cast<std::size_t>(e) * s + t] = C[static_cast<std::size_t>(e)][t];
    return out;
}

std::vector<Rat> Tower::mul_full(const std::vector<Rat>& A, const std::vector<Rat>& B) const {
    return mul_level(rad_.size(), A.data(), B.data());
}

// ---------------------------------------------------------------------------
// Element constructors
// ---------------------------------------------------------------------------

TowerElem Tower::zero() const { return make(std::vector<Rat>(dim_, Rat(0))); }

TowerElem Tower::one() const {
    std::vector<Rat> c(dim_, Rat(0));
    c[0] = 1;
    return make(std::move(c));
}

TowerElem Tower::from_rational(const Rat& q) const {
    std::vector<Rat> c(dim_, Rat(0));
    c[0] = q;
    return make(std::move(c));
}

TowerElem Tower::from_coords(std::vector<Rat> c) const {
    if (c.size() != dim_) throw BadInputError("tower element has wrong dimension");
    return make(std::move(c));
}

TowerElem Tower::zeta_power(const Int& k) const {
    Int e = mod_floor(k, Int(M_));
    // x^e mod Phi_M via repeated shift-and-reduce
    std::vector<Rat> v(phi_, Rat(0));
    v[0] = 1;
    for (Int t = 0; t < e; ++t) {
        Rat top = phi_ >= 1 ? v[phi_ - 1] : Rat(0);
        for (std::size_t i = phi_ - 1; i >= 1; --i) v[i] = v[i - 1];
        v[0] = 0;
        if (top != 0)
            for (std::size_t i = 0; i < phi_; ++i) v[i] += top * -cyclo_[i];
    }
    std::vector<Rat> c(dim_, Rat(0));
    for (std::size_t i = 0; i < phi_; ++i) c[i] = v[i];
    return make(std::move(c));
}

TowerElem Tower::zeta() const { return zeta_power(Int(1)); }

TowerElem Tower::zeta_of_order(const Int& n) const {
    if (n <= 0 || Int(M_) % n != 0)
        throw BadInputError("zeta_of_order: order must divide the cyclotomic order");
    return zeta_power(Int(M_) / n);
}

TowerElem Tower::sqrt_disc() const {
    if (d_ == 0) throw BadInputError("tower has no quadratic data");
    if (bd_ == 2) {
        std::vector<Rat> c(dim_, Rat(0));
        c[phi_] = 1; // the monomial s
        return make(std::move(c));
    }
    // |D| divides M: sqrt(D) = sum_t (D|t) zeta_{|D|}^t  (quadratic Gauss sum)
    long aD = -D_;
    TowerElem g = zero();
    for (long t = 1; t < aD; ++t) {
        Int chi = kronecker(Int(D_), Int(t));
        if (chi == 0) continue;
        TowerElem term = zeta_power(Int(t) * (M_ / aD));
        g = (chi == 1) ? g + term : g - term;
    }
    return g;
}

TowerElem Tower::radical(std::size_t j) const {
    if (j >= rad_.size()) throw BadInputError("radical index out of range");
    std::vector<Rat> c(dim_, Rat(0));
    c[subdim_[j]] = 1;
    return make(std::move(c));
}

TowerElem Tower::radical_base(std::size_t j) const {
    if (j >= rad_.size()) throw BadInputError("radical index out of range");
    std::vector<Rat> c(dim_, Rat(0));
    for (std::size_t t = 0; t < rad_[j].alpha.size(); ++t) c[t] = rad_[j].alpha[t];
    return make(std::move(c));
}

TowerElem Tower::embed_quadint(const QuadInt& x) const {
    if (d_ == 0 || x.F == nullptr || x.F->d() != d_)
        throw BadInputError("quadratic integer belongs to a different field");
    // x + y w = (x + y D/2) + (y/2) sqrt(D)
    TowerElem r = from_rational(Rat(x.x) + Rat(x.y) * Rat(D_) / 2);
    if (x.y != 0) r = r + sqrt_disc().scale(Rat(x.y) / 2);
    return r;
}

// ---------------------------------------------------------------------------
// Element operations
// ---------------------------------------------------------------------------

namespace {
const Tower& same_tower(const TowerElem& a, const TowerElem& b) {
    if (a.tower() == nullptr || a.tower() != b.tower())
        throw BadInputError("tower elements belong to different rings");
    return *a.tower();
}
} // namespace

bool TowerElem::is_zero() const {
    for (const Rat& x : c_)
        if (x != 0) return false;
    return true;
}

bool TowerElem::is_rational() const {
    for (std::size_t i = 1; i < c_.size(); ++i)
        if (c_[i] != 0) return false;
    return true;
}

Rat TowerElem::rational_value() const {
    if (!is_rational()) throw BadInputError("element is not rational");
    return c_.empty() ? Rat(0) : c_[0];
}

TowerElem TowerElem::operator+(const TowerElem& o) const {
    const Tower& T = same_tower(*this, o);
    std::vector<Rat> c(c_);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += o.c_[i];
    return T.make(std::move(c));
}

TowerElem TowerElem::operator-(const TowerElem& o) const {
    const Tower& T = same_tower(*this, o);
    std::vector<Rat> c(c_);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] -= o.c_[i];
    return T.make(std::move(c));
}

TowerElem TowerElem::operator-() const {
    std::vector<Rat> c(c_);
    for (Rat& x : c) x = -x;
    return TowerElem(T_, std::move(c));
}

TowerElem TowerElem::operator*(const TowerElem& o) const {
    const Tower& T = same_tower(*this, o);
    return T.make(T.mul_full(c_, o.c_));
}

bool TowerElem::operator==(const TowerElem& o) const {
    if (T_ != o.T_) return false;
    return c_ == o.c_;
}

TowerElem TowerElem::scale(const Rat& s) const {
    std::vector<Rat> c(c_);
    for (Rat& x : c) x *= s;
    return TowerElem(T_, std::move(c));
}

TowerElem TowerElem::inverse() const {
    if (T_ == nullptr) throw BadInputError("uninitialized tower element");
    const Tower& T = *T_;
    const std::size_t N = T.dim();
    // Solve (mult-by-this) v = 1 by Gaussian elimination over Q.
    std::vector<std::vector<Rat>> Mx(N, std::vector<Rat>(N + 1, Rat(0)));
    for (std::size_t j = 0; j < N; ++j) {
        std::vector<Rat> ej(N, Rat(0));
        ej[j] = 1;
        std::vector<Rat> col = T.mul_full(c_, ej);
        for (std::size_t i = 0; i < N; ++i) Mx[i][j] = col[i];
    }
    Mx[0][N] = 1; // rhs = coords of one()
    std::size_t row = 0;
    std::vector<std::size_t> pivot_col;
    for (std::size_t col = 0; col < N && row < N; ++col) {
        std::size_t pr = row;
        while (pr < N && Mx[pr][col] == 0) ++pr;
        if (pr == N) continue;
        std::swap(Mx[pr], Mx[row]);
        Rat inv = Rat(1) / Mx[row][col];
        for (std::size_t j = col; j <= N; ++j) Mx[row][j] *= inv;
        for (std::size_t i = 0; i < N; ++i) {
            if (i == row || Mx[i][col] == 0) continue;
            Rat f = Mx[i][col];
            for (std::size_t j = col; j <= N; ++j) Mx[i][j] -= f * Mx[row][j];
        }
        pivot_col.push_back(col);
        ++row;
    }
    if (row < N) {
        // Singular: consistent system would mean a one-sided inverse, which
        // cannot happen in a commutative finite-dimensional algebra unless
        // the element is a unit; so this is a genuine zero divisor (or zero).
        throw ZeroDivisorError("tower element is zero or a zero divisor");
    }
    std::vector<Rat> v(N, Rat(0));
    for (std::size_t i = 0; i < N; ++i) v[pivot_col[i]] = Mx[i][N];
    return T.make(std::move(v));
}

TowerElem TowerElem::pow(const Int& n) const {
    if (T_ == nullptr) throw BadInputError("uninitialized tower element");
    if (n < 0) return inverse().pow(-n);
    TowerElem base = *this;
    TowerElem acc = T_->one();
    Int e = n;
    while (e > 0) {
        if ((e & 1) != 0) acc = acc * base;
        base = base * base;
        e >>= 1;
    }
    return acc;
}

std::string TowerElem::str() const {
    if (T_ == nullptr) return "0";
    const Tower& T = *T_;
    std::ostringstream os;
    bool first = true;
    for (std::size_t idx = 0; idx < c_.size(); ++idx) {
        if (c_[idx] == 0) continue;
        if (!first) os << " + ";
        first = false;
        os << "(" << c_[idx] << ")";
        std::size_t i = idx % T.phi_;
        std::size_t rest = idx / T.phi_;
        std::size_t eps = rest % static_cast<std::size_t>(T.bd_);
        rest /= static_cast<std::size_t>(T.bd_);
        if (i > 0) os << "*z^" << i;
        if (eps == 1) os << "*s";
        for (std::size_t j = 0; j < T.rad_.size(); ++j) {
            std::size_t e = rest % static_cast<std::size_t>(T.rad_[j].power);
            rest /= static_cast<std::size_t>(T.rad_[j].power);
            if (e > 0) os << "*r" << (j + 1) << "^" << e;
        }
    }
    if (first) os << "0";
    return os.str();
}

std::string Tower::describe() const {
    std::ostringstream os;
    os << "Q(zeta_" << M_ << ")";
    if (bd_ == 2) os << "(sqrt(" << D_ << "))";
    else if (d_ != 0) os << " [contains sqrt(" << D_ << ")]";
    for (std::size_t j = 0; j < rad_.size(); ++j)
        os << " r" << (j + 1) << "^" << rad_[j].power << "=...";
    os << ", dim " << dim_;
    return os.str();
}

// ---------------------------------------------------------------------------
// Transfer between towers
// ---------------------------------------------------------------------------

TowerElem Tower::transfer(const TowerElem& x, const Tower& to) {
    const Tower* from = x.tower();
    if (from == nullptr) throw BadInputError("uninitialized tower element");
    if (from == &to) return x;
    if (to.M_ % from->M_ != 0)
        throw BadInputError("transfer requires the source cyclotomic order to divide the target");
    if (from->d_ != 0 && from->d_ != to.d_)
        throw BadInputError("transfer requires matching quadratic data");
    if (from->rad_.size() != to.rad_.size())
        throw BadInputError("transfer requires matching radical stages");

    TowerElem zimg = to.zeta_power(Int(to.M_ / from->M_));
    std::vector<TowerElem> zpow{to.one()};
    for (std::size_t i = 1; i < from->phi_; ++i) zpow.push_back(zpow.back() * zimg);
    TowerElem simg = (from->bd_ == 2) ? to.sqrt_disc() : to.one();

    std::vector<TowerElem> rimg;
    for (std::size_t j = 0; j < from->rad_.size(); ++j) {
        if (from->rad_[j].power != to.rad_[j].power)
            throw BadInputError("transfer requires matching radical powers");
        rimg.push_back(to.radical(j));
    }

    auto eval = [&](const std::vector<Rat>& coords) {
        TowerElem acc = to.zero();
        for (std::size_t idx = 0; idx < coords.size(); ++idx) {
            if (coords[idx] == 0) continue;
            std::size_t i = idx % from->phi_;
            std::size_t rest = idx / from->phi_;
            std::size_t eps = rest % static_cast<std::size_t>(from->bd_);
            rest /= static_cast<std::size_t>(from->bd_);
            TowerElem term = zpow[i].scale(coords[idx]);
            if (eps == 1) term = term * simg;
            for (std::size_t j = 0; j < from->rad_.size(); ++j) {
                std::size_t e = rest % static_cast<std::size_t>(from->rad_[j].power);
                rest /= static_cast<std::size_t>(from->rad_[j].power);
                for (std::size_t t = 0; t < e; ++t) term = term * rimg[j];
            }
            acc = acc + term;
        }
        return acc;
    };

    // Validate that radical stages agree: each source alpha must transfer to
    // the target alpha.
    for (std::size_t j = 0; j < from->rad_.size(); ++j) {
        std::vector<Rat> a = from->radical_base(j).coords();
        if (!(eval(a) == to.radical_base(j)))
            throw BadInputError("transfer: radical bases do not match");
    }

    return eval(x.coords());
}

// ---------------------------------------------------------------------------
// Complex embedding
// ---------------------------------------------------------------------------

CNum Tower::embed_complex(const TowerElem& x) const {
    if (x.tower() != this) throw BadInputError("element belongs to a different tower");
    Real pi = 4 * atan(Real(1));
    Real theta = 2 * pi / M_;
    std::vector<CNum> zpow(phi_);
    for (std::size_t i = 0; i < phi_; ++i)
        zpow[i] = {cos(theta * static_cast<long>(i)), sin(theta * static_cast<long>(i))};
    CNum sval{Real(0), Real(0)};
    if (bd_ == 2) sval = {Real(0), sqrt(Real(-D_))};

    // radical images, built stage by stage
    std::vector<CNum> rimg;
    std::function<CNum(const std::vector<Rat>&)> eval =
        [&](const std::vector<Rat>& coords) {
            CNum acc{Real(0), Real(0)};
            for (std::size_t idx = 0; idx < coords.size(); ++idx) {
                if (coords[idx] == 0) continue;
                std::size_t i = idx % phi_;
                std::size_t rest = idx / phi_;
                std::size_t eps = rest % static_cast<std::size_t>(bd_);
                rest /= static_cast<std::size_t>(bd_);
                CNum term = zpow[i];
                if (eps == 1) term = cnum_mul(term, sval);
                for (std::size_t j = 0; j < rad_.size() && rest > 0; ++j) {
                    std::size_t e = rest % static_cast<std::size_t>(rad_[j].power);
                    rest /= static_cast<std::size_t>(rad_[j].power);
                    for (std::size_t t = 0; t < e; ++t) term = cnum_mul(term, rimg[j]);
                }
                Real coeff = Real(numerator(coords[idx]).str()) /
                             Real(denominator(coords[idx]).str());
                acc = cnum_add(acc, cnum_scale(term, coeff));
            }
            return acc;
        };

    for (std::size_t j = 0; j < rad_.size(); ++j) {
        CNum base = eval(radical_base(j).coords());
        rimg.push_back(principal_root(base, rad_[j].power));
    }
    return eval(x.coords());
}

// ---------------------------------------------------------------------------
// Finite field machinery (F_p[t]/h)
// ---------------------------------------------------------------------------

namespace {

struct Fq {
    Int p;
    std::size_t k;
    std::vector<Int> h; // monic of degree k, coefficients in [0, p)

    using E = std::vector<Int>;

    E zero() const { return E(k, Int(0)); }
    E one() const {
        E e(k, Int(0));
        e[0] = 1;
        return e;
    }
    E from_int(const Int& v) const {
        E e(k, Int(0));
        e[0] = mod_floor(v, p);
        return e;
    }
    bool is_zero(const E& a) const {
        for (const Int& x : a)
            if (x != 0) return false;
        return true;
    }
    E add(const E& a, const E& b) const {
        E r(k);
        for (std::size_t i = 0; i < k; ++i) r[i] = mod_floor(a[i] + b[i], p);
        return r;
    }
    E sub(const E& a, const E& b) const {
        E r(k);
        for (std::size_t i = 0; i < k; ++i) r[i] = mod_floor(a[i] - b[i], p);
        return r;
    }
    E neg(const E& a) const {
        E r(k);
        for (std::size_t i = 0; i < k; ++i) r[i] = mod_floor(-a[i], p);
        return r;
    }
    E scale(const E& a, const Int& c) const {
        E r(k);
        Int cc = mod_floor(c, p);
        for (std::size_t i = 0; i < k; ++i) r[i] = mod_floor(a[i] * cc, p);
        return r;
    }
    E mul(const E& a, const E& b) const {
        std::vector<Int> t(2 * k - 1, Int(0));
        for (std::size_t i = 0; i < k; ++i) {
            if (a[i] == 0) continue;
            for (std::size_t j = 0; j < k; ++j) t[i + j] += a[i] * b[j];
        }
        for (std::size_t i = 2 * k - 2; i >= k && i < t.size(); --i) {
            Int c = mod_floor(t[i], p);
            if (c != 0)
                for (std::size_t j = 0; j < k; ++j) t[i - k + j] -= c * h[j];
            t[i] = 0;
            if (i == k) break;
        }
        E r(k);
        for (std::size_t i = 0; i < k; ++i) r[i] = mod_floor(t[i], p);
        return r;
    }
    E pow(E a, Int e) const {
        E acc = one();
        while (e > 0) {
            if ((e & 1) != 0) acc = mul(acc, a);
            a = mul(a, a);
            e >>= 1;
        }
        return acc;
    }
    Int q() const {
        Int r = 1;
        for (std::size_t i = 0; i < k; ++i) r *= p;
        return r;
    }
    E inv(const E& a) const {
        if (is_zero(a)) throw ZeroDivisorError("inverse of zero in finite field");
        return pow(a, q() - 2);
    }
    E element_at(Int idx) const {
        E e(k, Int(0));
        for (std::size_t i = 0; i < k && idx > 0; ++i) {
            e[i] = idx % p;
            idx /= p;
        }
        return e;
    }
    Int index_of(const E& a) const {
        Int r = 0;
        for (std::size_t i = k; i-- > 0;) r = r * p + a[i];
        return r;
    }
};

// Polynomials over Fq, little-endian.
using FqPoly = std::vector<Fq::E>;

void fq_poly_trim(const Fq& F, FqPoly& a) {
    while (!a.empty() && F.is_zero(a.back())) a.pop_back();
}

FqPoly fq_poly_mul(const Fq& F, const FqPoly& a, const FqPoly& b) {
    if (a.empty() || b.empty()) return {};
    FqPoly r(a.size() + b.size() - 1, F.zero());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (F.is_zero(a[i])) continue;
        for (std::size_t j = 0; j < b.size(); ++j)
            r[i + j] = F.add(r[i + j], F.mul(a[i], b[j]));
    }
    return r;
}

// a mod b (b nonzero)
FqPoly fq_poly_mod(const Fq& F, FqPoly a, const FqPoly& b) {
    fq_poly_trim(F, a);
    FqPoly bb = b;
    fq_poly_trim(F, bb);
    if (bb.empty()) throw BadInputError("polynomial division by zero");
    Fq::E lead_inv = F.inv(bb.back());
    while (a.size() >= bb.size()) {
        Fq::E c = F.mul(a.back(), lead_inv);
        std::size_t shift = a.size() - bb.size();
        if (!F.is_zero(c))
            for (std::size_t i = 0; i < bb.size(); ++i)
                a[shift + i] = F.sub(a[shift + i], F.mul(c, bb[i]));
        a.pop_back();
        fq_poly_trim(F, a);
        if (a.empty()) break;
    }
    return a;
}

FqPoly fq_poly_gcd(const Fq& F, FqPoly a, FqPoly b) {
    fq_poly_trim(F, a);
    fq_poly_trim(F, b);
    while (!b.empty()) {
        FqPoly r = fq_poly_mod(F, a, b);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        Fq::E inv = F.inv(a.back());
        for (Fq::E& c : a) c = F.mul(c, inv);
    }
    return a;
}

// base^e mod m
FqPoly fq_poly_powmod(const Fq& F, FqPoly base, Int e, const FqPoly& m) {
    FqPoly acc{F.one()};
    base = fq_poly_mod(F, base, m);
    while (e > 0) {
        if ((e & 1) != 0) acc = fq_poly_mod(F, fq_poly_mul(F, acc, base), m);
        base = fq_poly_mod(F, fq_poly_mul(F, base, base), m);
        e >>= 1;
    }
    return acc;
}

// All roots in Fq of the polynomial g, sorted by element index (p odd).
std::vector<Fq::E> fq_poly_roots(const Fq& F, FqPoly g) {
    fq_poly_trim(F, g);
    if (g.size() <= 1) return {};
    // isolate the part splitting into distinct linear factors
    FqPoly x{F.zero(), F.one()};
    FqPoly xq = fq_poly_powmod(F, x, F.q(), g);
    // xq - x
    FqPoly diff = xq;
    if (diff.size() < 2) diff.resize(2, F.zero());
    diff[1] = F.sub(diff[1], F.one());
    FqPoly lin = fq_poly_gcd(F, g, diff);
    if (lin.size() <= 1) return {};

    std::vector<Fq::E> roots;
    std::function<void(FqPoly)> split = [&](FqPoly f) {
        fq_poly_trim(F, f);
        if (f.size() <= 1) return;
        if (f.size() == 2) {
            // monic x + c -> root -c
            Fq::E inv = F.inv(f[1]);
            roots.push_back(F.neg(F.mul(f[0], inv)));
            return;
        }
        Int half = (F.q() - 1) / 2;
        for (Int idx = 0;; ++idx) {
            Fq::E delta = F.element_at(idx);
            FqPoly shifted{delta, F.one()}; // x + delta
            FqPoly w = fq_poly_powmod(F, shifted, half, f);
            if (w.empty()) w.resize(1, F.zero());
            w[0] = F.sub(w[0], F.one());
            FqPoly g1 = fq_poly_gcd(F, f, w);
            if (g1.size() > 1 && g1.size() < f.size()) {
                // divide f by g1: f = g1 * g2
                // compute g2 by long division
                FqPoly g2;
                {
                    FqPoly rem = f;
                    fq_poly_trim(F, rem);
                    g2.assign(rem.size() - g1.size() + 1, F.zero());
                    Fq::E linv = F.inv(g1.back());
                    while (rem.size() >= g1.size()) {
                        Fq::E c = F.mul(rem.back(), linv);
                        std::size_t shift = rem.size() - g1.size();
                        g2[shift] = c;
                        for (std::size_t i = 0; i < g1.size(); ++i)
                            rem[shift + i] = F.sub(rem[shift + i], F.mul(c, g1[i]));
                        fq_poly_trim(F, rem);
                        if (rem.empty()) break;
                    }
                }
                split(g1);
                split(g2);
                return;
            }
        }
    };
    split(lin);
    std::sort(roots.begin(), roots.end(), [&](const Fq::E& a, const Fq::E& b) {
        return F.index_of(a) < F.index_of(b);
    });
    return roots;
}

// Lexicographically minimal monic irreducible of degree k over F_p
// (coefficients read as a base-p integer, ascending).
std::vector<Int> find_irreducible(const Int& p, std::size_t k) {
    for (Int code = 0;; ++code) {
        std::vector<Int> h(k + 1, Int(0));
        Int c = code;
        for (std::size_t i = 0; i < k; ++i) {
            h[i] = c % p;
            c /= p;
        }
        if (c > 0) throw ResidueChoiceError("no irreducible polynomial found");
        h[k] = 1;
        // irreducibility: x^(p^k) = x mod h, and gcd(x^(p^(k/r)) - x, h) = 1
        Fq F{p, k, h};
        FqPoly hp;
        for (const Int& ci : h) hp.push_back(F.from_int(ci));
        FqPoly x{F.zero(), F.one()};
        Int pk = 1;
        for (std::size_t i = 0; i < k; ++i) pk *= p;
        FqPoly xq = fq_poly_powmod(F, x, pk, hp);
        FqPoly diff = xq;
        if (diff.size() < 2) diff.resize(2, F.zero());
        diff[1] = F.sub(diff[1], F.one());
        diff = fq_poly_mod(F, diff, hp); // matters only when k = 1
        if (!diff.empty()) continue;
        bool ok = true;
        for (const auto& [r, e] : factor(Int(k))) {
            std::size_t kr = k / static_cast<std::size_t>(r);
            Int pkr = 1;
            for (std::size_t i = 0; i < kr; ++i) pkr *= p;
            FqPoly xr = fq_poly_powmod(F, x, pkr, hp);
            FqPoly d2 = xr;
            if (d2.size() < 2) d2.resize(2, F.zero());
            d2[1] = F.sub(d2[1], F.one());
            FqPoly g = fq_poly_gcd(F, hp, d2);
            if (g.size() > 1) {
                ok = false;
                break;
            }
        }
        if (ok) return h;
    }
}

long mult_order(const Int& p, long M) {
    if (M <= 1) return 1;
    Int r = mod_floor(p, Int(M));
    if (gcd(r, Int(M)) != 1) throw BadInputError("p must be coprime to the order");
    Int acc = r;
    long k = 1;
    while (acc != 1) {
        acc = mod_floor(acc * r, Int(M));
        ++k;
    }
    return k;
}

} // namespace

// ---------------------------------------------------------------------------
// ResidueContext
// ---------------------------------------------------------------------------

ResidueContext::ResidueContext(const Tower& T, const Int& p) : T_(&T), p_(p) {
    if (p_ < 3 || !is_probable_prime(p_))
        throw BadInputError("residue context requires an odd prime");

    long Mp = T.M_;
    long pl = static_cast<long>(p_);
    while (Mp % pl == 0) Mp /= pl;
    long k0 = mult_order(p_, Mp);
    std::vector<Int> phiMp = cyclotomic_polynomial(Mp);

    for (long k = k0; k <= 24; k += k0) {
        std::vector<Int> h = find_irreducible(p_, static_cast<std::size_t>(k));
        Fq F{p_, static_cast<std::size_t>(k), h};

        FqPoly cp;
        for (const Int& c : phiMp) cp.push_back(F.from_int(c));
        std::vector<Fq::E> zr = fq_poly_roots(F, cp);
        if (zr.empty()) continue; // cannot happen when k0 | k, kept defensive
        Fq::E zimg = zr[0];

        Fq::E simg = F.zero();
        if (T.bd_ == 2) {
            if (mod_floor(Int(T.D_), p_) == 0) {
                simg = F.zero();
            } else {
                FqPoly sq{F.from_int(-Int(T.D_)), F.zero(), F.one()};
                std::vector<Fq::E> sr = fq_poly_roots(F, sq);
                if (sr.empty()) continue;
                simg = sr[0];
            }
        }

        // images of the base monomials zeta^i s^eps
        std::vector<Fq::E> base(T.subdim_[0]);
        {
            Fq::E zp = F.one();
            for (std::size_t i = 0; i < T.phi_; ++i) {
                base[i] = zp;
                if (T.bd_ == 2) base[T.phi_ + i] = F.mul(zp, simg);
                zp = F.mul(zp, zimg);
            }
        }

        // radical images, stage by stage
        bool ok = true;
        std::vector<Fq::E> images = base; // grows to the full monomial list
        std::vector<Fq::E> rimg;
        for (std::size_t j = 0; j < T.rad_.size() && ok; ++j) {
            // reduce alpha_j with the images collected so far
            Fq::E ahat = F.zero();
            const std::vector<Rat>& al = T.rad_[j].alpha;
            for (std::size_t t = 0; t < al.size(); ++t) {
                if (al[t] == 0) continue;
                Int num = numerator(al[t]), den = denominator(al[t]);
                if (mod_floor(den, p_) == 0)
                    throw NotIntegralError("radical base is not integral at p");
                Int c = mod_floor(num * pow_mod(den, p_ - 2, p_), p_);
                ahat = F.add(ahat, F.scale(images[t], c));
            }
            long m = T.rad_[j].power;
            FqPoly eq(static_cast<std::size_t>(m) + 1, F.zero());
            eq[0] = F.neg(ahat);
            eq[static_cast<std::size_t>(m)] = F.one();
            std::vector<Fq::E> rr = fq_poly_roots(F, eq);
            if (rr.empty()) {
                ok = false;
                break;
            }
            rimg.push_back(rr[0]);
            // extend monomial images by powers of this radical
            std::size_t prev = images.size();
            std::vector<Fq::E> ext(prev * static_cast<std::size_t>(m));
            Fq::E rp = F.one();
            for (long e = 0; e < m; ++e) {
                for (std::size_t t = 0; t < prev; ++t)
                    ext[static_cast<std::size_t>(e) * prev + t] = F.mul(images[t], rp);
                rp = F.mul(rp, rimg.back());
            }
            images = std::move(ext);
        }
        if (!ok) continue;

        k_ = static_cast<std::size_t>(k);
        h_ = h;
        monomial_images_ = std::move(images);
        return;
    }
    throw ResidueChoiceError("no residue field of degree <= 24 admits all the required roots");
}

ResidueContext::FqElem ResidueContext::reduce(const TowerElem& x) const {
    if (x.tower() != T_) throw BadInputError("element belongs to a different tower");
    Fq F{p_, k_, h_};
    FqElem acc = F.zero();
    const std::vector<Rat>& c = x.coords();
    for (std::size_t t = 0; t < c.size(); ++t) {
        if (c[t] == 0) continue;
        Int num = numerator(c[t]), den = denominator(c[t]);
        if (mod_floor(den, p_) == 0)
            throw NotIntegralError("element is not integral at p");
        Int cc = mod_floor(num * pow_mod(den, p_ - 2, p_), p_);
        acc = F.add(acc, F.scale(monomial_images_[t], cc));
    }
    return acc;
}

bool ResidueContext::reduces_to_zero(const TowerElem& x) const {
    Fq F{p_, k_, h_};
    return F.is_zero(reduce(x));
}

ResidueContext::FqElem ResidueContext::fq_mul(const FqElem& a, const FqElem& b) const {
    Fq F{p_, k_, h_};
    return F.mul(a, b);
}

ResidueContext::FqElem ResidueContext::fq_pow(const FqElem& a, Int e) const {
    Fq F{p_, k_, h_};
    if (e < 0) return F.pow(F.inv(a), -e);
    return F.pow(a, e);
}

ResidueContext::FqElem ResidueContext::fq_inverse(const FqElem& a) const {
    Fq F{p_, k_, h_};
    return F.inv(a);
}

ResidueContext::FqElem ResidueContext::fq_one() const {
    Fq F{p_, k_, h_};
    return F.one();
}

bool ResidueContext::fq_is_zero(const FqElem& a) const {
    Fq F{p_, k_, h_};
    return F.is_zero(a);
}

std::string ResidueContext::describe() const {
    std::ostringstream os;
    os << "F_" << p_ << "^" << k_ << " = F_" << p_ << "[t]/(";
    bool first = true;
    for (std::size_t i = h_.size(); i-- > 0;) {
        if (h_[i] == 0) continue;
        if (!first) os << " + ";
        first = false;
        if (i == 0 || h_[i] != 1) os << h_[i];
        if (i > 0) {
            if (h_[i] != 1) os << "*";
            os << "t";
            if (i > 1) os << "^" << i;
        }
    }
    os << ")";
    return os.str();
}

// ---------------------------------------------------------------------------
// PadicContext
// ---------------------------------------------------------------------------

namespace {

// Arithmetic in W = (Z/p^e)[t]/(h), h monic with integer coefficients.
struct WRing {
    Int pe;
    std::vector<Int> h; // monic degree k
    std::size_t k;

    using E = std::vector<Int>;

    E reduce_poly(std::vector<Int> t) const {
        for (std::size_t i = t.size(); i-- > k;) {
            Int c = mod_floor(t[i], pe);
            if (c != 0)
                for (std::size_t j = 0; j < k; ++j) t[i - k + j] -= c * h[j];
            t[i] = 0;
        }
        E r(k, Int(0));
        for (std::size_t i = 0; i < k && i < t.size(); ++i) r[i] = mod_floor(t[i], pe);
        return r;
    }
    E mul(const E& a, const E& b) const {
        std::vector<Int> t(2 * k - 1, Int(0));
        for (std::size_t i = 0; i < k; ++i) {
            if (a[i] == 0) continue;
            for (std::size_t j = 0; j < k; ++j) t[i + j] += a[i] * b[j];
        }
        return reduce_poly(std::move(t));
    }
    E add(const E& a, const E& b) const {
        E r(k);
        for (std::size_t i = 0; i < k; ++i) r[i] = mod_floor(a[i] + b[i], pe);
        return r;
    }
    E sub(const E& a, const E& b) const {
        E r(k);
        for (std::size_t i = 0; i < k; ++i) r[i] = mod_floor(a[i] - b[i], pe);
        return r;
    }
    E scale(const E& a, const Int& c) const {
        E r(k);
        for (std::size_t i = 0; i < k; ++i) r[i] = mod_floor(a[i] * c, pe);
        return r;
    }
    E one() const {
        E r(k, Int(0));
        r[0] = 1;
        return r;
    }
    bool is_zero(const E& a) const {
        for (const Int& c : a)
            if (c != 0) return false;
        return true;
    }
    // Newton inverse from a seed that is correct mod p.
    E inv_from(const E& a, const E& seed, long iters) const {
        E y = seed;
        for (long i = 0; i < iters; ++i) {
            // y <- y (2 - a y)
            E ay = mul(a, y);
            E two = one();
            two[0] = mod_floor(Int(2), pe);
            E t = sub(two, ay);
            y = mul(y, t);
        }
        return y;
    }
    // evaluate integer polynomial at x
    E eval_ipoly(const std::vector<Int>& c, const E& x) const {
        E acc(k, Int(0));
        for (std::size_t i = c.size(); i-- > 0;) {
            acc = mul(acc, x);
            acc[0] = mod_floor(acc[0] + c[i], pe);
        }
        return acc;
    }
};

} // namespace

PadicContext::PadicContext(const Tower& T, const Int& p) : T_(&T), p_(p) {
    if (p_ < 3 || !is_probable_prime(p_))
        throw BadInputError("p-adic context requires an odd prime");
    if (Int(T.M_) % p_ == 0)
        throw BadInputError("p-adic context requires p coprime to the cyclotomic order");
    if (T.d_ != 0 && mod_floor(Int(T.D_), p_) == 0)
        throw BadInputError("p-adic context requires p coprime to the discriminant");

    long k = mult_order(p_, T.M_);
    if (T.bd_ == 2) {
        // ensure sqrt(D) exists in F_{p^k}
        Int q = 1;
        for (long i = 0; i < k; ++i) q *= p_;
        if (pow_mod(mod_floor(Int(T.D_), p_), (q - 1) / 2, p_) != 1) {
            // D is a non-square in F_{p^k} (the power lands in F_p for k odd);
            // doubling k always fixes it
            k *= 2;
        }
    }
    k_ = static_cast<std::size_t>(k);
    h_ = find_irreducible(p_, k_);

    Fq F{p_, k_, h_};
    FqPoly cp;
    for (const Int& c : cyclotomic_polynomial(T.M_)) cp.push_back(F.from_int(c));
    std::vector<Fq::E> zr = fq_poly_roots(F, cp);
    if (zr.empty()) throw ResidueChoiceError("no cyclotomic root in the residue field");
    zeta_res_ = zr[0];
    if (T.bd_ == 2) {
        FqPoly sq{F.from_int(-Int(T.D_)), F.zero(), F.one()};
        std::vector<Fq::E> sr = fq_poly_roots(F, sq);
        if (sr.empty()) throw ResidueChoiceError("no square root of D in the residue field");
        sqrt_res_ = sr[0];
    }

    lift_to(64);
}

void PadicContext::lift_to(long target_prec) {
    const Tower& T = *T_;
    prec_ = target_prec;
    pe_ = 1;
    for (long i = 0; i < prec_; ++i) pe_ *= p_;
    WRing W{pe_, h_, k_};

    long iters = 1;
    while ((1L << iters) < prec_ + 2) ++iters;
    iters += 1;

    // Newton-lift the cyclotomic root: z <- z - Phi(z) / Phi'(z)
    std::vector<Int> phi = cyclotomic_polynomial(T.M_);
    std::vector<Int> dphi(phi.size() - 1);
    for (std::size_t i = 1; i < phi.size(); ++i) dphi[i - 1] = Int(i) * phi[i];
    WRing::E z(k_, Int(0));
    for (std::size_t i = 0; i < k_; ++i) z[i] = zeta_res_[i];
    Fq F{p_, k_, h_};
    for (long it = 0; it < iters; ++it) {
        WRing::E fz = W.eval_ipoly(phi, z);
        WRing::E dfz = W.eval_ipoly(dphi, z);
        // inverse of dfz: seed from the residue field
        Fq::E seed0(k_);
        for (std::size_t i = 0; i < k_; ++i) seed0[i] = mod_floor(dfz[i], p_);
        Fq::E sinv = F.inv(seed0);
        WRing::E seed(k_);
        for (std::size_t i = 0; i < k_; ++i) seed[i] = sinv[i];
        WRing::E dinv = W.inv_from(dfz, seed, iters);
        z = W.sub(z, W.mul(fz, dinv));
    }

    WRing::E s(k_, Int(0));
    if (T.bd_ == 2) {
        for (std::size_t i = 0; i < k_; ++i) s[i] = sqrt_res_[i];
        Int inv2 = inv_mod(Int(2), pe_);
        for (long it = 0; it < iters; ++it) {
            // s <- (s + D / s) / 2
            Fq::E seed0(k_);
            for (std::size_t i = 0; i < k_; ++i) seed0[i] = mod_floor(s[i], p_);
            Fq::E sinv = F.inv(seed0);
            WRing::E seed(k_);
            for (std::size_t i = 0; i < k_; ++i) seed[i] = sinv[i];
            WRing::E is = W.inv_from(s, seed, iters);
            WRing::E t = W.add(s, W.scale(is, mod_floor(Int(T.D_), pe_)));
            s = W.scale(t, inv2);
        }
    }

    base_images_.assign(T.subdim_[0], WRing::E(k_, Int(0)));
    WRing::E zp = W.one();
    for (std::size_t i = 0; i < T.phi_; ++i) {
        base_images_[i] = zp;
        if (T.bd_ == 2) base_images_[T.phi_ + i] = W.mul(zp, s);
        zp = W.mul(zp, z);
    }
}

ExtRational PadicContext::valuation(const TowerElem& x) {
    const Tower& T = *T_;
    if (x.tower() != T_) throw BadInputError("element belongs to a different tower");
    if (x.is_zero()) return ExtRational::infinity();
    const std::vector<Rat>& c = x.coords();
    for (std::size_t t = T.subdim_[0]; t < c.size(); ++t)
        if (c[t] != 0)
            throw BadInputError("p-adic valuation is only defined on the radical-free subtower");

    Int L = 1;
    for (std::size_t t = 0; t < T.subdim_[0]; ++t)
        if (c[t] != 0) L = lcm(L, denominator(c[t]));
    long vL = 0;
    {
        Int LL = L;
        while (LL % p_ == 0) {
            LL /= p_;
            ++vL;
        }
    }

    while (true) {
        WRing W{pe_, h_, k_};
        WRing::E acc(k_, Int(0));
        for (std::size_t t = 0; t < T.subdim_[0]; ++t) {
            if (c[t] == 0) continue;
            Int ci = mod_floor(numerator(c[t]) * (L / denominator(c[t])), pe_);
            acc = W.add(acc, W.scale(base_images_[t], ci));
        }
        long best = prec_;
        for (std::size_t i = 0; i < k_; ++i) {
            if (acc[i] == 0) continue;
            long v = 0;
            Int a = acc[i];
            while (a % p_ == 0) {
                a /= p_;
                ++v;
            }
            best = std::min(best, v);
        }
        if (best < prec_ - 1) {
            Rat val = Rat(best) - Rat(vL);
            return ExtRational::of(val);
        }
        if (prec_ >= 4096)
            throw PrecisionExceededError("p-adic precision cap reached");
        lift_to(prec_ * 2);
    }
}

} // namespace cmtheta
