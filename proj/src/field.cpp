#include "froblab/field.hpp"

#include <algorithm>
#include <sstream>

#include "froblab/detail/polymod.hpp"

namespace froblab {

namespace {

using detail::Digits;
using detail::decode;
using detail::encode;
using detail::gcd_degree;
using detail::is_irreducible;
using detail::mul_mod;
using detail::pow_mod;

}  // namespace

std::shared_ptr<const Field> make_field(u64 p, int k, int m) {
    if (m < 0) fail_pre("InvalidFrobPower", "frobenius power must be nonnegative, got " + std::to_string(m));
    if (!num::is_prime(p)) fail_pre("NotPrime", std::to_string(p) + " is not prime");
    if (k < 1) fail_pre("DegreeTooLarge", "extension degree must be >= 1, got " + std::to_string(k));
    u64 q = 1;
    const u64 cap = (u64(1) << 63) - 1;
    for (int i = 0; i < k; ++i) {
        if (q > cap / p) fail_pre("DegreeTooLarge", "p^k exceeds the 2^63 element cap");
        q *= p;
    }
    return std::shared_ptr<const Field>(new Field(p, k, m));
}

Field::Field(u64 p, int k, int m) : p_(p), k_(k), m_(m) {
    q_ = 1;
    for (int i = 0; i < k; ++i) q_ *= p;
    ord_ = q_ - 1;
    half_ord_ = p_ == 2 ? 0 : ord_ / 2;
    p_pows_.resize(static_cast<size_t>(k) + 1);
    p_pows_[0] = 1;
    for (int i = 1; i <= k; ++i) p_pows_[static_cast<size_t>(i)] = p_pows_[static_cast<size_t>(i - 1)] * p;

    if (k == 1) {
        repr_ = Repr::prime;
        modulus_ = {0, 1};
        return;
    }

    // Canonical modulus: least base-p coefficient vector subject to
    // irreducibility.
    modulus_.assign(static_cast<size_t>(k) + 1, 0);
    modulus_[static_cast<size_t>(k)] = 1;
    for (u64 n = 0;; ++n) {
        Digits d = decode(n, k, p);
        for (int i = 0; i < k; ++i) modulus_[static_cast<size_t>(i)] = static_cast<std::int64_t>(d[static_cast<size_t>(i)]);
        if (is_irreducible(modulus_, k, p)) break;
    }

    repr_ = q_ <= kTableLimit ? Repr::table : Repr::poly;
    if (repr_ == Repr::table) build_tables();
}

namespace {

// Least-index element of multiplicative order q-1, using raw polynomial
// arithmetic (works before any tables exist).
u64 generator_search(u64 p, int k, u64 q, const std::vector<std::int64_t>& modulus) {
    u64 ord = q - 1;
    auto factors = num::factorize(ord);
    for (u64 idx = 1; idx < q; ++idx) {
        bool ok = true;
        for (const auto& [r, e] : factors) {
            u64 cofactor = ord / r;
            u64 val;
            if (k == 1) {
                val = num::powmod(idx, cofactor, p);
            } else {
                Digits base = decode(idx, k, p), out;
                pow_mod(base, cofactor, modulus, p, out);
                std::vector<u64> pows(static_cast<size_t>(k) + 1);
                pows[0] = 1;
                for (int i = 1; i <= k; ++i) pows[static_cast<size_t>(i)] = pows[static_cast<size_t>(i - 1)] * p;
                val = encode(out, pows);
            }
            if (val == 1 % q) { ok = false; break; }
        }
        if (ok) return idx;
    }
    fail_internal("NoGenerator", "no generator found (impossible for a field)");
}

}  // namespace

void Field::build_tables() {
    u64 g = generator_search(p_, k_, q_, modulus_);
    gen_idx_ = g;

    exp_.resize(static_cast<size_t>(ord_));
    log_.assign(static_cast<size_t>(q_), kNoLog);
    Digits cur(static_cast<size_t>(k_), 0), gen = decode(g, k_, p_), scratch;
    cur[0] = 1;
    for (u64 i = 0; i < ord_; ++i) {
        u64 idx = encode(cur, p_pows_);
        exp_[static_cast<size_t>(i)] = static_cast<std::uint32_t>(idx);
        log_[static_cast<size_t>(idx)] = static_cast<std::uint32_t>(i);
        mul_mod(cur, gen, modulus_, p_, cur, scratch);
    }

    // Zech logarithms: zech_[t] = log(1 + g^t), kNoLog when 1 + g^t = 0.
    zech_.resize(static_cast<size_t>(ord_));
    for (u64 t = 0; t < ord_; ++t) {
        Digits d = decode(exp_[static_cast<size_t>(t)], k_, p_);
        d[0] = (d[0] + 1) % p_;
        u64 s = encode(d, p_pows_);
        zech_[static_cast<size_t>(t)] = s == 0 ? kNoLog : log_[static_cast<size_t>(s)];
    }
}

u64 Field::add_poly(u64 a, u64 b) const {
    u64 r = 0;
    for (int i = 0; i < k_; ++i) {
        u64 da = a % p_, db = b % p_;
        a /= p_;
        b /= p_;
        r += ((da + db) % p_) * p_pows_[static_cast<size_t>(i)];
    }
    return r;
}

u64 Field::neg_poly(u64 a) const {
    u64 r = 0;
    for (int i = 0; i < k_; ++i) {
        u64 da = a % p_;
        a /= p_;
        r += (da == 0 ? 0 : p_ - da) * p_pows_[static_cast<size_t>(i)];
    }
    return r;
}

u64 Field::mul_poly(u64 a, u64 b) const {
    Digits da = decode(a, k_, p_), db = decode(b, k_, p_), out, scratch;
    mul_mod(da, db, modulus_, p_, out, scratch);
    return encode(out, p_pows_);
}

u64 Field::pow_poly(u64 a, u64 e) const {
    Digits base = decode(a, k_, p_), out;
    pow_mod(base, e, modulus_, p_, out);
    return encode(out, p_pows_);
}

u64 Field::inv_idx(u64 a) const {
    if (a == 0) fail_pre("DivisionByZero", "inverse of zero");
    switch (repr_) {
        case Repr::prime: return num::powmod(a, p_ - 2, p_);
        case Repr::table: {
            u64 l = log_[a];
            return exp_[l == 0 ? 0 : ord_ - l];
        }
        default: return pow_poly(a, ord_ - 1);  // a^(q-2)
    }
}

Elem Field::pow(Elem a, std::int64_t e) const {
    check1(a);
    if (a.idx == 0) {
        if (e < 0) fail_pre("DivisionByZero", "negative power of zero");
        return {e == 0 ? one().idx : 0, this};
    }
    u64 base = a.idx;
    u64 exp;
    if (e >= 0) {
        exp = static_cast<u64>(e) % ord_;
    } else {
        base = inv_idx(base);
        exp = (static_cast<u64>(-(e + 1)) % ord_ + 1) % ord_;  // -e mod ord, overflow-safe
    }
    return {pow_reduced_idx(base, exp), this};
}

Elem Field::arith(ArithOp op, Elem a, Elem b) const {
    switch (op) {
        case ArithOp::add: return add(a, b);
        case ArithOp::sub: return sub(a, b);
        case ArithOp::mul: return mul(a, b);
        case ArithOp::inv: return inv(a);
        case ArithOp::neg: return neg(a);
        case ArithOp::pow: return pow(a, static_cast<std::int64_t>(b.idx));
    }
    fail_internal("UnknownOp", "bad arith op");
}

Elem Field::from_int(std::int64_t v) const {
    std::int64_t r = v % static_cast<std::int64_t>(p_);
    if (r < 0) r += static_cast<std::int64_t>(p_);
    return {static_cast<u64>(r), this};
}

std::vector<std::int64_t> Field::coeffs(Elem a) const {
    check1(a);
    std::vector<std::int64_t> out(static_cast<size_t>(k_));
    u64 v = a.idx;
    for (int i = 0; i < k_; ++i) {
        out[static_cast<size_t>(i)] = static_cast<std::int64_t>(v % p_);
        v /= p_;
    }
    return out;
}

std::string Field::to_string(Elem a) const {
    check1(a);
    if (k_ == 1) return std::to_string(a.idx);
    auto c = coeffs(a);
    std::ostringstream os;
    bool first = true;
    for (int i = k_ - 1; i >= 0; --i) {
        std::int64_t ci = c[static_cast<size_t>(i)];
        if (ci == 0) continue;
        if (!first) os << "+";
        first = false;
        if (i == 0 || ci != 1) os << ci;
        if (i > 0) {
            if (ci != 1) os << "*";
            os << "x";
            if (i > 1) os << "^" << i;
        }
    }
    if (first) os << "0";
    return os.str();
}

Elem Field::find_generator() const {
    if (gen_idx_) return {*gen_idx_, this};
    std::call_once(gen_once_, [this] { lazy_gen_ = generator_search(p_, k_, q_, modulus_); });
    return {lazy_gen_, this};
}

Elem Field::find_nonsquare() const {
    if (p_ == 2) fail_pre("CharTwo", "every element of a characteristic-2 field is a square");
    for (u64 i = 1; i < q_; ++i)
        if (!is_square_idx(i)) return {i, this};
    fail_internal("NoNonSquare", "no non-square found (impossible for odd q > 1)");
}

std::vector<Elem> Field::fixed_set(u64 n) const {
    std::vector<Elem> out;
    if (repr_ == Repr::prime) {
        out.reserve(static_cast<size_t>(q_));
        for (u64 i = 0; i < q_; ++i) out.push_back({i, this});
        return out;
    }
    u64 e = frob_exponent(n);
    for (u64 i = 0; i < q_; ++i)
        if (pow_reduced_idx(i, e) == i) out.push_back({i, this});
    return out;
}

}  // namespace froblab
