#pragma once

// Exact arithmetic, enumeration and Frobenius action for GF(p^k), q < 2^63.
//
// Elements are canonical indices in [0, q): the base-p evaluation of the
// little-endian coefficient vector of the representative polynomial. Three
// internal representations share that index space:
//   prime  k == 1            residues mod p
//   table  k > 1, q <= 2^20  discrete log / antilog / Zech-log tables
//   poly   k > 1, q >  2^20  coefficient vectors mod the canonical modulus
//
// The modulus is the monic irreducible of degree k whose coefficient vector,
// read as a base-p integer, is least. A Field is immutable after construction
// and safe to share across threads.

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "froblab/errors.hpp"
#include "froblab/num.hpp"

namespace froblab {

using num::u128;
using num::u64;

class Field;

struct Elem {
    u64 idx = 0;
    const Field* fld = nullptr;

    u64 index() const { return idx; }
    const Field& field() const { return *fld; }
};

enum class ArithOp { add, sub, mul, inv, neg, pow };

class Field {
public:
    static constexpr u64 kTableLimit = u64(1) << 20;
    static constexpr std::uint32_t kNoLog = 0xFFFFFFFFu;

    u64 p() const { return p_; }
    int k() const { return k_; }
    int frob_power() const { return m_; }
    u64 q() const { return q_; }
    // Monic modulus, k+1 little-endian coefficients (k=1 uses the degenerate
    // convention x + 0).
    const std::vector<std::int64_t>& modulus() const { return modulus_; }

    Elem elem(u64 index) const;
    Elem zero() const { return {0, this}; }
    Elem one() const { return {1 % q_, this}; }
    Elem from_int(std::int64_t v) const;  // image of v in the prime subfield
    std::vector<std::int64_t> coeffs(Elem a) const;
    std::string to_string(Elem a) const;

    Elem add(Elem a, Elem b) const { return wrap2(a, b, add_idx(a.idx, b.idx)); }
    Elem sub(Elem a, Elem b) const { return wrap2(a, b, sub_idx(a.idx, b.idx)); }
    Elem mul(Elem a, Elem b) const { return wrap2(a, b, mul_idx(a.idx, b.idx)); }
    Elem neg(Elem a) const { return wrap1(a, neg_idx(a.idx)); }
    Elem inv(Elem a) const { return wrap1(a, inv_idx(a.idx)); }
    Elem pow(Elem a, std::int64_t e) const;
    Elem arith(ArithOp op, Elem a, Elem b) const;

    // x -> x^(p^m) and its n-th iterate x -> x^(p^(m n)).
    Elem frobenius(Elem a) const { return wrap1(a, frobenius_pow_idx(a.idx, 1)); }
    Elem frobenius_pow(Elem a, u64 n) const { return wrap1(a, frobenius_pow_idx(a.idx, n)); }

    bool is_square(Elem a) const { return is_square_idx(check1(a).idx); }
    bool is_cube(Elem a) const { return is_cube_idx(check1(a).idx); }

    Elem find_generator() const;  // least-index element of order q-1
    Elem find_nonsquare() const;  // least-index non-square; requires p odd
    std::vector<Elem> fixed_set(u64 n) const;  // {x : x^(p^(m n)) = x}

    // ---- index-level operations (hot paths; no context checks) ----

    u64 add_idx(u64 a, u64 b) const {
        switch (repr_) {
            case Repr::prime: return num::addmod(a, b, p_);
            case Repr::table: {
                if (a == 0) return b;
                if (b == 0) return a;
                u64 la = log_[a], lb = log_[b];
                u64 t = lb >= la ? lb - la : lb + ord_ - la;
                std::uint32_t z = zech_[t];
                if (z == kNoLog) return 0;
                u64 l = la + z;
                if (l >= ord_) l -= ord_;
                return exp_[l];
            }
            default: return add_poly(a, b);
        }
    }

    u64 neg_idx(u64 a) const {
        switch (repr_) {
            case Repr::prime: return a == 0 ? 0 : p_ - a;
            case Repr::table: {
                if (p_ == 2 || a == 0) return a;
                u64 l = log_[a] + half_ord_;
                if (l >= ord_) l -= ord_;
                return exp_[l];
            }
            default: return neg_poly(a);
        }
    }

    u64 sub_idx(u64 a, u64 b) const { return add_idx(a, neg_idx(b)); }

    u64 mul_idx(u64 a, u64 b) const {
        switch (repr_) {
            case Repr::prime: return num::mulmod(a, b, p_);
            case Repr::table: {
                if (a == 0 || b == 0) return 0;
                u64 l = u64(log_[a]) + log_[b];
                if (l >= ord_) l -= ord_;
                return exp_[l];
            }
            default: return mul_poly(a, b);
        }
    }

    u64 inv_idx(u64 a) const;

    // x^e with e already reduced mod (q-1); callers guarantee the original
    // exponent was positive, so 0^e = 0 and e == 0 means a multiple of q-1.
    u64 pow_reduced_idx(u64 x, u64 e_mod) const {
        if (x == 0) return 0;
        if (e_mod == 0) return 1 % q_;
        switch (repr_) {
            case Repr::prime: return num::powmod(x, e_mod, p_);
            case Repr::table: {
                u64 l = num::mulmod(log_[x], e_mod, ord_);
                return exp_[l];
            }
            default: return pow_poly(x, e_mod);
        }
    }

    u64 frobenius_pow_idx(u64 x, u64 n) const {
        if (repr_ == Repr::prime) return x;  // x^(p^e) = x on the prime field
        return pow_reduced_idx(x, frob_exponent(n));
    }

    // p^e mod (q-1): the reduced exponent of x -> x^(p^e) on nonzero x.
    u64 reduced_p_power(u128 e) const {
        if (ord_ <= 1) return 0;
        return num::powmod128(p_ % ord_, e, ord_);
    }
    // p^(m n) mod (q-1): the reduced exponent of the n-th Frobenius iterate.
    u64 frob_exponent(u64 n) const { return reduced_p_power(u128(static_cast<u64>(m_)) * n); }

    bool is_square_idx(u64 a) const {
        if (p_ == 2 || a == 0) return true;
        switch (repr_) {
            case Repr::prime: return num::powmod(a, half_ord_, p_) == 1;
            case Repr::table: return (log_[a] & 1) == 0;
            default: return pow_poly(a, half_ord_) == 1;
        }
    }

    bool is_cube_idx(u64 a) const {
        if (ord_ % 3 != 0 || a == 0) return true;
        if (repr_ == Repr::table) return log_[a] % 3 == 0;
        return pow_reduced_idx(a, ord_ / 3) == 1 % q_;
    }

    bool same_field(const Field& other) const { return p_ == other.p_ && k_ == other.k_; }

    struct Range {
        const Field* f;
        struct It {
            const Field* f;
            u64 i;
            Elem operator*() const { return {i, f}; }
            It& operator++() { ++i; return *this; }
            bool operator!=(const It& o) const { return i != o.i; }
        };
        It begin() const { return {f, 0}; }
        It end() const { return {f, f->q()}; }
    };
    Range all() const { return {this}; }

    Field(const Field&) = delete;
    Field& operator=(const Field&) = delete;

private:
    enum class Repr { prime, table, poly };

    friend std::shared_ptr<const Field> make_field(u64 p, int k, int m);
    Field(u64 p, int k, int m);

    Elem check1(Elem a) const;
    void check2(Elem a, Elem b) const;
    Elem wrap1(Elem a, u64 r) const { check1(a); return {r, this}; }
    Elem wrap2(Elem a, Elem b, u64 r) const { check2(a, b); return {r, this}; }

    u64 add_poly(u64 a, u64 b) const;
    u64 neg_poly(u64 a) const;
    u64 mul_poly(u64 a, u64 b) const;
    u64 pow_poly(u64 a, u64 e) const;

    void build_tables();

    u64 p_ = 0, q_ = 0;
    int k_ = 0, m_ = 0;
    u64 ord_ = 0;       // q - 1
    u64 half_ord_ = 0;  // (q - 1) / 2 for odd p, else 0
    Repr repr_ = Repr::prime;
    std::vector<std::int64_t> modulus_;
    std::vector<u64> p_pows_;  // p^0 .. p^k

    std::vector<std::uint32_t> exp_, log_, zech_;  // table repr only
    std::optional<u64> gen_idx_;                   // set eagerly for table repr

    mutable std::once_flag gen_once_;
    mutable u64 lazy_gen_ = 0;
};

// Builds GF(p^k) with automorphism x -> x^(p^m). Deterministic across runs.
std::shared_ptr<const Field> make_field(u64 p, int k, int m);

inline Elem Field::elem(u64 index) const {
    if (index >= q_) fail_pre("MixedContext", "element index " + std::to_string(index) + " out of range for q=" + std::to_string(q_));
    return {index, this};
}

inline Elem Field::check1(Elem a) const {
    if (a.fld == nullptr || !same_field(*a.fld) || a.idx >= q_)
        fail_pre("MixedContext", "element does not belong to this field");
    return a;
}

inline void Field::check2(Elem a, Elem b) const {
    check1(a);
    check1(b);
}

inline Elem operator+(Elem a, Elem b) { return a.field().add(a, b); }
inline Elem operator-(Elem a, Elem b) { return a.field().sub(a, b); }
inline Elem operator*(Elem a, Elem b) { return a.field().mul(a, b); }
inline Elem operator-(Elem a) { return a.field().neg(a); }

inline bool operator==(Elem a, Elem b) {
    return a.idx == b.idx && (a.fld == b.fld || (a.fld && b.fld && a.fld->same_field(*b.fld)));
}
inline bool operator!=(Elem a, Elem b) { return !(a == b); }

}  // namespace froblab
