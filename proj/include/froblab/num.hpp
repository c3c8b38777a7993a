#pragma once

// 64-bit modular arithmetic and integer factorization helpers.

#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

namespace froblab::num {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(u128(a) * b % m); }

inline u64 addmod(u64 a, u64 b, u64 m) {
    u64 s = a + b;  // a,b < m <= 2^63 so no overflow
    return s >= m ? s - m : s;
}

inline u64 powmod(u64 base, u64 exp, u64 m) {
    if (m == 1) return 0;
    u64 r = 1;
    base %= m;
    while (exp) {
        if (exp & 1) r = mulmod(r, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return r;
}

inline u64 powmod128(u64 base, u128 exp, u64 m) {
    if (m == 1) return 0;
    u64 r = 1;
    base %= m;
    while (exp) {
        if (exp & 1) r = mulmod(r, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return r;
}

// Deterministic Miller-Rabin, valid for all n < 2^64.
inline bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 0; i < s - 1; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) { composite = false; break; }
        }
        if (composite) return false;
    }
    return true;
}

namespace detail {

inline u64 pollard_rho(u64 n) {
    if ((n & 1) == 0) return 2;
    u64 c = 1;
    while (true) {
        u64 x = 2, y = 2, d = 1;
        while (d == 1) {
            x = addmod(mulmod(x, x, n), c, n);
            y = addmod(mulmod(y, y, n), c, n);
            y = addmod(mulmod(y, y, n), c, n);
            d = std::gcd(x > y ? x - y : y - x, n);
        }
        if (d != n) return d;
        ++c;
    }
}

inline void factor_into(u64 n, std::map<u64, int>& out) {
    if (n == 1) return;
    if (is_prime(n)) { ++out[n]; return; }
    for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull}) {
        if (n % p == 0) {
            ++out[p];
            factor_into(n / p, out);
            return;
        }
    }
    u64 d = pollard_rho(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

}  // namespace detail

// Prime factorization n = prod p^e as (p, e) pairs, p ascending.
inline std::map<u64, int> factorize(u64 n) {
    std::map<u64, int> out;
    detail::factor_into(n, out);
    return out;
}

// Draw a uniform value in [0, n) from a 64-bit generator, by rejection.
// (std::uniform_int_distribution is implementation-defined; this is not.)
template <class Rng>
u64 rand_below(Rng& rng, u64 n) {
    if (n <= 1) return 0;
    u64 limit = ~u64(0) - ~u64(0) % n;
    u64 v;
    do { v = rng(); } while (v >= limit);
    return v % n;
}

}  // namespace froblab::num
