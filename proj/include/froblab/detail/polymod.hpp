#pragma once

// Dense univariate polynomial arithmetic over F_p: fixed-degree arithmetic
// modulo a monic modulus (for field construction) and variable-degree
// remainder/gcd (for irreducibility tests and root counting).

#include <cstdint>
#include <utility>
#include <vector>

#include "froblab/num.hpp"

namespace froblab::detail {

using num::u128;
using num::u64;
using Digits = std::vector<u64>;  // little-endian coefficients mod p

inline Digits decode(u64 idx, int k, u64 p) {
    Digits d(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) {
        d[static_cast<size_t>(i)] = idx % p;
        idx /= p;
    }
    return d;
}

inline u64 encode(const Digits& d, const std::vector<u64>& p_pows) {
    u64 idx = 0;
    for (size_t i = 0; i < d.size(); ++i) idx += d[i] * p_pows[i];
    return idx;
}

// out = a*b mod (modulus, p); modulus is monic of degree k, length k+1.
inline void mul_mod(const Digits& a, const Digits& b, const std::vector<std::int64_t>& modulus, u64 p,
                    Digits& out, Digits& scratch) {
    int k = static_cast<int>(a.size());
    scratch.assign(static_cast<size_t>(2 * k - 1), 0);
    for (int i = 0; i < k; ++i) {
        u64 ai = a[static_cast<size_t>(i)];
        if (ai == 0) continue;
        for (int j = 0; j < k; ++j) {
            size_t t = static_cast<size_t>(i + j);
            scratch[t] = (scratch[t] + ai * b[static_cast<size_t>(j)]) % p;
        }
    }
    for (int i = 2 * k - 2; i >= k; --i) {
        u64 c = scratch[static_cast<size_t>(i)];
        if (c == 0) continue;
        scratch[static_cast<size_t>(i)] = 0;
        // x^k = -sum modulus[j] x^j
        for (int j = 0; j < k; ++j) {
            u64 mj = static_cast<u64>(modulus[static_cast<size_t>(j)]);
            if (mj == 0) continue;
            size_t t = static_cast<size_t>(i - k + j);
            scratch[t] = (scratch[t] + c * (p - mj)) % p;
        }
    }
    out.assign(scratch.begin(), scratch.begin() + k);
}

inline void pow_mod(Digits base, u128 e, const std::vector<std::int64_t>& modulus, u64 p, Digits& out) {
    int k = static_cast<int>(base.size());
    Digits result(static_cast<size_t>(k), 0), scratch;
    result[0] = 1 % p;
    while (e) {
        if (e & 1) mul_mod(result, base, modulus, p, result, scratch);
        mul_mod(base, base, modulus, p, base, scratch);
        e >>= 1;
    }
    out = std::move(result);
}

inline int degree(const Digits& a) {
    for (int i = static_cast<int>(a.size()) - 1; i >= 0; --i)
        if (a[static_cast<size_t>(i)] != 0) return i;
    return -1;
}

// a mod b, in place on a; b nonzero.
inline void rem_inplace(Digits& a, const Digits& b, u64 p) {
    int db = degree(b);
    u64 lead_inv = num::powmod(b[static_cast<size_t>(db)], p - 2, p);
    int da = degree(a);
    while (da >= db) {
        u64 c = num::mulmod(a[static_cast<size_t>(da)], lead_inv, p);
        if (c != 0) {
            for (int j = 0; j <= db; ++j) {
                size_t t = static_cast<size_t>(da - db + j);
                a[t] = (a[t] + (p - num::mulmod(c, b[static_cast<size_t>(j)], p))) % p;
            }
        }
        --da;
        while (da >= 0 && a[static_cast<size_t>(da)] == 0) --da;
    }
}

inline int gcd_degree(Digits a, Digits b, u64 p) {
    while (degree(b) >= 0) {
        rem_inplace(a, b, p);
        std::swap(a, b);
    }
    return degree(a);
}

// Irreducibility of monic f of degree k over F_p: no factor of degree
// <= k/2 iff gcd(f, x^(p^i) - x) = 1 for all 1 <= i <= k/2.
inline bool is_irreducible(const std::vector<std::int64_t>& f, int k, u64 p) {
    Digits h(static_cast<size_t>(k), 0);
    if (k >= 2) h[1] = 1;  // h = x
    for (int i = 1; i <= k / 2; ++i) {
        pow_mod(h, p, f, p, h);  // h = x^(p^i) mod f
        Digits g = h;
        g[1] = (g[1] + p - 1) % p;  // h - x
        if (degree(g) < 0) return false;  // f divides x^(p^i) - x
        Digits fd(f.size());
        for (size_t j = 0; j < f.size(); ++j) fd[j] = static_cast<u64>(f[j]);
        if (gcd_degree(fd, g, p) > 0) return false;
    }
    return true;
}

// x^e mod g for variable-degree monic-or-not g over F_p (g nonconstant),
// by repeated squaring of variable-degree polynomials.
inline Digits x_power_mod(u128 e, const Digits& g, u64 p) {
    int dg = degree(g);
    auto mul_rem = [&](const Digits& a, const Digits& b) {
        Digits c(a.size() + b.size() - 1, 0);
        for (size_t i = 0; i < a.size(); ++i) {
            if (a[i] == 0) continue;
            for (size_t j = 0; j < b.size(); ++j)
                c[i + j] = (c[i + j] + num::mulmod(a[i], b[j], p)) % p;
        }
        rem_inplace(c, g, p);
        c.resize(static_cast<size_t>(dg > 0 ? dg : 1), 0);
        return c;
    };
    Digits result(static_cast<size_t>(dg > 0 ? dg : 1), 0);
    result[0] = 1 % p;
    Digits base(static_cast<size_t>(dg > 1 ? dg : 2), 0);
    base[1] = 1;  // x
    rem_inplace(base, g, p);
    base.resize(static_cast<size_t>(dg > 0 ? dg : 1), 0);
    while (e) {
        if (e & 1) result = mul_rem(result, base);
        base = mul_rem(base, base);
        e >>= 1;
    }
    return result;
}

}  // namespace froblab::detail
