#pragma once

// Test-only reference computations, written independently of the library algorithms.

#include "kmcoh/chevalley.hpp"

#include <functional>
#include <map>
#include <vector>

namespace oracle {

using namespace kmcoh;

// Coefficient table [energy][p] of prod over generators g of (1 + s q^g) / (1 - q^g), by explicit
// enumeration of (multiset, set) pairs of generator energies.
inline std::vector<std::vector<long>> hilbert_bruteforce(const std::vector<int>& gens, int max_energy, int max_p) {
    std::vector<std::vector<long>> t(static_cast<std::size_t>(max_energy + 1), std::vector<long>(static_cast<std::size_t>(max_p + 1), 0));
    // even part: multisets of generator indices
    std::vector<long> even(static_cast<std::size_t>(max_energy + 1), 0);
    std::function<void(std::size_t, int)> ms = [&](std::size_t i, int e) {
        ++even[e];
        for (std::size_t j = i; j < gens.size(); ++j)
            if (e + gens[j] <= max_energy) ms(j, e + gens[j]);
    };
    ms(0, 0);
    std::function<void(std::size_t, int, int)> ss = [&](std::size_t i, int e, int p) {
        for (int e2 = 0; e + e2 <= max_energy; ++e2) t[e + e2][p] += even[e2];
        if (p == max_p) return;
        for (std::size_t j = i; j < gens.size(); ++j)
            if (e + gens[j] <= max_energy) ss(j + 1, e + gens[j], p + 1);
    };
    ss(0, 0, 0);
    return t;
}

// Generator energies n + d_i + 1 for n >= nmin (as many as fit below max_energy).
inline std::vector<int> generator_energies(const std::vector<int>& exps, int nmin, int max_energy) {
    std::vector<int> g;
    for (int d : exps)
        for (int n = nmin; n + d + 1 <= max_energy; ++n)
            if (n + d + 1 > 0) g.push_back(n + d + 1);
    return g;
}

// Differential via the multilinear Cartan formula on cochains viewed as alternating maps.
template <class C>
SparseMatrix<C> cartan_formula_matrix(ChevalleyComplex<C>& X, int p, int E, const RootWeight& w) {
    const auto& src = X.cochain_basis(p, E, w);
    const auto& dst = X.cochain_basis(p + 1, E, w);
    const auto& L = X.algebra();
    std::map<CochainKey, int> sidx;
    for (std::size_t i = 0; i < src.size(); ++i) sidx[src[i]] = static_cast<int>(i);
    SparseMatrix<C> D(static_cast<int>(dst.size()), static_cast<int>(src.size()));
    auto sort_sign = [](std::vector<int> v) {
        int s = 1;
        for (std::size_t i = 0; i < v.size(); ++i)
            for (std::size_t j = i + 1; j < v.size(); ++j)
                if (v[i] > v[j]) s = -s;
        return s;
    };
    for (std::size_t r = 0; r < dst.size(); ++r) {
        const auto& [beta, mprime] = dst[r];
        int k = static_cast<int>(beta.size());
        // sum_i (-1)^i x_i . omega(x_0..^i..x_p)
        for (int i = 0; i < k; ++i) {
            ExtMono rest;
            for (int j = 0; j < k; ++j)
                if (j != i) rest.push_back(beta[j]);
            for (std::size_t c = 0; c < src.size(); ++c) {
                if (src[c].first != rest) continue;
                auto v = X.module().act(mode_index(beta[i]), mode_level(beta[i]), Element<C>{{src[c].second, C(1)}});
                auto it = v.find(mprime);
                if (it != v.end()) D.add(static_cast<int>(r), static_cast<int>(c), C(it->second * C(Rational(i % 2 ? -1 : 1))));
            }
        }
        // sum_{i<j} (-1)^{i+j} omega([x_i, x_j], rest)
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j) {
                ExtMono rest;
                for (int l = 0; l < k; ++l)
                    if (l != i && l != j) rest.push_back(beta[l]);
                int n = mode_level(beta[i]) + mode_level(beta[j]);
                for (auto& [c, mu] : L.bracket[mode_index(beta[i])][mode_index(beta[j])]) {
                    int y = mode_code(c, n);
                    if (!X.is_direction(c, n)) continue;
                    if (std::find(rest.begin(), rest.end(), y) != rest.end()) continue;
                    std::vector<int> args{y};
                    args.insert(args.end(), rest.begin(), rest.end());
                    int s = sort_sign(args);
                    std::sort(args.begin(), args.end());
                    auto it = sidx.find(CochainKey{args, mprime});
                    if (it == sidx.end()) continue;
                    D.add(static_cast<int>(r), it->second, C(Rational(((i + j) % 2 ? -1 : 1) * s) * mu));
                }
            }
    }
    return D;
}

}  // namespace oracle
