#pragma once

#include "kmcoh/exact_linalg.hpp"
#include "kmcoh/loop_rep.hpp"

#include <json.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <type_traits>
#include <utility>
#include <vector>

namespace kmcoh {

// (g[[t]], g), (b~, h) and the absolute g[[t]] complex.
enum class PairKind { VacuumRelative, VermaRelative, Absolute };

inline std::string to_string(PairKind p) {
    switch (p) {
        case PairKind::VacuumRelative:
            return "(g[[t]],g)";
        case PairKind::VermaRelative:
            return "(b~,h)";
        case PairKind::Absolute:
            return "g[[t]]";
    }
    return "?";
}

// Direction psi*(a, n), n >= 0, dual to J^a_n; same packing as modes.
using ExtMono = std::vector<int>;  // strictly increasing direction codes
using CochainKey = std::pair<ExtMono, Monomial>;

template <class C>
using Cochain = std::map<CochainKey, C>;

template <class C>
inline void cochain_add(Cochain<C>& acc, const CochainKey& k, const C& c) {
    if (is_zero(c)) return;
    auto it = acc.find(k);
    if (it == acc.end()) {
        acc.emplace(k, c);
        return;
    }
    it->second += c;
    if (is_zero(it->second)) acc.erase(it);
}

// psi*(d) wedge alpha: new monomial and sign, or nullopt if d already present.
inline std::optional<std::pair<ExtMono, int>> ext_wedge(int d, const ExtMono& alpha) {
    auto it = std::lower_bound(alpha.begin(), alpha.end(), d);
    if (it != alpha.end() && *it == d) return std::nullopt;
    long pos = it - alpha.begin();
    ExtMono r;
    r.reserve(alpha.size() + 1);
    r.insert(r.end(), alpha.begin(), it);
    r.push_back(d);
    r.insert(r.end(), it, alpha.end());
    return std::make_pair(std::move(r), pos % 2 ? -1 : 1);
}

// psi(d) contracted into alpha.
inline std::optional<std::pair<ExtMono, int>> ext_contract(int d, const ExtMono& alpha) {
    auto it = std::lower_bound(alpha.begin(), alpha.end(), d);
    if (it == alpha.end() || *it != d) return std::nullopt;
    long pos = it - alpha.begin();
    ExtMono r;
    r.reserve(alpha.size() - 1);
    r.insert(r.end(), alpha.begin(), it);
    r.insert(r.end(), it + 1, alpha.end());
    return std::make_pair(std::move(r), pos % 2 ? -1 : 1);
}

struct CohomologyReport {
    PairKind pair = PairKind::VacuumRelative;
    int p = 0, energy = 0;
    RootWeight weight;
    int cochain_dim = 0;  // dimension of the (invariant) cochain space
    int rank_in = 0, rank_out = 0;
    int dim = 0;
    std::vector<SparseVecQ> representatives;  // coordinates in the full slice basis
};

template <class C>
class ChevalleyComplex {
public:
    ChevalleyComplex(LoopModule<C>& M, PairKind pair) : M_(M), L_(M.algebra()), pair_(pair) {
        if (pair == PairKind::VermaRelative && M.kind() != ModuleKind::Verma)
            throw std::invalid_argument("(b~,h) complex needs a Verma module");
        if (pair != PairKind::VermaRelative && M.kind() != ModuleKind::Vacuum)
            throw std::invalid_argument("g[[t]] complexes need the vacuum module");
    }

    PairKind pair() const { return pair_; }
    LoopModule<C>& module() { return M_; }
    const SimpleLieAlgebra& algebra() const { return L_; }

    bool is_direction(int a, int n) const {
        switch (pair_) {
            case PairKind::VacuumRelative:
                return n >= 1;
            case PairKind::Absolute:
                return n >= 0;
            case PairKind::VermaRelative:
                return n >= 1 || (n == 0 && L_.kind[a] == RootKind::Positive);
        }
        return false;
    }
    bool has_reductive_invariants() const { return pair_ == PairKind::VacuumRelative; }

    std::vector<int> directions(int max_energy) const {
        std::vector<int> ds;
        for (int n = 0; n <= max_energy; ++n)
            for (int a = 0; a < L_.dim; ++a)
                if (is_direction(a, n)) ds.push_back(mode_code(a, n));
        return ds;
    }

    RootWeight ext_weight(const ExtMono& alpha) const {
        RootWeight w(static_cast<std::size_t>(L_.rank), 0);
        for (int d : alpha)
            for (int k = 0; k < L_.rank; ++k) w[k] -= L_.root[mode_index(d)][k];
        return w;
    }
    int ext_energy(const ExtMono& alpha) const {
        int e = 0;
        for (int d : alpha) e += mode_level(d);
        return e;
    }
    int energy(const CochainKey& k) const { return ext_energy(k.first) + M_.energy(k.second); }
    RootWeight weight(const CochainKey& k) const {
        RootWeight w = ext_weight(k.first), m = M_.weight(k.second);
        for (int i = 0; i < L_.rank; ++i) w[i] += m[i];
        return w;
    }

    // Full slice basis (before taking reductive invariants), deterministic order.
    const std::vector<CochainKey>& cochain_basis(int p, int E, const RootWeight& w) {
        auto key = std::make_tuple(p, E, w);
        auto it = basis_.find(key);
        if (it != basis_.end()) return it->second;
        std::vector<CochainKey> out;
        if (p >= 0 && E >= 0) {
            auto ds = directions(E);
            ExtMono cur;
            std::function<void(std::size_t, int)> rec = [&](std::size_t i, int e) {
                if (static_cast<int>(cur.size()) == p) {
                    RootWeight need = w, ew = ext_weight(cur);
                    for (int k = 0; k < L_.rank; ++k) need[k] -= ew[k];
                    for (auto& m : module_basis(E - e, need)) out.emplace_back(cur, m);
                    return;
                }
                for (std::size_t j = i; j < ds.size(); ++j) {
                    int de = mode_level(ds[j]);
                    if (e + de > E) break;
                    cur.push_back(ds[j]);
                    rec(j + 1, e + de);
                    cur.pop_back();
                }
            };
            rec(0, 0);
        }
        std::sort(out.begin(), out.end());
        return basis_.emplace(key, std::move(out)).first->second;
    }

    // d = sum psi*(a,n) J^a_n - 1/2 sum mu^{ab}_c psi*(a,i) psi*(b,j) psi(c,i+j)
    Cochain<C> d(const CochainKey& k) {
        Cochain<C> out;
        const auto& [alpha, m] = k;
        int em = M_.energy(m);
        int E = ext_energy(alpha) + em;
        for (int dcode : directions(E)) {
            int a = mode_index(dcode), n = mode_level(dcode);
            if (n > em) continue;  // annihilates by energy
            auto w = ext_wedge(dcode, alpha);
            if (!w) continue;
            const auto& v = M_.apply(mode_code(a, n), m);
            for (auto& [mm, c] : v) cochain_add(out, CochainKey{w->first, mm}, C(c * C(Rational(w->second))));
        }
        for (int d3 : alpha) {
            auto c3 = ext_contract(d3, alpha);
            int c = mode_index(d3), n3 = mode_level(d3);
            for (int n1 = 0; n1 <= n3; ++n1) {
                int n2 = n3 - n1;
                for (int a1 = 0; a1 < L_.dim; ++a1) {
                    if (!is_direction(a1, n1)) continue;
                    int d1 = mode_code(a1, n1);
                    for (int a2 = 0; a2 < L_.dim; ++a2) {
                        int d2 = mode_code(a2, n2);
                        if (d2 <= d1 || !is_direction(a2, n2)) continue;
                        Rational mu = L_.mu(a1, a2, c);
                        if (is_zero(mu)) continue;
                        auto w2 = ext_wedge(d2, c3->first);
                        if (!w2) continue;
                        auto w1 = ext_wedge(d1, w2->first);
                        if (!w1) continue;
                        int s = c3->second * w2->second * w1->second;
                        cochain_add(out, CochainKey{w1->first, m}, C(Rational(-s) * mu));
                    }
                }
            }
        }
        return out;
    }

    Cochain<C> d(const Cochain<C>& x) {
        Cochain<C> out;
        for (auto& [k, c] : x)
            for (auto& [kk, cc] : d(k)) cochain_add(out, kk, C(cc * c));
        return out;
    }

    // J^x_0 acting on a cochain: module action plus coadjoint action on psi*.
    Cochain<C> reductive_action(int x, const CochainKey& k) {
        Cochain<C> out;
        const auto& [alpha, m] = k;
        for (auto& [mm, c] : M_.apply(mode_code(x, 0), m)) cochain_add(out, CochainKey{alpha, mm}, c);
        // J^x psi*(a,n) = - sum_b mu^{x b}_a psi*(b,n)
        for (std::size_t i = 0; i < alpha.size(); ++i) {
            int a = mode_index(alpha[i]), n = mode_level(alpha[i]);
            for (int b = 0; b < L_.dim; ++b) {
                Rational mu = L_.mu(x, b, a);
                if (is_zero(mu)) continue;
                // replace slot i; even derivation, so reinsert with sorting sign
                ExtMono rest = alpha;
                rest.erase(rest.begin() + static_cast<long>(i));
                int sign_out = (i % 2) ? -1 : 1;  // move slot i to the front
                auto w = ext_wedge(mode_code(b, n), rest);
                if (!w) continue;
                cochain_add(out, CochainKey{w->first, m}, C(Rational(-mu * sign_out * w->second)));
            }
        }
        return out;
    }

    // Matrix of d from slice (p, E, w) to (p+1, E, w).
    SparseMatrix<C> differential_matrix(int p, int E, const RootWeight& w) {
        const auto& src = cochain_basis(p, E, w);
        const auto& dst = cochain_basis(p + 1, E, w);
        auto idx = index_of(dst);
        SparseMatrix<C> D(static_cast<int>(dst.size()), static_cast<int>(src.size()));
        for (std::size_t j = 0; j < src.size(); ++j)
            for (auto& [k, c] : d(src[j])) {
                auto it = idx.find(k);
                if (it == idx.end()) throw std::logic_error("differential left its slice");
                D.add(it->second, static_cast<int>(j), c);
            }
        return D;
    }

    // Columns span the reductive invariants of the slice (identity when there are none to take).
    const SparseMatrixQ& invariant_basis(int p, int E, const RootWeight& w) {
        auto key = std::make_tuple(p, E, w);
        auto it = inv_.find(key);
        if (it != inv_.end()) return it->second;
        const auto& src = cochain_basis(p, E, w);
        int n = static_cast<int>(src.size());
        SparseMatrixQ B;
        bool zero_weight = std::all_of(w.begin(), w.end(), [](int x) { return x == 0; });
        if (!has_reductive_invariants()) {
            B = SparseMatrixQ(n, n);
            for (int i = 0; i < n; ++i) B.add(i, i, Rational(1));
        } else if (!zero_weight) {
            B = SparseMatrixQ(n, 0);
        } else {
            std::map<CochainKey, int> rows;
            std::vector<std::vector<std::pair<int, Rational>>> cols(static_cast<std::size_t>(n));
            std::vector<int> gens;
            for (int i = 0; i < L_.rank; ++i) {
                gens.push_back(L_.e[i]);
                gens.push_back(L_.f[i]);
            }
            for (std::size_t gi = 0; gi < gens.size(); ++gi)
                for (int j = 0; j < n; ++j)
                    for (auto& [k, c] : reductive_action(gens[gi], src[j])) {
                        auto rk = CochainKey{k.first, k.second};
                        rk.first.insert(rk.first.begin(), -1 - static_cast<int>(gi));  // tag by generator
                        auto [rit, ins] = rows.emplace(rk, static_cast<int>(rows.size()));
                        cols[j].emplace_back(rit->second, to_rational(c));
                    }
            SparseMatrixQ A(static_cast<int>(rows.size()), n);
            for (int j = 0; j < n; ++j)
                for (auto& [r, x] : cols[j]) A.add(r, j, x);
            auto ker = kernel_basis(A);
            B = SparseMatrixQ(n, static_cast<int>(ker.size()));
            for (std::size_t c = 0; c < ker.size(); ++c) B.set_column(static_cast<int>(c), ker[c]);
        }
        return inv_.emplace(key, std::move(B)).first->second;
    }

    static Rational to_rational(const C& c) {
        if constexpr (std::is_same_v<C, Rational>) {
            return c;
        } else {
            if (c.degree() > 0) throw std::logic_error("coefficient depends on the level");
            return c.coeff(0);
        }
    }

    static std::map<CochainKey, int> index_of(const std::vector<CochainKey>& b) {
        std::map<CochainKey, int> idx;
        for (std::size_t i = 0; i < b.size(); ++i) idx.emplace(b[i], static_cast<int>(i));
        return idx;
    }

    Cochain<C> to_cochain(int p, int E, const RootWeight& w, const SparseVecQ& v) {
        const auto& b = cochain_basis(p, E, w);
        Cochain<C> out;
        for (auto& [i, x] : v) cochain_add(out, b.at(static_cast<std::size_t>(i)), C(x));
        return out;
    }
    SparseVec<C> to_vector(int p, int E, const RootWeight& w, const Cochain<C>& x) {
        auto idx = index_of(cochain_basis(p, E, w));
        SparseVec<C> v;
        for (auto& [k, c] : x) {
            auto it = idx.find(k);
            if (it == idx.end()) throw std::invalid_argument("cochain outside the slice");
            sv_add(v, it->second, c);
        }
        return v;
    }

private:
    const std::vector<Monomial>& module_basis(int E, const RootWeight& w) {
        auto key = std::make_pair(E, w);
        auto it = mbasis_.find(key);
        if (it != mbasis_.end()) return it->second;
        return mbasis_.emplace(key, M_.graded_basis(E, w)).first->second;
    }

    LoopModule<C>& M_;
    SimpleLieAlgebra L_;
    PairKind pair_;
    std::map<std::tuple<int, int, RootWeight>, std::vector<CochainKey>> basis_;
    std::map<std::tuple<int, int, RootWeight>, SparseMatrixQ> inv_;
    std::map<std::pair<int, RootWeight>, std::vector<Monomial>> mbasis_;
};

inline SparseMatrixQ to_rational_matrix(const SparseMatrixQ& m) { return m; }
inline SparseMatrixQ to_rational_matrix(const SparseMatrixP& m) {
    if (max_degree(m) > 0) throw std::logic_error("matrix depends on the level");
    return coefficient(m, 0);
}

// H^p of a slice: dim = dim C^p - rank(D_p B_p) - rank(D_{p-1} B_{p-1}).
inline CohomologyReport cohomology(ChevalleyComplex<Rational>& X, int p, int E, const RootWeight& w,
                                   bool with_representatives = false) {
    CohomologyReport r;
    r.pair = X.pair();
    r.p = p;
    r.energy = E;
    r.weight = w;
    const SparseMatrixQ& B = X.invariant_basis(p, E, w);
    r.cochain_dim = B.cols();
    if (r.cochain_dim == 0) return r;
    SparseMatrixQ out = X.differential_matrix(p, E, w) * B;
    r.rank_out = rank(out);
    SparseMatrixQ in;
    if (p > 0) {
        in = X.differential_matrix(p - 1, E, w) * X.invariant_basis(p - 1, E, w);
        r.rank_in = rank(in);
    }
    r.dim = r.cochain_dim - r.rank_out - r.rank_in;
    if (with_representatives && r.dim > 0) {
        Eliminator e(B.rows(), false);
        if (p > 0)
            for (int c = 0; c < in.cols(); ++c) e.add(in.column(c));
        for (auto& z : kernel_basis(out)) {
            SparseVecQ full = B.apply(z);
            if (e.add(full)) r.representatives.push_back(full);
        }
        if (static_cast<int>(r.representatives.size()) != r.dim)
            throw std::logic_error("cohomology representatives disagree with rank count");
    }
    return r;
}

inline nlohmann::json to_json(const CohomologyReport& r) {
    return {{"pair", to_string(r.pair)}, {"p", r.p},          {"energy", r.energy},
            {"weight", r.weight},        {"cochains", r.cochain_dim}, {"dim", r.dim}};
}

}  // namespace kmcoh
