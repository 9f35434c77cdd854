#pragma once

#include "kmcoh/cartan_core.hpp"
#include "kmcoh/rational.hpp"

#include <json.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kmcoh {

// Mode J^a_n packed as n * kModeStride + a; integer order is lexicographic in (n, a).
constexpr int kModeStride = 32;

inline int mode_code(int a, int n) { return n * kModeStride + a; }
inline int mode_index(int code) { return ((code % kModeStride) + kModeStride) % kModeStride; }
inline int mode_level(int code) { return (code - mode_index(code)) / kModeStride; }

// Sorted (non-decreasing) mode codes applied to the highest vector, leftmost first.
using Monomial = std::vector<int>;

template <class C>
using Element = std::map<Monomial, C>;

template <class C>
inline void elem_add(Element<C>& acc, const Monomial& m, const C& c) {
    if (is_zero(c)) return;
    auto it = acc.find(m);
    if (it == acc.end()) {
        acc.emplace(m, c);
        return;
    }
    it->second += c;
    if (is_zero(it->second)) acc.erase(it);
}

template <class C>
inline void elem_add(Element<C>& acc, const Element<C>& e, const C& s) {
    for (auto& [m, c] : e) elem_add(acc, m, C(c * s));
}

enum class ModuleKind { Vacuum, Verma };
enum class Flavor { Quantum, Classical };

using RootWeight = std::vector<int>;

inline std::string to_string(ModuleKind k) { return k == ModuleKind::Vacuum ? "vacuum" : "verma"; }
inline std::string to_string(Flavor f) { return f == Flavor::Quantum ? "quantum" : "classical"; }

// Vacuum or Verma module over the loop algebra.
// Quantum: PBW basis of U(g((t))) / (annihilators), with [A_n, B_m] = [A,B]_{n+m} + n kappa(A,B) delta_{n+m,0}.
// Classical: Sym(g((t)) / annihilators); creation modes multiply, annihilators act by derivation,
// plus the term n kappa(A,B) delta_{n+m,0} removing the partner mode (kappa = 0 is the plain classical limit).
template <class C>
class LoopModule {
public:
    LoopModule(SimpleLieAlgebra L, ModuleKind kind, Flavor flavor, BilinearForm<C> kappa, std::vector<C> lambda = {})
        : L_(std::move(L)), kind_(kind), flavor_(flavor), kappa_(std::move(kappa)) {
        lambda_.assign(static_cast<std::size_t>(L_.dim), C(0));
        if (!lambda.empty()) {
            if (static_cast<int>(lambda.size()) != L_.rank) throw std::invalid_argument("highest weight has wrong length");
            if (kind_ != ModuleKind::Verma) throw std::invalid_argument("highest weight given for a vacuum module");
            for (int i = 0; i < L_.rank; ++i) lambda_[L_.h[i]] = lambda[i];
        }
    }

    const SimpleLieAlgebra& algebra() const { return L_; }
    ModuleKind kind() const { return kind_; }
    Flavor flavor() const { return flavor_; }
    const BilinearForm<C>& kappa() const { return kappa_; }

    bool is_creation(int a, int n) const {
        if (n <= -1) return true;
        return kind_ == ModuleKind::Verma && n == 0 && L_.kind[a] == RootKind::Negative;
    }
    bool is_creation(int code) const { return is_creation(mode_index(code), mode_level(code)); }

    int energy(const Monomial& m) const {
        int e = 0;
        for (int c : m) e -= mode_level(c);
        return e;
    }
    RootWeight weight(const Monomial& m) const {
        RootWeight w(static_cast<std::size_t>(L_.rank), 0);
        for (int c : m)
            for (int k = 0; k < L_.rank; ++k) w[k] += L_.root[mode_index(c)][k];
        return w;
    }

    // PBW monomials of the given energy (and root weight relative to the highest vector).
    std::vector<Monomial> graded_basis(int energy, std::optional<RootWeight> wt = std::nullopt) const {
        if (energy < 0) return {};
        if (kind_ == ModuleKind::Verma && !wt) throw std::invalid_argument("Verma slices need a weight");
        std::vector<int> modes;
        for (int n = -energy; n <= -1; ++n)
            for (int a = 0; a < L_.dim; ++a) modes.push_back(mode_code(a, n));
        std::vector<Monomial> out;
        Monomial cur;
        std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
            if (left == 0) {
                if (kind_ == ModuleKind::Vacuum) {
                    if (!wt || weight(cur) == *wt) out.push_back(cur);
                } else {
                    append_f0(cur, *wt, out);
                }
                return;
            }
            for (std::size_t j = i; j < modes.size(); ++j) {
                int e = -mode_level(modes[j]);
                if (e > left) continue;
                cur.push_back(modes[j]);
                rec(j, left - e);
                cur.pop_back();
            }
        };
        rec(0, energy);
        std::sort(out.begin(), out.end());
        return out;
    }

    // J^a_n applied to a PBW monomial, memoized.
    const Element<C>& apply(int code, const Monomial& m) {
        auto key = std::make_pair(code, m);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        Element<C> r = flavor_ == Flavor::Quantum ? apply_quantum(code, m) : apply_classical(code, m);
        return memo_.emplace(std::move(key), std::move(r)).first->second;
    }

    Element<C> act(int a, int n, const Element<C>& v) {
        Element<C> out;
        int code = mode_code(a, n);
        for (auto& [m, c] : v) elem_add(out, apply(code, m), c);
        return out;
    }

    // Product of modes (leftmost applied last) on the highest vector.
    Element<C> word(const std::vector<int>& codes) {
        Element<C> v{{Monomial{}, C(1)}};
        for (auto it = codes.rbegin(); it != codes.rend(); ++it) v = act(mode_index(*it), mode_level(*it), v);
        return v;
    }

    void clear_cache() { memo_.clear(); }
    std::size_t cache_size() const { return memo_.size(); }

private:
    void append_f0(const Monomial& base, const RootWeight& target, std::vector<Monomial>& out) const {
        RootWeight w = weight(base);
        RootWeight need(static_cast<std::size_t>(L_.rank));
        for (int k = 0; k < L_.rank; ++k) {
            need[k] = w[k] - target[k];  // to be supplied by negative roots at level 0
            if (need[k] < 0) return;
        }
        std::vector<int> negs;
        for (int a = 0; a < L_.dim; ++a)
            if (L_.kind[a] == RootKind::Negative) negs.push_back(a);
        std::sort(negs.begin(), negs.end());
        Monomial cur = base;
        std::function<void(std::size_t)> rec = [&](std::size_t i) {
            bool done = std::all_of(need.begin(), need.end(), [](int x) { return x == 0; });
            if (done) {
                out.push_back(cur);
                return;
            }
            for (std::size_t j = i; j < negs.size(); ++j) {
                const auto& r = L_.root[negs[j]];
                bool ok = true;
                for (int k = 0; k < L_.rank; ++k)
                    if (need[k] + r[k] < 0) ok = false;
                if (!ok) continue;
                for (int k = 0; k < L_.rank; ++k) need[k] += r[k];
                cur.push_back(mode_code(negs[j], 0));
                rec(j);
                cur.pop_back();
                for (int k = 0; k < L_.rank; ++k) need[k] -= r[k];
            }
        };
        rec(0);
    }

    Element<C> apply_quantum(int x, const Monomial& m) {
        int xa = mode_index(x), xn = mode_level(x);
        Element<C> r;
        if (m.empty()) {
            if (is_creation(xa, xn))
                r.emplace(Monomial{x}, C(1));
            else if (xn == 0 && kind_ == ModuleKind::Verma)
                elem_add(r, Monomial{}, lambda_[xa]);
            return r;
        }
        int b = m.front();
        if (is_creation(xa, xn) && x <= b) {
            Monomial mm;
            mm.reserve(m.size() + 1);
            mm.push_back(x);
            mm.insert(mm.end(), m.begin(), m.end());
            r.emplace(std::move(mm), C(1));
            return r;
        }
        Monomial rest(m.begin() + 1, m.end());
        // x b rest = b (x rest) + [x, b] rest
        Element<C> inner = apply(x, rest);
        for (auto& [mono, c] : inner) elem_add(r, apply(b, mono), c);
        int ba = mode_index(b), bn = mode_level(b);
        for (auto& [c, mu] : L_.bracket[xa][ba]) elem_add(r, apply(mode_code(c, xn + bn), rest), C(mu));
        if (xn + bn == 0 && xn != 0) elem_add(r, rest, C(C(xn) * kappa_(xa, ba)));
        return r;
    }

    Element<C> apply_classical(int x, const Monomial& m) {
        int xa = mode_index(x), xn = mode_level(x);
        Element<C> r;
        if (is_creation(xa, xn)) {
            Monomial mm = m;
            mm.insert(std::upper_bound(mm.begin(), mm.end(), x), x);
            r.emplace(std::move(mm), C(1));
            return r;
        }
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (i > 0 && m[i] == m[i - 1]) continue;  // handled with multiplicity below
            std::size_t mult = static_cast<std::size_t>(std::count(m.begin(), m.end(), m[i]));
            int ba = mode_index(m[i]), bn = mode_level(m[i]);
            Monomial rest = m;
            rest.erase(rest.begin() + static_cast<long>(i));
            for (auto& [c, mu] : L_.bracket[xa][ba]) {
                if (!is_creation(c, xn + bn)) continue;
                int y = mode_code(c, xn + bn);
                Monomial mm = rest;
                mm.insert(std::upper_bound(mm.begin(), mm.end(), y), y);
                elem_add(r, mm, C(Rational(mu * Rational(static_cast<long>(mult)))));
            }
            if (xn + bn == 0 && xn != 0)
                elem_add(r, rest, C(C(Rational(static_cast<long>(mult) * xn)) * kappa_(xa, ba)));
        }
        return r;
    }

    SimpleLieAlgebra L_;
    ModuleKind kind_;
    Flavor flavor_;
    BilinearForm<C> kappa_;
    std::vector<C> lambda_;
    std::map<std::pair<int, Monomial>, Element<C>> memo_;
};

// Top PBW-length component.
template <class C>
inline Element<C> pbw_symbol(const Element<C>& v) {
    std::size_t top = 0;
    for (auto& [m, c] : v) top = std::max(top, m.size());
    Element<C> out;
    for (auto& [m, c] : v)
        if (m.size() == top) out.emplace(m, c);
    return out;
}

// t^n coefficient of P(J(t)) with J^a(t) = sum_m J^a_{-m-1} t^m; m >= 0 (vacuum) or m >= -1 (Verma,
// keeping only creation modes). Energy is n + deg P.
inline Element<Rational> classical_invariant(const SimpleLieAlgebra& L, const CoordPolynomial& P, int n, ModuleKind kind) {
    int mmin = kind == ModuleKind::Vacuum ? 0 : -1;
    Element<Rational> out;
    for (auto& [vars, c] : P) {
        int k = static_cast<int>(vars.size());
        std::vector<int> ms(static_cast<std::size_t>(k));
        std::function<void(int, int)> rec = [&](int i, int left) {
            if (i == k - 1) {
                if (left < mmin) return;
                ms[i] = left;
                Monomial mono;
                for (int j = 0; j < k; ++j) {
                    int lvl = -ms[j] - 1;
                    if (lvl == 0 && L.kind[vars[j]] != RootKind::Negative) return;
                    mono.push_back(mode_code(vars[j], lvl));
                }
                std::sort(mono.begin(), mono.end());
                elem_add(out, mono, c);
                return;
            }
            for (int m = mmin; left - m >= mmin * (k - 1 - i); ++m) {
                ms[i] = m;
                rec(i + 1, left - m);
            }
        };
        if (k == 0) continue;
        rec(0, n);
    }
    return out;
}

inline nlohmann::json monomial_to_json(const Monomial& m) {
    nlohmann::json j = nlohmann::json::array();
    for (int c : m) j.push_back({mode_index(c), mode_level(c)});
    return j;
}

inline nlohmann::json basis_to_json(const std::vector<Monomial>& basis) {
    nlohmann::json j = nlohmann::json::array();
    for (auto& m : basis) j.push_back(monomial_to_json(m));
    return j;
}

}  // namespace kmcoh
