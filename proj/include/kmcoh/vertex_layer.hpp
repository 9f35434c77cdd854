#pragma once

#include "kmcoh/chevalley.hpp"
#include "kmcoh/loop_rep.hpp"

#include <climits>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace kmcoh {

struct WindowOverflow : std::runtime_error {
    explicit WindowOverflow(int e) : std::runtime_error("vertex operation left the energy window at energy " + std::to_string(e)) {}
};

// States of C(g[[t]], V) are cochains u (x) alpha; psi*(a, m) here is the generator the
// state-labeling writes with index -m, so T psi*(a, m) = (m + 1) psi*(a, m + 1).
using State = Cochain<Rational>;

inline State state_of(const CochainKey& k, const Rational& c = 1) { return State{{k, c}}; }

inline void state_add(State& acc, const State& x, const Rational& s) {
    for (auto& [k, c] : x) cochain_add(acc, k, Rational(c * s));
}

// alpha . beta in the exterior algebra.
inline std::optional<std::pair<ExtMono, int>> ext_product(const ExtMono& alpha, const ExtMono& beta) {
    ExtMono r = beta;
    int sign = 1;
    for (auto it = alpha.rbegin(); it != alpha.rend(); ++it) {
        auto w = ext_wedge(*it, r);
        if (!w) return std::nullopt;
        sign *= w->second;
        r = std::move(w->first);
    }
    return std::make_pair(std::move(r), sign);
}

class VertexAlgebra {
public:
    // V must be the quantum vacuum module.
    explicit VertexAlgebra(LoopModule<Rational>& V, int window = INT_MAX)
        : V_(V), L_(V.algebra()), X_(V, PairKind::Absolute), window_(window) {
        if (V.kind() != ModuleKind::Vacuum || V.flavor() != Flavor::Quantum)
            throw std::invalid_argument("vertex layer needs the quantum vacuum module");
    }

    ChevalleyComplex<Rational>& complex() { return X_; }
    LoopModule<Rational>& module() { return V_; }
    const SimpleLieAlgebra& algebra() const { return L_; }

    static int parity(const CochainKey& k) { return static_cast<int>(k.first.size() % 2); }
    int energy(const CochainKey& k) const { return X_.energy(k); }

    static CochainKey vacuum_key() { return CochainKey{}; }
    static State vacuum() { return state_of(vacuum_key()); }
    // J^a_{-1-k} v and psi*(a, k)
    static CochainKey current(int a, int k = 0) { return CochainKey{{}, {mode_code(a, -1 - k)}}; }
    static CochainKey ghost(int a, int k = 0) { return CochainKey{{mode_code(a, k)}, {}}; }

    State d(const State& x) { return X_.d(x); }

    // Translation: derivation with [T, J_n] = -n J_{n-1}, T psi*(a,m) = (m+1) psi*(a,m+1), T vac = 0.
    const State& T(const CochainKey& k) {
        auto it = tmemo_.find(k);
        if (it != tmemo_.end()) return it->second;
        State out;
        const auto& [alpha, u] = k;
        for (std::size_t i = 0; i < u.size(); ++i) {
            int a = mode_index(u[i]), n = mode_level(u[i]);
            std::vector<int> codes = u;
            codes[i] = mode_code(a, n - 1);
            for (auto& [m, c] : V_.word(codes)) cochain_add(out, CochainKey{alpha, m}, Rational(c * Rational(-n)));
        }
        for (std::size_t i = 0; i < alpha.size(); ++i) {
            int a = mode_index(alpha[i]), m = mode_level(alpha[i]);
            ExtMono rest = alpha;
            rest.erase(rest.begin() + static_cast<long>(i));
            auto w = ext_wedge(mode_code(a, m + 1), rest);
            if (!w) continue;
            int s = (i % 2 ? -1 : 1) * w->second;
            cochain_add(out, CochainKey{w->first, u}, Rational((m + 1) * s));
        }
        return tmemo_.emplace(k, std::move(out)).first->second;
    }
    State T(const State& x) {
        State out;
        for (auto& [k, c] : x) state_add(out, T(k), c);
        return out;
    }
    // T^j / j!
    State Tdiv(const State& x, int j) {
        State cur = x;
        for (int i = 1; i <= j; ++i) {
            cur = T(cur);
            for (auto& [k, c] : cur) c /= i;
        }
        return cur;
    }

    // Modes of the vertex operator of a PBW vector on the vacuum module.
    const Element<Rational>& vmode(const Monomial& u, int k, const Monomial& w) {
        auto key = std::make_tuple(u, k, w);
        auto it = vmemo_.find(key);
        if (it != vmemo_.end()) return it->second;
        Element<Rational> out;
        int eu = V_.energy(u), ew = V_.energy(w);
        int eout = eu + ew - k - 1;
        if (eout > window_) throw WindowOverflow(eout);
        if (eout >= 0) {
            if (u.empty()) {
                if (k == -1) out.emplace(w, Rational(1));
            } else {
                // u = (J^a_{-1} v)_{(m)} u'
                int a = mode_index(u.front()), m = mode_level(u.front());
                Monomial up(u.begin() + 1, u.end());
                int eup = V_.energy(up);
                Rational sgn_m = (m % 2 == 0) ? Rational(1) : Rational(-1);
                for (int j = 0; j <= eup + ew - k - 1; ++j) {
                    Rational bin = binomial(j - m - 1, j);
                    Element<Rational> inner = vmode(up, k + j, w);
                    elem_add(out, V_.act(a, m - j, inner), bin);
                }
                for (int j = 0; j <= ew; ++j) {
                    Rational bin = binomial(j - m - 1, j);
                    const Element<Rational> jw = V_.act(a, j, Element<Rational>{{w, Rational(1)}});
                    for (auto& [mm, c] : jw) elem_add(out, vmode(up, m + k - j, mm), Rational(-sgn_m * bin * c));
                }
            }
        }
        return vmemo_.emplace(std::move(key), std::move(out)).first->second;
    }

    // T^j alpha / j! on exterior monomials.
    const State& ext_Tdiv(const ExtMono& alpha, int j) {
        auto key = std::make_pair(alpha, j);
        auto it = extmemo_.find(key);
        if (it != extmemo_.end()) return it->second;
        State s = Tdiv(state_of(CochainKey{alpha, {}}), j);
        return extmemo_.emplace(key, std::move(s)).first->second;
    }

    // A_{(n)} B on basis states.
    const State& mode(const CochainKey& A, int n, const CochainKey& B) {
        auto key = std::make_tuple(A, n, B);
        auto it = mmemo_.find(key);
        if (it != mmemo_.end()) return it->second;
        State out;
        const auto& [alpha, u] = A;
        const auto& [beta, w] = B;
        int jmax = V_.energy(u) + V_.energy(w) - n - 1;
        for (int j = 0; j <= jmax; ++j) {
            const Element<Rational>& vm = vmode(u, n + j, w);
            if (vm.empty()) continue;
            for (auto& [ak, ac] : ext_Tdiv(alpha, j)) {
                auto pr = ext_product(ak.first, beta);
                if (!pr) continue;
                for (auto& [mm, c] : vm) cochain_add(out, CochainKey{pr->first, mm}, Rational(c * ac * pr->second));
            }
        }
        return mmemo_.emplace(std::move(key), std::move(out)).first->second;
    }
    State mode(const State& A, int n, const State& B) {
        State out;
        for (auto& [ka, ca] : A)
            for (auto& [kb, cb] : B) state_add(out, mode(ka, n, kb), Rational(ca * cb));
        return out;
    }
    State cup(const State& A, const State& B) { return mode(A, -1, B); }

    // psi*(a,m) wedge and psi(a,m) contraction on states.
    static State psi_star(int a, int m, const State& x) {
        State out;
        for (auto& [k, c] : x) {
            auto w = ext_wedge(mode_code(a, m), k.first);
            if (w) cochain_add(out, CochainKey{w->first, k.second}, Rational(c * w->second));
        }
        return out;
    }
    static State psi(int a, int m, const State& x) {
        State out;
        for (auto& [k, c] : x) {
            auto w = ext_contract(mode_code(a, m), k.first);
            if (w) cochain_add(out, CochainKey{w->first, k.second}, Rational(c * w->second));
        }
        return out;
    }

    // Homotopy Z_{(m)}: recursive extension of Z_0(J^a, psi*_b) = 1/2 delta_ab by skew-symmetry,
    // the translation rule and Leibniz in the second slot.
    // These generator values admit no consistent biderivation (J_{(0)} kills psi*, so the
    // pairing would have to vanish on [g,g]); on composites the result depends on the split.
    const State& Z(int m, const CochainKey& A, const CochainKey& B) {
        auto key = std::make_tuple(m, A, B);
        auto it = zmemo_.find(key);
        if (it != zmemo_.end()) return it->second;
        State out = compute_Z(m, A, B);
        return zmemo_.emplace(std::move(key), std::move(out)).first->second;
    }
    State Z(int m, const State& A, const State& B) {
        State out;
        for (auto& [ka, ca] : A)
            for (auto& [kb, cb] : B) state_add(out, Z(m, ka, kb), Rational(ca * cb));
        return out;
    }

    // Sign-and-parity-aware skew-symmetry: sigma sum_j (-1)^{m+j+1} T^{(j)} (B_{(m+j)} A).
    State skew_rhs(int m, const CochainKey& A, const CochainKey& B) {
        State out;
        int sigma = (parity(A) * parity(B)) ? -1 : 1;
        int jmax = energy(A) + energy(B) - m - 1;
        for (int j = 0; j <= jmax; ++j) {
            State t = Tdiv(mode(B, m + j, A), j);
            state_add(out, t, Rational(sigma * (((m + j + 1) % 2 == 0) ? 1 : -1)));
        }
        return out;
    }

    std::size_t memo_entries() const { return vmemo_.size() + mmemo_.size() + zmemo_.size(); }

private:
    static bool single(const CochainKey& k) { return k.first.size() + k.second.size() == 1; }

    // Generator and T-power of a single-factor state: (is_ghost, index, k) with state = T^{(k)} G.
    static std::tuple<bool, int, int> gen_of(const CochainKey& k) {
        if (!k.second.empty()) return {false, mode_index(k.second[0]), -1 - mode_level(k.second[0])};
        return {true, mode_index(k.first[0]), mode_level(k.first[0])};
    }

    // Z_{(n)}(G', G) for bare generators.
    static Rational z_gen(int n, bool g1ghost, int a1, bool g2ghost, int a2) {
        if (n != 0 || a1 != a2 || g1ghost == g2ghost) return 0;
        return g1ghost ? frac(-1, 2) : frac(1, 2);
    }

    State compute_Z(int m, const CochainKey& A, const CochainKey& B) {
        State out;
        if (m < 0 || A == vacuum_key() || B == vacuum_key()) return out;
        if (single(B)) {
            if (single(A)) {
                auto [ga, ia, k] = gen_of(A);
                auto [gb, ib, l] = gen_of(B);
                // Z_m(T^{(k)}G, T^{(l)}G') = (-1)^k C(m,k) Z_{m-k}(G, T^{(l)}G')
                // Z_n(G, T^{(l)}G') = sigma (-1)^{n+1} (-1)^l C(n,l) Z_{n-l}(G', G)
                int n = m - k;
                if (n < 0 || n - l < 0) return out;
                int sigma = (ga && gb) ? -1 : 1;
                Rational c = binomial(m, k) * binomial(n, l) * z_gen(n - l, gb, ib, ga, ia);
                int sgn = ((k + n + 1 + l) % 2 == 0) ? 1 : -1;
                c *= sigma * sgn;
                if (!is_zero(c)) out.emplace(vacuum_key(), c);
                return out;
            }
            // swap so the single factor comes first
            int sigma = (parity(A) * parity(B)) ? -1 : 1;
            int jmax = energy(A) + energy(B) - m - 1;
            for (int j = 0; j <= jmax; ++j) {
                State t = Tdiv(State(Z(m + j, B, A)), j);
                state_add(out, t, Rational(sigma * (((m + j + 1) % 2 == 0) ? 1 : -1)));
            }
            return out;
        }
        // B = X_{(-1)} C with X the leading factor
        CochainKey Xk, Ck;
        if (!B.second.empty()) {
            Xk = CochainKey{{}, {B.second.front()}};
            Ck = CochainKey{B.first, Monomial(B.second.begin() + 1, B.second.end())};
        } else {
            Xk = CochainKey{{B.first.front()}, {}};
            Ck = CochainKey{ExtMono(B.first.begin() + 1, B.first.end()), {}};
        }
        State C = state_of(Ck), X = state_of(Xk);
        int pA = parity(A), pX = parity(Xk);
        // Z_m(A,X)_{(-1)} C + sum_{j<m} C(m,j) Z_j(A,X)_{(m-1-j)} C
        for (int j = 0; j <= m; ++j) {
            const State& zax = Z(j, A, Xk);
            if (zax.empty()) continue;
            state_add(out, mode(zax, m - 1 - j, C), binomial(m, j));
        }
        // (-1)^{(p_A+1) p_X} X_{(-1)} Z_m(A, C)
        const State& zac = Z(m, A, Ck);
        if (!zac.empty()) state_add(out, mode(X, -1, zac), Rational(((pA + 1) * pX) % 2 ? -1 : 1));
        return out;
    }

    LoopModule<Rational>& V_;
    SimpleLieAlgebra L_;
    ChevalleyComplex<Rational> X_;
    int window_;
    std::map<CochainKey, State> tmemo_;
    std::map<std::tuple<Monomial, int, Monomial>, Element<Rational>> vmemo_;
    std::map<std::pair<ExtMono, int>, State> extmemo_;
    std::map<std::tuple<CochainKey, int, CochainKey>, State> mmemo_;
    std::map<std::tuple<int, CochainKey, CochainKey>, State> zmemo_;
};

}  // namespace kmcoh
